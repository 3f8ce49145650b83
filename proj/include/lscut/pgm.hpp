#pragma once

// Netpbm greymaps: P2 (ASCII) and P5 (binary, 8- or 16-bit big-endian).

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lscut/errors.hpp"

namespace lscut {

struct Greymap {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<int> pixels;  // row-major raw sample values
};

namespace detail {

inline void skip_space_and_comments(std::istream& in) {
  for (;;) {
    const int c = in.peek();
    if (c == '#') {
      std::string line;
      std::getline(in, line);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      return;
    }
  }
}

inline int read_header_int(std::istream& in, const char* what) {
  skip_space_and_comments(in);
  int v = 0;
  if (!(in >> v)) throw IoError(std::string("pgm: cannot read ") + what);
  return v;
}

}  // namespace detail

inline Greymap read_pgm(std::istream& in) {
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) throw IoError("pgm: expected P2 or P5 magic");
  Greymap g;
  g.width = detail::read_header_int(in, "width");
  g.height = detail::read_header_int(in, "height");
  g.maxval = detail::read_header_int(in, "maxval");
  if (g.width <= 0 || g.height <= 0) throw IoError("pgm: non-positive dimensions");
  if (g.maxval <= 0 || g.maxval > 65535) throw IoError("pgm: maxval out of range");
  const std::size_t n = static_cast<std::size_t>(g.width) * g.height;
  g.pixels.resize(n);
  if (magic[1] == '2') {
    for (auto& p : g.pixels) p = detail::read_header_int(in, "sample");
  } else {
    in.get();  // single whitespace after maxval
    const int bytes = g.maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(n * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!in) throw IoError("pgm: truncated raster");
    for (std::size_t i = 0; i < n; ++i) g.pixels[i] = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
  }
  for (int p : g.pixels)
    if (p < 0 || p > g.maxval) throw IoError("pgm: sample exceeds maxval");
  return g;
}

inline void write_pgm(std::ostream& out, const Greymap& g, bool binary = true) {
  if (g.pixels.size() != static_cast<std::size_t>(g.width) * g.height) throw InvalidArgument("pgm: pixel count mismatch");
  out << (binary ? "P5" : "P2") << '\n' << g.width << ' ' << g.height << '\n' << g.maxval << '\n';
  if (binary) {
    const int bytes = g.maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(g.pixels.size() * bytes);
    for (std::size_t i = 0; i < g.pixels.size(); ++i) {
      if (bytes == 1) {
        raw[i] = static_cast<unsigned char>(g.pixels[i]);
      } else {
        raw[2 * i] = static_cast<unsigned char>(g.pixels[i] >> 8);
        raw[2 * i + 1] = static_cast<unsigned char>(g.pixels[i] & 0xff);
      }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  } else {
    for (int y = 0; y < g.height; ++y) {
      for (int x = 0; x < g.width; ++x) out << (x ? " " : "") << g.pixels[static_cast<std::size_t>(y) * g.width + x];
      out << '\n';
    }
  }
  if (!out) throw IoError("pgm: write failed");
}

inline Greymap read_pgm_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return read_pgm(in);
}

inline void write_pgm_file(const std::string& path, const Greymap& g, bool binary = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  write_pgm(out, g, binary);
}

}  // namespace lscut
