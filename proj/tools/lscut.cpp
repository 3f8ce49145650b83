#include <cstdint>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lscut/lscut.hpp"

namespace {

using namespace lscut;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  return out;
}

// Writes to `path`, or stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string labeling_string(const std::vector<int>& labels) {
  std::ostringstream s;
  for (std::size_t i = 0; i < labels.size(); ++i) s << (i ? " " : "") << labels[i];
  return s.str();
}

// "25", "25x30" -> (w, h)
std::pair<int, int> parse_grid(const std::string& g) {
  const auto x = g.find_first_of("xX");
  try {
    if (x == std::string::npos) {
      const int n = std::stoi(g);
      return {n, n};
    }
    return {std::stoi(g.substr(0, x)), std::stoi(g.substr(x + 1))};
  } catch (const std::exception&) {
    throw InvalidArgument("bad --grid '" + g + "', expected N or WxH");
  }
}

std::vector<int> powers_of_two(int lo, int hi) {
  std::vector<int> ks;
  for (int k = lo; k <= hi; k *= 2) ks.push_back(k);
  return ks;
}

struct Options {
  std::string cache_dir;

  std::string problem;
  std::string out;

  std::string what;
  std::vector<int> k_list;
  int trials = 500;
  std::string grid = "25x25";
  std::string mode = "ls";
  double noise_level = 0.25;
  std::uint64_t seed = 1;
  int realizations = 10;
  int b_max = 8;
  std::string csv;

  int k = 2;
  int size = 64;
  std::string out_img;
  std::string out_gt;
  bool ascii = false;

  std::string img;
  std::string gt;
  double lambda = 0.5;
  std::string prior = "potts";
  double beta = 1.0;
  double fraction = 0.5;

  std::string config;
};

SystemCache& cache_for(const Options& o) {
  static std::optional<SystemCache> local;
  if (o.cache_dir.empty()) return SystemCache::global();
  if (!local) local.emplace(o.cache_dir);
  return *local;
}

int run_solve(const Options& o) {
  const MrfProblem problem = load_problem(o.problem);
  const SolveResult r = solve(problem, cache_for(o));
  nlohmann::json j;
  j["labeling"] = r.labeling;
  j["binary_labels"] = r.binary_labels;
  j["energy"] = r.energy;
  j["cut_cost"] = r.cut_cost;
  j["diagnostics"] = {{"mean_e_b", r.mean_e_b},
                      {"mean_e_t", r.mean_e_t},
                      {"clamp_count", r.clamp.count},
                      {"clamp_magnitude", r.clamp.magnitude},
                      {"clamp_ratio", r.clamp.ratio()}};
  emit(o.out, j.dump(2) + "\n");
  return 0;
}

int run_oracle(const Options& o) {
  const OracleResult r = exhaustive_mrf(load_problem(o.problem));
  std::cout << "energy " << format_number(r.optimum_value) << "\nlabeling " << labeling_string(r.optimizer) << "\n";
  return 0;
}

int run_graph(const Options& o) {
  const BinaryCutGraph g = build_graph(load_problem(o.problem), cache_for(o));
  std::ostringstream s;
  dump_graph(s, g);
  emit(o.out, s.str());
  return 0;
}

int run_analyze(const Options& o) {
  std::ostringstream s;
  if (o.what == "rank-table") {
    write_rank_table_csv(s, rank_table(o.b_max));
  } else if (o.what == "ls-error") {
    std::vector<int> ks = o.k_list;
    if (ks.empty()) {
      ks.resize(255);
      std::iota(ks.begin(), ks.end(), 2);
    }
    write_residual_csv(s, ls_error_mc(ks, o.trials, o.seed, {}, cache_for(o)));
  } else if (o.what == "cut-error") {
    PerturbationOptions p;
    if (o.mode == "ls") {
      p.mode = PerturbationMode::ls;
    } else if (o.mode == "random") {
      p.mode = PerturbationMode::random;
    } else {
      throw InvalidArgument("--mode must be ls or random");
    }
    std::tie(p.grid_w, p.grid_h) = parse_grid(o.grid);
    p.noise_level = o.noise_level;
    p.realizations = o.realizations;
    p.seed = o.seed;
    const std::vector<int> ks = o.k_list.empty() ? powers_of_two(2, 256) : o.k_list;
    write_perturbation_csv(s, cut_perturbation(ks, p, cache_for(o)));
  } else {
    throw InvalidArgument("unknown analysis '" + o.what + "'");
  }
  emit(o.csv, s.str());
  return 0;
}

int run_synth(const Options& o) {
  const Scene scene = synth_ellipses(o.k, o.size, o.size, o.seed);
  write_pgm_file(o.out_img, to_greymap(scene.image), !o.ascii);
  write_pgm_file(o.out_gt, to_greymap(scene.truth, o.k), !o.ascii);
  return 0;
}

int run_segment(const Options& o) {
  const Image img = to_image(read_pgm_file(o.img));
  const LabelMap gt = to_label_map(read_pgm_file(o.gt));
  if (gt.width != img.width || gt.height != img.height) throw InvalidArgument("--img and --gt dimensions differ");
  PriorSpec prior;
  prior.label_kind = label_kind_from_string(o.prior);
  prior.data_kind = DataKind::gaussian;
  prior.beta = o.beta;
  auto terms = learn_data_terms(img, gt, o.k, o.fraction, o.seed);
  const SegmentResult seg = segment(img, std::move(terms), prior, o.lambda, o.k, cache_for(o));
  if (!o.out.empty()) write_pgm_file(o.out, to_greymap(seg.labels, o.k), !o.ascii);
  std::cout << "dsc " << format_number(dice(seg.labels, gt)) << "\nenergy " << format_number(seg.solve.energy)
            << "\ncut_cost " << format_number(seg.solve.cut_cost) << "\n";
  return 0;
}

int run_sweep_cmd(const Options& o) {
  std::ifstream in(o.config);
  if (!in) throw IoError("cannot open '" + o.config + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed sweep config: ") + e.what());
  }
  std::ostringstream s;
  write_sweep_csv(s, run_sweep(sweep_config_from_json(j), cache_for(o)));
  emit(o.csv, s.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-label MRF labeling via a single binary s-t min-cut"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--cache-dir", o.cache_dir, "Directory for cached pseudoinverses");

  auto* solve_cmd = app.add_subcommand("solve", "Solve a problem file with the LS graph cut");
  solve_cmd->add_option("--problem", o.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("--out", o.out, "Output JSON (default stdout)");

  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive minimum of a small problem");
  oracle_cmd->add_option("--problem", o.problem, "Problem JSON")->required()->check(CLI::ExistingFile);

  auto* graph_cmd = app.add_subcommand("graph", "Dump the expanded binary graph");
  graph_cmd->add_option("--problem", o.problem, "Problem JSON")->required()->check(CLI::ExistingFile);
  graph_cmd->add_option("--out", o.out, "Output file (default stdout)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Residual, rank and perturbation studies");
  analyze_cmd->add_option("what", o.what, "ls-error | rank-table | cut-error")
      ->required()
      ->check(CLI::IsMember({"ls-error", "rank-table", "cut-error"}));
  analyze_cmd->add_option("--k-list", o.k_list, "Comma-separated label counts")->delimiter(',');
  analyze_cmd->add_option("--trials", o.trials, "Monte Carlo trials per k")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--grid", o.grid, "Grid size N or WxH");
  analyze_cmd->add_option("--mode", o.mode, "ls | random")->check(CLI::IsMember({"ls", "random"}));
  analyze_cmd->add_option("--noise-level", o.noise_level, "Random-mode noise level")->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--realizations", o.realizations, "Grids per k")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--b-max", o.b_max, "Largest bit count in the rank table")->check(CLI::Range(1, kMaxBits));
  analyze_cmd->add_option("--seed", o.seed, "RNG seed");
  analyze_cmd->add_option("--csv", o.csv, "Output CSV (default stdout)");

  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic ellipse scene");
  synth_cmd->add_option("--k", o.k, "Label count")->required();
  synth_cmd->add_option("--size", o.size, "Image side length")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", o.seed, "RNG seed");
  synth_cmd->add_option("--out-img", o.out_img, "Image PGM")->required();
  synth_cmd->add_option("--out-gt", o.out_gt, "Ground-truth label PGM")->required();
  synth_cmd->add_flag("--ascii", o.ascii, "Write P2 instead of P5");

  auto* segment_cmd = app.add_subcommand("segment", "Segment an image with learned Gaussian data terms");
  segment_cmd->add_option("--img", o.img, "Input image PGM")->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("--gt", o.gt, "Ground-truth label PGM")->required()->check(CLI::ExistingFile);
  segment_cmd->add_option("--k", o.k, "Label count")->required();
  segment_cmd->add_option("--lambda", o.lambda, "Prior weight")->check(CLI::NonNegativeNumber);
  segment_cmd->add_option("--prior", o.prior, "Label penalty kind");
  segment_cmd->add_option("--beta", o.beta, "Intensity penalty beta");
  segment_cmd->add_option("--fraction", o.fraction, "Fraction of each region used for learning");
  segment_cmd->add_option("--seed", o.seed, "RNG seed");
  segment_cmd->add_option("--out", o.out, "Output label PGM");
  segment_cmd->add_flag("--ascii", o.ascii, "Write P2 instead of P5");

  auto* sweep_cmd = app.add_subcommand("sweep", "Segmentation parameter sweep");
  sweep_cmd->add_option("--config", o.config, "Sweep JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--csv", o.csv, "Output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return run_solve(o);
    if (*oracle_cmd) return run_oracle(o);
    if (*graph_cmd) return run_graph(o);
    if (*analyze_cmd) return run_analyze(o);
    if (*synth_cmd) return run_synth(o);
    if (*segment_cmd) return run_segment(o);
    if (*sweep_cmd) return run_sweep_cmd(o);
  } catch (const std::exception& e) {
    std::cerr << "lscut: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
