#include <gtest/gtest.h>

#include "lscut/label_codec.hpp"

using namespace lscut;

namespace {
BitCode bits(std::initializer_list<int> v) {
  BitCode out;
  for (int x : v) out.push_back(static_cast<std::uint8_t>(x));
  return out;
}
}  // namespace

TEST(LabelCodec, BitWidthExamples) {
  EXPECT_EQ(bit_width(2), 1);
  EXPECT_EQ(bit_width(3), 2);
  EXPECT_EQ(bit_width(4), 2);
  EXPECT_EQ(bit_width(5), 3);
  EXPECT_EQ(bit_width(8), 3);
  EXPECT_EQ(bit_width(9), 4);
  EXPECT_EQ(bit_width(256), 8);
}

TEST(LabelCodec, BitWidthRejectsSmallK) {
  EXPECT_THROW(bit_width(1), InvalidArgument);
  EXPECT_THROW(bit_width(0), InvalidArgument);
  EXPECT_THROW(bit_width(-3), InvalidArgument);
}

TEST(LabelCodec, BitWidthIsMinimal) {
  for (int k = 2; k <= 256; ++k) {
    const int b = bit_width(k);
    EXPECT_LT(1 << (b - 1), k) << k;
    EXPECT_LE(k, 1 << b) << k;
  }
}

TEST(LabelCodec, EncodeExamples) {
  EXPECT_EQ(encode(5, 3), bits({1, 0, 1}));
  EXPECT_EQ(encode(0, 2), bits({0, 0}));
  EXPECT_EQ(encode(3, 2), bits({1, 1}));
  EXPECT_THROW(encode(4, 2), RangeError);
}

TEST(LabelCodec, DecodeInvertsEncode) {
  for (int b = 1; b <= 8; ++b)
    for (std::uint32_t x = 0; x < (1u << b); ++x) EXPECT_EQ(decode(encode(x, b)), x);
}

TEST(LabelCodec, CodeBitIsMsbFirst) {
  EXPECT_EQ(code_bit(4, 0, 3), 1);
  EXPECT_EQ(code_bit(4, 2, 3), 0);
  EXPECT_EQ(code_bit(1, 2, 3), 1);
}

TEST(LabelCodec, MergeExamples) {
  const LabelSpace k5(5);
  EXPECT_EQ(k5.merge(0b100), 4);  // a used label, so not merged
  EXPECT_EQ(k5.merge(0b101), 1);
  EXPECT_EQ(k5.merge(0b110), 2);
  EXPECT_EQ(k5.merge(0b111), 3);
  const LabelSpace k3(3);
  EXPECT_EQ(k3.merge(2), 2);
  EXPECT_EQ(k3.merge(3), 1);
  EXPECT_THROW(k3.merge(4), RangeError);
}

TEST(LabelCodec, HammingExamples) {
  EXPECT_EQ(hamming(bits({0, 0, 0, 1}), bits({1, 0, 0, 1})), 1);
  EXPECT_EQ(hamming(bits({0, 0, 0, 1}), bits({0, 0, 1, 0})), 2);
  EXPECT_EQ(hamming(bits({1, 0, 1}), bits({1, 0, 1})), 0);
  EXPECT_THROW(hamming(bits({1}), bits({1, 0})), InvalidArgument);
}

TEST(LabelCodec, MergeMapProperties) {
  for (int k = 2; k <= 256; ++k) {
    const LabelSpace s(k);
    const auto map = s.merge_map();
    ASSERT_EQ(map.size(), static_cast<std::size_t>(1) << s.b());
    for (std::uint32_t n = 0; n < s.num_codes(); ++n) {
      EXPECT_LT(static_cast<int>(map[n]), k);
      if (n < static_cast<std::uint32_t>(k)) {
        EXPECT_EQ(map[n], n);
        EXPECT_FALSE(s.is_extra(n));
      } else {
        EXPECT_TRUE(s.is_extra(n));
        EXPECT_EQ(encode(n, s.b())[0], 1);
        EXPECT_EQ(hamming(encode(n, s.b()), encode(static_cast<std::uint32_t>(map[n]), s.b())), 1);
      }
    }
  }
}

TEST(LabelCodec, LabelSpaceRejectsOutOfRange) {
  EXPECT_THROW(LabelSpace(1), InvalidArgument);
  EXPECT_THROW(LabelSpace(257), InvalidArgument);
}
