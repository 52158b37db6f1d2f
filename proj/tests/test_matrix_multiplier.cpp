/*
 * Copyright 2026 The precoder-sim Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <random>

#include "oracle.hpp"
#include "precoder/matrix_multiplier.hpp"

namespace precoder {
namespace {

template <class F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::io;
}

UserVector to_user(const std::vector<FixedComplex>& v) {
  UserVector x{};
  std::copy(v.begin(), v.end(), x.begin());
  return x;
}

TEST(Broadcast, FanoutPerAntennaCount) {
  EXPECT_EQ(fanout_for(16), 1);
  EXPECT_EQ(fanout_for(32), 2);
  EXPECT_EQ(fanout_for(64), 4);
  UserVector x{};
  x[3] = {5, -6};
  const auto g = broadcast(x, 4);
  ASSERT_EQ(g.view().size(), 4u);
  for (const auto& copy : g.view()) EXPECT_EQ(copy, x);
  EXPECT_EQ(error_code([&] { broadcast(x, 3); }), Errc::unsupported_fanout);
  EXPECT_EQ(error_code([&] { broadcast(x, 8); }), Errc::unsupported_fanout);
}

TEST(DotProduct, MatchesExactSum) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20000; ++trial) {
    Block2x8 h{};
    for (auto& row : h)
      for (auto& v : row) v = oracle::random_sample(rng);
    const auto x = to_user(oracle::random_vector(rng, 8));
    const auto out = dot_product_2x8(h, x);
    for (std::size_t r = 0; r < 2; ++r) {
      oracle::Exact e;
      for (std::size_t k = 0; k < 8; ++k) {
        const auto p = oracle::mul(h[r][k], x[k]);
        e.re += p.re;
        e.im += p.im;
      }
      ASSERT_EQ(static_cast<oracle::Int128>(out[r].re), e.re);
      ASSERT_EQ(static_cast<oracle::Int128>(out[r].im), e.im);
    }
  }
}

TEST(Combine, MapsPortsToRowPairs) {
  std::vector<PortPartial> partials(8);
  for (int p = 0; p < 8; ++p) {
    partials[static_cast<std::size_t>(p)].port = p;
    partials[static_cast<std::size_t>(p)].rows = {WideComplex{32768LL * (2 * p), 0},
                                                   WideComplex{0, -32768LL * (2 * p + 1)}};
  }
  const auto out = combine(partials, 16);
  ASSERT_EQ(out.y.size(), 16u);
  for (int r = 0; r < 16; ++r) {
    const auto v = out.y[static_cast<std::size_t>(r)];
    if (r % 2 == 0) {
      EXPECT_EQ(v, (FixedComplex{static_cast<std::int16_t>(r), 0}));
    } else {
      EXPECT_EQ(v, (FixedComplex{0, static_cast<std::int16_t>(-r)}));
    }
  }
  EXPECT_EQ(out.saturation_count, 0u);
}

TEST(Combine, ZeroPartialsGiveZeroOutput) {
  std::vector<PortPartial> partials(16);
  for (int p = 0; p < 16; ++p) partials[static_cast<std::size_t>(p)].port = p;
  const auto out = combine(partials, 32);
  for (const auto& v : out.y) EXPECT_EQ(v, (FixedComplex{0, 0}));
}

TEST(Combine, SaturatesAndCounts) {
  std::vector<PortPartial> partials(8);
  for (int p = 0; p < 8; ++p) partials[static_cast<std::size_t>(p)].port = p;
  partials[0].rows[0] = {std::int64_t{1} << 32, -(std::int64_t{1} << 32)};
  const auto out = combine(partials, 16);
  EXPECT_EQ(out.y[0], (FixedComplex{32767, -32768}));
  EXPECT_EQ(out.saturation_count, 2u);
}

TEST(Combine, RejectsWrongCountAndOrder) {
  std::vector<PortPartial> partials(7);
  EXPECT_EQ(error_code([&] { combine(partials, 16); }), Errc::dimension_mismatch);
  partials.resize(8);
  for (int p = 0; p < 8; ++p) partials[static_cast<std::size_t>(p)].port = p;
  std::swap(partials[2], partials[3]);
  EXPECT_EQ(error_code([&] { combine(partials, 16); }), Errc::partial_order);
}

TEST(PrecodeRe, MatchesOracleForAllShapes) {
  std::mt19937_64 rng(33);
  for (int n_t : {16, 32, 64}) {
    for (int trial = 0; trial < 500; ++trial) {
      const int amp = trial % 2 ? 32768 : 4096;
      const auto h = oracle::random_matrix(rng, n_t, 8, amp);
      const auto x = oracle::random_vector(rng, 8);
      const auto out = precode_re(h, to_user(x));
      ASSERT_EQ(out.y, oracle::matvec_quantized(h, x)) << "n_t=" << n_t;
    }
  }
}

TEST(PrecodeRe, IdentityPattern) {
  PrecodingMatrix h(16, 8);
  for (int i = 0; i < 8; ++i) h.at(i, i) = {32767, 0};
  UserVector x{};
  for (int i = 0; i < 8; ++i) x[static_cast<std::size_t>(i)] = {static_cast<std::int16_t>(1000 * (i + 1)), static_cast<std::int16_t>(-7 * i)};
  const auto y = precode_re(h, x).y;
  for (int i = 0; i < 8; ++i) {
    // 32767/32768 of each sample, floored.
    EXPECT_EQ(y[static_cast<std::size_t>(i)], oracle::matvec_quantized(h, std::vector<FixedComplex>(x.begin(), x.end()))[static_cast<std::size_t>(i)]);
    EXPECT_EQ(y[static_cast<std::size_t>(i)].re, 1000 * (i + 1) - 1);
  }
  for (int i = 8; i < 16; ++i) EXPECT_EQ(y[static_cast<std::size_t>(i)], (FixedComplex{0, 0}));
}

TEST(PrecodeRe, SixtyFourIsFourStackedSixteens) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto h = oracle::random_matrix(rng, 64, 8);
    const auto x = to_user(oracle::random_vector(rng, 8));
    const auto whole = precode_re(h, x).y;
    for (int q = 0; q < 4; ++q) {
      PrecodingMatrix part(16, 8);
      for (int r = 0; r < 16; ++r)
        for (int c = 0; c < 8; ++c) part.at(r, c) = h.at(16 * q + r, c);
      const auto y = precode_re(part, x).y;
      ASSERT_TRUE(std::equal(y.begin(), y.end(), whole.begin() + 16 * q));
    }
  }
}

TEST(PrecodeRe, ExactLinearityBeforeQuantization) {
  // With inputs scaled by 2^15 the quantizer is exact, so the outputs are
  // additive in x.
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto h = oracle::random_matrix(rng, 32, 8, 64);
    UserVector a{}, b{}, s{};
    for (std::size_t k = 0; k < 8; ++k) {
      a[k] = oracle::random_sample(rng, 128);
      b[k] = oracle::random_sample(rng, 128);
      s[k] = {static_cast<std::int16_t>(a[k].re + b[k].re), static_cast<std::int16_t>(a[k].im + b[k].im)};
    }
    const auto ya = oracle::matvec_exact(h, std::vector<FixedComplex>(a.begin(), a.end()));
    const auto yb = oracle::matvec_exact(h, std::vector<FixedComplex>(b.begin(), b.end()));
    const auto ys = oracle::matvec_exact(h, std::vector<FixedComplex>(s.begin(), s.end()));
    for (std::size_t r = 0; r < 32; ++r) {
      ASSERT_EQ(ya[r].re + yb[r].re, ys[r].re);
      ASSERT_EQ(ya[r].im + yb[r].im, ys[r].im);
    }
    ASSERT_EQ(precode_re(h, s).y, oracle::matvec_quantized(h, std::vector<FixedComplex>(s.begin(), s.end())));
  }
}

TEST(PrecodeRe, ZeroMatrixGivesZero) {
  std::mt19937_64 rng(7);
  const PrecodingMatrix h(64, 8);
  const auto y = precode_re(h, to_user(oracle::random_vector(rng, 8))).y;
  for (const auto& v : y) EXPECT_EQ(v, (FixedComplex{0, 0}));
}

TEST(PrecodeRe, ReadoutBlocksEqualMatrixBlocks) {
  std::mt19937_64 rng(8);
  for (int n_t : {16, 32, 64}) {
    const auto h = oracle::random_matrix(rng, n_t, 8);
    PrecoderCoefficientMemory pcm(n_t);
    for (int c = 0; c < 8; ++c) {
      std::vector<FixedComplex> col;
      for (int r = 0; r < n_t; ++r) col.push_back(h.at(r, c));
      pcm.write_column(1, c, col);
    }
    EXPECT_EQ(blocks_from_readout(pcm.read(1)), blocks_from_matrix(h));
  }
}

TEST(PrecodeRe, RejectsBadShapes) {
  EXPECT_EQ(error_code([] { precode_re(PrecodingMatrix(24, 8), UserVector{}); }), Errc::dimension_mismatch);
  EXPECT_EQ(error_code([] { precode_re(PrecodingMatrix(16, 4), UserVector{}); }), Errc::dimension_mismatch);
}

}  // namespace
}  // namespace precoder
