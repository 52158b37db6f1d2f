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
#pragma once

#include <cstddef>
#include <cstdint>

#include "precoder/error.hpp"

namespace precoder {

// One I/Q sample: 16-bit real and imaginary halves of a 32-bit word, each read
// as Q1.15. All arithmetic below works on the raw integers; the Q1.15 view is
// a fixed 2^-15 scale applied only when converting to or from real numbers.
struct FixedComplex {
  std::int16_t re = 0;
  std::int16_t im = 0;

  friend constexpr bool operator==(FixedComplex, FixedComplex) = default;
};

inline constexpr int kFracBits = 15;
inline constexpr double kQ15Scale = 1.0 / 32768.0;

constexpr double to_real(std::int16_t v) noexcept { return v * kQ15Scale; }

// Accumulator for exact products and short sums of products. Stored in int64
// but contractually limited to 40-bit two's complement.
struct WideComplex {
  std::int64_t re = 0;
  std::int64_t im = 0;

  friend constexpr bool operator==(WideComplex, WideComplex) = default;
};

inline constexpr int kWideBits = 40;
inline constexpr std::int64_t kWideMax = (std::int64_t{1} << (kWideBits - 1)) - 1;
inline constexpr std::int64_t kWideMin = -(std::int64_t{1} << (kWideBits - 1));

constexpr bool fits_wide(std::int64_t v) noexcept { return v >= kWideMin && v <= kWideMax; }

// Three-multiplier complex product h * x with h = a + jb, x = c + jd:
//   t1 = c(a + b), t2 = a(d - c), t3 = b(c + d), Re = t1 - t3, Im = t1 + t2.
// The pre-adders are 17-bit signed and the products 33-bit, so the result is
// the exact integer product.
constexpr WideComplex karatsuba_mul(FixedComplex h, FixedComplex x) noexcept {
  const std::int32_t a = h.re;
  const std::int32_t b = h.im;
  const std::int32_t c = x.re;
  const std::int32_t d = x.im;

  const std::int64_t t1 = std::int64_t{c} * (a + b);
  const std::int64_t t2 = std::int64_t{a} * (d - c);
  const std::int64_t t3 = std::int64_t{b} * (c + d);
  return {t1 - t3, t1 + t2};
}

// Four-multiplier reference product.
constexpr WideComplex schoolbook_mul(FixedComplex h, FixedComplex x) noexcept {
  const std::int64_t a = h.re;
  const std::int64_t b = h.im;
  const std::int64_t c = x.re;
  const std::int64_t d = x.im;
  return {a * c - b * d, a * d + b * c};
}

inline WideComplex wide_add(WideComplex p, WideComplex q) {
  const WideComplex s{p.re + q.re, p.im + q.im};
  if (!fits_wide(s.re) || !fits_wide(s.im)) {
    throw Error(Errc::accumulator_overflow, "sum leaves the 40-bit accumulator range");
  }
  return s;
}

namespace detail {

constexpr std::int16_t shift_saturate(std::int64_t v, bool& clipped) noexcept {
  const std::int64_t shifted = v >> kFracBits;  // arithmetic shift: floor
  if (shifted > INT16_MAX) {
    clipped = true;
    return INT16_MAX;
  }
  if (shifted < INT16_MIN) {
    clipped = true;
    return INT16_MIN;
  }
  return static_cast<std::int16_t>(shifted);
}

}  // namespace detail

// Requantize an accumulator back to the 16-bit I/Q wire format: floor(v / 2^15)
// per component, then clip. Adds one to saturation_count for each clipped
// component.
constexpr FixedComplex quantize(WideComplex p, std::size_t& saturation_count) noexcept {
  bool re_clipped = false;
  bool im_clipped = false;
  const FixedComplex out{detail::shift_saturate(p.re, re_clipped),
                         detail::shift_saturate(p.im, im_clipped)};
  saturation_count += static_cast<std::size_t>(re_clipped) + static_cast<std::size_t>(im_clipped);
  return out;
}

constexpr FixedComplex quantize(WideComplex p) noexcept {
  std::size_t ignored = 0;
  return quantize(p, ignored);
}

}  // namespace precoder
