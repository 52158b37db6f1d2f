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

// Reference models the simulator checks itself against: an exact
// wide-integer matrix-vector product with four-multiplier complex products,
// and a double-precision model used as a loose cross-check.

#include <algorithm>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "precoder/fixed_complex.hpp"
#include "precoder/precoding_matrix.hpp"

namespace precoder::golden {

// quantize(M x) with M rows x cols and x of length cols.
inline std::vector<FixedComplex> matvec(const PrecodingMatrix& m, std::span<const FixedComplex> x) {
  std::vector<FixedComplex> y(static_cast<std::size_t>(m.rows()));
  const auto cols = static_cast<std::size_t>(m.cols());
  for (int r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    std::int64_t re = 0;
    std::int64_t im = 0;
    for (std::size_t k = 0; k < cols; ++k) {
      re += std::int64_t{row[k].re} * x[k].re - std::int64_t{row[k].im} * x[k].im;
      im += std::int64_t{row[k].re} * x[k].im + std::int64_t{row[k].im} * x[k].re;
    }
    y[static_cast<std::size_t>(r)] = quantize(WideComplex{re, im});
  }
  return y;
}

// Same product in doubles on the Q1.15 values, clipped to the representable
// range but not floored.
inline std::vector<std::complex<double>> matvec_real(const PrecodingMatrix& m, std::span<const FixedComplex> x) {
  std::vector<std::complex<double>> y(static_cast<std::size_t>(m.rows()));
  constexpr double lo = -1.0;
  constexpr double hi = 32767.0 / 32768.0;
  for (int r = 0; r < m.rows(); ++r) {
    std::complex<double> acc{0.0, 0.0};
    const auto row = m.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      acc += std::complex<double>(to_real(row[k].re), to_real(row[k].im)) *
             std::complex<double>(to_real(x[k].re), to_real(x[k].im));
    }
    y[static_cast<std::size_t>(r)] = {std::clamp(acc.real(), lo, hi), std::clamp(acc.imag(), lo, hi)};
  }
  return y;
}

// Largest per-component deviation of y (Q1.15) from a real-valued reference.
inline double max_real_error(std::span<const FixedComplex> y, std::span<const std::complex<double>> ref) {
  double worst = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    worst = std::max(worst, std::abs(to_real(y[i].re) - ref[i].real()));
    worst = std::max(worst, std::abs(to_real(y[i].im) - ref[i].imag()));
  }
  return worst;
}

}  // namespace precoder::golden
