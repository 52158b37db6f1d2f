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
#include <span>
#include <string>
#include <vector>

#include "precoder/error.hpp"
#include "precoder/fixed_complex.hpp"

namespace precoder {

// N_T x N_L complex weight matrix, row-major. Rows are antennas, columns are
// layers.
class PrecodingMatrix {
 public:
  PrecodingMatrix() = default;
  PrecodingMatrix(int rows, int cols, std::uint8_t ian = 0)
      : rows_(rows), cols_(cols), ian_(ian), elements_(static_cast<std::size_t>(rows) * cols) {
    if (rows <= 0 || cols <= 0) throw Error(Errc::dimension_mismatch, "matrix dimensions must be positive");
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::uint8_t ian() const noexcept { return ian_; }
  void set_ian(std::uint8_t ian) noexcept { ian_ = ian; }

  FixedComplex& at(int r, int c) { return elements_[index(r, c)]; }
  FixedComplex at(int r, int c) const { return elements_[index(r, c)]; }

  std::span<const FixedComplex> row(int r) const {
    return std::span<const FixedComplex>(elements_).subspan(index(r, 0), static_cast<std::size_t>(cols_));
  }
  std::span<const FixedComplex> elements() const noexcept { return elements_; }

  PrecodingMatrix transposed() const {
    PrecodingMatrix t(cols_, rows_, ian_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t.at(c, r) = at(r, c);
    return t;
  }

  // Elements only; the IAN tag is bookkeeping.
  friend bool operator==(const PrecodingMatrix& a, const PrecodingMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.elements_ == b.elements_;
  }

 private:
  std::size_t index(int r, int c) const {
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_) {
      throw Error(Errc::out_of_range, "matrix index (" + std::to_string(r) + "," + std::to_string(c) + ")");
    }
    return static_cast<std::size_t>(r) * cols_ + c;
  }

  int rows_ = 0;
  int cols_ = 0;
  std::uint8_t ian_ = 0;
  std::vector<FixedComplex> elements_;
};

}  // namespace precoder
