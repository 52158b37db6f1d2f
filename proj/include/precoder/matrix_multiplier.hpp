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

// Per-RE beamforming product Y = H * X. The 8x1 user vector is broadcast to
// N_T/16 sub-multipliers of 16x8; each sub-multiplier runs eight 2x8 dot
// product units (one per PCM port) and the combiner stitches the 2x1
// partials back into the N_T x 1 output. Partials stay exact; the output is
// quantized once, at the combiner.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "precoder/error.hpp"
#include "precoder/fixed_complex.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/precoder_memory.hpp"
#include "precoder/precoding_matrix.hpp"

namespace precoder {

using UserVector = std::array<FixedComplex, kNumLayers>;
using Block2x8 = std::array<std::array<FixedComplex, kNumLayers>, 2>;
using Partial2 = std::array<WideComplex, 2>;

inline constexpr int kSubMultiplierRows = 16;
inline constexpr int kPortsPerSubMultiplier = kSubMultiplierRows / 2;
inline constexpr int kMaxFanout = 4;

struct OutputVector {
  std::vector<FixedComplex> y;
  std::size_t saturation_count = 0;
};

// ---------------------------------------------------------------------------
// Broadcaster

struct BroadcastGroup {
  std::array<UserVector, kMaxFanout> copies{};
  int fanout = 1;

  std::span<const UserVector> view() const noexcept {
    return std::span<const UserVector>(copies).first(static_cast<std::size_t>(fanout));
  }
};

// One copy per 16x8 sub-multiplier.
constexpr int fanout_for(int n_t) noexcept { return n_t / kSubMultiplierRows; }

inline BroadcastGroup broadcast(const UserVector& x, int fanout) {
  if (fanout != 1 && fanout != 2 && fanout != 4) {
    throw Error(Errc::unsupported_fanout, "fanout " + std::to_string(fanout));
  }
  BroadcastGroup g;
  g.fanout = fanout;
  for (int i = 0; i < fanout; ++i) g.copies[static_cast<std::size_t>(i)] = x;
  return g;
}

// ---------------------------------------------------------------------------
// Dot product unit

inline Partial2 dot_product_2x8(const Block2x8& h, std::span<const FixedComplex, kNumLayers> x) {
  Partial2 out{};
  for (std::size_t r = 0; r < 2; ++r) {
    WideComplex acc{};
    for (std::size_t k = 0; k < kNumLayers; ++k) acc = wide_add(acc, karatsuba_mul(h[r][k], x[k]));
    out[r] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Block sources

// Table-order blocks straight from a matrix: block p holds rows 2p and 2p+1.
inline std::vector<Block2x8> blocks_from_matrix(const PrecodingMatrix& h) {
  if (!is_supported_antenna_count(h.rows()) || h.cols() != kNumLayers) {
    throw Error(Errc::dimension_mismatch, "matrix is " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
  std::vector<Block2x8> blocks(static_cast<std::size_t>(h.rows() / 2));
  for (int p = 0; p < h.rows() / 2; ++p) {
    for (int c = 0; c < kNumLayers; ++c) {
      blocks[static_cast<std::size_t>(p)][0][static_cast<std::size_t>(c)] = h.at(2 * p, c);
      blocks[static_cast<std::size_t>(p)][1][static_cast<std::size_t>(c)] = h.at(2 * p + 1, c);
    }
  }
  return blocks;
}

// Blocks as the PCM ports deliver them: element 2c of a port stream is row 0
// of column c, element 2c+1 is row 1.
inline std::vector<Block2x8> blocks_from_readout(const PcmReadout& readout) {
  std::vector<Block2x8> blocks(readout.ports.size());
  for (std::size_t p = 0; p < readout.ports.size(); ++p) {
    const auto& stream = readout.ports[p];
    if (stream.size() != 2 * kNumLayers) {
      throw Error(Errc::dimension_mismatch, "port " + std::to_string(p) + " delivered " +
                                                std::to_string(stream.size()) + " elements");
    }
    for (std::size_t c = 0; c < kNumLayers; ++c) {
      blocks[p][0][c] = stream[2 * c];
      blocks[p][1][c] = stream[2 * c + 1];
    }
  }
  return blocks;
}

// ---------------------------------------------------------------------------
// Combiner

struct PortPartial {
  int port = 0;
  Partial2 rows{};
};

// Writes rows 2p and 2p+1 from partial p into `out` after quantization.
// Partials must arrive in port order. Returns the number of clipped
// components.
inline std::size_t combine_into(std::span<const PortPartial> partials, std::span<FixedComplex> out) {
  if (partials.size() * 2 != out.size()) {
    throw Error(Errc::dimension_mismatch, std::to_string(partials.size()) + " partials for " +
                                              std::to_string(out.size()) + " output rows");
  }
  std::size_t saturated = 0;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    if (partials[i].port != static_cast<int>(i)) {
      throw Error(Errc::partial_order, "partial from port " + std::to_string(partials[i].port) +
                                           " at position " + std::to_string(i));
    }
    out[2 * i] = quantize(partials[i].rows[0], saturated);
    out[2 * i + 1] = quantize(partials[i].rows[1], saturated);
  }
  return saturated;
}

inline OutputVector combine(std::span<const PortPartial> partials, int n_t) {
  if (!is_supported_antenna_count(n_t) || partials.size() != static_cast<std::size_t>(n_t / 2)) {
    throw Error(Errc::dimension_mismatch, std::to_string(partials.size()) + " partials for N_T=" +
                                              std::to_string(n_t));
  }
  OutputVector out;
  out.y.resize(static_cast<std::size_t>(n_t));
  out.saturation_count = combine_into(partials, out.y);
  return out;
}

// ---------------------------------------------------------------------------
// Full multiplier

// Runs the broadcaster, the dot-product units of every 16x8 sub-multiplier and
// the combiner. `blocks` are in port order; `out` receives 2 * blocks.size()
// rows.
inline std::size_t precode_blocks_into(std::span<const Block2x8> blocks, const UserVector& x,
                                       std::span<FixedComplex> out) {
  const int n_t = static_cast<int>(blocks.size()) * 2;
  if (!is_supported_antenna_count(n_t)) {
    throw Error(Errc::dimension_mismatch, std::to_string(blocks.size()) + " blocks");
  }
  const BroadcastGroup group = broadcast(x, fanout_for(n_t));
  std::array<PortPartial, 32> partials{};
  for (int unit = 0; unit < group.fanout; ++unit) {
    const UserVector& local = group.copies[static_cast<std::size_t>(unit)];
    for (int q = 0; q < kPortsPerSubMultiplier; ++q) {
      const int port = unit * kPortsPerSubMultiplier + q;
      partials[static_cast<std::size_t>(port)] = {port, dot_product_2x8(blocks[static_cast<std::size_t>(port)], local)};
    }
  }
  return combine_into(std::span<const PortPartial>(partials).first(blocks.size()), out);
}

inline OutputVector precode_blocks(std::span<const Block2x8> blocks, const UserVector& x) {
  OutputVector out;
  out.y.resize(blocks.size() * 2);
  out.saturation_count = precode_blocks_into(blocks, x, out.y);
  return out;
}

inline OutputVector precode_re(const PrecodingMatrix& h, const UserVector& x) {
  return precode_blocks(blocks_from_matrix(h), x);
}

}  // namespace precoder
