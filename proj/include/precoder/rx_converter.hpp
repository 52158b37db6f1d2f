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

// TX to RX coefficient converter. The uplink needs H^T, but the dot-product
// units only take 2x8 blocks, so the transposed matrix is emitted as 2x8
// blocks: for each row pair of H^T, its columns are cut into chunks of eight,
// left to right. Two FSMs hand a matrix over from the input side to the
// output side.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "precoder/error.hpp"
#include "precoder/fixed_complex.hpp"
#include "precoder/matrix_multiplier.hpp"
#include "precoder/precoder_memory.hpp"
#include "precoder/precoding_matrix.hpp"

namespace precoder {

// ---------------------------------------------------------------------------
// Reordering

// H is N_T x 8. Emits H^T block by block; inside a block the two rows are
// interleaved per column, the same convention as a PCM port stream.
inline std::vector<FixedComplex> tx_to_rx_reorder(const PrecodingMatrix& h) {
  if (!is_supported_antenna_count(h.rows()) || h.cols() != kNumLayers) {
    throw Error(Errc::dimension_mismatch, "matrix is " + std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  }
  const int n_t = h.rows();
  std::vector<FixedComplex> stream;
  stream.reserve(static_cast<std::size_t>(n_t) * kNumLayers);
  for (int pair = 0; pair < kNumLayers / 2; ++pair) {
    for (int chunk = 0; chunk < n_t / kNumLayers; ++chunk) {
      for (int c = 0; c < kNumLayers; ++c) {
        // H^T[2*pair][8*chunk + c] == H[8*chunk + c][2*pair]
        stream.push_back(h.at(kNumLayers * chunk + c, 2 * pair));
        stream.push_back(h.at(kNumLayers * chunk + c, 2 * pair + 1));
      }
    }
  }
  return stream;
}

inline int rx_chunks(int n_t) noexcept { return n_t / kNumLayers; }

// Splits an RX stream into blocks; block (pair, chunk) is at pair * chunks + chunk.
inline std::vector<Block2x8> rx_blocks(std::span<const FixedComplex> stream, int n_t) {
  if (!is_supported_antenna_count(n_t) || stream.size() != static_cast<std::size_t>(n_t) * kNumLayers) {
    throw Error(Errc::dimension_mismatch, "RX stream of " + std::to_string(stream.size()) + " for N_T=" +
                                              std::to_string(n_t));
  }
  std::vector<Block2x8> blocks(stream.size() / (2 * kNumLayers));
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t c = 0; c < kNumLayers; ++c) {
      blocks[b][0][c] = stream[b * 2 * kNumLayers + 2 * c];
      blocks[b][1][c] = stream[b * 2 * kNumLayers + 2 * c + 1];
    }
  }
  return blocks;
}

// Uplink combining y = H^T x with x an N_T antenna vector, run on the same
// 2x8 dot-product units: each row pair accumulates one partial per chunk.
inline std::size_t rx_precode_into(std::span<const Block2x8> blocks, std::span<const FixedComplex> x,
                                   std::span<FixedComplex> out) {
  const int n_t = static_cast<int>(x.size());
  const int chunks = rx_chunks(n_t);
  if (!is_supported_antenna_count(n_t) || blocks.size() != static_cast<std::size_t>(chunks) * (kNumLayers / 2) ||
      out.size() != kNumLayers) {
    throw Error(Errc::dimension_mismatch, "RX multiply with " + std::to_string(blocks.size()) +
                                              " blocks and " + std::to_string(x.size()) + " antennas");
  }
  std::size_t saturated = 0;
  for (int pair = 0; pair < kNumLayers / 2; ++pair) {
    Partial2 acc{};
    for (int chunk = 0; chunk < chunks; ++chunk) {
      const auto part = dot_product_2x8(blocks[static_cast<std::size_t>(pair * chunks + chunk)],
                                        x.subspan(static_cast<std::size_t>(chunk) * kNumLayers).first<kNumLayers>());
      acc[0] = wide_add(acc[0], part[0]);
      acc[1] = wide_add(acc[1], part[1]);
    }
    out[static_cast<std::size_t>(2 * pair)] = quantize(acc[0], saturated);
    out[static_cast<std::size_t>(2 * pair + 1)] = quantize(acc[1], saturated);
  }
  return saturated;
}

inline OutputVector rx_precode(std::span<const Block2x8> blocks, std::span<const FixedComplex> x) {
  OutputVector out;
  out.y.resize(kNumLayers);
  out.saturation_count = rx_precode_into(blocks, x, out.y);
  return out;
}

// The order a matrix arrives at the converter: PCM port streams back to back.
inline std::vector<FixedComplex> tx_sequence(const PcmReadout& readout) {
  std::vector<FixedComplex> seq;
  for (const auto& port : readout.ports) seq.insert(seq.end(), port.begin(), port.end());
  return seq;
}

// ---------------------------------------------------------------------------
// Handoff FSMs

enum class WriteFsm { ReadInput, HoldOutput };
enum class ReadFsm { WaitForInReadComplete, WriteOutput };

struct TxElementIn {
  FixedComplex value;
};
struct InputDone {};
struct CopyTaken {};
struct OutputDrained {};

using ConverterEvent = std::variant<TxElementIn, InputDone, CopyTaken, OutputDrained>;

struct StepResult {
  bool stalled = false;
  std::vector<FixedComplex> output;  // RX-ordered matrix, emitted when the copy is taken
};

// Write side: ReadInput --input_done--> HoldOutput --copy_taken--> ReadInput.
// Read side: WaitForInReadComplete enters WriteOutput as soon as it sees
// HoldOutput, takes the copy, and returns on output_drained. An element
// arriving while a held matrix has not been copied is refused (stall), never
// dropped.
class TxToRxConverter {
 public:
  explicit TxToRxConverter(int n_t) : n_t_(n_t) {
    if (!is_supported_antenna_count(n_t)) {
      throw Error(Errc::dimension_mismatch, "unsupported antenna count " + std::to_string(n_t));
    }
    staging_.reserve(matrix_size());
  }

  StepResult step(const ConverterEvent& event) {
    StepResult result;
    std::visit([&](const auto& e) { handle(e, result); }, event);
    observe();
    return result;
  }

  WriteFsm write_state() const noexcept { return write_; }
  ReadFsm read_state() const noexcept { return read_; }
  bool copy_held() const noexcept { return copy_held_; }
  std::size_t staged() const noexcept { return staging_.size(); }
  std::size_t matrix_size() const noexcept { return static_cast<std::size_t>(n_t_) * kNumLayers; }

 private:
  void handle(const TxElementIn& e, StepResult& result) {
    if (write_ == WriteFsm::HoldOutput) {
      result.stalled = true;
      return;
    }
    if (staging_.size() == matrix_size()) {
      throw Error(Errc::converter_protocol, "matrix overrun: input_done expected");
    }
    staging_.push_back(e.value);
  }

  void handle(const InputDone&, StepResult&) {
    if (write_ != WriteFsm::ReadInput) throw Error(Errc::converter_protocol, "input_done while holding");
    if (staging_.size() != matrix_size()) {
      throw Error(Errc::incomplete_matrix, "input_done after " + std::to_string(staging_.size()) + " of " +
                                               std::to_string(matrix_size()) + " elements");
    }
    write_ = WriteFsm::HoldOutput;
  }

  void handle(const CopyTaken&, StepResult& result) {
    if (write_ != WriteFsm::HoldOutput || read_ != ReadFsm::WriteOutput || copy_held_) {
      throw Error(Errc::converter_protocol, "copy_taken with no matrix on hold for the output side");
    }
    PcmReadout readout;
    readout.ports.resize(static_cast<std::size_t>(n_t_ / 2));
    for (std::size_t p = 0; p < readout.ports.size(); ++p) {
      readout.ports[p].assign(staging_.begin() + static_cast<std::ptrdiff_t>(p * 2 * kNumLayers),
                              staging_.begin() + static_cast<std::ptrdiff_t>((p + 1) * 2 * kNumLayers));
    }
    output_copy_ = reassemble_ports(readout);
    staging_.clear();
    copy_held_ = true;
    write_ = WriteFsm::ReadInput;
    result.output = tx_to_rx_reorder(output_copy_);
  }

  void handle(const OutputDrained&, StepResult&) {
    if (read_ != ReadFsm::WriteOutput || !copy_held_) {
      throw Error(Errc::converter_protocol, "output_drained with nothing being written");
    }
    copy_held_ = false;
    read_ = ReadFsm::WaitForInReadComplete;
  }

  void observe() {
    if (read_ == ReadFsm::WaitForInReadComplete && write_ == WriteFsm::HoldOutput) read_ = ReadFsm::WriteOutput;
  }

  int n_t_;
  WriteFsm write_ = WriteFsm::ReadInput;
  ReadFsm read_ = ReadFsm::WaitForInReadComplete;
  bool copy_held_ = false;
  std::vector<FixedComplex> staging_;
  PrecodingMatrix output_copy_;
};

// Pushes one TX-sequence matrix through an idle converter and returns its RX
// stream.
inline std::vector<FixedComplex> convert_matrix(TxToRxConverter& conv, std::span<const FixedComplex> tx) {
  for (const auto v : tx) {
    if (conv.step(TxElementIn{v}).stalled) throw Error(Errc::converter_protocol, "converter not idle");
  }
  conv.step(InputDone{});
  auto out = conv.step(CopyTaken{}).output;
  conv.step(OutputDrained{});
  return out;
}

}  // namespace precoder
