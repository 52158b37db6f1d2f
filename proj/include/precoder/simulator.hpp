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

// End-to-end slot simulator. Each slot, in order:
//   1. control packets go through the beam roster, new beams get an IAN
//   2. the IAN and PRB/symbol rectangle are written into the RGM write bank
//   3. coefficient columns are stored in the PCM bank of this slot
//   4. the previous slot's RGM bank is read symbol by symbol into mult_cfg
//      runs, matrices are read from its PCM bank and every allocated RE is
//      multiplied; unallocated and masked REs produce zeros
// Every RE is compared against the wide-integer golden model.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "precoder/config.hpp"
#include "precoder/error.hpp"
#include "precoder/fixed_complex.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/golden.hpp"
#include "precoder/matrix_multiplier.hpp"
#include "precoder/precoder_memory.hpp"
#include "precoder/precoding_matrix.hpp"
#include "precoder/rx_converter.hpp"
#include "precoder/timing_model.hpp"

namespace precoder {

// Allowed deviation from the double-precision model, in Q1.15 value units.
inline constexpr double kRealCrossCheckTolerance = 1.0 / 16384.0;

struct SimulatorOptions {
  bool capture_outputs = false;
  bool real_cross_check = false;
};

struct SlotReport {
  std::uint16_t slot_id = 0;
  std::uint64_t slot_index = 0;
  LatencyReport latency;
  std::uint64_t checksum = 0;
  std::int64_t max_error = 0;
  double max_real_error = 0.0;
  std::size_t saturation_count = 0;
  std::uint64_t matrix_loads = 0;
  std::uint64_t rgm_write_cycles = 0;
  std::uint64_t rgm_wipe_cycles = 0;
  // Only with capture_outputs: [symbol][prb][re][output_width].
  std::vector<FixedComplex> outputs;

  bool pass(bool real_checked) const noexcept {
    return max_error == 0 && latency.deadline_met && (!real_checked || max_real_error <= kRealCrossCheckTolerance);
  }
};

inline std::size_t output_index(int symbol, int prb, int re, int width) {
  return ((static_cast<std::size_t>(symbol) * kTotalPrb + static_cast<std::size_t>(prb)) * kRePerPrb +
          static_cast<std::size_t>(re)) *
         static_cast<std::size_t>(width);
}

namespace detail {

// 64-bit FNV-1a over the little-endian sample bytes.
class Fnv1a {
 public:
  void add(FixedComplex v) noexcept {
    byte(static_cast<std::uint8_t>(v.re & 0xFF));
    byte(static_cast<std::uint8_t>((v.re >> 8) & 0xFF));
    byte(static_cast<std::uint8_t>(v.im & 0xFF));
    byte(static_cast<std::uint8_t>((v.im >> 8) & 0xFF));
  }
  std::uint64_t value() const noexcept { return h_; }

 private:
  void byte(std::uint8_t b) noexcept {
    h_ ^= b;
    h_ *= 0x100000001B3ull;
  }
  std::uint64_t h_ = 0xCBF29CE484222325ull;
};

template <class F>
decltype(auto) at_sequence(std::uint64_t seq, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), "packet seq " + std::to_string(seq) + ": " + e.what());
  }
}

}  // namespace detail

class Simulator {
 public:
  explicit Simulator(SystemConfig config, SimulatorOptions options = {})
      : config_(std::move(config)), options_(options), pcm_{PrecoderCoefficientMemory(checked_n_t(config_)),
                                                             PrecoderCoefficientMemory(config_.n_t)},
        converter_(config_.n_t) {}

  const SystemConfig& config() const noexcept { return config_; }

  // Feeds one slot's packets in arrival order. Returns the report for the
  // previous slot, whose bank is read while this one is written.
  std::optional<SlotReport> push_slot(std::span<const Packet> packets) {
    if (packets.empty()) throw Error(Errc::bad_manifest, "empty slot");
    const std::uint16_t slot_id = slot_of(packets.front());
    for (const auto& p : packets) {
      if (slot_of(p) != slot_id) throw Error(Errc::bad_manifest, "packets from several slots pushed together");
    }
    if (pending_ && pending_->slot_id == slot_id) {
      throw Error(Errc::bad_manifest, "slot id " + std::to_string(slot_id) + " repeats back to back");
    }

    const std::uint64_t wipe_cycles = banks_.begin_slot(slot_index_);
    std::optional<SlotReport> report;
    if (pending_) report = read_phase(*pending_);

    PendingSlot cur;
    cur.slot_id = slot_id;
    cur.index = slot_index_;
    cur.pcm_bank = static_cast<int>(slot_index_ % 2);
    cur.rgm_wipe_cycles = wipe_cycles;
    cur.masks.assign(static_cast<std::size_t>(kTotalPrb) * kSymbolsPerSlot, 0);
    cur.inputs.assign(output_index(kSymbolsPerSlot, 0, 0, config_.input_width()), FixedComplex{});
    write_phase(packets, cur);
    pending_ = std::move(cur);
    ++slot_index_;
    return report;
  }

  // Reads out the last pushed slot.
  std::optional<SlotReport> finish() {
    if (!pending_) return std::nullopt;
    banks_.begin_slot(slot_index_);
    ++slot_index_;
    auto report = read_phase(*pending_);
    pending_.reset();
    return report;
  }

 private:
  struct PendingSlot {
    std::uint16_t slot_id = 0;
    std::uint64_t index = 0;
    int pcm_bank = 0;
    std::vector<std::uint16_t> masks;   // [symbol][prb] RE mask of the owning grant
    std::vector<FixedComplex> inputs;   // [symbol][prb][re][input_width]
    std::map<std::uint8_t, PrecodingMatrix> golden;  // built straight from Coef packets
    std::uint64_t rgm_write_cycles = 0;
    std::uint64_t rgm_wipe_cycles = 0;
  };

  static int checked_n_t(const SystemConfig& c) {
    c.validate_datapath();
    return c.n_t;
  }

  void write_phase(std::span<const Packet> packets, PendingSlot& cur) {
    Arbiter arbiter;
    for (const auto& p : packets) {
      const std::uint64_t seq = next_sequence_++;
      detail::at_sequence(seq, [&] { arbiter.push({p, seq}); });
    }
    const ArbitratedStreams streams = arbiter.take();

    auto& pcm = pcm_[static_cast<std::size_t>(cur.pcm_bank)];
    pcm.clear();

    for (const auto& ev : streams.control) {
      detail::at_sequence(ev.sequence_no, [&] {
        const auto& c = std::get<CPlanePacket>(ev.payload);
        const auto lookup = roster_.lookup_or_allocate(c.beam_id, c.slot_id);
        cur.rgm_write_cycles += banks_.write(c, lookup.ian);
        for (int s = c.start_symbol; s < c.start_symbol + c.num_symbol; ++s)
          for (int prb = c.start_prb; prb < c.start_prb + c.num_prb; ++prb)
            cur.masks[static_cast<std::size_t>(s) * kTotalPrb + static_cast<std::size_t>(prb)] = c.re_mask;
      });
    }

    for (const auto& ev : streams.coefficient) {
      detail::at_sequence(ev.sequence_no, [&] {
        const auto& k = std::get<BeamCoefficientPacket>(ev.payload);
        if (k.coefficients.size() != static_cast<std::size_t>(config_.n_t)) {
          throw Error(Errc::dimension_mismatch, "coefficient column length " + std::to_string(k.coefficients.size()));
        }
        const std::uint8_t ian = *roster_.find(k.beam_id);
        pcm.write(k, ian);
        auto [it, fresh] = cur.golden.try_emplace(ian, config_.n_t, kNumLayers, ian);
        for (int r = 0; r < config_.n_t; ++r) it->second.at(r, k.layer_index) = k.coefficients[static_cast<std::size_t>(r)];
      });
    }

    const int width = config_.input_width();
    for (const auto& ev : streams.data) {
      detail::at_sequence(ev.sequence_no, [&] {
        const auto& u = std::get<UPlanePacket>(ev.payload);
        if (u.width != width) {
          throw Error(Errc::dimension_mismatch, "U-plane width " + std::to_string(u.width) + ", expected " +
                                                    std::to_string(width));
        }
        for (std::size_t re = 0; re < u.num_re(); ++re) {
          const int prb = u.start_prb + static_cast<int>(re / kRePerPrb);
          const auto src = u.re_vector(re);
          std::copy(src.begin(), src.end(),
                    cur.inputs.begin() + static_cast<std::ptrdiff_t>(
                                             output_index(u.symbol, prb, static_cast<int>(re % kRePerPrb), width)));
        }
      });
    }
  }

  SlotReport read_phase(const PendingSlot& p) {
    const ResourceGrid& grid = banks_.reading_bank();
    const auto& pcm = pcm_[static_cast<std::size_t>(p.pcm_bank)];
    const int in_w = config_.input_width();
    const int out_w = config_.output_width();
    const bool tx = config_.direction == Direction::TX;

    SlotReport report;
    report.slot_id = p.slot_id;
    report.slot_index = p.index;
    report.rgm_write_cycles = p.rgm_write_cycles;
    report.rgm_wipe_cycles = p.rgm_wipe_cycles;
    if (options_.capture_outputs) report.outputs.reserve(output_index(kSymbolsPerSlot, 0, 0, out_w));

    std::vector<SymbolAllocation> allocs;
    std::vector<FixedComplex> symbol_out(output_index(1, 0, 0, out_w));
    std::vector<Block2x8> blocks;
    std::optional<PrecodingMatrix> reference;  // H on the downlink, H^T on the uplink
    detail::Fnv1a hash;
    UserVector xv{};

    for (int sym = 0; sym < kSymbolsPerSlot; ++sym) {
      std::fill(symbol_out.begin(), symbol_out.end(), FixedComplex{});
      const SymbolSequence seq = rgm_sequence_lookup(grid, sym);
      allocs.push_back(allocation_from_sequence(seq));

      for (const MultConfig& cfg : seq.configs) {
        if (cfg.load_new || blocks.empty()) {
          const PcmReadout readout = pcm.read(cfg.ian);
          ++report.matrix_loads;
          const auto golden_it = p.golden.find(cfg.ian);
          if (golden_it == p.golden.end()) throw Error(Errc::not_found, "no reference matrix for IAN");
          if (tx) {
            blocks = blocks_from_readout(readout);
            reference = golden_it->second;
          } else {
            blocks = rx_blocks(convert_matrix(converter_, tx_sequence(readout)), config_.n_t);
            reference = golden_it->second.transposed();
          }
        }
        for (int prb = cfg.start_prb; prb < cfg.start_prb + cfg.reuse_count; ++prb) {
          const std::uint16_t mask = p.masks[static_cast<std::size_t>(sym) * kTotalPrb + static_cast<std::size_t>(prb)];
          for (int re = 0; re < kRePerPrb; ++re) {
            if (!((mask >> re) & 1u)) continue;  // masked RE: zeros out
            const auto x = std::span<const FixedComplex>(p.inputs).subspan(output_index(sym, prb, re, in_w),
                                                                           static_cast<std::size_t>(in_w));
            const auto y = std::span<FixedComplex>(symbol_out).subspan(output_index(0, prb, re, out_w),
                                                                       static_cast<std::size_t>(out_w));
            if (tx) {
              std::copy(x.begin(), x.end(), xv.begin());
              report.saturation_count += precode_blocks_into(blocks, xv, y);
            } else {
              report.saturation_count += rx_precode_into(blocks, x, y);
            }
            const auto expected = golden::matvec(*reference, x);
            for (std::size_t i = 0; i < expected.size(); ++i) {
              report.max_error = std::max<std::int64_t>(report.max_error, std::abs(int{y[i].re} - expected[i].re));
              report.max_error = std::max<std::int64_t>(report.max_error, std::abs(int{y[i].im} - expected[i].im));
            }
            if (options_.real_cross_check) {
              const auto ref = golden::matvec_real(*reference, x);
              report.max_real_error = std::max(report.max_real_error, golden::max_real_error(y, ref));
            }
          }
        }
      }
      for (const auto v : symbol_out) hash.add(v);
      if (options_.capture_outputs) report.outputs.insert(report.outputs.end(), symbol_out.begin(), symbol_out.end());
    }

    report.checksum = hash.value();
    report.latency = slot_latency(allocs, config_.timing, config_.n_t, config_.n_l);
    return report;
  }

  SystemConfig config_;
  SimulatorOptions options_;
  RgmBankSet banks_;
  BeamRoster roster_;
  std::array<PrecoderCoefficientMemory, 2> pcm_;
  TxToRxConverter converter_;
  std::optional<PendingSlot> pending_;
  std::uint64_t slot_index_ = 0;
  std::uint64_t next_sequence_ = 0;
};

// ---------------------------------------------------------------------------
// Runs

struct RunReport {
  SystemConfig config;
  bool real_checked = false;
  std::vector<SlotReport> slots;
  bool pass = true;
};

// Groups an arrival-ordered packet stream into slots at every slot_id change.
inline std::vector<std::vector<Packet>> split_slots(std::vector<Packet> stream) {
  std::vector<std::vector<Packet>> slots;
  for (auto& p : stream) {
    if (slots.empty() || slot_of(slots.back().front()) != slot_of(p)) slots.emplace_back();
    slots.back().push_back(std::move(p));
  }
  return slots;
}

inline RunReport run_slots(const SystemConfig& config, const std::vector<std::vector<Packet>>& slots,
                           SimulatorOptions options = {}) {
  Simulator sim(config, options);
  RunReport run;
  run.config = config;
  run.real_checked = options.real_cross_check;
  for (const auto& s : slots) {
    if (auto r = sim.push_slot(s)) run.slots.push_back(std::move(*r));
  }
  if (auto r = sim.finish()) run.slots.push_back(std::move(*r));
  std::stable_sort(run.slots.begin(), run.slots.end(),
                   [](const SlotReport& a, const SlotReport& b) { return a.slot_id < b.slot_id; });
  run.pass = !run.slots.empty();
  for (const auto& s : run.slots) run.pass = run.pass && s.pass(run.real_checked);
  return run;
}

}  // namespace precoder
