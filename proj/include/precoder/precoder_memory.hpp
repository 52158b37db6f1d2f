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

// Memory side of the precoder: beam-ID roster, resource-grid mapping (RGM)
// banks with their wipe/read/write rotation, the precoder coefficient memory
// (PCM) and the per-symbol sequence lookup that feeds mult_cfg.

#include <algorithm>
#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "precoder/error.hpp"
#include "precoder/fixed_complex.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/precoding_matrix.hpp"

namespace precoder {

inline constexpr int kIanBits = 7;
inline constexpr int kIanLimit = 1 << kIanBits;
inline constexpr int kMaxBeamsPerSlot = 64;

// ---------------------------------------------------------------------------
// Beam roster

// Ledger of beam IDs seen in the current slot, each mapped to a slot-local
// internal address number (IAN). IANs are handed out 0, 1, 2, ... in order of
// first appearance; a new slot_id starts a fresh ledger.
class BeamRoster {
 public:
  struct Lookup {
    std::uint8_t ian = 0;
    bool is_new = false;

    friend bool operator==(Lookup, Lookup) = default;
  };

  Lookup lookup_or_allocate(std::uint16_t beam_id, std::uint16_t slot_id) {
    if (slot_ != slot_id) {
      ians_.clear();
      slot_ = slot_id;
    }
    if (const auto it = ians_.find(beam_id); it != ians_.end()) return {it->second, false};
    if (ians_.size() >= kMaxBeamsPerSlot) {
      throw Error(Errc::capacity_exceeded, "slot " + std::to_string(slot_id) + " already holds " +
                                               std::to_string(kMaxBeamsPerSlot) + " beams; beam " +
                                               std::to_string(beam_id) + " rejected");
    }
    const auto ian = static_cast<std::uint8_t>(ians_.size());
    ians_.emplace(beam_id, ian);
    return {ian, true};
  }

  std::optional<std::uint8_t> find(std::uint16_t beam_id) const {
    const auto it = ians_.find(beam_id);
    if (it == ians_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::uint16_t> slot_id() const noexcept { return slot_; }
  std::size_t size() const noexcept { return ians_.size(); }

 private:
  std::optional<std::uint16_t> slot_;
  std::map<std::uint16_t, std::uint8_t> ians_;
};

// ---------------------------------------------------------------------------
// Resource grid

struct GridCell {
  std::uint8_t ian = 0;
  bool valid = false;

  friend bool operator==(GridCell, GridCell) = default;
};

// 273 PRBs x 14 symbols of {ian:7, valid:1}, one byte per entry.
class ResourceGrid {
 public:
  static constexpr int kEntryBits = kIanBits + 1;
  static constexpr std::size_t kEntries = std::size_t{kTotalPrb} * kSymbolsPerSlot;
  static constexpr std::size_t kBitSize = kEntries * kEntryBits;

  GridCell at(int prb, int symbol) const {
    const std::uint8_t raw = entries_[index(prb, symbol)];
    return {static_cast<std::uint8_t>(raw & 0x7F), (raw & 0x80) != 0};
  }

  void set(int prb, int symbol, GridCell cell) {
    entries_[index(prb, symbol)] = static_cast<std::uint8_t>((cell.valid ? 0x80 : 0) | (cell.ian & 0x7F));
  }

  void wipe() noexcept { entries_.fill(0); }

  std::size_t valid_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](auto e) { return e & 0x80; }));
  }

  friend bool operator==(const ResourceGrid&, const ResourceGrid&) = default;

 private:
  static std::size_t index(int prb, int symbol) {
    if (prb < 0 || prb >= kTotalPrb || symbol < 0 || symbol >= kSymbolsPerSlot) {
      throw Error(Errc::out_of_range, "grid cell (" + std::to_string(prb) + "," + std::to_string(symbol) + ")");
    }
    return static_cast<std::size_t>(symbol) * kTotalPrb + prb;
  }

  std::array<std::uint8_t, kEntries> entries_{};
};

static_assert(ResourceGrid::kBitSize == 30576);

inline constexpr std::uint64_t kRgmWipeCycles = 1024;
inline constexpr std::uint64_t kRgmIansPerCycle = 4;

// Marks the packet's PRB x symbol rectangle with {ian, valid}. Returns the
// memory-clock cycles spent, four entries per cycle. A cell already owned by a
// different IAN is a double allocation; the grid is left untouched in that
// case.
inline std::uint64_t rgm_write(ResourceGrid& grid, const CPlanePacket& c, std::uint8_t ian) {
  validate(c);
  if (ian >= kIanLimit) throw Error(Errc::out_of_range, "IAN exceeds 7 bits");
  const int prb_end = c.start_prb + c.num_prb;
  const int sym_end = c.start_symbol + c.num_symbol;
  for (int s = c.start_symbol; s < sym_end; ++s) {
    for (int p = c.start_prb; p < prb_end; ++p) {
      const GridCell cell = grid.at(p, s);
      if (cell.valid && cell.ian != ian) {
        throw Error(Errc::overlap, "PRB " + std::to_string(p) + " symbol " + std::to_string(s) +
                                       " already holds IAN " + std::to_string(cell.ian) +
                                       ", cannot assign IAN " + std::to_string(ian));
      }
    }
  }
  for (int s = c.start_symbol; s < sym_end; ++s)
    for (int p = c.start_prb; p < prb_end; ++p) grid.set(p, s, {ian, true});
  const std::uint64_t cells = std::uint64_t{c.num_prb} * c.num_symbol;
  return (cells + kRgmIansPerCycle - 1) / kRgmIansPerCycle;
}

// ---------------------------------------------------------------------------
// Bank rotation

inline constexpr int kRgmBanks = 4;

struct BankSchedule {
  std::optional<int> write;
  std::optional<int> read;
  std::optional<int> wipe;

  friend bool operator==(const BankSchedule&, const BankSchedule&) = default;
};

// Banks wiped once at reset, before slot 0.
inline constexpr std::array<int, 3> kResetWipeBanks{0, 1, 2};

// write = s mod 4, read = (s - 1) mod 4, wipe = (s + 2) mod 4; slot 0 only
// writes.
constexpr BankSchedule rgm_bank_schedule(std::uint64_t slot_index) noexcept {
  BankSchedule s;
  s.write = static_cast<int>(slot_index % kRgmBanks);
  if (slot_index > 0) {
    s.read = static_cast<int>((slot_index - 1) % kRgmBanks);
    s.wipe = static_cast<int>((slot_index + 2) % kRgmBanks);
  }
  return s;
}

enum class BankState { Wiped, Writing, ReadyToRead, Reading, Dirty };

constexpr std::string_view to_string(BankState s) noexcept {
  switch (s) {
    case BankState::Wiped: return "Wiped";
    case BankState::Writing: return "Writing";
    case BankState::ReadyToRead: return "ReadyToRead";
    case BankState::Reading: return "Reading";
    case BankState::Dirty: return "Dirty";
  }
  return "?";
}

// Four RGM banks driven by the rotation above. Each slot a bank is written,
// the previous slot's bank is read and the bank read two slots back is wiped,
// giving a two-slot look-ahead.
class RgmBankSet {
 public:
  RgmBankSet() { reset(); }

  // Returns the wipe cost in memory cycles.
  std::uint64_t reset() {
    states_.fill(BankState::Dirty);
    for (int b : kResetWipeBanks) {
      banks_[static_cast<std::size_t>(b)].wipe();
      states_[static_cast<std::size_t>(b)] = BankState::Wiped;
    }
    next_slot_ = 0;
    active_ = {};
    return kRgmWipeCycles * kResetWipeBanks.size();
  }

  // Advances to `slot_index`, which must be the next slot in sequence. Returns
  // the wipe cost in memory cycles for this slot.
  std::uint64_t begin_slot(std::uint64_t slot_index) {
    if (slot_index != next_slot_) {
      throw Error(Errc::bank_state, "slot " + std::to_string(slot_index) + " out of sequence, expected " +
                                        std::to_string(next_slot_));
    }
    for (auto& st : states_) {
      if (st == BankState::Writing) st = BankState::ReadyToRead;
      else if (st == BankState::Reading) st = BankState::Dirty;
    }
    const BankSchedule sched = rgm_bank_schedule(slot_index);
    std::uint64_t cycles = 0;
    if (sched.wipe) {
      auto& st = state_ref(*sched.wipe);
      if (st == BankState::Writing || st == BankState::Reading || st == BankState::ReadyToRead) {
        throw Error(Errc::bank_state, "bank " + std::to_string(*sched.wipe) + " cannot be wiped while " +
                                          std::string(to_string(st)));
      }
      banks_[static_cast<std::size_t>(*sched.wipe)].wipe();
      st = BankState::Wiped;
      cycles += kRgmWipeCycles;
    }
    if (sched.read) {
      auto& st = state_ref(*sched.read);
      if (st != BankState::ReadyToRead) {
        throw Error(Errc::bank_state, "bank " + std::to_string(*sched.read) + " not ready to read");
      }
      st = BankState::Reading;
    }
    auto& wst = state_ref(*sched.write);
    if (wst != BankState::Wiped) {
      throw Error(Errc::bank_state, "bank " + std::to_string(*sched.write) + " written without a wipe");
    }
    wst = BankState::Writing;
    active_ = sched;
    ++next_slot_;
    return cycles;
  }

  std::uint64_t write(const CPlanePacket& c, std::uint8_t ian) { return rgm_write(writing_bank(), c, ian); }

  ResourceGrid& writing_bank() {
    if (!active_.write) throw Error(Errc::bank_state, "no slot has begun");
    return banks_[static_cast<std::size_t>(*active_.write)];
  }

  const ResourceGrid& reading_bank() const {
    if (!active_.read) throw Error(Errc::bank_state, "no bank is being read in this slot");
    return banks_[static_cast<std::size_t>(*active_.read)];
  }

  const BankSchedule& active() const noexcept { return active_; }
  BankState state(int bank) const { return states_.at(static_cast<std::size_t>(bank)); }
  const ResourceGrid& bank(int b) const { return banks_.at(static_cast<std::size_t>(b)); }

 private:
  BankState& state_ref(int bank) { return states_.at(static_cast<std::size_t>(bank)); }

  std::array<ResourceGrid, kRgmBanks> banks_{};
  std::array<BankState, kRgmBanks> states_{};
  BankSchedule active_;
  std::uint64_t next_slot_ = 0;
};

// ---------------------------------------------------------------------------
// Sequence lookup

struct MultConfig {
  std::uint8_t ian = 0;
  std::uint16_t reuse_count = 1;
  bool load_new = true;
  std::uint16_t start_prb = 0;

  friend bool operator==(MultConfig, MultConfig) = default;
};

struct ZeroFill {
  std::uint16_t start_prb = 0;
  std::uint16_t length = 0;

  friend bool operator==(ZeroFill, ZeroFill) = default;
};

struct SymbolSequence {
  std::vector<MultConfig> configs;
  std::vector<ZeroFill> zero_fills;
};

// Run-length encodes one symbol of the grid in PRB order. Each maximal run of
// a valid IAN becomes a MultConfig; runs of invalid cells become zero-fill
// ranges. load_new is false only when a run reuses the IAN of the previous
// MultConfig (which can happen across a zero-fill gap).
inline SymbolSequence rgm_sequence_lookup(const ResourceGrid& grid, int symbol) {
  SymbolSequence seq;
  int prb = 0;
  while (prb < kTotalPrb) {
    const GridCell head = grid.at(prb, symbol);
    int end = prb + 1;
    while (end < kTotalPrb) {
      const GridCell next = grid.at(end, symbol);
      if (next.valid != head.valid || (head.valid && next.ian != head.ian)) break;
      ++end;
    }
    const auto start = static_cast<std::uint16_t>(prb);
    const auto len = static_cast<std::uint16_t>(end - prb);
    if (head.valid) {
      const bool load_new = seq.configs.empty() || seq.configs.back().ian != head.ian;
      seq.configs.push_back({head.ian, len, load_new, start});
    } else {
      seq.zero_fills.push_back({start, len});
    }
    prb = end;
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Precoder coefficient memory

inline constexpr int kPcmReadCycles = 16;

// Storage order of one column: even rows first, then odd rows.
inline std::vector<FixedComplex> pcm_arrange_column(std::span<const FixedComplex> column) {
  std::vector<FixedComplex> stored;
  stored.reserve(column.size());
  for (std::size_t r = 0; r < column.size(); r += 2) stored.push_back(column[r]);
  for (std::size_t r = 1; r < column.size(); r += 2) stored.push_back(column[r]);
  return stored;
}

inline std::vector<FixedComplex> pcm_restore_column(std::span<const FixedComplex> stored) {
  std::vector<FixedComplex> column(stored.size());
  const std::size_t half = (stored.size() + 1) / 2;
  for (std::size_t i = 0; i < stored.size(); ++i) {
    column[i < half ? 2 * i : 2 * (i - half) + 1] = stored[i];
  }
  return column;
}

// Port streams from one matrix read. Port p serves rows 2p and 2p+1 and emits
// r(2p)c0, r(2p+1)c0, r(2p)c1, r(2p+1)c1, ... so every port finishes the
// matrix in 16 cycles regardless of antenna count.
struct PcmReadout {
  std::vector<std::vector<FixedComplex>> ports;
  int cycles = kPcmReadCycles;
};

inline PrecodingMatrix reassemble_ports(const PcmReadout& readout, int n_layers = kNumLayers) {
  const int n_t = static_cast<int>(readout.ports.size()) * 2;
  PrecodingMatrix m(n_t, n_layers);
  for (int p = 0; p < static_cast<int>(readout.ports.size()); ++p) {
    const auto& stream = readout.ports[static_cast<std::size_t>(p)];
    if (stream.size() != static_cast<std::size_t>(2 * n_layers)) {
      throw Error(Errc::dimension_mismatch, "port stream length " + std::to_string(stream.size()));
    }
    for (int c = 0; c < n_layers; ++c) {
      m.at(2 * p, c) = stream[static_cast<std::size_t>(2 * c)];
      m.at(2 * p + 1, c) = stream[static_cast<std::size_t>(2 * c + 1)];
    }
  }
  return m;
}

class PrecoderCoefficientMemory {
 public:
  explicit PrecoderCoefficientMemory(int n_t) : n_t_(n_t) {
    if (!is_supported_antenna_count(n_t)) {
      throw Error(Errc::dimension_mismatch, "unsupported antenna count " + std::to_string(n_t));
    }
  }

  int n_t() const noexcept { return n_t_; }

  void write_column(std::uint8_t ian, int layer, std::span<const FixedComplex> column) {
    if (ian >= kIanLimit) throw Error(Errc::out_of_range, "IAN exceeds 7 bits");
    if (layer < 0 || layer >= kNumLayers) throw Error(Errc::out_of_range, "layer " + std::to_string(layer));
    if (column.size() != static_cast<std::size_t>(n_t_)) {
      throw Error(Errc::dimension_mismatch, "column of " + std::to_string(column.size()) + " for N_T=" +
                                                std::to_string(n_t_));
    }
    auto& e = entries_[ian];
    if (e.storage.empty()) e.storage.resize(static_cast<std::size_t>(n_t_) * kNumLayers);
    const auto stored = pcm_arrange_column(column);
    std::copy(stored.begin(), stored.end(), e.storage.begin() + static_cast<std::ptrdiff_t>(layer) * n_t_);
    e.layers.set(static_cast<std::size_t>(layer));
  }

  void write(const BeamCoefficientPacket& p, std::uint8_t ian) {
    write_column(ian, p.layer_index, p.coefficients);
  }

  std::span<const FixedComplex> stored_column(std::uint8_t ian, int layer) const {
    const auto& e = entry(ian);
    if (layer < 0 || layer >= kNumLayers || !e.layers.test(static_cast<std::size_t>(layer))) {
      throw Error(Errc::incomplete_matrix, "IAN " + std::to_string(ian) + " has no layer " + std::to_string(layer));
    }
    return std::span<const FixedComplex>(e.storage).subspan(static_cast<std::size_t>(layer) * n_t_,
                                                            static_cast<std::size_t>(n_t_));
  }

  bool contains(std::uint8_t ian) const { return entries_.contains(ian); }
  bool complete(std::uint8_t ian) const {
    const auto it = entries_.find(ian);
    return it != entries_.end() && it->second.layers.all();
  }

  // Inverse of the write-side arrangement.
  PrecodingMatrix reconstruct(std::uint8_t ian) const {
    const auto& e = complete_entry(ian);
    PrecodingMatrix m(n_t_, kNumLayers, ian);
    for (int c = 0; c < kNumLayers; ++c) {
      const auto column = pcm_restore_column(
          std::span<const FixedComplex>(e.storage).subspan(static_cast<std::size_t>(c) * n_t_,
                                                           static_cast<std::size_t>(n_t_)));
      for (int r = 0; r < n_t_; ++r) m.at(r, c) = column[static_cast<std::size_t>(r)];
    }
    return m;
  }

  // Port p reads address p (even block) and n_t/2 + p (odd block) of each
  // column, i.e. rows 2p and 2p+1.
  PcmReadout read(std::uint8_t ian) const {
    const auto& e = complete_entry(ian);
    const int ports = n_t_ / 2;
    PcmReadout out;
    out.ports.assign(static_cast<std::size_t>(ports), {});
    for (int p = 0; p < ports; ++p) {
      auto& stream = out.ports[static_cast<std::size_t>(p)];
      stream.reserve(2 * kNumLayers);
      for (int c = 0; c < kNumLayers; ++c) {
        const std::size_t base = static_cast<std::size_t>(c) * n_t_;
        stream.push_back(e.storage[base + static_cast<std::size_t>(p)]);
        stream.push_back(e.storage[base + static_cast<std::size_t>(ports + p)]);
      }
    }
    out.cycles = kPcmReadCycles;
    return out;
  }

  void clear() { entries_.clear(); }

  // One line per stored column in storage order: "ian 3 col 0: re,im re,im ..."
  std::string dump() const {
    std::ostringstream os;
    for (const auto& [ian, e] : entries_) {
      for (int c = 0; c < kNumLayers; ++c) {
        os << "ian " << int{ian} << " col " << c << ':';
        if (!e.layers.test(static_cast<std::size_t>(c))) {
          os << " missing\n";
          continue;
        }
        for (int i = 0; i < n_t_; ++i) {
          const auto v = e.storage[static_cast<std::size_t>(c) * n_t_ + i];
          os << ' ' << v.re << ',' << v.im;
        }
        os << '\n';
      }
    }
    return os.str();
  }

 private:
  struct Entry {
    std::vector<FixedComplex> storage;  // column-major, each column even/odd arranged
    std::bitset<kNumLayers> layers;
  };

  const Entry& entry(std::uint8_t ian) const {
    const auto it = entries_.find(ian);
    if (it == entries_.end()) throw Error(Errc::not_found, "IAN " + std::to_string(ian) + " not in PCM");
    return it->second;
  }

  const Entry& complete_entry(std::uint8_t ian) const {
    const auto& e = entry(ian);
    if (!e.layers.all()) {
      throw Error(Errc::incomplete_matrix, "IAN " + std::to_string(ian) + " has " +
                                               std::to_string(e.layers.count()) + " of " +
                                               std::to_string(kNumLayers) + " layers");
    }
    return e;
  }

  int n_t_;
  std::map<std::uint8_t, Entry> entries_;
};

// ---------------------------------------------------------------------------
// Debug dump

// One line per symbol listing IAN runs as "<ian>x<count>", with "." for
// unallocated runs: "sym 0: 3x10 5x263".
inline std::string dump_grid(const ResourceGrid& grid) {
  std::ostringstream os;
  for (int s = 0; s < kSymbolsPerSlot; ++s) {
    os << "sym " << s << ':';
    int prb = 0;
    while (prb < kTotalPrb) {
      const GridCell head = grid.at(prb, s);
      int end = prb + 1;
      while (end < kTotalPrb) {
        const GridCell next = grid.at(end, s);
        if (next.valid != head.valid || (head.valid && next.ian != head.ian)) break;
        ++end;
      }
      os << ' ';
      if (head.valid) os << int{head.ian};
      else os << '.';
      os << 'x' << (end - prb);
      prb = end;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace precoder
