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

// Deterministic packet generator for whole slots: C-plane allocations in one
// of three patterns, the eight coefficient columns of every beam right after
// its first C-plane reference, then one full-width U-plane packet per symbol.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "precoder/config.hpp"
#include "precoder/error.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/precoder_memory.hpp"

namespace precoder {

enum class AllocationPattern { Contiguous, Alternating, Random };

constexpr std::string_view to_string(AllocationPattern p) noexcept {
  switch (p) {
    case AllocationPattern::Contiguous: return "contiguous";
    case AllocationPattern::Alternating: return "alternating";
    case AllocationPattern::Random: return "random";
  }
  return "?";
}

inline AllocationPattern parse_pattern(std::string_view s) {
  if (s == "contiguous") return AllocationPattern::Contiguous;
  if (s == "alternating") return AllocationPattern::Alternating;
  if (s == "random") return AllocationPattern::Random;
  throw Error(Errc::bad_manifest, "unknown allocation pattern '" + std::string(s) + "'");
}

namespace detail {

// Modulo mapping rather than std::uniform_int_distribution so the stream is
// identical across standard libraries.
class SlotRng {
 public:
  SlotRng(std::uint64_t seed, std::uint16_t slot_id)
      : engine_(seed * 0x9E3779B97F4A7C15ull + (std::uint64_t{slot_id} + 1) * 0xBF58476D1CE4E5B9ull) {}

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

  FixedComplex sample(int amplitude) {
    return {static_cast<std::int16_t>(between(-amplitude, amplitude - 1)),
            static_cast<std::int16_t>(between(-amplitude, amplitude - 1))};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace detail

// Packets for one slot in arrival order.
inline std::vector<Packet> generate_slot(std::uint64_t seed, int num_users, AllocationPattern pattern,
                                         std::uint16_t slot_id, const SystemConfig& config) {
  if (num_users < 1 || num_users > kMaxBeamsPerSlot) {
    throw Error(Errc::capacity_exceeded, std::to_string(num_users) + " users requested, limit is " +
                                             std::to_string(kMaxBeamsPerSlot));
  }
  config.validate_datapath();
  detail::SlotRng rng(seed, slot_id);

  std::vector<std::uint16_t> beams;
  std::set<std::uint16_t> used;
  while (static_cast<int>(beams.size()) < num_users) {
    const auto b = static_cast<std::uint16_t>(rng.between(0, 0xFFFF));
    if (used.insert(b).second) beams.push_back(b);
  }

  // Coefficient amplitude keeps the N-term dot products mostly inside Q1.15.
  const int inner = config.input_width();
  const int coef_amp = std::max(1, 32768 / inner);
  std::vector<std::vector<BeamCoefficientPacket>> columns(static_cast<std::size_t>(num_users));
  for (int u = 0; u < num_users; ++u) {
    for (int layer = 0; layer < kNumLayers; ++layer) {
      BeamCoefficientPacket k;
      k.slot_id = slot_id;
      k.beam_id = beams[static_cast<std::size_t>(u)];
      k.layer_index = static_cast<std::uint8_t>(layer);
      k.coefficients.resize(static_cast<std::size_t>(config.n_t));
      for (auto& v : k.coefficients) v = rng.sample(coef_amp);
      columns[static_cast<std::size_t>(u)].push_back(std::move(k));
    }
  }

  struct Grant {
    int user;
    CPlanePacket c;
  };
  std::vector<Grant> grants;
  auto grant = [&](int user, int start_prb, int num_prb, int start_sym, int num_sym, std::uint16_t mask) {
    CPlanePacket c;
    c.slot_id = slot_id;
    c.start_symbol = static_cast<std::uint8_t>(start_sym);
    c.num_symbol = static_cast<std::uint8_t>(num_sym);
    c.start_prb = static_cast<std::uint16_t>(start_prb);
    c.num_prb = static_cast<std::uint16_t>(num_prb);
    c.beam_id = beams[static_cast<std::size_t>(user)];
    c.bundle_prb = 0;
    c.re_mask = mask;
    grants.push_back({user, c});
  };

  switch (pattern) {
    case AllocationPattern::Contiguous: {
      const int base = kTotalPrb / num_users;
      const int extra = kTotalPrb % num_users;
      int start = 0;
      for (int u = 0; u < num_users; ++u) {
        const int n = base + (u < extra ? 1 : 0);
        grant(u, start, n, 0, kSymbolsPerSlot, 0x0FFF);
        start += n;
      }
      break;
    }
    case AllocationPattern::Alternating:
      for (int prb = 0; prb < kTotalPrb; ++prb) grant(prb % num_users, prb, 1, 0, kSymbolsPerSlot, 0x0FFF);
      break;
    case AllocationPattern::Random: {
      // Disjoint PRB segments, one per user, each partly used over a random
      // symbol range with a random RE mask.
      std::set<int> cuts;
      while (static_cast<int>(cuts.size()) < num_users - 1) cuts.insert(static_cast<int>(rng.between(1, kTotalPrb - 1)));
      std::vector<int> bounds{0};
      bounds.insert(bounds.end(), cuts.begin(), cuts.end());
      bounds.push_back(kTotalPrb);
      for (int u = 0; u < num_users; ++u) {
        const int seg_lo = bounds[static_cast<std::size_t>(u)];
        const int seg_hi = bounds[static_cast<std::size_t>(u) + 1];
        const int start = static_cast<int>(rng.between(seg_lo, seg_hi - 1));
        const int n = static_cast<int>(rng.between(1, seg_hi - start));
        const int s0 = static_cast<int>(rng.between(0, kSymbolsPerSlot - 1));
        const int ns = static_cast<int>(rng.between(1, kSymbolsPerSlot - s0));
        const auto mask = static_cast<std::uint16_t>(rng.between(1, 0x0FFF));
        grant(u, start, n, s0, ns, mask);
      }
      break;
    }
  }

  std::vector<Packet> packets;
  std::vector<bool> announced(static_cast<std::size_t>(num_users), false);
  for (auto& g : grants) {
    packets.emplace_back(g.c);
    if (!announced[static_cast<std::size_t>(g.user)]) {
      announced[static_cast<std::size_t>(g.user)] = true;
      for (auto& k : columns[static_cast<std::size_t>(g.user)]) packets.emplace_back(std::move(k));
    }
  }

  const int width = config.input_width();
  for (int sym = 0; sym < kSymbolsPerSlot; ++sym) {
    UPlanePacket u;
    u.slot_id = slot_id;
    u.symbol = static_cast<std::uint8_t>(sym);
    u.start_prb = 0;
    u.num_prb = kTotalPrb;
    u.width = static_cast<std::uint16_t>(width);
    u.samples.resize(u.num_re() * static_cast<std::size_t>(width));
    for (auto& v : u.samples) v = rng.sample(32768);
    packets.emplace_back(std::move(u));
  }
  return packets;
}

// Consecutive slots with ids 0, 1, ..., slots - 1.
inline std::vector<std::vector<Packet>> generate_slots(std::uint64_t seed, int num_users, AllocationPattern pattern,
                                                       int slots, const SystemConfig& config) {
  if (slots < 1 || slots > 0xFFFF) throw Error(Errc::out_of_range, "slot count " + std::to_string(slots));
  std::vector<std::vector<Packet>> out;
  for (int s = 0; s < slots; ++s) {
    out.push_back(generate_slot(seed, num_users, pattern, static_cast<std::uint16_t>(s), config));
  }
  return out;
}

}  // namespace precoder
