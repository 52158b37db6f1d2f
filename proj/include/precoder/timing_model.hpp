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

// Analytic latency model for the multiplier read-out. Per symbol, the cost of
// serving the first k users is
//
//   1 / T_clk + RE_per_RB * (n_1 + ... + n_k) + T_load * T_PRB   clock cycles
//
// where n_i is the PRB count of user i and n_1 + ... + n_64 <= T_PRB. The
// per-PRB term counts one RE per cycle (T_mult is pipeline latency, not an
// initiation interval) and the matrix-load term is charged for every PRB
// slot of the symbol. With all 273 PRBs allocated a symbol costs 7644.25
// cycles. Cycle counts are exact rationals.

#include <boost/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <vector>

#include "precoder/error.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/precoder_memory.hpp"

namespace precoder {

using Rational = boost::rational<std::int64_t>;
using Cycles = Rational;

struct TimingParams {
  Rational slot_boundary_us{500};
  int total_prb = kTotalPrb;
  int re_per_rb = kRePerPrb;
  int max_users = kMaxBeamsPerSlot;
  int t_load_cycles = 16;
  int t_mult_cycles = 2;
  Rational t_clk_ns{4};          // multiplier clock, 250 MHz
  Rational mem_clk_ns{16, 5};    // memory clock, 312.5 MHz
  int symbols_per_slot = kSymbolsPerSlot;

  void validate() const {
    const bool ok = slot_boundary_us > 0 && total_prb > 0 && re_per_rb > 0 && max_users > 0 &&
                    t_load_cycles > 0 && t_mult_cycles > 0 && t_clk_ns > 0 && mem_clk_ns > 0 &&
                    symbols_per_slot > 0;
    if (!ok) throw Error(Errc::out_of_range, "timing parameters must be strictly positive");
  }
};

struct PrbRun {
  std::uint8_t ian = 0;
  int n_prb = 0;
};

struct SymbolAllocation {
  std::vector<PrbRun> runs;

  std::int64_t total_prb() const noexcept {
    std::int64_t n = 0;
    for (const auto& r : runs) n += r.n_prb;
    return n;
  }
};

inline SymbolAllocation allocation_from_sequence(const SymbolSequence& seq) {
  SymbolAllocation a;
  for (const auto& c : seq.configs) a.runs.push_back({c.ian, c.reuse_count});
  return a;
}

namespace detail {

inline Cycles completion_cycles(std::int64_t prbs, const TimingParams& p) {
  return Cycles{1} / p.t_clk_ns + Cycles{std::int64_t{p.re_per_rb} * prbs} +
         Cycles{std::int64_t{p.t_load_cycles} * p.total_prb};
}

inline void check_fits(const SymbolAllocation& alloc, const TimingParams& p) {
  for (const auto& r : alloc.runs) {
    if (r.n_prb < 0) throw Error(Errc::out_of_range, "negative PRB count");
  }
  if (alloc.total_prb() > p.total_prb) {
    throw Error(Errc::allocation_exceeds_grid, std::to_string(alloc.total_prb()) + " PRBs allocated, grid has " +
                                                   std::to_string(p.total_prb));
  }
}

}  // namespace detail

inline Cycles symbol_latency(const SymbolAllocation& alloc, const TimingParams& p = {}) {
  detail::check_fits(alloc, p);
  return detail::completion_cycles(alloc.total_prb(), p);
}

// Cycles until the k-th user (1-based) of the symbol is done.
inline Cycles user_completion_latency(const SymbolAllocation& alloc, std::size_t k, const TimingParams& p = {}) {
  detail::check_fits(alloc, p);
  if (k < 1 || k > alloc.runs.size()) {
    throw Error(Errc::out_of_range, "user index " + std::to_string(k) + " of " + std::to_string(alloc.runs.size()));
  }
  std::int64_t prbs = 0;
  for (std::size_t i = 0; i < k; ++i) prbs += alloc.runs[i].n_prb;
  return detail::completion_cycles(prbs, p);
}

// Three real multipliers per complex product, time-shared over the two-cycle
// multiply.
inline int estimate_dsp(int n_t, int n_l) {
  if (n_t <= 0 || n_l <= 0) throw Error(Errc::out_of_range, "antenna and layer counts must be positive");
  const std::int64_t mults = std::int64_t{3} * n_t * n_l;
  if (mults % 2 != 0) throw Error(Errc::out_of_range, "3 * n_t * n_l is odd; DSP count would be fractional");
  return static_cast<int>(mults / 2);
}

struct LatencyReport {
  std::vector<Cycles> per_symbol_cycles;
  Cycles slot_cycles{0};
  Rational slot_us{0};
  bool deadline_met = true;
  std::uint64_t n_mult_total = 0;
  int dsp_estimate = 0;
};

inline LatencyReport slot_latency(std::span<const SymbolAllocation> allocs, const TimingParams& p = {},
                                  int n_t = 16, int n_l = kNumLayers) {
  p.validate();
  if (allocs.size() != static_cast<std::size_t>(p.symbols_per_slot)) {
    throw Error(Errc::dimension_mismatch, std::to_string(allocs.size()) + " symbol allocations for a " +
                                              std::to_string(p.symbols_per_slot) + "-symbol slot");
  }
  LatencyReport r;
  for (const auto& a : allocs) {
    const Cycles c = symbol_latency(a, p);
    r.per_symbol_cycles.push_back(c);
    r.slot_cycles += c;
    r.n_mult_total += static_cast<std::uint64_t>(a.total_prb()) * static_cast<std::uint64_t>(p.re_per_rb);
  }
  r.slot_us = r.slot_cycles * p.t_clk_ns / Rational{1000};
  r.deadline_met = r.slot_us <= p.slot_boundary_us;
  r.dsp_estimate = estimate_dsp(n_t, n_l);
  return r;
}

// Every RE of every symbol carries its own user vector.
inline std::uint64_t worst_case_nmult(const TimingParams& p = {}) {
  return static_cast<std::uint64_t>(p.total_prb) * static_cast<std::uint64_t>(p.symbols_per_slot) *
         static_cast<std::uint64_t>(p.re_per_rb);
}

// Users take PRBs in turn, 0, 1, ..., num_users - 1, 0, 1, ... so every PRB
// needs a fresh matrix.
inline SymbolAllocation alternating_allocation(int num_users, const TimingParams& p = {}) {
  if (num_users < 1) throw Error(Errc::out_of_range, "at least one user required");
  SymbolAllocation a;
  for (int prb = 0; prb < p.total_prb; ++prb) a.runs.push_back({static_cast<std::uint8_t>(prb % num_users), 1});
  return a;
}

// total_prb split as evenly as possible, the first (total_prb mod users) users
// getting one extra PRB.
inline SymbolAllocation equal_split_allocation(int num_users, const TimingParams& p = {}) {
  if (num_users < 1) throw Error(Errc::out_of_range, "at least one user required");
  SymbolAllocation a;
  const int base = p.total_prb / num_users;
  const int extra = p.total_prb % num_users;
  for (int u = 0; u < num_users; ++u) {
    const int n = base + (u < extra ? 1 : 0);
    if (n > 0) a.runs.push_back({static_cast<std::uint8_t>(u), n});
  }
  return a;
}

struct StressResult {
  bool fits = false;
  LatencyReport report;
};

inline StressResult stress_users_fit(int num_users, const TimingParams& p = {}, int n_t = 16) {
  if (num_users < 1 || num_users > p.max_users) {
    throw Error(Errc::capacity_exceeded, std::to_string(num_users) + " users, limit is " +
                                             std::to_string(p.max_users));
  }
  const std::vector<SymbolAllocation> allocs(static_cast<std::size_t>(p.symbols_per_slot),
                                             equal_split_allocation(num_users, p));
  StressResult s;
  s.report = slot_latency(allocs, p, n_t);
  s.fits = s.report.deadline_met;
  return s;
}

// RGM wipe plus write time on the memory clock, in ns.
inline Rational rgm_memory_budget_ns(std::uint64_t write_cycles, const TimingParams& p = {}) {
  return Rational{static_cast<std::int64_t>(kRgmWipeCycles + write_cycles)} * p.mem_clk_ns;
}

// ---------------------------------------------------------------------------
// Formatting

// Exact decimal when the denominator has only 2 and 5 as factors, "p/q"
// otherwise.
inline std::string format_rational(const Rational& r) {
  std::int64_t den = r.denominator();
  int twos = 0;
  int fives = 0;
  while (den % 2 == 0) {
    den /= 2;
    ++twos;
  }
  while (den % 5 == 0) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
  const int digits = std::max(twos, fives);
  std::int64_t scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const Rational scaled = boost::abs(r) * Rational{scale};
  const std::int64_t v = scaled.numerator();  // exact: scaled is an integer
  std::string out = std::to_string(v / scale);
  if (digits > 0) {
    const std::string frac = std::to_string(v % scale);
    out += "." + std::string(static_cast<std::size_t>(digits) - frac.size(), '0') + frac;
  }
  return r < 0 ? "-" + out : out;
}

// Fixed-point rendering rounded half away from zero.
inline std::string format_fixed(const Rational& r, int decimals) {
  std::int64_t scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const Rational scaled = boost::abs(r) * Rational{scale};
  const std::int64_t q = scaled.numerator() / scaled.denominator();
  const std::int64_t rem = scaled.numerator() % scaled.denominator();
  const std::int64_t v = q + (2 * rem >= scaled.denominator() ? 1 : 0);
  std::string out = std::to_string(v / scale);
  if (decimals > 0) {
    const std::string frac = std::to_string(v % scale);
    out += "." + std::string(static_cast<std::size_t>(decimals) - frac.size(), '0') + frac;
  }
  return (r < 0 && v != 0) ? "-" + out : out;
}

// Parses "500", "3.2" or "16/5".
inline Rational parse_rational(const std::string& text) {
  try {
    if (const auto slash = text.find('/'); slash != std::string::npos) {
      return Rational{std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1))};
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational{std::stoll(text)};
    const std::string whole = text.substr(0, dot);
    const std::string frac = text.substr(dot + 1);
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const bool neg = !whole.empty() && whole[0] == '-';
    const std::int64_t w = whole.empty() || whole == "-" ? 0 : std::stoll(whole);
    const std::int64_t f = frac.empty() ? 0 : std::stoll(frac);
    const std::int64_t num = (neg ? -1 : 1) * (std::llabs(w) * scale + f);
    return Rational{num, scale};
  } catch (const std::logic_error&) {
    throw Error(Errc::bad_manifest, "not a number: '" + text + "'");
  }
}

}  // namespace precoder
