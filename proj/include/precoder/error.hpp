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
#include <stdexcept>
#include <string>
#include <string_view>

namespace precoder {

// Every failure the datapath model can report. Each code names one distinct
// condition so callers and tests can match on it without parsing messages.
enum class Errc {
  // arithmetic
  accumulator_overflow,
  // fronthaul framing
  truncated_frame,
  bad_magic,
  bad_version,
  unknown_kind,
  invalid_packet,
  orphan_coefficient,
  non_monotone_sequence,
  // memory subsystem
  capacity_exceeded,
  overlap,
  incomplete_matrix,
  not_found,
  bank_state,
  // multiplier / converter
  dimension_mismatch,
  unsupported_fanout,
  partial_order,
  converter_protocol,
  // timing
  allocation_exceeds_grid,
  out_of_range,
  // scenario plumbing
  bad_manifest,
  io,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::accumulator_overflow: return "accumulator-overflow";
    case Errc::truncated_frame: return "truncated-frame";
    case Errc::bad_magic: return "bad-magic";
    case Errc::bad_version: return "bad-version";
    case Errc::unknown_kind: return "unknown-kind";
    case Errc::invalid_packet: return "invalid-packet";
    case Errc::orphan_coefficient: return "orphan-coefficient";
    case Errc::non_monotone_sequence: return "non-monotone-sequence";
    case Errc::capacity_exceeded: return "capacity-exceeded";
    case Errc::overlap: return "overlap";
    case Errc::incomplete_matrix: return "incomplete-matrix";
    case Errc::not_found: return "not-found";
    case Errc::bank_state: return "bank-state";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::unsupported_fanout: return "unsupported-fanout";
    case Errc::partial_order: return "partial-order";
    case Errc::converter_protocol: return "converter-protocol";
    case Errc::allocation_exceeds_grid: return "allocation-exceeds-grid";
    case Errc::out_of_range: return "out-of-range";
    case Errc::bad_manifest: return "bad-manifest";
    case Errc::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Frame decoding failure; offset is the byte position of the offending frame
// within the buffer being decoded.
class ParseError : public Error {
 public:
  ParseError(Errc code, std::size_t offset, const std::string& what)
      : Error(code, what + " (offset " + std::to_string(offset) + ")"), offset_(offset), detail_(what) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t offset_;
  std::string detail_;
};

}  // namespace precoder
