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

#include <cstdint>
#include <string>
#include <string_view>

#include "precoder/error.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/timing_model.hpp"

namespace precoder {

enum class Direction { TX, RX };

constexpr std::string_view to_string(Direction d) noexcept { return d == Direction::TX ? "TX" : "RX"; }

inline Direction parse_direction(std::string_view s) {
  if (s == "TX" || s == "tx") return Direction::TX;
  if (s == "RX" || s == "rx") return Direction::RX;
  throw Error(Errc::bad_manifest, "direction must be TX or RX, got '" + std::string(s) + "'");
}

struct SystemConfig {
  int n_t = 16;
  int n_l = kNumLayers;
  Direction direction = Direction::TX;
  TimingParams timing;
  std::uint64_t seed = 1;
  // Lifts the restriction to the 16x8 / 32x8 / 64x8 shapes. Only the
  // analytic timing model accepts other shapes; the datapath does not.
  bool allow_override = false;

  // Elements per U-plane RE vector: layers on the downlink, antennas on the
  // uplink.
  int input_width() const noexcept { return direction == Direction::TX ? n_l : n_t; }
  int output_width() const noexcept { return direction == Direction::TX ? n_t : n_l; }

  FrameContext frame_context() const noexcept { return {n_t, input_width()}; }

  bool is_standard_shape() const noexcept { return is_supported_antenna_count(n_t) && n_l == kNumLayers; }

  void validate() const {
    timing.validate();
    if (n_t <= 0 || n_l <= 0) throw Error(Errc::bad_manifest, "n_t and n_l must be positive");
    if (!is_standard_shape() && !allow_override) {
      throw Error(Errc::bad_manifest, "(n_t, n_l) = (" + std::to_string(n_t) + ", " + std::to_string(n_l) +
                                          ") is not 16x8, 32x8 or 64x8");
    }
  }

  // The datapath is built for the three standard shapes only.
  void validate_datapath() const {
    validate();
    if (!is_standard_shape()) {
      throw Error(Errc::dimension_mismatch, "datapath supports 16x8, 32x8 and 64x8 only");
    }
  }
};

}  // namespace precoder
