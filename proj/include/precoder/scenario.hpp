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

// Scenario files and reports for the command-line front end.
//
// A manifest is JSON whose keys mirror ScenarioManifest:
//   {
//     "config":  {"n_t": 16, "n_l": 8, "direction": "TX", "seed": 1,
//                 "allow_override": false, "timing": {"t_clk_ns": "4", ...}},
//     "packets": {"frames": ["slot_0000.bin", ...]}
//             or {"generator": {"num_users": 48,
//                               "allocation_pattern": "contiguous",
//                               "slots": 2}}
//   }
// Frame paths are relative to the manifest. A frame file is frames back to
// back in arrival order.
//
// Report: a "# key: value" section for people, then one line per slot
//   slot=<id> cycles=<rational> us=<fixed6> deadline=<bool> nmult=<int> err=<int> sat=<int>
// and a final "result=PASS" or "result=FAIL".

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "precoder/config.hpp"
#include "precoder/error.hpp"
#include "precoder/fronthaul.hpp"
#include "precoder/generator.hpp"
#include "precoder/simulator.hpp"
#include "precoder/timing_model.hpp"

namespace precoder {

struct GeneratorSpec {
  int num_users = 1;
  AllocationPattern allocation_pattern = AllocationPattern::Contiguous;
  int slots = 1;
};

struct ScenarioManifest {
  SystemConfig config;
  std::vector<std::filesystem::path> frames;
  std::optional<GeneratorSpec> generator;
};

namespace detail {

inline Rational json_rational(const nlohmann::json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rational{v.get<std::int64_t>()};
  if (v.is_number()) return parse_rational(v.dump());
  throw Error(Errc::bad_manifest, "expected a number, got " + v.dump());
}

inline void set_timing_field(TimingParams& t, const std::string& key, const std::string& value) {
  auto as_int = [&] {
    try {
      return std::stoi(value);
    } catch (const std::logic_error&) {
      throw Error(Errc::bad_manifest, key + " must be an integer");
    }
  };
  if (key == "slot_boundary_us") t.slot_boundary_us = parse_rational(value);
  else if (key == "total_prb") t.total_prb = as_int();
  else if (key == "re_per_rb") t.re_per_rb = as_int();
  else if (key == "max_users") t.max_users = as_int();
  else if (key == "t_load_cycles") t.t_load_cycles = as_int();
  else if (key == "t_mult_cycles") t.t_mult_cycles = as_int();
  else if (key == "t_clk_ns") t.t_clk_ns = parse_rational(value);
  else if (key == "mem_clk_ns") t.mem_clk_ns = parse_rational(value);
  else if (key == "symbols_per_slot") t.symbols_per_slot = as_int();
  else throw Error(Errc::bad_manifest, "unknown timing key '" + key + "'");
}

}  // namespace detail

// Applies "key=value"; keys are n_t, n_l, direction, seed, allow_override or
// any TimingParams field.
inline void apply_override(SystemConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(Errc::bad_manifest, "override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);
  try {
    if (key == "n_t") c.n_t = std::stoi(value);
    else if (key == "n_l") c.n_l = std::stoi(value);
    else if (key == "direction") c.direction = parse_direction(value);
    else if (key == "seed") c.seed = std::stoull(value);
    else if (key == "allow_override") c.allow_override = value == "true" || value == "1";
    else detail::set_timing_field(c.timing, key, value);
  } catch (const std::logic_error&) {
    throw Error(Errc::bad_manifest, "bad value in override '" + assignment + "'");
  }
}

inline SystemConfig parse_config(const nlohmann::json& j) {
  SystemConfig c;
  if (!j.is_object()) throw Error(Errc::bad_manifest, "config must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "n_t") c.n_t = v.get<int>();
    else if (key == "n_l") c.n_l = v.get<int>();
    else if (key == "direction") c.direction = parse_direction(v.get<std::string>());
    else if (key == "seed") c.seed = v.get<std::uint64_t>();
    else if (key == "allow_override") c.allow_override = v.get<bool>();
    else if (key == "timing") {
      for (const auto& [tk, tv] : v.items()) {
        detail::set_timing_field(c.timing, tk, format_rational(detail::json_rational(tv)));
      }
    } else {
      throw Error(Errc::bad_manifest, "unknown config key '" + key + "'");
    }
  }
  return c;
}

inline ScenarioManifest parse_manifest(const std::string& text, const std::filesystem::path& base_dir) {
  ScenarioManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("config")) m.config = parse_config(j.at("config"));
    const auto& packets = j.at("packets");
    if (packets.contains("frames")) {
      for (const auto& f : packets.at("frames")) m.frames.push_back(base_dir / f.get<std::string>());
    }
    if (packets.contains("generator")) {
      const auto& g = packets.at("generator");
      GeneratorSpec spec;
      spec.num_users = g.at("num_users").get<int>();
      spec.allocation_pattern = parse_pattern(g.value("allocation_pattern", std::string("contiguous")));
      spec.slots = g.value("slots", 1);
      m.generator = spec;
    }
    if (m.frames.empty() == !m.generator.has_value()) {
      throw Error(Errc::bad_manifest, "packets needs exactly one of 'frames' or 'generator'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_manifest, e.what());
  }
  m.config.validate();
  return m;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline ScenarioManifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.parent_path());
}

inline nlohmann::json manifest_json(const SystemConfig& c, const std::vector<std::string>& frames) {
  nlohmann::json j;
  j["config"] = {{"n_t", c.n_t},
                 {"n_l", c.n_l},
                 {"direction", std::string(to_string(c.direction))},
                 {"seed", c.seed},
                 {"allow_override", c.allow_override}};
  j["packets"] = {{"frames", frames}};
  return j;
}

// ---------------------------------------------------------------------------
// Frame files

inline std::vector<Packet> read_frames(const std::filesystem::path& path, const FrameContext& ctx) {
  const std::string raw = read_file(path);
  const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size());
  try {
    return decode_stream(bytes, ctx);
  } catch (const ParseError& e) {
    throw ParseError(e.code(), e.offset(), path.string() + ": " + e.detail());
  }
}

inline void write_frames(const std::filesystem::path& path, const std::vector<Packet>& packets) {
  std::vector<std::uint8_t> bytes;
  for (const auto& p : packets) encode_packet(p, bytes);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io, "short write to " + path.string());
}

inline std::vector<std::vector<Packet>> load_slots(const ScenarioManifest& m) {
  if (m.generator) {
    return generate_slots(m.config.seed, m.generator->num_users, m.generator->allocation_pattern,
                          m.generator->slots, m.config);
  }
  std::vector<Packet> stream;
  for (const auto& f : m.frames) {
    auto packets = read_frames(f, m.config.frame_context());
    stream.insert(stream.end(), std::make_move_iterator(packets.begin()), std::make_move_iterator(packets.end()));
  }
  return split_slots(std::move(stream));
}

// Writes slot_NNNN.bin per slot plus manifest.json into dir.
inline void write_scenario(const std::filesystem::path& dir, const SystemConfig& config,
                           const std::vector<std::vector<Packet>>& slots) {
  std::filesystem::create_directories(dir);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "slot_%04zu.bin", i);
    write_frames(dir / name, slots[i]);
    names.emplace_back(name);
  }
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot write manifest in " + dir.string());
  out << manifest_json(config, names).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Reports

inline std::string format_slot_line(const SlotReport& s) {
  std::ostringstream os;
  os << "slot=" << s.slot_id << " cycles=" << format_rational(s.latency.slot_cycles)
     << " us=" << format_fixed(s.latency.slot_us, 6) << " deadline=" << (s.latency.deadline_met ? "true" : "false")
     << " nmult=" << s.latency.n_mult_total << " err=" << s.max_error << " sat=" << s.saturation_count;
  return os.str();
}

inline std::string format_report(const RunReport& run) {
  std::ostringstream os;
  const auto& c = run.config;
  os << "# n_t: " << c.n_t << '\n'
     << "# n_l: " << c.n_l << '\n'
     << "# direction: " << to_string(c.direction) << '\n'
     << "# seed: " << c.seed << '\n'
     << "# slots: " << run.slots.size() << '\n'
     << "# dsp_estimate: " << estimate_dsp(c.n_t, c.n_l) << '\n';
  for (const auto& s : run.slots) {
    char sum[24];
    std::snprintf(sum, sizeof sum, "%016llx", static_cast<unsigned long long>(s.checksum));
    os << "# slot " << s.slot_id << " checksum: " << sum << " matrix_loads: " << s.matrix_loads
       << " rgm_write_cycles: " << s.rgm_write_cycles << " rgm_wipe_cycles: " << s.rgm_wipe_cycles;
    if (run.real_checked) os << " real_err: " << s.max_real_error;
    os << '\n';
  }
  for (const auto& s : run.slots) os << format_slot_line(s) << '\n';
  os << "result=" << (run.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

}  // namespace precoder
