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

// Command-line front end for the precoder datapath model.
//
//   precoder_sim run <manifest>
//   precoder_sim verify <manifest>
//   precoder_sim gen --seed S --users N --pattern P --out DIR [--slots K] [--n-t 16|32|64] [--direction TX|RX]
//   precoder_sim timing --config 16x8
//
// --config-override key=value may be given any number of times before the
// subcommand to adjust the loaded configuration.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "precoder/config.hpp"
#include "precoder/error.hpp"
#include "precoder/generator.hpp"
#include "precoder/scenario.hpp"
#include "precoder/simulator.hpp"
#include "precoder/timing_model.hpp"

namespace {

using namespace precoder;

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

SystemConfig parse_shape(const std::string& text, SystemConfig base) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw Error(Errc::bad_manifest, "config must look like 16x8, got '" + text + "'");
  try {
    base.n_t = std::stoi(text.substr(0, x));
    base.n_l = std::stoi(text.substr(x + 1));
  } catch (const std::logic_error&) {
    throw Error(Errc::bad_manifest, "config must look like 16x8, got '" + text + "'");
  }
  return base;
}

int run_manifest(const std::string& path, const std::vector<std::string>& overrides, bool verify) {
  ScenarioManifest m = load_manifest(path);
  for (const auto& o : overrides) apply_override(m.config, o);
  m.config.validate_datapath();
  const auto slots = load_slots(m);
  SimulatorOptions options;
  options.real_cross_check = verify;
  const RunReport run = run_slots(m.config, slots, options);
  std::cout << format_report(run);
  if (verify) {
    std::int64_t worst = 0;
    double worst_real = 0.0;
    for (const auto& s : run.slots) {
      worst = std::max(worst, s.max_error);
      worst_real = std::max(worst_real, s.max_real_error);
    }
    std::cout << "verify max_err=" << worst << " max_real_err=" << worst_real
              << " real_tolerance=" << kRealCrossCheckTolerance << '\n';
  }
  return run.pass ? 0 : kExitFail;
}

int timing(const std::string& shape, const std::vector<std::string>& overrides) {
  SystemConfig c = parse_shape(shape, {});
  for (const auto& o : overrides) apply_override(c, o);
  c.validate();
  // Worst case: every PRB of every symbol allocated, users alternating.
  const std::vector<SymbolAllocation> allocs(static_cast<std::size_t>(c.timing.symbols_per_slot),
                                             alternating_allocation(c.timing.max_users, c.timing));
  const LatencyReport r = slot_latency(allocs, c.timing, c.n_t, c.n_l);
  std::cout << "config=" << c.n_t << 'x' << c.n_l << '\n'
            << "symbol_cycles=" << format_rational(r.per_symbol_cycles.front()) << '\n'
            << "slot_cycles=" << format_rational(r.slot_cycles) << '\n'
            << "slot_us=" << format_fixed(r.slot_us, 6) << '\n'
            << "deadline_us=" << format_rational(c.timing.slot_boundary_us) << '\n'
            << "deadline=" << (r.deadline_met ? "true" : "false") << '\n'
            << "nmult=" << r.n_mult_total << '\n'
            << "dsp=" << r.dsp_estimate << '\n';
  return r.deadline_met ? 0 : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bit-accurate model of a massive-MIMO linear precoder datapath"};
  app.require_subcommand(1);
  std::vector<std::string> overrides;
  app.add_option("--config-override", overrides, "key=value adjustment to the configuration")->take_all();

  std::string manifest;
  auto* run = app.add_subcommand("run", "Run a scenario manifest and print the report");
  run->add_option("manifest", manifest, "Scenario manifest (JSON)")->required();

  auto* verify = app.add_subcommand("verify", "Run a scenario with the double-precision cross-check");
  verify->add_option("manifest", manifest, "Scenario manifest (JSON)")->required();

  std::uint64_t seed = 1;
  int users = 1;
  int slots = 1;
  int n_t = 16;
  std::string pattern = "contiguous";
  std::string direction = "TX";
  std::string out_dir;
  auto* gen = app.add_subcommand("gen", "Generate frame files and a manifest");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--users", users, "Users per slot (1..64)")->required();
  gen->add_option("--pattern", pattern, "contiguous | alternating | random");
  gen->add_option("--slots", slots, "Number of slots");
  gen->add_option("--n-t", n_t, "Antenna count (16, 32, 64)");
  gen->add_option("--direction", direction, "TX or RX");
  gen->add_option("--out", out_dir, "Output directory")->required();

  std::string shape = "16x8";
  auto* tim = app.add_subcommand("timing", "Print the analytic worst-case latency report");
  tim->add_option("--config", shape, "Antenna x layer shape, e.g. 16x8");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_manifest(manifest, overrides, false);
    if (verify->parsed()) return run_manifest(manifest, overrides, true);
    if (tim->parsed()) return timing(shape, overrides);
    if (gen->parsed()) {
      SystemConfig c;
      c.n_t = n_t;
      c.seed = seed;
      c.direction = parse_direction(direction);
      for (const auto& o : overrides) apply_override(c, o);
      const auto data = generate_slots(c.seed, users, parse_pattern(pattern), slots, c);
      write_scenario(out_dir, c, data);
      std::cout << "wrote " << data.size() << " slot(s) to " << out_dir << '\n';
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
