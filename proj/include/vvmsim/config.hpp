// Copyright 2026 The vvmsim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vvmsim/mmu.hpp"
#include "vvmsim/os_model.hpp"
#include "vvmsim/tlb.hpp"
#include "vvmsim/vector_core.hpp"
#include "vvmsim/vlsu.hpp"
#include "vvmsim/workloads.hpp"

namespace vvmsim {

enum class Mode : std::uint8_t { BareMetal, VirtualMemory };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

struct SimConfig
{
  KernelSpec kernel{MatmulKernel{32}};
  TlbConfig tlb;
  MmuLatencyParams mmu_latencies;
  ArbiterPriority priority = ArbiterPriority::ScalarFirst;
  CoreTimingParams core;
  CacheGeometry cache;
  unsigned invalidation_cycles_per_set = 1;
  /// Scalar L1 hit latency after translation.
  unsigned scalar_access_cycles = 1;
  unsigned scoreboard_depth = 8;
  SchedulerConfig scheduler;
  ContextSwitchCost switch_cost;
  Mode mode = Mode::VirtualMemory;
  /// Map the whole footprint before the run; otherwise pages are mapped on
  /// first touch by the page-fault handler.
  bool premapped = true;
  /// Touch the footprint in address order before the kernel starts, the
  /// way the data initialization of a real run would.
  bool warm_tlb = false;
  unsigned repetitions = 1;
  std::uint64_t seed = 1;
  bool keep_log = false;
  Cycle max_cycles = 2'000'000'000;

  /// Throws ConfigError.
  void validate() const;

  /// The configuration actually simulated: bare metal never ticks and
  /// never translates.
  SimConfig effective() const;
};

/// Every SimConfig field as "section.key". Setters throw ConfigError on a
/// malformed value.
struct ConfigKey
{
  std::string name;
  std::function<void(SimConfig&, const std::string&)> set;
  std::function<std::string(const SimConfig&)> get;
};

const std::vector<ConfigKey>& config_keys();

void set_option(SimConfig& cfg, const std::string& key, const std::string& value);
std::string get_option(const SimConfig& cfg, const std::string& key);

/// INI text with [section] headers and key = value lines; unknown keys are
/// errors. Values not mentioned keep what `cfg` already holds.
void load_ini(SimConfig& cfg, std::istream& in, const std::string& origin = "<ini>");
void load_ini_file(SimConfig& cfg, const std::string& path);

/// Writes every key, grouped by section.
void write_ini(std::ostream& os, const SimConfig& cfg);

}  // namespace vvmsim
