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
#include <iosfwd>
#include <string>
#include <vector>

#include "vvmsim/config.hpp"

namespace vvmsim {

struct SourceCounters
{
  std::uint64_t requests = 0;
  std::uint64_t tlb_hits = 0;
  std::uint64_t tlb_misses = 0;
  std::uint64_t faults = 0;
  Cycle service_cycles = 0;  ///< cycles the MMU spent on this source
  Cycle ptw_cycles = 0;
  Cycle wait_cycles = 0;     ///< arbiter waits
};

struct RunReport
{
  std::string kernel;
  std::uint32_t n = 0;
  unsigned tlb_entries = 0;
  std::string tlb_policy;
  std::string mode;
  std::uint64_t seed = 0;
  unsigned repetitions = 1;

  Cycle total_cycles = 0;
  Cycle scalar_mmu_stall_cycles = 0;  ///< scalar MMU service not hidden by vector work
  Cycle vector_mmu_stall_cycles = 0;  ///< vector MMU service not hidden by vector work
  Cycle hidden_stall_cycles = 0;
  Cycle arbiter_wait_cycles = 0;
  Cycle ptw_cycles = 0;
  SourceCounters scalar;
  SourceCounters vector;
  std::uint64_t flush_events = 0;
  std::uint64_t page_faults = 0;
  Cycle os_cycles = 0;
  std::uint64_t ticks = 0;
  Cycle tick_cycles = 0;
  Cycle switch_cycles = 0;
  Cycle fault_service_cycles = 0;
  Cycle tick_pollution_cycles = 0;
  Cycle invalidation_cycles = 0;
  Cycle vector_compute_busy_cycles = 0;
  Cycle vector_memory_busy_cycles = 0;
  std::uint64_t vector_instructions = 0;
  std::uint64_t scalar_accesses = 0;
  std::uint64_t footprint_pages = 0;

  std::vector<MmuLogEntry> mmu_log;
  std::vector<CommittedAccess> committed;

  bool operator==(const RunReport&) const;
};

/// Runs one configuration to completion. Throws ConfigError or
/// SimulationAbort.
RunReport run(const SimConfig& config);

/// Same, on an explicit stream (used by tests with constructed workloads).
RunReport run(const SimConfig& config, const Workload& workload);

struct OverheadBreakdown
{
  double cva6_mmu_pct = 0;
  double ara_mmu_pct = 0;
  double other_pct = 0;
  double total_pct = 0;
  std::int64_t cva6_mmu_cycles = 0;
  std::int64_t ara_mmu_cycles = 0;
  std::int64_t other_cycles = 0;
  std::int64_t delta_cycles = 0;
};

/// Percentages are relative to the bare-metal runtime. Cycle buckets add
/// up to the runtime difference exactly. Throws ConfigError when the two
/// reports come from different kernels.
OverheadBreakdown overhead(const RunReport& vm, const RunReport& bm);

struct SweepSpec
{
  std::vector<unsigned> tlb_sizes{2, 4, 8, 16, 32, 64, 128};
  std::vector<KernelSpec> kernels;
  unsigned repetitions = 1;
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned jobs = 0;

  void validate() const;
};

struct SweepRow
{
  std::string kernel;
  std::uint32_t n = 0;
  unsigned tlb_entries = 0;
  OverheadBreakdown breakdown;
  Cycle total_cycles = 0;
  Cycle baseline_cycles = 0;
  RunReport report;
};

/// One bare-metal baseline per kernel; rows come out kernel-major in the
/// requested order, whatever order the workers finish in.
std::vector<SweepRow> sweep(const SweepSpec& spec, const SimConfig& base);

inline constexpr const char* kCsvHeader =
    "kernel,n,tlb_entries,total_pct,cva6_mmu_pct,ara_mmu_pct,other_pct,total_cycles,baseline_cycles";

std::string csv_row(const SweepRow& row);
void write_csv(std::ostream& os, const std::vector<SweepRow>& rows);

std::string to_json(const RunReport& report, int indent = 2);
RunReport report_from_json(const std::string& text);
std::string to_json(const std::vector<SweepRow>& rows, int indent = 2);

/// Writes `text` to `path`, or to standard output for "" and "-". Throws
/// IoError naming the path.
void write_output(const std::string& path, const std::string& text);

}  // namespace vvmsim
