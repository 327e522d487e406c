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
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "vvmsim/addressing.hpp"
#include "vvmsim/errors.hpp"

namespace vvmsim {

struct PollutionConfig
{
  bool flush_tlb = true;
  Cycle extra_cycles = 0;
};

struct SchedulerConfig
{
  bool preemptive = false;
  std::uint64_t tick_hz = 100;
  std::uint64_t clock_hz = 50'000'000;
  Cycle interrupt_cycles = 20'000;
  PollutionConfig pollution;
  /// Switch to another process every N ticks; 0 never switches.
  unsigned switch_every_ticks = 0;
  Cycle fault_service_cycles = 5'000;

  void validate() const;
  Cycle tick_cost() const { return interrupt_cycles + pollution.extra_cycles; }
};

struct ContextSwitchCost
{
  Cycle scalar_cycles = 1'000;
  std::uint64_t vrf_bytes = 8'192;
  unsigned mem_bw_bytes_per_cycle = 8;
  /// Vector CSRs and bookkeeping on top of the register file transfer.
  Cycle csr_overhead = 152;

  void validate() const;
  /// Save plus restore of the whole register file.
  Cycle vrf_transfer_cycles() const;
};

enum class ProcessKind : std::uint8_t { Scalar, Vector };

Cycle context_switch_cycles(ProcessKind kind, const ContextSwitchCost& c);

struct TickEvent
{
};

struct ContextSwitchEvent
{
  ProcessKind to = ProcessKind::Vector;
};

struct PageFaultServiceEvent
{
  VirtualAddress page;
  PhysicalAddress frame;
  Cycle service_cycles = 0;
};

using OsEventKind = std::variant<TickEvent, ContextSwitchEvent, PageFaultServiceEvent>;

struct OsEvent
{
  Cycle at_cycle = 0;
  OsEventKind kind;
  Cycle cost = 0;
};

/// Cycle of the k-th tick (k >= 1). The product is taken before dividing so
/// the long-run rate is exact.
Cycle tick_cycle(const SchedulerConfig& cfg, std::uint64_t k);

/// Ticks in (0, horizon]. Empty for a non-preemptive scheduler.
std::vector<OsEvent> tick_schedule(const SchedulerConfig& cfg, Cycle horizon);

/// Planned virtual page number to physical page number mapping of a
/// workload; pages outside it are not part of the footprint.
using PagePlan = std::map<std::uint64_t, std::uint64_t>;

struct FaultInfo
{
  VirtualAddress vaddr;
  FaultCause cause = FaultCause::LoadPageFault;
};

/// Demand-maps the faulting page. Throws SimulationAbort for an address
/// outside the footprint and ContractViolation if the page is already
/// mapped.
OsEvent service_page_fault(const FaultInfo& fault, const PagePlan& plan, PageTable& pt,
                           Cycle service_cycles, Cycle now);

struct OsStats
{
  std::uint64_t ticks = 0;
  Cycle tick_cycles = 0;
  std::uint64_t switches = 0;
  Cycle switch_cycles = 0;
  std::uint64_t faults_serviced = 0;
  Cycle fault_cycles = 0;

  Cycle total() const { return tick_cycles + switch_cycles + fault_cycles; }
};

/// Lazily generated OS event stream for one run.
class OsModel
{
public:
  OsModel(SchedulerConfig cfg, ContextSwitchCost switch_cost, bool keep_log = false);

  /// Cycle of the next tick, if the scheduler is preemptive.
  std::optional<Cycle> next_tick() const;

  /// Fires the pending tick at `now` and returns the cycles the host is
  /// held: interrupt cost plus a switch away and back when one is due.
  Cycle fire_tick(Cycle now);

  Cycle service_fault(const FaultInfo& fault, const PagePlan& plan, PageTable& pt, Cycle now);

  const SchedulerConfig& config() const { return cfg_; }
  const OsStats& stats() const { return stats_; }
  const std::vector<OsEvent>& log() const { return log_; }

private:
  void record(OsEvent ev);

  SchedulerConfig cfg_;
  ContextSwitchCost switch_cost_;
  bool keep_log_;
  std::uint64_t next_tick_index_ = 1;
  OsStats stats_;
  std::vector<OsEvent> log_;
};

}  // namespace vvmsim
