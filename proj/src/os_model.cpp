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

#include "vvmsim/os_model.hpp"

#include <string>

namespace vvmsim {

void
SchedulerConfig::validate() const
{
  if (tick_hz == 0)
    throw ConfigError("scheduler tick_hz must be positive");
  if (clock_hz < tick_hz)
    throw ConfigError("scheduler clock_hz must be at least tick_hz");
}

void
ContextSwitchCost::validate() const
{
  if (scalar_cycles == 0 or vrf_bytes == 0 or mem_bw_bytes_per_cycle == 0)
    throw ConfigError("context switch costs must be positive");
}

Cycle
ContextSwitchCost::vrf_transfer_cycles() const
{
  return 2 * vrf_bytes / mem_bw_bytes_per_cycle;
}

Cycle
context_switch_cycles(ProcessKind kind, const ContextSwitchCost& c)
{
  if (kind == ProcessKind::Scalar)
    return c.scalar_cycles;
  return c.scalar_cycles + c.vrf_transfer_cycles() + c.csr_overhead;
}

Cycle
tick_cycle(const SchedulerConfig& cfg, std::uint64_t k)
{
  return static_cast<Cycle>(static_cast<unsigned __int128>(k) * cfg.clock_hz / cfg.tick_hz);
}

std::vector<OsEvent>
tick_schedule(const SchedulerConfig& cfg, Cycle horizon)
{
  cfg.validate();
  std::vector<OsEvent> ticks;
  if (not cfg.preemptive)
    return ticks;
  for (std::uint64_t k = 1;; ++k)
    {
      Cycle at = tick_cycle(cfg, k);
      if (at > horizon)
        break;
      ticks.push_back(OsEvent{at, TickEvent{}, cfg.tick_cost()});
    }
  return ticks;
}

OsEvent
service_page_fault(const FaultInfo& fault, const PagePlan& plan, PageTable& pt,
                   Cycle service_cycles, Cycle now)
{
  auto it = plan.find(fault.vaddr.vpn());
  if (it == plan.end())
    throw SimulationAbort(std::string("segmentation fault: ") + to_string(fault.cause) + " at " +
                          to_hex(fault.vaddr.raw()) + " is outside the workload footprint");
  VirtualAddress page = fault.vaddr.page_base();
  if (pt.is_mapped(page))
    throw ContractViolation("page fault on mapped page " + to_hex(page.raw()));
  PhysicalAddress frame(it->second << kPageShift);
  pt.map_page(page, frame, Permissions::read_write());
  return OsEvent{now, PageFaultServiceEvent{page, frame, service_cycles}, service_cycles};
}

OsModel::OsModel(SchedulerConfig cfg, ContextSwitchCost switch_cost, bool keep_log)
  : cfg_(cfg), switch_cost_(switch_cost), keep_log_(keep_log)
{
  cfg_.validate();
  switch_cost_.validate();
}

std::optional<Cycle>
OsModel::next_tick() const
{
  if (not cfg_.preemptive)
    return std::nullopt;
  return tick_cycle(cfg_, next_tick_index_);
}

void
OsModel::record(OsEvent ev)
{
  if (keep_log_)
    log_.push_back(std::move(ev));
}

Cycle
OsModel::fire_tick(Cycle now)
{
  if (not cfg_.preemptive)
    throw ContractViolation("tick on a non-preemptive scheduler");
  const std::uint64_t k = next_tick_index_++;
  Cycle held = cfg_.tick_cost();
  ++stats_.ticks;
  stats_.tick_cycles += held;
  record(OsEvent{now, TickEvent{}, held});

  if (cfg_.switch_every_ticks != 0 and k % cfg_.switch_every_ticks == 0)
    {
      // Out to another (scalar) process and back to the vector process.
      Cycle out = context_switch_cycles(ProcessKind::Vector, switch_cost_);
      Cycle back = context_switch_cycles(ProcessKind::Vector, switch_cost_);
      stats_.switches += 2;
      stats_.switch_cycles += out + back;
      record(OsEvent{now + held, ContextSwitchEvent{ProcessKind::Scalar}, out});
      record(OsEvent{now + held + out, ContextSwitchEvent{ProcessKind::Vector}, back});
      held += out + back;
    }
  return held;
}

Cycle
OsModel::service_fault(const FaultInfo& fault, const PagePlan& plan, PageTable& pt, Cycle now)
{
  OsEvent ev = service_page_fault(fault, plan, pt, cfg_.fault_service_cycles, now);
  ++stats_.faults_serviced;
  stats_.fault_cycles += ev.cost;
  record(std::move(ev));
  return cfg_.fault_service_cycles;
}

}  // namespace vvmsim
