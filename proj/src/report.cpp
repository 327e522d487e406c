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

#include <nlohmann/json.hpp>

#include "vvmsim/driver.hpp"

namespace vvmsim {

using json = nlohmann::json;

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SourceCounters, requests, tlb_hits, tlb_misses, faults,
                                   service_cycles, ptw_cycles, wait_cycles)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(CommittedAccess, instr_id, first_element, element_count,
                                   vaddr, bytes, is_store)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OverheadBreakdown, total_pct, cva6_mmu_pct, ara_mmu_pct,
                                   other_pct, delta_cycles, cva6_mmu_cycles, ara_mmu_cycles,
                                   other_cycles)

void
to_json(json& j, const MmuLogEntry& e)
{
  j = json{{"source", to_string(e.source)}, {"vaddr", e.vaddr},
           {"kind", e.kind == AccessKind::Load ? "load" : "store"},
           {"issue", e.issue},   {"grant", e.grant},
           {"ready", e.ready},   {"tlb_hit", e.tlb_hit},
           {"fault", e.fault}};
}

void
from_json(const json& j, MmuLogEntry& e)
{
  e.source = j.at("source") == "scalar" ? Requester::Scalar : Requester::Vector;
  j.at("vaddr").get_to(e.vaddr);
  e.kind = j.at("kind") == "load" ? AccessKind::Load : AccessKind::Store;
  j.at("issue").get_to(e.issue);
  j.at("grant").get_to(e.grant);
  j.at("ready").get_to(e.ready);
  j.at("tlb_hit").get_to(e.tlb_hit);
  j.at("fault").get_to(e.fault);
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunReport, kernel, n, tlb_entries, tlb_policy, mode, seed,
                                   repetitions, total_cycles, scalar_mmu_stall_cycles,
                                   vector_mmu_stall_cycles, hidden_stall_cycles,
                                   arbiter_wait_cycles, ptw_cycles, scalar, vector, flush_events,
                                   page_faults, os_cycles, ticks, tick_cycles, switch_cycles,
                                   fault_service_cycles, tick_pollution_cycles,
                                   invalidation_cycles, vector_compute_busy_cycles,
                                   vector_memory_busy_cycles, vector_instructions,
                                   scalar_accesses, footprint_pages, mmu_log, committed)

bool
RunReport::operator==(const RunReport& other) const
{
  json a = *this;
  json b = other;
  return a == b;
}

std::string
to_json(const RunReport& report, int indent)
{
  return json(report).dump(indent) + "\n";
}

RunReport
report_from_json(const std::string& text)
{
  try
    {
      return json::parse(text).get<RunReport>();
    }
  catch (const json::exception& e)
    {
      throw ConfigError(std::string("bad report JSON: ") + e.what());
    }
}

std::string
to_json(const std::vector<SweepRow>& rows, int indent)
{
  json out = json::array();
  for (const SweepRow& r : rows)
    out.push_back(json{{"kernel", r.kernel},
                       {"n", r.n},
                       {"tlb_entries", r.tlb_entries},
                       {"overhead", r.breakdown},
                       {"total_cycles", r.total_cycles},
                       {"baseline_cycles", r.baseline_cycles},
                       {"report", r.report}});
  return out.dump(indent) + "\n";
}

}  // namespace vvmsim
