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

#include "vvmsim/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <deque>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

namespace vvmsim {

namespace {

enum class ItemKind : std::uint8_t { ScalarLoad, ScalarStore, Vector };

/// Scoreboard slot of the scalar core.
struct SbItem
{
  std::size_t index = 0;
  ItemKind kind = ItemKind::ScalarLoad;
  // scalar
  ScalarMemAccess access;
  bool requested = false;
  std::optional<Cycle> done_at;
  std::optional<FaultInfo> fault;
  // vector
  VectorInstruction instr;
  bool dispatched = false;
  std::optional<VectorAnswer> answer;
};

/// One run: a scalar core issuing the stream in order, the vector unit,
/// the shared MMU and the OS. Every cycle runs OS events, then the scalar
/// core, then the vector unit (scalar and vector swap places when the
/// vector side has MMU priority).
class Simulation
{
public:
  Simulation(const SimConfig& cfg, const Workload& w)
    : cfg_(cfg),
      layout_(w.layout),
      stream_(cfg.repetitions > 1 ? repeat(w.stream, cfg.repetitions) : w.stream),
      translate_(cfg.mode == Mode::VirtualMemory),
      plan_(w.layout.page_plan()),
      mmu_(cfg.tlb, cfg.mmu_latencies, cfg.priority, cfg.keep_log),
      vu_(cfg.core, cfg.cache, cfg.invalidation_cycles_per_set, translate_, cfg.keep_log),
      os_(cfg.scheduler, cfg.switch_cost, cfg.keep_log),
      guard_(cfg.core.max_fault_retries)
  {
    if (not translate_)
      return;
    if (cfg.premapped)
      layout_.map_all(pt_);
    mmu_.set_satp(true, &pt_);
    if (cfg.warm_tlb and cfg.premapped)
      for (const auto& [vpn, ppn] : plan_)
        vvmsim::translate(mmu_.satp(), mmu_.tlb(),
                          MmuRequest{VirtualAddress(vpn << kPageShift),
                                     {AccessKind::Load, AccessSource::Scalar}, 0},
                          cfg.mmu_latencies);
  }

  RunReport run();

private:
  bool finished(Cycle now) const
  {
    return next_issue_ == stream_.size() and sb_.empty() and vu_.empty() and now >= frozen_until_;
  }

  void os_step(Cycle now);
  void scalar_step(Cycle now);
  void vector_step(Cycle now);
  void account(Cycle now);
  void squash_younger();
  void trap(Cycle now, const FaultInfo& fault);

  SimConfig cfg_;
  MemoryLayout layout_;
  InstructionStream stream_;
  bool translate_;
  PagePlan plan_;
  PageTable pt_;
  SharedMmu mmu_;
  VectorUnit vu_;
  OsModel os_;
  ResumeGuard guard_;

  std::deque<SbItem> sb_;
  std::size_t next_issue_ = 0;
  Cycle frozen_until_ = 0;

  Cycle stall_[2] = {0, 0};
  Cycle hidden_ = 0;
  std::uint64_t scalar_accesses_ = 0;
};

void
Simulation::os_step(Cycle now)
{
  while (auto tick = os_.next_tick())
    {
      if (*tick > now)
        break;
      Cycle held = os_.fire_tick(now);
      frozen_until_ = std::max(frozen_until_, now) + held;
      if (translate_ and cfg_.scheduler.pollution.flush_tlb)
        mmu_.flush_for_tick();
    }
}

void
Simulation::squash_younger()
{
  if (translate_ and mmu_.has_outstanding(Requester::Scalar))
    mmu_.cancel(Requester::Scalar);
  next_issue_ = sb_.front().index + 1;
  sb_.erase(sb_.begin() + 1, sb_.end());
}

void
Simulation::trap(Cycle now, const FaultInfo& fault)
{
  squash_younger();
  frozen_until_ = now + os_.service_fault(fault, plan_, pt_, now);
  guard_.on_mapping_change();
}

void
Simulation::scalar_step(Cycle now)
{
  if (now < frozen_until_)
    return;
  if (translate_)
    mmu_.service(now);

  // Commit, at most one item per cycle.
  if (not sb_.empty())
    {
      SbItem& head = sb_.front();
      if (head.kind == ItemKind::Vector)
        {
          // Answers become visible to the scalar core one cycle after they
          // are posted.
          if (head.answer and head.answer->at < now)
            {
              if (const auto& f = head.answer->fault)
                {
                  guard_.on_fault(head.instr.id, f->element_index);
                  VectorCsrState csr{f->element_index, head.instr.vl, true};
                  head.instr = resume(head.instr, csr);
                  head.dispatched = false;
                  head.answer.reset();
                  trap(now, FaultInfo{f->vaddr, f->cause});
                  return;
                }
              sb_.pop_front();
            }
        }
      else if (head.fault)
        {
          FaultInfo f = *head.fault;
          head.fault.reset();
          head.requested = false;
          trap(now, f);
          return;
        }
      else if (head.done_at and *head.done_at <= now)
        sb_.pop_front();
    }

  // Vector instructions leave from the top of the scoreboard only.
  if (not sb_.empty())
    {
      SbItem& head = sb_.front();
      if (head.kind == ItemKind::Vector and not head.dispatched and vu_.can_dispatch(now))
        {
          head.dispatched = true;
          vu_.dispatch(head.instr, now);
        }
    }

  // Oldest unfinished scalar access; one translation in flight.
  auto it = std::find_if(sb_.begin(), sb_.end(), [](const SbItem& i) {
    return i.kind != ItemKind::Vector and not i.done_at and not i.fault;
  });
  if (it != sb_.end())
    {
      SbItem& item = *it;
      auto complete = [&](Cycle at) {
        item.done_at = std::max(at, vu_.l1_busy_until()) + cfg_.scalar_access_cycles;
        ++scalar_accesses_;
      };
      if (not translate_)
        complete(now);
      else
        {
          if (not item.requested and not mmu_.has_outstanding(Requester::Scalar))
            {
              mmu_.submit(Requester::Scalar,
                          MmuRequest{item.access.vaddr,
                                     {item.access.access, AccessSource::Scalar}, now});
              item.requested = true;
            }
          if (item.requested)
            if (auto resp = mmu_.take_response(Requester::Scalar, now))
              {
                if (auto* pf = std::get_if<PageFault>(&resp->outcome))
                  item.fault = FaultInfo{pf->va, pf->cause};
                else
                  complete(now);
              }
        }
    }

  // Issue.
  if (sb_.size() < cfg_.scoreboard_depth and next_issue_ < stream_.size())
    {
      SbItem item;
      item.index = next_issue_;
      const StreamItem& s = stream_[next_issue_++];
      if (auto* a = std::get_if<ScalarMemAccess>(&s))
        {
          item.kind = a->access == AccessKind::Load ? ItemKind::ScalarLoad : ItemKind::ScalarStore;
          item.access = *a;
        }
      else
        {
          item.kind = ItemKind::Vector;
          item.instr = std::get<VectorInstruction>(s);
        }
      sb_.push_back(std::move(item));
    }
}

void
Simulation::vector_step(Cycle now)
{
  vu_.step(now, translate_ ? &mmu_ : nullptr);
  while (auto a = vu_.take_answer())
    {
      // Only the head can have a dispatched instruction without an answer.
      if (not sb_.empty() and sb_.front().kind == ItemKind::Vector and sb_.front().dispatched and
          sb_.front().instr.id == a->instr_id)
        sb_.front().answer = a;
    }
}

void
Simulation::account(Cycle now)
{
  if (not translate_)
    return;
  const bool busy = vu_.busy_this_cycle();
  for (Requester r : {Requester::Scalar, Requester::Vector})
    if (mmu_.in_service(r, now))
      (busy ? hidden_ : stall_[static_cast<int>(r)])++;
}

RunReport
Simulation::run()
{
  Cycle now = 0;
  for (;; ++now)
    {
      if (finished(now))
        break;
      if (now >= cfg_.max_cycles)
        throw SimulationAbort("run did not finish within " + std::to_string(cfg_.max_cycles) +
                              " cycles");
      os_step(now);
      if (cfg_.priority == ArbiterPriority::VectorFirst)
        {
          vector_step(now);
          scalar_step(now);
        }
      else
        {
          scalar_step(now);
          if (translate_)
            mmu_.service(now);
          vector_step(now);
        }
      account(now);
    }

  RunReport r;
  r.kernel = cfg_.kernel.label();
  r.n = cfg_.kernel.size();
  r.tlb_entries = cfg_.tlb.num_entries;
  r.tlb_policy = to_string(cfg_.tlb.policy);
  r.mode = to_string(cfg_.mode);
  r.seed = cfg_.seed;
  r.repetitions = cfg_.repetitions;
  r.total_cycles = now;
  r.scalar_mmu_stall_cycles = stall_[0];
  r.vector_mmu_stall_cycles = stall_[1];
  r.hidden_stall_cycles = hidden_;
  auto fill = [&](SourceCounters& c, Requester who) {
    const RequesterStats& s = mmu_.stats(who);
    c = SourceCounters{s.requests, s.tlb_hits, s.tlb_misses, s.faults,
                       s.service_cycles, s.ptw_cycles, s.wait_cycles};
  };
  if (translate_)
    {
      fill(r.scalar, Requester::Scalar);
      fill(r.vector, Requester::Vector);
    }
  r.arbiter_wait_cycles = r.scalar.wait_cycles + r.vector.wait_cycles;
  r.ptw_cycles = r.scalar.ptw_cycles + r.vector.ptw_cycles;
  r.flush_events = vu_.stats().flush_events;
  const OsStats& os = os_.stats();
  r.page_faults = os.faults_serviced;
  r.os_cycles = os.total();
  r.ticks = os.ticks;
  r.tick_cycles = os.tick_cycles;
  r.switch_cycles = os.switch_cycles;
  r.fault_service_cycles = os.fault_cycles;
  r.tick_pollution_cycles = mmu_.tick_pollution_cycles();
  r.invalidation_cycles = vu_.stats().invalidation_cycles;
  r.vector_compute_busy_cycles = vu_.stats().compute_busy_cycles;
  r.vector_memory_busy_cycles = vu_.stats().memory_busy_cycles;
  r.vector_instructions = vu_.stats().instructions_retired;
  r.scalar_accesses = scalar_accesses_;
  r.footprint_pages = layout_.footprint_pages;
  if (cfg_.keep_log)
    {
      r.mmu_log = mmu_.log();
      r.committed = vu_.committed();
    }
  return r;
}

}  // namespace

RunReport
run(const SimConfig& config)
{
  SimConfig cfg = config.effective();
  cfg.validate();
  return run(cfg, generate(cfg.kernel, cfg.seed, cfg.core));
}

RunReport
run(const SimConfig& config, const Workload& workload)
{
  SimConfig cfg = config.effective();
  cfg.kernel = workload.spec;
  cfg.validate();
  Simulation sim(cfg, workload);
  return sim.run();
}

OverheadBreakdown
overhead(const RunReport& vm, const RunReport& bm)
{
  if (vm.kernel != bm.kernel or vm.n != bm.n or vm.repetitions != bm.repetitions)
    throw ConfigError("overhead needs reports of the same kernel (" + vm.kernel + " vs " +
                      bm.kernel + ")");
  if (bm.total_cycles == 0)
    throw ConfigError("baseline report has zero cycles");

  OverheadBreakdown o;
  o.delta_cycles = static_cast<std::int64_t>(vm.total_cycles) -
                   static_cast<std::int64_t>(bm.total_cycles);
  if (o.delta_cycles > 0)
    {
      std::int64_t c = vm.scalar_mmu_stall_cycles;
      std::int64_t a = vm.vector_mmu_stall_cycles;
      if (c + a > o.delta_cycles)
        {
          // More exposed stall than slowdown: the rest of the run absorbed
          // some of it. Scale both sources down alike.
          const std::int64_t sum = c + a;
          c = static_cast<std::int64_t>(static_cast<__int128>(c) * o.delta_cycles / sum);
          a = static_cast<std::int64_t>(static_cast<__int128>(a) * o.delta_cycles / sum);
        }
      o.cva6_mmu_cycles = c;
      o.ara_mmu_cycles = a;
    }
  o.other_cycles = o.delta_cycles - o.cva6_mmu_cycles - o.ara_mmu_cycles;

  const double base = static_cast<double>(bm.total_cycles);
  o.total_pct = 100.0 * static_cast<double>(o.delta_cycles) / base;
  o.cva6_mmu_pct = 100.0 * static_cast<double>(o.cva6_mmu_cycles) / base;
  o.ara_mmu_pct = 100.0 * static_cast<double>(o.ara_mmu_cycles) / base;
  o.other_pct = o.total_pct - o.cva6_mmu_pct - o.ara_mmu_pct;
  return o;
}

void
SweepSpec::validate() const
{
  TlbConfig probe;
  for (unsigned s : tlb_sizes)
    {
      probe.num_entries = s;
      probe.validate();
    }
  for (const KernelSpec& k : kernels)
    k.validate();
  if (repetitions == 0)
    throw ConfigError("sweep repetitions must be positive");
}

std::vector<SweepRow>
sweep(const SweepSpec& spec, const SimConfig& base)
{
  spec.validate();
  base.validate();

  // Task 0 of each kernel is its baseline; the rest follow tlb_sizes.
  std::vector<SimConfig> tasks;
  const std::size_t per_kernel = spec.tlb_sizes.size() + 1;
  for (const KernelSpec& k : spec.kernels)
    {
      SimConfig c = base;
      c.kernel = k;
      c.repetitions = spec.repetitions;
      c.mode = Mode::BareMetal;
      tasks.push_back(c);
      c.mode = Mode::VirtualMemory;
      for (unsigned size : spec.tlb_sizes)
        {
          c.tlb.num_entries = size;
          tasks.push_back(c);
        }
    }

  std::vector<RunReport> reports(tasks.size());
  std::atomic<std::size_t> next{0};
  unsigned jobs = spec.jobs ? spec.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, tasks.size()));
  std::vector<std::future<void>> workers;
  for (unsigned j = 0; j < jobs; ++j)
    workers.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();)
        reports[i] = run(tasks[i]);
    }));
  for (auto& w : workers)
    w.get();

  std::vector<SweepRow> rows;
  for (std::size_t k = 0; k < spec.kernels.size(); ++k)
    {
      const RunReport& bm = reports[k * per_kernel];
      for (std::size_t s = 0; s < spec.tlb_sizes.size(); ++s)
        {
          RunReport& vm = reports[k * per_kernel + 1 + s];
          SweepRow row;
          row.kernel = spec.kernels[k].label();
          row.n = spec.kernels[k].size();
          row.tlb_entries = spec.tlb_sizes[s];
          row.breakdown = overhead(vm, bm);
          row.total_cycles = vm.total_cycles;
          row.baseline_cycles = bm.total_cycles;
          row.report = std::move(vm);
          rows.push_back(std::move(row));
        }
    }
  return rows;
}

std::string
csv_row(const SweepRow& row)
{
  char buf[256];
  const OverheadBreakdown& b = row.breakdown;
  std::snprintf(buf, sizeof buf, "%s,%u,%u,%.4f,%.4f,%.4f,%.4f,%llu,%llu", row.kernel.c_str(),
                row.n, row.tlb_entries, b.total_pct, b.cva6_mmu_pct, b.ara_mmu_pct, b.other_pct,
                static_cast<unsigned long long>(row.total_cycles),
                static_cast<unsigned long long>(row.baseline_cycles));
  return buf;
}

void
write_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
  os << kCsvHeader << '\n';
  for (const SweepRow& r : rows)
    os << csv_row(r) << '\n';
}

void
write_output(const std::string& path, const std::string& text)
{
  if (path.empty() or path == "-")
    {
      std::cout << text;
      std::cout.flush();
      return;
    }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (not out)
    throw IoError("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (not out)
    throw IoError("failed writing " + path);
}

}  // namespace vvmsim
