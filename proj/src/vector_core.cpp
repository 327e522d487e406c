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

#include "vvmsim/vector_core.hpp"

#include <algorithm>

namespace vvmsim {

void
CoreTimingParams::validate() const
{
  if (lanes == 0 or vlen_bits == 0 or mem_bw_bytes_per_cycle == 0 or flush_cycles == 0 or
      window_depth == 0 or fp_rate_per_lane == 0)
    throw ConfigError("core timing parameters must be positive");
  if (vlen_bits % 64)
    throw ConfigError("VLEN must be a multiple of 64 bits");
}

VectorInstruction
VectorInstruction::arithmetic(std::uint64_t id, std::uint32_t vl, std::vector<std::uint8_t> sources,
                              std::optional<std::uint8_t> dest, unsigned rate, bool scalar_result)
{
  VectorInstruction in;
  in.id = id;
  in.cls = ArithmeticOp{rate, scalar_result};
  in.vl = vl;
  in.sources = std::move(sources);
  in.dest = dest;
  return in;
}

VectorInstruction
VectorInstruction::memory(std::uint64_t id, VectorMemOp op, std::vector<std::uint8_t> sources,
                          std::optional<std::uint8_t> dest)
{
  VectorInstruction in;
  in.id = id;
  in.vl = op.vl;
  in.cls = MemoryOp{std::move(op)};
  in.sources = std::move(sources);
  in.dest = dest;
  return in;
}

const VectorMemOp*
VectorInstruction::mem_op() const
{
  if (auto* m = std::get_if<MemoryOp>(&cls))
    return &m->op;
  return nullptr;
}

VectorMemOp*
VectorInstruction::mem_op()
{
  if (auto* m = std::get_if<MemoryOp>(&cls))
    return &m->op;
  return nullptr;
}

std::uint32_t
VectorInstruction::vstart() const
{
  const VectorMemOp* op = mem_op();
  return op ? op->vstart : 0;
}

const char*
to_string(FlushPhase phase)
{
  switch (phase)
    {
    case FlushPhase::Idle:           return "idle";
    case FlushPhase::DrainPreceding: return "drain-preceding";
    case FlushPhase::Flushing:       return "flushing";
    case FlushPhase::AckFrontend:    return "ack-frontend";
    }
  return "?";
}

void
FlushFsm::fault(Cycle)
{
  draining_ = true;
  flush_start_.reset();
}

bool
FlushFsm::step(Cycle now, bool preceding_committed)
{
  if (draining_ and preceding_committed)
    {
      draining_ = false;
      flush_start_ = now;
      return true;
    }
  return false;
}

FlushPhase
FlushFsm::phase(Cycle now) const
{
  if (draining_)
    return FlushPhase::DrainPreceding;
  if (not flush_start_)
    return FlushPhase::Idle;
  Cycle idle = *flush_start_ + flush_cycles_;
  if (now >= idle)
    return FlushPhase::Idle;
  if (now + 1 == idle)
    return FlushPhase::AckFrontend;
  return FlushPhase::Flushing;
}

std::optional<Cycle>
FlushFsm::idle_at() const
{
  if (draining_)
    return std::nullopt;
  if (not flush_start_)
    return Cycle{0};
  return *flush_start_ + flush_cycles_;
}

ExceptionReport
raise_page_fault(const VectorInstruction& instr, const AddrGenFault& fault, VectorCsrState& csr,
                 FlushFsm& fsm, Cycle now)
{
  csr.vstart = fault.element_index;
  csr.vl = instr.vl;
  csr.faulted = true;
  fsm.fault(now);
  return ExceptionReport{instr.id, fault.element_index, fault.cause, fault.vaddr};
}

VectorInstruction
resume(const VectorInstruction& instr, const VectorCsrState& csr)
{
  if (not csr.faulted)
    throw ContractViolation("resume without a pending vector fault");
  VectorInstruction again = instr;
  if (VectorMemOp* op = again.mem_op())
    op->vstart = std::min(csr.vstart, op->vl);
  return again;
}

void
complete_resumed(VectorCsrState& csr)
{
  csr.vstart = 0;
  csr.faulted = false;
}

void
ResumeGuard::on_fault(std::uint64_t instr_id, std::uint32_t element)
{
  if (instr_id == last_id_ and element == last_element_ and epoch_ == last_epoch_)
    {
      if (++retries_ > max_retries_)
        throw SimulationAbort("livelock: instruction " + std::to_string(instr_id) +
                              " keeps faulting at element " + std::to_string(element) +
                              " with no mapping change");
      return;
    }
  last_id_ = instr_id;
  last_element_ = element;
  last_epoch_ = epoch_;
  retries_ = 0;
}

Cycle
dispatch_accept_cycle(Cycle arrival, const FlushFsm& fsm, const CoreTimingParams& p)
{
  Cycle accepted = arrival + p.dispatch_cycles;
  if (auto idle = fsm.idle_at())
    return std::max(accepted, *idle);
  throw ContractViolation("dispatch while the backend is still draining");
}

Cycle
arithmetic_cycles(std::uint32_t elements, unsigned rate, const CoreTimingParams& p)
{
  const Cycle per_cycle = Cycle(p.lanes) * rate;
  return (elements + per_cycle - 1) / per_cycle;
}

Cycle
transfer_cycles(std::uint64_t bytes, const CoreTimingParams& p)
{
  return (bytes + p.mem_bw_bytes_per_cycle - 1) / p.mem_bw_bytes_per_cycle;
}

std::vector<Occupancy>
instruction_cycles(std::span<const WindowEntry> window, const CoreTimingParams& p)
{
  std::vector<Occupancy> occ(window.size());
  Cycle compute_free = 0;
  Cycle memory_free = 0;
  Cycle all_end = 0;
  const bool serialize = not p.chaining or not p.overlap;

  for (std::size_t i = 0; i < window.size(); ++i)
    {
      const WindowEntry& e = window[i];
      Cycle lo_start = e.ready_at;
      Cycle lo_end = 0;
      if (not p.overlap)
        lo_start = std::max(lo_start, all_end);
      for (std::size_t d : e.deps)
        {
          if (d >= i)
            throw ContractViolation("window dependency must point to an older entry");
          if (serialize)
            lo_start = std::max(lo_start, occ[d].end);
          else
            {
              lo_start = std::max(lo_start, occ[d].start + 1);
              lo_end = std::max(lo_end, occ[d].end + 1);
            }
        }

      if (e.kind == WindowEntry::Kind::Compute)
        {
          Cycle start = std::max(lo_start, compute_free);
          occ[i] = {start, std::max(start + e.compute_cycles, lo_end)};
          compute_free = occ[i].end;
        }
      else
        {
          Cycle t = std::max(lo_start, memory_free);
          std::optional<Cycle> first;
          for (const TimedBurst& b : e.bursts)
            {
              Cycle bs = std::max(t, b.translated_at);
              if (not first)
                first = bs;
              t = bs + transfer_cycles(b.bytes, p);
            }
          occ[i] = {first.value_or(t), std::max(t, lo_end)};
          memory_free = occ[i].end;
        }
      all_end = std::max(all_end, occ[i].end);
    }
  return occ;
}

Cycle
window_end(std::span<const Occupancy> occ)
{
  Cycle end = 0;
  for (const Occupancy& o : occ)
    end = std::max(end, o.end);
  return end;
}

// VectorUnit ---------------------------------------------------------------

VectorUnit::VectorUnit(CoreTimingParams params, CacheGeometry cache, unsigned per_set_cycles,
                       bool translate, bool log_accesses)
  : params_(params),
    cache_(cache),
    per_set_cycles_(per_set_cycles),
    translate_(translate),
    log_accesses_(log_accesses),
    fsm_(params.flush_cycles)
{
  params_.validate();
  cache_.validate();
}

bool
VectorUnit::can_dispatch(Cycle now) const
{
  return window_.size() < params_.window_depth and fsm_.idle(now);
}

Cycle
VectorUnit::dispatch(VectorInstruction instr, Cycle now)
{
  if (not can_dispatch(now))
    throw ContractViolation("vector dispatch while the window is full or the frontend is stalled");

  InFlight e;
  e.seq = next_seq_++;
  e.accepted_at = dispatch_accept_cycle(now, fsm_, params_);
  if (const VectorMemOp* op = instr.mem_op())
    {
      op->validate();
      e.units = translation_units(*op);
      e.progress = op->vstart;
    }
  e.limit = instr.vl;
  e.progress = std::min(e.progress, e.limit);

  auto alive = [this](std::uint64_t seq) { return find(seq) != nullptr; };
  auto add_dep = [&](std::uint64_t seq) {
    if (alive(seq) and std::find(e.deps.begin(), e.deps.end(), seq) == e.deps.end())
      e.deps.push_back(seq);
  };
  auto check_reg = [](std::uint8_t r) {
    if (r >= kVectorRegisters)
      throw ContractViolation("vector register index out of range");
  };
  for (std::uint8_t s : instr.sources)
    {
      check_reg(s);
      if (last_writer_[s])
        add_dep(*last_writer_[s]);
    }
  if (instr.dest)
    {
      check_reg(*instr.dest);
      if (last_writer_[*instr.dest])
        add_dep(*last_writer_[*instr.dest]);
      for (std::uint64_t r : readers_[*instr.dest])
        add_dep(r);
    }
  for (std::uint8_t s : instr.sources)
    {
      auto& rd = readers_[s];
      std::erase_if(rd, [&](std::uint64_t seq) { return not alive(seq); });
      rd.push_back(e.seq);
    }
  if (instr.dest)
    {
      last_writer_[*instr.dest] = e.seq;
      readers_[*instr.dest].clear();
    }

  e.instr = std::move(instr);
  Cycle accepted = e.accepted_at;
  window_.push_back(std::move(e));
  return accepted;
}

VectorUnit::InFlight*
VectorUnit::find(std::uint64_t seq)
{
  for (InFlight& e : window_)
    if (e.seq == seq)
      return &e;
  return nullptr;
}

std::uint32_t
VectorUnit::allowed_progress(const InFlight& e) const
{
  std::uint32_t allowed = e.limit;
  for (std::uint64_t dep : e.deps)
    {
      auto it = std::find_if(snapshot_.begin(), snapshot_.end(),
                             [dep](const auto& s) { return s.first == dep; });
      if (it == snapshot_.end())
        continue;  // retired before this cycle
      if (not params_.chaining or not params_.overlap)
        return e.progress;
      allowed = std::min(allowed, it->second);
    }
  return std::max(allowed, e.progress);
}

bool
VectorUnit::may_run(const InFlight& e, Cycle now) const
{
  if (e.accepted_at > now)
    return false;
  if (not params_.overlap)
    return &window_.front() == &e;
  return true;
}

void
VectorUnit::answer(const InFlight& e, Cycle now, std::optional<AddrGenFault> fault)
{
  answers_.push_back(VectorAnswer{e.seq, e.instr.id, now, fault});
}

std::optional<VectorAnswer>
VectorUnit::take_answer()
{
  if (answers_.empty())
    return std::nullopt;
  VectorAnswer a = answers_.front();
  answers_.pop_front();
  return a;
}

void
VectorUnit::run_addrgen(Cycle now, SharedMmu* mmu)
{
  auto it = std::find_if(window_.begin(), window_.end(), [](const InFlight& e) {
    return e.instr.is_memory() and not e.addrgen_done;
  });
  if (it == window_.end() or not may_run(*it, now))
    return;
  InFlight& e = *it;

  if (not translate_ or mmu == nullptr)
    {
      for (Burst& u : e.units)
        u.phys = PhysicalAddress(u.start_vaddr.raw() & ((1ull << kPaBits) - 1));
      e.translated = e.units.size();
      e.addrgen_done = true;
      answer(e, now);
      return;
    }

  const AccessDescriptor acc{e.instr.mem_op()->access_kind(), AccessSource::Vector};
  while (not e.addrgen_done)
    {
      if (e.translated == e.units.size())
        {
          e.addrgen_done = true;
          answer(e, now);
          break;
        }
      if (not mmu->has_outstanding(Requester::Vector))
        mmu->submit(Requester::Vector, MmuRequest{e.units[e.translated].start_vaddr, acc, now});
      auto resp = mmu->take_response(Requester::Vector, now);
      if (not resp)
        break;
      Burst& unit = e.units[e.translated];
      if (auto* fault = std::get_if<PageFault>(&resp->outcome))
        {
          AddrGenFault f{unit.first_element, fault->cause, unit.start_vaddr};
          e.faulted = true;
          e.addrgen_done = true;
          e.limit = unit.first_element;
          ++stats_.faults;
          raise_page_fault(e.instr, f, csr_, fsm_, now);
          fault_instr_id_ = e.instr.id;
          answer(e, now, f);
          break;
        }
      unit.phys = std::get<PhysicalAddress>(resp->outcome);
      ++e.translated;
    }
}

void
VectorUnit::run_datapath(Cycle now)
{
  auto it = std::find_if(window_.begin(), window_.end(), [](const InFlight& e) {
    return e.instr.is_memory() and not(e.addrgen_done and e.transferred == e.translated);
  });
  if (it == window_.end() or not may_run(*it, now))
    return;
  InFlight& e = *it;
  const VectorMemOp& op = *e.instr.mem_op();
  const std::uint32_t allowed = allowed_progress(e);

  std::uint64_t budget = params_.mem_bw_bytes_per_cycle;
  while (budget > 0 and e.transferred < e.translated)
    {
      Burst& unit = e.units[e.transferred];
      std::uint64_t usable_elems =
          allowed > unit.first_element ? std::min<std::uint64_t>(allowed - unit.first_element,
                                                                 unit.element_count)
                                       : 0;
      std::uint64_t usable = usable_elems * op.element_width;
      if (usable <= e.bytes_into_unit)
        break;
      if (e.bytes_into_unit == 0 and op.is_store)
        {
          // Sets already flushed for this instruction are not flushed again.
          std::span<const Burst> so_far(e.units.data(), e.transferred + 1);
          Cycle total = invalidation_cost(so_far, cache_, per_set_cycles_);
          Cycle cost = total - e.invalidation_charged;
          e.invalidation_charged = total;
          stats_.invalidation_cycles += cost;
          l1_busy_until_ = std::max(l1_busy_until_, now) + cost;
        }
      std::uint64_t take = std::min(budget, usable - e.bytes_into_unit);
      e.bytes_into_unit += take;
      budget -= take;
      stats_.bytes_transferred += take;
      memory_active_ = true;
      if (e.bytes_into_unit == unit.length_bytes)
        {
          e.progress = unit.first_element + unit.element_count;
          e.bytes_into_unit = 0;
          ++e.transferred;
          if (log_accesses_)
            committed_.push_back(CommittedAccess{e.instr.id, unit.first_element,
                                                 unit.element_count, unit.start_vaddr.raw(),
                                                 unit.length_bytes, op.is_store});
        }
      else
        e.progress = unit.first_element +
                     static_cast<std::uint32_t>(e.bytes_into_unit / op.element_width);
    }
}

void
VectorUnit::run_compute(Cycle now)
{
  auto it = std::find_if(window_.begin(), window_.end(), [](const InFlight& e) {
    return not e.instr.is_memory() and e.progress < e.limit;
  });
  if (it == window_.end() or not may_run(*it, now))
    return;
  InFlight& e = *it;

  unsigned rate = 1;
  if (auto* a = std::get_if<ArithmeticOp>(&e.instr.cls))
    rate = a->elements_per_cycle_per_lane;
  const std::uint32_t per_cycle = params_.lanes * rate;
  const std::uint32_t allowed = allowed_progress(e);
  if (allowed <= e.progress)
    return;
  e.progress = std::min(allowed, e.progress + per_cycle);
  compute_active_ = true;
}

void
VectorUnit::step(Cycle now, SharedMmu* mmu)
{
  compute_active_ = false;
  memory_active_ = false;

  snapshot_.clear();
  for (const InFlight& e : window_)
    snapshot_.emplace_back(e.seq, e.progress);

  for (InFlight& e : window_)
    if (not e.activated and e.accepted_at <= now)
      {
        e.activated = true;
        auto* a = std::get_if<ArithmeticOp>(&e.instr.cls);
        if (not e.instr.is_memory() and not(a and a->scalar_result))
          answer(e, now);
      }

  run_addrgen(now, mmu);
  run_datapath(now);
  run_compute(now);

  if (compute_active_)
    ++stats_.compute_busy_cycles;
  if (memory_active_)
    ++stats_.memory_busy_cycles;

  for (InFlight& e : window_)
    {
      if (e.done or not e.activated)
        continue;
      bool finished = e.progress >= e.limit;
      if (e.instr.is_memory())
        finished = finished and e.addrgen_done and e.transferred == e.translated;
      if (not finished)
        continue;
      e.done = true;
      auto* a = std::get_if<ArithmeticOp>(&e.instr.cls);
      if (a and a->scalar_result)
        answer(e, now);
      if (not e.faulted and csr_.faulted and fault_instr_id_ == e.instr.id)
        {
          complete_resumed(csr_);
          fault_instr_id_.reset();
        }
    }

  // Retirement is at the end of the cycle.
  std::size_t before = window_.size();
  std::erase_if(window_, [](const InFlight& e) { return e.done; });
  stats_.instructions_retired += before - window_.size();
  if (fsm_.step(now, window_.empty()))
    ++stats_.flush_events;
}

}  // namespace vvmsim
