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

#include "vvmsim/mmu.hpp"

namespace vvmsim {

namespace {

bool
permits(const Permissions& p, AccessKind kind)
{
  return kind == AccessKind::Load ? p.readable : p.writable;
}

constexpr std::uint64_t kPaMask = (1ull << kPaBits) - 1;

}  // namespace

SatpState
set_satp(bool enabled, const PageTable* root, Tlb& tlb)
{
  if (enabled and root == nullptr)
    throw ConfigError("satp enabled with a dangling page-table root");
  tlb.invalidate_all();
  return SatpState{enabled, root};
}

void
MmuLatencyParams::validate() const
{
  if (levels != kPageTableLevels)
    throw ConfigError("only three-level Sv39 walks are modeled, got levels=" +
                      std::to_string(levels));
}

MmuResponse
translate(const SatpState& satp, Tlb& tlb, const MmuRequest& req, const MmuLatencyParams& lat)
{
  MmuResponse resp{PhysicalAddress(req.vaddr.raw() & kPaMask)};
  if (not satp.enabled)
    return resp;
  if (satp.root == nullptr)
    throw ContractViolation("translate with a dangling satp root");

  const AccessKind kind = req.access.kind;
  resp.service_cycles = lat.tlb_hit_cycles;

  if (auto hit = tlb.lookup(req.vaddr.vpn()))
    {
      resp.tlb_hit = true;
      if (permits(hit->perms, kind))
        resp.outcome = PhysicalAddress((hit->ppn << kPageShift) | req.vaddr.offset());
      else
        resp.outcome = PageFault{fault_cause_for(kind), req.vaddr, 0};
      return resp;
    }

  TranslationOutcome walked = satp.root->walk(req.vaddr, req.access);
  if (auto* t = std::get_if<Translation>(&walked))
    {
      resp.ptw_cycles = Cycle(lat.levels) * lat.ptw_mem_access_cycles;
      tlb.insert(TlbEntry{req.vaddr.vpn(), t->leaf.ppn, t->leaf.perms, true});
      resp.outcome = t->pa;
    }
  else
    {
      const auto& fault = std::get<PageFault>(walked);
      resp.ptw_cycles = Cycle(fault.levels_visited) * lat.ptw_mem_access_cycles;
      resp.outcome = fault;
    }
  resp.service_cycles += resp.ptw_cycles;
  return resp;
}

const char*
to_string(Requester r)
{
  return r == Requester::Scalar ? "scalar" : "vector";
}

std::optional<Requester>
arbitrate(const std::optional<MmuRequest>& pending_scalar,
          const std::optional<MmuRequest>& pending_vector, const ArbiterState& state, Cycle now,
          ArbiterPriority priority)
{
  if (now < state.busy_until)
    return std::nullopt;
  bool scalar = pending_scalar and pending_scalar->issue_cycle <= now;
  bool vector = pending_vector and pending_vector->issue_cycle <= now;
  if (scalar and vector)
    return priority == ArbiterPriority::ScalarFirst ? Requester::Scalar : Requester::Vector;
  if (scalar)
    return Requester::Scalar;
  if (vector)
    return Requester::Vector;
  return std::nullopt;
}

SharedMmu::SharedMmu(TlbConfig tlb, MmuLatencyParams lat, ArbiterPriority priority,
                     bool keep_log)
  : tlb_(tlb), lat_(lat), priority_(priority), keep_log_(keep_log)
{
  lat_.validate();
}

void
SharedMmu::set_satp(bool enabled, const PageTable* root)
{
  satp_ = vvmsim::set_satp(enabled, root, tlb_);
  tick_flushed_.clear();
}

void
SharedMmu::submit(Requester who, const MmuRequest& req)
{
  Slot& slot = slots_[idx(who)];
  if (slot.pending)
    throw ContractViolation(std::string(to_string(who)) + " already has an MMU request in flight");
  ++stats_[idx(who)].requests;

  if (not satp_.enabled)
    {
      // Bare translation never touches the TLB or the arbiter.
      slot.pending = req;
      slot.granted = true;
      slot.grant_cycle = req.issue_cycle;
      slot.ready = req.issue_cycle;
      slot.response = translate(satp_, tlb_, req, lat_);
      if (keep_log_)
        log_.push_back({who, req.vaddr.raw(), req.access.kind, req.issue_cycle, req.issue_cycle,
                        req.issue_cycle, false, false});
      return;
    }
  slot.pending = req;
  service(req.issue_cycle);
}

void
SharedMmu::grant(Requester who, Cycle now)
{
  Slot& slot = slots_[idx(who)];
  RequesterStats& st = stats_[idx(who)];
  const MmuRequest& req = *slot.pending;

  MmuResponse resp = translate(satp_, tlb_, req, lat_);
  resp.wait_cycles = now - req.issue_cycle;
  Cycle busy = resp.service_cycles;
  resp.service_cycles += resp.wait_cycles;

  if (resp.tlb_hit)
    ++st.tlb_hits;
  else
    {
      ++st.tlb_misses;
      if (tick_flushed_.erase(req.vaddr.vpn()))
        tick_pollution_cycles_ += busy;
    }
  if (resp.faulted())
    ++st.faults;
  st.service_cycles += busy;
  st.ptw_cycles += resp.ptw_cycles;
  st.wait_cycles += resp.wait_cycles;

  slot.granted = true;
  slot.grant_cycle = now;
  slot.ready = now + busy;
  if (keep_log_)
    log_.push_back({who, req.vaddr.raw(), req.access.kind, req.issue_cycle, now, slot.ready,
                    resp.tlb_hit, resp.faulted()});
  slot.response = std::move(resp);
  arbiter_.busy_until = slot.ready;
  arbiter_.owner = who;
}

void
SharedMmu::service(Cycle now)
{
  for (Slot& slot : slots_)
    if (slot.discard and slot.ready <= now)
      slot = Slot{};

  while (true)
    {
      auto waiting_req = [&](Requester r) -> std::optional<MmuRequest> {
        const Slot& s = slots_[idx(r)];
        if (s.pending and not s.granted)
          return s.pending;
        return std::nullopt;
      };
      auto who = arbitrate(waiting_req(Requester::Scalar), waiting_req(Requester::Vector),
                           arbiter_, now, priority_);
      if (not who)
        break;
      grant(*who, now);
    }
}

std::optional<MmuResponse>
SharedMmu::take_response(Requester who, Cycle now)
{
  Slot& slot = slots_[idx(who)];
  if (not slot.granted or slot.discard or slot.ready > now)
    return std::nullopt;
  std::optional<MmuResponse> out = std::move(slot.response);
  slot = Slot{};
  return out;
}

void
SharedMmu::cancel(Requester who)
{
  Slot& slot = slots_[idx(who)];
  if (not slot.pending)
    return;
  if (slot.granted and satp_.enabled)
    slot.discard = true;
  else
    slot = Slot{};
}

bool
SharedMmu::has_outstanding(Requester who) const
{
  return slots_[idx(who)].pending.has_value();
}

bool
SharedMmu::in_service(Requester who, Cycle now) const
{
  const Slot& s = slots_[idx(who)];
  return s.granted and s.grant_cycle <= now and now < s.ready;
}

bool
SharedMmu::waiting(Requester who) const
{
  const Slot& s = slots_[idx(who)];
  return s.pending and not s.granted;
}

bool
SharedMmu::idle(Cycle now) const
{
  for (const Slot& s : slots_)
    if (s.pending)
      return false;
  return arbiter_.busy_until <= now;
}

void
SharedMmu::flush_for_tick()
{
  for (const TlbEntry& e : tlb_.entries())
    if (e.valid)
      tick_flushed_.insert(e.vpn);
  tlb_.invalidate_all();
}

}  // namespace vvmsim
