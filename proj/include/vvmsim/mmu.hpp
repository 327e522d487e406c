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

#include <array>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <variant>
#include <vector>

#include "vvmsim/addressing.hpp"
#include "vvmsim/tlb.hpp"

namespace vvmsim {

struct SatpState
{
  bool enabled = false;
  const PageTable* root = nullptr;
};

/// Throws ConfigError when enabling translation without a page table.
/// Every satp write invalidates the whole TLB (no ASIDs).
SatpState set_satp(bool enabled, const PageTable* root, Tlb& tlb);

struct MmuRequest
{
  VirtualAddress vaddr;
  AccessDescriptor access;
  Cycle issue_cycle = 0;
};

struct MmuLatencyParams
{
  unsigned tlb_hit_cycles = 1;
  unsigned ptw_mem_access_cycles = 20;
  unsigned levels = kPageTableLevels;

  void validate() const;
};

using MmuOutcome = std::variant<PhysicalAddress, PageFault>;

struct MmuResponse
{
  MmuOutcome outcome;
  Cycle service_cycles = 0;  ///< lookup + ptw + wait
  bool tlb_hit = false;
  Cycle ptw_cycles = 0;
  Cycle wait_cycles = 0;

  bool faulted() const { return std::holds_alternative<PageFault>(outcome); }
};

/// One translation against the TLB and page table, without arbitration
/// (wait_cycles is always zero). Successful walks refill the TLB; faults
/// never do.
MmuResponse translate(const SatpState& satp, Tlb& tlb, const MmuRequest& req,
                      const MmuLatencyParams& lat);

enum class Requester : std::uint8_t { Scalar = 0, Vector = 1 };

const char* to_string(Requester r);

enum class ArbiterPriority : std::uint8_t { ScalarFirst, VectorFirst };

struct ArbiterState
{
  Cycle busy_until = 0;
  std::optional<Requester> owner;
};

/// Which pending requester, if any, gets the MMU at `now`. The MMU is never
/// preempted: nothing is granted while it is busy.
std::optional<Requester> arbitrate(const std::optional<MmuRequest>& pending_scalar,
                                   const std::optional<MmuRequest>& pending_vector,
                                   const ArbiterState& state, Cycle now,
                                   ArbiterPriority priority = ArbiterPriority::ScalarFirst);

struct MmuLogEntry
{
  Requester source;
  std::uint64_t vaddr;
  AccessKind kind;
  Cycle issue;
  Cycle grant;
  Cycle ready;
  bool tlb_hit;
  bool fault;
};

struct RequesterStats
{
  std::uint64_t requests = 0;
  std::uint64_t tlb_hits = 0;
  std::uint64_t tlb_misses = 0;
  std::uint64_t faults = 0;
  Cycle service_cycles = 0;  ///< lookup + ptw, excluding waits
  Cycle ptw_cycles = 0;
  Cycle wait_cycles = 0;
};

/// The MMU shared by the scalar core and the vector unit: satp, TLB,
/// latency model and the non-preemptive arbiter. At most one request per
/// requester may be outstanding. Grants happen inside submit() and
/// service(), so the caller's per-cycle call order defines same-cycle
/// priority; when two requests are already waiting, `priority` decides.
class SharedMmu
{
public:
  SharedMmu(TlbConfig tlb, MmuLatencyParams lat,
            ArbiterPriority priority = ArbiterPriority::ScalarFirst, bool keep_log = false);

  void set_satp(bool enabled, const PageTable* root);
  const SatpState& satp() const { return satp_; }

  /// Throws ContractViolation if the requester already has a request in
  /// flight.
  void submit(Requester who, const MmuRequest& req);

  /// Grants waiting requests if the MMU is free at `now`.
  void service(Cycle now);

  /// Response for `who` once it is ready at or before `now`.
  std::optional<MmuResponse> take_response(Requester who, Cycle now);

  /// Drops the requester's outstanding request. A request already being
  /// serviced keeps the MMU busy but its response is discarded.
  void cancel(Requester who);

  bool has_outstanding(Requester who) const;
  bool in_service(Requester who, Cycle now) const;
  bool waiting(Requester who) const;
  bool idle(Cycle now) const;

  /// Invalidates the TLB on behalf of an OS tick; misses on pages dropped
  /// here are later charged as tick pollution.
  void flush_for_tick();

  Tlb& tlb() { return tlb_; }
  const Tlb& tlb() const { return tlb_; }
  const RequesterStats& stats(Requester who) const { return stats_[idx(who)]; }
  Cycle tick_pollution_cycles() const { return tick_pollution_cycles_; }
  const std::vector<MmuLogEntry>& log() const { return log_; }
  const ArbiterState& arbiter() const { return arbiter_; }

private:
  struct Slot
  {
    std::optional<MmuRequest> pending;
    std::optional<MmuResponse> response;
    Cycle grant_cycle = 0;
    Cycle ready = 0;
    bool granted = false;
    bool discard = false;
  };

  static constexpr std::size_t idx(Requester r) { return static_cast<std::size_t>(r); }
  void grant(Requester who, Cycle now);

  SatpState satp_;
  Tlb tlb_;
  MmuLatencyParams lat_;
  ArbiterPriority priority_;
  bool keep_log_;
  ArbiterState arbiter_;
  std::array<Slot, 2> slots_;
  std::array<RequesterStats, 2> stats_;
  std::unordered_set<std::uint64_t> tick_flushed_;
  Cycle tick_pollution_cycles_ = 0;
  std::vector<MmuLogEntry> log_;
};

}  // namespace vvmsim
