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
#include <deque>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "vvmsim/mmu.hpp"
#include "vvmsim/vlsu.hpp"

namespace vvmsim {

struct CoreTimingParams
{
  unsigned lanes = 2;
  unsigned vlen_bits = 2048;
  unsigned mem_bw_bytes_per_cycle = 8;
  unsigned flush_cycles = 10;
  unsigned dispatch_cycles = 4;
  unsigned window_depth = 8;
  unsigned fp_rate_per_lane = 1;  ///< fp64 MACs per lane per cycle
  bool chaining = true;
  bool overlap = true;
  unsigned max_fault_retries = 4;

  void validate() const;

  /// Elements of width `ew` bytes that fit in a register group of `lmul`.
  unsigned max_vl(unsigned ew, unsigned lmul = 1) const { return lmul * vlen_bits / (8 * ew); }
};

inline constexpr unsigned kVectorRegisters = 32;

struct ArithmeticOp
{
  unsigned elements_per_cycle_per_lane = 1;
  /// Result goes back to the scalar core (reductions, vfmv.f.s), so the
  /// answer is only sent once the instruction completes.
  bool scalar_result = false;
};

struct MemoryOp
{
  VectorMemOp op;
};

struct PermutationOp
{
};

using InstrClass = std::variant<ArithmeticOp, MemoryOp, PermutationOp>;

struct VectorInstruction
{
  std::uint64_t id = 0;
  InstrClass cls;
  std::uint32_t vl = 0;
  std::vector<std::uint8_t> sources;
  std::optional<std::uint8_t> dest;

  static VectorInstruction arithmetic(std::uint64_t id, std::uint32_t vl,
                                      std::vector<std::uint8_t> sources,
                                      std::optional<std::uint8_t> dest, unsigned rate = 1,
                                      bool scalar_result = false);
  static VectorInstruction memory(std::uint64_t id, VectorMemOp op,
                                  std::vector<std::uint8_t> sources,
                                  std::optional<std::uint8_t> dest);

  const VectorMemOp* mem_op() const;
  VectorMemOp* mem_op();
  bool is_memory() const { return mem_op() != nullptr; }
  std::uint32_t vstart() const;
};

struct VectorCsrState
{
  std::uint32_t vstart = 0;
  std::uint32_t vl = 0;
  bool faulted = false;
};

enum class FlushPhase : std::uint8_t { Idle, DrainPreceding, Flushing, AckFrontend };

const char* to_string(FlushPhase phase);

/// Post-fault procedure: hold the frontend until everything older than the
/// faulting element has committed, flush the backend for `flush_cycles`,
/// then acknowledge the frontend.
class FlushFsm
{
public:
  explicit FlushFsm(unsigned flush_cycles = 10) : flush_cycles_(flush_cycles) {}

  void fault(Cycle now);

  /// Advance; `preceding_committed` tells whether the drain has finished.
  /// Returns true on the cycle the flush starts.
  bool step(Cycle now, bool preceding_committed);

  FlushPhase phase(Cycle now) const;
  bool idle(Cycle now) const { return phase(now) == FlushPhase::Idle; }

  /// First cycle with the frontend released, once known.
  std::optional<Cycle> idle_at() const;

private:
  unsigned flush_cycles_;
  bool draining_ = false;
  std::optional<Cycle> flush_start_;
};

struct ExceptionReport
{
  std::uint64_t instr_id = 0;
  std::uint32_t element_index = 0;
  FaultCause cause = FaultCause::LoadPageFault;
  VirtualAddress vaddr;
};

/// Records the fault in vstart and starts the flush procedure.
ExceptionReport raise_page_fault(const VectorInstruction& instr, const AddrGenFault& fault,
                                 VectorCsrState& csr, FlushFsm& fsm, Cycle now);

/// The instruction to re-dispatch after the handler ran: same instruction
/// starting at csr.vstart. Throws ContractViolation if nothing faulted.
VectorInstruction resume(const VectorInstruction& instr, const VectorCsrState& csr);

/// Clears the trap state once a resumed instruction completes.
void complete_resumed(VectorCsrState& csr);

/// Livelock detector: the same instruction faulting again at the same
/// element without any mapping change in between.
class ResumeGuard
{
public:
  explicit ResumeGuard(unsigned max_retries) : max_retries_(max_retries) {}

  /// Throws SimulationAbort once the retry bound is exceeded.
  void on_fault(std::uint64_t instr_id, std::uint32_t element);
  void on_mapping_change() { ++epoch_; }

private:
  unsigned max_retries_;
  std::uint64_t epoch_ = 0;
  std::uint64_t last_id_ = ~0ull;
  std::uint32_t last_element_ = 0;
  std::uint64_t last_epoch_ = 0;
  unsigned retries_ = 0;
};

/// Accepted cycle of an instruction reaching the vector frontend at
/// `arrival`: the interface round trip, held back while a flush is active.
Cycle dispatch_accept_cycle(Cycle arrival, const FlushFsm& fsm, const CoreTimingParams& p);

Cycle arithmetic_cycles(std::uint32_t elements, unsigned rate, const CoreTimingParams& p);
Cycle transfer_cycles(std::uint64_t bytes, const CoreTimingParams& p);

// Closed-form window model -------------------------------------------------

struct TimedBurst
{
  std::uint64_t bytes = 0;
  Cycle translated_at = 0;
};

struct WindowEntry
{
  enum class Kind : std::uint8_t { Compute, Memory };
  Kind kind = Kind::Compute;
  Cycle ready_at = 0;
  Cycle compute_cycles = 0;
  std::vector<TimedBurst> bursts;
  std::vector<std::size_t> deps;  ///< indices of older entries
};

struct Occupancy
{
  Cycle start = 0;
  Cycle end = 0;

  bool operator==(const Occupancy&) const = default;
};

/// Occupancy of each entry when compute and memory streams run in
/// parallel, each in order. A chained dependency lets the consumer start
/// one cycle after its producer starts and end no earlier than one cycle
/// after it ends; without chaining (or with overlap disabled) it waits for
/// the producer to finish.
std::vector<Occupancy> instruction_cycles(std::span<const WindowEntry> window,
                                          const CoreTimingParams& p);

Cycle window_end(std::span<const Occupancy> occ);

// Cycle-level vector unit -------------------------------------------------

struct VectorAnswer
{
  std::uint64_t seq = 0;
  std::uint64_t instr_id = 0;
  Cycle at = 0;
  std::optional<AddrGenFault> fault;
};

struct CommittedAccess
{
  std::uint64_t instr_id = 0;
  std::uint32_t first_element = 0;
  std::uint32_t element_count = 0;
  std::uint64_t vaddr = 0;
  std::uint64_t bytes = 0;
  bool is_store = false;
};

struct VectorUnitStats
{
  Cycle compute_busy_cycles = 0;
  Cycle memory_busy_cycles = 0;
  Cycle invalidation_cycles = 0;
  std::uint64_t flush_events = 0;
  std::uint64_t faults = 0;
  std::uint64_t bytes_transferred = 0;
  std::uint64_t instructions_retired = 0;
};

/// Decoupled vector unit: in-order dispatch window, address generator,
/// one memory data path and one arithmetic pipeline. Progress is tracked per
/// element so chained instructions overlap.
class VectorUnit
{
public:
  VectorUnit(CoreTimingParams params, CacheGeometry cache, unsigned per_set_cycles,
             bool translate, bool log_accesses = false);

  bool can_dispatch(Cycle now) const;

  /// Returns the accepted cycle. Throws ContractViolation if the window is
  /// full or the frontend is stalled.
  Cycle dispatch(VectorInstruction instr, Cycle now);

  /// `mmu` may be null when the unit does not translate.
  void step(Cycle now, SharedMmu* mmu);

  std::optional<VectorAnswer> take_answer();

  bool empty() const { return window_.empty(); }
  std::size_t in_flight() const { return window_.size(); }
  bool busy_this_cycle() const { return compute_active_ or memory_active_; }
  bool compute_active() const { return compute_active_; }
  bool memory_active() const { return memory_active_; }
  Cycle l1_busy_until() const { return l1_busy_until_; }

  VectorCsrState& csr() { return csr_; }
  const VectorCsrState& csr() const { return csr_; }
  const FlushFsm& flush() const { return fsm_; }
  const VectorUnitStats& stats() const { return stats_; }
  const std::vector<CommittedAccess>& committed() const { return committed_; }

private:
  struct InFlight
  {
    std::uint64_t seq = 0;
    VectorInstruction instr;
    Cycle accepted_at = 0;
    std::vector<std::uint64_t> deps;
    std::uint32_t progress = 0;
    std::uint32_t limit = 0;
    bool activated = false;
    bool done = false;
    // memory only
    std::vector<Burst> units;
    std::size_t translated = 0;
    std::size_t transferred = 0;
    std::uint64_t bytes_into_unit = 0;
    bool addrgen_done = false;
    bool faulted = false;
    Cycle invalidation_charged = 0;
  };

  InFlight* find(std::uint64_t seq);
  std::uint32_t allowed_progress(const InFlight& e) const;
  bool may_run(const InFlight& e, Cycle now) const;
  void run_addrgen(Cycle now, SharedMmu* mmu);
  void run_datapath(Cycle now);
  void run_compute(Cycle now);
  void answer(const InFlight& e, Cycle now, std::optional<AddrGenFault> fault = std::nullopt);

  CoreTimingParams params_;
  CacheGeometry cache_;
  unsigned per_set_cycles_;
  bool translate_;
  bool log_accesses_;

  std::deque<InFlight> window_;
  std::vector<std::pair<std::uint64_t, std::uint32_t>> snapshot_;
  std::array<std::optional<std::uint64_t>, kVectorRegisters> last_writer_;
  std::array<std::vector<std::uint64_t>, kVectorRegisters> readers_;
  std::uint64_t next_seq_ = 0;
  std::deque<VectorAnswer> answers_;
  FlushFsm fsm_;
  VectorCsrState csr_;
  std::optional<std::uint64_t> fault_instr_id_;
  Cycle l1_busy_until_ = 0;
  bool compute_active_ = false;
  bool memory_active_ = false;
  VectorUnitStats stats_;
  std::vector<CommittedAccess> committed_;
};

}  // namespace vvmsim
