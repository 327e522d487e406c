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
#include <optional>
#include <span>
#include <vector>

#include "vvmsim/addressing.hpp"
#include "vvmsim/mmu.hpp"

namespace vvmsim {

enum class MemOpKind : std::uint8_t { UnitStride, Strided, Indexed };

const char* to_string(MemOpKind kind);

/// Vector load/store descriptor. Element e lives at
///   unit-stride: base + e * element_width
///   strided:     base + e * stride
///   indexed:     base + offsets[e]
struct VectorMemOp
{
  MemOpKind kind = MemOpKind::UnitStride;
  std::int64_t stride = 0;
  std::vector<std::uint64_t> offsets;
  VirtualAddress base;
  unsigned element_width = 8;
  std::uint32_t vl = 0;
  std::uint32_t vstart = 0;
  bool is_store = false;

  static VectorMemOp unit_stride(VirtualAddress base, unsigned ew, std::uint32_t vl,
                                 bool is_store = false);
  static VectorMemOp strided(VirtualAddress base, std::int64_t stride, unsigned ew,
                             std::uint32_t vl, bool is_store = false);
  static VectorMemOp indexed(VirtualAddress base, std::vector<std::uint64_t> offsets, unsigned ew,
                             bool is_store = false);

  /// Throws ContractViolation on a bad width, vstart > vl, a short offset
  /// list or a misaligned element.
  void validate() const;

  VirtualAddress element_address(std::uint32_t element) const;
  AccessKind access_kind() const { return is_store ? AccessKind::Store : AccessKind::Load; }
  std::uint64_t bytes() const { return std::uint64_t(vl - vstart) * element_width; }
};

/// Contiguous transaction confined to one 4-KiB page. `phys` is filled in
/// once the burst has been translated.
struct Burst
{
  VirtualAddress start_vaddr;
  std::uint64_t length_bytes = 0;
  std::uint32_t first_element = 0;
  std::uint32_t element_count = 0;
  std::optional<PhysicalAddress> phys;

  VirtualAddress last_vaddr() const { return start_vaddr.displaced(std::int64_t(length_bytes) - 1); }
  bool operator==(const Burst&) const = default;
};

/// Page-bounded decomposition of elements [vstart, vl) of a unit-stride op.
/// Throws ContractViolation for other kinds.
std::vector<Burst> split_bursts(const VectorMemOp& op);

/// The units the address generator translates one by one: page-bounded
/// bursts for unit-stride, single elements for strided and indexed.
std::vector<Burst> translation_units(const VectorMemOp& op);

struct AddrGenFault
{
  std::uint32_t element_index = 0;
  FaultCause cause = FaultCause::LoadPageFault;
  VirtualAddress vaddr;

  bool operator==(const AddrGenFault&) const = default;
};

struct AddrGenOutcome
{
  std::vector<Burst> bursts;
  std::uint32_t translations_issued = 0;
  std::optional<AddrGenFault> fault;
};

using TranslateFn = std::function<MmuOutcome(VirtualAddress, AccessDescriptor)>;

/// Runs the address generator to completion: one translation per unit, in
/// element order from vstart, stopping at the first fault.
AddrGenOutcome generate(const VectorMemOp& op, const TranslateFn& translate);

struct CacheGeometry
{
  unsigned sets = 2048;
  unsigned index_bits = 11;
  unsigned line_bytes = 16;

  /// index_bits above 12 would put translated bits in the index.
  void validate() const;
};

/// Cycles the L1 invalidation filter spends flushing the distinct sets hit
/// by translated store bursts.
Cycle invalidation_cost(std::span<const Burst> store_bursts, const CacheGeometry& geom,
                        unsigned per_set_cycles);

}  // namespace vvmsim
