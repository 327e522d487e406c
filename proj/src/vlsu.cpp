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

#include "vvmsim/vlsu.hpp"

#include <bit>
#include <cassert>
#include <set>

namespace vvmsim {

const char*
to_string(MemOpKind kind)
{
  switch (kind)
    {
    case MemOpKind::UnitStride: return "unit-stride";
    case MemOpKind::Strided:    return "strided";
    case MemOpKind::Indexed:    return "indexed";
    }
  return "?";
}

VectorMemOp
VectorMemOp::unit_stride(VirtualAddress base, unsigned ew, std::uint32_t vl, bool is_store)
{
  VectorMemOp op;
  op.kind = MemOpKind::UnitStride;
  op.base = base;
  op.element_width = ew;
  op.vl = vl;
  op.is_store = is_store;
  return op;
}

VectorMemOp
VectorMemOp::strided(VirtualAddress base, std::int64_t stride, unsigned ew, std::uint32_t vl,
                     bool is_store)
{
  VectorMemOp op = unit_stride(base, ew, vl, is_store);
  op.kind = MemOpKind::Strided;
  op.stride = stride;
  return op;
}

VectorMemOp
VectorMemOp::indexed(VirtualAddress base, std::vector<std::uint64_t> offsets, unsigned ew,
                     bool is_store)
{
  VectorMemOp op = unit_stride(base, ew, static_cast<std::uint32_t>(offsets.size()), is_store);
  op.kind = MemOpKind::Indexed;
  op.offsets = std::move(offsets);
  return op;
}

void
VectorMemOp::validate() const
{
  if (element_width != 1 and element_width != 2 and element_width != 4 and element_width != 8)
    throw ContractViolation("element width must be 1, 2, 4 or 8 bytes");
  if (vstart > vl)
    throw ContractViolation("vstart exceeds vl");
  if (kind == MemOpKind::Indexed and offsets.size() < vl)
    throw ContractViolation("indexed op has fewer offsets than vl");
  if (kind == MemOpKind::UnitStride)
    {
      if (base.raw() % element_width)
        throw ContractViolation("misaligned unit-stride base");
      return;
    }
  for (std::uint32_t e = vstart; e < vl; ++e)
    if (element_address(e).raw() % element_width)
      throw ContractViolation("misaligned element " + std::to_string(e));
}

VirtualAddress
VectorMemOp::element_address(std::uint32_t element) const
{
  switch (kind)
    {
    case MemOpKind::UnitStride:
      return base.displaced(std::int64_t(element) * element_width);
    case MemOpKind::Strided:
      return base.displaced(std::int64_t(element) * stride);
    case MemOpKind::Indexed:
      return base.displaced(static_cast<std::int64_t>(offsets.at(element)));
    }
  return base;
}

std::vector<Burst>
split_bursts(const VectorMemOp& op)
{
  if (op.kind != MemOpKind::UnitStride)
    throw ContractViolation("split_bursts only applies to unit-stride operations");
  op.validate();

  std::vector<Burst> bursts;
  std::uint32_t element = op.vstart;
  while (element < op.vl)
    {
      VirtualAddress start = op.element_address(element);
      std::uint64_t room = kPageSize - start.offset();
      // Naturally aligned power-of-two elements never straddle a page.
      assert(room % op.element_width == 0);
      std::uint64_t fit = room / op.element_width;
      auto count = static_cast<std::uint32_t>(std::min<std::uint64_t>(fit, op.vl - element));
      bursts.push_back(Burst{start, std::uint64_t(count) * op.element_width, element, count, {}});
      element += count;
    }
  return bursts;
}

std::vector<Burst>
translation_units(const VectorMemOp& op)
{
  if (op.kind == MemOpKind::UnitStride)
    return split_bursts(op);
  op.validate();
  std::vector<Burst> units;
  units.reserve(op.vl - op.vstart);
  for (std::uint32_t e = op.vstart; e < op.vl; ++e)
    units.push_back(Burst{op.element_address(e), op.element_width, e, 1, {}});
  return units;
}

AddrGenOutcome
generate(const VectorMemOp& op, const TranslateFn& translate)
{
  AddrGenOutcome out;
  const AccessDescriptor acc{op.access_kind(), AccessSource::Vector};
  for (Burst& unit : translation_units(op))
    {
      ++out.translations_issued;
      MmuOutcome result = translate(unit.start_vaddr, acc);
      if (auto* fault = std::get_if<PageFault>(&result))
        {
          out.fault = AddrGenFault{unit.first_element, fault->cause, unit.start_vaddr};
          break;
        }
      unit.phys = std::get<PhysicalAddress>(result);
      out.bursts.push_back(unit);
    }
  return out;
}

void
CacheGeometry::validate() const
{
  if (index_bits > 12)
    throw ConfigError("invalidation filter needs index_bits <= 12, got " +
                      std::to_string(index_bits));
  if (sets != (1u << index_bits))
    throw ConfigError("cache sets (" + std::to_string(sets) + ") must equal 2^index_bits");
  if (line_bytes == 0 or not std::has_single_bit(line_bytes))
    throw ConfigError("cache line size must be a power of two");
}

Cycle
invalidation_cost(std::span<const Burst> store_bursts, const CacheGeometry& geom,
                  unsigned per_set_cycles)
{
  geom.validate();
  const unsigned line_shift = std::countr_zero(geom.line_bytes);
  const std::uint64_t index_mask = (1ull << geom.index_bits) - 1;

  std::set<std::uint64_t> touched;
  for (const Burst& b : store_bursts)
    {
      if (not b.phys)
        throw ContractViolation("invalidation cost needs translated bursts");
      if (b.length_bytes == 0)
        continue;
      std::uint64_t first_line = b.phys->raw() >> line_shift;
      std::uint64_t last_line = (b.phys->raw() + b.length_bytes - 1) >> line_shift;
      for (std::uint64_t line = first_line; line <= last_line; ++line)
        touched.insert(line & index_mask);
    }
  return Cycle(per_set_cycles) * touched.size();
}

}  // namespace vvmsim
