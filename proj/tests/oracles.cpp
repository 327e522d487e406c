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

#include "oracles.hpp"

#include <algorithm>

namespace oracle {

std::variant<std::uint64_t, FaultCause>
walk(const PageTable& pt, std::uint64_t va, AccessKind kind)
{
  const FaultCause fault = kind == AccessKind::Load ? FaultCause::LoadPageFault
                                                    : FaultCause::StorePageFault;
  std::uint64_t id = pt.root();
  for (int level = 2; level >= 0; --level)
    {
      const std::uint64_t index = (va >> (12 + 9 * level)) & 0x1ff;
      const PageTableEntry& e = pt.table(static_cast<PageTable::TableId>(id))[index];
      if (not e.valid)
        return fault;
      if (e.perms.writable and not e.perms.readable)
        return fault;
      const bool leaf = e.perms.readable or e.perms.executable;
      if (not leaf)
        {
          if (level == 0)
            return fault;
          id = e.ppn;
          continue;
        }
      if (level != 0)
        return fault;  // superpage
      const bool ok = kind == AccessKind::Load ? e.perms.readable : e.perms.writable;
      if (not ok)
        return fault;
      return e.ppn * 4096 + (va & 0xfff);
    }
  return fault;
}

PlruModel::PlruModel(unsigned ways) : ways_(ways), tags_(ways) {}

bool
PlruModel::contains(std::uint64_t tag) const
{
  return std::find(tags_.begin(), tags_.end(), tag) != tags_.end();
}

unsigned
PlruModel::victim() const
{
  // Halve the way range until one way is left; each range owns one bit.
  unsigned lo = 0;
  unsigned hi = ways_;
  while (hi - lo > 1)
    {
      unsigned mid = (lo + hi) / 2;
      auto it = node_.find({lo, hi});
      bool right = it != node_.end() and it->second;
      if (right)
        lo = mid;
      else
        hi = mid;
    }
  return lo;
}

void
PlruModel::point_away(unsigned way)
{
  unsigned lo = 0;
  unsigned hi = ways_;
  while (hi - lo > 1)
    {
      unsigned mid = (lo + hi) / 2;
      bool in_left = way < mid;
      node_[{lo, hi}] = in_left;
      if (in_left)
        hi = mid;
      else
        lo = mid;
    }
}

std::optional<std::uint64_t>
PlruModel::access(std::uint64_t tag)
{
  auto hit = std::find(tags_.begin(), tags_.end(), tag);
  if (hit != tags_.end())
    {
      point_away(static_cast<unsigned>(hit - tags_.begin()));
      return std::nullopt;
    }
  auto free = std::find(tags_.begin(), tags_.end(), std::nullopt);
  if (free != tags_.end())
    {
      *free = tag;
      point_away(static_cast<unsigned>(free - tags_.begin()));
      return std::nullopt;
    }
  unsigned v = victim();
  std::optional<std::uint64_t> out = tags_[v];
  tags_[v] = tag;
  point_away(v);
  return out;
}

bool
LruModel::access(std::uint64_t tag)
{
  auto it = std::find(order_.begin(), order_.end(), tag);
  bool hit = it != order_.end();
  if (hit)
    order_.erase(it);
  else if (order_.size() == ways_)
    order_.pop_back();
  order_.push_front(tag);
  return hit;
}

std::set<std::uint64_t>
touched_sets(const std::vector<Burst>& bursts, unsigned line_bytes, unsigned index_bits)
{
  std::set<std::uint64_t> sets;
  for (const Burst& b : bursts)
    for (std::uint64_t a = b.phys->raw(); a < b.phys->raw() + b.length_bytes; ++a)
      sets.insert((a / line_bytes) % (1ull << index_bits));
  return sets;
}

ElementRun
run_elements(const VectorMemOp& op, const std::set<std::uint64_t>& mapped_vpns)
{
  ElementRun out;
  for (std::uint32_t e = op.vstart; e < op.vl; ++e)
    {
      std::uint64_t va = op.element_address(e).raw();
      if (not mapped_vpns.count((va >> 12) & ((1ull << 27) - 1)))
        {
          std::uint32_t report = e;
          if (op.kind == MemOpKind::UnitStride)
            // Back up to the first element of this page still in [vstart, vl).
            while (report > op.vstart and
                   (op.element_address(report - 1).raw() >> 12) == (va >> 12))
              --report;
          out.fault_element = report;
          out.committed.erase(std::remove_if(out.committed.begin(), out.committed.end(),
                                             [&](const ElementAccess& a) {
                                               return a.element >= report;
                                             }),
                              out.committed.end());
          return out;
        }
      out.committed.push_back({e, va});
    }
  return out;
}

StreamCounts
matmul_counts(std::uint32_t n, std::uint32_t strip)
{
  StreamCounts c;
  for (std::uint32_t j = 0; j < n; j += strip)
    for (std::uint32_t i = 0; i < n; i += 4)
      {
        c.vector_arith += 4;  // zeroing
        for (std::uint32_t k = 0; k < n; ++k)
          {
            c.vector_loads += 1;
            for (unsigned r = 0; r < 4; ++r)
              {
                c.scalar_loads += 1;
                c.vector_arith += 1;
              }
          }
        c.vector_stores += 4;
      }
  return c;
}

}  // namespace oracle
