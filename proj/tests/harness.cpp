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

#include "harness.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <set>

#include "oracles.hpp"

namespace harness {

DriveResult
drive(VectorUnit& vu, SharedMmu* mmu, Cycle start, Cycle limit)
{
  DriveResult out;
  Cycle now = start;
  for (; not vu.empty(); ++now)
    {
      if (now >= limit)
        throw SimulationAbort("vector unit did not drain");
      if (mmu)
        mmu->service(now);
      bool stalled = mmu and mmu->has_outstanding(Requester::Vector);
      vu.step(now, mmu);
      if (stalled)
        {
          ++out.stall_cycles;
          if (vu.busy_this_cycle())
            ++out.hidden_cycles;
        }
      while (auto a = vu.take_answer())
        out.answers.push_back(*a);
    }
  out.end = now;
  return out;
}

std::vector<VectorInstruction>
random_window(std::mt19937_64& rng, unsigned max_len, std::uint64_t base, bool independent)
{
  std::vector<VectorInstruction> w;
  unsigned len = 1 + rng() % max_len;
  std::uint8_t fresh = 0;
  auto src = [&] {
    return static_cast<std::uint8_t>(independent ? 24 + rng() % 8 : rng() % 6);
  };
  auto dst = [&] { return static_cast<std::uint8_t>(independent ? fresh++ : rng() % 6); };
  for (unsigned i = 0; i < len; ++i)
    {
      std::uint32_t vl = 1 + rng() % 256;
      switch (rng() % 3)
        {
        case 0:
          w.push_back(VectorInstruction::arithmetic(i, vl, {src(), src()}, dst()));
          break;
        case 1:
          {
            auto op = VectorMemOp::unit_stride(VirtualAddress(base + (rng() % 6144) * 8), 8, vl);
            w.push_back(VectorInstruction::memory(i, op, {}, dst()));
            break;
          }
        default:
          {
            auto op =
                VectorMemOp::unit_stride(VirtualAddress(base + (rng() % 6144) * 8), 8, vl, true);
            w.push_back(VectorInstruction::memory(i, op, {src()}, std::nullopt));
          }
        }
    }
  return w;
}

std::vector<WindowEntry>
describe(const std::vector<VectorInstruction>& window, Cycle arrival, const CoreTimingParams& p)
{
  std::vector<WindowEntry> out;
  std::array<std::optional<std::size_t>, kVectorRegisters> writer;
  std::array<std::vector<std::size_t>, kVectorRegisters> readers;
  const Cycle ready = arrival + p.dispatch_cycles;
  Cycle addrgen = ready;

  for (std::size_t i = 0; i < window.size(); ++i)
    {
      const VectorInstruction& in = window[i];
      WindowEntry e;
      e.ready_at = ready;
      auto dep = [&e](std::size_t d) {
        if (std::find(e.deps.begin(), e.deps.end(), d) == e.deps.end())
          e.deps.push_back(d);
      };
      for (auto s : in.sources)
        if (writer[s])
          dep(*writer[s]);
      if (in.dest)
        {
          if (writer[*in.dest])
            dep(*writer[*in.dest]);
          for (auto r : readers[*in.dest])
            dep(r);
        }
      for (auto s : in.sources)
        readers[s].push_back(i);
      if (in.dest)
        {
          writer[*in.dest] = i;
          readers[*in.dest].clear();
        }

      if (const VectorMemOp* op = in.mem_op())
        {
          e.kind = WindowEntry::Kind::Memory;
          for (const Burst& b : split_bursts(*op))
            e.bursts.push_back(TimedBurst{b.length_bytes, addrgen});
          ++addrgen;
        }
      else
        {
          e.kind = WindowEntry::Kind::Compute;
          e.compute_cycles = arithmetic_cycles(in.vl, 1, p);
        }
      out.push_back(std::move(e));
    }
  return out;
}

}  // namespace harness

namespace harness {

namespace {

constexpr std::uint64_t kArea = 0x4000'0000;
constexpr unsigned kAreaPages = 24;

bool
same_outcome(const MmuOutcome& got, const std::variant<std::uint64_t, FaultCause>& want)
{
  if (auto* pa = std::get_if<PhysicalAddress>(&got))
    return std::holds_alternative<std::uint64_t>(want) and pa->raw() == std::get<std::uint64_t>(want);
  return std::holds_alternative<FaultCause>(want) and
         std::get<PageFault>(got).cause == std::get<FaultCause>(want);
}

VectorMemOp
random_op(std::mt19937_64& rng, std::uint64_t base)
{
  static constexpr unsigned kWidths[] = {1, 2, 4, 8};
  unsigned ew = kWidths[rng() % 4];
  std::uint32_t vl = 1 + rng() % 1024;
  std::uint64_t start = base + (rng() % (kAreaPages * 2048)) / ew * ew;
  VectorMemOp op;
  switch (rng() % 4)
    {
    case 0:
    case 1:
      op = VectorMemOp::unit_stride(VirtualAddress(start), ew, vl);
      break;
    case 2:
      {
        std::uint32_t n = vl % 64 + 1;
        std::int64_t stride = std::int64_t(ew) * (1 + std::int64_t(rng() % 64));
        if (rng() % 2)
          {
            start += std::uint64_t(stride) * (n - 1);
            stride = -stride;
          }
        op = VectorMemOp::strided(VirtualAddress(start), stride, ew, n);
        break;
      }
    default:
      {
        std::vector<std::uint64_t> offs(vl % 64 + 1);
        for (auto& o : offs)
          o = (rng() % (kAreaPages * 4096 / 2)) / ew * ew;
        op = VectorMemOp::indexed(VirtualAddress(base), std::move(offs), ew);
      }
    }
  op.is_store = rng() % 2;
  if (rng() % 4 == 0)
    op.vstart = rng() % (op.vl + 1);
  return op;
}

std::uint64_t
vpn_of(std::uint64_t va)
{
  return (va >> 12) & ((1ull << 27) - 1);
}

}  // namespace

std::uint64_t
translation_mismatches(std::uint64_t seed, unsigned cases, unsigned tlb_entries)
{
  std::mt19937_64 rng(seed);
  std::uint64_t bad = 0;
  const MmuLatencyParams lat;
  unsigned done = 0;
  while (done < cases)
    {
      PageTable pt;
      for (unsigned i = 0; i < kAreaPages; ++i)
        {
          if (rng() % 3 == 0)
            continue;
          Permissions p = rng() % 4 ? Permissions::read_write() : Permissions::read_only();
          pt.map_page(VirtualAddress(kArea + i * kPageSize),
                      PhysicalAddress((0x80000 + (rng() % 0x100000)) << 12), p);
        }
      Tlb tlb(TlbConfig{tlb_entries});
      SatpState satp = set_satp(true, &pt, tlb);
      for (unsigned probe = 0; probe < 50 and done < cases; ++probe, ++done)
        {
          std::uint64_t va = kArea + rng() % (kAreaPages * kPageSize);
          AccessKind kind = rng() % 2 ? AccessKind::Store : AccessKind::Load;
          AccessSource src = rng() % 2 ? AccessSource::Vector : AccessSource::Scalar;
          auto got = translate(satp, tlb, MmuRequest{VirtualAddress(va), {kind, src}, 0}, lat);
          bad += not same_outcome(got.outcome, oracle::walk(pt, va, kind));
        }
    }
  return bad;
}

std::uint64_t
burst_violations(std::uint64_t seed, unsigned cases)
{
  std::mt19937_64 rng(seed);
  std::uint64_t bad = 0;
  for (unsigned c = 0; c < cases; ++c)
    {
      VectorMemOp op = random_op(rng, kArea);
      bool ok = true;
      std::vector<Burst> units = translation_units(op);
      std::multiset<std::uint64_t> bytes;
      for (const Burst& b : units)
        {
          ok = ok and b.length_bytes > 0 and b.start_vaddr.vpn() == b.last_vaddr().vpn();
          for (std::uint64_t a = 0; a < b.length_bytes; ++a)
            bytes.insert(b.start_vaddr.raw() + a);
        }
      std::multiset<std::uint64_t> want;
      std::set<std::uint64_t> pages;
      for (std::uint32_t e = op.vstart; e < op.vl; ++e)
        for (unsigned a = 0; a < op.element_width; ++a)
          {
            want.insert(op.element_address(e).raw() + a);
            pages.insert(vpn_of(op.element_address(e).raw() + a));
          }
      ok = ok and bytes == want;
      if (op.kind == MemOpKind::UnitStride)
        ok = ok and units.size() == pages.size();
      else
        ok = ok and units.size() == op.vl - op.vstart;
      bad += not ok;
    }
  return bad;
}

std::uint64_t
replay_mismatches(std::uint64_t seed, unsigned cases)
{
  std::mt19937_64 rng(seed);
  std::uint64_t bad = 0;
  for (unsigned c = 0; c < cases; ++c)
    {
      VectorMemOp op = random_op(rng, kArea);
      op.vstart = 0;
      std::set<std::uint64_t> mapped;
      for (unsigned i = 0; i < kAreaPages; ++i)
        if (rng() % 5 != 0)
          mapped.insert(vpn_of(kArea) + i);
      // Unmapped pages get mapped one by one as faults are taken.
      PageTable pt;
      for (std::uint64_t v : mapped)
        pt.map_page(VirtualAddress(v << 12), PhysicalAddress((v + 0x40000) << 12),
                    Permissions::read_write());
      auto walk = [&pt](VirtualAddress va, AccessDescriptor acc) -> MmuOutcome {
        auto r = pt.walk(va, acc);
        if (auto* t = std::get_if<Translation>(&r))
          return t->pa;
        return std::get<PageFault>(r);
      };

      std::set<std::uint64_t> committed;
      std::set<std::uint64_t> all_pages = mapped;
      bool ok = true;
      std::optional<std::uint32_t> last_vstart;
      for (int round = 0; round <= int(kAreaPages) + 1; ++round)
        {
          auto out = generate(op, walk);
          auto ref = oracle::run_elements(op, all_pages);
          for (const Burst& b : out.bursts)
            for (std::uint32_t e = b.first_element; e < b.first_element + b.element_count; ++e)
              committed.insert(op.element_address(e).raw());
          if (out.fault.has_value() != ref.fault_element.has_value())
            {
              ok = false;
              break;
            }
          if (not out.fault)
            break;
          ok = ok and out.fault->element_index == *ref.fault_element;
          ok = ok and (not last_vstart or out.fault->element_index > *last_vstart);
          last_vstart = out.fault->element_index;
          std::uint64_t v = out.fault->vaddr.vpn();
          pt.map_page(VirtualAddress(v << 12), PhysicalAddress((v + 0x40000) << 12),
                      Permissions::read_write());
          all_pages.insert(v);
          op.vstart = out.fault->element_index;
        }
      std::set<std::uint64_t> everything = all_pages;
      for (unsigned i = 0; i < kAreaPages; ++i)
        everything.insert(vpn_of(kArea) + i);
      VectorMemOp whole = op;
      whole.vstart = 0;
      std::set<std::uint64_t> want;
      for (const auto& a : oracle::run_elements(whole, everything).committed)
        want.insert(a.vaddr);
      bad += not(ok and committed == want);
    }
  return bad;
}

}  // namespace harness
