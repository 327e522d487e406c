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

#include <doctest.h>

#include <random>
#include <set>

#include "harness.hpp"
#include "vvmsim/config.hpp"
#include "vvmsim/driver.hpp"
#include "vvmsim/tlb.hpp"

using namespace vvmsim;

TEST_CASE("translation through the TLB never changes the result")
{
  for (unsigned entries : {2u, 16u, 128u})
    CHECK(harness::translation_mismatches(entries, 3000, entries) == 0);
}

TEST_CASE("burst decomposition is exact")
{
  CHECK(harness::burst_violations(1, 3000) == 0);
}

TEST_CASE("fault replay is precise")
{
  CHECK(harness::replay_mismatches(2, 500) == 0);
}

TEST_CASE("TLB holds each vpn at most once and never exceeds its size")
{
  std::mt19937_64 rng(6);
  for (auto policy : {ReplacementPolicy::Plru, ReplacementPolicy::TrueLru})
    for (unsigned n : {2u, 4u, 16u, 128u})
      {
        Tlb t(TlbConfig{n, policy});
        for (int i = 0; i < 4000; ++i)
          {
            std::uint64_t vpn = rng() % (3 * n);
            if (rng() % 50 == 0)
              t.invalidate_all();
            else if (not t.lookup(vpn))
              t.insert(TlbEntry{vpn, vpn, Permissions::read_write(), true});
          }
        std::set<std::uint64_t> seen;
        for (const TlbEntry& e : t.entries())
          if (e.valid)
            CHECK(seen.insert(e.vpn).second);
        CHECK(t.occupancy() <= n);
      }
}

TEST_CASE("working set within capacity stops missing")
{
  for (auto policy : {ReplacementPolicy::Plru, ReplacementPolicy::TrueLru})
    for (unsigned n : {4u, 16u, 64u})
      {
        Tlb t(TlbConfig{n, policy});
        std::mt19937_64 rng(n);
        for (int i = 0; i < 2000; ++i)
          {
            std::uint64_t vpn = rng() % n;
            if (not t.lookup(vpn))
              t.insert(TlbEntry{vpn, vpn, Permissions::read_write(), true});
          }
        CHECK(t.stats().misses == n);
      }
}

TEST_CASE("MMU wait accounting")
{
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial)
    {
      PageTable pt;
      for (std::uint64_t v = 0; v < 8; ++v)
        pt.map_page(VirtualAddress(v << 12), PhysicalAddress((v + 0x80000) << 12),
                    Permissions::read_write());
      SharedMmu mmu(TlbConfig{4}, MmuLatencyParams{});
      mmu.set_satp(true, &pt);
      Cycle integral[2] = {0, 0};
      for (Cycle now = 0; now < 3000; ++now)
        {
          for (Requester who : {Requester::Scalar, Requester::Vector})
            {
              mmu.take_response(who, now);
              if (not mmu.has_outstanding(who) and rng() % 8 == 0)
                mmu.submit(who, MmuRequest{VirtualAddress((rng() % 10) << 12),
                                           {AccessKind::Load, AccessSource::Scalar},
                                           now});
            }
          mmu.service(now);
          CHECK_FALSE((mmu.in_service(Requester::Scalar, now) and
                       mmu.in_service(Requester::Vector, now)));
          for (Requester who : {Requester::Scalar, Requester::Vector})
            integral[int(who)] += mmu.waiting(who);
        }
      // Drain.
      for (Cycle now = 3000; now < 4000; ++now)
        {
          mmu.service(now);
          for (Requester who : {Requester::Scalar, Requester::Vector})
            {
              integral[int(who)] += mmu.waiting(who);
              mmu.take_response(who, now);
            }
        }
      CHECK(mmu.stats(Requester::Scalar).wait_cycles == integral[0]);
      CHECK(mmu.stats(Requester::Vector).wait_cycles == integral[1]);
    }
}

TEST_CASE("overlap never increases total cycles")
{
  for (const char* k : {"matmul32", "axpy2048", "gather32x5"})
    for (unsigned tlb : {2u, 16u})
      {
        SimConfig on;
        on.kernel = KernelSpec::parse(k);
        on.tlb.num_entries = tlb;
        SimConfig off = on;
        off.core.overlap = false;
        INFO(k << " " << tlb);
        CHECK(run(on).total_cycles <= run(off).total_cycles);
      }
}

TEST_CASE("TrueLRU overhead is monotone in TLB size")
{
  for (const char* k : {"matmul32", "gather64x5"})
    {
      SimConfig c;
      c.kernel = KernelSpec::parse(k);
      c.tlb.policy = ReplacementPolicy::TrueLru;
      Cycle prev = ~Cycle{0};
      for (unsigned n : {2u, 4u, 8u, 16u, 32u, 64u, 128u})
        {
          c.tlb.num_entries = n;
          Cycle t = run(c).total_cycles;
          INFO(k << " " << n);
          CHECK(t <= prev);
          prev = t;
        }
    }
}

TEST_CASE("repetitions scale the stream")
{
  SimConfig c;
  c.kernel = KernelSpec::parse("axpy256");
  auto one = run(c);
  c.repetitions = 3;
  auto three = run(c);
  CHECK(three.vector_instructions == 3 * one.vector_instructions);
  CHECK(three.scalar_accesses == 3 * one.scalar_accesses);
}
