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

#include "vvmsim/mmu.hpp"

using namespace vvmsim;

namespace {

const AccessDescriptor kLoad{AccessKind::Load, AccessSource::Scalar};
const AccessDescriptor kVecLoad{AccessKind::Load, AccessSource::Vector};

PageTable
table_with(std::initializer_list<std::uint64_t> pages)
{
  PageTable pt;
  for (std::uint64_t p : pages)
    pt.map_page(VirtualAddress(p), PhysicalAddress(p + 0x8000'0000), Permissions::read_write());
  return pt;
}

}  // namespace

TEST_CASE("translate latency")
{
  PageTable pt = table_with({0x1000});
  Tlb tlb(TlbConfig{16});
  MmuLatencyParams lat;

  SUBCASE("satp off is identity at zero cost")
  {
    SatpState off;
    auto r = translate(off, tlb, MmuRequest{VirtualAddress(0xABC0), kLoad, 0}, lat);
    CHECK(std::get<PhysicalAddress>(r.outcome).raw() == 0xABC0);
    CHECK(r.service_cycles == 0);
    CHECK(tlb.stats().lookups() == 0);
  }
  SUBCASE("cold miss then hit")
  {
    SatpState on = set_satp(true, &pt, tlb);
    auto miss = translate(on, tlb, MmuRequest{VirtualAddress(0x1008), kLoad, 0}, lat);
    CHECK(miss.service_cycles == 61);
    CHECK_FALSE(miss.tlb_hit);
    CHECK(miss.ptw_cycles == 60);
    CHECK(std::get<PhysicalAddress>(miss.outcome).raw() == 0x8000'1008);
    auto hit = translate(on, tlb, MmuRequest{VirtualAddress(0x1010), kLoad, 0}, lat);
    CHECK(hit.service_cycles == 1);
    CHECK(hit.tlb_hit);
    CHECK(hit.ptw_cycles == 0);
  }
  SUBCASE("faults do not refill")
  {
    SatpState on = set_satp(true, &pt, tlb);
    auto f = translate(on, tlb, MmuRequest{VirtualAddress(0x9000), kLoad, 0}, lat);
    CHECK(f.faulted());
    CHECK(tlb.occupancy() == 0);
  }
  SUBCASE("satp write invalidates")
  {
    SatpState on = set_satp(true, &pt, tlb);
    translate(on, tlb, MmuRequest{VirtualAddress(0x1000), kLoad, 0}, lat);
    on = set_satp(true, &pt, tlb);
    auto again = translate(on, tlb, MmuRequest{VirtualAddress(0x1000), kLoad, 0}, lat);
    CHECK_FALSE(again.tlb_hit);
  }
  SUBCASE("disabled translation never faults")
  {
    SatpState off = set_satp(false, nullptr, tlb);
    auto r = translate(off, tlb, MmuRequest{VirtualAddress(0x5'0000), kLoad, 0}, lat);
    CHECK_FALSE(r.faulted());
  }
  CHECK_THROWS_AS(set_satp(true, nullptr, tlb), ConfigError);
}

TEST_CASE("arbitrate")
{
  ArbiterState free;
  MmuRequest s{VirtualAddress(0x1000), kLoad, 3};
  MmuRequest v{VirtualAddress(0x2000), kVecLoad, 3};
  CHECK(arbitrate(std::nullopt, v, free, 3) == Requester::Vector);
  CHECK(arbitrate(s, v, free, 3) == Requester::Scalar);
  CHECK(arbitrate(s, v, free, 3, ArbiterPriority::VectorFirst) == Requester::Vector);
  ArbiterState busy{10, Requester::Scalar};
  CHECK_FALSE(arbitrate(s, v, busy, 9));
  CHECK(arbitrate(s, v, busy, 10) == Requester::Scalar);
  CHECK_FALSE(arbitrate(std::nullopt, std::nullopt, free, 0));
}

TEST_CASE("shared MMU wait accounting")
{
  PageTable pt = table_with({0x1000, 0x2000});

  SUBCASE("vector arrives while a scalar walk runs")
  {
    SharedMmu mmu(TlbConfig{16}, MmuLatencyParams{});
    mmu.set_satp(true, &pt);
    mmu.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x1000), kLoad, 0});
    mmu.submit(Requester::Vector, MmuRequest{VirtualAddress(0x2000), kVecLoad, 10});
    CHECK(mmu.waiting(Requester::Vector));
    CHECK_FALSE(mmu.take_response(Requester::Scalar, 60));
    auto s = mmu.take_response(Requester::Scalar, 61);
    REQUIRE(s);
    CHECK(s->service_cycles == 61);
    mmu.service(61);
    auto v = mmu.take_response(Requester::Vector, 200);
    REQUIRE(v);
    CHECK(v->wait_cycles == 51);
    CHECK(v->service_cycles == 51 + 61);
    CHECK(mmu.stats(Requester::Vector).wait_cycles == 51);
  }
  SUBCASE("same-cycle requests: scalar first")
  {
    SharedMmu mmu(TlbConfig{16}, MmuLatencyParams{});
    mmu.set_satp(true, &pt);
    // Queue both before servicing.
    mmu.submit(Requester::Vector, MmuRequest{VirtualAddress(0x2000), kVecLoad, 0});
    CHECK(mmu.in_service(Requester::Vector, 0));
    SharedMmu tie(TlbConfig{16}, MmuLatencyParams{});
    tie.set_satp(true, &pt);
    tie.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x1000), kLoad, 0});
    tie.submit(Requester::Vector, MmuRequest{VirtualAddress(0x2000), kVecLoad, 0});
    tie.service(61);
    auto v = tie.take_response(Requester::Vector, 1000);
    REQUIRE(v);
    CHECK(v->wait_cycles == 61);
  }
  SUBCASE("one outstanding request per source")
  {
    SharedMmu mmu(TlbConfig{16}, MmuLatencyParams{});
    mmu.set_satp(true, &pt);
    mmu.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x1000), kLoad, 0});
    CHECK_THROWS_AS(mmu.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x2000), kLoad, 0}),
                    ContractViolation);
  }
  SUBCASE("cancel keeps the MMU busy but drops the answer")
  {
    SharedMmu mmu(TlbConfig{16}, MmuLatencyParams{});
    mmu.set_satp(true, &pt);
    mmu.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x1000), kLoad, 0});
    mmu.cancel(Requester::Scalar);
    CHECK_FALSE(mmu.take_response(Requester::Scalar, 100));
    mmu.submit(Requester::Vector, MmuRequest{VirtualAddress(0x2000), kVecLoad, 5});
    CHECK(mmu.waiting(Requester::Vector));
    mmu.service(61);
    CHECK(mmu.in_service(Requester::Vector, 61));
    CHECK_FALSE(mmu.has_outstanding(Requester::Scalar));
  }
  SUBCASE("bare translation bypasses the TLB")
  {
    SharedMmu mmu(TlbConfig{16}, MmuLatencyParams{});
    mmu.submit(Requester::Vector, MmuRequest{VirtualAddress(0x7000), kVecLoad, 4});
    auto r = mmu.take_response(Requester::Vector, 4);
    REQUIRE(r);
    CHECK(r->service_cycles == 0);
    CHECK(mmu.tlb().stats().lookups() == 0);
  }
}

TEST_CASE("tick flush charges later misses as pollution")
{
  PageTable pt = table_with({0x1000, 0x2000});
  SharedMmu mmu(TlbConfig{16}, MmuLatencyParams{});
  mmu.set_satp(true, &pt);
  mmu.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x1000), kLoad, 0});
  mmu.take_response(Requester::Scalar, 61);
  mmu.flush_for_tick();
  mmu.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x2000), kLoad, 100});
  mmu.take_response(Requester::Scalar, 161);
  CHECK(mmu.tick_pollution_cycles() == 0);  // never cached before the tick
  mmu.submit(Requester::Scalar, MmuRequest{VirtualAddress(0x1000), kLoad, 200});
  mmu.take_response(Requester::Scalar, 261);
  CHECK(mmu.tick_pollution_cycles() == 61);
}
