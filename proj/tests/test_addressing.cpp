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

#include <map>
#include <random>

#include "oracles.hpp"
#include "vvmsim/addressing.hpp"

using namespace vvmsim;

namespace {

PhysicalAddress
pa_of(const TranslationOutcome& out)
{
  REQUIRE(std::holds_alternative<Translation>(out));
  return std::get<Translation>(out).pa;
}

const AccessDescriptor kLoad{AccessKind::Load, AccessSource::Scalar};
const AccessDescriptor kStore{AccessKind::Store, AccessSource::Scalar};

}  // namespace

TEST_CASE("split_vaddr slices Sv39 fields")
{
  CHECK(split_vaddr(VirtualAddress(0)) == VaFields{0, 0, 0, 0});
  CHECK(split_vaddr(VirtualAddress(0x1000)) == VaFields{0, 0, 1, 0});
  CHECK(split_vaddr(VirtualAddress(0x4000'0008)) == VaFields{1, 0, 0, 8});

  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i)
    {
      std::uint64_t raw = rng() & ((1ull << 38) - 1);
      VaFields f = split_vaddr(VirtualAddress(raw));
      std::uint64_t back = (std::uint64_t(f.vpn2) << 30) | (std::uint64_t(f.vpn1) << 21) |
                           (std::uint64_t(f.vpn0) << 12) | f.offset;
      CHECK(back == raw);
    }
}

TEST_CASE("canonical addresses only")
{
  CHECK_NOTHROW(VirtualAddress(0xffff'ffc0'0000'0000ull));
  CHECK_THROWS_AS(VirtualAddress(1ull << 38), AddressError);
  CHECK_THROWS_AS(VirtualAddress(0x8000'0000'0000'0000ull), AddressError);
  CHECK_THROWS_AS(PhysicalAddress(1ull << 56), AddressError);
}

TEST_CASE("map_page and walk")
{
  PageTable pt;
  pt.map_page(VirtualAddress(0x1000), PhysicalAddress(0x8000), Permissions::read_write());
  CHECK(pa_of(pt.walk(VirtualAddress(0x1234), kLoad)) == PhysicalAddress(0x8234));

  SUBCASE("remap overwrites")
  {
    pt.map_page(VirtualAddress(0x1000), PhysicalAddress(0x9000), Permissions::read_write());
    CHECK(pa_of(pt.walk(VirtualAddress(0x1000), kLoad)) == PhysicalAddress(0x9000));
    CHECK(pt.mapped_pages() == 1);
  }
  SUBCASE("misaligned inputs")
  {
    CHECK_THROWS_AS(pt.map_page(VirtualAddress(0x1001), PhysicalAddress(0x8000),
                                Permissions::read_write()),
                    AlignmentError);
    CHECK_THROWS_AS(pt.map_page(VirtualAddress(0x2000), PhysicalAddress(0x8008),
                                Permissions::read_write()),
                    AlignmentError);
  }
  SUBCASE("unmapped and read-only")
  {
    auto miss = pt.walk(VirtualAddress(0x5000), kLoad);
    REQUIRE(std::holds_alternative<PageFault>(miss));
    CHECK(std::get<PageFault>(miss).cause == FaultCause::LoadPageFault);

    pt.map_page(VirtualAddress(0x2000), PhysicalAddress(0xa000), Permissions::read_only());
    auto ro = pt.walk(VirtualAddress(0x2010), kStore);
    REQUIRE(std::holds_alternative<PageFault>(ro));
    CHECK(std::get<PageFault>(ro).cause == FaultCause::StorePageFault);
  }
}

TEST_CASE("walk sets A and D in the returned leaf only")
{
  PageTable pt;
  pt.map_page(VirtualAddress(0x3000), PhysicalAddress(0x7000), Permissions::read_write());
  auto out = pt.walk(VirtualAddress(0x3000), kStore);
  REQUIRE(std::holds_alternative<Translation>(out));
  CHECK(std::get<Translation>(out).leaf.accessed);
  CHECK(std::get<Translation>(out).leaf.dirty);
  auto again = pt.walk(VirtualAddress(0x3000), kLoad);
  CHECK(std::get<Translation>(again).leaf.accessed);
  CHECK_FALSE(std::get<Translation>(again).leaf.dirty);

  pt.walk_and_update(VirtualAddress(0x3000), kStore);
  auto persisted = pt.walk(VirtualAddress(0x3000), kLoad);
  CHECK(std::get<Translation>(persisted).leaf.dirty);
}

TEST_CASE("permissions are enforced for all combinations")
{
  for (int bits = 0; bits < 8; ++bits)
    {
      PageTableEntry pte;
      pte.valid = true;
      pte.perms = Permissions{bool(bits & 1), bool(bits & 2), bool(bits & 4), true};
      pte.ppn = 0x42;
      PageTable pt;
      pt.set_leaf(VirtualAddress(0x6000), pte);
      for (AccessKind kind : {AccessKind::Load, AccessKind::Store})
        {
          auto out = pt.walk(VirtualAddress(0x6000), {kind, AccessSource::Vector});
          bool leaf = pte.perms.readable or pte.perms.executable;
          bool reserved = pte.perms.writable and not pte.perms.readable;
          bool allowed = kind == AccessKind::Load ? pte.perms.readable : pte.perms.writable;
          CAPTURE(bits);
          CHECK(std::holds_alternative<Translation>(out) == (leaf and not reserved and allowed));
        }
    }
}

TEST_CASE("offset is never translated")
{
  PageTable pt;
  pt.map_page(VirtualAddress(0x7'0000'0000), PhysicalAddress(0x1234'5000), Permissions::read_write());
  for (std::uint64_t off = 0; off < kPageSize; ++off)
    CHECK(pa_of(pt.walk(VirtualAddress(0x7'0000'0000 + off), kLoad)).raw() == 0x1234'5000 + off);
}

TEST_CASE("walk agrees with the radix-descent oracle")
{
  std::mt19937_64 rng(11);
  for (int round = 0; round < 1000; ++round)
    {
      PageTable pt;
      std::vector<std::uint64_t> pages;
      for (int m = 0; m < 8; ++m)
        {
          std::uint64_t va = (rng() & ((1ull << 38) - 1)) & ~0xfffull;
          if (rng() % 4 == 0 and not pages.empty())
            va = pages.back() + 0x1000;  // neighbour sharing tables
          pages.push_back(va);
          Permissions p = rng() % 3 ? Permissions::read_write() : Permissions::read_only();
          pt.map_page(VirtualAddress(va), PhysicalAddress((rng() & 0xfff'ffffull) << 12), p);
        }
      std::uint64_t probe = rng() % 2 ? pages[rng() % pages.size()] + (rng() & 0xfff)
                                      : rng() & ((1ull << 38) - 1);
      AccessKind kind = rng() % 2 ? AccessKind::Load : AccessKind::Store;
      auto expected = oracle::walk(pt, probe, kind);
      auto got = pt.walk(VirtualAddress(probe), {kind, AccessSource::Scalar});
      if (auto* pa = std::get_if<std::uint64_t>(&expected))
        CHECK(pa_of(got).raw() == *pa);
      else
        {
          REQUIRE(std::holds_alternative<PageFault>(got));
          CHECK(std::get<PageFault>(got).cause == std::get<FaultCause>(expected));
        }
    }
}

TEST_CASE("map_page round-trips for random pairs")
{
  std::mt19937_64 rng(5);
  PageTable pt;
  std::map<std::uint64_t, std::uint64_t> truth;
  for (int i = 0; i < 10000; ++i)
    {
      std::uint64_t va = (rng() & ((1ull << 38) - 1)) & ~0xfffull;
      std::uint64_t pa = (rng() & ((1ull << 44) - 1)) << 12;
      pt.map_page(VirtualAddress(va), PhysicalAddress(pa), Permissions::read_write());
      truth[va] = pa;
    }
  for (const auto& [va, pa] : truth)
    CHECK(pa_of(pt.walk(VirtualAddress(va), kLoad)).raw() == pa);
  CHECK(pt.mapped_pages() == truth.size());
}
