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
#include <compare>
#include <cstdint>
#include <string>
#include <optional>
#include <variant>
#include <vector>

#include "vvmsim/errors.hpp"

namespace vvmsim {

inline constexpr std::uint64_t kPageSize = 4096;
inline constexpr unsigned kPageShift = 12;
inline constexpr unsigned kPageTableLevels = 3;
inline constexpr unsigned kEntriesPerTable = 512;
inline constexpr unsigned kVaBits = 39;
inline constexpr unsigned kPaBits = 56;

/// Sv39 virtual address. Bits 63..39 must replicate bit 38.
class VirtualAddress
{
public:
  constexpr VirtualAddress() = default;

  /// Throws AddressError for a non-canonical value.
  explicit VirtualAddress(std::uint64_t raw);

  static constexpr bool is_canonical(std::uint64_t raw)
  {
    auto upper = static_cast<std::int64_t>(raw) >> (kVaBits - 1);
    return upper == 0 or upper == -1;
  }

  constexpr std::uint64_t raw() const { return raw_; }
  constexpr std::uint64_t offset() const { return raw_ & (kPageSize - 1); }

  /// Concatenated vpn[2]|vpn[1]|vpn[0] (27 bits).
  constexpr std::uint64_t vpn() const { return (raw_ >> kPageShift) & ((1ull << 27) - 1); }
  constexpr bool page_aligned() const { return offset() == 0; }

  VirtualAddress page_base() const { return VirtualAddress(raw_ & ~(kPageSize - 1)); }

  /// Address displaced by a signed byte delta; throws if the result leaves
  /// the canonical range.
  VirtualAddress displaced(std::int64_t delta) const;

  constexpr auto operator<=>(const VirtualAddress&) const = default;

private:
  std::uint64_t raw_ = 0;
};

class PhysicalAddress
{
public:
  constexpr PhysicalAddress() = default;
  explicit PhysicalAddress(std::uint64_t raw);

  constexpr std::uint64_t raw() const { return raw_; }
  constexpr std::uint64_t ppn() const { return raw_ >> kPageShift; }
  constexpr std::uint64_t offset() const { return raw_ & (kPageSize - 1); }
  constexpr bool page_aligned() const { return offset() == 0; }

  constexpr auto operator<=>(const PhysicalAddress&) const = default;

private:
  std::uint64_t raw_ = 0;
};

struct VaFields
{
  unsigned vpn2 = 0;
  unsigned vpn1 = 0;
  unsigned vpn0 = 0;
  unsigned offset = 0;

  auto operator<=>(const VaFields&) const = default;
};

VaFields split_vaddr(VirtualAddress va);

struct Permissions
{
  bool readable = false;
  bool writable = false;
  bool executable = false;
  bool user = true;

  static constexpr Permissions read_only() { return {true, false, false, true}; }
  static constexpr Permissions read_write() { return {true, true, false, true}; }

  auto operator<=>(const Permissions&) const = default;
};

struct PageTableEntry
{
  bool valid = false;
  Permissions perms{false, false, false, false};
  bool accessed = false;
  bool dirty = false;
  std::uint64_t ppn = 0;

  constexpr bool is_leaf() const { return perms.readable or perms.executable; }

  /// Writable without readable is the reserved Sv39 encoding.
  constexpr bool reserved_encoding() const { return perms.writable and not perms.readable; }

  auto operator<=>(const PageTableEntry&) const = default;
};

enum class AccessKind : std::uint8_t { Load, Store };
enum class AccessSource : std::uint8_t { Scalar, Vector };

struct AccessDescriptor
{
  AccessKind kind = AccessKind::Load;
  AccessSource source = AccessSource::Scalar;

  auto operator<=>(const AccessDescriptor&) const = default;
};

/// RISC-V exception codes for the two data page faults.
enum class FaultCause : std::uint8_t { LoadPageFault = 13, StorePageFault = 15 };

constexpr FaultCause fault_cause_for(AccessKind kind)
{
  return kind == AccessKind::Load ? FaultCause::LoadPageFault : FaultCause::StorePageFault;
}

const char* to_string(FaultCause cause);

/// "0x" followed by 16 hex digits.
std::string to_hex(std::uint64_t value);

struct Translation
{
  PhysicalAddress pa;
  PageTableEntry leaf;
  unsigned levels_visited = kPageTableLevels;

  auto operator<=>(const Translation&) const = default;
};

struct PageFault
{
  FaultCause cause = FaultCause::LoadPageFault;
  VirtualAddress va;
  unsigned levels_visited = 0;

  auto operator<=>(const PageFault&) const = default;
};

using TranslationOutcome = std::variant<Translation, PageFault>;

/// Sv39 radix page table held in host memory. Table identifiers index
/// into an internal arena; non-leaf entries store the child identifier in
/// their ppn field. Only 4-KiB leaves are ever produced.
class PageTable
{
public:
  using TableId = std::uint32_t;
  using Table = std::array<PageTableEntry, kEntriesPerTable>;

  PageTable();

  TableId root() const { return 0; }

  /// Installs (or overwrites) the leaf for `va`. Intermediate tables are
  /// created on demand.
  void map_page(VirtualAddress va, PhysicalAddress pa, Permissions perms);

  /// Installs an arbitrary leaf entry, including reserved encodings. Meant
  /// for exercising the walker's fault paths.
  void set_leaf(VirtualAddress va, const PageTableEntry& pte);

  void unmap_page(VirtualAddress va);

  /// Pure walk. The returned leaf has A (and D for stores) already set, as
  /// a hardware-updating walker would leave it.
  TranslationOutcome walk(VirtualAddress va, AccessDescriptor acc) const;

  /// Same as walk, but persists the A/D updates into the table.
  TranslationOutcome walk_and_update(VirtualAddress va, AccessDescriptor acc);

  bool is_mapped(VirtualAddress va) const;
  std::size_t mapped_pages() const { return mapped_pages_; }

  const Table& table(TableId id) const { return tables_.at(id); }
  std::size_t table_count() const { return tables_.size(); }

private:
  PageTableEntry* leaf_slot(VirtualAddress va, bool create);
  const PageTableEntry* find_leaf(VirtualAddress va) const;

  std::vector<Table> tables_;
  std::size_t mapped_pages_ = 0;
};

}  // namespace vvmsim
