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

#include "vvmsim/addressing.hpp"

#include <cstdio>
#include <sstream>

namespace vvmsim {

namespace {

std::string
hex(std::uint64_t v)
{
  std::ostringstream os;
  os << "0x" << std::hex << v;
  return os.str();
}

unsigned
vpn_at(VirtualAddress va, unsigned level)
{
  return (va.raw() >> (kPageShift + 9 * level)) & (kEntriesPerTable - 1);
}

bool
permits(const Permissions& p, AccessKind kind)
{
  return kind == AccessKind::Load ? p.readable : p.writable;
}

}  // namespace

VirtualAddress::VirtualAddress(std::uint64_t raw)
  : raw_(raw)
{
  if (not is_canonical(raw))
    throw AddressError("non-canonical Sv39 address " + hex(raw));
}

VirtualAddress
VirtualAddress::displaced(std::int64_t delta) const
{
  return VirtualAddress(raw_ + static_cast<std::uint64_t>(delta));
}

PhysicalAddress::PhysicalAddress(std::uint64_t raw)
  : raw_(raw)
{
  if (raw >> kPaBits)
    throw AddressError("physical address " + hex(raw) + " exceeds 56 bits");
}

VaFields
split_vaddr(VirtualAddress va)
{
  return VaFields{vpn_at(va, 2), vpn_at(va, 1), vpn_at(va, 0),
                  static_cast<unsigned>(va.offset())};
}

const char*
to_string(FaultCause cause)
{
  return cause == FaultCause::LoadPageFault ? "load-page-fault" : "store-page-fault";
}

PageTable::PageTable()
  : tables_(1)
{
}

PageTableEntry*
PageTable::leaf_slot(VirtualAddress va, bool create)
{
  TableId id = root();
  for (unsigned level = kPageTableLevels - 1; level > 0; --level)
    {
      const unsigned slot = vpn_at(va, level);
      if (not tables_[id][slot].valid)
        {
          if (not create)
            return nullptr;
          // Growing the arena invalidates references into it.
          tables_.emplace_back();
          PageTableEntry& pte = tables_[id][slot];
          pte = PageTableEntry{};
          pte.valid = true;
          pte.ppn = tables_.size() - 1;
        }
      const PageTableEntry& pte = tables_[id][slot];
      if (pte.is_leaf() or pte.reserved_encoding())
        throw ContractViolation("unexpected leaf above level 0 for " + hex(va.raw()));
      id = static_cast<TableId>(pte.ppn);
    }
  return &tables_[id][vpn_at(va, 0)];
}

const PageTableEntry*
PageTable::find_leaf(VirtualAddress va) const
{
  TableId id = root();
  for (unsigned level = kPageTableLevels - 1; level > 0; --level)
    {
      const PageTableEntry& pte = tables_[id][vpn_at(va, level)];
      if (not pte.valid or pte.is_leaf())
        return nullptr;
      id = static_cast<TableId>(pte.ppn);
    }
  return &tables_[id][vpn_at(va, 0)];
}

void
PageTable::map_page(VirtualAddress va, PhysicalAddress pa, Permissions perms)
{
  if (not va.page_aligned() or not pa.page_aligned())
    throw AlignmentError("map_page needs page-aligned addresses, got va=" + hex(va.raw()) +
                         " pa=" + hex(pa.raw()));
  if (perms.writable and not perms.readable)
    throw ContractViolation("writable mapping must also be readable");
  if (not perms.readable and not perms.executable)
    throw ContractViolation("leaf mapping needs readable or executable permission");

  PageTableEntry pte;
  pte.valid = true;
  pte.perms = perms;
  pte.ppn = pa.ppn();
  set_leaf(va, pte);
}

void
PageTable::set_leaf(VirtualAddress va, const PageTableEntry& pte)
{
  if (not va.page_aligned())
    throw AlignmentError("set_leaf needs a page-aligned address, got " + hex(va.raw()));
  PageTableEntry* slot = leaf_slot(va, true);
  if (slot->valid and not pte.valid)
    --mapped_pages_;
  else if (not slot->valid and pte.valid)
    ++mapped_pages_;
  *slot = pte;
}

void
PageTable::unmap_page(VirtualAddress va)
{
  PageTableEntry* slot = leaf_slot(va, false);
  if (slot and slot->valid)
    {
      *slot = PageTableEntry{};
      --mapped_pages_;
    }
}

bool
PageTable::is_mapped(VirtualAddress va) const
{
  const PageTableEntry* leaf = find_leaf(va);
  return leaf and leaf->valid;
}

TranslationOutcome
PageTable::walk(VirtualAddress va, AccessDescriptor acc) const
{
  TableId id = root();
  for (unsigned visited = 1, level = kPageTableLevels - 1;; ++visited, --level)
    {
      PageTableEntry pte = tables_[id][vpn_at(va, level)];
      PageFault fault{fault_cause_for(acc.kind), va, visited};
      if (not pte.valid or pte.reserved_encoding())
        return fault;
      if (pte.is_leaf())
        {
          // Superpages are never produced; a leaf above level 0 is malformed.
          if (level != 0 or not permits(pte.perms, acc.kind))
            return fault;
          pte.accessed = true;
          if (acc.kind == AccessKind::Store)
            pte.dirty = true;
          PhysicalAddress pa((pte.ppn << kPageShift) | va.offset());
          return Translation{pa, pte, visited};
        }
      if (level == 0)
        return fault;
      id = static_cast<TableId>(pte.ppn);
    }
}

TranslationOutcome
PageTable::walk_and_update(VirtualAddress va, AccessDescriptor acc)
{
  TranslationOutcome out = walk(va, acc);
  if (auto* t = std::get_if<Translation>(&out))
    {
      PageTableEntry* slot = leaf_slot(va.page_base(), false);
      slot->accessed = t->leaf.accessed;
      slot->dirty = slot->dirty or t->leaf.dirty;
    }
  return out;
}

std::string
to_hex(std::uint64_t value)
{
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace vvmsim
