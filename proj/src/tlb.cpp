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

#include "vvmsim/tlb.hpp"

#include <algorithm>
#include <bit>

namespace vvmsim {

const char*
to_string(ReplacementPolicy policy)
{
  return policy == ReplacementPolicy::Plru ? "plru" : "lru";
}

ReplacementPolicy
parse_policy(const std::string& text)
{
  if (text == "plru")
    return ReplacementPolicy::Plru;
  if (text == "lru" or text == "truelru")
    return ReplacementPolicy::TrueLru;
  throw ConfigError("unknown TLB replacement policy '" + text + "' (expected plru or lru)");
}

void
TlbConfig::validate() const
{
  if (num_entries < 2 or num_entries > 128 or not std::has_single_bit(num_entries))
    throw ConfigError("TLB entries must be a power of two in [2,128], got " +
                      std::to_string(num_entries));
}

Tlb::Tlb(TlbConfig config)
  : config_(config)
{
  config_.validate();
  entries_.resize(config_.num_entries);
  plru_bits_.assign(config_.num_entries - 1, 0);
  last_use_.assign(config_.num_entries, 0);
}

std::optional<unsigned>
Tlb::find_way(std::uint64_t vpn) const
{
  for (unsigned way = 0; way < entries_.size(); ++way)
    if (entries_[way].valid and entries_[way].vpn == vpn)
      return way;
  return std::nullopt;
}

void
Tlb::touch(unsigned way)
{
  last_use_[way] = ++clock_;

  // Walk from the leaf up: at each parent, point away from the child we
  // came from.
  unsigned node = way + config_.num_entries - 1;
  while (node != 0)
    {
      unsigned parent = (node - 1) / 2;
      bool came_from_left = node == 2 * parent + 1;
      plru_bits_[parent] = came_from_left ? 1 : 0;
      node = parent;
    }
}

unsigned
Tlb::victim_way() const
{
  if (config_.policy == ReplacementPolicy::TrueLru)
    {
      auto it = std::min_element(last_use_.begin(), last_use_.end());
      return static_cast<unsigned>(it - last_use_.begin());
    }
  unsigned node = 0;
  unsigned internal = config_.num_entries - 1;
  while (node < internal)
    node = plru_bits_[node] ? 2 * node + 2 : 2 * node + 1;
  return node - internal;
}

std::optional<TlbEntry>
Tlb::lookup(std::uint64_t vpn)
{
  if (auto way = find_way(vpn))
    {
      ++stats_.hits;
      touch(*way);
      return entries_[*way];
    }
  ++stats_.misses;
  return std::nullopt;
}

std::optional<TlbEntry>
Tlb::peek(std::uint64_t vpn) const
{
  if (auto way = find_way(vpn))
    return entries_[*way];
  return std::nullopt;
}

std::optional<TlbEntry>
Tlb::insert(const TlbEntry& entry)
{
  if (not entry.valid)
    throw ContractViolation("cannot insert an invalid TLB entry");
  if (find_way(entry.vpn))
    throw ContractViolation("TLB already holds vpn " + std::to_string(entry.vpn));

  std::optional<TlbEntry> evicted;
  unsigned way = 0;
  auto free = std::find_if(entries_.begin(), entries_.end(),
                           [](const TlbEntry& e) { return not e.valid; });
  if (free != entries_.end())
    way = static_cast<unsigned>(free - entries_.begin());
  else
    {
      way = victim_way();
      evicted = entries_[way];
      ++stats_.evictions;
    }
  entries_[way] = entry;
  ++stats_.fills;
  touch(way);
  return evicted;
}

void
Tlb::invalidate_all()
{
  for (auto& e : entries_)
    e = TlbEntry{};
  std::fill(plru_bits_.begin(), plru_bits_.end(), 0);
  std::fill(last_use_.begin(), last_use_.end(), 0);
}

unsigned
Tlb::occupancy() const
{
  return static_cast<unsigned>(
      std::count_if(entries_.begin(), entries_.end(), [](const TlbEntry& e) { return e.valid; }));
}

}  // namespace vvmsim
