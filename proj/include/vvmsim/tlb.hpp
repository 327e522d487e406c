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
#include <optional>
#include <string>
#include <vector>

#include "vvmsim/addressing.hpp"

namespace vvmsim {

enum class ReplacementPolicy : std::uint8_t { Plru, TrueLru };

const char* to_string(ReplacementPolicy policy);
ReplacementPolicy parse_policy(const std::string& text);

struct TlbConfig
{
  unsigned num_entries = 16;
  ReplacementPolicy policy = ReplacementPolicy::Plru;

  /// Throws ConfigError unless num_entries is a power of two in [2,128].
  void validate() const;
};

struct TlbEntry
{
  std::uint64_t vpn = 0;
  std::uint64_t ppn = 0;
  Permissions perms;
  bool valid = false;

  auto operator<=>(const TlbEntry&) const = default;
};

struct TlbStats
{
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t fills = 0;

  std::uint64_t lookups() const { return hits + misses; }
};

/// Fully associative DTLB.
///
/// The tree-PLRU keeps one bit per internal node of a complete binary tree
/// over the ways (node i has children 2i+1 and 2i+2). A zero bit means "the
/// victim is in the left subtree". Touching a way sets every bit on its path
/// to point at the other subtree. TrueLRU keeps per-way use stamps and is
/// only used as a reference policy.
class Tlb
{
public:
  explicit Tlb(TlbConfig config);

  const TlbConfig& config() const { return config_; }
  unsigned size() const { return config_.num_entries; }

  /// Hit touches the replacement state; both outcomes update stats.
  std::optional<TlbEntry> lookup(std::uint64_t vpn);

  /// Side-effect-free probe.
  std::optional<TlbEntry> peek(std::uint64_t vpn) const;

  /// Fills the lowest free way, otherwise evicts the policy victim, which is
  /// returned. Throws ContractViolation if `entry` is invalid or its vpn is
  /// already cached.
  std::optional<TlbEntry> insert(const TlbEntry& entry);

  /// Drops every entry and resets the PLRU tree. Stats are preserved.
  void invalidate_all();

  /// Way the policy would evict next when the TLB is full.
  unsigned victim_way() const;

  const std::vector<TlbEntry>& entries() const { return entries_; }
  const std::vector<std::uint8_t>& plru_bits() const { return plru_bits_; }
  const TlbStats& stats() const { return stats_; }
  unsigned occupancy() const;

private:
  std::optional<unsigned> find_way(std::uint64_t vpn) const;
  void touch(unsigned way);

  TlbConfig config_;
  std::vector<TlbEntry> entries_;
  std::vector<std::uint8_t> plru_bits_;
  std::vector<std::uint64_t> last_use_;
  std::uint64_t clock_ = 0;
  TlbStats stats_;
};

}  // namespace vvmsim
