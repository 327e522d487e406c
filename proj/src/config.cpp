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

#include "vvmsim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <fstream>
#include <limits>
#include <ostream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace vvmsim {

namespace {

std::uint64_t
parse_uint(const std::string& key, const std::string& text)
{
  std::string digits;
  std::copy_if(text.begin(), text.end(), std::back_inserter(digits),
               [](char c) { return c != '_' and c != '\''; });
  int base = 10;
  std::string_view v = digits;
  if (v.starts_with("0x") or v.starts_with("0X"))
    {
      base = 16;
      v.remove_prefix(2);
    }
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  if (v.empty() or ec != std::errc{} or p != v.data() + v.size())
    throw ConfigError(key + ": expected a non-negative integer, got '" + text + "'");
  return out;
}

unsigned
parse_unsigned(const std::string& key, const std::string& text)
{
  std::uint64_t v = parse_uint(key, text);
  if (v > std::numeric_limits<unsigned>::max())
    throw ConfigError(key + ": value out of range: " + text);
  return static_cast<unsigned>(v);
}

bool
parse_bool(const std::string& key, const std::string& text)
{
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" or t == "1" or t == "yes" or t == "on")
    return true;
  if (t == "false" or t == "0" or t == "no" or t == "off")
    return false;
  throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

std::string
str(bool b)
{
  return b ? "true" : "false";
}

template <class T>
std::string
str(T v)
{
  return std::to_string(v);
}

ArbiterPriority
parse_priority(const std::string& key, const std::string& text)
{
  if (text == "scalar")
    return ArbiterPriority::ScalarFirst;
  if (text == "vector")
    return ArbiterPriority::VectorFirst;
  throw ConfigError(key + ": expected scalar or vector, got '" + text + "'");
}

// Member-pointer helpers keep the key table one line per field.
template <class S, class M>
ConfigKey
uint_key(std::string name, S SimConfig::*sub, M S::*field)
{
  return {name,
          [=](SimConfig& c, const std::string& v) {
            c.*sub.*field = static_cast<M>(parse_uint(name, v));
            if (static_cast<std::uint64_t>(c.*sub.*field) != parse_uint(name, v))
              throw ConfigError(name + ": value out of range: " + v);
          },
          [=](const SimConfig& c) { return str(c.*sub.*field); }};
}

template <class S>
ConfigKey
bool_key(std::string name, S SimConfig::*sub, bool S::*field)
{
  return {name, [=](SimConfig& c, const std::string& v) { c.*sub.*field = parse_bool(name, v); },
          [=](const SimConfig& c) { return str(c.*sub.*field); }};
}

template <class M>
ConfigKey
top_uint_key(std::string name, M SimConfig::*field)
{
  return {name,
          [=](SimConfig& c, const std::string& v) {
            c.*field = static_cast<M>(parse_uint(name, v));
            if (static_cast<std::uint64_t>(c.*field) != parse_uint(name, v))
              throw ConfigError(name + ": value out of range: " + v);
          },
          [=](const SimConfig& c) { return str(c.*field); }};
}

ConfigKey
top_bool_key(std::string name, bool SimConfig::*field)
{
  return {name, [=](SimConfig& c, const std::string& v) { c.*field = parse_bool(name, v); },
          [=](const SimConfig& c) { return str(c.*field); }};
}

std::vector<ConfigKey>
make_keys()
{
  std::vector<ConfigKey> k;
  k.push_back({"kernel.name",
               [](SimConfig& c, const std::string& v) {
                 std::uint32_t n = c.kernel.size();
                 if (v == "matmul")
                   c.kernel.kind =
                       MatmulKernel{std::holds_alternative<IndexedGatherKernel>(c.kernel.kind) ? 32 : n};
                 else if (v == "axpy")
                   c.kernel.kind =
                       AxpyKernel{std::holds_alternative<IndexedGatherKernel>(c.kernel.kind) ? 1024 : n};
                 else if (v == "gather")
                   {
                     if (not std::holds_alternative<IndexedGatherKernel>(c.kernel.kind))
                       c.kernel.kind = IndexedGatherKernel{};
                   }
                 else
                   try
                     {
                       c.kernel = KernelSpec::parse(v);
                     }
                   catch (const ConfigError&)
                     {
                       throw ConfigError("kernel.name: expected matmul, axpy, gather or a label "
                                         "such as matmul64, got '" + v + "'");
                     }
               },
               [](const SimConfig& c) { return std::string(c.kernel.family()); }});
  k.push_back({"kernel.n",
               [](SimConfig& c, const std::string& v) {
                 std::uint32_t n = parse_unsigned("kernel.n", v);
                 if (auto* m = std::get_if<MatmulKernel>(&c.kernel.kind))
                   m->n = n;
                 else if (auto* a = std::get_if<AxpyKernel>(&c.kernel.kind))
                   a->n = n;
                 else
                   throw ConfigError("kernel.n does not apply to the gather kernel");
               },
               [](const SimConfig& c) {
                 return std::holds_alternative<IndexedGatherKernel>(c.kernel.kind)
                            ? std::string()
                            : str(c.kernel.size());
               }});
  auto gather_field = [](std::string name, std::uint32_t IndexedGatherKernel::*field) {
    return ConfigKey{name,
                     [=](SimConfig& c, const std::string& v) {
                       auto* g = std::get_if<IndexedGatherKernel>(&c.kernel.kind);
                       if (not g)
                         throw ConfigError(name + " only applies to the gather kernel");
                       g->*field = parse_unsigned(name, v);
                     },
                     [=](const SimConfig& c) {
                       auto* g = std::get_if<IndexedGatherKernel>(&c.kernel.kind);
                       return g ? str(g->*field) : std::string();
                     }};
  };
  k.push_back(gather_field("kernel.rows", &IndexedGatherKernel::rows));
  k.push_back(gather_field("kernel.nnz_per_row", &IndexedGatherKernel::nnz_per_row));

  k.push_back(uint_key("tlb.entries", &SimConfig::tlb, &TlbConfig::num_entries));
  k.push_back({"tlb.policy",
               [](SimConfig& c, const std::string& v) { c.tlb.policy = parse_policy(v); },
               [](const SimConfig& c) { return std::string(to_string(c.tlb.policy)); }});

  k.push_back(uint_key("mmu.hit_cycles", &SimConfig::mmu_latencies, &MmuLatencyParams::tlb_hit_cycles));
  k.push_back(uint_key("mmu.ptw_cycles", &SimConfig::mmu_latencies,
                       &MmuLatencyParams::ptw_mem_access_cycles));
  k.push_back(uint_key("mmu.levels", &SimConfig::mmu_latencies, &MmuLatencyParams::levels));
  k.push_back({"mmu.priority",
               [](SimConfig& c, const std::string& v) { c.priority = parse_priority("mmu.priority", v); },
               [](const SimConfig& c) {
                 return std::string(c.priority == ArbiterPriority::ScalarFirst ? "scalar" : "vector");
               }});

  k.push_back(uint_key("core.lanes", &SimConfig::core, &CoreTimingParams::lanes));
  k.push_back(uint_key("core.vlen_bits", &SimConfig::core, &CoreTimingParams::vlen_bits));
  k.push_back(uint_key("core.mem_bw_bytes_per_cycle", &SimConfig::core,
                       &CoreTimingParams::mem_bw_bytes_per_cycle));
  k.push_back(uint_key("core.flush_cycles", &SimConfig::core, &CoreTimingParams::flush_cycles));
  k.push_back(uint_key("core.dispatch_cycles", &SimConfig::core, &CoreTimingParams::dispatch_cycles));
  k.push_back(uint_key("core.window_depth", &SimConfig::core, &CoreTimingParams::window_depth));
  k.push_back(uint_key("core.fp_rate_per_lane", &SimConfig::core, &CoreTimingParams::fp_rate_per_lane));
  k.push_back(bool_key("core.chaining", &SimConfig::core, &CoreTimingParams::chaining));
  k.push_back(bool_key("core.overlap", &SimConfig::core, &CoreTimingParams::overlap));
  k.push_back(uint_key("core.max_fault_retries", &SimConfig::core,
                       &CoreTimingParams::max_fault_retries));
  k.push_back(top_uint_key("core.scalar_access_cycles", &SimConfig::scalar_access_cycles));
  k.push_back(top_uint_key("core.scoreboard_depth", &SimConfig::scoreboard_depth));

  k.push_back(uint_key("cache.sets", &SimConfig::cache, &CacheGeometry::sets));
  k.push_back(uint_key("cache.index_bits", &SimConfig::cache, &CacheGeometry::index_bits));
  k.push_back(uint_key("cache.line_bytes", &SimConfig::cache, &CacheGeometry::line_bytes));
  k.push_back(top_uint_key("cache.invalidation_cycles_per_set",
                           &SimConfig::invalidation_cycles_per_set));

  k.push_back(bool_key("scheduler.preemptive", &SimConfig::scheduler, &SchedulerConfig::preemptive));
  k.push_back(uint_key("scheduler.tick_hz", &SimConfig::scheduler, &SchedulerConfig::tick_hz));
  k.push_back(uint_key("scheduler.clock_hz", &SimConfig::scheduler, &SchedulerConfig::clock_hz));
  k.push_back(uint_key("scheduler.interrupt_cycles", &SimConfig::scheduler,
                       &SchedulerConfig::interrupt_cycles));
  k.push_back({"scheduler.pollution_flush_tlb",
               [](SimConfig& c, const std::string& v) {
                 c.scheduler.pollution.flush_tlb = parse_bool("scheduler.pollution_flush_tlb", v);
               },
               [](const SimConfig& c) { return str(c.scheduler.pollution.flush_tlb); }});
  k.push_back({"scheduler.pollution_extra_cycles",
               [](SimConfig& c, const std::string& v) {
                 c.scheduler.pollution.extra_cycles = parse_uint("scheduler.pollution_extra_cycles", v);
               },
               [](const SimConfig& c) { return str(c.scheduler.pollution.extra_cycles); }});
  k.push_back(uint_key("scheduler.switch_every_ticks", &SimConfig::scheduler,
                       &SchedulerConfig::switch_every_ticks));
  k.push_back(uint_key("scheduler.fault_service_cycles", &SimConfig::scheduler,
                       &SchedulerConfig::fault_service_cycles));

  k.push_back(uint_key("switch.scalar_cycles", &SimConfig::switch_cost, &ContextSwitchCost::scalar_cycles));
  k.push_back(uint_key("switch.vrf_bytes", &SimConfig::switch_cost, &ContextSwitchCost::vrf_bytes));
  k.push_back(uint_key("switch.csr_overhead", &SimConfig::switch_cost, &ContextSwitchCost::csr_overhead));

  k.push_back({"run.mode", [](SimConfig& c, const std::string& v) { c.mode = parse_mode(v); },
               [](const SimConfig& c) { return std::string(to_string(c.mode)); }});
  k.push_back(top_bool_key("run.premapped", &SimConfig::premapped));
  k.push_back(top_bool_key("run.warm_tlb", &SimConfig::warm_tlb));
  k.push_back(top_uint_key("run.repetitions", &SimConfig::repetitions));
  k.push_back(top_uint_key("run.seed", &SimConfig::seed));
  k.push_back(top_bool_key("run.keep_log", &SimConfig::keep_log));
  k.push_back(top_uint_key("run.max_cycles", &SimConfig::max_cycles));
  return k;
}

const ConfigKey&
find_key(const std::string& key)
{
  for (const ConfigKey& k : config_keys())
    if (k.name == key)
      return k;
  throw ConfigError("unknown configuration key '" + key + "'");
}

}  // namespace

const char*
to_string(Mode mode)
{
  return mode == Mode::BareMetal ? "bm" : "vm";
}

Mode
parse_mode(const std::string& text)
{
  if (text == "bm" or text == "bare-metal" or text == "baremetal")
    return Mode::BareMetal;
  if (text == "vm" or text == "virtual-memory")
    return Mode::VirtualMemory;
  throw ConfigError("mode must be vm or bm, got '" + text + "'");
}

void
SimConfig::validate() const
{
  kernel.validate();
  tlb.validate();
  mmu_latencies.validate();
  core.validate();
  cache.validate();
  scheduler.validate();
  switch_cost.validate();
  if (scheduler.preemptive)
    {
      Cycle hold = scheduler.tick_cost();
      if (scheduler.switch_every_ticks != 0)
        hold += 2 * context_switch_cycles(ProcessKind::Vector, switch_cost);
      if (hold >= tick_cycle(scheduler, 1))
        throw ConfigError("scheduler: a tick holds the core for " + std::to_string(hold) +
                          " cycles, longer than the tick period");
    }
  if (scalar_access_cycles == 0)
    throw ConfigError("core.scalar_access_cycles must be positive");
  if (scoreboard_depth == 0)
    throw ConfigError("core.scoreboard_depth must be positive");
  if (repetitions == 0)
    throw ConfigError("run.repetitions must be positive");
  if (auto* m = std::get_if<MatmulKernel>(&kernel.kind))
    if (std::min(m->n, core.max_vl(kElementBytes)) == 0)
      throw ConfigError("VLEN too small for the matmul schedule");
}

SimConfig
SimConfig::effective() const
{
  SimConfig c = *this;
  c.switch_cost.mem_bw_bytes_per_cycle = c.core.mem_bw_bytes_per_cycle;
  if (c.mode == Mode::BareMetal)
    {
      c.scheduler.preemptive = false;
      c.premapped = true;
      c.warm_tlb = false;
    }
  return c;
}

const std::vector<ConfigKey>&
config_keys()
{
  static const std::vector<ConfigKey> keys = make_keys();
  return keys;
}

void
set_option(SimConfig& cfg, const std::string& key, const std::string& value)
{
  find_key(key).set(cfg, value);
}

std::string
get_option(const SimConfig& cfg, const std::string& key)
{
  return find_key(key).get(cfg);
}

void
load_ini(SimConfig& cfg, std::istream& in, const std::string& origin)
{
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try
    {
      pt::read_ini(in, tree);
    }
  catch (const pt::ini_parser_error& e)
    {
      throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }

  std::vector<std::pair<std::string, std::string>> entries;
  for (const auto& [section, body] : tree)
    {
      if (body.empty())
        throw ConfigError(origin + ": key '" + section + "' must be inside a [section]");
      for (const auto& [key, value] : body)
        entries.emplace_back(section + "." + key, value.get_value<std::string>());
    }
  // The kernel family decides which size keys are valid.
  std::stable_partition(entries.begin(), entries.end(),
                        [](const auto& e) { return e.first == "kernel.name"; });
  for (const auto& [key, value] : entries)
    {
      try
        {
          set_option(cfg, key, value);
        }
      catch (const ConfigError& e)
        {
          throw ConfigError(origin + ": " + e.what());
        }
    }
}

void
load_ini_file(SimConfig& cfg, const std::string& path)
{
  std::ifstream in(path);
  if (not in)
    throw ConfigError("cannot open config file " + path);
  load_ini(cfg, in, path);
}

void
write_ini(std::ostream& os, const SimConfig& cfg)
{
  std::string section;
  for (const ConfigKey& k : config_keys())
    {
      std::string value = k.get(cfg);
      if (value.empty())
        continue;
      auto dot = k.name.find('.');
      std::string sec = k.name.substr(0, dot);
      if (sec != section)
        {
          os << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
          section = sec;
        }
      os << k.name.substr(dot + 1) << " = " << value << '\n';
    }
}

}  // namespace vvmsim
