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

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vvmsim/driver.hpp"

using namespace vvmsim;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAbort = 3;
constexpr int kExitIo = 1;

struct CommonOptions
{
  std::string config_file;
  std::vector<std::string> sets;
  std::string kernel;
  unsigned n = 0;
  unsigned rows = 0;
  unsigned nnz = 0;
  unsigned tlb_entries = 0;
  std::string policy;
  std::string mode;
  std::uint64_t seed = 0;
  unsigned repetitions = 0;
  std::string emit = "json";
  std::string out;
};

void
add_common(CLI::App* cmd, CommonOptions& o)
{
  cmd->add_option("--config", o.config_file, "INI file with [section] key = value lines");
  cmd->add_option("--set", o.sets, "Override one key, e.g. --set mmu.ptw_cycles=30");
  cmd->add_option("--seed", o.seed, "Seed for the gather kernel's index generator");
  cmd->add_option("--policy", o.policy, "TLB replacement: plru or lru");
  cmd->add_option("--repetitions", o.repetitions, "Back-to-back copies of the kernel");
  cmd->add_option("--out", o.out, "Output path (standard output when omitted)");
}

/// Defaults, then the config file, then --set, then explicit flags.
SimConfig
build_config(CLI::App* cmd, const CommonOptions& o)
{
  SimConfig cfg;
  if (not o.config_file.empty())
    load_ini_file(cfg, o.config_file);
  for (const std::string& kv : o.sets)
    {
      auto eq = kv.find('=');
      if (eq == std::string::npos)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
      set_option(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
  auto given = [cmd](const char* name) { return cmd->get_option_no_throw(name) and cmd->count(name); };
  if (given("--kernel"))
    {
      if (o.kernel == "matmul" or o.kernel == "axpy" or o.kernel == "gather")
        set_option(cfg, "kernel.name", o.kernel);
      else
        cfg.kernel = KernelSpec::parse(o.kernel);
    }
  if (given("--n"))
    set_option(cfg, "kernel.n", std::to_string(o.n));
  if (given("--rows"))
    set_option(cfg, "kernel.rows", std::to_string(o.rows));
  if (given("--nnz"))
    set_option(cfg, "kernel.nnz_per_row", std::to_string(o.nnz));
  if (given("--tlb-entries"))
    cfg.tlb.num_entries = o.tlb_entries;
  if (given("--policy"))
    cfg.tlb.policy = parse_policy(o.policy);
  if (given("--mode"))
    cfg.mode = parse_mode(o.mode);
  if (given("--seed"))
    cfg.seed = o.seed;
  if (given("--repetitions"))
    cfg.repetitions = o.repetitions;
  cfg.validate();
  return cfg;
}

std::vector<std::string>
split(const std::string& text)
{
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');)
    if (not p.empty())
      parts.push_back(p);
  return parts;
}

int
cmd_run(CLI::App* cmd, const CommonOptions& o)
{
  SimConfig cfg = build_config(cmd, o);
  RunReport report = run(cfg);
  if (o.emit == "json")
    {
      write_output(o.out, to_json(report));
      return 0;
    }
  SimConfig base = cfg;
  base.mode = Mode::BareMetal;
  RunReport bm = cfg.mode == Mode::BareMetal ? report : run(base);
  SweepRow row{report.kernel, report.n, report.tlb_entries, overhead(report, bm),
               report.total_cycles, bm.total_cycles, {}};
  std::ostringstream os;
  write_csv(os, {row});
  write_output(o.out, os.str());
  return 0;
}

int
cmd_sweep(CLI::App* cmd, const CommonOptions& o, const std::string& kernels,
          const std::string& tlb, unsigned jobs)
{
  SimConfig cfg = build_config(cmd, o);
  SweepSpec spec;
  spec.repetitions = cfg.repetitions;
  spec.jobs = jobs;
  for (const std::string& k : split(kernels))
    spec.kernels.push_back(KernelSpec::parse(k));
  if (not tlb.empty())
    {
      spec.tlb_sizes.clear();
      for (const std::string& s : split(tlb))
        {
          try
            {
              spec.tlb_sizes.push_back(static_cast<unsigned>(std::stoul(s)));
            }
          catch (const std::exception&)
            {
              throw ConfigError("bad TLB size '" + s + "'");
            }
        }
    }
  std::vector<SweepRow> rows = sweep(spec, cfg);
  if (o.emit == "json")
    write_output(o.out, to_json(rows));
  else
    {
      std::ostringstream os;
      write_csv(os, rows);
      write_output(o.out, os.str());
    }
  return 0;
}

int
cmd_trace(CLI::App* cmd, const CommonOptions& o)
{
  SimConfig cfg = build_config(cmd, o);
  Workload w = generate(cfg.kernel, cfg.seed, cfg.core);
  std::ostringstream os;
  write_trace(os, trace(cfg.repetitions > 1 ? repeat(w.stream, cfg.repetitions) : w.stream));
  write_output(o.out, os.str());
  return 0;
}

int
cmd_config(CLI::App* cmd, const CommonOptions& o)
{
  std::ostringstream os;
  write_ini(os, build_config(cmd, o));
  write_output(o.out, os.str());
  return 0;
}

}  // namespace

int
main(int argc, char** argv)
{
  CLI::App app{"Cycle-approximate model of a vector unit sharing its host core's MMU"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, trace_opts, config_opts;
  std::string kernels = "matmul32,matmul64,matmul128";
  std::string tlb_sizes;
  unsigned jobs = 0;

  auto add_kernel = [](CLI::App* c, CommonOptions& o) {
    c->add_option("--kernel", o.kernel, "matmul, axpy, gather, or a label such as matmul64");
    c->add_option("--n", o.n, "Matrix or vector size");
    c->add_option("--rows", o.rows, "Gather kernel rows");
    c->add_option("--nnz", o.nnz, "Gather kernel elements per row");
  };
  auto add_machine = [](CLI::App* c, CommonOptions& o) {
    c->add_option("--tlb-entries", o.tlb_entries, "DTLB entries (power of two, 2..128)");
    c->add_option("--mode", o.mode, "vm or bm")->check(CLI::IsMember({"vm", "bm"}));
  };

  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one configuration");
  add_common(run_cmd, run_opts);
  add_kernel(run_cmd, run_opts);
  add_machine(run_cmd, run_opts);
  run_cmd->add_option("--emit", run_opts.emit, "json (full report) or csv (overhead row)")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Overhead over kernels and TLB sizes");
  add_common(sweep_cmd, sweep_opts);
  sweep_opts.emit = "csv";
  sweep_cmd->add_option("--kernels", kernels, "Comma-separated kernel labels");
  sweep_cmd->add_option("--tlb", tlb_sizes, "Comma-separated TLB sizes");
  sweep_cmd->add_option("--jobs", jobs, "Worker threads (0: one per hardware thread)");
  sweep_cmd->add_option("--emit", sweep_opts.emit, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI::App* trace_cmd = app.add_subcommand("trace", "Dump a kernel's memory accesses");
  add_common(trace_cmd, trace_opts);
  add_kernel(trace_cmd, trace_opts);

  CLI::App* config_cmd = app.add_subcommand("config", "Print the effective configuration");
  add_common(config_cmd, config_opts);
  add_kernel(config_cmd, config_opts);
  add_machine(config_cmd, config_opts);

  try
    {
      app.parse(argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      int code = app.exit(e);
      return code == 0 ? 0 : kExitConfig;
    }

  try
    {
      if (*run_cmd)
        return cmd_run(run_cmd, run_opts);
      if (*sweep_cmd)
        return cmd_sweep(sweep_cmd, sweep_opts, kernels, tlb_sizes, jobs);
      if (*trace_cmd)
        return cmd_trace(trace_cmd, trace_opts);
      return cmd_config(config_cmd, config_opts);
    }
  catch (const ConfigError& e)
    {
      std::cerr << "vvmsim: configuration error: " << e.what() << '\n';
      return kExitConfig;
    }
  catch (const SimulationAbort& e)
    {
      std::cerr << "vvmsim: simulation aborted: " << e.what() << '\n';
      return kExitAbort;
    }
  catch (const IoError& e)
    {
      std::cerr << "vvmsim: " << e.what() << '\n';
      return kExitIo;
    }
  catch (const Error& e)
    {
      std::cerr << "vvmsim: " << e.what() << '\n';
      return kExitAbort;
    }
}
