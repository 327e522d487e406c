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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "vvmsim/driver.hpp"

namespace py = pybind11;
using namespace vvmsim;

namespace {

py::object
json_loads(const std::string& text)
{
  return py::module_::import("json").attr("loads")(text);
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
  m.doc() = "vvmsim core: shared-MMU vector accelerator timing model";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SimulationAbort>(m, "SimulationAbort", PyExc_RuntimeError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);
  py::register_exception<AddressError>(m, "AddressError", PyExc_ValueError);
  py::register_exception<AlignmentError>(m, "AlignmentError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def("set", &set_option, py::arg("key"), py::arg("value"),
           "Set one 'section.key' option from its text form")
      .def("get", &get_option, py::arg("key"))
      .def("validate", &SimConfig::validate)
      .def_static("keys", [] {
        std::vector<std::string> names;
        for (const ConfigKey& k : config_keys())
          names.push_back(k.name);
        return names;
      })
      .def_static("from_ini", [](const std::string& text) {
        SimConfig cfg;
        std::istringstream in(text);
        load_ini(cfg, in);
        return cfg;
      })
      .def("to_ini", [](const SimConfig& cfg) {
        std::ostringstream os;
        write_ini(os, cfg);
        return os.str();
      })
      .def_property("kernel", [](const SimConfig& c) { return c.kernel.label(); },
                    [](SimConfig& c, const std::string& label) { c.kernel = KernelSpec::parse(label); })
      .def_property("tlb_entries", [](const SimConfig& c) { return c.tlb.num_entries; },
                    [](SimConfig& c, unsigned n) { c.tlb.num_entries = n; })
      .def_property("mode", [](const SimConfig& c) { return std::string(to_string(c.mode)); },
                    [](SimConfig& c, const std::string& m) { c.mode = parse_mode(m); })
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("repetitions", &SimConfig::repetitions)
      .def_readwrite("premapped", &SimConfig::premapped)
      .def_readwrite("keep_log", &SimConfig::keep_log);

  m.def(
      "run",
      [](const SimConfig& cfg) {
        RunReport r;
        {
          py::gil_scoped_release release;
          r = run(cfg);
        }
        return json_loads(to_json(r, -1));
      },
      py::arg("config"), "Run one configuration; returns the report as a dict");

  m.def(
      "run_json", [](const SimConfig& cfg) { return to_json(run(cfg)); }, py::arg("config"),
      "Run one configuration; returns the report as JSON text");

  m.def(
      "overhead",
      [](const py::dict& vm, const py::dict& bm) {
        auto dumps = py::module_::import("json").attr("dumps");
        RunReport v = report_from_json(py::str(dumps(vm)));
        RunReport b = report_from_json(py::str(dumps(bm)));
        OverheadBreakdown o = overhead(v, b);
        py::dict d;
        d["total_pct"] = o.total_pct;
        d["cva6_mmu_pct"] = o.cva6_mmu_pct;
        d["ara_mmu_pct"] = o.ara_mmu_pct;
        d["other_pct"] = o.other_pct;
        d["delta_cycles"] = o.delta_cycles;
        return d;
      },
      py::arg("vm"), py::arg("bm"));

  m.def(
      "sweep",
      [](const std::vector<std::string>& kernels, const std::vector<unsigned>& tlb_sizes,
         const SimConfig& base, unsigned jobs) {
        SweepSpec spec;
        for (const std::string& k : kernels)
          spec.kernels.push_back(KernelSpec::parse(k));
        spec.tlb_sizes = tlb_sizes;
        spec.repetitions = base.repetitions;
        spec.jobs = jobs;
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = sweep(spec, base);
        }
        std::ostringstream os;
        write_csv(os, rows);
        return os.str();
      },
      py::arg("kernels"), py::arg("tlb_sizes") = std::vector<unsigned>{2, 4, 8, 16, 32, 64, 128},
      py::arg("base") = SimConfig{}, py::arg("jobs") = 0u, "Sweep; returns CSV text");

  m.def(
      "footprint_pages",
      [](const std::string& label, std::uint64_t seed) {
        return generate(KernelSpec::parse(label), seed).layout.footprint_pages;
      },
      py::arg("kernel"), py::arg("seed") = 1);

  m.def(
      "trace",
      [](const std::string& label, std::uint64_t seed) {
        std::ostringstream os;
        write_trace(os, trace(generate(KernelSpec::parse(label), seed).stream));
        return os.str();
      },
      py::arg("kernel"), py::arg("seed") = 1, "Access trace in the text trace format");

  m.def(
      "context_switch_cycles",
      [](const std::string& kind) {
        if (kind != "scalar" and kind != "vector")
          throw ConfigError("kind must be scalar or vector");
        return context_switch_cycles(kind == "scalar" ? ProcessKind::Scalar : ProcessKind::Vector,
                                     ContextSwitchCost{});
      },
      py::arg("kind"));

  m.def(
      "tick_schedule",
      [](Cycle horizon, bool preemptive) {
        SchedulerConfig cfg;
        cfg.preemptive = preemptive;
        std::vector<Cycle> at;
        for (const OsEvent& e : tick_schedule(cfg, horizon))
          at.push_back(e.at_cycle);
        return at;
      },
      py::arg("horizon"), py::arg("preemptive") = true);

  m.def(
      "split_bursts",
      [](std::uint64_t base, unsigned ew, std::uint32_t vl, std::uint32_t vstart) {
        VectorMemOp op = VectorMemOp::unit_stride(VirtualAddress(base), ew, vl);
        op.vstart = vstart;
        std::vector<std::tuple<std::uint64_t, std::uint64_t, std::uint32_t, std::uint32_t>> out;
        for (const Burst& b : split_bursts(op))
          out.emplace_back(b.start_vaddr.raw(), b.length_bytes, b.first_element, b.element_count);
        return out;
      },
      py::arg("base"), py::arg("element_width"), py::arg("vl"), py::arg("vstart") = 0,
      "Unit-stride bursts as (vaddr, bytes, first_element, element_count)");
}
