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

#include "vvmsim/workloads.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <random>
#include <stdexcept>

namespace vvmsim {

namespace {

template <class... Ts>
struct overloaded : Ts...
{
  using Ts::operator()...;
};

std::uint64_t
page_round(std::uint64_t bytes)
{
  return (bytes + kPageSize - 1) / kPageSize * kPageSize;
}

std::uint32_t
parse_u32(std::string_view s, const std::string& label)
{
  std::uint32_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} or p != s.data() + s.size() or s.empty())
    throw ConfigError("bad kernel label '" + label + "'");
  return v;
}

}  // namespace

void
KernelSpec::validate() const
{
  std::visit(overloaded{
                 [](const MatmulKernel& k) {
                   if (k.n == 0 or k.n % 4)
                     throw ConfigError("matmul size must be a positive multiple of 4");
                 },
                 [](const AxpyKernel& k) {
                   if (k.n == 0)
                     throw ConfigError("axpy length must be positive");
                 },
                 [](const IndexedGatherKernel& k) {
                   if (k.rows == 0 or k.nnz_per_row == 0)
                     throw ConfigError("gather rows and nnz_per_row must be positive");
                 },
             },
             kind);
}

std::string
KernelSpec::label() const
{
  return std::visit(overloaded{
                        [](const MatmulKernel& k) { return "matmul" + std::to_string(k.n); },
                        [](const AxpyKernel& k) { return "axpy" + std::to_string(k.n); },
                        [](const IndexedGatherKernel& k) {
                          return "gather" + std::to_string(k.rows) + "x" +
                                 std::to_string(k.nnz_per_row);
                        },
                    },
                    kind);
}

std::uint32_t
KernelSpec::size() const
{
  return std::visit(overloaded{
                        [](const MatmulKernel& k) { return k.n; },
                        [](const AxpyKernel& k) { return k.n; },
                        [](const IndexedGatherKernel& k) { return k.rows; },
                    },
                    kind);
}

const char*
KernelSpec::family() const
{
  static constexpr const char* names[] = {"matmul", "axpy", "gather"};
  return names[kind.index()];
}

KernelSpec
KernelSpec::parse(const std::string& label)
{
  KernelSpec spec;
  auto rest = [&](std::string_view prefix) { return std::string_view(label).substr(prefix.size()); };
  if (label.starts_with("matmul"))
    spec.kind = MatmulKernel{parse_u32(rest("matmul"), label)};
  else if (label.starts_with("axpy"))
    spec.kind = AxpyKernel{parse_u32(rest("axpy"), label)};
  else if (label.starts_with("gather"))
    {
      std::string_view r = rest("gather");
      auto x = r.find('x');
      if (x == std::string_view::npos)
        throw ConfigError("gather label needs ROWSxNNZ, got '" + label + "'");
      spec.kind = IndexedGatherKernel{parse_u32(r.substr(0, x), label),
                                      parse_u32(r.substr(x + 1), label)};
    }
  else
    throw ConfigError("unknown kernel '" + label + "'");
  spec.validate();
  return spec;
}

bool
Region::contains(std::uint64_t vaddr, std::uint64_t len) const
{
  return vaddr >= base.raw() and vaddr + len <= base.raw() + bytes;
}

const Region&
MemoryLayout::add(std::string name, std::uint64_t bytes)
{
  std::uint64_t next = kDataBase;
  if (not regions.empty())
    next = page_round(regions.back().base.raw() + regions.back().bytes);
  regions.push_back(Region{std::move(name), VirtualAddress(next), bytes});
  recount();
  return regions.back();
}

const Region&
MemoryLayout::region(const std::string& name) const
{
  for (const Region& r : regions)
    if (r.name == name)
      return r;
  throw std::out_of_range("no region named " + name);
}

bool
MemoryLayout::contains(std::uint64_t vaddr, std::uint64_t len) const
{
  return std::any_of(regions.begin(), regions.end(),
                     [&](const Region& r) { return r.contains(vaddr, len); });
}

void
MemoryLayout::recount()
{
  std::set<std::uint64_t> pages;
  for (const Region& r : regions)
    if (r.bytes)
      for (std::uint64_t p = r.base.raw() >> kPageShift; p <= (r.base.raw() + r.bytes - 1) >> kPageShift;
           ++p)
        pages.insert(p);
  footprint_pages = pages.size();
}

PagePlan
MemoryLayout::page_plan() const
{
  PagePlan plan;
  for (const Region& r : regions)
    if (r.bytes)
      for (std::uint64_t p = r.base.raw() >> kPageShift; p <= (r.base.raw() + r.bytes - 1) >> kPageShift;
           ++p)
        plan.emplace(p, 0);
  std::uint64_t frame = kFrameBase >> kPageShift;
  for (auto& [vpn, ppn] : plan)
    ppn = frame++;
  return plan;
}

void
MemoryLayout::map_all(PageTable& pt) const
{
  for (const auto& [vpn, ppn] : page_plan())
    pt.map_page(VirtualAddress(vpn << kPageShift), PhysicalAddress(ppn << kPageShift),
                Permissions::read_write());
}

Workload
gen_matmul(std::uint32_t n, const CoreTimingParams& core)
{
  Workload w;
  w.spec.kind = MatmulKernel{n};
  w.spec.validate();
  const std::uint64_t row_bytes = std::uint64_t(n) * kElementBytes;
  const std::uint64_t a = w.layout.add("A", row_bytes * n).base.raw();
  const std::uint64_t b = w.layout.add("B", row_bytes * n).base.raw();
  const std::uint64_t c = w.layout.add("C", row_bytes * n).base.raw();

  // Column strips of one register; two registers for B rows, four
  // accumulators.
  const std::uint32_t strip = core.max_vl(kElementBytes);
  const std::uint8_t vb[2] = {0, 1};
  const std::uint8_t vc[4] = {8, 9, 10, 11};
  const unsigned rate = core.fp_rate_per_lane;

  std::uint64_t id = 0;
  auto& s = w.stream;
  for (std::uint32_t j = 0; j < n; j += strip)
    {
      const std::uint32_t vl = std::min(strip, n - j);
      for (std::uint32_t i = 0; i < n; i += 4)
        {
          for (unsigned r = 0; r < 4; ++r)
            s.push_back(VectorInstruction::arithmetic(id++, vl, {}, vc[r], rate));
          for (std::uint32_t k = 0; k < n; ++k)
            {
              VirtualAddress brow(b + k * row_bytes + j * kElementBytes);
              s.push_back(VectorInstruction::memory(
                  id++, VectorMemOp::unit_stride(brow, kElementBytes, vl), {}, vb[k % 2]));
              for (unsigned r = 0; r < 4; ++r)
                {
                  s.push_back(ScalarMemAccess{
                      VirtualAddress(a + (i + r) * row_bytes + k * kElementBytes), AccessKind::Load});
                  s.push_back(
                      VectorInstruction::arithmetic(id++, vl, {vb[k % 2], vc[r]}, vc[r], rate));
                }
            }
          for (unsigned r = 0; r < 4; ++r)
            {
              VirtualAddress crow(c + (i + r) * row_bytes + j * kElementBytes);
              s.push_back(VectorInstruction::memory(
                  id++, VectorMemOp::unit_stride(crow, kElementBytes, vl, true), {vc[r]}, {}));
            }
        }
    }
  return w;
}

Workload
gen_axpy(std::uint32_t n, const CoreTimingParams& core)
{
  Workload w;
  w.spec.kind = AxpyKernel{n};
  w.spec.validate();
  const std::uint64_t x = w.layout.add("x", std::uint64_t(n) * kElementBytes).base.raw();
  const std::uint64_t y = w.layout.add("y", std::uint64_t(n) * kElementBytes).base.raw();
  const std::uint32_t strip = core.max_vl(kElementBytes);

  std::uint64_t id = 0;
  for (std::uint32_t done = 0; done < n;)
    {
      const std::uint32_t vl = std::min(strip, n - done);
      const std::uint64_t off = std::uint64_t(done) * kElementBytes;
      auto& s = w.stream;
      s.push_back(VectorInstruction::memory(
          id++, VectorMemOp::unit_stride(VirtualAddress(x + off), kElementBytes, vl), {}, 0));
      s.push_back(VectorInstruction::memory(
          id++, VectorMemOp::unit_stride(VirtualAddress(y + off), kElementBytes, vl), {}, 1));
      s.push_back(VectorInstruction::arithmetic(id++, vl, {0, 1}, 1, core.fp_rate_per_lane));
      s.push_back(VectorInstruction::memory(
          id++, VectorMemOp::unit_stride(VirtualAddress(y + off), kElementBytes, vl, true), {1},
          {}));
      done += vl;
    }
  return w;
}

Workload
gen_indexed_gather(std::uint32_t rows, std::uint32_t nnz_per_row, std::uint64_t seed)
{
  Workload w;
  w.spec.kind = IndexedGatherKernel{rows, nnz_per_row};
  w.spec.validate();
  constexpr std::uint64_t per_page = kPageSize / kElementBytes;
  const std::uint64_t values =
      (std::uint64_t(rows) * nnz_per_row + per_page - 1) / per_page * per_page;
  const std::uint64_t vals = w.layout.add("values", values * kElementBytes).base.raw();
  const std::uint64_t y = w.layout.add("y", std::uint64_t(rows) * kElementBytes).base.raw();

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint64_t> pick(0, values - 1);
  std::uint64_t id = 0;
  for (std::uint32_t row = 0; row < rows; ++row)
    {
      std::vector<std::uint64_t> offsets(nnz_per_row);
      for (auto& o : offsets)
        o = pick(rng) * kElementBytes;
      w.stream.push_back(VectorInstruction::memory(
          id++, VectorMemOp::indexed(VirtualAddress(vals), std::move(offsets), kElementBytes), {},
          0));
      w.stream.push_back(VectorInstruction::arithmetic(id++, nnz_per_row, {0}, 1, 1, true));
      w.stream.push_back(
          ScalarMemAccess{VirtualAddress(y + std::uint64_t(row) * kElementBytes), AccessKind::Store});
    }
  return w;
}

Workload
generate(const KernelSpec& spec, std::uint64_t seed, const CoreTimingParams& core)
{
  return std::visit(
      overloaded{
          [&](const MatmulKernel& k) { return gen_matmul(k.n, core); },
          [&](const AxpyKernel& k) { return gen_axpy(k.n, core); },
          [&](const IndexedGatherKernel& k) {
            return gen_indexed_gather(k.rows, k.nnz_per_row, seed);
          },
      },
      spec.kind);
}

InstructionStream
repeat(const InstructionStream& stream, unsigned times)
{
  InstructionStream out;
  out.reserve(stream.size() * times);
  std::uint64_t id = 0;
  for (unsigned t = 0; t < times; ++t)
    for (const StreamItem& item : stream)
      {
        out.push_back(item);
        if (auto* v = std::get_if<VectorInstruction>(&out.back()))
          v->id = id++;
      }
  return out;
}

std::vector<TraceRecord>
trace(const InstructionStream& stream)
{
  std::vector<TraceRecord> out;
  for (const StreamItem& item : stream)
    {
      if (auto* s = std::get_if<ScalarMemAccess>(&item))
        {
          out.push_back({s->access, s->vaddr.raw(), s->bytes, AccessSource::Scalar});
          continue;
        }
      const VectorMemOp* op = std::get<VectorInstruction>(item).mem_op();
      if (not op)
        continue;
      for (const Burst& u : translation_units(*op))
        out.push_back({op->access_kind(), u.start_vaddr.raw(), u.length_bytes, AccessSource::Vector});
    }
  return out;
}

std::set<std::uint64_t>
distinct_pages(const std::vector<TraceRecord>& records)
{
  std::set<std::uint64_t> pages;
  for (const TraceRecord& r : records)
    for (std::uint64_t p = r.vaddr >> kPageShift; p <= (r.vaddr + r.bytes - 1) >> kPageShift; ++p)
      pages.insert(p);
  return pages;
}

void
write_trace(std::ostream& os, const std::vector<TraceRecord>& records)
{
  for (const TraceRecord& r : records)
    os << (r.kind == AccessKind::Load ? "load" : "store") << ' ' << to_hex(r.vaddr) << ' '
       << r.bytes << ' ' << (r.source == AccessSource::Scalar ? "scalar" : "vector") << '\n';
}

StreamCounts
count(const InstructionStream& stream)
{
  StreamCounts c;
  for (const StreamItem& item : stream)
    {
      if (auto* s = std::get_if<ScalarMemAccess>(&item))
        {
          (s->access == AccessKind::Load ? c.scalar_loads : c.scalar_stores)++;
          continue;
        }
      const auto& v = std::get<VectorInstruction>(item);
      if (const VectorMemOp* op = v.mem_op())
        (op->is_store ? c.vector_stores : c.vector_loads)++;
      else
        ++c.vector_arith;
    }
  return c;
}

}  // namespace vvmsim
