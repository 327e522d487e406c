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
#include <iosfwd>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "vvmsim/os_model.hpp"
#include "vvmsim/vector_core.hpp"

namespace vvmsim {

inline constexpr std::uint64_t kDataBase = 0x1000'0000;
inline constexpr std::uint64_t kFrameBase = 0x8000'0000;
inline constexpr unsigned kElementBytes = 8;

struct MatmulKernel
{
  std::uint32_t n = 32;
};

struct AxpyKernel
{
  std::uint32_t n = 1024;
};

struct IndexedGatherKernel
{
  std::uint32_t rows = 64;
  std::uint32_t nnz_per_row = 5;
};

struct KernelSpec
{
  std::variant<MatmulKernel, AxpyKernel, IndexedGatherKernel> kind;

  void validate() const;
  /// "matmul64", "axpy1024", "gather64x5".
  std::string label() const;
  /// Matrix or vector dimension; rows for the gather kernel.
  std::uint32_t size() const;
  const char* family() const;

  static KernelSpec parse(const std::string& label);
};

struct Region
{
  std::string name;
  VirtualAddress base;
  std::uint64_t bytes = 0;

  bool contains(std::uint64_t vaddr, std::uint64_t len) const;
};

struct MemoryLayout
{
  std::vector<Region> regions;
  std::uint64_t footprint_pages = 0;

  /// Appends a region at the next page boundary.
  const Region& add(std::string name, std::uint64_t bytes);
  const Region& region(const std::string& name) const;
  bool contains(std::uint64_t vaddr, std::uint64_t len) const;

  /// Sequential frames from kFrameBase in address order.
  PagePlan page_plan() const;
  void map_all(PageTable& pt) const;

private:
  void recount();
};

struct ScalarMemAccess
{
  VirtualAddress vaddr;
  AccessKind access = AccessKind::Load;
  unsigned bytes = kElementBytes;
};

using StreamItem = std::variant<VectorInstruction, ScalarMemAccess>;
using InstructionStream = std::vector<StreamItem>;

struct Workload
{
  KernelSpec spec;
  MemoryLayout layout;
  InstructionStream stream;
};

/// Register-blocked outer product C = A * B over n x n fp64 matrices.
Workload gen_matmul(std::uint32_t n, const CoreTimingParams& core = {});
/// y = a * x + y, strip-mined to one register.
Workload gen_axpy(std::uint32_t n, const CoreTimingParams& core = {});
/// One gather plus reduction per row over a page-rounded value array.
Workload gen_indexed_gather(std::uint32_t rows, std::uint32_t nnz_per_row, std::uint64_t seed);

Workload generate(const KernelSpec& spec, std::uint64_t seed, const CoreTimingParams& core = {});

/// Concatenates `times` copies with fresh instruction ids.
InstructionStream repeat(const InstructionStream& stream, unsigned times);

struct TraceRecord
{
  AccessKind kind = AccessKind::Load;
  std::uint64_t vaddr = 0;
  std::uint64_t bytes = 0;
  AccessSource source = AccessSource::Scalar;
};

/// Every memory access of the stream; vector operations appear as their
/// translation units.
std::vector<TraceRecord> trace(const InstructionStream& stream);

std::set<std::uint64_t> distinct_pages(const std::vector<TraceRecord>& records);

/// Text form: "<load|store> 0x<vaddr> <bytes> <scalar|vector>" per line.
void write_trace(std::ostream& os, const std::vector<TraceRecord>& records);

struct StreamCounts
{
  std::uint64_t vector_loads = 0;
  std::uint64_t vector_stores = 0;
  std::uint64_t vector_arith = 0;
  std::uint64_t scalar_loads = 0;
  std::uint64_t scalar_stores = 0;
};

StreamCounts count(const InstructionStream& stream);

}  // namespace vvmsim
