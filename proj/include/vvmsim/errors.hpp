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
#include <stdexcept>
#include <string>

namespace vvmsim {

using Cycle = std::uint64_t;

/// Base of every exception thrown by the simulator library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public Error
{
public:
  using Error::Error;
};

/// Run aborted by the model itself (segmentation fault, livelock, deadlock).
/// The CLI maps this to exit code 3.
class SimulationAbort : public Error
{
public:
  using Error::Error;
};

class AddressError : public Error
{
public:
  using Error::Error;
};

class AlignmentError : public Error
{
public:
  using Error::Error;
};

/// A caller broke an operation precondition.
class ContractViolation : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

}  // namespace vvmsim
