// Copyright 2026 The sapa-cpp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace sapa {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-range tensor access.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Inconsistent shapes, hyperparameters, or unknown enum names.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed tensor/params files. Messages carry the failing byte offset.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Non-finite values where finite input is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace sapa
