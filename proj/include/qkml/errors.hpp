// Copyright 2026 The qkml developers
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

#include <stdexcept>
#include <string>

namespace qkml {

/// Base class for all qkml errors.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A user-supplied setting is out of range or inconsistent.
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// An API precondition was violated (dimension mismatch, bad argument).
class ContractError : public Error {
  public:
    using Error::Error;
};

/// Input data lies outside the mathematical domain of a method.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// The dataset cannot support the requested operation (class counts, folds).
class DataError : public Error {
  public:
    using Error::Error;
};

/// A numerical procedure failed (singular matrix, non-finite result).
class NumericError : public Error {
  public:
    using Error::Error;
};

/// A memory or size budget would be exceeded.
class ResourceError : public Error {
  public:
    using Error::Error;
};

/// A file could not be parsed (CSV, JSON, binary Gram).
class FormatError : public Error {
  public:
    using Error::Error;
};

/// An iterative solver did not reach its tolerance.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

} // namespace qkml
