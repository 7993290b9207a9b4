// Copyright 2026 The Topover Authors
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

#ifndef TOPOVER_ERROR_H_
#define TOPOVER_ERROR_H_

#include <stdexcept>
#include <string>

namespace topover {

// Recoverable input errors. The CLI maps every Error to exit code 2;
// std::logic_error (broken internal invariants) maps to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InsufficientFeaturesError : public Error {
 public:
  using Error::Error;
};

class InvalidKeypointError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class UndefinedQueryError : public Error {
 public:
  using Error::Error;
};

class MissingGroundTruthError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace topover

#endif  // TOPOVER_ERROR_H_
