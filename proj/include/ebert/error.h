// Copyright 2026 The E-BERT Tools Authors.
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

#ifndef EBERT_ERROR_H_
#define EBERT_ERROR_H_

#include <stdexcept>
#include <string>

namespace ebert {

// Malformed or inconsistent input data (files, fixtures, datasets).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &what) : std::runtime_error(what) {}
};

// A remote endpoint could not be reached or answered with an error.
class EndpointError : public std::runtime_error {
 public:
  explicit EndpointError(const std::string &what)
      : std::runtime_error(what) {}
};

// Precondition violations by the caller (dimension mismatches, bad
// arguments) are reported as std::invalid_argument.

}  // namespace ebert

#endif  // EBERT_ERROR_H_
