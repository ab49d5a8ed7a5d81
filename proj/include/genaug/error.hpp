// Copyright 2026 The genaug Authors
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

namespace genaug {

/// Base of every error thrown by the library. `kind()` is a stable tag used in
/// machine-readable error records.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &message, std::string kind = "error") :
        std::runtime_error{ message },
        kind_{ std::move(kind) } {}

    [[nodiscard]] const std::string &kind() const noexcept { return kind_; }

  private:
    std::string kind_;
};

/// Tensor, image or vector dimensions disagree with what an operation expects.
class ShapeError : public Error {
  public:
    explicit ShapeError(const std::string &message) :
        Error{ message, "shape_mismatch" } {}
};

/// A precondition on arguments or configuration values is violated.
class InvalidArgument : public Error {
  public:
    explicit InvalidArgument(const std::string &message) :
        Error{ message, "invalid_argument" } {}
};

/// A numeric routine met a NaN/Inf or a spectrum it cannot handle.
class NumericError : public Error {
  public:
    explicit NumericError(const std::string &message) :
        Error{ message, "numeric" } {}
};

/// Reading or writing a file failed, or its content is malformed.
class IoError : public Error {
  public:
    explicit IoError(const std::string &message) :
        Error{ message, "io" } {}
};

}  // namespace genaug
