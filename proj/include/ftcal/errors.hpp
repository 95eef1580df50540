// Copyright 2026 The ftcal Authors
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

#ifndef FTCAL__ERRORS_HPP_
#define FTCAL__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ftcal
{

/// Base of every error raised by the library. `kind()` is a stable short
/// identifier used in sweep reports and CLI messages.
class Error : public std::runtime_error
{
public:
  Error(std::string kind, const std::string & what)
  : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string & kind() const noexcept {return kind_;}

private:
  std::string kind_;
};

class DimensionError : public Error
{
public:
  explicit DimensionError(const std::string & what)
  : Error("dimension", what) {}
};

/// Non-finite or out-of-range input values.
class DataError : public Error
{
public:
  explicit DataError(const std::string & what)
  : Error("data", what) {}
};

/// Normal equations too close to singular. Carries the reciprocal
/// condition estimate that triggered the failure.
class IllConditionedError : public Error
{
public:
  IllConditionedError(const std::string & what, double rcond)
  : Error("ill_conditioned", what), rcond_(rcond) {}

  double rcond() const noexcept {return rcond_;}

private:
  double rcond_;
};

class DegenerateGeometryError : public Error
{
public:
  explicit DegenerateGeometryError(const std::string & what)
  : Error("degenerate_geometry", what) {}
};

class SingularMatrixError : public Error
{
public:
  explicit SingularMatrixError(const std::string & what)
  : Error("singular_matrix", what) {}
};

class UndefinedBaselineError : public Error
{
public:
  explicit UndefinedBaselineError(const std::string & what)
  : Error("undefined_baseline", what) {}
};

class ParseError : public Error
{
public:
  explicit ParseError(const std::string & what)
  : Error("parse", what) {}
};

class IoError : public Error
{
public:
  explicit IoError(const std::string & what)
  : Error("io", what) {}
};

}  // namespace ftcal

#endif  // FTCAL__ERRORS_HPP_
