// Copyright 2026 The Cooplab Authors
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

#ifndef COOPLAB_ERRORS_H_
#define COOPLAB_ERRORS_H_

#include <stdexcept>
#include <string>

namespace cooplab {

// Base for every error raised by the library. The subclasses name the
// failure category so callers (mainly the CLI) can pick remediation hints.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Action or type index outside its valid range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Matrix or vector dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An exhaustive computation would exceed its enumeration cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// A numeric argument lies outside the domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents. Carries the 1-based line when known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what, int line = 0)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A record needed by a computation is missing or inconsistent.
class DataError : public Error {
 public:
  using Error::Error;
};

// A structural invariant was violated (e.g. an empty equilibrium set).
class InvariantError : public Error {
 public:
  using Error::Error;
};

// Non-finite values appeared during a numeric update.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Rethrows the in-flight library error with `context` prefixed, keeping its
// category. Must be called from inside a catch block.
[[noreturn]] inline void RethrowWithContext(const std::string& context) {
  try {
    throw;
  } catch (const RangeError& e) {
    throw RangeError(context + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(context + e.what());
  } catch (const CapacityError& e) {
    throw CapacityError(context + e.what());
  } catch (const DomainError& e) {
    throw DomainError(context + e.what());
  } catch (const FormatError& e) {
    throw FormatError(context + e.what());
  } catch (const DataError& e) {
    throw DataError(context + e.what());
  } catch (const InvariantError& e) {
    throw InvariantError(context + e.what());
  } catch (const NumericError& e) {
    throw NumericError(context + e.what());
  } catch (const Error& e) {
    throw Error(context + e.what());
  }
}

}  // namespace cooplab

#endif  // COOPLAB_ERRORS_H_
