// Copyright 2026 The chshauth Authors
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

#ifndef CHSHAUTH_ERRORS_H_
#define CHSHAUTH_ERRORS_H_

#include <stdexcept>
#include <string>

namespace chshauth {

// Argument outside the mathematical domain of an operation (bad angle,
// unnormalized state, level index out of range, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The planner could not produce parameters meeting its guarantees.
class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Misuse of a provisioned pair batch (double measurement, unknown pair or
// session, unknown user).
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A transcript or message that is internally inconsistent.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TimeoutError : public TransportError {
 public:
  using TransportError::TransportError;
};

class DecodeError : public TransportError {
 public:
  using TransportError::TransportError;
};

class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AccessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace chshauth

#endif  // CHSHAUTH_ERRORS_H_
