// Copyright 2026 The corrqec Authors
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

namespace corrqec {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// Problem size beyond what an exact (exponential-cost) routine supports.
class SizeLimitError : public DomainError {
   public:
    using DomainError::DomainError;
};

/// Malformed serialized input.
class FormatError : public DomainError {
   public:
    using DomainError::DomainError;
};

/// A numerical procedure could not reach its tolerance. Carries the best
/// estimate so callers can still report it.
class ConvergenceError : public std::runtime_error {
   public:
    ConvergenceError(const std::string &what, double best_estimate, double achieved_error)
        : std::runtime_error(what), best_estimate(best_estimate), achieved_error(achieved_error) {
    }

    double best_estimate;
    double achieved_error;
};

}  // namespace corrqec
