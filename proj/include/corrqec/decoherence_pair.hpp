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

#include <cmath>

#include "corrqec/errors.hpp"

namespace corrqec {

/// Single-qubit and inter-qubit decoherence parameters (Γ0, Γr) of the
/// equal-distance dephasing channel. Construction enforces Γ0 >= Γr >= 0.
class DecoherencePair {
   public:
    constexpr DecoherencePair() = default;

    DecoherencePair(double gamma0, double gamma_r) : gamma0_(gamma0), gamma_r_(gamma_r) {
        if (!std::isfinite(gamma0) || !std::isfinite(gamma_r)) {
            throw DomainError("decoherence parameters must be finite");
        }
        if (gamma_r < 0.0) {
            throw DomainError("gammaR must be non-negative");
        }
        if (gamma0 < gamma_r) {
            throw DomainError("gamma0 must be at least gammaR");
        }
    }

    double gamma0() const {
        return gamma0_;
    }
    double gamma_r() const {
        return gamma_r_;
    }
    /// Γ0 - Γr, the part of the dephasing that acts independently per qubit.
    double uncorrelated() const {
        return gamma0_ - gamma_r_;
    }

    bool operator==(const DecoherencePair &) const = default;

   private:
    double gamma0_ = 0.0;
    double gamma_r_ = 0.0;
};

}  // namespace corrqec
