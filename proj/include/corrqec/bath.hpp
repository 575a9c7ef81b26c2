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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "corrqec/decoherence_pair.hpp"
#include "corrqec/errors.hpp"
#include "corrqec/quadrature.hpp"

/// Bosonic bath: spectral function and the distance-dependent decoherence
/// parameter
///
///     Γ_r(τ) = A ∫_0^∞ dω ω^s (1 - cos ωτ)/ω² coth(ω/2T) sin(ωr)/(ωr) e^{-ω/Ω}
///
/// evaluated by oscillation-aware adaptive quadrature. Natural units
/// (ħ = c = k_B = 1) throughout.
namespace corrqec::bath {

struct BathParams {
    double A = 0.0;      ///< coupling amplitude, units ω^{1-s}
    double s = 1.0;      ///< spectral exponent, 0 < s < 3
    double Omega = 1.0;  ///< cutoff frequency
    double T = 0.0;      ///< temperature

    void validate() const {
        if (!std::isfinite(A) || !std::isfinite(s) || !std::isfinite(Omega) || !std::isfinite(T)) {
            throw DomainError("bath parameters must be finite");
        }
        if (A < 0.0) {
            throw DomainError("bath amplitude A must be non-negative");
        }
        if (!(s > 0.0 && s < 3.0)) {
            throw DomainError("spectral exponent s must lie in (0, 3)");
        }
        if (!(Omega > 0.0)) {
            throw DomainError("cutoff Omega must be positive");
        }
        if (T < 0.0) {
            throw DomainError("temperature T must be non-negative");
        }
    }
};

struct GeometryParams {
    double r = 0.0;    ///< inter-qubit distance
    double tau = 0.0;  ///< observation time

    void validate() const {
        if (!std::isfinite(r) || !std::isfinite(tau) || r < 0.0 || tau < 0.0) {
            throw DomainError("geometry parameters r and tau must be finite and non-negative");
        }
    }
};

struct GammaOptions {
    /// Defaults to 1e-12 * A * Omega^(s-1) when unset.
    std::optional<double> abs_tol;
    double rel_tol = 1e-9;
    std::size_t max_panels = std::size_t{1} << 23;
};

struct GammaResult {
    double value = 0.0;
    double abs_error = 0.0;
    /// Set when 2 <= s < 3 and r is within 1e-3 τ of τ, where Γ_r is singular.
    bool near_singularity = false;
    std::size_t panels = 0;
};

/// J(ω) = A ω^s e^{-ω/Ω}.
inline double spectral_density(const BathParams &bath, double omega) {
    bath.validate();
    if (!(omega >= 0.0)) {
        throw DomainError("spectral_density requires omega >= 0");
    }
    if (bath.A == 0.0 || omega == 0.0) {
        return 0.0;
    }
    return bath.A * std::pow(omega, bath.s) * std::exp(-omega / bath.Omega);
}

namespace detail {

inline double sinc(double y) {
    if (std::abs(y) < 1e-4) {
        return 1.0 - y * y / 6.0;
    }
    return std::sin(y) / y;
}

/// ω coth(ω / 2T), finite at ω = 0. T = 0 is the exact coth = 1 branch.
inline double omega_coth(double omega, double T) {
    if (T == 0.0) {
        return omega;
    }
    double x = omega / (2.0 * T);
    if (x < 1e-4) {
        return 2.0 * T * (1.0 + x * x / 3.0);
    }
    if (x > 20.0) {
        return omega * (1.0 + 2.0 * std::exp(-2.0 * x));
    }
    return omega / std::tanh(x);
}

/// The integrand divided by A ω^{s-1}; every factor has a finite ω → 0 limit:
/// (1 - cos ωτ)/ω² = 2 (sin(ωτ/2)/ω)².
inline double regular_kernel(double omega, const BathParams &bath, const GeometryParams &geom) {
    double half_sin = omega == 0.0 ? 0.5 * geom.tau : std::sin(0.5 * omega * geom.tau) / omega;
    return 2.0 * half_sin * half_sin * omega_coth(omega, bath.T) * sinc(omega * geom.r) *
           std::exp(-omega / bath.Omega);
}

inline double upper_limit(const BathParams &bath) {
    return bath.Omega * std::max(40.0, 10.0 * bath.s);
}

/// Bound on the neglected ∫_W^∞ of |integrand|.
inline double tail_bound(const BathParams &bath, const GeometryParams &geom, double W) {
    double coth = bath.T == 0.0 ? 1.0 : omega_coth(W, bath.T) / W;
    double sinc_bound = geom.r > 0.0 ? std::min(1.0, 1.0 / (W * geom.r)) : 1.0;
    double growth = 1.0 - std::max(0.0, bath.s - 2.0) * bath.Omega / W;
    return 2.0 * bath.A * coth * sinc_bound * std::pow(W, bath.s - 2.0) * bath.Omega * std::exp(-W / bath.Omega) /
           growth;
}

}  // namespace detail

/// Γ_r for the given bath and geometry.
///
/// The first panel [0, h] is integrated in the variable v with ω = h v^p,
/// p = ceil(2/s), which turns the ω^{s-1} endpoint behaviour into a smooth
/// v^{ps-1}. Remaining panels are no wider than π / (2 max(r, τ, 1/Ω)).
/// Throws ConvergenceError when the panel budget runs out.
inline GammaResult gamma(const BathParams &bath, const GeometryParams &geom, const GammaOptions &opt = {}) {
    bath.validate();
    geom.validate();
    GammaResult out;
    out.near_singularity = bath.s >= 2.0 && std::abs(geom.r - geom.tau) < 1e-3 * geom.tau;
    if (bath.A == 0.0 || geom.tau == 0.0) {
        return out;
    }

    const double W = detail::upper_limit(bath);
    const double fastest = std::max({geom.r, geom.tau, 1.0 / bath.Omega});
    const double width = std::min(std::numbers::pi / (2.0 * fastest), W);
    const double h = width;
    const double p = bath.s >= 2.0 ? 1.0 : std::ceil(2.0 / bath.s);
    const double v_exponent = p * bath.s - 1.0;
    const double head_scale = bath.A * std::pow(h, bath.s) * p;

    // u in [0, 1] is the substituted head panel, u > 1 maps to ω = h + (u - 1).
    auto integrand = [&](double u) {
        if (u <= 1.0) {
            double omega = h * std::pow(u, p);
            return head_scale * std::pow(u, v_exponent) * detail::regular_kernel(omega, bath, geom);
        }
        double omega = h + (u - 1.0);
        return bath.A * std::pow(omega, bath.s - 1.0) * detail::regular_kernel(omega, bath, geom);
    };

    std::vector<double> edges{0.0};
    if (W > h) {
        std::vector<double> body = uniform_edges(h, W, width);
        for (double e : body) {
            edges.push_back(1.0 + (e - h));
        }
    } else {
        edges.push_back(1.0);
    }

    AdaptiveOptions aopt;
    aopt.abs_tol = opt.abs_tol.value_or(1e-12 * bath.A * std::pow(bath.Omega, bath.s - 1.0));
    aopt.rel_tol = opt.rel_tol;
    aopt.max_panels = std::max(opt.max_panels, edges.size() + 16);
    QuadratureResult q = integrate_panels(integrand, edges, aopt);

    out.value = q.value;
    out.abs_error = q.abs_error + detail::tail_bound(bath, geom, W);
    out.panels = q.panels;
    if (!q.converged) {
        throw ConvergenceError("gamma quadrature did not reach tolerance within the panel budget", out.value,
                               out.abs_error);
    }
    return out;
}

/// Γ0 (r = 0) and Γr at the same observation time.
struct GammaPair {
    GammaResult zero;
    GammaResult at_r;

    /// Validated pair; throws DomainError if Γ0 >= Γr >= 0 fails, which can
    /// happen for 2 <= s < 3.
    DecoherencePair decoherence() const {
        return DecoherencePair(zero.value, at_r.value);
    }
    double max_error() const {
        return std::max(zero.abs_error, at_r.abs_error);
    }
};

inline GammaPair gamma_pair(const BathParams &bath, double r, double tau, const GammaOptions &opt = {}) {
    return GammaPair{gamma(bath, GeometryParams{0.0, tau}, opt), gamma(bath, GeometryParams{r, tau}, opt)};
}

/// Γ(s, a r0, a τ0, T, Ω), computed directly.
inline double scaled_gamma(const BathParams &bath, const GeometryParams &base, double a,
                           const GammaOptions &opt = {}) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("scale factor must be positive");
    }
    return gamma(bath, GeometryParams{a * base.r, a * base.tau}, opt).value;
}

/// Both sides of Γ(s, a r0, a τ0, T, Ω) = a^{1-s} Γ(s, r0, τ0, aT, aΩ).
struct ScalingCheck {
    GammaResult direct;   ///< left-hand side
    GammaResult rescaled; ///< Γ(s, r0, τ0, aT, aΩ) before the a^{1-s} factor
    double factor = 1.0;  ///< a^{1-s}

    double lhs() const {
        return direct.value;
    }
    double rhs() const {
        return factor * rescaled.value;
    }
    double combined_error() const {
        return direct.abs_error + factor * rescaled.abs_error;
    }
};

inline ScalingCheck scaling_identity(const BathParams &bath, const GeometryParams &base, double a,
                                     const GammaOptions &opt = {}) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw DomainError("scale factor must be positive");
    }
    ScalingCheck check;
    check.direct = gamma(bath, GeometryParams{a * base.r, a * base.tau}, opt);
    BathParams hot = bath;
    hot.T = a * bath.T;
    hot.Omega = a * bath.Omega;
    GammaOptions hot_opt = opt;
    if (opt.abs_tol) {
        hot_opt.abs_tol = *opt.abs_tol * std::pow(a, bath.s - 1.0);
    }
    check.rescaled = gamma(hot, base, hot_opt);
    check.factor = std::pow(a, 1.0 - bath.s);
    return check;
}

}  // namespace corrqec::bath
