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
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "corrqec/bath.hpp"
#include "corrqec/binomial.hpp"
#include "corrqec/decoherence_pair.hpp"
#include "corrqec/dephasing.hpp"
#include "corrqec/errors.hpp"
#include "corrqec/quadrature.hpp"

/// Code-averaged residual error of CSS codes under correlated dephasing and
/// its large-n consequences.
///
/// With X Gaussian of variance Γr/2 the averaged residual is
/// E_X[ P(Bin(n, p_X) > t) ]. For independent errors (Γr = 0) it decays
/// exponentially in n when p_o < q = (t+1)/n; for any Γr > 0 it tends to the
/// Gaussian mass of {x : p_x > q}.
namespace corrqec::residual {

struct ResidualQuery {
    std::uint64_t n = 1;
    std::uint64_t t = 0;
    DecoherencePair pair;

    /// q = (t + 1) / n.
    double q() const {
        return static_cast<double>(t + 1) / static_cast<double>(n);
    }
    void validate() const {
        if (n < 1) {
            throw DomainError("code length must be at least 1");
        }
        if (t >= n) {
            throw DomainError("correctable errors t must be below n");
        }
    }
};

struct ResidualOptions {
    double rel_tol = 1e-12;
    std::size_t max_panels = std::size_t{1} << 18;
};

/// Σ_{w>t} C(n,w) p_o^w (1-p_o)^{n-w} with p_o = (1 - e^{-Γ0})/2.
inline double independent_residual(std::uint64_t n, std::uint64_t t, double gamma0) {
    if (n < 1 || t >= n) {
        throw DomainError("independent_residual requires 0 <= t < n");
    }
    if (!(gamma0 >= 0.0) || !std::isfinite(gamma0)) {
        throw DomainError("gamma0 must be finite and non-negative");
    }
    return binomial_tail(n, t + 1, dephasing::single_qubit_error(gamma0));
}

namespace detail {

/// Points in [0, L] where p_x crosses level.
inline std::vector<double> crossings(const DecoherencePair &pair, double level, double L) {
    std::vector<double> out;
    double c = (1.0 - 2.0 * level) * std::exp(pair.uncorrelated());
    if (!(c > -1.0 && c < 1.0)) {
        return out;
    }
    double x0 = 0.5 * std::acos(c);
    for (double base = 0.0; base - x0 <= L; base += std::numbers::pi) {
        for (double x : {base + x0, base + std::numbers::pi - x0}) {
            if (x > 0.0 && x < L) {
                out.push_back(x);
            }
        }
    }
    return out;
}

}  // namespace detail

/// [Δ]^n_t = ∫ dx (πΓr)^{-1/2} e^{-x²/Γr} I_{p_x}(t+1, n-t).
///
/// The x-integral runs over [0, 12√Γr] (the integrand is even) with extra
/// breakpoints clustered around each point where the binomial tail steps,
/// i.e. where p_x = (t+1)/n. Γr = 0 is exactly independent_residual.
inline double code_avg_residual(const ResidualQuery &query, const ResidualOptions &opt = {}) {
    query.validate();
    const DecoherencePair &pair = query.pair;
    if (pair.gamma_r() == 0.0) {
        return independent_residual(query.n, query.t, pair.gamma0());
    }
    if (pair.gamma0() == 0.0) {
        return 0.0;
    }
    const double root = std::sqrt(pair.gamma_r());
    const double L = 12.0 * root;
    const double norm = 1.0 / std::sqrt(std::numbers::pi * pair.gamma_r());
    const std::uint64_t k = query.t + 1;
    auto integrand = [&](double x) {
        double p = dephasing::p_of_x(pair, x);
        double log_tail = log_binomial_tail(query.n, k, std::min(p, 1.0));
        return 2.0 * norm * std::exp(log_tail - x * x / pair.gamma_r());
    };

    std::vector<double> edges = uniform_edges(0.0, L, root / 4.0);
    const double q = query.q();
    const double spread = std::sqrt(q * (1.0 - q) / static_cast<double>(query.n));
    for (double x : detail::crossings(pair, q, L)) {
        double slope = std::max(std::exp(-pair.uncorrelated()) * std::abs(std::sin(2.0 * x)), 1e-12);
        double dx = spread / slope;
        edges.push_back(x);
        for (double m : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            for (double e : {x - m * dx, x + m * dx}) {
                if (e > 0.0 && e < L) {
                    edges.push_back(e);
                }
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    AdaptiveOptions aopt;
    aopt.abs_tol = std::numeric_limits<double>::min();
    aopt.rel_tol = opt.rel_tol;
    aopt.max_panels = std::max(opt.max_panels, edges.size() + 16);
    QuadratureResult r = integrate_panels(integrand, edges, aopt);
    if (!r.converged) {
        throw ConvergenceError("code-averaged residual quadrature did not converge", r.value, r.abs_error);
    }
    return std::clamp(r.value, 0.0, 1.0);
}

/// Σ_{w=t+1}^n C(n,w) β_w, the coefficient route for the same quantity.
inline double residual_from_coefficients(const ResidualQuery &query) {
    query.validate();
    if (query.n > 4096) {
        throw SizeLimitError("coefficient route limited to n <= 4096");
    }
    const auto n = static_cast<unsigned>(query.n);
    double sum = 0.0;
    for (unsigned w = static_cast<unsigned>(query.t) + 1; w <= n; ++w) {
        sum += std::exp(log_binomial_coefficient(n, w) + dephasing::log_beta(n, w, query.pair));
    }
    return sum;
}

struct AsymptoticResidual {
    double exact = 0.0;        ///< Gaussian mass of {x : p_x > q}
    double erfc_approx = 0.0;  ///< erfc √(q/Γr)
};

/// n → ∞ limit of the code-averaged residual at fixed q = (t+1)/n.
///
/// {p_x > q} is {x mod π : cos 2x < (1 - 2q) e^{Γ0-Γr}}, a union of intervals
/// (x0 + jπ, π - x0 + jπ); their Gaussian masses are summed in closed form.
inline AsymptoticResidual asymptotic_residual(double q, const DecoherencePair &pair) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("asymptotic_residual requires 0 < q < 1");
    }
    AsymptoticResidual out;
    if (pair.gamma_r() == 0.0) {
        double v = dephasing::single_qubit_error(pair.gamma0()) > q ? 1.0 : 0.0;
        return AsymptoticResidual{v, v};
    }
    const double root = std::sqrt(pair.gamma_r());
    out.erfc_approx = std::erfc(std::sqrt(q / pair.gamma_r()));
    const double c = (1.0 - 2.0 * q) * std::exp(pair.uncorrelated());
    if (c >= 1.0) {
        out.exact = 1.0;
        return out;
    }
    if (c <= -1.0) {
        out.exact = 0.0;
        return out;
    }
    const double x0 = 0.5 * std::acos(c);
    double total = 0.0;
    for (int j = 0;; ++j) {
        double a = (x0 + j * std::numbers::pi) / root;
        double b = (std::numbers::pi - x0 + j * std::numbers::pi) / root;
        double mass = a < 1.0 ? 0.5 * (std::erf(b) - std::erf(a)) : 0.5 * (std::erfc(a) - std::erfc(b));
        total += mass;
        if (a > 40.0 || (mass == 0.0 && j > 0) || mass < 1e-18 * total) {
            break;
        }
    }
    out.exact = std::clamp(2.0 * total, 0.0, 1.0);
    return out;
}

/// Largest Γr that keeps the asymptotic residual below b n^{-μ}.
struct GammaBudget {
    bool unconstrained = false;  ///< b n^{-μ} >= 1: any Γr qualifies
    double exact = std::numeric_limits<double>::infinity();  ///< q / erfc^{-1}(b n^{-μ})²
    double c0 = 0.0;             ///< q/exact - μ ln n, the constant in q/(c0 + μ ln n)
    double leading_order = std::numeric_limits<double>::infinity();  ///< q / (μ ln n - ln b)
};

inline GammaBudget gamma_budget(double n, double q, double mu, double b) {
    if (!(n >= 2.0) || !std::isfinite(n)) {
        throw DomainError("gamma_budget requires n >= 2");
    }
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("gamma_budget requires 0 < q < 1");
    }
    if (!(mu >= 0.0) || !(b > 0.0)) {
        throw DomainError("gamma_budget requires mu >= 0 and b > 0");
    }
    GammaBudget out;
    const double log_target = std::log(b) - mu * std::log(n);
    if (log_target >= 0.0) {
        out.unconstrained = true;
        return out;
    }
    const double z = boost::math::erfc_inv(std::exp(log_target));
    out.exact = q / (z * z);
    out.c0 = q / out.exact - mu * std::log(n);
    double denom = -log_target;
    out.leading_order = denom > 0.0 ? q / denom : std::numeric_limits<double>::infinity();
    return out;
}

/// Register growth r = a r0, τ = a τ0 with a = (n/n0)^y, plus the
/// residual-error budget Δ_max(n) = b n^{-μ}.
struct ScalingScenario {
    double A = 0.0;
    double s = 1.0;
    double y = 1.0 / 3.0;
    double r0 = 1.0;
    double tau0 = 1.0;
    double n0 = 1.0;
    double T = 0.0;
    double Omega = 1.0;
    double q = 0.05;
    double mu = 1.0;
    double b = 1.0;

    bath::BathParams bath() const {
        return bath::BathParams{A, s, Omega, T};
    }
    void validate() const {
        bath().validate();
        bath::GeometryParams{r0, tau0}.validate();
        if (!(y >= 1.0 / 3.0 - 1e-15)) {
            throw DomainError("growth exponent y must be at least 1/3");
        }
        if (!(mu > 0.0) || !(b > 0.0)) {
            throw DomainError("budget requires mu > 0 and b > 0");
        }
        if (!(n0 > 0.0)) {
            throw DomainError("base size n0 must be positive");
        }
        if (!(q > 0.0 && q < 1.0)) {
            throw DomainError("target ratio q must lie in (0, 1)");
        }
    }
};

struct ScalabilityRow {
    double n = 0.0;
    double a = 1.0;
    double gamma_eff = 0.0;
    double gamma_error = 0.0;
    GammaBudget budget;
    bool satisfied = true;
};

/// Γr at size n (computed directly at r = a r0, τ = a τ0) against its budget.
inline ScalabilityRow scalability_row(const ScalingScenario &scen, double n, const bath::GammaOptions &opt = {}) {
    scen.validate();
    ScalabilityRow row;
    row.n = n;
    row.a = std::pow(n / scen.n0, scen.y);
    bath::GammaResult g = bath::gamma(scen.bath(), bath::GeometryParams{row.a * scen.r0, row.a * scen.tau0}, opt);
    row.gamma_eff = g.value;
    row.gamma_error = g.abs_error;
    row.budget = gamma_budget(n, scen.q, scen.mu, scen.b);
    row.satisfied = row.budget.unconstrained || row.gamma_eff < row.budget.exact;
    return row;
}

struct ScalabilityReport {
    std::vector<ScalabilityRow> rows;
    bool no_noise = false;
    /// Asymptotic law: scalable iff s > 2 (or no coupling at all).
    bool scalable = false;
    /// Whether the largest grid sizes agree with the asymptotic law.
    bool grid_consistent = false;
    /// Smallest grid n from which every larger grid size violates the budget.
    std::optional<double> crossover_n;

    std::string verdict() const {
        if (no_noise) {
            return "scalable (no noise)";
        }
        return scalable ? "scalable" : "not scalable";
    }
};

/// Verdict from precomputed rows, ordered by increasing n.
inline ScalabilityReport summarize_scalability(const ScalingScenario &scen, std::vector<ScalabilityRow> rows) {
    ScalabilityReport rep;
    rep.no_noise = scen.A == 0.0;
    rep.scalable = rep.no_noise || scen.s > 2.0;
    if (!rows.empty() && !rows.back().satisfied) {
        std::size_t i = rows.size();
        while (i > 0 && !rows[i - 1].satisfied) {
            --i;
        }
        rep.crossover_n = rows[i].n;
    }
    if (!rows.empty()) {
        rep.grid_consistent = rows.back().satisfied == rep.scalable;
    }
    rep.rows = std::move(rows);
    return rep;
}

inline ScalabilityReport scalability_verdict(const ScalingScenario &scen, std::span<const double> n_grid,
                                             const bath::GammaOptions &opt = {}) {
    scen.validate();
    if (!std::is_sorted(n_grid.begin(), n_grid.end())) {
        throw DomainError("n grid must be sorted ascending");
    }
    std::vector<ScalabilityRow> rows;
    rows.reserve(n_grid.size());
    for (double n : n_grid) {
        rows.push_back(scalability_row(scen, n, opt));
    }
    return summarize_scalability(scen, std::move(rows));
}

}  // namespace corrqec::residual
