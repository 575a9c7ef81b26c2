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
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "corrqec/decoherence_pair.hpp"
#include "corrqec/errors.hpp"
#include "corrqec/quadrature.hpp"
#include "corrqec/state.hpp"

/// Pure-dephasing channel of a qubit register coupled to a common bath.
///
/// In the σ_z product basis the channel damps each matrix element,
/// ρ_ημ → e^{-C_ημ} ρ_ημ. With all inter-qubit distances set equal,
///
///     C_ημ = |η ⊕ μ| (Γ0 - Γr) + (|η| - |μ|)² Γr.
///
/// The same channel written as ρ → Σ α_νν' Z_ν ρ Z_ν' has coefficients given
/// by a two-sided Walsh transform of e^{-C}; the diagonal ones depend only on
/// |ν| and equal the Gaussian-averaged binomial weights β_{|ν|}.
namespace corrqec::dephasing {

inline constexpr unsigned kMaxChannelQubits = 14;
inline constexpr unsigned kMaxAlphaQubits = 12;

inline double coefficient_c(const BitString &eta, const BitString &mu, const DecoherencePair &pair) {
    eta.check_same(mu);
    double weight_gap = static_cast<double>(eta.weight()) - static_cast<double>(mu.weight());
    return static_cast<double>((eta ^ mu).weight()) * pair.uncorrelated() + weight_gap * weight_gap * pair.gamma_r();
}

/// General pairwise coupling Γ_{|r_l - r_m|} for arbitrary qubit positions:
/// C_ημ = Σ_lm (η_l - μ_l)(η_m - μ_m) G_lm.
class CouplingMatrix {
   public:
    explicit CouplingMatrix(unsigned n) : n_(n), g_(static_cast<std::size_t>(n) * n, 0.0) {
        if (n == 0 || n > 64) {
            throw DomainError("coupling matrix size must be in [1, 64]");
        }
    }

    /// Γ0 on the diagonal, Γr everywhere else.
    static CouplingMatrix uniform(unsigned n, const DecoherencePair &pair) {
        CouplingMatrix m(n);
        for (unsigned l = 0; l < n; ++l) {
            for (unsigned k = 0; k < n; ++k) {
                m.set(l, k, l == k ? pair.gamma0() : pair.gamma_r());
            }
        }
        return m;
    }

    unsigned size() const {
        return n_;
    }
    double at(unsigned l, unsigned m) const {
        return g_[static_cast<std::size_t>(l) * n_ + m];
    }
    /// Sets both (l, m) and (m, l).
    void set(unsigned l, unsigned m, double value) {
        g_[static_cast<std::size_t>(l) * n_ + m] = value;
        g_[static_cast<std::size_t>(m) * n_ + l] = value;
    }

    double coefficient(BasisIndex eta, BasisIndex mu) const {
        std::array<int, 64> d{};
        for (unsigned l = 0; l < n_; ++l) {
            d[l] = static_cast<int>((eta >> l) & 1u) - static_cast<int>((mu >> l) & 1u);
        }
        double c = 0.0;
        for (unsigned l = 0; l < n_; ++l) {
            if (d[l] == 0) {
                continue;
            }
            for (unsigned m = 0; m < n_; ++m) {
                if (d[m] != 0) {
                    c += d[l] * d[m] * at(l, m);
                }
            }
        }
        return c;
    }

   private:
    unsigned n_;
    std::vector<double> g_;
};

namespace detail {

/// e^{-C} for the equal-distance model, tabulated on (|η⊕μ|, |η|, |μ|).
class DampingTable {
   public:
    DampingTable(unsigned n, const DecoherencePair &pair) : n_(n), table_((n + 1) * (n + 1) * (n + 1)) {
        for (unsigned h = 0; h <= n; ++h) {
            for (unsigned a = 0; a <= n; ++a) {
                for (unsigned b = 0; b <= n; ++b) {
                    double gap = static_cast<double>(a) - static_cast<double>(b);
                    table_[index(h, a, b)] = std::exp(-(h * pair.uncorrelated() + gap * gap * pair.gamma_r()));
                }
            }
        }
    }
    double operator()(BasisIndex eta, BasisIndex mu) const {
        return table_[index(hamming_weight(eta ^ mu), hamming_weight(eta), hamming_weight(mu))];
    }

   private:
    std::size_t index(unsigned h, unsigned a, unsigned b) const {
        return (static_cast<std::size_t>(h) * (n_ + 1) + a) * (n_ + 1) + b;
    }
    unsigned n_;
    std::vector<double> table_;
};

inline void check_channel_size(unsigned n) {
    if (n > kMaxChannelQubits) {
        throw SizeLimitError("dephasing channel supports at most 14 qubits");
    }
}

}  // namespace detail

/// ρ_ημ → e^{-C_ημ} ρ_ημ with the equal-distance coefficients.
inline DensityMatrix apply_channel(const DensityMatrix &rho, const DecoherencePair &pair) {
    const unsigned n = rho.qubits();
    detail::check_channel_size(n);
    detail::DampingTable damping(n, pair);
    Eigen::MatrixXcd out = rho.matrix();
    const auto dim = static_cast<Eigen::Index>(rho.dim());
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i != j) {
                out(i, j) *= damping(static_cast<BasisIndex>(i), static_cast<BasisIndex>(j));
            }
        }
    }
    return DensityMatrix(std::move(out));
}

/// ρ_ημ → e^{-C_ημ} ρ_ημ with arbitrary pairwise couplings.
inline DensityMatrix apply_channel(const DensityMatrix &rho, const CouplingMatrix &coupling) {
    const unsigned n = rho.qubits();
    detail::check_channel_size(n);
    if (coupling.size() != n) {
        throw DomainError("coupling matrix size does not match the register");
    }
    Eigen::MatrixXcd out = rho.matrix();
    const auto dim = static_cast<Eigen::Index>(rho.dim());
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            if (i != j) {
                out(i, j) *= std::exp(-coupling.coefficient(static_cast<BasisIndex>(i), static_cast<BasisIndex>(j)));
            }
        }
    }
    return DensityMatrix(std::move(out));
}

/// Coefficients α_νν' of the Z-representation, 2^n × 2^n, row-major.
class AlphaMatrix {
   public:
    AlphaMatrix(unsigned n, std::vector<double> entries) : n_(n), entries_(std::move(entries)) {
        std::size_t d = dimension_of(n);
        if (entries_.size() != d * d) {
            throw DomainError("alpha matrix must hold 4^n entries");
        }
    }

    /// α of the identity channel: 1 at (0, 0).
    static AlphaMatrix identity(unsigned n) {
        std::size_t d = dimension_of(n);
        std::vector<double> e(d * d, 0.0);
        e[0] = 1.0;
        return AlphaMatrix(n, std::move(e));
    }

    unsigned qubits() const {
        return n_;
    }
    std::size_t dim() const {
        return std::size_t{1} << n_;
    }
    double operator()(BasisIndex nu, BasisIndex nu_prime) const {
        return entries_[static_cast<std::size_t>(nu) * dim() + static_cast<std::size_t>(nu_prime)];
    }
    std::span<const double> row(BasisIndex nu) const {
        return std::span<const double>(entries_).subspan(static_cast<std::size_t>(nu) * dim(), dim());
    }
    double trace() const {
        double t = 0.0;
        for (std::size_t v = 0; v < dim(); ++v) {
            t += (*this)(v, v);
        }
        return t;
    }

   private:
    unsigned n_;
    std::vector<double> entries_;
};

/// α_νν' = 4^{-n} Σ_ημ (-1)^{ν·η + ν'·μ} e^{-C_ημ}, computed by a Walsh
/// transform along rows and then columns, O(4^n n).
inline AlphaMatrix alpha_matrix(unsigned n, const DecoherencePair &pair) {
    if (n == 0) {
        throw DomainError("register length must be at least 1");
    }
    if (n > kMaxAlphaQubits) {
        throw SizeLimitError("alpha_matrix supports at most 12 qubits");
    }
    const std::size_t d = std::size_t{1} << n;
    detail::DampingTable damping(n, pair);
    std::vector<double> m(d * d);
    for (std::size_t eta = 0; eta < d; ++eta) {
        for (std::size_t mu = 0; mu < d; ++mu) {
            m[eta * d + mu] = damping(eta, mu);
        }
    }
    for (std::size_t eta = 0; eta < d; ++eta) {
        walsh_hadamard(std::span<double>(m).subspan(eta * d, d));
    }
    // Column transform as butterflies over whole rows.
    for (std::size_t h = 1; h < d; h <<= 1) {
        for (std::size_t i = 0; i < d; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                double *top = &m[j * d];
                double *bottom = &m[(j + h) * d];
                for (std::size_t c = 0; c < d; ++c) {
                    double a = top[c];
                    double b = bottom[c];
                    top[c] = a + b;
                    bottom[c] = a - b;
                }
            }
        }
    }
    const double norm = 1.0 / static_cast<double>(d * d);
    for (double &x : m) {
        x *= norm;
    }
    return AlphaMatrix(n, std::move(m));
}

/// p_x = (1 - e^{-Γ0+Γr} cos 2x) / 2.
inline double p_of_x(const DecoherencePair &pair, double x) {
    double damp = std::exp(-pair.uncorrelated());
    double s = std::sin(x);
    return 0.5 * (-std::expm1(-pair.uncorrelated()) + 2.0 * damp * s * s);
}

/// 1 - p_x, evaluated without cancellation near p_x = 1.
inline double one_minus_p_of_x(const DecoherencePair &pair, double x) {
    double damp = std::exp(-pair.uncorrelated());
    double c = std::cos(x);
    return 0.5 * (-std::expm1(-pair.uncorrelated()) + 2.0 * damp * c * c);
}

/// Single-qubit error probability p_o = (1 - e^{-Γ0}) / 2.
inline double single_qubit_error(double gamma0) {
    return -0.5 * std::expm1(-gamma0);
}

namespace detail {

/// w log p + (n - w) log(1 - p) with 0 log 0 = 0.
inline double log_bernoulli_weight(unsigned n, unsigned w, double p, double one_minus_p) {
    double out = 0.0;
    if (w > 0) {
        out += static_cast<double>(w) * std::log(p);
    }
    if (n > w) {
        out += static_cast<double>(n - w) * std::log(one_minus_p);
    }
    return out;
}

inline void check_weight(unsigned n, unsigned w) {
    if (n == 0) {
        throw DomainError("register length must be at least 1");
    }
    if (w > n) {
        throw DomainError("weight exceeds register length");
    }
}

/// log ∫ e^{-u²}/√π exp(log_f(√Γr u)) du on a fixed Gauss-Hermite rule.
template <typename LogF>
double gauss_hermite_log_average(LogF &&log_f, double gamma_r, std::size_t nodes) {
    const GaussHermiteRule &rule = gauss_hermite_rule(nodes);
    const double root = std::sqrt(gamma_r);
    double acc = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes; ++i) {
        if (rule.weights[i] == 0.0) {
            continue;
        }
        acc = log_add_exp(acc, rule.log_weights[i] + log_f(root * rule.nodes[i]));
    }
    return acc - 0.5 * std::log(std::numbers::pi);
}

/// Same average by adaptive Gauss-Kronrod over x in [-L, L], L = 8√Γr, with
/// panels no wider than π/8 so several periods of p_x are resolved.
template <typename LogF>
double adaptive_log_average(LogF &&log_f, double gamma_r) {
    const double root = std::sqrt(gamma_r);
    const double L = 8.0 * root;
    auto log_integrand = [&](double x) { return log_f(x) - x * x / gamma_r; };
    double shift = -std::numeric_limits<double>::infinity();
    const int grid = 4096;
    for (int i = 0; i <= grid; ++i) {
        double x = -L + 2.0 * L * i / grid;
        shift = std::max(shift, log_integrand(x));
    }
    if (shift == -std::numeric_limits<double>::infinity()) {
        return shift;
    }
    auto integrand = [&](double x) { return std::exp(log_integrand(x) - shift); };
    std::vector<double> edges = uniform_edges(-L, L, std::min(std::numbers::pi / 8.0, root));
    AdaptiveOptions opt;
    opt.abs_tol = 0.0;
    opt.rel_tol = 1e-13;
    opt.max_panels = 1 << 16;
    QuadratureResult q = integrate_panels(integrand, edges, opt);
    if (!(q.value > 0.0)) {
        return -std::numeric_limits<double>::infinity();
    }
    return std::log(q.value) + shift - 0.5 * std::log(std::numbers::pi * gamma_r);
}

}  // namespace detail

/// log β_w on an explicit Gauss-Hermite node count; exposed for convergence checks.
inline double log_beta_gauss_hermite(unsigned n, unsigned w, const DecoherencePair &pair, std::size_t nodes) {
    detail::check_weight(n, w);
    if (pair.gamma_r() == 0.0) {
        throw DomainError("Gauss-Hermite route requires gammaR > 0");
    }
    auto log_f = [&](double x) {
        return detail::log_bernoulli_weight(n, w, p_of_x(pair, x), one_minus_p_of_x(pair, x));
    };
    return detail::gauss_hermite_log_average(log_f, pair.gamma_r(), nodes);
}

/// log β_w, β_w = ∫ dx (πΓr)^{-1/2} e^{-x²/Γr} p_x^w (1 - p_x)^{n-w}.
///
/// Γr = 0 is the exact independent-error value w log p_o + (n-w) log(1-p_o).
/// Otherwise Gauss-Hermite nodes double from 64 until log β_w moves by less
/// than 1e-12; large Γr, or a rule that fails to settle, falls back to
/// adaptive quadrature.
inline double log_beta(unsigned n, unsigned w, const DecoherencePair &pair) {
    detail::check_weight(n, w);
    if (pair.gamma_r() == 0.0) {
        double p = single_qubit_error(pair.gamma0());
        return detail::log_bernoulli_weight(n, w, p, 1.0 - p);
    }
    auto log_f = [&](double x) {
        return detail::log_bernoulli_weight(n, w, p_of_x(pair, x), one_minus_p_of_x(pair, x));
    };
    if (std::sqrt(pair.gamma_r()) <= std::numbers::pi / 4.0) {
        double previous = detail::gauss_hermite_log_average(log_f, pair.gamma_r(), 64);
        for (std::size_t nodes = 128; nodes <= 2048; nodes *= 2) {
            double current = detail::gauss_hermite_log_average(log_f, pair.gamma_r(), nodes);
            if (std::abs(current - previous) < 1e-12 ||
                (std::isinf(current) && std::isinf(previous))) {
                return current;
            }
            previous = current;
        }
    }
    return detail::adaptive_log_average(log_f, pair.gamma_r());
}

/// β_w. Underflows to 0 for long registers; use log_beta there.
inline double beta(unsigned n, unsigned w, const DecoherencePair &pair) {
    if (pair.gamma_r() == 0.0) {
        detail::check_weight(n, w);
        double p = single_qubit_error(pair.gamma0());
        return std::pow(p, static_cast<double>(w)) * std::pow(1.0 - p, static_cast<double>(n - w));
    }
    return std::exp(log_beta(n, w, pair));
}

}  // namespace corrqec::dephasing
