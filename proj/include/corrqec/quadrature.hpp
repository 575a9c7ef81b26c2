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
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "corrqec/errors.hpp"

namespace corrqec {

struct QuadratureResult {
    double value = 0.0;
    double abs_error = 0.0;
    bool converged = false;
    std::size_t panels = 0;
};

struct AdaptiveOptions {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    std::size_t max_panels = std::size_t{1} << 22;
};

namespace detail {

struct Panel {
    double a;
    double b;
    double value;
    double error;
};

inline bool panel_error_less(const Panel &x, const Panel &y) {
    return x.error < y.error;
}

/// 21-point Gauss-Kronrod on [a, b]. The error is |K21 - G10| floored by a
/// roundoff bound on the absolute integrand mass.
template <typename F>
Panel gauss_kronrod_panel(F &f, double a, double b) {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const auto &x = gauss_kronrod<double, 21>::abscissa();
    const auto &wk = gauss_kronrod<double, 21>::weights();
    const auto &wg = gauss<double, 10>::weights();

    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double fc = f(mid);
    double kronrod = fc * wk[0];
    double gauss_sum = 0.0;
    double mass = std::abs(kronrod);
    for (std::size_t i = 1; i < x.size(); ++i) {
        double fp = f(mid + half * x[i]);
        double fm = f(mid - half * x[i]);
        kronrod += (fp + fm) * wk[i];
        mass += (std::abs(fp) + std::abs(fm)) * wk[i];
        if (i % 2 == 1) {
            gauss_sum += (fp + fm) * wg[i / 2];
        }
    }
    kronrod *= half;
    gauss_sum *= half;
    mass *= std::abs(half);
    double err = std::max(std::abs(kronrod - gauss_sum), 50.0 * 2.220446049250313e-16 * mass);
    return Panel{a, b, kronrod, err};
}

}  // namespace detail

/// Globally adaptive integration over consecutive panels [edges[i], edges[i+1]].
/// The panel with the largest error estimate is bisected until the summed
/// error drops below max(abs_tol, rel_tol * |value|) or the panel budget is
/// spent. Non-convergence is reported through `converged`, never thrown.
template <typename F>
QuadratureResult integrate_panels(F &&f, std::span<const double> edges, const AdaptiveOptions &opt) {
    QuadratureResult out;
    if (edges.size() < 2) {
        out.converged = true;
        return out;
    }
    std::vector<detail::Panel> heap;
    heap.reserve(std::max<std::size_t>(edges.size() * 2, 64));
    std::vector<detail::Panel> frozen;
    double total = 0.0;
    double err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i + 1] > edges[i])) {
            continue;
        }
        heap.push_back(detail::gauss_kronrod_panel(f, edges[i], edges[i + 1]));
        total += heap.back().value;
        err += heap.back().error;
    }
    std::make_heap(heap.begin(), heap.end(), detail::panel_error_less);

    auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    std::size_t iterations = 0;
    while (!heap.empty() && err > target() && heap.size() + frozen.size() < opt.max_panels) {
        std::pop_heap(heap.begin(), heap.end(), detail::panel_error_less);
        detail::Panel worst = heap.back();
        heap.pop_back();
        double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 1e-15 * std::max(std::abs(worst.a), std::abs(worst.b))) {
            frozen.push_back(worst);
            continue;
        }
        detail::Panel left = detail::gauss_kronrod_panel(f, worst.a, mid);
        detail::Panel right = detail::gauss_kronrod_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), detail::panel_error_less);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), detail::panel_error_less);
        if (++iterations % 4096 == 0) {
            total = 0.0;
            err = 0.0;
            for (const auto &p : heap) {
                total += p.value;
                err += p.error;
            }
            for (const auto &p : frozen) {
                total += p.value;
                err += p.error;
            }
        }
    }

    // Re-sum smallest-first to limit accumulation error over many panels.
    std::vector<double> values;
    std::vector<double> errors;
    values.reserve(heap.size() + frozen.size());
    errors.reserve(heap.size() + frozen.size());
    for (const auto &p : heap) {
        values.push_back(p.value);
        errors.push_back(p.error);
    }
    for (const auto &p : frozen) {
        values.push_back(p.value);
        errors.push_back(p.error);
    }
    std::sort(values.begin(), values.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    std::sort(errors.begin(), errors.end());
    out.value = 0.0;
    for (double v : values) {
        out.value += v;
    }
    out.abs_error = 0.0;
    for (double e : errors) {
        out.abs_error += e;
    }
    out.panels = values.size();
    out.converged = out.abs_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(out.value));
    return out;
}

/// Uniform panel edges covering [a, b] with no panel wider than max_width.
inline std::vector<double> uniform_edges(double a, double b, double max_width) {
    std::size_t count = 1;
    if (max_width > 0.0 && b > a) {
        count = static_cast<std::size_t>(std::ceil((b - a) / max_width));
        count = std::max<std::size_t>(count, 1);
    }
    std::vector<double> edges(count + 1);
    for (std::size_t i = 0; i <= count; ++i) {
        edges[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(count);
    }
    edges.back() = b;
    return edges;
}

/// Nodes and weights for integrals of the form  ∫ e^{-u²} f(u) du.
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<double> log_weights;
};

namespace detail {

inline GaussHermiteRule compute_gauss_hermite(std::size_t n) {
    // Roots from the eigenvalues of the symmetric Jacobi matrix, polished by
    // Newton on the orthonormal Hermite recurrence. The recurrence is
    // rescaled as it runs so the outer roots of high-order rules do not
    // overflow; weights come out in log form.
    GaussHermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    rule.log_weights.assign(n, 0.0);
    if (n == 1) {
        rule.log_weights[0] = 0.5 * std::log(std::numbers::pi);
        rule.weights[0] = std::sqrt(std::numbers::pi);
        return rule;
    }
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
    for (std::size_t j = 1; j < n; ++j) {
        sub(static_cast<Eigen::Index>(j - 1)) = std::sqrt(0.5 * static_cast<double>(j));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd &roots = solver.eigenvalues();

    const double pim4 = std::pow(std::numbers::pi, -0.25);
    constexpr double kRescale = 1e150;
    const double log_rescale = std::log(kRescale);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        double z = roots(static_cast<Eigen::Index>(i));
        double p_prev = 1.0;
        double log_scale = 0.0;
        for (int iter = 0; iter < 4; ++iter) {
            double p1 = pim4;
            double p2 = 0.0;
            log_scale = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                double dj = static_cast<double>(j);
                p1 = z * std::sqrt(2.0 / dj) * p2 - std::sqrt((dj - 1.0) / dj) * p3;
                if (std::abs(p1) > kRescale) {
                    p1 /= kRescale;
                    p2 /= kRescale;
                    log_scale += log_rescale;
                }
            }
            double pp = std::sqrt(2.0 * dn) * p2;
            double step = p1 / pp;
            p_prev = p2;
            if (!std::isfinite(step) || std::abs(step) > 1e-6 * std::max(1.0, std::abs(z))) {
                break;
            }
            z -= step;
            if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) {
                break;
            }
        }
        rule.nodes[i] = z;
        rule.log_weights[i] = -std::log(dn) - 2.0 * (std::log(std::abs(p_prev)) + log_scale);
    }
    // Enforce exact symmetry of the rule.
    for (std::size_t i = 0; i < n / 2; ++i) {
        std::size_t j = n - 1 - i;
        double z = 0.5 * (rule.nodes[j] - rule.nodes[i]);
        double lw = 0.5 * (rule.log_weights[i] + rule.log_weights[j]);
        rule.nodes[i] = -z;
        rule.nodes[j] = z;
        rule.log_weights[i] = lw;
        rule.log_weights[j] = lw;
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        rule.weights[i] = std::exp(rule.log_weights[i]);
    }
    return rule;
}

}  // namespace detail

/// Cached n-point Gauss-Hermite rule; safe to call from several threads.
inline const GaussHermiteRule &gauss_hermite_rule(std::size_t n) {
    if (n == 0) {
        throw DomainError("Gauss-Hermite rule needs at least one node");
    }
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<const GaussHermiteRule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<const GaussHermiteRule>(detail::compute_gauss_hermite(n))).first;
    }
    return *it->second;
}

/// log(exp(a) + exp(b)) without overflow; -inf is the identity.
inline double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) {
        return b;
    }
    if (b == -std::numeric_limits<double>::infinity()) {
        return a;
    }
    double hi = std::max(a, b);
    double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace corrqec
