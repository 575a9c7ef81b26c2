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

#include <cmath>

#include <boost/math/special_functions/erf.hpp>
#include <gtest/gtest.h>

#include "corrqec/residual.hpp"

using namespace corrqec;
using namespace corrqec::residual;

namespace {

// Gaussian mass of {x : p_x > q} by a midpoint rule over one window.
double indicator_mass(double q, const DecoherencePair &pair, std::size_t points) {
    const double L = 14.0 * std::sqrt(pair.gamma_r());
    const double h = 2.0 * L / static_cast<double>(points);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < points; ++i) {
        double x = -L + h * (static_cast<double>(i) + 0.5);
        double p = (1.0 - std::exp(-pair.uncorrelated()) * std::cos(2.0 * x)) / 2.0;
        if (p > q) {
            sum += std::exp(-x * x / pair.gamma_r());
        }
    }
    return static_cast<double>(sum * h / std::sqrt(M_PI * pair.gamma_r()));
}

// Direct pmf sum inside a midpoint Gaussian average, all in long double.
double residual_reference(unsigned n, unsigned t, const DecoherencePair &pair) {
    const double L = 12.0 * std::sqrt(pair.gamma_r());
    const std::size_t points = 40000;
    const long double h = 2.0L * L / points;
    long double sum = 0.0L;
    for (std::size_t i = 0; i < points; ++i) {
        long double x = -L + h * (i + 0.5L);
        long double p = (1.0L - std::exp(-static_cast<long double>(pair.uncorrelated())) * std::cos(2.0L * x)) / 2.0L;
        long double tail = 0.0L;
        for (unsigned w = t + 1; w <= n; ++w) {
            tail += std::exp(std::lgamma(n + 1.0L) - std::lgamma(w + 1.0L) - std::lgamma(n - w + 1.0L)) *
                    std::pow(p, static_cast<long double>(w)) * std::pow(1.0L - p, static_cast<long double>(n - w));
        }
        sum += std::exp(-x * x / pair.gamma_r()) * tail;
    }
    return static_cast<double>(sum * h / std::sqrt(3.14159265358979323846264338327950288L * pair.gamma_r()));
}

}  // namespace

TEST(Residual, IndependentLimitIsTheSamePath) {
    for (auto [n, t] : {std::pair{7ull, 1ull}, {200ull, 9ull}, {1600ull, 79ull}, {100000ull, 4999ull}}) {
        ResidualQuery q{n, t, DecoherencePair(0.01, 0.0)};
        EXPECT_EQ(code_avg_residual(q), independent_residual(n, t, 0.01));
    }
}

TEST(Residual, IndependentDecayIsExponential) {
    double prev = 1.0;
    for (std::uint64_t n : {100u, 200u, 400u, 800u, 1600u}) {
        double v = independent_residual(n, n / 20 - 1, 0.01);
        EXPECT_LT(v, prev);
        prev = v;
    }
    double deep = log_binomial_tail(1'000'000, 50'000, dephasing::single_qubit_error(0.01));
    EXPECT_TRUE(std::isfinite(deep));
    EXPECT_LT(deep, -1e4);
    EXPECT_THROW(independent_residual(10, 10, 0.01), DomainError);
}

TEST(Residual, RouteEquivalence) {
    for (auto pair : {DecoherencePair(0.01, 0.005), DecoherencePair(0.2, 0.1), DecoherencePair(1.0, 0.9)}) {
        for (std::uint64_t n = 1; n <= 12; ++n) {
            for (std::uint64_t t = 0; t < n; ++t) {
                ResidualQuery q{n, t, pair};
                EXPECT_NEAR(code_avg_residual(q), residual_from_coefficients(q), 1e-12) << n << " " << t;
            }
        }
    }
}

TEST(Residual, DirectSumExample) {
    DecoherencePair pair(0.01, 0.005);
    double sum = 0.0;
    for (unsigned w = 3; w <= 10; ++w) {
        sum += static_cast<double>(binomial_coefficient(10, w)) * dephasing::beta(10, w, pair);
    }
    EXPECT_NEAR(code_avg_residual({10, 2, pair}), sum, 1e-12);
}

TEST(Residual, MatchesMidpointReference) {
    for (auto [n, t] : {std::pair{60u, 2u}, {150u, 7u}}) {
        DecoherencePair pair(0.01, 0.005);
        double ref = residual_reference(n, t, pair);
        EXPECT_NEAR(code_avg_residual({n, t, pair}), ref, 1e-9 * ref);
    }
}

TEST(Residual, DomainChecks) {
    EXPECT_THROW(code_avg_residual({5, 5, DecoherencePair(0.1, 0.0)}), DomainError);
    EXPECT_THROW(code_avg_residual({0, 0, DecoherencePair(0.1, 0.0)}), DomainError);
    EXPECT_EQ(code_avg_residual({50, 3, DecoherencePair(0.0, 0.0)}), 0.0);
}

TEST(Asymptote, MatchesIndicatorIntegral) {
    for (double gr : {0.01, 0.005, 0.0025}) {
        DecoherencePair pair(0.01, gr);
        double exact = asymptotic_residual(0.05, pair).exact;
        EXPECT_NEAR(exact, indicator_mass(0.05, pair, 20'000'000), 1e-5 * exact) << gr;
    }
}

TEST(Asymptote, LimitsAndOrdering) {
    DecoherencePair strong(2.0, 1.5);
    EXPECT_EQ(asymptotic_residual(0.01, strong).exact, 1.0);
    EXPECT_EQ(asymptotic_residual(0.05, DecoherencePair(0.01, 0.0)).exact, 0.0);
    EXPECT_EQ(asymptotic_residual(0.001, DecoherencePair(0.01, 0.0)).exact, 1.0);
    double prev = 1.0;
    for (double gr : {0.01, 0.005, 0.0025, 0.00125}) {
        auto a = asymptotic_residual(0.05, DecoherencePair(0.01, gr));
        EXPECT_LT(a.exact, prev);
        EXPECT_DOUBLE_EQ(a.erfc_approx, std::erfc(std::sqrt(0.05 / gr)));
        prev = a.exact;
    }
    EXPECT_THROW(asymptotic_residual(0.0, strong), DomainError);
}

TEST(Asymptote, FiniteLengthsApproachTheLimit) {
    DecoherencePair pair(0.01, 0.01);
    double limit = asymptotic_residual(0.05, pair).exact;
    double prev = 1.0;
    for (std::uint64_t n : {500u, 1000u, 2000u, 4000u, 10000u}) {
        double v = code_avg_residual({n, n / 20 - 1, pair});
        EXPECT_LT(v, prev);
        EXPECT_GT(v, limit);
        prev = v;
    }
    EXPECT_LT((prev - limit) / limit, 0.05);
}

TEST(Budget, InvertsTheErfcLaw) {
    GammaBudget g = gamma_budget(1000.0, 0.05, 1.0, 1.0);
    ASSERT_FALSE(g.unconstrained);
    EXPECT_NEAR(std::erfc(std::sqrt(0.05 / g.exact)), 1e-3, 1e-15);
    EXPECT_NEAR(g.c0, 0.05 / g.exact - std::log(1000.0), 1e-12);
    EXPECT_NEAR(g.leading_order, 0.05 / std::log(1000.0), 1e-15);
    EXPECT_TRUE(gamma_budget(10.0, 0.05, 0.0, 1.0).unconstrained);
    EXPECT_TRUE(gamma_budget(10.0, 0.05, 1.0, 20.0).unconstrained);
    // c0 drifts only like -ln(π ln n)/2, so q/(c0 + μ ln n) keeps its form.
    for (double n : {1e6, 1e12, 1e30}) {
        double L = std::log(n);
        EXPECT_NEAR(gamma_budget(n, 0.05, 1.0, 1.0).c0, -0.5 * std::log(M_PI * L), 0.05) << n;
    }
    EXPECT_THROW(gamma_budget(1.0, 0.05, 1.0, 1.0), DomainError);
}

TEST(Scalability, Dichotomy) {
    ScalingScenario base;
    base.A = 0.02;
    base.r0 = 2.0;
    base.tau0 = 1.0;
    base.T = 1.0;
    base.Omega = 10.0;
    const std::vector<double> grid{10, 1e3, 1e5, 1e7, 1e9};
    for (double s : {1.0, 2.0}) {
        ScalingScenario sc = base;
        sc.s = s;
        auto rep = scalability_verdict(sc, grid);
        EXPECT_EQ(rep.verdict(), "not scalable");
        EXPECT_TRUE(rep.crossover_n.has_value()) << s;
        EXPECT_TRUE(rep.grid_consistent);
    }
    ScalingScenario good = base;
    good.s = 2.5;
    auto rep = scalability_verdict(good, grid);
    EXPECT_EQ(rep.verdict(), "scalable");
    EXPECT_TRUE(rep.rows.back().satisfied);
    EXPECT_FALSE(rep.crossover_n.has_value());

    ScalingScenario quiet = base;
    quiet.A = 0.0;
    auto none = scalability_verdict(quiet, grid);
    EXPECT_EQ(none.verdict(), "scalable (no noise)");
    for (const auto &row : none.rows) {
        EXPECT_TRUE(row.satisfied);
    }
    ScalingScenario slow = base;
    slow.y = 0.2;
    EXPECT_THROW(scalability_verdict(slow, grid), DomainError);
}

TEST(Scalability, RowsMatchScaledGamma) {
    ScalingScenario sc;
    sc.A = 0.1;
    sc.s = 1.5;
    sc.T = 0.5;
    sc.Omega = 4.0;
    ScalabilityRow row = scalability_row(sc, 1000.0);
    EXPECT_NEAR(row.a, 10.0, 1e-12);
    EXPECT_DOUBLE_EQ(row.gamma_eff, bath::scaled_gamma(sc.bath(), {sc.r0, sc.tau0}, row.a));
}
