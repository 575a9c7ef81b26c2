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
#include <random>

#include <gtest/gtest.h>

#include "corrqec/bath.hpp"

using namespace corrqec;
using namespace corrqec::bath;

namespace {

// Plain midpoint rule on [0, W] in the variable ω = u^2, which removes the
// ω^{s-1} endpoint behaviour for s >= 1/2. Written without the library's
// kernel helpers.
double midpoint_gamma(const BathParams &b, const GeometryParams &g, std::size_t points) {
    const double W = 40.0 * b.Omega;
    const double U = std::sqrt(W);
    auto f = [&](double u) {
        double w = u * u;
        double coth = b.T == 0.0 ? 1.0 : 1.0 / std::tanh(w / (2.0 * b.T));
        double sinc = g.r == 0.0 ? 1.0 : std::sin(w * g.r) / (w * g.r);
        double val = b.A * std::pow(w, b.s) * 2.0 * std::pow(std::sin(0.5 * w * g.tau), 2) / (w * w) * coth * sinc *
                     std::exp(-w / b.Omega);
        return 2.0 * u * val;
    };
    const double h = U / static_cast<double>(points);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < points; ++i) {
        sum += f(h * (static_cast<double>(i) + 0.5));
    }
    return static_cast<double>(sum * h);
}

}  // namespace

TEST(SpectralDensity, Values) {
    EXPECT_EQ(spectral_density({0.0, 1.0, 1.0, 0.0}, 3.0), 0.0);
    EXPECT_NEAR(spectral_density({1.0, 1.0, 1.0, 0.0}, 1.0), std::exp(-1.0), 1e-16);
    EXPECT_NEAR(spectral_density({2.0, 2.0, 5.0, 0.0}, 3.0), 18.0 * std::exp(-0.6), 1e-14);
    EXPECT_EQ(spectral_density({1.0, 0.5, 1.0, 0.0}, 0.0), 0.0);
    EXPECT_THROW(spectral_density({1.0, 1.0, 1.0, 0.0}, -1.0), DomainError);
}

TEST(BathParams, Validation) {
    EXPECT_THROW(BathParams({1.0, 0.0, 1.0, 0.0}).validate(), DomainError);
    EXPECT_THROW(BathParams({1.0, 3.0, 1.0, 0.0}).validate(), DomainError);
    EXPECT_THROW(BathParams({1.0, 1.0, 0.0, 0.0}).validate(), DomainError);
    EXPECT_THROW(BathParams({-1.0, 1.0, 1.0, 0.0}).validate(), DomainError);
    EXPECT_THROW(BathParams({1.0, 1.0, 1.0, -1.0}).validate(), DomainError);
    EXPECT_THROW(gamma({1.0, 1.0, 1.0, 0.0}, {-1.0, 1.0}), DomainError);
    EXPECT_THROW(gamma({1.0, 1.0, 1.0, 0.0}, {1.0, -1.0}), DomainError);
}

TEST(Gamma, TrivialZeros) {
    EXPECT_EQ(gamma({0.0, 1.0, 10.0, 1.0}, {1.0, 5.0}).value, 0.0);
    EXPECT_EQ(gamma({1.0, 1.5, 10.0, 1.0}, {1.0, 0.0}).value, 0.0);
}

TEST(Gamma, MatchesMidpointReference) {
    BathParams b{1.0, 1.0, 10.0, 1.0};
    GeometryParams g{0.0, 5.0};
    GammaResult r = gamma(b, g);
    double ref = midpoint_gamma(b, g, 10'000'000);
    EXPECT_NEAR(r.value, ref, 1e-6 * ref);
    EXPECT_LT(r.abs_error, 1e-8 * r.value);
}

TEST(Gamma, MatchesMidpointAcrossRegimes) {
    struct Case {
        BathParams b;
        GeometryParams g;
    };
    const Case cases[] = {
        {{1.0, 0.5, 5.0, 2.0}, {1.0, 3.0}},
        {{0.3, 1.0, 10.0, 0.0}, {2.0, 4.0}},
        {{1.0, 2.0, 3.0, 1.0}, {0.5, 2.0}},
        {{2.0, 2.7, 2.0, 0.5}, {3.0, 1.0}},
    };
    for (const auto &c : cases) {
        double ref = midpoint_gamma(c.b, c.g, 4'000'000);
        EXPECT_NEAR(gamma(c.b, c.g).value, ref, 1e-6 * std::abs(ref)) << "s=" << c.b.s;
    }
}

TEST(Gamma, PairOrderingBelowTwo) {
    BathParams b{1.0, 1.3, 8.0, 0.7};
    GammaPair p = gamma_pair(b, 2.0, 3.0);
    DecoherencePair d = p.decoherence();
    EXPECT_GE(d.gamma0(), d.gamma_r());
    EXPECT_GT(d.gamma_r(), 0.0);
}

TEST(Gamma, DecreasesWithDistance) {
    BathParams b{1.0, 1.0, 10.0, 0.5};
    double prev = gamma(b, {0.0, 4.0}).value;
    for (double r : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        double v = gamma(b, {r, 4.0}).value;
        EXPECT_LT(v, prev) << "r=" << r;
        prev = v;
    }
}

TEST(Gamma, FlagsLightConeForLargeExponent) {
    EXPECT_TRUE(gamma({1.0, 2.5, 5.0, 0.0}, {2.0, 2.0}).near_singularity);
    EXPECT_FALSE(gamma({1.0, 1.5, 5.0, 0.0}, {2.0, 2.0}).near_singularity);
}

TEST(Gamma, ReportsNonConvergence) {
    GammaOptions opt;
    opt.rel_tol = 1e-15;
    opt.abs_tol = 0.0;
    opt.max_panels = 1;
    try {
        gamma({1.0, 1.0, 10.0, 1.0}, {3.0, 50.0}, opt);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError &e) {
        EXPECT_GT(e.best_estimate, 0.0);
        EXPECT_GT(e.achieved_error, 0.0);
    }
}

TEST(Gamma, ScalingIdentity) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> s_dist(0.05, 2.95), a_dist(0.5, 4.0);
    for (int i = 0; i < 10; ++i) {
        BathParams b{1.0, s_dist(rng), 5.0, 0.8};
        double a = a_dist(rng);
        ScalingCheck c = scaling_identity(b, {1.5, 2.0}, a);
        EXPECT_LE(std::abs(c.lhs() - c.rhs()), 10.0 * c.combined_error()) << "s=" << b.s << " a=" << a;
        EXPECT_DOUBLE_EQ(c.lhs(), scaled_gamma(b, {1.5, 2.0}, a));
    }
    EXPECT_THROW(scaling_identity({1.0, 1.0, 1.0, 0.0}, {1.0, 1.0}, 0.0), DomainError);
}
