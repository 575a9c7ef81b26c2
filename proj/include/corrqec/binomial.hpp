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
#include <utility>

#include "corrqec/errors.hpp"

/// Binomial tails through the regularized incomplete beta function,
/// evaluated in log space so that tails far below the double range stay
/// representable.
namespace corrqec {

namespace detail {

inline double log_gamma(double x) {
#if defined(__GLIBC__)
    int sign = 0;
    return ::lgamma_r(x, &sign);
#else
    return std::lgamma(x);
#endif
}

inline double log_beta_function(double a, double b) {
    return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

/// Continued fraction of I_x(a, b) (modified Lentz).
inline double incomplete_beta_fraction(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    constexpr int max_iter = 200000;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) {
        d = tiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double dm = static_cast<double>(m);
        const double m2 = 2.0 * dm;
        double aa = dm * (b - dm) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + dm) * (qab + dm) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) {
            d = tiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) {
            c = tiny;
        }
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) {
            return h;
        }
    }
    throw ConvergenceError("incomplete beta continued fraction did not converge", h, 0.0);
}

/// log of x^a (1-x)^b / (a B(a, b)).
inline double log_beta_prefactor(double a, double b, double x) {
    return a * std::log(x) + b * std::log1p(-x) - std::log(a) - log_beta_function(a, b);
}

}  // namespace detail

/// log I_x(a, b) for a, b > 0. The continued fraction is applied directly for
/// x < a/(a+b) and to the complement 1 - I_{1-x}(b, a) otherwise.
inline double log_regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) {
        throw DomainError("incomplete beta requires a, b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("incomplete beta requires 0 <= x <= 1");
    }
    if (x == 0.0) {
        return -std::numeric_limits<double>::infinity();
    }
    if (x == 1.0) {
        return 0.0;
    }
    if (x < a / (a + b)) {
        return detail::log_beta_prefactor(a, b, x) + std::log(detail::incomplete_beta_fraction(a, b, x));
    }
    double log_complement =
        detail::log_beta_prefactor(b, a, 1.0 - x) + std::log(detail::incomplete_beta_fraction(b, a, 1.0 - x));
    return std::log1p(-std::exp(log_complement));
}

inline double regularized_incomplete_beta(double a, double b, double x) {
    return std::exp(log_regularized_incomplete_beta(a, b, x));
}

/// log P(X >= k) for X ~ Binomial(n, p), i.e. log I_p(k, n - k + 1).
inline double log_binomial_tail(std::uint64_t n, std::uint64_t k, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("binomial tail requires 0 <= p <= 1");
    }
    if (k == 0) {
        return 0.0;
    }
    if (k > n) {
        return -std::numeric_limits<double>::infinity();
    }
    return log_regularized_incomplete_beta(static_cast<double>(k), static_cast<double>(n - k + 1), p);
}

/// P(X >= k) for X ~ Binomial(n, p).
inline double binomial_tail(std::uint64_t n, std::uint64_t k, double p) {
    return std::exp(log_binomial_tail(n, k, p));
}

/// log C(n, w).
inline double log_binomial_coefficient(std::uint64_t n, std::uint64_t w) {
    if (w > n) {
        return -std::numeric_limits<double>::infinity();
    }
    double dn = static_cast<double>(n);
    double dw = static_cast<double>(w);
    return detail::log_gamma(dn + 1.0) - detail::log_gamma(dw + 1.0) - detail::log_gamma(dn - dw + 1.0);
}

/// C(n, w) exactly for n <= 60.
inline std::uint64_t binomial_coefficient(unsigned n, unsigned w) {
    if (w > n) {
        return 0;
    }
    if (n > 60) {
        throw SizeLimitError("exact binomial coefficient limited to n <= 60");
    }
    w = std::min(w, n - w);
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= w; ++i) {
        r = r * (n - w + i) / i;
    }
    return r;
}

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Wilson score interval for a binomial proportion (z = 1.96 by default).
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = 1.959963984540054) {
    if (trials == 0) {
        throw DomainError("Wilson interval needs at least one trial");
    }
    const double nt = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / nt;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nt;
    const double centre = (phat + z2 / (2.0 * nt)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / nt + z2 / (4.0 * nt * nt)) / denom;
    return Interval{std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

}  // namespace corrqec
