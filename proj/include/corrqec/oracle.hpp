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
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "corrqec/codes.hpp"
#include "corrqec/decoherence_pair.hpp"
#include "corrqec/dephasing.hpp"
#include "corrqec/errors.hpp"
#include "corrqec/state.hpp"

/// Exact density-matrix simulation of encode -> dephase -> recover for small
/// registers, the ground truth the analytic residual formulas are held to.
namespace corrqec::oracle {

inline constexpr unsigned kMaxEncodeQubits = 12;
inline constexpr unsigned kMaxRecoveryQubits = 10;

/// |X⟩ = |+⟩^{⊗n}.
inline PureState x_polarized_state(unsigned n) {
    if (n == 0 || n > dephasing::kMaxChannelQubits) {
        throw SizeLimitError("x-polarized state limited to 1 <= n <= 14");
    }
    const std::size_t dim = std::size_t{1} << n;
    return PureState(n, std::vector<Complex>(dim, Complex(std::pow(2.0, -0.5 * n), 0.0)));
}

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(std::mt19937_64 &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Haar-random k-qubit state from normalized complex Gaussians (Box-Muller
/// on raw engine output, so results are seed-stable across platforms).
inline std::vector<Complex> random_logical_state(unsigned k, std::mt19937_64 &rng) {
    const std::size_t dim = dimension_of(k);
    std::vector<Complex> a(dim);
    double norm = 0.0;
    for (auto &z : a) {
        double u1 = 1.0 - uniform01(rng);
        double u2 = uniform01(rng);
        double radius = std::sqrt(-2.0 * std::log(u1));
        z = Complex(radius * std::cos(2.0 * std::numbers::pi * u2), radius * std::sin(2.0 * std::numbers::pi * u2));
        norm += std::norm(z);
    }
    norm = std::sqrt(norm);
    for (auto &z : a) {
        z /= norm;
    }
    return a;
}

/// |Ψ⟩ = Σ_η ψ_η |Q_η⟩ with η indexing the sorted coset representatives.
inline PureState encode(std::span<const Complex> logical, const codes::CssCodePair &pair) {
    if (pair.n > kMaxEncodeQubits) {
        throw SizeLimitError("encode limited to n <= 12");
    }
    if (logical.size() != (std::size_t{1} << pair.k)) {
        throw DomainError("logical state must have 2^k amplitudes");
    }
    double norm = 0.0;
    for (const auto &z : logical) {
        norm += std::norm(z);
    }
    if (std::abs(std::sqrt(norm) - 1.0) > 1e-12) {
        throw DomainError("logical state is not normalized");
    }
    std::vector<PureState> basis = codes::codewords(pair);
    std::vector<Complex> amp(std::size_t{1} << pair.n, 0.0);
    for (std::size_t eta = 0; eta < basis.size(); ++eta) {
        for (std::size_t i = 0; i < amp.size(); ++i) {
            amp[i] += logical[eta] * basis[eta][i];
        }
    }
    return PureState(pair.n, std::move(amp));
}

/// All words of length n with Hamming weight <= t.
inline std::vector<BasisIndex> words_up_to_weight(unsigned n, unsigned t) {
    std::vector<BasisIndex> out;
    const std::size_t dim = dimension_of(n);
    for (BasisIndex v = 0; v < dim; ++v) {
        if (hamming_weight(v) <= t) {
            out.push_back(v);
        }
    }
    return out;
}

/// Projector onto the code space as an orthonormal basis, one column per |Q⟩.
inline Eigen::MatrixXd code_basis_matrix(const codes::CssCodePair &pair) {
    std::vector<PureState> basis = codes::codewords(pair);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << pair.n);
    Eigen::MatrixXd q(dim, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            q(i, static_cast<Eigen::Index>(c)) = basis[c][static_cast<std::size_t>(i)].real();
        }
    }
    return q;
}

/// R(ρ) = Σ_{|ν|,|μ| <= t} P X_μ Z_ν ρ Z_ν X_μ P.
///
/// The Z sum collapses to a sign kernel K(i⊕j) = Σ_{|ν|<=t} (-1)^{ν·(i⊕j)},
/// so the unprojected sum costs O(4^n · #{|μ| <= t}); P then acts through
/// the 2^k code basis vectors.
inline DensityMatrix apply_recovery(const DensityMatrix &rho, const codes::CssCodePair &pair) {
    if (rho.qubits() != pair.n) {
        throw DomainError("density matrix and code lengths differ");
    }
    if (pair.n > kMaxRecoveryQubits) {
        throw SizeLimitError("recovery limited to n <= 10");
    }
    const unsigned n = pair.n;
    const std::size_t dim = std::size_t{1} << n;
    const std::vector<BasisIndex> low = words_up_to_weight(n, pair.t);

    std::vector<double> kernel(dim, 0.0);
    for (BasisIndex x = 0; x < dim; ++x) {
        double s = 0.0;
        for (BasisIndex nu : low) {
            s += parity_dot(nu, x) ? -1.0 : 1.0;
        }
        kernel[x] = s;
    }

    const Eigen::MatrixXcd &m = rho.matrix();
    Eigen::MatrixXcd shifted = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < dim; ++j) {
        for (std::size_t i = 0; i < dim; ++i) {
            const double kv = kernel[i ^ j];
            if (kv == 0.0) {
                continue;
            }
            Complex acc = 0.0;
            for (BasisIndex mu : low) {
                acc += m(static_cast<Eigen::Index>(i ^ mu), static_cast<Eigen::Index>(j ^ mu));
            }
            shifted(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kv * acc;
        }
    }

    Eigen::MatrixXcd q = code_basis_matrix(pair).cast<Complex>();
    Eigen::MatrixXcd block = q.adjoint() * shifted * q;
    Eigen::MatrixXcd out = q * block * q.adjoint();
    // Symmetrize away roundoff so the Hermiticity check is exact.
    out = 0.5 * (out + out.adjoint()).eval();
    return DensityMatrix(std::move(out));
}

/// E_σ = ⟨Ψ|Z_σ|Ψ⟩ for every σ, by one Walsh transform of |Ψ_y|².
inline std::vector<double> z_expectations(const PureState &psi) {
    std::vector<double> e(psi.dim());
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        e[i] = std::norm(psi[i]);
    }
    walsh_hadamard(std::span<double>(e));
    return e;
}

/// ⟨Ψ|ρ'|Ψ⟩ = Σ_{|μ|<=t} Σ_{νν'} α_νν' E_{μ⊕ν} E_{μ⊕ν'}, summed over the
/// full α matrix.
inline double fidelity_formula(const PureState &psi, const dephasing::AlphaMatrix &alpha,
                               const codes::CssCodePair &pair) {
    if (psi.qubits() != pair.n || alpha.qubits() != pair.n) {
        throw DomainError("state, alpha matrix and code lengths differ");
    }
    if (pair.n > kMaxRecoveryQubits) {
        throw SizeLimitError("fidelity formula limited to n <= 10");
    }
    const std::size_t dim = psi.dim();
    const std::vector<double> e = z_expectations(psi);
    std::vector<double> v(dim);
    double total = 0.0;
    for (BasisIndex mu : words_up_to_weight(pair.n, pair.t)) {
        for (std::size_t nu = 0; nu < dim; ++nu) {
            v[nu] = e[nu ^ mu];
        }
        double f = 0.0;
        for (std::size_t nu = 0; nu < dim; ++nu) {
            if (v[nu] == 0.0) {
                continue;
            }
            auto row = alpha.row(nu);
            double inner = 0.0;
            for (std::size_t nup = 0; nup < dim; ++nup) {
                inner += row[nup] * v[nup];
            }
            f += v[nu] * inner;
        }
        total += f;
    }
    return total;
}

/// Δ_Ψ = 1 - ⟨Ψ| R(channel(|Ψ⟩⟨Ψ|)) |Ψ⟩.
inline double residual_exact(const PureState &psi, const DecoherencePair &noise, const codes::CssCodePair &pair) {
    if (pair.n > kMaxRecoveryQubits) {
        throw SizeLimitError("residual_exact limited to n <= 10");
    }
    DensityMatrix rho = DensityMatrix::from_pure(psi);
    DensityMatrix noisy = dephasing::apply_channel(rho, noise);
    DensityMatrix recovered = apply_recovery(noisy, pair);
    return 1.0 - recovered.expectation(psi);
}

}  // namespace corrqec::oracle
