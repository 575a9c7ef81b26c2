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

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "corrqec/errors.hpp"

namespace corrqec {

using Complex = std::complex<double>;

/// Computational-basis label. Bit l of the index is the state of qubit l.
using BasisIndex = std::uint64_t;

inline unsigned hamming_weight(BasisIndex x) {
    return static_cast<unsigned>(std::popcount(x));
}

/// GF(2) inner product of two bit vectors.
inline unsigned parity_dot(BasisIndex a, BasisIndex b) {
    return hamming_weight(a & b) & 1u;
}

/// Element of Z_2^n with its register length attached.
class BitString {
   public:
    BitString(unsigned n, BasisIndex bits) : n_(n), bits_(bits) {
        if (n == 0 || n > 64) {
            throw DomainError("bit string length must be in [1, 64]");
        }
        if (n < 64 && (bits >> n) != 0) {
            throw DomainError("bit string has bits beyond its length");
        }
    }

    /// Parses "0110"; character l is bit l.
    static BitString parse(std::string_view text) {
        BasisIndex bits = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '1') {
                bits |= BasisIndex{1} << i;
            } else if (text[i] != '0') {
                throw FormatError("bit string may contain only 0 and 1");
            }
        }
        return BitString(static_cast<unsigned>(text.size()), bits);
    }

    unsigned size() const {
        return n_;
    }
    BasisIndex bits() const {
        return bits_;
    }
    unsigned weight() const {
        return hamming_weight(bits_);
    }

    BitString operator^(const BitString &other) const {
        check_same(other);
        return BitString(n_, bits_ ^ other.bits_);
    }
    unsigned dot(const BitString &other) const {
        check_same(other);
        return parity_dot(bits_, other.bits_);
    }
    void check_same(const BitString &other) const {
        if (other.n_ != n_) {
            throw DomainError("bit strings have different lengths");
        }
    }

    std::string str() const {
        std::string out(n_, '0');
        for (unsigned l = 0; l < n_; ++l) {
            if ((bits_ >> l) & 1u) {
                out[l] = '1';
            }
        }
        return out;
    }

    bool operator==(const BitString &) const = default;

   private:
    unsigned n_;
    BasisIndex bits_;
};

inline std::size_t dimension_of(unsigned n) {
    if (n > 30) {
        throw SizeLimitError("register too large for a dense state vector");
    }
    return std::size_t{1} << n;
}

/// State vector of n qubits, normalized to 1e-12.
class PureState {
   public:
    PureState(unsigned n, std::vector<Complex> amplitudes) : n_(n), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != dimension_of(n)) {
            throw DomainError("amplitude count must be 2^n");
        }
        if (std::abs(norm() - 1.0) > 1e-12) {
            throw DomainError("state vector is not normalized");
        }
    }

    unsigned qubits() const {
        return n_;
    }
    std::size_t dim() const {
        return amplitudes_.size();
    }
    std::span<const Complex> amplitudes() const {
        return amplitudes_;
    }
    const Complex &operator[](std::size_t i) const {
        return amplitudes_[i];
    }
    double norm() const {
        double s = 0.0;
        for (const auto &a : amplitudes_) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }

    Complex inner(const PureState &other) const {
        if (other.n_ != n_) {
            throw DomainError("inner product of states with different qubit counts");
        }
        Complex s = 0.0;
        for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
            s += std::conj(amplitudes_[i]) * other.amplitudes_[i];
        }
        return s;
    }

   private:
    unsigned n_;
    std::vector<Complex> amplitudes_;
};

/// Dense density matrix in the σ_z product basis.
///
/// Construction checks the shape and Hermiticity only. Recovery maps can
/// legitimately lose trace, so trace and positivity are checked by
/// validate() on demand.
class DensityMatrix {
   public:
    explicit DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) {
            throw DomainError("density matrix must be square and non-empty");
        }
        auto d = static_cast<std::uint64_t>(m_.rows());
        if (!std::has_single_bit(d)) {
            throw DomainError("density matrix dimension is not a power of two");
        }
        n_ = static_cast<unsigned>(std::countr_zero(d));
        double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
            throw DomainError("density matrix is not Hermitian");
        }
    }

    static DensityMatrix from_pure(const PureState &psi) {
        Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(), static_cast<Eigen::Index>(psi.dim()));
        return DensityMatrix(v * v.adjoint());
    }

    unsigned qubits() const {
        return n_;
    }
    std::size_t dim() const {
        return static_cast<std::size_t>(m_.rows());
    }
    const Eigen::MatrixXcd &matrix() const {
        return m_;
    }
    Complex operator()(std::size_t i, std::size_t j) const {
        return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    double trace() const {
        return m_.trace().real();
    }

    /// ⟨ψ|ρ|ψ⟩.
    double expectation(const PureState &psi) const {
        if (psi.dim() != dim()) {
            throw DomainError("state and density matrix dimensions differ");
        }
        Eigen::Map<const Eigen::VectorXcd> v(psi.amplitudes().data(), static_cast<Eigen::Index>(psi.dim()));
        return (v.adjoint() * m_ * v)(0, 0).real();
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    /// Throws unless trace is 1 to 1e-12 and the spectrum is >= -1e-10.
    void validate() const {
        if (std::abs(trace() - 1.0) > 1e-12) {
            throw DomainError("density matrix trace is not 1");
        }
        if (min_eigenvalue() < -1e-10) {
            throw DomainError("density matrix is not positive semidefinite");
        }
    }

   private:
    Eigen::MatrixXcd m_;
    unsigned n_ = 0;
};

/// In-place unnormalized Walsh-Hadamard transform of a length-2^m sequence:
/// out[σ] = Σ_y (-1)^{σ·y} in[y].
template <typename T>
void walsh_hadamard(std::span<T> data) {
    const std::size_t size = data.size();
    if (!std::has_single_bit(size)) {
        throw DomainError("transform length must be a power of two");
    }
    for (std::size_t h = 1; h < size; h <<= 1) {
        for (std::size_t i = 0; i < size; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                T a = data[j];
                T b = data[j + h];
                data[j] = a + b;
                data[j + h] = a - b;
            }
        }
    }
}

}  // namespace corrqec
