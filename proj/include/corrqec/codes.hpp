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
#include <bit>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "corrqec/binomial.hpp"
#include "corrqec/errors.hpp"
#include "corrqec/state.hpp"

/// Binary linear codes and CSS code pairs C2 ⊂ C1 ⊂ Z_2^n.
///
/// Vectors of Z_2^n are packed into one 64-bit word, bit l holding
/// coordinate l, so n <= 64.
namespace corrqec::codes {

using Word = std::uint64_t;

inline constexpr unsigned kMaxLength = 64;
/// Gray-code enumeration limit of min_weight and weight_enumerator.
inline constexpr unsigned kMaxEnumerationDim = 24;
/// Low-weight search limit for codes too large to enumerate.
inline constexpr unsigned kMaxSearchLength = 28;
inline constexpr unsigned kMaxStateLength = 14;

inline Word length_mask(unsigned n) {
    return n >= 64 ? ~Word{0} : ((Word{1} << n) - 1);
}

/// Binary entropy in bits, H2(0) = H2(1) = 0.
inline double h2(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("h2 requires 0 <= x <= 1");
    }
    if (x == 0.0 || x == 1.0) {
        return 0.0;
    }
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// CSS rate bound R(δ) = 1 - 2 H2(δ).
inline double r_css(double delta) {
    if (!(delta >= 0.0 && delta <= 0.5)) {
        throw DomainError("r_css requires 0 <= delta <= 1/2");
    }
    return 1.0 - 2.0 * h2(delta);
}

/// A linear subspace of Z_2^n held as a reduced row-echelon basis. Each
/// basis row owns a pivot (its highest set bit) that is clear in every
/// other row, so reduce() yields the numerically smallest coset member.
class LinearCode {
   public:
    LinearCode(unsigned n, std::span<const Word> spanning_set) : n_(n) {
        if (n == 0 || n > kMaxLength) {
            throw DomainError("code length must be in [1, 64]");
        }
        for (Word v : spanning_set) {
            if ((v & ~length_mask(n)) != 0) {
                throw DomainError("vector has bits beyond the code length");
            }
            insert(v);
        }
    }

    static LinearCode zero(unsigned n) {
        return LinearCode(n, std::span<const Word>{});
    }
    static LinearCode full(unsigned n) {
        std::vector<Word> basis;
        for (unsigned l = 0; l < n; ++l) {
            basis.push_back(Word{1} << l);
        }
        return LinearCode(n, basis);
    }

    unsigned length() const {
        return n_;
    }
    unsigned dim() const {
        return static_cast<unsigned>(rows_.size());
    }
    /// Basis rows ordered by descending pivot.
    const std::vector<Word> &generators() const {
        return rows_;
    }

    Word reduce(Word v) const {
        for (Word row : rows_) {
            if (v & pivot_bit(row)) {
                v ^= row;
            }
        }
        return v;
    }
    bool contains(Word v) const {
        return reduce(v) == 0;
    }
    bool is_subcode_of(const LinearCode &other) const {
        if (other.n_ != n_) {
            return false;
        }
        return std::all_of(rows_.begin(), rows_.end(), [&](Word r) { return other.contains(r); });
    }

    /// Adds v to the spanning set. Returns false if v was already in the span.
    bool insert(Word v) {
        v = reduce(v);
        if (v == 0) {
            return false;
        }
        Word pivot = pivot_bit(v);
        for (Word &row : rows_) {
            if (row & pivot) {
                row ^= v;
            }
        }
        auto pos = std::find_if(rows_.begin(), rows_.end(), [&](Word r) { return pivot_bit(r) < pivot; });
        rows_.insert(pos, v);
        return true;
    }

    /// All 2^dim codewords in Gray-code order starting from 0.
    std::vector<Word> codewords() const {
        if (dim() > kMaxEnumerationDim) {
            throw SizeLimitError("codeword enumeration limited to dimension 24");
        }
        std::vector<Word> out;
        out.reserve(std::size_t{1} << dim());
        Word w = 0;
        out.push_back(w);
        for (std::uint64_t i = 1; i < (std::uint64_t{1} << dim()); ++i) {
            w ^= rows_[static_cast<std::size_t>(std::countr_zero(i))];
            out.push_back(w);
        }
        return out;
    }

    bool operator==(const LinearCode &other) const {
        return n_ == other.n_ && rows_ == other.rows_;
    }

   private:
    static Word pivot_bit(Word row) {
        return Word{1} << (std::bit_width(row) - 1);
    }

    unsigned n_;
    std::vector<Word> rows_;
};

/// Orthogonal complement under the GF(2) inner product.
inline LinearCode dual(const LinearCode &code) {
    const unsigned n = code.length();
    Word pivots = 0;
    for (Word row : code.generators()) {
        pivots |= Word{1} << (std::bit_width(row) - 1);
    }
    std::vector<Word> basis;
    for (unsigned f = 0; f < n; ++f) {
        Word bit = Word{1} << f;
        if (pivots & bit) {
            continue;
        }
        Word v = bit;
        for (Word row : code.generators()) {
            if (row & bit) {
                v |= Word{1} << (std::bit_width(row) - 1);
            }
        }
        basis.push_back(v);
    }
    return LinearCode(n, basis);
}

namespace detail {

inline unsigned enumerate_min_weight(const LinearCode &code) {
    const auto &rows = code.generators();
    unsigned best = code.length() + 1;
    Word w = 0;
    for (std::uint64_t i = 1; i < (std::uint64_t{1} << code.dim()); ++i) {
        w ^= rows[static_cast<std::size_t>(std::countr_zero(i))];
        unsigned weight = static_cast<unsigned>(std::popcount(w));
        if (weight < best) {
            best = weight;
            if (best == 1) {
                break;
            }
        }
    }
    return best;
}

/// Smallest weight of a nonzero vector with zero syndrome against the dual
/// basis, searching weights in increasing order.
inline unsigned search_min_weight(const LinearCode &code) {
    const unsigned n = code.length();
    LinearCode parity = dual(code);
    std::vector<Word> column_syndrome(n, 0);
    for (unsigned l = 0; l < n; ++l) {
        for (std::size_t j = 0; j < parity.generators().size(); ++j) {
            if ((parity.generators()[j] >> l) & 1u) {
                column_syndrome[l] |= Word{1} << j;
            }
        }
    }
    for (unsigned w = 1; w <= n; ++w) {
        Word mask = (Word{1} << w) - 1;
        const Word limit = Word{1} << n;
        while (mask < limit) {
            Word s = 0;
            for (Word m = mask; m; m &= m - 1) {
                s ^= column_syndrome[static_cast<std::size_t>(std::countr_zero(m))];
            }
            if (s == 0) {
                return w;
            }
            // Next mask with the same popcount (Gosper).
            Word c = mask & (~mask + 1);
            Word r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }
    return n + 1;
}

}  // namespace detail

/// Minimum Hamming weight over the nonzero codewords.
inline unsigned min_weight(const LinearCode &code) {
    if (code.dim() == 0) {
        throw DomainError("min_weight needs a code of dimension >= 1");
    }
    for (Word row : code.generators()) {
        if (std::popcount(row) == 1) {
            return 1;
        }
    }
    if (code.dim() <= kMaxEnumerationDim) {
        return detail::enumerate_min_weight(code);
    }
    if (code.length() <= kMaxSearchLength) {
        return detail::search_min_weight(code);
    }
    throw SizeLimitError("min_weight needs dim <= 24 or n <= 28");
}

/// A[w] = number of codewords of weight w, w = 0..n.
inline std::vector<std::uint64_t> weight_enumerator(const LinearCode &code) {
    if (code.dim() > kMaxEnumerationDim) {
        throw SizeLimitError("weight enumerator limited to dimension 24");
    }
    std::vector<std::uint64_t> counts(code.length() + 1, 0);
    for (Word w : code.codewords()) {
        ++counts[static_cast<std::size_t>(std::popcount(w))];
    }
    return counts;
}

/// Weight distribution of the dual from that of the code,
/// B_j = |C|^{-1} Σ_i A_i K_j(i) with Krawtchouk polynomials K_j, in exact
/// integer arithmetic. Throws if |C| does not divide a sum, which means the
/// input is not the enumerator of a linear code of that dimension.
inline std::vector<std::int64_t> macwilliams_transform(std::span<const std::uint64_t> enumerator, unsigned dim) {
    if (enumerator.empty()) {
        throw DomainError("empty weight enumerator");
    }
    const unsigned n = static_cast<unsigned>(enumerator.size() - 1);
    if (n > 40 || dim > 40) {
        throw SizeLimitError("MacWilliams transform limited to n <= 40");
    }
    const std::int64_t size = std::int64_t{1} << dim;
    std::vector<std::int64_t> out(n + 1, 0);
    for (unsigned j = 0; j <= n; ++j) {
        __int128 sum = 0;
        for (unsigned i = 0; i <= n; ++i) {
            if (enumerator[i] == 0) {
                continue;
            }
            __int128 k = 0;
            for (unsigned l = 0; l <= j; ++l) {
                if (l > i || j - l > n - i) {
                    continue;
                }
                __int128 term = static_cast<__int128>(binomial_coefficient(i, l)) *
                                static_cast<__int128>(binomial_coefficient(n - i, j - l));
                k += (l % 2 == 0) ? term : -term;
            }
            sum += static_cast<__int128>(enumerator[i]) * k;
        }
        if (sum % size != 0) {
            throw DomainError("weight enumerator is inconsistent with a linear code");
        }
        out[j] = static_cast<std::int64_t>(sum / size);
    }
    return out;
}

/// CSS construction on C2 ⊂ C1 with its derived parameters.
struct CssCodePair {
    LinearCode c1;
    LinearCode c2;
    unsigned n = 0;
    unsigned k = 0;
    unsigned d1 = 0;      ///< min weight of C1 (n + 1 if C1 = {0})
    unsigned d1perp = 0;  ///< min weight of C1^⊥ (n + 1 if C1^⊥ = {0})
    unsigned d = 0;
    unsigned t = 0;
};

inline CssCodePair make_css(LinearCode c1, LinearCode c2) {
    if (c1.length() != c2.length()) {
        throw DomainError("CSS codes must have equal length");
    }
    if (!c2.is_subcode_of(c1)) {
        throw DomainError("C2 must be contained in C1");
    }
    const unsigned n = c1.length();
    LinearCode c1perp = dual(c1);
    unsigned d1 = c1.dim() > 0 ? min_weight(c1) : n + 1;
    unsigned d1perp = c1perp.dim() > 0 ? min_weight(c1perp) : n + 1;
    unsigned d = std::min(d1, d1perp);
    unsigned k = c1.dim() - c2.dim();
    return CssCodePair{std::move(c1), std::move(c2), n, k, d1, d1perp, d, (d - 1) / 2};
}

/// The [7,1,3] Steane code: C1 the Hamming [7,4,3] code, C2 = C1^⊥.
inline CssCodePair steane_code() {
    const std::vector<Word> checks{0b1111000, 0b1100110, 0b1010101};
    LinearCode c2(7, checks);
    LinearCode c1 = dual(c2);
    return make_css(std::move(c1), std::move(c2));
}

inline Word random_word(unsigned n, std::mt19937_64 &rng) {
    return rng() & length_mask(n);
}

/// Random C2 ⊂ C1 with dim C2 = floor((n-k)/2) and dim C1 = floor((n+k)/2).
///
/// C2 is a random generator matrix conditioned on full rank; C1 extends it
/// by random vectors outside the current span. The engine's raw output is
/// used directly, so a seed gives the same code on every platform.
inline CssCodePair sample_random_css(unsigned n, unsigned k, std::mt19937_64 &rng) {
    if (n == 0 || n > kMaxLength) {
        throw DomainError("code length must be in [1, 64]");
    }
    if (k < 1 || k >= n) {
        throw DomainError("logical size must satisfy 1 <= k < n");
    }
    const unsigned dim2 = (n - k) / 2;
    const unsigned dim1 = (n + k) / 2;
    std::vector<Word> rows(dim2);
    LinearCode c2 = LinearCode::zero(n);
    do {
        for (auto &r : rows) {
            r = random_word(n, rng);
        }
        c2 = LinearCode(n, rows);
    } while (c2.dim() != dim2);
    LinearCode c1 = c2;
    while (c1.dim() < dim1) {
        c1.insert(random_word(n, rng));
    }
    return make_css(std::move(c1), std::move(c2));
}

/// k/n >= (1 - ε) R_css(d/n), with d/n clamped to 1/2 where R_css bottoms out.
inline bool meets_rate_bound(const CssCodePair &pair, double epsilon) {
    double delta = std::min(static_cast<double>(pair.d) / pair.n, 0.5);
    return static_cast<double>(pair.k) / pair.n >= (1.0 - epsilon) * r_css(delta);
}

struct GoodnessReport {
    std::size_t samples = 0;
    std::size_t good = 0;
    double fraction = 0.0;
    Interval wilson;
};

inline GoodnessReport goodness_of(std::span<const CssCodePair> pairs, double epsilon) {
    if (pairs.empty()) {
        throw DomainError("goodness needs at least one sample");
    }
    GoodnessReport out;
    out.samples = pairs.size();
    for (const auto &p : pairs) {
        out.good += meets_rate_bound(p, epsilon) ? 1 : 0;
    }
    out.fraction = static_cast<double>(out.good) / static_cast<double>(out.samples);
    out.wilson = wilson_interval(out.good, out.samples);
    return out;
}

/// Fraction of random CSS pairs meeting the rate bound at slack ε.
inline GoodnessReport empirical_goodness(unsigned n, unsigned k, double epsilon, std::size_t samples,
                                         std::mt19937_64 &rng) {
    if (samples == 0) {
        throw DomainError("sample count must be at least 1");
    }
    std::vector<CssCodePair> pairs;
    pairs.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        pairs.push_back(sample_random_css(n, k, rng));
    }
    return goodness_of(pairs, epsilon);
}

/// Representatives q_η of the cosets C2^⊥ / C1^⊥, each the numerically
/// smallest member of its coset, sorted ascending. Index η is the logical
/// basis label, so η = 0 is the coset C1^⊥ itself.
inline std::vector<Word> coset_representatives(const CssCodePair &pair) {
    LinearCode c1perp = dual(pair.c1);
    LinearCode c2perp = dual(pair.c2);
    LinearCode grown = c1perp;
    std::vector<Word> complement;
    for (Word g : c2perp.generators()) {
        if (grown.insert(g)) {
            complement.push_back(g);
        }
    }
    if (complement.size() != pair.k) {
        throw DomainError("coset count does not match k");
    }
    if (pair.k > 20) {
        throw SizeLimitError("too many logical qubits to list cosets");
    }
    std::vector<Word> reps;
    reps.reserve(std::size_t{1} << pair.k);
    for (std::uint64_t eta = 0; eta < (std::uint64_t{1} << pair.k); ++eta) {
        Word q = 0;
        for (unsigned i = 0; i < pair.k; ++i) {
            if ((eta >> i) & 1u) {
                q ^= complement[i];
            }
        }
        reps.push_back(c1perp.reduce(q));
    }
    std::sort(reps.begin(), reps.end());
    return reps;
}

/// Code basis states |Q⟩ = |C1|^{-1/2} Σ_{y∈C1} Z_q |y⟩ in coset order.
inline std::vector<PureState> codewords(const CssCodePair &pair) {
    if (pair.n > kMaxStateLength) {
        throw SizeLimitError("code states limited to n <= 14");
    }
    const std::size_t dim = std::size_t{1} << pair.n;
    const std::vector<Word> support = pair.c1.codewords();
    const double amp = 1.0 / std::sqrt(static_cast<double>(support.size()));
    std::vector<PureState> out;
    for (Word q : coset_representatives(pair)) {
        std::vector<Complex> a(dim, 0.0);
        for (Word y : support) {
            a[static_cast<std::size_t>(y)] = parity_dot(q, y) ? -amp : amp;
        }
        out.emplace_back(pair.n, std::move(a));
    }
    return out;
}

/// Text form: "n k dim1 dim2", then the C1 and C2 basis rows as 0/1 strings
/// (character l is coordinate l), one per line.
inline std::string to_text(const CssCodePair &pair) {
    std::ostringstream out;
    out << pair.n << ' ' << pair.k << ' ' << pair.c1.dim() << ' ' << pair.c2.dim() << '\n';
    for (const LinearCode *code : {&pair.c1, &pair.c2}) {
        for (Word row : code->generators()) {
            out << BitString(pair.n, row).str() << '\n';
        }
    }
    return out.str();
}

inline CssCodePair from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    long long n = 0, k = 0, dim1 = 0, dim2 = 0;
    if (!(in >> n >> k >> dim1 >> dim2)) {
        throw FormatError("code header must be 'n k dim1 dim2'");
    }
    if (n < 1 || n > kMaxLength || dim1 < 0 || dim2 < 0 || dim1 > n || dim2 > dim1) {
        throw FormatError("code header values out of range");
    }
    auto read_rows = [&](long long count) {
        std::vector<Word> rows;
        for (long long i = 0; i < count; ++i) {
            std::string line;
            if (!(in >> line)) {
                throw FormatError("missing generator row");
            }
            if (static_cast<long long>(line.size()) != n) {
                throw FormatError("generator row length differs from n");
            }
            rows.push_back(BitString::parse(line).bits());
        }
        return rows;
    };
    auto rows1 = read_rows(dim1);
    auto rows2 = read_rows(dim2);
    std::string extra;
    if (in >> extra) {
        throw FormatError("trailing content after generator rows");
    }
    LinearCode c1(static_cast<unsigned>(n), rows1);
    LinearCode c2(static_cast<unsigned>(n), rows2);
    if (c1.dim() != dim1 || c2.dim() != dim2) {
        throw FormatError("generator rows are linearly dependent");
    }
    if (dim1 - dim2 != k) {
        throw FormatError("k must equal dim1 - dim2");
    }
    return make_css(std::move(c1), std::move(c2));
}

}  // namespace corrqec::codes
