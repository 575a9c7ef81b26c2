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

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "corrqec/corrqec.hpp"

namespace {

using namespace corrqec;

constexpr int kExitDomain = 1;
constexpr int kExitNumerical = 2;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

const char *fmt(bool v) {
    return v ? "true" : "false";
}

class CsvWriter {
   public:
    explicit CsvWriter(const std::string &path) {
        if (!path.empty() && path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw DomainError("cannot open output file " + path);
            }
        }
    }
    std::ostream &out() {
        return file_.is_open() ? static_cast<std::ostream &>(file_) : std::cout;
    }
    void row(const std::vector<std::string> &cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) {
                line += ',';
            }
            line += cells[i];
        }
        line += '\n';
        out() << line;
    }

   private:
    std::ofstream file_;
};

// Runs fn(i) for i < count on a small pool. Results come back in index order;
// the lowest-index exception is rethrown.
template <typename R, typename F>
std::vector<R> parallel_map(std::size_t count, unsigned jobs, F fn) {
    std::vector<std::optional<R>> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                results[i].emplace(fn(i));
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < jobs; ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    std::vector<R> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (errors[i]) {
            std::rethrow_exception(errors[i]);
        }
        out.push_back(std::move(*results[i]));
    }
    return out;
}

struct Globals {
    std::string out;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;
    std::optional<double> tol;

    double tolerance(double fallback) const {
        if (tol) {
            return *tol;
        }
        if (const char *env = std::getenv("CORRQEC_TOL"); env && *env) {
            char *end = nullptr;
            double v = std::strtod(env, &end);
            if (end == env || *end != '\0' || !(v > 0.0)) {
                throw DomainError("CORRQEC_TOL must be a positive number");
            }
            return v;
        }
        return fallback;
    }
    std::uint64_t require_seed(const char *what) const {
        if (!seed) {
            throw DomainError(std::string(what) + " is stochastic and requires --seed");
        }
        return *seed;
    }
};

struct BathInput {
    double A = 0.0;
    double s = 1.0;
    double Omega = 1.0;
    double T = 0.0;

    void add(CLI::App *app) {
        app->add_option("--A", A, "coupling amplitude");
        app->add_option("--s", s, "spectral exponent, 0 < s < 3");
        app->add_option("--Omega", Omega, "cutoff frequency");
        app->add_option("--T", T, "temperature");
    }
    bath::BathParams params() const {
        return bath::BathParams{A, s, Omega, T};
    }
};

// A decoherence pair given directly or derived from a bath and geometry.
struct PairInput {
    std::optional<double> gamma0;
    std::optional<double> gammaR;
    BathInput bath;
    std::optional<double> r;
    std::optional<double> tau;

    void add(CLI::App *app) {
        app->add_option("--gamma0", gamma0, "Γ0 (direct pair)");
        app->add_option("--gammaR", gammaR, "Γr (direct pair)");
        bath.add(app);
        app->add_option("--r", r, "qubit distance (bath path)");
        app->add_option("--tau", tau, "observation time (bath path)");
    }
    std::pair<DecoherencePair, std::string> resolve(double tol) const {
        if (gamma0 || gammaR) {
            if (!gamma0 || !gammaR) {
                throw DomainError("--gamma0 and --gammaR must be given together");
            }
            return {DecoherencePair(*gamma0, *gammaR), "pair"};
        }
        if (r && tau) {
            bath::GammaOptions opt;
            opt.rel_tol = tol;
            return {bath::gamma_pair(bath.params(), *r, *tau, opt).decoherence(), "bath"};
        }
        throw DomainError("give either --gamma0/--gammaR or bath parameters with --r and --tau");
    }
};

// ---------------------------------------------------------------- gamma

struct GammaCmd {
    BathInput bath;
    std::vector<double> r{0.0, 1.0, 2.0, 5.0, 10.0};
    std::vector<double> tau{1.0, 10.0};
    std::optional<double> scale;

    int run(const Globals &g) {
        bath::GammaOptions opt;
        opt.rel_tol = g.tolerance(1e-9);
        const bath::BathParams bp = bath.params();
        bp.validate();
        struct Cell {
            double r, tau;
        };
        std::vector<Cell> cells;
        for (double ri : r) {
            for (double ti : tau) {
                cells.push_back({ri, ti});
            }
        }
        auto rows = parallel_map<std::vector<std::string>>(cells.size(), g.jobs, [&](std::size_t i) {
            const Cell c = cells[i];
            bath::GammaPair p = bath::gamma_pair(bp, c.r, c.tau, opt);
            std::vector<std::string> row{fmt(c.r), fmt(c.tau), fmt(p.zero.value), fmt(p.at_r.value),
                                         fmt(p.max_error())};
            if (scale) {
                bath::ScalingCheck chk = bath::scaling_identity(bp, {c.r, c.tau}, *scale, opt);
                row.insert(row.end(), {fmt(*scale), fmt(chk.lhs()), fmt(chk.rhs()), fmt(chk.combined_error())});
            }
            return row;
        });
        CsvWriter csv(g.out);
        std::vector<std::string> header{"r", "tau", "gamma0", "gammaR", "err_estimate"};
        if (scale) {
            header.insert(header.end(), {"a", "scaled_lhs", "scaled_rhs", "scaled_err"});
        }
        csv.row(header);
        for (auto &row : rows) {
            csv.row(row);
        }
        return 0;
    }
};

// ---------------------------------------------------------------- fig1

struct Fig1Cmd {
    double gamma0 = 0.01;
    double ratio = 0.05;
    std::vector<double> gammaR{0.01, 0.005, 0.0025, 0.00125, 0.0};
    std::vector<std::uint64_t> t;

    int run(const Globals &g) {
        if (t.empty()) {
            for (std::uint64_t v = 10; v <= 200; v += 10) {
                t.push_back(v);
            }
        }
        if (!(ratio > 0.0 && ratio < 1.0)) {
            throw DomainError("--ratio must lie in (0, 1)");
        }
        residual::ResidualOptions opt;
        opt.rel_tol = g.tolerance(1e-12);
        struct Cell {
            std::uint64_t t, n;
            double gr;
        };
        std::vector<Cell> cells;
        for (double gr : gammaR) {
            for (std::uint64_t ti : t) {
                auto n = static_cast<std::uint64_t>(std::llround(static_cast<double>(ti) / ratio));
                cells.push_back({ti, n, gr});
            }
        }
        auto rows = parallel_map<std::vector<std::string>>(cells.size(), g.jobs, [&](std::size_t i) {
            const Cell c = cells[i];
            DecoherencePair pair(gamma0, c.gr);
            double delta = residual::code_avg_residual({c.n, c.t, pair}, opt);
            std::string asym = c.gr == 0.0 ? "" : fmt(residual::asymptotic_residual(ratio, pair).exact);
            return std::vector<std::string>{std::to_string(c.t), std::to_string(c.n), fmt(c.gr), fmt(delta), asym};
        });
        CsvWriter csv(g.out);
        csv.row({"t", "n", "gammaR", "delta", "delta_asymptote"});
        for (auto &row : rows) {
            csv.row(row);
        }
        return 0;
    }
};

// ---------------------------------------------------------------- oracle

struct OracleCmd {
    std::string code = "steane";
    PairInput pair;
    std::size_t states = 1;
    double threshold = 1e-10;

    int run(const Globals &g) {
        codes::CssCodePair css = codes::steane_code();
        if (code != "steane") {
            std::ifstream in(code);
            if (!in) {
                throw DomainError("cannot read code file " + code);
            }
            std::stringstream text;
            text << in.rdbuf();
            css = codes::from_text(text.str());
        }
        if (css.n > oracle::kMaxRecoveryQubits) {
            throw SizeLimitError("oracle runs require n <= 10");
        }
        auto [noise, source] = pair.resolve(g.tolerance(1e-9));
        std::mt19937_64 rng(g.require_seed("oracle"));
        const dephasing::AlphaMatrix alpha = dephasing::alpha_matrix(css.n, noise);
        CsvWriter csv(g.out);
        csv.row({"state_id", "delta_exact", "delta_formula", "abs_difference"});
        double worst = 0.0;
        for (std::size_t i = 0; i < states; ++i) {
            std::vector<Complex> logical = oracle::random_logical_state(css.k, rng);
            PureState psi = oracle::encode(logical, css);
            double exact = oracle::residual_exact(psi, noise, css);
            double formula = 1.0 - oracle::fidelity_formula(psi, alpha, css);
            double diff = std::abs(exact - formula);
            worst = std::max(worst, diff);
            csv.row({std::to_string(i), fmt(exact), fmt(formula), fmt(diff)});
        }
        std::cerr << "max_abs_difference=" << fmt(worst) << " source=" << source << "\n";
        if (!(worst < threshold)) {
            std::cerr << "oracle mismatch above " << fmt(threshold) << "\n";
            return kExitNumerical;
        }
        return 0;
    }
};

// ---------------------------------------------------------------- codes

struct CodesCmd {
    unsigned n = 7;
    unsigned k = 1;
    std::size_t samples = 100;
    double epsilon = 0.1;
    std::string export_dir;

    int run(const Globals &g) {
        std::mt19937_64 rng(g.require_seed("codes"));
        std::vector<codes::CssCodePair> pairs;
        pairs.reserve(samples);
        // Drawn sequentially so the sample stream does not depend on --jobs.
        for (std::size_t i = 0; i < samples; ++i) {
            pairs.push_back(codes::sample_random_css(n, k, rng));
        }
        CsvWriter csv(g.out);
        csv.row({"sample_id", "n", "k", "d1", "d1perp", "d", "meets_bound"});
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto &p = pairs[i];
            csv.row({std::to_string(i), std::to_string(p.n), std::to_string(p.k), std::to_string(p.d1),
                     std::to_string(p.d1perp), std::to_string(p.d), fmt(codes::meets_rate_bound(p, epsilon))});
            if (!export_dir.empty()) {
                std::ofstream f(export_dir + "/sample_" + std::to_string(i) + ".code", std::ios::binary);
                if (!f) {
                    throw DomainError("cannot write into " + export_dir);
                }
                f << codes::to_text(p);
            }
        }
        codes::GoodnessReport rep = codes::goodness_of(pairs, epsilon);
        std::cerr << "good=" << rep.good << "/" << rep.samples << " fraction=" << fmt(rep.fraction)
                  << " wilson95=[" << fmt(rep.wilson.lo) << "," << fmt(rep.wilson.hi) << "] epsilon=" << fmt(epsilon)
                  << "\n";
        return 0;
    }
};

// ---------------------------------------------------------------- scalability

struct ScalabilityCmd {
    residual::ScalingScenario scen;
    std::vector<double> n;

    void add(CLI::App *app) {
        app->add_option("--A", scen.A, "coupling amplitude");
        app->add_option("--s", scen.s, "spectral exponent");
        app->add_option("--y", scen.y, "register growth exponent, >= 1/3");
        app->add_option("--r0", scen.r0, "qubit distance at n0");
        app->add_option("--tau0", scen.tau0, "cycle time at n0");
        app->add_option("--n0", scen.n0, "reference register size");
        app->add_option("--T", scen.T, "temperature");
        app->add_option("--Omega", scen.Omega, "cutoff frequency");
        app->add_option("--q", scen.q, "(t+1)/n");
        app->add_option("--mu", scen.mu, "budget exponent");
        app->add_option("--b", scen.b, "budget prefactor");
        app->add_option("--n", n, "register sizes (default 10 .. 1e9)")->delimiter(',');
    }

    int run(const Globals &g) {
        scen.validate();
        if (n.empty()) {
            for (int e = 2; e <= 18; ++e) {
                n.push_back(std::round(std::pow(10.0, e / 2.0)));
            }
        }
        std::sort(n.begin(), n.end());
        bath::GammaOptions opt;
        opt.rel_tol = g.tolerance(1e-9);
        auto rows = parallel_map<residual::ScalabilityRow>(
            n.size(), g.jobs, [&](std::size_t i) { return residual::scalability_row(scen, n[i], opt); });
        residual::ScalabilityReport rep = residual::summarize_scalability(scen, std::move(rows));
        CsvWriter csv(g.out);
        csv.row({"n", "a", "gammaR_eff", "gamma_budget", "satisfied"});
        for (const auto &row : rep.rows) {
            csv.row({fmt(row.n), fmt(row.a), fmt(row.gamma_eff),
                     row.budget.unconstrained ? "inf" : fmt(row.budget.exact), fmt(row.satisfied)});
        }
        std::cerr << "verdict: " << rep.verdict();
        if (rep.crossover_n) {
            std::cerr << "; crossover_n=" << fmt(*rep.crossover_n);
        }
        std::cerr << "; grid_consistent=" << fmt(rep.grid_consistent) << "\n";
        return 0;
    }
};

// ---------------------------------------------------------------- beta

struct BetaCmd {
    unsigned n = 7;
    std::vector<unsigned> w;
    PairInput pair;

    int run(const Globals &g) {
        auto [noise, source] = pair.resolve(g.tolerance(1e-9));
        if (w.empty()) {
            for (unsigned i = 0; i <= n; ++i) {
                w.push_back(i);
            }
        }
        auto rows = parallel_map<std::vector<std::string>>(w.size(), g.jobs, [&](std::size_t i) {
            double lb = dephasing::log_beta(n, w[i], noise);
            return std::vector<std::string>{std::to_string(n), std::to_string(w[i]), fmt(std::exp(lb)), fmt(lb),
                                            fmt(noise.gamma0()), fmt(noise.gamma_r()), source};
        });
        CsvWriter csv(g.out);
        csv.row({"n", "w", "beta", "log_beta", "gamma0", "gammaR", "source"});
        for (auto &row : rows) {
            csv.row(row);
        }
        return 0;
    }
};

// ---------------------------------------------------------------- residual

struct ResidualCmd {
    std::vector<std::uint64_t> n{100, 200, 400, 800, 1600};
    std::optional<std::uint64_t> t;
    double q = 0.05;
    PairInput pair;

    int run(const Globals &g) {
        auto [noise, source] = pair.resolve(g.tolerance(1e-9));
        residual::ResidualOptions opt;
        opt.rel_tol = g.tolerance(1e-12);
        if (!(q > 0.0 && q < 1.0)) {
            throw DomainError("--q must lie in (0, 1)");
        }
        auto rows = parallel_map<std::vector<std::string>>(n.size(), g.jobs, [&](std::size_t i) {
            std::uint64_t ni = n[i];
            std::uint64_t ti = t ? *t : static_cast<std::uint64_t>(std::max<long long>(0, std::llround(q * ni) - 1));
            double delta = residual::code_avg_residual({ni, ti, noise}, opt);
            double indep = residual::independent_residual(ni, ti, noise.gamma0());
            double qi = static_cast<double>(ti + 1) / static_cast<double>(ni);
            std::string asym, approx;
            if (qi < 1.0) {
                residual::AsymptoticResidual a = residual::asymptotic_residual(qi, noise);
                asym = fmt(a.exact);
                approx = fmt(a.erfc_approx);
            }
            return std::vector<std::string>{std::to_string(ni), std::to_string(ti), fmt(noise.gamma0()),
                                            fmt(noise.gamma_r()), fmt(delta), fmt(indep), asym, approx, source};
        });
        CsvWriter csv(g.out);
        csv.row({"n", "t", "gamma0", "gammaR", "delta", "delta_independent", "delta_asymptote", "erfc_approx",
                 "source"});
        for (auto &row : rows) {
            csv.row(row);
        }
        return 0;
    }
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Correlated dephasing and CSS error correction"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "INI file; [section] per subcommand, flags override");
    Globals g;
    app.add_option("--out", g.out, "output CSV path (default stdout)");
    app.add_option("--seed", g.seed, "RNG seed for stochastic subcommands");
    app.add_option("--jobs", g.jobs, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--tol", g.tol, "relative quadrature tolerance (env CORRQEC_TOL)")->check(CLI::PositiveNumber);

    GammaCmd gamma;
    auto *gc = app.add_subcommand("gamma", "Γ0 and Γr over an (r, τ) grid");
    gamma.bath.add(gc);
    gc->add_option("--r", gamma.r, "distances")->delimiter(',');
    gc->add_option("--tau", gamma.tau, "times")->delimiter(',');
    gc->add_option("--scale", gamma.scale, "also check the rescaling identity with factor a");

    Fig1Cmd fig1;
    auto *fc = app.add_subcommand("fig1", "residual error against t at fixed t/n");
    fc->add_option("--gamma0", fig1.gamma0, "Γ0");
    fc->add_option("--ratio", fig1.ratio, "t/n");
    fc->add_option("--gammaR", fig1.gammaR, "Γr values")->delimiter(',');
    fc->add_option("--t", fig1.t, "t values (default 10..200)")->delimiter(',');

    OracleCmd orc;
    auto *oc = app.add_subcommand("oracle", "exact density-matrix run against the fidelity formula");
    oc->add_option("--code", orc.code, "'steane' or a code file");
    orc.pair.add(oc);
    oc->add_option("--states", orc.states, "number of random logical states");
    oc->add_option("--threshold", orc.threshold, "largest accepted |difference|");

    CodesCmd cds;
    auto *cc = app.add_subcommand("codes", "sample random CSS pairs");
    cc->add_option("--n", cds.n, "length");
    cc->add_option("--k", cds.k, "logical qubits");
    cc->add_option("--samples", cds.samples, "sample count");
    cc->add_option("--epsilon", cds.epsilon, "slack in the rate bound");
    cc->add_option("--export", cds.export_dir, "write each sample as a code file into this directory");

    ScalabilityCmd scal;
    auto *sc = app.add_subcommand("scalability", "Γr growth against the residual-error budget");
    scal.add(sc);

    BetaCmd beta;
    auto *bc = app.add_subcommand("beta", "diagonal coefficients β_w");
    bc->add_option("--n", beta.n, "length");
    bc->add_option("--w", beta.w, "weights (default 0..n)")->delimiter(',');
    beta.pair.add(bc);

    ResidualCmd res;
    auto *rc = app.add_subcommand("residual", "code-averaged residual error");
    rc->add_option("--n", res.n, "lengths")->delimiter(',');
    rc->add_option("--t", res.t, "correctable errors (default round(q n) - 1)");
    rc->add_option("--q", res.q, "(t+1)/n when --t is absent");
    res.pair.add(rc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitDomain;
    }

    try {
        if (*gc) return gamma.run(g);
        if (*fc) return fig1.run(g);
        if (*oc) return orc.run(g);
        if (*cc) return cds.run(g);
        if (*sc) return scal.run(g);
        if (*bc) return beta.run(g);
        if (*rc) return res.run(g);
    } catch (const ConvergenceError &e) {
        std::cerr << "error: " << e.what() << " (best estimate " << fmt(e.best_estimate) << ", error "
                  << fmt(e.achieved_error) << ")\n";
        return kExitNumerical;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitDomain;
}
