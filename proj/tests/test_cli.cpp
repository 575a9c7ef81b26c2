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

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace {

struct CliRun {
    int status = -1;
    std::string out;
    std::string err;
};

CliRun run(const std::string &args, const std::string &env = "") {
    static int counter = 0;
    auto err_path = std::filesystem::temp_directory_path() /
                    ("corrqec_cli_err_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::string cmd = env + " " + CORRQEC_CLI_PATH + " " + args + " 2>" + err_path.string();
    CliRun r;
    FILE *pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) {
        r.out.append(buf, got);
    }
    int raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    std::ifstream e(err_path);
    std::stringstream ss;
    ss << e.rdbuf();
    r.err = ss.str();
    std::filesystem::remove(err_path);
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string &text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            cells.emplace_back();
        }
        rows.push_back(cells);
    }
    return rows;
}

std::string header(const std::string &text) {
    return text.substr(0, text.find('\n'));
}

}  // namespace

TEST(Cli, GammaGridAndZeroCoupling) {
    CliRun r = run("gamma --A 0 --r 0,1,2 --tau 1,5");
    ASSERT_EQ(r.status, 0) << r.err;
    auto rows = parse_csv(r.out);
    EXPECT_EQ(header(r.out), "r,tau,gamma0,gammaR,err_estimate");
    ASSERT_EQ(rows.size(), 1u + 3 * 2);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][2], "0");
        EXPECT_EQ(rows[i][3], "0");
    }
}

TEST(Cli, GammaScalingColumns) {
    CliRun r = run("gamma --A 1 --s 1.5 --Omega 5 --T 1 --r 1 --tau 2 --scale 2");
    ASSERT_EQ(r.status, 0) << r.err;
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    ASSERT_EQ(rows[1].size(), 9u);
    double lhs = std::stod(rows[1][6]), rhs = std::stod(rows[1][7]), err = std::stod(rows[1][8]);
    EXPECT_LE(std::abs(lhs - rhs), 10 * err);
}

TEST(Cli, SeventeenDigitOutput) {
    CliRun r = run("gamma --A 1 --s 1 --Omega 10 --T 1 --r 0 --tau 5");
    ASSERT_EQ(r.status, 0);
    auto rows = parse_csv(r.out);
    EXPECT_EQ(rows[1][2].substr(0, 9), "15.750356");
    EXPECT_GE(rows[1][2].size(), 17u);
}

TEST(Cli, Fig1Defaults) {
    CliRun r = run("fig1 --jobs 4");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(header(r.out), "t,n,gammaR,delta,delta_asymptote");
    auto rows = parse_csv(r.out);
    std::map<std::string, std::vector<std::vector<std::string>>> curves;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(std::stoll(rows[i][1]), 20 * std::stoll(rows[i][0]));
        curves[rows[i][2]].push_back(rows[i]);
    }
    EXPECT_EQ(curves.size(), 5u);
    double prev = 2.0;
    for (const auto &row : curves["0"]) {
        EXPECT_EQ(row[4], "");
        double d = std::stod(row[3]);
        EXPECT_LT(d, prev);
        prev = d;
    }
}

TEST(Cli, Fig1FlattensTowardsAsymptote) {
    CliRun r = run("fig1 --gammaR 0.01 --t 500,1000");
    ASSERT_EQ(r.status, 0) << r.err;
    auto rows = parse_csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double d = std::stod(rows[i][3]), a = std::stod(rows[i][4]);
        EXPECT_LT((d - a) / a, 0.05) << rows[i][0];
    }
}

TEST(Cli, Fig1IsByteIdenticalAcrossJobCounts) {
    CliRun a = run("fig1 --jobs 1 --t 10,50,90");
    CliRun b = run("fig1 --jobs 6 --t 10,50,90");
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, OracleSteane) {
    CliRun r = run("oracle --seed 5 --states 4 --gamma0 0.01 --gammaR 0.005");
    ASSERT_EQ(r.status, 0) << r.err;
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(header(r.out), "state_id,delta_exact,delta_formula,abs_difference");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_LT(std::stod(rows[i][3]), 1e-10);
    }
    CliRun again = run("oracle --seed 5 --states 4 --gamma0 0.01 --gammaR 0.005");
    EXPECT_EQ(r.out, again.out);
    CliRun other = run("oracle --seed 6 --states 4 --gamma0 0.01 --gammaR 0.005");
    EXPECT_NE(r.out, other.out);
}

TEST(Cli, OracleNoiseless) {
    CliRun r = run("oracle --seed 1 --gamma0 0 --gammaR 0");
    ASSERT_EQ(r.status, 0);
    auto rows = parse_csv(r.out);
    EXPECT_LT(std::abs(std::stod(rows[1][1])), 1e-14);
    EXPECT_LT(std::abs(std::stod(rows[1][2])), 1e-14);
}

TEST(Cli, OracleMismatchAndSeedContract) {
    EXPECT_EQ(run("oracle --seed 1 --gamma0 0.1 --gammaR 0.05 --threshold 0").status, 2);
    CliRun noseed = run("oracle --gamma0 0.01 --gammaR 0.005");
    EXPECT_EQ(noseed.status, 1);
    EXPECT_NE(noseed.err.find("--seed"), std::string::npos);
}

TEST(Cli, OracleFromCodeFile) {
    auto dir = std::filesystem::temp_directory_path() / ("corrqec_codes_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    CliRun c = run("codes --seed 3 --n 8 --k 2 --samples 2 --export " + dir.string());
    ASSERT_EQ(c.status, 0) << c.err;
    CliRun r = run("oracle --seed 2 --code " + (dir / "sample_1.code").string() + " --gamma0 0.02 --gammaR 0.01");
    EXPECT_EQ(r.status, 0) << r.err;
    std::filesystem::remove_all(dir);
}

TEST(Cli, CodesSamples) {
    CliRun r = run("codes --seed 11 --n 7 --k 1 --samples 30");
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(header(r.out), "sample_id,n,k,d1,d1perp,d,meets_bound");
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 31u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][2], "1");
    }
    EXPECT_NE(r.err.find("fraction="), std::string::npos);
    EXPECT_NE(r.err.find("wilson95=["), std::string::npos);
    EXPECT_EQ(r.out, run("codes --seed 11 --n 7 --k 1 --samples 30").out);
}

TEST(Cli, ScalabilityVerdicts) {
    const std::string common = "scalability --A 0.02 --r0 2 --tau0 1 --T 1 --Omega 10 --n 10,1e3,1e5,1e7,1e9";
    CliRun good = run(common + " --s 2.5");
    ASSERT_EQ(good.status, 0) << good.err;
    EXPECT_EQ(header(good.out), "n,a,gammaR_eff,gamma_budget,satisfied");
    auto rows = parse_csv(good.out);
    EXPECT_EQ(rows.back()[4], "true");
    EXPECT_NE(good.err.find("verdict: scalable"), std::string::npos);
    CliRun bad = run(common + " --s 1");
    EXPECT_NE(bad.err.find("verdict: not scalable"), std::string::npos);
    EXPECT_NE(bad.err.find("crossover_n="), std::string::npos);
    CliRun quiet = run("scalability --A 0 --n 10,100");
    EXPECT_NE(quiet.err.find("verdict: scalable (no noise)"), std::string::npos);
}

TEST(Cli, BetaAndResidualRecordSource) {
    CliRun b = run("beta --n 4 --gamma0 0.02 --gammaR 0.01");
    ASSERT_EQ(b.status, 0) << b.err;
    auto rows = parse_csv(b.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[1].back(), "pair");
    CliRun viaBath = run("beta --n 3 --A 0.01 --s 1 --Omega 5 --T 0.1 --r 1 --tau 1");
    ASSERT_EQ(viaBath.status, 0) << viaBath.err;
    EXPECT_EQ(parse_csv(viaBath.out)[1].back(), "bath");
    CliRun res = run("residual --n 100,200 --gamma0 0.01 --gammaR 0.005");
    ASSERT_EQ(res.status, 0) << res.err;
    EXPECT_EQ(header(res.out), "n,t,gamma0,gammaR,delta,delta_independent,delta_asymptote,erfc_approx,source");
    EXPECT_EQ(parse_csv(res.out).size(), 3u);
}

TEST(Cli, ConfigFileAndOverrides) {
    auto path = std::filesystem::temp_directory_path() / ("corrqec_cfg_" + std::to_string(::getpid()) + ".ini");
    {
        std::ofstream f(path);
        f << "[gamma]\nA = 0\nr = 0,1\ntau = 2\n";
    }
    CliRun a = run("--config " + path.string() + " gamma");
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(parse_csv(a.out).size(), 3u);
    CliRun b = run("--config " + path.string() + " gamma --r 0,1,2,3");
    EXPECT_EQ(parse_csv(b.out).size(), 5u);
    std::filesystem::remove(path);
}

TEST(Cli, OutputFile) {
    auto path = std::filesystem::temp_directory_path() / ("corrqec_out_" + std::to_string(::getpid()) + ".csv");
    CliRun r = run("--out " + path.string() + " gamma --A 0 --r 0 --tau 1");
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::string line;
    std::getline(f, line);
    EXPECT_EQ(line, "r,tau,gamma0,gammaR,err_estimate");
    std::filesystem::remove(path);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run("gamma --A 1 --s 3.5").status, 1);
    EXPECT_EQ(run("nonsense").status, 1);
    EXPECT_EQ(run("gamma --A 0", "CORRQEC_TOL=abc").status, 1);
    EXPECT_EQ(run("gamma --A 0", "CORRQEC_TOL=1e-6").status, 0);
    EXPECT_EQ(run("residual --n 10 --t 10 --gamma0 0.1 --gammaR 0").status, 1);
}
