// SPDX-License-Identifier: Apache-2.0
//
// mrelay: correlated massive MIMO relay simulation with low-resolution ADCs
// Copyright (C) 2026 The mrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mrelay/experiments.hpp"

using namespace mrelay;

namespace
{

struct outcome
{
    bool passed = false;
    std::string detail;
};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0)
{
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
    return buf;
}

scenario_config equal_beta(int N, double delta)
{
    scenario_config c;
    c.N = N;
    c.delta = delta;
    c.betas = std::vector<double>(static_cast<std::size_t>(c.K), 1.0);
    c.eta = 1.0;
    c.perfect_csi = true;
    return c;
}

double closed_rate(const scenario_config &c) { return sum_rate_approx(system_model::from(c)).sum_rate; }

double slope(const std::vector<double> &x, const std::vector<double> &y)
{
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(y.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

std::vector<std::vector<double>> numeric_rows(const std::string &csv, std::vector<std::string> &labels)
{
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line))
    {
        if (line.rfind("#", 0) == 0)
            continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        std::string label;
        while (std::getline(ss, cell, ','))
        {
            if (cell == "ideal" || cell == "F" || cell == "G")
            {
                label += cell;
                row.push_back(0.0);
            }
            else
                row.push_back(std::stod(cell));
        }
        labels.push_back(label);
        rows.push_back(row);
    }
    return rows;
}

// Lloyd-Max distortion of the optimal Gaussian quantizer against the reference table.
outcome c1_lloyd_max()
{
    constexpr double tol = 1e-3;
    constexpr double time_limit = 1.0;
    const auto t0 = clock_type::now();
    double worst = 0.0;
    for (int q = 1; q <= 5; ++q)
        worst = std::max(worst, std::abs(lloyd_max_distortion(q) - distortion_table[static_cast<std::size_t>(q - 1)]));
    const double secs = seconds_since(t0);
    return {worst <= tol && secs < time_limit,
            fmt("max |rho - table| = %.3g (tol %.0e), %.2f s (limit %.0f s)", worst, tol, secs, time_limit)};
}

// Moments of P X Q against Monte Carlo on random P and Q.
outcome c2_lemma1()
{
    constexpr int pairs = 20;
    constexpr std::int64_t draws = 100000;
    constexpr double z_limit = 5.0;
    constexpr double time_limit = 30.0;
    const auto t0 = clock_type::now();
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p)
    {
        rng gen(substream_seed(2024, static_cast<std::uint64_t>(p), stream_tag::lemma1));
        const Eigen::Index m = 1 + static_cast<Eigen::Index>(gen.engine()() % 8);
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(gen.engine()() % 8);
        const cmat P = gen.complex_gaussian(m, m);
        const cmat Q = gen.complex_gaussian(n, n);
        const Eigen::Index i = static_cast<Eigen::Index>(gen.engine()() % static_cast<std::uint64_t>(n));
        const Eigen::Index j = static_cast<Eigen::Index>(gen.engine()() % static_cast<std::uint64_t>(n));
        const auto exact = lemma1_moments(P, Q, i, j);
        const auto est = lemma1_moments_mc(P, Q, i, j, draws, gen);
        using detail::z_score;
        worst = std::max({worst, z_score(est.mean.m1.real(), exact.m1.real(), est.m1_se.real()),
                          z_score(est.mean.m1.imag(), exact.m1.imag(), est.m1_se.imag()),
                          z_score(est.mean.m2, exact.m2, est.m2_se)});
        for (Eigen::Index r = 0; r < m; ++r)
            worst = std::max({worst, z_score(est.mean.row_m1(r).real(), exact.row_m1(r).real(), est.row_m1_se(r).real()),
                              z_score(est.mean.row_m1(r).imag(), exact.row_m1(r).imag(), est.row_m1_se(r).imag()),
                              z_score(est.mean.row_m2(r), exact.row_m2(r), est.row_m2_se(r))});
    }
    const double secs = seconds_since(t0);
    return {worst <= z_limit && secs < time_limit,
            fmt("%.0f pairs, max |z| = %.2f (limit %.0f), %.1f s", pairs, worst, z_limit, secs) +
                fmt(" (limit %.0f s)", time_limit)};
}

// Estimation MSE: pilot simulation vs closed form over the power grid, and the one-bit floor.
outcome c3_mse()
{
    constexpr double z_limit = 3.0;
    constexpr double floor_ratio = 0.9;
    constexpr double time_limit = 120.0;
    const auto t0 = clock_type::now();
    config_document doc; // N = 128, M = 256, K = 10
    const auto csv = cmd_mse_sweep(doc, run_options{}).str();
    std::vector<std::string> labels;
    const auto rows = numeric_rows(csv, labels);
    // Columns: P-dB, q, hop, mse_sim, mse_sim_stderr, mse_closed. Rows: q, power, hop.
    double worst = 0.0;
    for (const auto &r : rows)
        worst = std::max(worst, detail::z_score(r[3], r[5], r[4]));
    double min_ratio = 1e300;
    for (std::size_t hop = 0; hop < 2; ++hop)
        min_ratio = std::min(min_ratio, rows[8 + hop][5] / rows[6 + hop][5]);
    const double secs = seconds_since(t0);
    const bool ok = rows.size() == 40 && worst <= z_limit && min_ratio >= floor_ratio && secs < time_limit;
    return {ok, fmt("max |z| = %.2f (limit %.0f), q=1 MSE(40 dB)/MSE(30 dB) = %.3f (min %.1f)", worst, z_limit,
                    min_ratio, floor_ratio) +
                    fmt(", %.1f s (limit %.0f s)", secs, time_limit)};
}

// Ergodic sum rate: closed form vs Monte Carlo, and the four SINR terms.
outcome c4_rate()
{
    constexpr double gap_limit = 0.05;
    constexpr double z_limit = 5.0;
    constexpr int trials = 500;
    constexpr double time_limit = 600.0;
    const auto t0 = clock_type::now();
    double worst_gap = 0.0, worst_z = 0.0;
    std::uint64_t index = 0;
    for (int q : {1, 2, 0})
        for (int N : {64, 128, 256})
        {
            scenario_config c;
            c.N = N;
            c.q1 = c.q2 = q ? adc_spec::with_bits(q) : adc_spec::ideal();
            const auto s = system_model::from(c);
            const auto [F, G] = estimate_models(s);
            const auto closed = sum_rate_approx(s, F, G);
            mc_options o;
            o.trials = trials;
            o.seed = substream_seed(1, index++, stream_tag::grid_point);
            const auto mc = ergodic_sum_rate_mc(s, F, G, o);
            worst_gap = std::max(worst_gap, std::abs(mc.report.sum_rate - closed.sum_rate) / closed.sum_rate);
            for (Eigen::Index k = 0; k < s.K; ++k)
                worst_z = std::max({worst_z, detail::z_score(mc.report.S(k), closed.S(k), mc.se.S(k)),
                                    detail::z_score(mc.report.I(k), closed.I(k), mc.se.I(k)),
                                    detail::z_score(mc.report.N1(k), closed.N1(k), mc.se.N1(k)),
                                    detail::z_score(mc.report.N2(k), closed.N2(k), mc.se.N2(k))});
        }
    const double secs = seconds_since(t0);
    return {worst_gap <= gap_limit && worst_z <= z_limit && secs < time_limit,
            fmt("max rate gap = %.4f (limit %.2f), max term |z| = %.2f (limit %.0f)", worst_gap, gap_limit, worst_z,
                z_limit) +
                fmt(", %.1f s (limit %.0f s)", secs, time_limit)};
}

// Power scaling: a = b = 1 approaches the limit, a = 1.2 drives the rate down.
outcome c5_power_scaling()
{
    constexpr double gamma_tol = 0.15;
    constexpr double decay_ratio = 0.5;
    auto c = equal_beta(1024, 2.0);
    c.a = c.b = 1.0;
    const double gamma = sum_rate_approx(system_model::from(c)).sinr()(0);
    const double limit = power_scaling_limit(c, 0).value;
    const double gamma_dev = std::abs(gamma - limit) / limit;

    auto d = equal_beta(128, 2.0);
    d.a = 1.2;
    d.b = 1.0;
    const double r128 = closed_rate(d);
    d.N = 1024;
    const double r1024 = closed_rate(d);
    const double ratio = r1024 / r128;
    return {gamma_dev <= gamma_tol && ratio < decay_ratio,
            fmt("a=b=1 N=1024 gamma1 %.3f vs limit %.3f, dev %.3f (tol %.2f)", gamma, limit, gamma_dev, gamma_tol) +
                fmt("; a=1.2 R(1024)/R(128) = %.3f (limit < %.1f)", ratio, decay_ratio)};
}

// Correlation placement: orderings around delta = 1 and the N = 200 magnitudes.
outcome c6_correlation()
{
    constexpr double magnitude_tol = 0.15;
    auto swap = [](double delta, double r_R, double r_B) {
        auto c = equal_beta(256, delta);
        c.r_R = r_R;
        c.r_B = r_B;
        return closed_rate(c);
    };
    const bool order = swap(0.5, 0.0, 0.8) < swap(0.5, 0.8, 0.0) && swap(2.0, 0.0, 0.8) > swap(2.0, 0.8, 0.0);

    auto table = [](double delta, double r_R, double r_B) {
        scenario_config c;
        c.N = 200;
        c.delta = delta;
        c.r_R = r_R;
        c.r_B = r_B;
        return closed_rate(c);
    };
    const double hi = table(2.0, 0.0, 0.8), lo = table(2.0, 0.8, 0.0);
    const double dev = std::max(std::abs(hi - 9.8) / 9.8, std::abs(lo - 8.4) / 8.4);
    const bool fig_order = table(0.5, 0.0, 0.8) < table(0.5, 0.8, 0.0) && hi > lo;
    return {order && fig_order && dev <= magnitude_tol,
            std::string("orderings ") + (order && fig_order ? "hold" : "violated") +
                fmt("; delta=2 N=200 rates %.3f / %.3f vs 9.8 / 8.4, max rel dev %.3f (tol %.2f)", hi, lo, dev,
                    magnitude_tol)};
}

// ADC placement: the higher resolution belongs on the smaller array.
outcome c7_adc()
{
    auto swap = [](double delta, bool ideal_first) {
        auto c = equal_beta(256, delta);
        c.q1 = ideal_first ? adc_spec::ideal() : adc_spec::with_bits(2);
        c.q2 = ideal_first ? adc_spec::with_bits(2) : adc_spec::ideal();
        return closed_rate(c);
    };
    auto table = [](double delta, int q1, int q2) {
        scenario_config c;
        c.N = 200;
        c.delta = delta;
        c.q1 = adc_spec::with_bits(q1);
        c.q2 = adc_spec::with_bits(q2);
        return closed_rate(c);
    };
    const double a05 = swap(0.5, true), b05 = swap(0.5, false), a2 = swap(2.0, true), b2 = swap(2.0, false);
    const double t05 = table(0.5, 3, 1), u05 = table(0.5, 1, 3), t2 = table(2.0, 3, 1), u2 = table(2.0, 1, 3);
    const bool ok = a05 < b05 && a2 > b2 && t05 < u05 && t2 > u2;
    return {ok, fmt("equal-beta: delta=0.5 %.4f < %.4f, delta=2 %.4f > %.4f", a05, b05, a2, b2) +
                    fmt("; N=200: delta=0.5 %.3f < %.3f, delta=2 %.3f > %.3f", t05, u05, t2, u2)};
}

// Growth orders of the desired signal and interference terms.
outcome c8_slopes()
{
    constexpr double tol = 0.2;
    std::vector<double> x, yS, yI;
    for (int N : {64, 128, 256, 512})
    {
        scenario_config c;
        c.N = N;
        const auto s = system_model::from(c);
        const auto [F, G] = estimate_models(s);
        const auto t = moment_terms_closed(s, F, G);
        x.push_back(std::log(static_cast<double>(N)));
        yS.push_back(std::log(t.desired(0)));
        yI.push_back(std::log(t.leakage(0) + t.inter(0)));
    }
    const double sS = slope(x, yS), sI = slope(x, yI);
    return {std::abs(sS - 4.0) <= tol && std::abs(sI - 3.0) <= tol,
            fmt("S slope %.3f (4 +/- %.1f), I slope %.3f (3 +/- %.1f)", sS, tol, sI, tol)};
}

std::string read_file(const std::filesystem::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Byte-identical CSV output across reruns and thread counts, for every command.
outcome c9_determinism()
{
    const std::vector<std::string> commands = {
        "mse-sweep --trials 30 --values 0,20 --set N=32",
        "rate-vs-n --trials 30 --values 32,48",
        "power-scaling --trials 20 --values 64,128",
        "correlation-impact --trials 20 --values 40",
        "adc-impact --trials 20 --values 40",
        "validate --trials 200",
    };
    const auto dir = std::filesystem::temp_directory_path() / "mrelay_acceptance";
    std::filesystem::create_directories(dir);
    std::string failures;
    int index = 0;
    for (const auto &cmd : commands)
    {
        std::vector<std::string> outputs;
        for (const char *threads : {"1", "1", "4"})
        {
            const auto path = dir / ("out" + std::to_string(index++) + ".csv");
            const std::string line = std::string(MRELAY_CLI_PATH) + " " + cmd + " --threads " + threads + " --out " +
                                     path.string() + " 2>/dev/null";
            const int status = std::system(line.c_str());
            const int code = WEXITSTATUS(status);
            if (code != 0)
                failures += " [" + cmd + " exit " + std::to_string(code) + "]";
            outputs.push_back(read_file(path));
        }
        if (outputs[0].empty() || outputs[0] != outputs[1] || outputs[0] != outputs[2])
            failures += " [" + cmd.substr(0, cmd.find(' ')) + " differs]";
    }
    std::filesystem::remove_all(dir);
    return {failures.empty(), failures.empty() ? std::to_string(commands.size()) +
                                                     " commands identical across 2 runs and 1 vs 4 threads"
                                               : "mismatch:" + failures};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<outcome()>>> criteria = {
        {"C1 lloyd-max distortion", c1_lloyd_max},
        {"C2 gaussian product moments", c2_lemma1},
        {"C3 estimation mse", c3_mse},
        {"C4 ergodic rate approximation", c4_rate},
        {"C5 power scaling limits", c5_power_scaling},
        {"C6 correlation placement", c6_correlation},
        {"C7 adc placement", c7_adc},
        {"C8 growth orders", c8_slopes},
        {"C9 deterministic output", c9_determinism},
    };
    int failed = 0;
    for (const auto &[name, run] : criteria)
    {
        outcome o;
        try
        {
            o = run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.passed ? 0 : 1;
        std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
