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


#ifndef MRELAY_VALIDATION_HPP
#define MRELAY_VALIDATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "estimation.hpp"
#include "link.hpp"
#include "quantizer.hpp"
#include "rng.hpp"
#include "scenario.hpp"

namespace mrelay
{

// One named oracle comparison. Passes when measured <= tolerance.
struct check_result
{
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string unit; // "abs", "rel" or "z"
    bool passed = false;
};

struct validation_options
{
    std::uint64_t seed = 1;
    int trials = 1000; // Monte Carlo rate trials for the moment checks
    unsigned threads = 0;
    std::string filter;          // substring of the check name; empty runs everything
    bool corrupt_table1 = false; // negative control: perturbs the reference distortion table
};

struct validation_report
{
    std::vector<check_result> checks;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const check_result &c) { return c.passed; });
    }
};

namespace detail
{

inline check_result make_check(std::string name, double measured, double tolerance, std::string unit)
{
    return {std::move(name), measured, tolerance, std::move(unit), measured <= tolerance};
}

inline double rel_dev(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double z_score(double mc, double closed, double se)
{
    if (se <= 0.0)
        return mc == closed ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(mc - closed) / se;
}

// Small imperfect-CSI scenario used by the Monte Carlo oracles.
inline scenario_config validation_scenario()
{
    scenario_config c;
    c.N = 48;
    c.K = 6;
    c.delta = 1.5;
    return c;
}

inline cmat random_square(Eigen::Index n, rng &gen) { return gen.complex_gaussian(n, n); }

inline void lemma1_checks(const validation_options &opt, std::vector<check_result> &out)
{
    constexpr int pairs = 6;
    constexpr std::int64_t draws = 100000;
    constexpr double z_limit = 5.0;
    for (int p = 0; p < pairs; ++p)
    {
        rng gen(substream_seed(opt.seed, static_cast<std::uint64_t>(p), stream_tag::lemma1));
        const Eigen::Index m = 2 + p % 3;
        const Eigen::Index n = 2 + (p + 1) % 4;
        const cmat P = random_square(m, gen);
        const cmat Q = random_square(n, gen);
        const Eigen::Index i = p % n;
        const Eigen::Index j = (p + 1) % n;
        const auto exact = lemma1_moments(P, Q, i, j);
        const auto est = lemma1_moments_mc(P, Q, i, j, draws, gen);
        double z = std::max(z_score(est.mean.m1.real(), exact.m1.real(), est.m1_se.real()),
                            z_score(est.mean.m1.imag(), exact.m1.imag(), est.m1_se.imag()));
        z = std::max(z, z_score(est.mean.m2, exact.m2, est.m2_se));
        for (Eigen::Index r = 0; r < m; ++r)
        {
            z = std::max(z, z_score(est.mean.row_m1(r).real(), exact.row_m1(r).real(), est.row_m1_se(r).real()));
            z = std::max(z, z_score(est.mean.row_m1(r).imag(), exact.row_m1(r).imag(), est.row_m1_se(r).imag()));
            z = std::max(z, z_score(est.mean.row_m2(r), exact.row_m2(r), est.row_m2_se(r)));
        }
        out.push_back(make_check("lemma1/pair" + std::to_string(p), z, z_limit, "z"));
    }
}

inline void lloyd_max_checks(const validation_options &opt, std::vector<check_result> &out)
{
    std::array<double, 5> reference = distortion_table;
    if (opt.corrupt_table1)
        reference[1] *= 1.05;
    for (int q = 1; q <= 5; ++q)
        out.push_back(make_check("lloyd_max/q" + std::to_string(q),
                                 std::abs(lloyd_max_distortion(q) - reference[static_cast<std::size_t>(q - 1)]), 1e-3,
                                 "abs"));
}

inline void moment_checks(const validation_options &opt, std::vector<check_result> &out)
{
    constexpr double z_limit = 5.0;
    const auto s = system_model::from(validation_scenario());
    const auto [F, G] = estimate_models(s);
    const auto closed = moment_terms_closed(s, F, G);
    mc_options o;
    o.trials = opt.trials;
    o.seed = opt.seed;
    o.threads = opt.threads;
    const auto mc = ergodic_sum_rate_mc(s, F, G, o);

    const std::array<std::pair<const char *, const rvec moment_terms::*>, 7> terms{{
        {"desired", &moment_terms::desired},
        {"leakage", &moment_terms::leakage},
        {"inter", &moment_terms::inter},
        {"rs_gain", &moment_terms::rs_gain},
        {"rs_quant", &moment_terms::rs_quant},
        {"bs_gain", &moment_terms::bs_gain},
        {"bs_quant", &moment_terms::bs_quant},
    }};
    for (const auto &[name, field] : terms)
    {
        double z = 0.0;
        for (Eigen::Index k = 0; k < s.K; ++k)
            z = std::max(z, z_score((mc.mean.*field)(k), (closed.*field)(k), (mc.std_error.*field)(k)));
        out.push_back(make_check(std::string("moments/") + name, z, z_limit, "z"));
    }
    out.push_back(make_check("bookkeeping/residual", mc.max_bookkeeping_residual, 1e-8, "abs"));

    const double kappa = amplification_factor_closed(s, F);
    const auto est = amplification_factor_mc(s, F, 4000, substream_seed(opt.seed, 0, stream_tag::kappa), opt.threads);
    const auto traces = kappa_traces_closed(F);
    double z = std::max({z_score(est.mean.signal, traces.signal, est.se.signal),
                         z_score(est.mean.diag, traces.diag, est.se.diag),
                         z_score(est.mean.noise, traces.noise, est.se.noise)});
    out.push_back(make_check("kappa/traces", z, z_limit, "z"));
    out.push_back(make_check("kappa/value", rel_dev(est.kappa, kappa), 0.02, "rel"));
}

inline void mse_checks(const validation_options &opt, std::vector<check_result> &out)
{
    constexpr int draws = 1000;
    constexpr double z_limit = 5.0;
    std::uint64_t index = 0;
    for (int q : {1, 3, 0})
        for (double p_db : {0.0, 30.0})
        {
            scenario_config c = validation_scenario();
            c.q1 = c.q2 = q ? adc_spec::with_bits(q) : adc_spec::ideal();
            c.P1 = c.P2 = db_to_linear(p_db);
            const auto s = system_model::from(c);
            for (int hop : {1, 2})
            {
                const double closed = hop == 1 ? mse_F_per_element(s) : mse_G_per_element(s);
                const double elems = static_cast<double>(hop == 1 ? s.N : s.M) * s.K;
                double sum = 0.0, sq = 0.0;
                rng gen(substream_seed(opt.seed, index++, hop == 1 ? stream_tag::pilot_noise_F : stream_tag::pilot_noise_G));
                const pilot_estimator_F est_F(s);
                const pilot_estimator_G est_G(s);
                for (int d = 0; d < draws; ++d)
                {
                    const auto o = hop == 1 ? est_F.simulate(gen) : est_G.simulate(gen);
                    const double e = (o.estimate - o.truth).squaredNorm() / elems;
                    sum += e;
                    sq += e * e;
                }
                const double mean = sum / draws;
                const double se = std::sqrt(std::max(sq / draws - mean * mean, 0.0) / (draws - 1.0));
                const std::string label = (q ? std::to_string(q) : std::string("ideal")) + "/" +
                                          std::to_string(static_cast<int>(p_db)) + "dB";
                out.push_back(make_check(std::string("mse/") + (hop == 1 ? "F" : "G") + "/q" + label,
                                         z_score(mean, closed, se), z_limit, "z"));
            }
        }
}

inline void energy_split_checks(const validation_options &, std::vector<check_result> &out)
{
    for (int N : {32, 128})
    {
        scenario_config c;
        c.N = N;
        const auto s = system_model::from(c);
        const auto [F, G] = estimate_models(s);
        double dev_F = 0.0, dev_G = 0.0;
        for (Eigen::Index k = 0; k < s.K; ++k)
        {
            const double bk = s.fading.betas(k);
            dev_F = std::max(dev_F, rel_dev(F.transmit_hat_entry(k, k) * F.receive.trace_hat() +
                                                F.transmit_err_diag(k) * F.receive.trace_err(),
                                            s.N * bk));
            dev_G = std::max(dev_G, rel_dev(G.transmit_hat_entry(k, k) * G.receive.trace_hat() +
                                                G.transmit_err_diag(k) * G.receive.trace_err(),
                                            static_cast<double>(s.M)));
        }
        const double psd = std::max(hermitian_spectrum(F.transmit_hat).min_value() < -1e-10 ? 1.0 : 0.0,
                                    F.receive.hat_eigenvalues().minCoeff() < 0.0 ? 1.0 : 0.0);
        out.push_back(make_check("energy_split/F/N" + std::to_string(N), dev_F, 1e-10, "rel"));
        out.push_back(make_check("energy_split/G/N" + std::to_string(N), dev_G, 1e-10, "rel"));
        out.push_back(make_check("energy_split/psd/N" + std::to_string(N), psd, 0.0, "abs"));
    }
}

inline void closed_form_route_checks(const validation_options &, std::vector<check_result> &out)
{
    double dev_prop = 0.0, dev_printed = 0.0;
    for (int N : {64, 256})
        for (int q : {1, 2, 0})
        {
            scenario_config c;
            c.N = N;
            c.q1 = c.q2 = q ? adc_spec::with_bits(q) : adc_spec::ideal();
            const auto s = system_model::from(c);
            const auto [F, G] = estimate_models(s);
            const auto r = sum_rate_approx(s, F, G);
            const auto t = theorem1_terms(s, F, G, r.kappa);
            for (Eigen::Index k = 0; k < s.K; ++k)
                dev_printed = std::max({dev_printed, rel_dev(t.S(k), r.S(k)), rel_dev(t.I(k), r.I(k)),
                                        rel_dev(t.N1(k), r.N1(k)), rel_dev(t.N2(k), r.N2(k))});

            c.perfect_csi = true;
            const auto sp = system_model::from(c);
            dev_prop = std::max(dev_prop, rel_dev(sum_rate_perfect_csi(sp).sum_rate, sum_rate_approx(sp).sum_rate));
        }
    out.push_back(make_check("theorem1/printed_grouping", dev_printed, 1e-10, "rel"));
    out.push_back(make_check("prop1/perfect_csi", dev_prop, 1e-10, "rel"));
}

// A group runs when the filter is a substring of one of its check prefixes or starts with one.
inline bool group_selected(const std::string &prefixes, const std::string &filter)
{
    if (filter.empty())
        return true;
    std::size_t start = 0;
    while (start < prefixes.size())
    {
        const std::size_t end = std::min(prefixes.find(' ', start), prefixes.size());
        const std::string prefix = prefixes.substr(start, end - start);
        if (prefix.find(filter) != std::string::npos || filter.rfind(prefix, 0) == 0)
            return true;
        start = end + 1;
    }
    return false;
}

} // namespace detail

// Runs every check whose name contains opt.filter.
inline validation_report run_validation(const validation_options &opt)
{
    using group = std::pair<const char *, std::function<void(const validation_options &, std::vector<check_result> &)>>;
    const std::array<group, 6> groups{{
        {"lemma1", detail::lemma1_checks},
        {"lloyd_max", detail::lloyd_max_checks},
        {"moments bookkeeping kappa", detail::moment_checks},
        {"mse", detail::mse_checks},
        {"energy_split", detail::energy_split_checks},
        {"theorem1 prop1", detail::closed_form_route_checks},
    }};
    validation_report report;
    for (const auto &[names, run] : groups)
    {
        if (!detail::group_selected(names, opt.filter))
            continue;
        std::vector<check_result> found;
        run(opt, found);
        for (auto &c : found)
            if (opt.filter.empty() || c.name.find(opt.filter) != std::string::npos)
                report.checks.push_back(std::move(c));
    }
    return report;
}

} // namespace mrelay

#endif
