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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "mrelay/link.hpp"

using namespace mrelay;

namespace
{

scenario_config small_scenario()
{
    scenario_config c;
    c.N = 16;
    c.K = 4;
    c.delta = 1.5;
    return c;
}

} // namespace

TEST(KappaMonteCarlo, AgreesWithClosedForm)
{
    scenario_config c;
    c.N = 64;
    const auto s = system_model::from(c);
    const auto F = equivalent_form_F(s);
    const auto est = amplification_factor_mc(s, F, 10000, 3, 2);
    const double closed = amplification_factor_closed(s, F);
    EXPECT_LE(std::abs(est.kappa - closed) / closed, 0.02);
    const auto t = kappa_traces_closed(F);
    EXPECT_LE(std::abs(est.mean.signal - t.signal), 5.0 * est.se.signal);
    EXPECT_LE(std::abs(est.mean.diag - t.diag), 5.0 * est.se.diag);
    EXPECT_LE(std::abs(est.mean.noise - t.noise), 5.0 * est.se.noise);
}

TEST(KappaMonteCarlo, ScalarOracle)
{
    scenario_config c;
    c.N = 24;
    c.K = 1;
    c.betas = std::vector<double>{1.0};
    c.eta = 1.0;
    c.r_R = c.r_B = 0.0;
    c.q1 = c.q2 = adc_spec::ideal();
    c.perfect_csi = true;
    const auto s = system_model::from(c);
    const auto [F, G] = estimate_models(s);
    const auto est = amplification_factor_mc(s, F, 20000, 5, 1);
    const double N = s.N;
    EXPECT_LE(std::abs(est.mean.signal - (N * N + N)), 5.0 * est.se.signal);
    EXPECT_LE(std::abs(est.mean.diag - 2.0 * N), 5.0 * est.se.diag);
    EXPECT_LE(std::abs(est.mean.noise - N), 5.0 * est.se.noise);
    const double kappa = std::sqrt(s.P_R / (s.P_U * (N * N + N) + s.sigma_R2 * N));
    EXPECT_LE(std::abs(est.kappa - kappa) / kappa, 0.01);
}

TEST(KappaMonteCarlo, RejectsTooFewDraws)
{
    const auto s = system_model::from(small_scenario());
    EXPECT_THROW(amplification_factor_mc(s, equivalent_form_F(s), 99, 1), config_error);
}

TEST(RunTrial, NoiseFreeSingleUserHasUnboundedSinr)
{
    scenario_config c = small_scenario();
    c.K = 1;
    c.q1 = c.q2 = adc_spec::ideal();
    c.sigma_R2 = c.sigma_B2 = 0.0;
    c.perfect_csi = true;
    const auto s = system_model::from(c);
    const auto [F, G] = estimate_models(s);
    const channel_sampler sampler(F, G);
    const auto out = run_trial(s, sampler, amplification_factor_closed(s, F), {1, 0});
    EXPECT_GT(out.desired(0), 0.0);
    EXPECT_EQ(out.interference(0), 0.0);
    EXPECT_EQ(out.sinr(0), std::numeric_limits<double>::infinity());
}

TEST(RunTrial, PowersNonnegativeAndSinrIsRatio)
{
    const auto s = system_model::from(small_scenario());
    const auto [F, G] = estimate_models(s);
    const channel_sampler sampler(F, G);
    const double kappa = amplification_factor_closed(s, F);
    for (std::uint64_t t = 0; t < 20; ++t)
        for (bool sampled : {false, true})
        {
            const auto o = run_trial(s, sampler, kappa, {7, t}, {sampled});
            for (Eigen::Index k = 0; k < s.K; ++k)
            {
                EXPECT_GE(o.desired(k), 0.0);
                EXPECT_GE(o.interference(k), 0.0);
                EXPECT_GE(o.rs_noise(k), 0.0);
                EXPECT_GE(o.bs_noise(k), 0.0);
                EXPECT_EQ(o.sinr(k), o.desired(k) / (o.interference(k) + o.rs_noise(k) + o.bs_noise(k)));
            }
            EXPECT_LE(o.bookkeeping_residual, 1e-9);
        }
}

TEST(ErgodicRate, PerTermMomentsMatchClosedForm)
{
    const auto s = system_model::from(small_scenario());
    const auto [F, G] = estimate_models(s);
    mc_options o;
    o.trials = 10000;
    o.seed = 11;
    const auto mc = ergodic_sum_rate_mc(s, F, G, o);
    const auto closed = moment_terms_closed(s, F, G);
    const auto report = sum_rate_approx(s, F, G);
    for (Eigen::Index k = 0; k < s.K; ++k)
    {
        // Desired power over chi within 3 standard errors.
        EXPECT_LE(std::abs(mc.mean.desired(k) - report.S(k) / report.chi), 3.0 * mc.std_error.desired(k)) << k;
        EXPECT_LE(std::abs(mc.mean.leakage(k) - closed.leakage(k)), 5.0 * mc.std_error.leakage(k)) << k;
        EXPECT_LE(std::abs(mc.mean.inter(k) - closed.inter(k)), 5.0 * mc.std_error.inter(k)) << k;
        EXPECT_LE(std::abs(mc.mean.rs_gain(k) - closed.rs_gain(k)), 5.0 * mc.std_error.rs_gain(k)) << k;
        EXPECT_LE(std::abs(mc.mean.rs_quant(k) - closed.rs_quant(k)), 5.0 * mc.std_error.rs_quant(k)) << k;
        EXPECT_LE(std::abs(mc.mean.bs_gain(k) - closed.bs_gain(k)), 5.0 * mc.std_error.bs_gain(k)) << k;
        EXPECT_LE(std::abs(mc.mean.bs_quant(k) - closed.bs_quant(k)), 5.0 * mc.std_error.bs_quant(k)) << k;
        EXPECT_LE(std::abs(mc.report.S(k) - report.S(k)), 5.0 * mc.se.S(k));
        EXPECT_LE(std::abs(mc.report.I(k) - report.I(k)), 5.0 * mc.se.I(k));
        EXPECT_LE(std::abs(mc.report.N1(k) - report.N1(k)), 5.0 * mc.se.N1(k));
        EXPECT_LE(std::abs(mc.report.N2(k) - report.N2(k)), 5.0 * mc.se.N2(k));
    }
    EXPECT_EQ(mc.report.source, provenance::monte_carlo);
}

TEST(ErgodicRate, SampledNoiseAgreesWithConditionalMeans)
{
    const auto s = system_model::from(small_scenario());
    mc_options o;
    o.trials = 4000;
    const auto mean_mode = ergodic_sum_rate_mc(s, o);
    o.sampled_noise = true;
    const auto sampled = ergodic_sum_rate_mc(s, o);
    for (Eigen::Index k = 0; k < s.K; ++k)
    {
        const double se1 = std::hypot(mean_mode.se.N1(k), sampled.se.N1(k));
        const double se2 = std::hypot(mean_mode.se.N2(k), sampled.se.N2(k));
        EXPECT_LE(std::abs(mean_mode.report.N1(k) - sampled.report.N1(k)), 5.0 * se1);
        EXPECT_LE(std::abs(mean_mode.report.N2(k) - sampled.report.N2(k)), 5.0 * se2);
    }
}

TEST(ErgodicRate, GrowsWithAntennasAndResolution)
{
    double previous = 0.0;
    for (int N : {32, 64, 128})
    {
        scenario_config c;
        c.N = N;
        mc_options o;
        o.trials = 200;
        o.seed = 5;
        const double q2 = ergodic_sum_rate_mc(system_model::from(c), o).report.sum_rate;
        EXPECT_GT(q2, previous);
        previous = q2;
        c.q1 = c.q2 = adc_spec::with_bits(1);
        const double q1 = ergodic_sum_rate_mc(system_model::from(c), o).report.sum_rate;
        c.q1 = c.q2 = adc_spec::ideal();
        const double ideal = ergodic_sum_rate_mc(system_model::from(c), o).report.sum_rate;
        EXPECT_GT(ideal, q1);
    }
}

TEST(ErgodicRate, NoUsersNoRate)
{
    scenario_config c = small_scenario();
    c.K = 0;
    const auto r = ergodic_sum_rate_mc(system_model::from(c), mc_options{});
    EXPECT_EQ(r.report.sum_rate, 0.0);
}

TEST(ErgodicRate, RejectsZeroTrials)
{
    const auto s = system_model::from(small_scenario());
    mc_options o;
    o.trials = 0;
    EXPECT_THROW(ergodic_sum_rate_mc(s, o), config_error);
}

TEST(ErgodicRate, IndependentOfThreadCount)
{
    const auto s = system_model::from(small_scenario());
    mc_options o;
    o.trials = 300;
    o.seed = 9;
    o.threads = 1;
    const auto a = ergodic_sum_rate_mc(s, o);
    o.threads = 4;
    const auto b = ergodic_sum_rate_mc(s, o);
    EXPECT_EQ(a.report.sum_rate, b.report.sum_rate);
    EXPECT_EQ(a.report.ci_halfwidth, b.report.ci_halfwidth);
    EXPECT_EQ(a.report.S, b.report.S);
    EXPECT_EQ(a.mean.inter, b.mean.inter);
}

TEST(ChannelSampler, FallsBackToDiagonalForIndefiniteErrorCorrelation)
{
    scenario_config c;
    c.N = 32;
    const auto s = system_model::from(c);
    const auto [F, G] = estimate_models(s);
    EXPECT_LT(hermitian_spectrum(G.transmit_err).min_value(), 0.0);
    const channel_sampler sampler(F, G);
    EXPECT_TRUE(sampler.transmit_fallback());
}
