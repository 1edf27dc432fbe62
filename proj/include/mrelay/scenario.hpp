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


#ifndef MRELAY_SCENARIO_HPP
#define MRELAY_SCENARIO_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "channel.hpp"
#include "correlation.hpp"
#include "error.hpp"
#include "quantizer.hpp"

namespace mrelay
{

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Every system parameter of one two-hop relay scenario. Defaults reproduce the reference
// parameter set (K = 10, delta = 2, E_U = P1 = 20 dB, E_R = P2 = 25 dB, sigma_B^2 = 1.5 dB,
// sigma_R^2 = 2.2 dB, 100 m reference distance, exponent 3.8, r_R = r_B = 0.8, a = b = 0).
// Powers and noise variances are linear.
struct scenario_config
{
    int N = 128;
    double delta = 2.0;
    int K = 10;

    double E_U = db_to_linear(20.0);
    double E_R = db_to_linear(25.0);
    double a = 0.0;
    double b = 0.0;
    double P1 = db_to_linear(20.0);
    double P2 = db_to_linear(25.0);
    double sigma_R2 = db_to_linear(2.2);
    double sigma_B2 = db_to_linear(1.5);

    int T = 100;
    int tau1 = 0; // 0: use K
    int tau2 = 0; // 0: use K

    adc_spec q1 = adc_spec::with_bits(2);
    adc_spec q2 = adc_spec::with_bits(2);

    cplx r_R = 0.8;
    cplx r_B = 0.8;

    double d_ref = 100.0;
    std::vector<double> d_UkR = {182, 209, 197, 214, 190, 188, 201, 215, 206, 216};
    double d_RB = 250.0;
    double nu = 3.8;

    // Explicit large-scale fading; when set, the geometry above is ignored.
    std::optional<std::vector<double>> betas;
    std::optional<double> eta;

    bool perfect_csi = false;

    int trials = 500;
    std::uint64_t seed = 1;
    unsigned threads = 0; // 0: MRELAY_THREADS or hardware concurrency

    int M() const { return static_cast<int>(std::lround(delta * N)); }
    int pilot_length_F() const { return tau1 > 0 ? tau1 : K; }
    int pilot_length_G() const { return tau2 > 0 ? tau2 : K; }
    double P_U() const { return E_U / std::pow(static_cast<double>(N), a); }
    double P_R() const { return E_R / std::pow(static_cast<double>(M()), b); }
    double mu() const
    {
        return static_cast<double>(T - pilot_length_F() - pilot_length_G()) / (2.0 * static_cast<double>(T));
    }

    large_scale_fading fading() const
    {
        if (betas)
        {
            if (static_cast<int>(betas->size()) < K)
                throw config_error("scenario: 'betas' needs at least K entries");
            rvec b(K);
            for (int k = 0; k < K; ++k)
                b(k) = (*betas)[static_cast<std::size_t>(k)];
            const double e = eta ? *eta : path_loss(d_ref, d_RB, nu);
            return {std::move(b), e};
        }
        if (static_cast<int>(d_UkR.size()) < K)
            throw config_error("scenario: 'd_UkR' needs at least K user distances");
        const std::vector<double> d(d_UkR.begin(), d_UkR.begin() + K);
        auto lsf = large_scale_fading::from_geometry(d_ref, d, d_RB, nu);
        if (eta)
            lsf = large_scale_fading(lsf.betas, *eta);
        return lsf;
    }

    void validate() const
    {
        if (N < 1)
            throw config_error("scenario: N must be >= 1");
        if (!(delta > 0.0))
            throw config_error("scenario: delta must be > 0");
        if (K < 0)
            throw config_error("scenario: K must be >= 0");
        if (M() < K)
            throw config_error("scenario: round(delta * N) = " + std::to_string(M()) + " is smaller than K");
        if (K > N)
            throw config_error("scenario: K must not exceed N");
        if (!(a >= 0.0) || !(b >= 0.0))
            throw config_error("scenario: invalid exponent, a and b must be >= 0");
        if (!(E_U >= 0.0) || !(E_R >= 0.0) || !(P1 >= 0.0) || !(P2 >= 0.0))
            throw config_error("scenario: powers must be >= 0");
        if (!(sigma_R2 >= 0.0) || !(sigma_B2 >= 0.0))
            throw config_error("scenario: noise variances must be >= 0");
        if (pilot_length_F() < K || pilot_length_G() < K)
            throw config_error("scenario: pilot lengths tau1, tau2 must be >= K");
        if (pilot_length_F() + pilot_length_G() >= T)
            throw config_error("scenario: tau1 + tau2 must be smaller than the coherence interval T");
        if (trials < 1)
            throw config_error("scenario: trials must be >= 1");
        if (!(std::abs(r_R) < 1.0) || !(std::abs(r_B) < 1.0))
            throw config_error("scenario: invalid correlation coefficient, |r| must be < 1");
        fading();
    }
};

// Resolved, immutable system: dimensions, powers and correlation matrices of one scenario.
struct system_model
{
    int N = 0;
    int M = 0;
    int K = 0;
    double P_U = 0.0;
    double P_R = 0.0;
    double P1 = 0.0;
    double P2 = 0.0;
    int tau1 = 0;
    int tau2 = 0;
    double sigma_R2 = 0.0;
    double sigma_B2 = 0.0;
    double mu = 0.0;
    adc_spec adc1;
    adc_spec adc2;
    bool perfect_csi = false;
    large_scale_fading fading;
    correlation_matrix T_Rr; // N x N
    correlation_matrix T_Rt; // K x K
    correlation_matrix T_Br; // M x M

    double sum_beta() const { return fading.betas.sum(); }
    double eta() const { return fading.eta; }

    static system_model from(const scenario_config &cfg)
    {
        cfg.validate();
        system_model s;
        s.N = cfg.N;
        s.M = cfg.M();
        s.K = cfg.K;
        s.P_U = cfg.P_U();
        s.P_R = cfg.P_R();
        s.P1 = cfg.P1;
        s.P2 = cfg.P2;
        s.tau1 = cfg.pilot_length_F();
        s.tau2 = cfg.pilot_length_G();
        s.sigma_R2 = cfg.sigma_R2;
        s.sigma_B2 = cfg.sigma_B2;
        s.mu = cfg.mu();
        s.adc1 = cfg.q1;
        s.adc2 = cfg.q2;
        s.perfect_csi = cfg.perfect_csi;
        s.fading = cfg.fading();
        s.T_Rr = build_exponential(cfg.r_R, cfg.N);
        s.T_Br = build_exponential(cfg.r_B, s.M);
        if (cfg.K > 0)
        {
            if (cfg.r_R.imag() == 0.0)
                s.T_Rt = select_transmit_correlation(cfg.r_R.real(), cfg.N, cfg.K);
            else
                s.T_Rt = select_transmit_correlation(cfg.r_R, cfg.N, cfg.K);
        }
        return s;
    }
};

} // namespace mrelay

#endif
