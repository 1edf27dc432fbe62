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


#ifndef MRELAY_LINK_HPP
#define MRELAY_LINK_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

#include "analysis.hpp"
#include "error.hpp"
#include "estimation.hpp"
#include "linalg.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "scenario.hpp"

namespace mrelay
{

// Square roots of the equivalent-form covariances, computed once per scenario.
class channel_sampler
{
public:
    channel_sampler(const estimate_model &F, const estimate_model &G)
        : K_(F.users()), N_(F.rows()), M_(G.rows()), sqrt_eta_(std::sqrt(G.eta))
    {
        hat_Rr_ = F.receive.hat_sqrt();
        err_Rr_ = F.receive.err_sqrt();
        hat_Br_ = G.receive.hat_sqrt();
        err_Br_ = G.receive.err_sqrt();
        beta_hat_.resize(K_);
        beta_err_.resize(K_);
        for (Eigen::Index i = 0; i < K_; ++i)
        {
            const double bh = F.transmit_hat_entry(i, i);
            const double be = F.transmit_err_diag(i);
            if (bh < 0.0 || be < 0.0)
                throw numerical_error("channel_sampler: negative large-scale term in the equivalent form of F");
            beta_hat_(i) = std::sqrt(bh);
            beta_err_(i) = std::sqrt(be);
        }
        hat_Rt_ = hermitian_spectrum(G.transmit_hat).sqrt("transmit correlation estimate");
        const hermitian_spectrum err_Rt(G.transmit_err);
        if (err_Rt.is_psd())
            err_Rt_ = err_Rt.sqrt("transmit correlation error");
        else
        {
            // Only the diagonal of the error-side transmit matrix enters the closed forms.
            fallback_ = true;
            rvec d(K_);
            for (Eigen::Index i = 0; i < K_; ++i)
            {
                const double v = G.transmit_err_diag(i);
                if (v < 0.0)
                    throw numerical_error("channel_sampler: negative diagonal in the error-side transmit correlation");
                d(i) = std::sqrt(v);
            }
            err_Rt_ = d.cast<cplx>().asDiagonal();
        }
    }

    cmat F_hat(rng &gen) const { return hat_Rr_ * gen.complex_gaussian(N_, K_) * beta_hat_.cast<cplx>().asDiagonal(); }
    cmat F_err(rng &gen) const { return err_Rr_ * gen.complex_gaussian(N_, K_) * beta_err_.cast<cplx>().asDiagonal(); }
    cmat G_hat(rng &gen) const { return sqrt_eta_ * hat_Br_ * gen.complex_gaussian(M_, K_) * hat_Rt_; }
    cmat G_err(rng &gen) const { return sqrt_eta_ * err_Br_ * gen.complex_gaussian(M_, K_) * err_Rt_; }

    // True when the error-side transmit matrix was indefinite and its diagonal was used instead.
    bool transmit_fallback() const { return fallback_; }

private:
    Eigen::Index K_;
    Eigen::Index N_;
    Eigen::Index M_;
    double sqrt_eta_;
    cmat hat_Rr_, err_Rr_, hat_Br_, err_Br_, hat_Rt_, err_Rt_;
    rvec beta_hat_, beta_err_;
    bool fallback_ = false;
};

// Realized SINR decomposition of one channel draw. `raw` holds the building blocks of
// moment_terms for this realization, noise terms conditioned on the channels.
struct trial_outcome
{
    moment_terms raw;
    rvec desired;
    rvec interference;
    rvec rs_noise;
    rvec bs_noise;
    rvec sinr;
    double bookkeeping_residual = 0.0; // max_k |total_kk - desired amplitude - B_1|
};

struct trial_options
{
    bool sampled_noise = false; // draw AWGN and quantization noise instead of using conditional means
};

struct trial_streams
{
    std::uint64_t seed = 1;
    std::uint64_t trial = 0;

    rng stream(stream_tag tag) const { return rng(substream_seed(seed, trial, tag)); }
};

inline trial_outcome run_trial(const system_model &s, const channel_sampler &sampler, double kappa,
                               const trial_streams &streams, const trial_options &opt = {})
{
    const Eigen::Index K = s.K;
    trial_outcome out;
    out.raw = moment_terms::zeros(K);
    if (K == 0)
    {
        out.desired = out.interference = out.rs_noise = out.bs_noise = out.sinr = rvec(0);
        return out;
    }

    rng gF = streams.stream(stream_tag::estimate_F);
    rng eF = streams.stream(stream_tag::error_F);
    rng gG = streams.stream(stream_tag::estimate_G);
    rng eG = streams.stream(stream_tag::error_G);
    const cmat Fh = sampler.F_hat(gF);
    const cmat Fe = sampler.F_err(eF);
    const cmat Gh = sampler.G_hat(gG);
    const cmat Ge = sampler.G_err(eG);
    const cmat F = Fh + Fe;
    const cmat G = Gh + Ge;

    const cmat GhGh = Gh.adjoint() * Gh;
    const cmat GhGe = Gh.adjoint() * Ge;
    const cmat GhG = GhGh + GhGe;
    const cmat FhFh = Fh.adjoint() * Fh;
    const cmat FhFe = Fh.adjoint() * Fe;
    const cmat total = GhG * (FhFh + FhFe);  // (g_k^H G F_hat^H f_j)
    const cmat V = GhG * Fh.adjoint();        // rows g_k^H G F_hat^H
    const rvec rowF = F.rowwise().squaredNorm();
    const rvec rowG = G.rowwise().squaredNorm();

    const double a1 = s.adc1.alpha;
    const double a2 = s.adc2.alpha;
    const double k2 = kappa * kappa;
    const double chi = a1 * a1 * a2 * a2 * k2 * s.P_U;

    rng noise = streams.stream(stream_tag::data_noise);
    out.desired.resize(K);
    out.interference.resize(K);
    out.rs_noise.resize(K);
    out.bs_noise.resize(K);
    out.sinr.resize(K);

    for (Eigen::Index k = 0; k < K; ++k)
    {
        cplx amp = 0.0, b1 = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
        {
            amp += GhGh(k, i) * FhFh(i, k);
            b1 += GhGh(k, i) * FhFe(i, k) + GhGe(k, i) * FhFh(i, k) + GhGe(k, i) * FhFe(i, k);
        }
        out.bookkeeping_residual = std::max(out.bookkeeping_residual, std::abs(total(k, k) - amp - b1));

        double inter = 0.0;
        for (Eigen::Index j = 0; j < K; ++j)
            if (j != k)
                inter += std::norm(total(k, j));

        const double rs_gain = V.row(k).squaredNorm();
        const double rs_row = (V.row(k).cwiseAbs2().transpose().array() * rowF.array()).sum();
        const double bs_gain = Gh.col(k).squaredNorm();
        const double bs_row = (Gh.col(k).cwiseAbs2().array() * rowG.array()).sum();

        moment_terms &r = out.raw;
        r.desired(k) = std::norm(amp);
        r.leakage(k) = std::norm(b1);
        r.inter(k) = inter;
        r.rs_gain(k) = rs_gain;
        r.rs_quant(k) = a1 * (1.0 - a1) * (s.P_U * rs_row + s.sigma_R2 * rs_gain);
        r.bs_gain(k) = bs_gain;
        r.bs_quant(k) = a2 * (1.0 - a2) * (s.P_R / K * bs_row + s.sigma_B2 * bs_gain);

        out.desired(k) = chi * r.desired(k);
        out.interference(k) = chi * (r.leakage(k) + r.inter(k));
        if (opt.sampled_noise)
        {
            cplx rs = 0.0;
            for (Eigen::Index n = 0; n < V.cols(); ++n)
            {
                const double q1 = a1 * (1.0 - a1) * (s.P_U * rowF(n) + s.sigma_R2);
                rs += V(k, n) * (a1 * a2 * kappa * noise.complex_normal(s.sigma_R2) +
                                 a2 * kappa * noise.complex_normal(q1));
            }
            cplx bs = 0.0;
            for (Eigen::Index m = 0; m < Gh.rows(); ++m)
            {
                const double q2 = a2 * (1.0 - a2) * (s.P_R / K * rowG(m) + s.sigma_B2);
                bs += std::conj(Gh(m, k)) * (a2 * noise.complex_normal(s.sigma_B2) + noise.complex_normal(q2));
            }
            out.rs_noise(k) = std::norm(rs);
            out.bs_noise(k) = std::norm(bs);
        }
        else
        {
            out.rs_noise(k) = a1 * a1 * a2 * a2 * k2 * s.sigma_R2 * rs_gain + a2 * a2 * k2 * r.rs_quant(k);
            out.bs_noise(k) = a2 * a2 * s.sigma_B2 * bs_gain + r.bs_quant(k);
        }
        out.sinr(k) = out.desired(k) / (out.interference(k) + out.rs_noise(k) + out.bs_noise(k));
    }
    return out;
}

// ----- Amplification factor by simulation -------------------------------------------------

struct kappa_estimate
{
    double kappa = 0.0;
    kappa_traces mean;
    kappa_traces se;
};

// Averages the three traces in the denominator of kappa over draws of (F_hat, F_err).
inline kappa_estimate amplification_factor_mc(const system_model &s, const estimate_model &F, std::int64_t est_trials,
                                              std::uint64_t seed, unsigned threads = 0)
{
    if (est_trials < 100)
        throw config_error("amplification_factor_mc: need at least 100 draws");
    const Eigen::Index K = F.users();
    const cmat hat = F.receive.hat_sqrt();
    const cmat err = F.receive.err_sqrt();
    rvec bh(K), be(K);
    for (Eigen::Index i = 0; i < K; ++i)
    {
        bh(i) = std::sqrt(std::max(F.transmit_hat_entry(i, i), 0.0));
        be(i) = std::sqrt(std::max(F.transmit_err_diag(i), 0.0));
    }

    std::vector<std::array<double, 3>> draws(static_cast<std::size_t>(est_trials));
    parallel_for(
        draws.size(),
        [&](std::size_t d) {
            rng gen(substream_seed(seed, d, stream_tag::kappa));
            const cmat Fh = hat * gen.complex_gaussian(F.rows(), K) * bh.cast<cplx>().asDiagonal();
            const cmat Fe = err * gen.complex_gaussian(F.rows(), K) * be.cast<cplx>().asDiagonal();
            const cmat Ft = Fh + Fe;
            const rvec rowF = Ft.rowwise().squaredNorm();
            draws[d] = {(Ft.adjoint() * Fh).squaredNorm(), Fh.rowwise().squaredNorm().dot(rowF), Fh.squaredNorm()};
        },
        threads);

    std::array<double, 3> sum{}, sq{};
    for (const auto &v : draws)
        for (int c = 0; c < 3; ++c)
        {
            sum[c] += v[c];
            sq[c] += v[c] * v[c];
        }
    const double n = static_cast<double>(est_trials);
    std::array<double, 3> mean{}, se{};
    for (int c = 0; c < 3; ++c)
    {
        mean[c] = sum[c] / n;
        se[c] = std::sqrt(std::max(sq[c] / n - mean[c] * mean[c], 0.0) / (n - 1.0));
    }
    kappa_estimate e;
    e.mean = {mean[0], mean[1], mean[2]};
    e.se = {se[0], se[1], se[2]};
    e.kappa = kappa_from_traces(s, e.mean);
    return e;
}

// ----- Ergodic sum rate by simulation -----------------------------------------------------

struct mc_options
{
    int trials = 500;
    std::uint64_t seed = 1;
    unsigned threads = 0;
    bool sampled_noise = false;
};

struct mc_result
{
    rate_report report;    // S, I, N1, N2 are Monte Carlo means; rates average log2(1 + SINR)
    moment_terms mean;     // per-term sample means
    moment_terms std_error;  // per-term standard errors
    rate_report se;        // standard errors of S, I, N1, N2 (rate fields unused)
    bool transmit_fallback = false;
    double max_bookkeeping_residual = 0.0;
};

namespace detail
{

struct running_stats
{
    rvec sum;
    rvec sq;

    explicit running_stats(Eigen::Index K) : sum(rvec::Zero(K)), sq(rvec::Zero(K)) {}

    void add(const rvec &v)
    {
        sum += v;
        sq += v.cwiseAbs2();
    }

    rvec mean(double n) const { return sum / n; }

    rvec std_error(double n) const
    {
        rvec m = mean(n);
        rvec out(sum.size());
        for (Eigen::Index k = 0; k < sum.size(); ++k)
            out(k) = n > 1.0 ? std::sqrt(std::max(sq(k) / n - m(k) * m(k), 0.0) / (n - 1.0)) : 0.0;
        return out;
    }
};

} // namespace detail

// R_sum = mu * E{sum_k log2(1 + SINR_k)} over equivalent-form channel draws. kappa is the
// closed-form long-term value. Trials are reduced in index order, so the result does not
// depend on the number of worker threads.
inline mc_result ergodic_sum_rate_mc(const system_model &s, const estimate_model &F, const estimate_model &G,
                                     const mc_options &opt)
{
    if (opt.trials < 1)
        throw config_error("ergodic_sum_rate_mc: trials must be >= 1");
    const Eigen::Index K = s.K;
    mc_result res;
    if (K == 0)
    {
        res.report = empty_rate(s, provenance::monte_carlo);
        res.mean = res.std_error = moment_terms::zeros(0);
        res.se = res.report;
        return res;
    }

    const double kappa = amplification_factor_closed(s, F);
    const channel_sampler sampler(F, G);
    std::vector<trial_outcome> outcomes(static_cast<std::size_t>(opt.trials));
    parallel_for(
        outcomes.size(),
        [&](std::size_t t) {
            outcomes[t] = run_trial(s, sampler, kappa, {opt.seed, t}, {opt.sampled_noise});
        },
        opt.threads);

    using detail::running_stats;
    running_stats desired(K), leakage(K), inter(K), rs_gain(K), rs_quant(K), bs_gain(K), bs_quant(K);
    running_stats S(K), I(K), N1(K), N2(K), rate(K), total(1);
    for (const auto &o : outcomes)
    {
        desired.add(o.raw.desired);
        leakage.add(o.raw.leakage);
        inter.add(o.raw.inter);
        rs_gain.add(o.raw.rs_gain);
        rs_quant.add(o.raw.rs_quant);
        bs_gain.add(o.raw.bs_gain);
        bs_quant.add(o.raw.bs_quant);
        S.add(o.desired);
        I.add(o.interference);
        N1.add(o.rs_noise);
        N2.add(o.bs_noise);
        rvec r(K);
        for (Eigen::Index k = 0; k < K; ++k)
            r(k) = s.mu * std::log2(1.0 + o.sinr(k));
        rate.add(r);
        total.add(rvec::Constant(1, r.sum()));
        res.max_bookkeeping_residual = std::max(res.max_bookkeeping_residual, o.bookkeeping_residual);
    }

    const double n = static_cast<double>(opt.trials);
    res.mean = {desired.mean(n), leakage.mean(n), inter.mean(n), rs_gain.mean(n),
                rs_quant.mean(n), bs_gain.mean(n), bs_quant.mean(n)};
    res.std_error = {desired.std_error(n), leakage.std_error(n), inter.std_error(n), rs_gain.std_error(n),
                   rs_quant.std_error(n), bs_gain.std_error(n), bs_quant.std_error(n)};

    rate_report &r = res.report;
    const double a1 = s.adc1.alpha;
    const double a2 = s.adc2.alpha;
    r.mu = s.mu;
    r.kappa = kappa;
    r.chi = a1 * a1 * a2 * a2 * kappa * kappa * s.P_U;
    r.source = provenance::monte_carlo;
    r.S = S.mean(n);
    r.I = I.mean(n);
    r.N1 = N1.mean(n);
    r.N2 = N2.mean(n);
    r.rate = rate.mean(n);
    r.sum_rate = r.rate.sum();
    r.ci_halfwidth = 1.96 * total.std_error(n)(0);

    res.se = r;
    res.se.S = S.std_error(n);
    res.se.I = I.std_error(n);
    res.se.N1 = N1.std_error(n);
    res.se.N2 = N2.std_error(n);
    res.se.rate = rate.std_error(n);
    res.se.sum_rate = total.std_error(n)(0);
    res.transmit_fallback = sampler.transmit_fallback();
    return res;
}

inline mc_result ergodic_sum_rate_mc(const system_model &s, const mc_options &opt)
{
    if (s.K == 0)
        return ergodic_sum_rate_mc(s, estimate_model{}, estimate_model{}, opt);
    const auto [F, G] = estimate_models(s);
    return ergodic_sum_rate_mc(s, F, G, opt);
}

} // namespace mrelay

#endif
