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


#ifndef MRELAY_ANALYSIS_HPP
#define MRELAY_ANALYSIS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "error.hpp"
#include "estimation.hpp"
#include "linalg.hpp"
#include "rng.hpp"
#include "scenario.hpp"

namespace mrelay
{

enum class provenance
{
    closed_form,
    monte_carlo
};

inline const char *to_string(provenance p) { return p == provenance::closed_form ? "closed_form" : "monte_carlo"; }

// Per-user signal, interference and noise powers and the resulting rates.
struct rate_report
{
    rvec S;
    rvec I;
    rvec N1;
    rvec N2;
    rvec rate; // mu * log2(1 + SINR_k), bits/s/Hz
    double sum_rate = 0.0;
    double mu = 0.0;
    double kappa = 0.0;
    double chi = 0.0;
    provenance source = provenance::closed_form;
    double ci_halfwidth = 0.0;

    Eigen::Index users() const { return S.size(); }

    rvec sinr() const
    {
        rvec g(S.size());
        for (Eigen::Index k = 0; k < S.size(); ++k)
            g(k) = S(k) / (I(k) + N1(k) + N2(k));
        return g;
    }

    // Fills rate and sum_rate from S, I, N1, N2 and mu.
    void finalize()
    {
        const rvec g = sinr();
        rate.resize(g.size());
        for (Eigen::Index k = 0; k < g.size(); ++k)
            rate(k) = mu * std::log2(1.0 + g(k));
        sum_rate = rate.sum();
    }
};

// ----- Moments of Y = P X Q with i.i.d. CN(0,1) X --------------------------------

struct lemma1_result
{
    cplx m1;      // E{y_i^H y_j}
    double m2;    // E{|y_i^H y_j|^2}
    cvec row_m1;  // E{conj(y_mi) y_mj}, one entry per row m
    rvec row_m2;  // E{|y_mi|^2 |y_mj|^2}
};

struct lemma1_estimate
{
    lemma1_result mean;
    cplx m1_se;     // standard errors of the real and imaginary parts
    double m2_se;
    cvec row_m1_se;
    rvec row_m2_se;
};

// Row moments use the diagonal of P P^H; this coincides with P^H P for Hermitian P.
inline lemma1_result lemma1_moments(const cmat &P, const cmat &Q, Eigen::Index i, Eigen::Index j)
{
    if (P.rows() != P.cols() || Q.rows() != Q.cols())
        throw config_error("lemma1_moments: P and Q must be square");
    if (i < 0 || j < 0 || i >= Q.cols() || j >= Q.cols())
        throw config_error("lemma1_moments: column index out of range");

    const cmat zeta = P.adjoint() * P;
    const cmat rho = Q.adjoint() * Q;
    const rvec row_energy = P.rowwise().squaredNorm();
    const double tr = trace_real(zeta);

    lemma1_result r;
    r.m1 = rho(i, j) * tr;
    r.m2 = std::norm(rho(i, j)) * tr * tr + rho(i, i).real() * rho(j, j).real() * frobenius_sq(zeta);
    r.row_m1 = rho(i, j) * row_energy.cast<cplx>();
    r.row_m2 = row_energy.cwiseAbs2() * (std::norm(rho(i, j)) + rho(i, i).real() * rho(j, j).real());
    return r;
}

inline lemma1_estimate lemma1_moments_mc(const cmat &P, const cmat &Q, Eigen::Index i, Eigen::Index j,
                                         std::int64_t draws, rng &gen)
{
    if (P.rows() != P.cols() || Q.rows() != Q.cols())
        throw config_error("lemma1_moments_mc: P and Q must be square");
    if (i < 0 || j < 0 || i >= Q.cols() || j >= Q.cols())
        throw config_error("lemma1_moments_mc: column index out of range");
    if (draws < 2)
        throw config_error("lemma1_moments_mc: need at least 2 draws");

    const Eigen::Index M = P.rows();
    // Running sums and sums of squares; column 0 real part, column 1 imaginary part.
    Eigen::Matrix<double, Eigen::Dynamic, 1> s(2 + 2 + 4 * M);
    Eigen::Matrix<double, Eigen::Dynamic, 1> ss(s.size());
    s.setZero();
    ss.setZero();

    cmat X;
    for (std::int64_t d = 0; d < draws; ++d)
    {
        X = gen.complex_gaussian(P.cols(), Q.rows());
        const cmat Y = P * X * Q;
        const cplx ip = Y.col(i).dot(Y.col(j)); // y_i^H y_j
        Eigen::Index o = 0;
        auto add = [&](double v) {
            s(o) += v;
            ss(o) += v * v;
            ++o;
        };
        add(ip.real());
        add(ip.imag());
        add(std::norm(ip));
        add(0.0);
        for (Eigen::Index m = 0; m < M; ++m)
        {
            const cplx c = std::conj(Y(m, i)) * Y(m, j);
            add(c.real());
            add(c.imag());
            add(std::norm(Y(m, i)) * std::norm(Y(m, j)));
            add(0.0);
        }
    }

    const double n = static_cast<double>(draws);
    const rvec mean = s / n;
    rvec se(s.size());
    for (Eigen::Index k = 0; k < s.size(); ++k)
    {
        const double var = std::max(ss(k) / n - mean(k) * mean(k), 0.0) * n / (n - 1.0);
        se(k) = std::sqrt(var / n);
    }

    lemma1_estimate e;
    e.mean.m1 = {mean(0), mean(1)};
    e.m1_se = {se(0), se(1)};
    e.mean.m2 = mean(2);
    e.m2_se = se(2);
    e.mean.row_m1.resize(M);
    e.row_m1_se.resize(M);
    e.mean.row_m2.resize(M);
    e.row_m2_se.resize(M);
    for (Eigen::Index m = 0; m < M; ++m)
    {
        const Eigen::Index o = 4 + 4 * m;
        e.mean.row_m1(m) = {mean(o), mean(o + 1)};
        e.row_m1_se(m) = {se(o), se(o + 1)};
        e.mean.row_m2(m) = mean(o + 2);
        e.row_m2_se(m) = se(o + 2);
    }
    return e;
}

// ----- Second-order statistics of the equivalent-form channels ----------------------------

// Per-user expectations of the building blocks of the SINR, before the power prefactors:
//   desired  E|g_k^H G_hat F_hat^H f_hat_k|^2
//   leakage  E|B_1|^2
//   inter    sum_{j != k} E|g_k^H G F_hat^H f_j|^2
//   rs_gain  E||g_k^H G F_hat^H||^2
//   rs_quant E|g_k^H G F_hat^H n_q1|^2
//   bs_gain  E||g_k||^2
//   bs_quant E|g_k^H n_q2|^2
// where g_k is the k-th column of G_hat.
struct moment_terms
{
    rvec desired;
    rvec leakage;
    rvec inter;
    rvec rs_gain;
    rvec rs_quant;
    rvec bs_gain;
    rvec bs_quant;

    static moment_terms zeros(Eigen::Index K)
    {
        const rvec z = rvec::Zero(K);
        return {z, z, z, z, z, z, z};
    }
};

// The three expectations in the denominator of kappa with W = F_hat.
struct kappa_traces
{
    double signal = 0.0; // tr E{F_hat^H F F^H F_hat}
    double diag = 0.0;   // tr E{F_hat^H diag(F F^H) F_hat}
    double noise = 0.0;  // tr E{F_hat^H F_hat}
};

inline double kappa_from_traces(const system_model &s, const kappa_traces &t)
{
    const double a = s.adc1.alpha;
    const double den = a * a * s.P_U * t.signal + a * (1.0 - a) * s.P_U * t.diag + a * s.sigma_R2 * t.noise;
    if (!(den > 0.0) || !std::isfinite(den))
        throw numerical_error("amplification factor: relay input power is zero or not finite");
    return std::sqrt(s.P_R / den);
}

namespace detail
{

// Sum over RS antennas of E|f_hat_ni|^2 ||f_n||^2, per user i.
inline rvec relay_row_energy(const estimate_model &F)
{
    const rvec &th = F.receive.hat_diagonal();
    const rvec &te = F.receive.err_diagonal();
    const Eigen::Index K = F.users();
    double sbh = 0.0;
    double sbt = 0.0;
    for (Eigen::Index i = 0; i < K; ++i)
    {
        sbh += F.transmit_hat_entry(i, i);
        sbt += F.transmit_err_diag(i);
    }
    const double s2 = th.squaredNorm();
    const double s11 = th.dot(te);
    rvec x(K);
    for (Eigen::Index i = 0; i < K; ++i)
    {
        const double bi = F.transmit_hat_entry(i, i);
        x(i) = s2 * bi * (bi + sbh) + s11 * bi * sbt;
    }
    return x;
}

} // namespace detail

inline kappa_traces kappa_traces_closed(const estimate_model &F)
{
    const Eigen::Index K = F.users();
    const double trR = F.receive.trace_hat();
    const double froR = F.receive.frobenius_sq_hat();
    const double crossR = F.receive.trace_hat_err();
    double sbh = 0.0;
    double sbt = 0.0;
    for (Eigen::Index i = 0; i < K; ++i)
    {
        sbh += F.transmit_hat_entry(i, i);
        sbt += F.transmit_err_diag(i);
    }
    kappa_traces t;
    for (Eigen::Index i = 0; i < K; ++i)
    {
        const double bi = F.transmit_hat_entry(i, i);
        t.signal += bi * (bi * trR * trR + froR * sbh + crossR * sbt);
    }
    t.diag = detail::relay_row_energy(F).sum();
    t.noise = trR * sbh;
    return t;
}

inline double amplification_factor_closed(const system_model &s, const estimate_model &F)
{
    return kappa_from_traces(s, kappa_traces_closed(F));
}

inline double amplification_factor_closed(const system_model &s)
{
    if (s.K == 0)
        return 0.0;
    return amplification_factor_closed(s, estimate_models(s).first);
}

// Closed-form expectations of every SINR building block under the equivalent-form model.
inline moment_terms moment_terms_closed(const system_model &s, const estimate_model &F, const estimate_model &G)
{
    const Eigen::Index K = F.users();
    moment_terms t = moment_terms::zeros(K);
    if (K == 0)
        return t;

    const double trR = F.receive.trace_hat();
    const double froR = F.receive.frobenius_sq_hat();
    const double crossR = F.receive.trace_hat_err();
    const double trB = G.receive.trace_hat();
    const double froB = G.receive.frobenius_sq_hat();
    const double crossB = G.receive.trace_hat_err();
    const double eta2 = G.eta * G.eta;

    rvec bh(K), bt(K), td(K);
    for (Eigen::Index i = 0; i < K; ++i)
    {
        bh(i) = F.transmit_hat_entry(i, i);
        bt(i) = F.transmit_err_diag(i);
        td(i) = G.transmit_err_diag(i);
    }

    // ff(i, j) = E|f_hat_i^H f_hat_j|^2, fe(i, j) = E|f_hat_i^H f_err_j|^2
    Eigen::MatrixXd ff(K, K), fe(K, K);
    for (Eigen::Index i = 0; i < K; ++i)
        for (Eigen::Index j = 0; j < K; ++j)
        {
            ff(i, j) = bh(i) * bh(j) * ((i == j ? trR * trR : 0.0) + froR);
            fe(i, j) = bh(i) * bt(j) * crossR;
        }

    const rvec x = detail::relay_row_energy(F);
    const rvec &bh_diag = G.receive.hat_diagonal();
    const rvec &be_diag = G.receive.err_diagonal();
    const double b2 = bh_diag.squaredNorm();
    const double b11 = bh_diag.dot(be_diag);
    const double sum_td = td.sum();

    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double tkk = G.transmit_hat_entry(k, k);
        // gh(i) = E|g_hat_k^H g_hat_i|^2, ge(i) = E|g_hat_k^H g_err_i|^2
        rvec gh(K), ge(K);
        double cross_sum = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
        {
            const double tki2 = std::norm(G.transmit_hat(k, i));
            gh(i) = eta2 * (tki2 * trB * trB + tkk * G.transmit_hat_entry(i, i) * froB);
            ge(i) = eta2 * tkk * td(i) * crossB;
            cross_sum += tki2 + tkk * G.transmit_hat_entry(i, i);
        }
        const rvec g = gh + ge;

        double desired = 0.0, leakage = 0.0, inter = 0.0, rs_gain = 0.0, rs_row = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
        {
            desired += gh(i) * ff(i, k);
            leakage += gh(i) * fe(i, k) + ge(i) * ff(i, k) + ge(i) * fe(i, k);
            for (Eigen::Index j = 0; j < K; ++j)
                if (j != k)
                    inter += g(i) * (ff(i, j) + fe(i, j));
            rs_gain += g(i) * bh(i) * trR;
            rs_row += g(i) * x(i);
        }

        const double a1 = s.adc1.alpha;
        const double a2 = s.adc2.alpha;
        const double bs_gain = G.eta * tkk * trB;
        const double bs_row = eta2 * (b2 * cross_sum + tkk * b11 * sum_td);

        t.desired(k) = desired;
        t.leakage(k) = leakage;
        t.inter(k) = inter;
        t.rs_gain(k) = rs_gain;
        t.rs_quant(k) = a1 * (1.0 - a1) * (s.P_U * rs_row + s.sigma_R2 * rs_gain);
        t.bs_gain(k) = bs_gain;
        t.bs_quant(k) = a2 * (1.0 - a2) * (s.P_R / s.K * bs_row + s.sigma_B2 * bs_gain);
    }
    return t;
}

// Scales the building blocks into S_k, I_k, N_k1, N_k2.
inline rate_report assemble_rate(const system_model &s, const moment_terms &t, double kappa, provenance source)
{
    const double a1 = s.adc1.alpha;
    const double a2 = s.adc2.alpha;
    const double k2 = kappa * kappa;
    rate_report r;
    r.mu = s.mu;
    r.kappa = kappa;
    r.chi = a1 * a1 * a2 * a2 * k2 * s.P_U;
    r.source = source;
    r.S = r.chi * t.desired;
    r.I = r.chi * (t.leakage + t.inter);
    r.N1 = a1 * a1 * a2 * a2 * k2 * s.sigma_R2 * t.rs_gain + a2 * a2 * k2 * t.rs_quant;
    r.N2 = a2 * a2 * s.sigma_B2 * t.bs_gain + t.bs_quant;
    r.finalize();
    return r;
}

inline rate_report empty_rate(const system_model &s, provenance source)
{
    rate_report r;
    r.mu = s.mu;
    r.source = source;
    r.S = r.I = r.N1 = r.N2 = r.rate = rvec(0);
    return r;
}

inline rate_report sum_rate_approx(const system_model &s, const estimate_model &F, const estimate_model &G)
{
    if (s.K == 0)
        return empty_rate(s, provenance::closed_form);
    const double kappa = amplification_factor_closed(s, F);
    return assemble_rate(s, moment_terms_closed(s, F, G), kappa, provenance::closed_form);
}

// Closed-form sum rate with imperfect CSI (or perfect CSI when the scenario requests it).
inline rate_report sum_rate_approx(const system_model &s)
{
    if (s.K == 0)
        return empty_rate(s, provenance::closed_form);
    const auto [F, G] = estimate_models(s);
    return sum_rate_approx(s, F, G);
}

struct sinr_terms
{
    rvec S;
    rvec I;
    rvec N1;
    rvec N2;
};

// S_k, I_k, N_k1, N_k2 written term by term in the grouping of the published expressions,
// with the eta^2 factor restored on the second part of S_k. Kept separate from
// moment_terms_closed so that the two can be compared.
inline sinr_terms theorem1_terms(const system_model &s, const estimate_model &F, const estimate_model &G, double kappa)
{
    const Eigen::Index K = F.users();
    sinr_terms out{rvec::Zero(K), rvec::Zero(K), rvec::Zero(K), rvec::Zero(K)};
    const double a1 = s.adc1.alpha;
    const double a2 = s.adc2.alpha;
    const double chi = a1 * a1 * a2 * a2 * kappa * kappa * s.P_U;
    const double eta = G.eta;
    const double eta2 = eta * eta;

    const double trR = F.receive.trace_hat();
    const double froR = F.receive.frobenius_sq_hat();
    const double tRR = F.receive.trace_hat_err(); // tr(T_err_Rr T_hat_Rr)
    const double trB = G.receive.trace_hat();
    const double froB = G.receive.frobenius_sq_hat();
    const double tBB = G.receive.trace_hat_err();
    const rvec &dR = F.receive.hat_diagonal();
    const rvec &eR = F.receive.err_diagonal();
    const rvec &dB = G.receive.hat_diagonal();
    const rvec &eB = G.receive.err_diagonal();

    auto bh = [&](Eigen::Index i) { return F.transmit_hat_entry(i, i); };
    auto bt = [&](Eigen::Index i) { return F.transmit_err_diag(i); };
    auto th = [&](Eigen::Index i, Eigen::Index j) { return G.transmit_hat(i, j); };
    auto te = [&](Eigen::Index i) { return G.transmit_err_diag(i); };

    double sum_bh = 0.0, sum_bt = 0.0, sum_te = 0.0;
    for (Eigen::Index i = 0; i < K; ++i)
    {
        sum_bh += bh(i);
        sum_bt += bt(i);
        sum_te += te(i);
    }

    for (Eigen::Index k = 0; k < K; ++k)
    {
        const double tkk = th(k, k).real();
        // sum_i beta_i (t_ki^2 tr^2(T_Br) + t_kk t_ii ||T_Br||^2)
        auto inner = [&](Eigen::Index i) { return std::norm(th(k, i)) * trB * trB + tkk * th(i, i).real() * froB; };
        double sum_inner = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
            sum_inner += bh(i) * inner(i);

        // Desired signal.
        out.S(k) = chi * eta2 * tkk * tkk * bh(k) * bh(k) * (trB * trB + froB) * trR * trR +
                   chi * eta2 * bh(k) * froR * sum_inner;

        // Interference.
        double I1 = 0.0;
        for (Eigen::Index j = 0; j < K; ++j)
        {
            if (j == k)
                continue;
            I1 += bh(j) * bh(j) * inner(j) * trR * trR + bh(j) * froR * sum_inner;
        }
        double I2 = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
        {
            double lsum = 0.0;
            for (Eigen::Index l = 0; l < K; ++l)
                lsum += tkk * te(l) * bh(l);
            I2 += bt(i) * tRR * sum_inner + tkk * te(i) * bh(i) * bh(i) * tBB * trR * trR +
                  bh(i) * lsum * tBB * froR + bt(i) * tBB * tRR * lsum;
        }
        out.I(k) = chi * eta2 * (I1 + I2);

        // Noise at the RS.
        double q1 = 0.0, q2 = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
        {
            const double w = std::norm(th(k, i)) * trB * trB + tkk * (th(i, i).real() * froB + te(i) * tBB);
            q1 += bh(i) * w * (bh(i) + sum_bh);
            q2 += bh(i) * w;
        }
        double bte = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
            bte += bh(i) * te(i);
        out.N1(k) = a1 * (1.0 - a1) * a2 * a2 * kappa * kappa * s.P_U * eta2 *
                        (dR.squaredNorm() * q1 + dR.dot(eR) * q2 * sum_bt) +
                    a1 * a2 * a2 * kappa * kappa * eta2 * s.sigma_R2 * (trR * sum_inner + tkk * trR * tBB * bte);

        // Noise at the BS.
        double c = 0.0;
        for (Eigen::Index i = 0; i < K; ++i)
            c += std::norm(th(k, i)) + tkk * th(i, i).real();
        out.N2(k) = a2 * (1.0 - a2) * s.P_R * eta2 / K * (dB.squaredNorm() * c + tkk * dB.dot(eB) * sum_te) +
                    a2 * eta * s.sigma_B2 * tkk * trB;
    }
    return out;
}

// Perfect-CSI sum rate written directly in terms of the true correlation matrices.
inline rate_report sum_rate_perfect_csi(const system_model &s)
{
    if (s.K == 0)
        return empty_rate(s, provenance::closed_form);
    const int K = s.K;
    const double N = s.N;
    const double M = s.M;
    const double eta = s.eta();
    const double eta2 = eta * eta;
    const double a1 = s.adc1.alpha;
    const double a2 = s.adc2.alpha;
    const rvec &beta = s.fading.betas;
    const double sb = beta.sum();
    const double froR = s.T_Rr.frobenius_sq();
    const double froB = s.T_Br.frobenius_sq();
    const cmat &T = s.T_Rt.entries();

    // kappa with W = F
    double signal = 0.0, diag = 0.0;
    for (int i = 0; i < K; ++i)
    {
        signal += beta(i) * (beta(i) * N * N + froR * sb);
        diag += N * beta(i) * (beta(i) + sb);
    }
    const double kappa = kappa_from_traces(s, {signal, diag, N * sb});
    const double k2 = kappa * kappa;
    const double chi = a1 * a1 * a2 * a2 * k2 * s.P_U;

    rate_report r;
    r.mu = s.mu;
    r.kappa = kappa;
    r.chi = chi;
    r.source = provenance::closed_form;
    r.S = r.I = r.N1 = r.N2 = rvec::Zero(K);
    for (int k = 0; k < K; ++k)
    {
        auto w = [&](int i) { return std::norm(T(k, i)) * M * M + froB; };
        double sw = 0.0, sw_load = 0.0, t2 = 0.0;
        for (int i = 0; i < K; ++i)
        {
            sw += beta(i) * w(i);
            sw_load += beta(i) * (beta(i) + sb) * w(i);
            t2 += std::norm(T(k, i));
        }
        r.S(k) = chi * eta2 * beta(k) * beta(k) * (M * M + froB) * N * N + chi * eta2 * beta(k) * froR * sw;
        double I = 0.0;
        for (int j = 0; j < K; ++j)
            if (j != k)
                I += beta(j) * beta(j) * w(j) * N * N + beta(j) * froR * sw;
        r.I(k) = chi * eta2 * I;
        r.N1(k) = a1 * (1.0 - a1) * a2 * a2 * k2 * s.P_U * eta2 * sw_load * N + a1 * a2 * a2 * k2 * eta2 * s.sigma_R2 * sw * N;
        r.N2(k) = a2 * (1.0 - a2) * s.P_R * eta2 * (1.0 + t2 / K) * M + a2 * eta * s.sigma_B2 * M;
    }
    r.finalize();
    return r;
}

// ----- Power scaling limits ---------------------------------------------------------------

enum class scaling_regime
{
    unbounded,   // a < 1 and b < 1
    bs_limited,  // a < b = 1
    rs_limited,  // b < a = 1
    both_limited, // a = b = 1
    vanishing    // a > 1 or b > 1
};

inline const char *to_string(scaling_regime r)
{
    switch (r)
    {
    case scaling_regime::unbounded:
        return "unbounded";
    case scaling_regime::bs_limited:
        return "bs_limited";
    case scaling_regime::rs_limited:
        return "rs_limited";
    case scaling_regime::both_limited:
        return "both_limited";
    case scaling_regime::vanishing:
        return "vanishing";
    }
    return "?";
}

struct asymptotic_limit
{
    scaling_regime regime = scaling_regime::unbounded;
    double value = 0.0; // limit of gamma_k; +inf or 0 at the extremes
    double zeta = 0.0;  // populated for a = b = 1
};

inline scaling_regime classify_scaling(double a, double b)
{
    if (!(a >= 0.0) || !(b >= 0.0))
        throw config_error("power_scaling_limit: invalid exponent, a and b must be >= 0");
    if (a > 1.0 || b > 1.0)
        return scaling_regime::vanishing;
    if (a < 1.0 && b < 1.0)
        return scaling_regime::unbounded;
    if (a < 1.0)
        return scaling_regime::bs_limited;
    if (b < 1.0)
        return scaling_regime::rs_limited;
    return scaling_regime::both_limited;
}

// Large-N limit of the perfect-CSI SINR of user k under P_U = E_U / N^a, P_R = E_R / M^b.
inline asymptotic_limit power_scaling_limit(double a, double b, double E_U, double E_R, double alpha1, double alpha2,
                                            const rvec &betas, double eta, double sigma_R2, double sigma_B2,
                                            Eigen::Index k)
{
    if (k < 0 || k >= betas.size())
        throw config_error("power_scaling_limit: user index out of range");
    asymptotic_limit lim;
    lim.regime = classify_scaling(a, b);
    const double bk = betas(k);
    const double sum_b = betas.sum();
    const double sum_b2 = betas.squaredNorm();
    switch (lim.regime)
    {
    case scaling_regime::unbounded:
        lim.value = std::numeric_limits<double>::infinity();
        break;
    case scaling_regime::bs_limited:
        lim.value = alpha2 * bk * bk * eta * E_R / (sigma_B2 * sum_b2);
        break;
    case scaling_regime::rs_limited:
        lim.value = alpha1 * bk * E_U / sigma_R2;
        break;
    case scaling_regime::both_limited:
        lim.zeta = alpha2 * bk * eta * sigma_R2 * E_R + sigma_B2 * (alpha1 * E_U * sum_b2 + sigma_R2 * sum_b);
        lim.value = alpha1 * alpha2 * bk * bk * eta * E_U * E_R / lim.zeta;
        break;
    case scaling_regime::vanishing:
        lim.value = 0.0;
        break;
    }
    return lim;
}

inline asymptotic_limit power_scaling_limit(const scenario_config &cfg, Eigen::Index k)
{
    const auto lsf = cfg.fading();
    return power_scaling_limit(cfg.a, cfg.b, cfg.E_U, cfg.E_R, cfg.q1.alpha, cfg.q2.alpha, lsf.betas, lsf.eta,
                               cfg.sigma_R2, cfg.sigma_B2, k);
}

// mu * sum_k log2(1 + lim gamma_k); infinite or zero at the extremes.
inline double asymptotic_sum_rate(const scenario_config &cfg)
{
    double sum = 0.0;
    for (int k = 0; k < cfg.K; ++k)
    {
        const auto lim = power_scaling_limit(cfg, k);
        sum += std::log2(1.0 + lim.value);
    }
    return cfg.mu() * sum;
}

} // namespace mrelay

#endif
