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


#ifndef MRELAY_ESTIMATION_HPP
#define MRELAY_ESTIMATION_HPP

#include <cmath>
#include <memory>
#include <numbers>
#include <utility>

#include "channel.hpp"
#include "correlation.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "quantizer.hpp"
#include "rng.hpp"
#include "scenario.hpp"

namespace mrelay
{

// Largest condition number accepted for the observation covariance before inverting it.
inline constexpr double max_condition_number = 1e14;

// tau x K pilot matrix with orthonormal columns and constant-modulus entries 1/sqrt(tau)
// (first K columns of the normalized DFT matrix).
inline cmat orthonormal_pilots(int tau, int K)
{
    if (tau < K)
        throw config_error("orthonormal_pilots: pilot length must be >= K");
    cmat P(tau, K);
    const double scale = 1.0 / std::sqrt(static_cast<double>(tau));
    for (int k = 0; k < K; ++k)
        for (int t = 0; t < tau; ++t)
            P(t, k) = std::polar(scale, -2.0 * std::numbers::pi * static_cast<double>(t) * k / tau);
    return P;
}

// Pair (T_hat, T_err) of PSD matrices that are both functions of a true correlation T and
// therefore diagonal in its eigenbasis. Traces, Frobenius norms and diagonals are evaluated
// from the eigenvalues; full matrices and square roots are only formed on request.
class receive_split
{
public:
    receive_split() = default;

    receive_split(std::shared_ptr<const hermitian_spectrum> basis, rvec hat_eigs, rvec err_eigs)
        : basis_(std::move(basis)), hat_(std::move(hat_eigs)), err_(std::move(err_eigs))
    {
        if (hat_.size() != basis_->dim() || err_.size() != basis_->dim())
            throw config_error("receive_split: eigenvalue vectors do not match the basis dimension");
        hat_diag_ = basis_->vectors().cwiseAbs2() * hat_;
        err_diag_ = basis_->vectors().cwiseAbs2() * err_;
    }

    // Estimate equals the truth, error vanishes.
    static receive_split perfect(const correlation_matrix &T)
    {
        const rvec lambda = T.spectrum().values().cwiseMax(0.0);
        return {T.shared_spectrum(), lambda, rvec::Zero(lambda.size())};
    }

    Eigen::Index dim() const { return hat_.size(); }
    const rvec &hat_eigenvalues() const { return hat_; }
    const rvec &err_eigenvalues() const { return err_; }
    const rvec &hat_diagonal() const { return hat_diag_; }
    const rvec &err_diagonal() const { return err_diag_; }

    double trace_hat() const { return hat_.sum(); }
    double trace_err() const { return err_.sum(); }
    double frobenius_sq_hat() const { return hat_.squaredNorm(); }
    double frobenius_sq_err() const { return err_.squaredNorm(); }
    double trace_hat_err() const { return hat_.dot(err_); } // tr(T_hat T_err)

    cmat hat() const { return compose(hat_); }
    cmat err() const { return compose(err_); }
    cmat hat_sqrt() const { return compose(hat_.cwiseMax(0.0).cwiseSqrt()); }
    cmat err_sqrt() const { return compose(err_.cwiseMax(0.0).cwiseSqrt()); }

    bool has_error() const { return err_.cwiseAbs().maxCoeff() > 0.0; }

private:
    cmat compose(const rvec &eigs) const
    {
        const cmat &U = basis_->vectors();
        return U * eigs.cast<cplx>().asDiagonal() * U.adjoint();
    }

    std::shared_ptr<const hermitian_spectrum> basis_;
    rvec hat_;
    rvec err_;
    rvec hat_diag_;
    rvec err_diag_;
};

// Equivalent-form decomposition of one hop's channel estimate:
//   estimate = sqrt(eta) T_hat^{1/2} H_hat S_hat^{1/2},  error = sqrt(eta) T_err^{1/2} H_err S_err^{1/2}
// with i.i.d. CN(0,1) H_hat, H_err. For the first hop eta = 1 and S_hat = D_hat_F, S_err = D_err_F
// are diagonal; for the second hop S_hat = T_hat_Rt and S_err = T_err_Rt.
struct estimate_model
{
    receive_split receive;
    cmat transmit_hat;
    cmat transmit_err;
    double eta = 1.0;

    Eigen::Index rows() const { return receive.dim(); }
    Eigen::Index users() const { return transmit_hat.rows(); }
    double transmit_hat_entry(Eigen::Index i, Eigen::Index j) const { return transmit_hat(i, j).real(); }
    double transmit_err_diag(Eigen::Index i) const { return transmit_err(i, i).real(); }
};

namespace detail
{

// Coefficients of R_Z = gain * T + floor * I for one hop.
struct observation_coefficients
{
    double gain = 0.0;  // alpha^2 tau P (sum of transmit-side second moments)
    double floor = 0.0; // K alpha ((1 - alpha) P (...) + sigma^2)
};

inline observation_coefficients coefficients_F(const system_model &s)
{
    const double a = s.adc1.alpha;
    const double sb = s.sum_beta();
    return {a * a * s.tau1 * s.P1 * sb, s.K * a * ((1.0 - a) * s.P1 * sb + s.sigma_R2)};
}

inline observation_coefficients coefficients_G(const system_model &s)
{
    const double a = s.adc2.alpha;
    const double eta = s.eta();
    return {a * a * s.tau2 * s.P2 * eta, s.K * a * ((1.0 - a) * s.P2 * eta + s.sigma_B2)};
}

inline void check_conditioning(const hermitian_spectrum &T, const observation_coefficients &c, const char *what)
{
    const double lo = c.gain * std::max(T.min_value(), 0.0) + c.floor;
    const double hi = c.gain * T.max_value() + c.floor;
    if (!(lo > 0.0) || hi / lo > max_condition_number)
        throw numerical_error(std::string(what) + ": observation covariance is singular or ill-conditioned");
}

// Per-eigenvalue estimate share lambda_hat = gain lambda^2 / (gain lambda + floor).
inline rvec estimate_eigenvalues(const rvec &lambda, const observation_coefficients &c)
{
    rvec out(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
    {
        const double l = std::max(lambda(i), 0.0);
        out(i) = c.gain * l * l / (c.gain * l + c.floor);
    }
    return out;
}

// Sums over eigenvalues of lambda^p / (gain lambda + floor)^2, p = 2, 3.
inline std::pair<double, double> squared_resolvent_traces(const rvec &lambda, const observation_coefficients &c)
{
    double t2 = 0.0;
    double t3 = 0.0;
    for (Eigen::Index i = 0; i < lambda.size(); ++i)
    {
        const double l = std::max(lambda(i), 0.0);
        const double d = c.gain * l + c.floor;
        t2 += l * l / (d * d);
        t3 += l * l * l / (d * d);
    }
    return {t2, t3};
}

} // namespace detail

// ----- First hop: users -> RS --------------------------------------------------------------

// R_ZR = alpha1^2 tau1 P1 (sum beta) T_Rr + K alpha1 ((1 - alpha1) P1 sum beta + sigma_R^2) I_N
inline cmat observation_covariance_F(const system_model &s)
{
    const auto c = detail::coefficients_F(s);
    return c.gain * s.T_Rr.entries() + c.floor * cmat::Identity(s.N, s.N);
}

// Q_F = alpha1 sqrt(tau1 P1) (sum beta) T_Rr R_ZR^{-1}
inline cmat lmmse_filter_F(const system_model &s)
{
    const auto c = detail::coefficients_F(s);
    const auto &T = s.T_Rr.spectrum();
    detail::check_conditioning(T, c, "lmmse_filter_F");
    const double scale = s.adc1.alpha * std::sqrt(s.tau1 * s.P1) * s.sum_beta();
    return T.apply([&](double l) { return scale * l / (c.gain * l + c.floor); });
}

// E ||F_hat - F||_F^2 = sum beta (N - alpha1^2 tau1 P1 sum beta sum_n lambda_n^2 / Lambda_1(n))
inline double mse_F_closed_form(const system_model &s)
{
    const auto c = detail::coefficients_F(s);
    const rvec &lambda = s.T_Rr.spectrum().values();
    double acc = 0.0;
    for (Eigen::Index n = 0; n < lambda.size(); ++n)
    {
        const double l = std::max(lambda(n), 0.0);
        acc += l * l / (c.gain * l + c.floor);
    }
    return s.sum_beta() * (s.N - c.gain * acc);
}

inline double mse_F_per_element(const system_model &s) { return mse_F_closed_form(s) / (double(s.N) * s.K); }

inline estimate_model perfect_estimate_F(const system_model &s)
{
    return {receive_split::perfect(s.T_Rr), s.fading.betas.cast<cplx>().asDiagonal(), cmat::Zero(s.K, s.K), 1.0};
}

// Equivalent-form decomposition of the LMMSE estimate of F and of its error.
inline estimate_model equivalent_form_F(const system_model &s)
{
    if (s.K == 0)
        return {receive_split::perfect(s.T_Rr), cmat(0, 0), cmat(0, 0), 1.0};

    const auto c = detail::coefficients_F(s);
    const auto &T = s.T_Rr.spectrum();
    detail::check_conditioning(T, c, "equivalent_form_F");

    const rvec lambda = T.values().cwiseMax(0.0);
    const rvec hat = detail::estimate_eigenvalues(lambda, c);
    const rvec err = lambda - hat;

    // D_bar = alpha1^2 tau1 P1 (sum beta)^2 [alpha1^2 tau1 P1 tr(T R^-1 T^2 R^-1) D_F
    //                                      + alpha1 ((1 - alpha1) P1 sum beta + sigma_R^2) tr(R^-1 T^2 R^-1) I]
    const double a = s.adc1.alpha;
    const double sb = s.sum_beta();
    const auto [t2, t3] = detail::squared_resolvent_traces(lambda, c);
    const double lead = a * a * s.tau1 * s.P1 * sb * sb;
    const double per_beta = lead * a * a * s.tau1 * s.P1 * t3;
    const double common = lead * a * ((1.0 - a) * s.P1 * sb + s.sigma_R2) * t2;

    const rvec &beta = s.fading.betas;
    const rvec d_bar = (per_beta * beta.array() + common).matrix();
    const double tr_bar = d_bar.sum();
    if (!(tr_bar > 0.0))
        throw numerical_error("equivalent_form_F: degenerate estimate, tr(D_bar_F) = 0 (zero pilot power or alpha1 = 0)");
    const rvec d_hat = (sb / tr_bar) * d_bar;

    const rvec d_check = static_cast<double>(s.N) * beta - d_bar;
    const double tr_check = d_check.sum();
    rvec d_err = rvec::Zero(s.K);
    rvec err_eigs = err;
    if (tr_check > 1e-12 * s.N * sb)
        d_err = (sb / tr_check) * d_check;
    else
        err_eigs.setZero(); // error-free limit

    return {receive_split(s.T_Rr.shared_spectrum(), hat, err_eigs), d_hat.cast<cplx>().asDiagonal(),
            d_err.cast<cplx>().asDiagonal(), 1.0};
}

// ----- Second hop: selected RS antennas -> BS ----------------------------------------------

// R_ZB = alpha2^2 tau2 P2 eta T_Br + K alpha2 ((1 - alpha2) P2 eta + sigma_B^2) I_M
inline cmat observation_covariance_G(const system_model &s)
{
    const auto c = detail::coefficients_G(s);
    return c.gain * s.T_Br.entries() + c.floor * cmat::Identity(s.M, s.M);
}

// Q_G = alpha2 sqrt(tau2 P2 K) eta T_Br R_ZB^{-1}
inline cmat lmmse_filter_G(const system_model &s)
{
    const auto c = detail::coefficients_G(s);
    const auto &T = s.T_Br.spectrum();
    detail::check_conditioning(T, c, "lmmse_filter_G");
    const double scale = s.adc2.alpha * std::sqrt(s.tau2 * s.P2 * s.K) * s.eta();
    return T.apply([&](double l) { return scale * l / (c.gain * l + c.floor); });
}

// E ||G_hat - G||_F^2 = K eta (M - alpha2^2 tau2 P2 eta sum_m lambda_m^2 / Lambda_2(m))
inline double mse_G_closed_form(const system_model &s)
{
    const auto c = detail::coefficients_G(s);
    const rvec &lambda = s.T_Br.spectrum().values();
    double acc = 0.0;
    for (Eigen::Index m = 0; m < lambda.size(); ++m)
    {
        const double l = std::max(lambda(m), 0.0);
        acc += l * l / (c.gain * l + c.floor);
    }
    return s.K * s.eta() * (s.M - c.gain * acc);
}

inline double mse_G_per_element(const system_model &s) { return mse_G_closed_form(s) / (double(s.M) * s.K); }

inline estimate_model perfect_estimate_G(const system_model &s)
{
    return {receive_split::perfect(s.T_Br), s.T_Rt.entries(), cmat::Zero(s.K, s.K), s.eta()};
}

inline estimate_model equivalent_form_G(const system_model &s)
{
    if (s.K == 0)
        return {receive_split::perfect(s.T_Br), cmat(0, 0), cmat(0, 0), s.eta()};

    const auto c = detail::coefficients_G(s);
    const auto &T = s.T_Br.spectrum();
    detail::check_conditioning(T, c, "equivalent_form_G");

    const rvec lambda = T.values().cwiseMax(0.0);
    const rvec hat = detail::estimate_eigenvalues(lambda, c);
    const rvec err = lambda - hat;

    // T_bar_Rt = alpha2^3 tau2 P2 eta^2 [alpha2 tau2 P2 eta tr(T R^-1 T^2 R^-1) T_Rt
    //                                   + K ((1 - alpha2) P2 eta + sigma_B^2) tr(R^-1 T^2 R^-1) I_K]
    const double a = s.adc2.alpha;
    const double eta = s.eta();
    const auto [t2, t3] = detail::squared_resolvent_traces(lambda, c);
    const double lead = a * a * a * s.tau2 * s.P2 * eta * eta;
    const cmat I = cmat::Identity(s.K, s.K);
    const cmat t_bar = lead * (a * s.tau2 * s.P2 * eta * t3 * s.T_Rt.entries() +
                               s.K * ((1.0 - a) * s.P2 * eta + s.sigma_B2) * t2 * I);
    const double tr_bar = trace_real(t_bar);
    if (!(tr_bar > 0.0))
        throw numerical_error("equivalent_form_G: degenerate estimate, tr(T_bar_Rt) = 0 (zero pilot power or alpha2 = 0)");
    const cmat t_hat = (s.K / tr_bar) * t_bar;

    const cmat t_check = (s.M * eta) * s.T_Rt.entries() - t_bar;
    const double tr_check = trace_real(t_check);
    cmat t_err = cmat::Zero(s.K, s.K);
    rvec err_eigs = err;
    if (tr_check > 1e-12 * s.M * eta * s.K)
        t_err = (s.K / tr_check) * t_check;
    else
        err_eigs.setZero();

    return {receive_split(s.T_Br.shared_spectrum(), hat, err_eigs), t_hat, t_err, eta};
}

inline std::pair<estimate_model, estimate_model> estimate_models(const system_model &s)
{
    if (s.perfect_csi)
        return {perfect_estimate_F(s), perfect_estimate_G(s)};
    return {equivalent_form_F(s), equivalent_form_G(s)};
}

// ----- Pilot-phase simulation --------------------------------------------------------------

struct pilot_outcome
{
    cmat truth;
    cmat estimate;
};

// Full pilot chain for the first hop: draw F, transmit sqrt(tau1 P1) F Phi^T plus AWGN,
// quantize every received sample under AQNM with its conditional variance
// tau1 P1 |(F Phi^T)_nt|^2 + sigma_R^2, despread with Phi^*, apply Q_F.
class pilot_estimator_F
{
public:
    explicit pilot_estimator_F(const system_model &s)
        : sys_(s), ar1_(ar1_operator::detect(s.T_Rr)), filter_(lmmse_filter_F(s)),
          pilots_(orthonormal_pilots(s.tau1, s.K))
    {
        if (!ar1_)
            sqrt_T_ = s.T_Rr.sqrt();
    }

    pilot_outcome simulate(rng &gen) const
    {
        cmat F;
        if (ar1_)
        {
            F = gen.complex_gaussian(sys_.N, sys_.K);
            for (Eigen::Index k = 0; k < sys_.K; ++k)
                F.col(k) *= std::sqrt(sys_.fading.betas(k));
            F = ar1_->color(F);
        }
        else
            F = draw_F(sqrt_T_, sys_.fading.betas, gen);
        const double amp = std::sqrt(sys_.tau1 * sys_.P1);
        const cmat clean = amp * F * pilots_.transpose();
        cmat received = clean;
        for (Eigen::Index t = 0; t < received.cols(); ++t)
            for (Eigen::Index n = 0; n < received.rows(); ++n)
                received(n, t) += gen.complex_normal(sys_.sigma_R2);
        const Eigen::MatrixXd variance = (clean.cwiseAbs2().array() + sys_.sigma_R2).matrix();
        const cmat quantized = aqnm_quantize(received, sys_.adc1, variance, gen);
        const cmat despread = quantized * pilots_.conjugate();
        if (!ar1_)
            return {F, filter_ * despread};
        const auto c = detail::coefficients_F(sys_);
        const double scale = sys_.adc1.alpha * std::sqrt(sys_.tau1 * sys_.P1) * sys_.sum_beta();
        return {F, scale * ar1_->shifted_solve(c.gain, c.floor, despread)};
    }

    const cmat &filter() const { return filter_; }

private:
    const system_model &sys_;
    std::optional<ar1_operator> ar1_;
    cmat sqrt_T_;
    cmat filter_;
    cmat pilots_;
};

// Second hop: the K selected RS antennas send sqrt(tau2 P2 / K) Theta^T; G is estimated at the BS.
class pilot_estimator_G
{
public:
    explicit pilot_estimator_G(const system_model &s)
        : sys_(s), ar1_(ar1_operator::detect(s.T_Br)), sqrt_T_Rt_(s.T_Rt.sqrt()), filter_(lmmse_filter_G(s)),
          pilots_(orthonormal_pilots(s.tau2, s.K))
    {
        if (!ar1_)
            sqrt_T_Br_ = s.T_Br.sqrt();
    }

    pilot_outcome simulate(rng &gen) const
    {
        const cmat G = ar1_ ? cmat(std::sqrt(sys_.eta()) * (ar1_->color(gen.complex_gaussian(sys_.M, sys_.K)) * sqrt_T_Rt_))
                            : draw_G(sys_.eta(), sqrt_T_Br_, sqrt_T_Rt_, gen);
        const double amp = std::sqrt(sys_.tau2 * sys_.P2 / sys_.K);
        const cmat clean = amp * G * pilots_.transpose();
        cmat received = clean;
        for (Eigen::Index t = 0; t < received.cols(); ++t)
            for (Eigen::Index m = 0; m < received.rows(); ++m)
                received(m, t) += gen.complex_normal(sys_.sigma_B2);
        const Eigen::MatrixXd variance = (clean.cwiseAbs2().array() + sys_.sigma_B2).matrix();
        const cmat quantized = aqnm_quantize(received, sys_.adc2, variance, gen);
        const cmat despread = quantized * pilots_.conjugate();
        if (!ar1_)
            return {G, filter_ * despread};
        const auto c = detail::coefficients_G(sys_);
        const double scale = sys_.adc2.alpha * std::sqrt(sys_.tau2 * sys_.P2 * sys_.K) * sys_.eta();
        return {G, scale * ar1_->shifted_solve(c.gain, c.floor, despread)};
    }

    const cmat &filter() const { return filter_; }

private:
    const system_model &sys_;
    std::optional<ar1_operator> ar1_;
    cmat sqrt_T_Br_;
    cmat sqrt_T_Rt_;
    cmat filter_;
    cmat pilots_;
};

inline pilot_outcome simulate_pilot_F(const system_model &s, rng &gen) { return pilot_estimator_F(s).simulate(gen); }
inline pilot_outcome simulate_pilot_G(const system_model &s, rng &gen) { return pilot_estimator_G(s).simulate(gen); }

} // namespace mrelay

#endif
