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


#ifndef MRELAY_CORRELATION_HPP
#define MRELAY_CORRELATION_HPP

#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"

namespace mrelay
{

// Spatial correlation matrix: Hermitian, unit diagonal, PSD.
// The eigendecomposition is computed once at construction and shared by every
// derived quantity (square roots, traces of matrix functions).
class correlation_matrix
{
public:
    correlation_matrix() = default;

    // Validates all invariants; throws config_error / numerical_error.
    explicit correlation_matrix(cmat entries) : entries_(std::move(entries))
    {
        if (entries_.rows() != entries_.cols())
            throw config_error("correlation_matrix: matrix is not square");
        const Eigen::Index n = entries_.rows();
        for (Eigen::Index j = 0; j < n; ++j)
        {
            if (entries_(j, j) != cplx(1.0, 0.0))
                throw config_error("correlation_matrix: diagonal entries must equal 1");
            for (Eigen::Index i = 0; i < j; ++i)
                if (entries_(i, j) != std::conj(entries_(j, i)))
                    throw config_error("correlation_matrix: matrix is not Hermitian");
        }
        spectrum_ = std::make_shared<const hermitian_spectrum>(entries_);
        spectrum_->require_psd("correlation_matrix");
    }

    static correlation_matrix identity(Eigen::Index n) { return correlation_matrix(cmat::Identity(n, n)); }

    Eigen::Index dim() const { return entries_.rows(); }
    const cmat &entries() const { return entries_; }
    const hermitian_spectrum &spectrum() const { return *spectrum_; }
    const std::shared_ptr<const hermitian_spectrum> &shared_spectrum() const { return spectrum_; }
    cplx operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

    double trace() const { return static_cast<double>(dim()); }
    double frobenius_sq() const { return mrelay::frobenius_sq(entries_); }
    double spectral_norm() const { return std::max(std::abs(spectrum_->min_value()), std::abs(spectrum_->max_value())); }
    rvec eigenvalues_desc() const { return spectrum_->values_desc(); }
    cmat sqrt() const { return spectrum_->sqrt("correlation_matrix"); }

private:
    cmat entries_;
    std::shared_ptr<const hermitian_spectrum> spectrum_ = std::make_shared<const hermitian_spectrum>();
};

// [T]_ij = r^(j-i) for i <= j, conj(r^(i-j)) below the diagonal.
inline correlation_matrix build_exponential(cplx r, Eigen::Index n)
{
    if (n < 1)
        throw config_error("build_exponential: dimension must be >= 1");
    if (!(std::abs(r) < 1.0))
        throw config_error("build_exponential: invalid correlation coefficient, |r| must be < 1");

    // Powers by repeated multiplication keep r^0 = 1 exact and the result Hermitian by construction.
    std::vector<cplx> powers(static_cast<std::size_t>(n));
    powers[0] = 1.0;
    for (std::size_t d = 1; d < powers.size(); ++d)
        powers[d] = powers[d - 1] * r;

    cmat T(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            T(i, j) = i <= j ? powers[static_cast<std::size_t>(j - i)] : std::conj(powers[static_cast<std::size_t>(i - j)]);
    return correlation_matrix(std::move(T));
}

inline correlation_matrix build_exponential(double r, Eigen::Index n) { return build_exponential(cplx(r, 0.0), n); }

// Exponential correlation viewed as a first-order autoregression: x_i = conj(r) x_{i-1} + s w_i
// with s = sqrt(1 - |r|^2) colours white noise with covariance T, and T^{-1} is tridiagonal.
// Both give O(n) products where the dense square root and filter cost O(n^2).
class ar1_operator
{
public:
    // Coefficient r when T equals build_exponential(r, n) to within tol, else nothing.
    static std::optional<ar1_operator> detect(const correlation_matrix &T, double tol = 1e-12)
    {
        const Eigen::Index n = T.dim();
        const cplx r = n > 1 ? T(0, 1) : cplx(0.0, 0.0);
        if (!(std::abs(r) < 1.0))
            return std::nullopt;
        cplx power = 1.0;
        for (Eigen::Index d = 0; d < n; ++d)
        {
            for (Eigen::Index i = 0; i + d < n; ++i)
                if (std::abs(T(i, i + d) - power) > tol)
                    return std::nullopt;
            power *= r;
        }
        return ar1_operator(r, n);
    }

    Eigen::Index dim() const { return n_; }
    cplx coefficient() const { return r_; }

    // L W with L L^H = T, column by column.
    cmat color(const cmat &W) const
    {
        if (W.rows() != n_)
            throw config_error("ar1_operator::color: row count does not match the dimension");
        const cplx rho = std::conj(r_);
        const double s = std::sqrt(1.0 - std::norm(r_));
        cmat X(n_, W.cols());
        for (Eigen::Index j = 0; j < W.cols(); ++j)
        {
            X(0, j) = W(0, j);
            for (Eigen::Index i = 1; i < n_; ++i)
                X(i, j) = rho * X(i - 1, j) + s * W(i, j);
        }
        return X;
    }

    // (c I + d T^{-1})^{-1} Y, which equals T (c T + d I)^{-1} Y. Thomas algorithm per column.
    cmat shifted_solve(double c, double d, const cmat &Y) const
    {
        if (Y.rows() != n_)
            throw config_error("ar1_operator::shifted_solve: row count does not match the dimension");
        const double s2 = 1.0 - std::norm(r_);
        // T^{-1}: diagonal (1, 1 + |r|^2, ..., 1 + |r|^2, 1) / s2, super-diagonal -r / s2.
        std::vector<double> diag(static_cast<std::size_t>(n_));
        for (Eigen::Index i = 0; i < n_; ++i)
        {
            const bool edge = i == 0 || i == n_ - 1;
            diag[static_cast<std::size_t>(i)] = c + d * (n_ == 1 ? 1.0 : (edge ? 1.0 : 1.0 + std::norm(r_)) / s2);
        }
        const cplx upper = -d * r_ / s2;
        const cplx lower = std::conj(upper);

        std::vector<cplx> pivot(static_cast<std::size_t>(n_));
        std::vector<cplx> ratio(static_cast<std::size_t>(n_));
        pivot[0] = diag[0];
        for (Eigen::Index i = 1; i < n_; ++i)
        {
            const auto u = static_cast<std::size_t>(i);
            ratio[u] = lower / pivot[u - 1];
            pivot[u] = diag[u] - ratio[u] * upper;
        }
        for (const auto &p : pivot)
            if (!(std::abs(p) > 0.0) || !std::isfinite(std::abs(p)))
                throw numerical_error("ar1_operator::shifted_solve: singular system");

        cmat Z(n_, Y.cols());
        for (Eigen::Index j = 0; j < Y.cols(); ++j)
        {
            Z(0, j) = Y(0, j);
            for (Eigen::Index i = 1; i < n_; ++i)
                Z(i, j) = Y(i, j) - ratio[static_cast<std::size_t>(i)] * Z(i - 1, j);
            Z(n_ - 1, j) /= pivot[static_cast<std::size_t>(n_ - 1)];
            for (Eigen::Index i = n_ - 2; i >= 0; --i)
                Z(i, j) = (Z(i, j) - upper * Z(i + 1, j)) / pivot[static_cast<std::size_t>(i)];
        }
        return Z;
    }

private:
    ar1_operator(cplx r, Eigen::Index n) : r_(r), n_(n) {}

    cplx r_;
    Eigen::Index n_;
};

// K antennas out of N with stride floor(N/K), starting at index 0.
struct antenna_selection
{
    Eigen::Index total = 0;
    Eigen::Index selected = 0;
    std::vector<Eigen::Index> indices;

    static antenna_selection equally_spaced(Eigen::Index N, Eigen::Index K)
    {
        if (K < 0 || N < 1 || K > N)
            throw config_error("antenna_selection: invalid selection, need 0 <= K <= N");
        antenna_selection sel{N, K, {}};
        if (K == 0)
            return sel;
        const Eigen::Index stride = N / K;
        sel.indices.reserve(static_cast<std::size_t>(K));
        for (Eigen::Index k = 0; k < K; ++k)
            sel.indices.push_back(k * stride);
        return sel;
    }
};

// Transmit-side correlation of K equally spaced RS antennas: exponential model with
// coefficient r_R^(N/K). N/K is used as a real exponent when K does not divide N.
inline correlation_matrix select_transmit_correlation(cplx r_R, Eigen::Index N, Eigen::Index K)
{
    if (K < 1 || K > N)
        throw config_error("select_transmit_correlation: invalid selection, need 1 <= K <= N");
    const double exponent = static_cast<double>(N) / static_cast<double>(K);
    const cplx r = (r_R == cplx(0.0, 0.0)) ? cplx(0.0, 0.0) : std::pow(r_R, exponent);
    return build_exponential(r, K);
}

inline correlation_matrix select_transmit_correlation(double r_R, Eigen::Index N, Eigen::Index K)
{
    if (K < 1 || K > N)
        throw config_error("select_transmit_correlation: invalid selection, need 1 <= K <= N");
    // Real branch keeps negative coefficients real for integer exponents.
    const double exponent = static_cast<double>(N) / static_cast<double>(K);
    if (r_R >= 0.0 || N % K == 0)
        return build_exponential(cplx(std::pow(r_R, exponent), 0.0), K);
    return select_transmit_correlation(cplx(r_R, 0.0), N, K);
}

} // namespace mrelay

#endif
