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


#ifndef MRELAY_LINALG_HPP
#define MRELAY_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "error.hpp"

namespace mrelay
{

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;

// Relative eigenvalue floor below which a Hermitian matrix is not considered PSD.
inline constexpr double psd_tolerance = 1e-10;

inline bool is_hermitian(const cmat &A, double tol = 0.0)
{
    if (A.rows() != A.cols())
        return false;
    for (Eigen::Index j = 0; j < A.cols(); ++j)
        for (Eigen::Index i = 0; i <= j; ++i)
            if (std::abs(A(i, j) - std::conj(A(j, i))) > tol)
                return false;
    return true;
}

inline bool is_real(const cmat &A)
{
    return (A.imag().array() == 0.0).all();
}

// Eigendecomposition of a Hermitian matrix, A = U diag(lambda) U^H, with lambda ascending.
// Real symmetric inputs go through the real solver, which is several times faster for
// the large exponential correlation matrices used in sweeps.
class hermitian_spectrum
{
public:
    hermitian_spectrum() = default;

    explicit hermitian_spectrum(const cmat &A)
    {
        if (A.rows() != A.cols())
            throw config_error("hermitian_spectrum: matrix is not square");
        if (A.rows() == 0)
            return;
        if (is_real(A))
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.real());
            if (es.info() != Eigen::Success)
                throw numerical_error("hermitian_spectrum: eigendecomposition failed");
            values_ = es.eigenvalues();
            vectors_ = es.eigenvectors().cast<cplx>();
        }
        else
        {
            Eigen::SelfAdjointEigenSolver<cmat> es(A);
            if (es.info() != Eigen::Success)
                throw numerical_error("hermitian_spectrum: eigendecomposition failed");
            values_ = es.eigenvalues();
            vectors_ = es.eigenvectors();
        }
    }

    Eigen::Index dim() const { return values_.size(); }
    const rvec &values() const { return values_; }
    const cmat &vectors() const { return vectors_; }

    double max_value() const { return values_.size() ? values_(values_.size() - 1) : 0.0; }
    double min_value() const { return values_.size() ? values_(0) : 0.0; }

    rvec values_desc() const { return values_.reverse(); }

    // U diag(f(lambda)) U^H
    cmat apply(const std::function<double(double)> &f) const
    {
        rvec fv(values_.size());
        for (Eigen::Index i = 0; i < values_.size(); ++i)
            fv(i) = f(values_(i));
        return vectors_ * fv.cast<cplx>().asDiagonal() * vectors_.adjoint();
    }

    // diag(U diag(f(lambda)) U^H) without forming the full matrix.
    rvec apply_diagonal(const std::function<double(double)> &f) const
    {
        const Eigen::Index n = values_.size();
        rvec fv(n);
        for (Eigen::Index i = 0; i < n; ++i)
            fv(i) = f(values_(i));
        return vectors_.cwiseAbs2() * fv;
    }

    // Throws numerical_error when the smallest eigenvalue is below -tol * max(|lambda|).
    void require_psd(const std::string &what, double tol = psd_tolerance) const
    {
        if (values_.size() == 0)
            return;
        const double scale = std::max(std::abs(min_value()), std::abs(max_value()));
        if (min_value() < -tol * scale)
            throw numerical_error(what + ": matrix is not positive semi-definite (min eigenvalue " +
                                  std::to_string(min_value()) + ", max " + std::to_string(max_value()) + ")");
    }

    bool is_psd(double tol = psd_tolerance) const
    {
        if (values_.size() == 0)
            return true;
        const double scale = std::max(std::abs(min_value()), std::abs(max_value()));
        return min_value() >= -tol * scale;
    }

    // Hermitian square root; eigenvalues within tolerance of zero are clamped.
    cmat sqrt(const std::string &what = "psd_sqrt") const
    {
        require_psd(what);
        return apply([](double v) { return std::sqrt(std::max(v, 0.0)); });
    }

private:
    rvec values_;
    cmat vectors_;
};

inline cmat psd_sqrt(const cmat &A)
{
    if (!is_hermitian(A, 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())))
        throw config_error("psd_sqrt: matrix is not Hermitian");
    return hermitian_spectrum(A).sqrt();
}

inline double frobenius_sq(const cmat &A) { return A.cwiseAbs2().sum(); }

inline double trace_real(const cmat &A) { return A.trace().real(); }

// tr(A B) for Hermitian A, B (real by construction).
inline double trace_product(const cmat &A, const cmat &B)
{
    return (A.transpose().array() * B.array()).sum().real();
}

inline rvec eigenvalues_desc(const cmat &A) { return hermitian_spectrum(A).values_desc(); }

// Largest singular value; for Hermitian input this is max |lambda|.
inline double spectral_norm(const cmat &A)
{
    if (A.size() == 0)
        return 0.0;
    if (is_hermitian(A, 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())))
    {
        const hermitian_spectrum s(A);
        return std::max(std::abs(s.min_value()), std::abs(s.max_value()));
    }
    Eigen::JacobiSVD<cmat> svd(A);
    return svd.singularValues()(0);
}

} // namespace mrelay

#endif
