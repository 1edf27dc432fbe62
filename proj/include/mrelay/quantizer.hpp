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


#ifndef MRELAY_QUANTIZER_HPP
#define MRELAY_QUANTIZER_HPP

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mrelay
{

// Normalized MMSE distortion of the optimal non-uniform quantizer of a unit Gaussian,
// resolutions 1..5 bits.
inline constexpr std::array<double, 5> distortion_table = {0.3634, 0.1175, 0.03454, 0.009497, 0.002499};

// Distortion factor rho for q bits; std::nullopt denotes an ideal (infinite-resolution) ADC.
// q <= 5 uses the table, q >= 6 the high-resolution approximation (sqrt(3) pi / 2) 2^(-2q).
inline double distortion_factor(std::optional<int> bits)
{
    if (!bits)
        return 0.0;
    const int q = *bits;
    if (q <= 0)
        throw config_error("distortion_factor: invalid resolution " + std::to_string(q) + ", bits must be >= 1");
    if (q <= 5)
        return distortion_table[static_cast<std::size_t>(q - 1)];
    return std::sqrt(3.0) * std::numbers::pi / 2.0 * std::ldexp(1.0, -2 * q);
}

// AQNM description of one ADC bank: Q(y) ~ alpha y + n_q, alpha = 1 - rho.
struct adc_spec
{
    std::optional<int> bits; // nullopt: ideal ADC
    double rho = 0.0;
    double alpha = 1.0;

    static adc_spec ideal() { return {}; }

    static adc_spec with_bits(std::optional<int> q)
    {
        const double rho = distortion_factor(q);
        return {q, rho, 1.0 - rho};
    }

    bool is_ideal() const { return !bits.has_value(); }

    std::string label() const { return bits ? std::to_string(*bits) : std::string("ideal"); }

    bool operator==(const adc_spec &) const = default;
};

// alpha y + n_q, with n_q ~ CN(0, alpha (1 - alpha) v_i) independent per element, v being the
// per-element variance of y conditioned on the current channel realization.
inline cvec aqnm_quantize(const cvec &y, const adc_spec &adc, std::span<const double> signal_variance, rng &gen)
{
    if (static_cast<std::size_t>(y.size()) != signal_variance.size())
        throw config_error("aqnm_quantize: variance vector length does not match the signal");
    for (double v : signal_variance)
        if (v < 0.0 || !std::isfinite(v))
            throw config_error("aqnm_quantize: invalid covariance, variances must be finite and >= 0");
    if (adc.is_ideal())
        return y;

    const double scale = adc.alpha * (1.0 - adc.alpha);
    cvec out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        out(i) = adc.alpha * y(i) + gen.complex_normal(scale * signal_variance[static_cast<std::size_t>(i)]);
    return out;
}

// Matrix form: quantizes every entry of Y with its own variance (same shape as Y).
inline cmat aqnm_quantize(const cmat &Y, const adc_spec &adc, const Eigen::MatrixXd &signal_variance, rng &gen)
{
    if (Y.rows() != signal_variance.rows() || Y.cols() != signal_variance.cols())
        throw config_error("aqnm_quantize: variance matrix shape does not match the signal");
    if ((signal_variance.array() < 0.0).any() || !signal_variance.allFinite())
        throw config_error("aqnm_quantize: invalid covariance, variances must be finite and >= 0");
    if (adc.is_ideal())
        return Y;

    const double scale = adc.alpha * (1.0 - adc.alpha);
    cmat out(Y.rows(), Y.cols());
    for (Eigen::Index j = 0; j < Y.cols(); ++j)
        for (Eigen::Index i = 0; i < Y.rows(); ++i)
            out(i, j) = adc.alpha * Y(i, j) + gen.complex_normal(scale * signal_variance(i, j));
    return out;
}

namespace detail
{
inline double gauss_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double gauss_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
} // namespace detail

struct lloyd_max_result
{
    double distortion = 0.0;
    std::vector<double> levels;
    std::vector<double> thresholds;
    int iterations = 0;
};

// Lloyd-Max fixed-point iteration for a 2^q level quantizer of a real N(0,1) source,
// iterated until the largest centroid shift drops below `tolerance`.
inline lloyd_max_result lloyd_max(int q, double tolerance = 1e-10, int max_iterations = 10000)
{
    if (q < 1 || q > 5)
        throw config_error("lloyd_max_distortion: resolution must be within 1..5 bits");
    const std::size_t L = std::size_t{1} << q;

    // Uniform start over +-(1 + 0.6 q), close to the optimum for small q.
    const double span = 1.0 + 0.6 * q;
    std::vector<double> c(L);
    for (std::size_t i = 0; i < L; ++i)
        c[i] = -span + (2.0 * span) * (static_cast<double>(i) + 0.5) / static_cast<double>(L);

    std::vector<double> t(L + 1);
    std::vector<double> p(L);
    t.front() = -std::numeric_limits<double>::infinity();
    t.back() = std::numeric_limits<double>::infinity();

    for (int it = 1; it <= max_iterations; ++it)
    {
        for (std::size_t i = 1; i < L; ++i)
            t[i] = 0.5 * (c[i - 1] + c[i]);
        double shift = 0.0;
        for (std::size_t i = 0; i < L; ++i)
        {
            p[i] = detail::gauss_cdf(t[i + 1]) - detail::gauss_cdf(t[i]);
            const double centroid = (detail::gauss_pdf(t[i]) - detail::gauss_pdf(t[i + 1])) / p[i];
            shift = std::max(shift, std::abs(centroid - c[i]));
            c[i] = centroid;
        }
        if (shift < tolerance)
        {
            // Cells are unchanged by the last centroid step, so E(x - Q(x))^2 = 1 - sum p_i c_i^2.
            double energy = 0.0;
            for (std::size_t i = 0; i < L; ++i)
                energy += p[i] * c[i] * c[i];
            return {1.0 - energy, c, std::vector<double>(t.begin() + 1, t.end() - 1), it};
        }
    }
    throw numerical_error("lloyd_max_distortion: no convergence after " + std::to_string(max_iterations) +
                          " iterations");
}

inline double lloyd_max_distortion(int q) { return lloyd_max(q).distortion; }

} // namespace mrelay

#endif
