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


#ifndef MRELAY_CHANNEL_HPP
#define MRELAY_CHANNEL_HPP

#include <cmath>
#include <vector>

#include "correlation.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "rng.hpp"

namespace mrelay
{

// (d_ref / d)^nu
inline double path_loss(double d_ref, double d, double nu)
{
    if (!(d_ref > 0.0) || !(d > 0.0))
        throw config_error("path_loss: invalid distance, distances must be > 0");
    if (!(nu >= 0.0))
        throw config_error("path_loss: path loss exponent must be >= 0");
    return std::pow(d_ref / d, nu);
}

// Large-scale fading of both hops: beta_k per user on the first hop, eta on the second.
struct large_scale_fading
{
    rvec betas;
    double eta = 1.0;

    large_scale_fading() = default;
    large_scale_fading(rvec b, double e) : betas(std::move(b)), eta(e)
    {
        for (Eigen::Index k = 0; k < betas.size(); ++k)
            if (!(betas(k) > 0.0) || !std::isfinite(betas(k)))
                throw config_error("large_scale_fading: every beta_k must be finite and > 0");
        if (!(eta > 0.0) || !std::isfinite(eta))
            throw config_error("large_scale_fading: eta must be finite and > 0");
    }

    static large_scale_fading from_geometry(double d_ref, const std::vector<double> &d_users, double d_rb, double nu)
    {
        rvec b(static_cast<Eigen::Index>(d_users.size()));
        for (std::size_t k = 0; k < d_users.size(); ++k)
            b(static_cast<Eigen::Index>(k)) = path_loss(d_ref, d_users[k], nu);
        return {std::move(b), path_loss(d_ref, d_rb, nu)};
    }
};

struct channel_realization
{
    cmat F; // N x K, users -> RS
    cmat G; // M x K, selected RS antennas -> BS
};

// R^{1/2} H diag(sqrt(col_scale)) with H i.i.d. CN(0,1); the generic Kronecker draw.
inline cmat draw_kronecker(const cmat &receive_sqrt, const rvec &col_scale, rng &gen)
{
    const Eigen::Index rows = receive_sqrt.rows();
    const Eigen::Index cols = col_scale.size();
    cmat H = gen.complex_gaussian(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        H.col(j) *= std::sqrt(col_scale(j));
    return receive_sqrt * H;
}

// F = T_Rr^{1/2} H_F D_F^{1/2}, with the square root precomputed by the caller.
inline cmat draw_F(const cmat &sqrt_T_Rr, const rvec &betas, rng &gen)
{
    return draw_kronecker(sqrt_T_Rr, betas, gen);
}

inline cmat draw_F(const correlation_matrix &T_Rr, const large_scale_fading &lsf, rng &gen)
{
    return draw_F(T_Rr.sqrt(), lsf.betas, gen);
}

// G = sqrt(eta) T_Br^{1/2} H_G T_Rt^{1/2}
inline cmat draw_G(double eta, const cmat &sqrt_T_Br, const cmat &sqrt_T_Rt, rng &gen)
{
    const cmat H = gen.complex_gaussian(sqrt_T_Br.cols(), sqrt_T_Rt.rows());
    return std::sqrt(eta) * (sqrt_T_Br * H * sqrt_T_Rt);
}

inline cmat draw_G(double eta, const correlation_matrix &T_Br, const correlation_matrix &T_Rt, rng &gen)
{
    return draw_G(eta, T_Br.sqrt(), T_Rt.sqrt(), gen);
}

} // namespace mrelay

#endif
