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


#ifndef MRELAY_RNG_HPP
#define MRELAY_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "linalg.hpp"

namespace mrelay
{

// Tags naming the independent random matrices drawn inside one trial.
enum class stream_tag : std::uint64_t
{
    channel_F = 1,
    channel_G = 2,
    estimate_F = 3,
    error_F = 4,
    estimate_G = 5,
    error_G = 6,
    pilot_noise_F = 7,
    pilot_noise_G = 8,
    data_noise = 9,
    kappa = 10,
    lemma1 = 11,
    quantizer = 12,
    grid_point = 13,
    test = 99,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed of the substream identified by (master seed, trial index, tag). Trials own their
// substreams, so results do not depend on which worker ran which trial.
inline constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial, stream_tag tag)
{
    return splitmix64(splitmix64(splitmix64(master) ^ trial) ^ static_cast<std::uint64_t>(tag));
}

class rng
{
public:
    explicit rng(std::uint64_t seed) : engine_(seed) {}
    rng(std::uint64_t master, std::uint64_t trial, stream_tag tag) : engine_(substream_seed(master, trial, tag)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    // CN(0, variance): real and imaginary parts each N(0, variance / 2).
    cplx complex_normal(double variance = 1.0)
    {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    // rows x cols matrix with i.i.d. CN(0,1) entries, filled column-major.
    cmat complex_gaussian(Eigen::Index rows, Eigen::Index cols)
    {
        cmat X(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i)
                X(i, j) = complex_normal();
        return X;
    }

    std::mt19937_64 &engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace mrelay

#endif
