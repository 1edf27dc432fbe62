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

#ifndef MRELAY_ERROR_HPP
#define MRELAY_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mrelay
{

// Invalid user input: bad parameters, inconsistent dimensions, malformed config.
// The CLI maps this to exit code 1.
class config_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// A computation could not be carried out (non-PSD input, degenerate estimate,
// ill-conditioned system, non-convergence). The CLI maps this to exit code 2.
class numerical_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace mrelay

#endif
