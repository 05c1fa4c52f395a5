// SPDX-License-Identifier: Apache-2.0
//
// cfsquint: spatial-wideband channel simulator for mmWave cell-free massive MIMO
// Copyright (C) 2026 The cfsquint Authors
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

#ifndef CFSQ_COMMON_HPP
#define CFSQ_COMMON_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace cfsq
{
    using cplx = std::complex<double>;

    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double pi = 3.141592653589793;
    inline constexpr double two_pi = 6.283185307179586;

    // Returns e^{-j 2 pi cycles}. The argument is reduced to [0, 1) cycles first so that
    // large products such as f_c * d / c keep their fractional part in full precision.
    cplx unit_phasor(double cycles);

    // Schema violation in a scenario description or an invalid parameter combination.
    class ConfigError : public std::invalid_argument
    {
    public:
        ConfigError(std::string field, const std::string &message)
            : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

        const std::string &field() const noexcept { return field_; }

    private:
        std::string field_;
    };

    // A UE and an AP share a position.
    class GeometryError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    // Index out of range or mismatched dimensions at an API call.
    class UsageError : public std::out_of_range
    {
    public:
        using std::out_of_range::out_of_range;
    };

    // A correlation matrix with a vanishing diagonal entry.
    class DegenerateChannelError : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}

#endif
