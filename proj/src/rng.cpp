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

#include "cfsq/rng.hpp"

#include <cmath>

namespace cfsq
{
    namespace
    {
        constexpr std::uint64_t golden_gamma = 0x9E3779B97F4A7C15ull;

        std::uint64_t mix64(std::uint64_t z)
        {
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            return z ^ (z >> 31);
        }
    }

    std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters)
    {
        std::uint64_t h = mix64(master);
        std::uint64_t i = 1;
        for (auto c : counters)
            h = mix64(h ^ (c + i++ * golden_gamma));
        return h;
    }

    std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t a, std::uint64_t b)
    {
        return derive_seed(master, {static_cast<std::uint64_t>(tag), a, b});
    }

    double RandomStream::uniform()
    {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double RandomStream::uniform_open(double lo, double hi)
    {
        double x = lo;
        while (x <= lo || x >= hi)
            x = lo + (hi - lo) * uniform();
        return x;
    }

    cplx RandomStream::complex_gaussian(double variance)
    {
        // Box-Muller; 1 - u lies in (0, 1] so the log is finite
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-variance * std::log(u1));
        return std::polar(r, two_pi * u2);
    }
}
