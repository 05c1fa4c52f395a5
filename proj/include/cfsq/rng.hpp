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

#ifndef CFSQ_RNG_HPP
#define CFSQ_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

#include "cfsq/common.hpp"

namespace cfsq
{
    // Substream keys. A substream seed is derived from the master seed and a short
    // counter tuple that always starts with one of these tags.
    enum class StreamTag : std::uint64_t
    {
        path_gain = 1,
        path_doa = 2,
        isi_symbols = 3,
        correlation_trial = 4
    };

    // Counter-based seed derivation:
    //   h_0     = mix(master)
    //   h_{i+1} = mix(h_i ^ (c_i + (i + 1) * 0x9E3779B97F4A7C15))
    // where mix is the SplitMix64 finalizer. The result depends only on the tuple,
    // never on the order in which substreams are requested.
    std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> counters);

    std::uint64_t derive_seed(std::uint64_t master, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0);

    // Platform-independent random stream. Uniform and Gaussian variates are built from raw
    // 64-bit words so identical seeds give bit-identical draws with any standard library.
    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

        // Uniform on [0, 1) with 53 random bits.
        double uniform();

        // Uniform on the open interval (lo, hi).
        double uniform_open(double lo, double hi);

        // Circularly-symmetric complex Gaussian with E{|z|^2} = variance.
        cplx complex_gaussian(double variance);

        std::uint64_t next_u64() { return engine_(); }

    private:
        std::mt19937_64 engine_;
    };
}

#endif
