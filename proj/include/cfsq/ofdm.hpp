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

#ifndef CFSQ_OFDM_HPP
#define CFSQ_OFDM_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "cfsq/channel.hpp"
#include "cfsq/common.hpp"
#include "cfsq/scenario.hpp"

namespace cfsq
{
    // psi = e^{-j 2 pi f (d_{k,l} / c + m D sin(theta_{k,l,n}) / c)} at the offset of subcarrier p.
    cplx phase_shift(const PathSet &paths, const OfdmGrid &grid, std::size_t ue, std::size_t ap, std::size_t antenna,
                     std::size_t path, std::size_t subcarrier);

    // Delays normalized to samples at rate W: tau^P = W (d / c + m D sin(theta) / c).
    struct DelayBudget
    {
        std::size_t ue = 0;
        double sample_rate_hz = 0.0;
        std::size_t num_aps = 0;
        std::size_t num_antennas = 0;
        std::size_t num_paths = 0;

        std::vector<std::size_t> dominant_path;    // per AP, index of max |alpha|
        std::vector<double> tau_p;                 // [l * M + m], dominant path
        std::vector<double> tau_p_per_path;        // [(l * M + m) * N + n]
        std::vector<double> tau_p_antenna_ignored; // [l] = W d_{k,l} / c

        double at(std::size_t ap, std::size_t antenna) const { return tau_p[ap * num_antennas + antenna]; }
    };

    DelayBudget delay_budget(const PathSet &paths, double sample_rate_hz, std::size_t ue);

    inline DelayBudget delay_budget(const PathSet &paths, const OfdmGrid &grid, std::size_t ue)
    {
        return delay_budget(paths, grid.bandwidth(), ue);
    }

    struct ApDelay
    {
        std::size_t ap = 0;
        double distance_m = 0.0;
        double tau_p_samples = 0.0; // antenna term ignored
    };

    struct CpReport
    {
        double cp_min_samples = 0.0;       // W |d_max - d_min| / c
        double cp_min_exact_samples = 0.0; // max - min of the dominant-path delay table
        double bandwidth_hz = 0.0;
        std::vector<ApDelay> per_ap; // sorted by distance, ascending
    };

    CpReport min_cp(const PathSet &paths, const OfdmGrid &grid, std::size_t ue);

    // {"cp_min_approx_samples", "cp_min_exact_samples", "w_hz", "per_ap": [{"ap", "distance_m", "tau_p_samples"}]}
    void write_cp_json(std::ostream &os, const CpReport &report);

    // Noise-free OFDM link over all L*M receive branches of UE k.
    //
    // QPSK data on every subcarrier, P-point IDFT, cp_len-sample cyclic prefix, then per branch
    // a convolution with the impulse response sampled at rate W (nearest-sample placement,
    // delays measured from the earliest arrival over all branches). The receiver uses the
    // same timing on every branch, drops the prefix, applies a P-point DFT, zero-forcing
    // with the sampled channel's own frequency response and equal-gain combining.
    //
    // Returns the EVM over symbols 1..num_symbols-1 (symbol 0 has no predecessor).
    double simulate_isi(const PathSet &paths, const OfdmGrid &grid, std::size_t ue, std::size_t cp_len,
                        std::size_t num_symbols, std::uint64_t seed);

    // CSV columns (cp_len, evm).
    void write_isi_csv(std::ostream &os, const std::vector<std::pair<std::size_t, double>> &sweep);
}

#endif
