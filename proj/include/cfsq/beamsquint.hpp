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

#ifndef CFSQ_BEAMSQUINT_HPP
#define CFSQ_BEAMSQUINT_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cfsq/channel.hpp"
#include "cfsq/common.hpp"

namespace cfsq
{
    // Normalized DFT matrix F with F(a, b) = e^{-j 2 pi a b / size} / sqrt(size).
    // Column b of sqrt(size) * F is the ULA steering vector of spatial frequency b / size,
    // so the virtual-angle image of a vector x is F^H x.
    Eigen::MatrixXcd dft_matrix(std::size_t size);

    // y = F x (adjoint = false) or y = F^H x (adjoint = true), by direct summation.
    std::vector<cplx> dft_direct(std::span<const cplx> x, bool adjoint);

    // Same transform by iterative radix-2 FFT; x.size() must be a power of two.
    std::vector<cplx> fft_radix2(std::span<const cplx> x, bool adjoint);

    // F^H x, using the FFT when the length is a power of two.
    std::vector<cplx> to_virtual_angle(std::span<const cplx> x);

    // Magnitudes over the virtual-angle grid, one row per subcarrier.
    struct VirtualAngleSpectrum
    {
        std::size_t size = 0;             // number of virtual-angle bins (M or L)
        std::vector<double> frequencies;  // baseband offset per subcarrier
        std::vector<double> magnitudes;   // [p * size + bin]
        std::vector<double> input_energy; // squared norm of the transformed vector, per subcarrier

        std::size_t num_subcarriers() const { return frequencies.size(); }
        double magnitude(std::size_t subcarrier, std::size_t bin) const { return magnitudes[subcarrier * size + bin]; }
    };

    // Antenna-domain (micro) transform of AP l, per subcarrier.
    VirtualAngleSpectrum virtual_angle_transform(const ChannelTensor &tensor, std::size_t ap);

    // AP-domain (macro) transform of the macro-steering vector d_k(f), per subcarrier.
    VirtualAngleSpectrum macro_virtual_transform(const Scenario &scenario, const OfdmGrid &grid, std::size_t ue);

    struct SquintReport
    {
        std::vector<std::size_t> peak_per_subcarrier;
        std::size_t excursion_bins = 0; // circular distance between the peaks at the two band edges
        std::vector<double> true_doas;  // reference only
    };

    std::size_t circular_bin_distance(std::size_t a, std::size_t b, std::size_t size);

    // Peak is the first bin holding the maximum magnitude.
    SquintReport squint_report(const VirtualAngleSpectrum &spectrum, std::vector<double> true_doas = {});

    // CSV columns (subcarrier, bin, magnitude).
    void write_spectrum_csv(std::ostream &os, const VirtualAngleSpectrum &spectrum);

    // {"peak_per_subcarrier": [...], "excursion_bins": n, "true_doas_rad": [...]}
    void write_squint_json(std::ostream &os, const SquintReport &report);
}

#endif
