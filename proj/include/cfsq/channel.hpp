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

#ifndef CFSQ_CHANNEL_HPP
#define CFSQ_CHANNEL_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "cfsq/common.hpp"
#include "cfsq/scenario.hpp"

namespace cfsq
{
    enum class SubcarrierLayout
    {
        centered,  // f_p = (p - floor(P/2)) * eta
        one_sided  // f_p = p * eta
    };

    // OFDM numerology: bandwidth W, P subcarriers, spacing eta = W / P.
    class OfdmGrid
    {
    public:
        OfdmGrid(double bandwidth_hz, std::size_t num_subcarriers,
                 SubcarrierLayout layout = SubcarrierLayout::centered);

        double bandwidth() const { return bandwidth_; }
        std::size_t num_subcarriers() const { return num_subcarriers_; }
        double spacing() const { return spacing_; }
        SubcarrierLayout layout() const { return layout_; }

        // Baseband offset of subcarrier p in Hz.
        double frequency(std::size_t p) const;
        const std::vector<double> &frequencies() const { return frequencies_; }

        // Position of subcarrier p in a length-P DFT (offset / eta, wrapped to 0..P-1).
        std::size_t dft_bin(std::size_t p) const;

    private:
        double bandwidth_;
        std::size_t num_subcarriers_;
        double spacing_;
        SubcarrierLayout layout_;
        std::vector<double> frequencies_;
    };

    struct Tap
    {
        double delay_s;
        cplx gain;
    };

    // Impulse-response taps of antenna m at AP l for UE k: one (tau_{k,l,m,n},
    // alpha_{k,l,n} e^{-j 2 pi m spacing sin(theta_n) / lambda_c}) pair per path.
    std::vector<Tap> spatial_time_tap_gains(const PathSet &paths, std::size_t ue, std::size_t ap, std::size_t antenna);

    // Per-path factor form of the spatial-frequency response at an arbitrary offset f:
    //   sum_n alpha_n e^{-j2pi m D sin(theta_n)/lambda_c} e^{-j2pi f d/c} e^{-j2pi f m D sin(theta_n)/c}
    cplx spatial_frequency_response_at(const PathSet &paths, std::size_t ue, std::size_t ap, std::size_t antenna,
                                       double frequency_hz);

    cplx spatial_frequency_response(const PathSet &paths, const OfdmGrid &grid, std::size_t ue, std::size_t ap,
                                    std::size_t antenna, std::size_t subcarrier);

    // d_k(f): entry l = e^{-j 2 pi f d_{k,l} / c}.
    struct MacroSteeringVector
    {
        double frequency_hz = 0.0;
        Eigen::VectorXcd entries;
    };

    MacroSteeringVector macro_steering(const Scenario &scenario, std::size_t ue, double frequency_hz);

    // Theta_n(f) for UE k: (l, m) entry = e^{-j 2 pi (f_c + f) m D sin(theta_{k,l,n}) / c}.
    struct PhaseShiftMatrix
    {
        double frequency_hz = 0.0;
        std::size_t path = 0;
        Eigen::MatrixXcd entries; // L x M
    };

    PhaseShiftMatrix phase_shift_matrix(const PathSet &paths, std::size_t ue, std::size_t path, double frequency_hz);

    // Frequency responses of one UE indexed (AP, antenna, subcarrier).
    class ChannelTensor
    {
    public:
        ChannelTensor(std::size_t ue, std::size_t num_aps, std::size_t num_antennas, OfdmGrid grid);

        std::size_t ue() const { return ue_; }
        std::size_t num_aps() const { return num_aps_; }
        std::size_t num_antennas() const { return num_antennas_; }
        std::size_t num_subcarriers() const { return grid_.num_subcarriers(); }
        const OfdmGrid &grid() const { return grid_; }

        cplx &operator()(std::size_t ap, std::size_t antenna, std::size_t subcarrier);
        const cplx &operator()(std::size_t ap, std::size_t antenna, std::size_t subcarrier) const;

        // The M antenna responses of AP l at subcarrier p.
        Eigen::VectorXcd antenna_vector(std::size_t ap, std::size_t subcarrier) const;

        // h_k(f_p) stacked AP-major: index l * M + m.
        Eigen::VectorXcd stacked(std::size_t subcarrier) const;

        const std::vector<cplx> &data() const { return data_; }

    private:
        std::size_t index(std::size_t ap, std::size_t antenna, std::size_t subcarrier) const;

        std::size_t ue_;
        std::size_t num_aps_;
        std::size_t num_antennas_;
        OfdmGrid grid_;
        std::vector<cplx> data_; // [(l * M + m) * P + p]
    };

    // Builds the tensor from the matrix form sum_n diag(alpha_{k,n} o d_k(f)) Theta_n(f), one
    // subcarrier at a time. Summation over paths runs in index order for every entry.
    ChannelTensor assemble_channel(const PathSet &paths, const OfdmGrid &grid, std::size_t ue);

    // CSV rows (ue, ap, antenna, subcarrier, freq_offset_hz, re, im) with 17 significant digits.
    void write_channel_csv_header(std::ostream &os);
    void write_channel_csv_rows(std::ostream &os, const ChannelTensor &tensor);

    // Binary layout, all little-endian:
    //   bytes 0-3   magic "CFSQ"
    //   bytes 4-5   format version (uint16, currently 1)
    //   bytes 6-7   L (uint16)
    //   bytes 8-11  M (uint32)
    //   bytes 12-15 P (uint32)
    // followed by L*M*P pairs of float64 (re, im) ordered AP, antenna, subcarrier with the
    // subcarrier index fastest.
    void write_channel_binary(std::ostream &os, const ChannelTensor &tensor);
    ChannelTensor read_channel_binary(std::istream &is, std::size_t ue = 0, double bandwidth_hz = 0.0);

    inline constexpr std::uint16_t channel_binary_version = 1;
}

#endif
