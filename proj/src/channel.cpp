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

#include "cfsq/channel.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace cfsq
{
    OfdmGrid::OfdmGrid(double bandwidth_hz, std::size_t num_subcarriers, SubcarrierLayout layout)
        : bandwidth_(bandwidth_hz), num_subcarriers_(num_subcarriers), layout_(layout)
    {
        if (!std::isfinite(bandwidth_hz) || bandwidth_hz < 0.0)
            throw ConfigError("ofdm.bandwidth_hz", "must be finite and nonnegative");
        if (num_subcarriers == 0)
            throw ConfigError("ofdm.num_subcarriers", "must be at least 1");

        spacing_ = bandwidth_ / static_cast<double>(num_subcarriers_);
        frequencies_.resize(num_subcarriers_);
        const auto half = static_cast<double>(num_subcarriers_ / 2);
        for (std::size_t p = 0; p < num_subcarriers_; ++p)
        {
            const double index = layout_ == SubcarrierLayout::centered ? static_cast<double>(p) - half
                                                                       : static_cast<double>(p);
            frequencies_[p] = index * spacing_;
        }
    }

    double OfdmGrid::frequency(std::size_t p) const
    {
        if (p >= num_subcarriers_)
            throw UsageError("subcarrier index " + std::to_string(p) + " out of range (P = " +
                             std::to_string(num_subcarriers_) + ")");
        return frequencies_[p];
    }

    std::size_t OfdmGrid::dft_bin(std::size_t p) const
    {
        if (p >= num_subcarriers_)
            throw UsageError("subcarrier index out of range");
        if (layout_ == SubcarrierLayout::one_sided)
            return p;
        const std::size_t half = num_subcarriers_ / 2;
        return (p + num_subcarriers_ - half) % num_subcarriers_;
    }

    std::vector<Tap> spatial_time_tap_gains(const PathSet &paths, std::size_t ue, std::size_t ap, std::size_t antenna)
    {
        const auto &sc = paths.scenario();
        sc.check_antenna(antenna);
        const double d = sc.distance(ue, ap);
        const double spacing = sc.array().antenna_spacing_m;
        const double lambda = sc.array().wavelength_m();
        const auto m = static_cast<double>(antenna);

        std::vector<Tap> taps;
        taps.reserve(sc.num_paths());
        for (const auto &path : paths.paths(ue, ap))
        {
            const double offset = m * spacing * std::sin(path.doa); // m D sin(theta), meters
            taps.push_back(Tap{compute_delay(d, antenna, spacing, path.doa), path.gain * unit_phasor(offset / lambda)});
        }
        return taps;
    }

    cplx spatial_frequency_response_at(const PathSet &paths, std::size_t ue, std::size_t ap, std::size_t antenna,
                                       double frequency_hz)
    {
        const auto &sc = paths.scenario();
        sc.check_antenna(antenna);
        const double d = sc.distance(ue, ap);
        const double spacing = sc.array().antenna_spacing_m;
        const double lambda = sc.array().wavelength_m();
        const auto m = static_cast<double>(antenna);

        const cplx macro = unit_phasor(frequency_hz * d / speed_of_light);
        cplx sum = 0.0;
        for (const auto &path : paths.paths(ue, ap))
        {
            const double offset = m * spacing * std::sin(path.doa);
            sum += path.gain * unit_phasor(offset / lambda) * macro * unit_phasor(frequency_hz * offset / speed_of_light);
        }
        return sum;
    }

    cplx spatial_frequency_response(const PathSet &paths, const OfdmGrid &grid, std::size_t ue, std::size_t ap,
                                    std::size_t antenna, std::size_t subcarrier)
    {
        return spatial_frequency_response_at(paths, ue, ap, antenna, grid.frequency(subcarrier));
    }

    MacroSteeringVector macro_steering(const Scenario &scenario, std::size_t ue, double frequency_hz)
    {
        scenario.check_ue(ue);
        if (!std::isfinite(frequency_hz))
            throw UsageError("frequency must be finite");
        MacroSteeringVector out{frequency_hz, Eigen::VectorXcd(scenario.num_aps())};
        for (std::size_t l = 0; l < scenario.num_aps(); ++l)
            out.entries(l) = unit_phasor(frequency_hz * scenario.distance(ue, l) / speed_of_light);
        return out;
    }

    PhaseShiftMatrix phase_shift_matrix(const PathSet &paths, std::size_t ue, std::size_t path, double frequency_hz)
    {
        const auto &sc = paths.scenario();
        sc.check_ue(ue);
        sc.check_path(path);
        const std::size_t L = sc.num_aps();
        const std::size_t M = sc.num_antennas();
        const double fc = sc.array().carrier_frequency_hz;
        const double spacing = sc.array().antenna_spacing_m;

        // f_c (1 + f / f_c) written as f_c + f
        const double total_frequency = fc + frequency_hz;
        PhaseShiftMatrix out{frequency_hz, path, Eigen::MatrixXcd(L, M)};
        for (std::size_t l = 0; l < L; ++l)
        {
            const double sin_doa = std::sin(paths.at(ue, l, path).doa);
            for (std::size_t m = 0; m < M; ++m)
                out.entries(l, m) = unit_phasor(total_frequency * static_cast<double>(m) * spacing * sin_doa / speed_of_light);
        }
        return out;
    }

    ChannelTensor::ChannelTensor(std::size_t ue, std::size_t num_aps, std::size_t num_antennas, OfdmGrid grid)
        : ue_(ue), num_aps_(num_aps), num_antennas_(num_antennas), grid_(std::move(grid)),
          data_(num_aps * num_antennas * grid_.num_subcarriers())
    {
        if (num_aps == 0 || num_antennas == 0)
            throw UsageError("channel tensor dimensions must be positive");
    }

    std::size_t ChannelTensor::index(std::size_t ap, std::size_t antenna, std::size_t subcarrier) const
    {
        if (ap >= num_aps_ || antenna >= num_antennas_ || subcarrier >= grid_.num_subcarriers())
            throw UsageError("channel tensor index out of range");
        return (ap * num_antennas_ + antenna) * grid_.num_subcarriers() + subcarrier;
    }

    cplx &ChannelTensor::operator()(std::size_t ap, std::size_t antenna, std::size_t subcarrier)
    {
        return data_[index(ap, antenna, subcarrier)];
    }

    const cplx &ChannelTensor::operator()(std::size_t ap, std::size_t antenna, std::size_t subcarrier) const
    {
        return data_[index(ap, antenna, subcarrier)];
    }

    Eigen::VectorXcd ChannelTensor::antenna_vector(std::size_t ap, std::size_t subcarrier) const
    {
        Eigen::VectorXcd v(num_antennas_);
        for (std::size_t m = 0; m < num_antennas_; ++m)
            v(m) = (*this)(ap, m, subcarrier);
        return v;
    }

    Eigen::VectorXcd ChannelTensor::stacked(std::size_t subcarrier) const
    {
        Eigen::VectorXcd v(num_aps_ * num_antennas_);
        for (std::size_t l = 0; l < num_aps_; ++l)
            for (std::size_t m = 0; m < num_antennas_; ++m)
                v(l * num_antennas_ + m) = (*this)(l, m, subcarrier);
        return v;
    }

    ChannelTensor assemble_channel(const PathSet &paths, const OfdmGrid &grid, std::size_t ue)
    {
        const auto &sc = paths.scenario();
        sc.check_ue(ue);
        const std::size_t L = sc.num_aps();
        const std::size_t M = sc.num_antennas();
        const std::size_t N = sc.num_paths();

        ChannelTensor tensor(ue, L, M, grid);
        for (std::size_t p = 0; p < grid.num_subcarriers(); ++p)
        {
            const double f = grid.frequency(p);
            const auto d = macro_steering(sc, ue, f);
            Eigen::MatrixXcd slice = Eigen::MatrixXcd::Zero(L, M);
            for (std::size_t n = 0; n < N; ++n)
            {
                Eigen::VectorXcd weights(L); // alpha_{k,n} o d_k(f)
                for (std::size_t l = 0; l < L; ++l)
                    weights(l) = paths.at(ue, l, n).gain * d.entries(l);
                slice += weights.asDiagonal() * phase_shift_matrix(paths, ue, n, f).entries;
            }
            for (std::size_t l = 0; l < L; ++l)
                for (std::size_t m = 0; m < M; ++m)
                    tensor(l, m, p) = slice(l, m);
        }
        return tensor;
    }

    void write_channel_csv_header(std::ostream &os)
    {
        os << "ue,ap,antenna,subcarrier,freq_offset_hz,re,im\n";
    }

    void write_channel_csv_rows(std::ostream &os, const ChannelTensor &tensor)
    {
        const auto &grid = tensor.grid();
        for (std::size_t l = 0; l < tensor.num_aps(); ++l)
            for (std::size_t m = 0; m < tensor.num_antennas(); ++m)
                for (std::size_t p = 0; p < tensor.num_subcarriers(); ++p)
                {
                    const cplx h = tensor(l, m, p);
                    fmt::print(os, "{},{},{},{},{:.17g},{:.17g},{:.17g}\n", tensor.ue(), l, m, p, grid.frequency(p),
                               h.real(), h.imag());
                }
    }

    namespace
    {
        template <typename T>
        void put_le(std::ostream &os, T value)
        {
            std::array<char, sizeof(T)> bytes{};
            for (std::size_t i = 0; i < sizeof(T); ++i)
                bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
            os.write(bytes.data(), bytes.size());
        }

        template <typename T>
        T get_le(std::istream &is)
        {
            std::array<unsigned char, sizeof(T)> bytes{};
            if (!is.read(reinterpret_cast<char *>(bytes.data()), bytes.size()))
                throw IoError("truncated channel binary");
            std::uint64_t v = 0;
            for (std::size_t i = 0; i < sizeof(T); ++i)
                v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
            return static_cast<T>(v);
        }

        constexpr std::array<char, 4> channel_magic{'C', 'F', 'S', 'Q'};
    }

    void write_channel_binary(std::ostream &os, const ChannelTensor &tensor)
    {
        if (tensor.num_aps() > std::numeric_limits<std::uint16_t>::max() ||
            tensor.num_antennas() > std::numeric_limits<std::uint32_t>::max() ||
            tensor.num_subcarriers() > std::numeric_limits<std::uint32_t>::max())
            throw UsageError("channel tensor too large for the binary format");

        os.write(channel_magic.data(), channel_magic.size());
        put_le<std::uint16_t>(os, channel_binary_version);
        put_le<std::uint16_t>(os, static_cast<std::uint16_t>(tensor.num_aps()));
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tensor.num_antennas()));
        put_le<std::uint32_t>(os, static_cast<std::uint32_t>(tensor.num_subcarriers()));
        for (const cplx &h : tensor.data())
        {
            put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(h.real()));
            put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(h.imag()));
        }
        if (!os)
            throw IoError("failed writing channel binary");
    }

    ChannelTensor read_channel_binary(std::istream &is, std::size_t ue, double bandwidth_hz)
    {
        std::array<char, 4> magic{};
        if (!is.read(magic.data(), magic.size()) || magic != channel_magic)
            throw IoError("not a channel binary (bad magic)");
        if (get_le<std::uint16_t>(is) != channel_binary_version)
            throw IoError("unsupported channel binary version");
        const auto L = get_le<std::uint16_t>(is);
        const auto M = get_le<std::uint32_t>(is);
        const auto P = get_le<std::uint32_t>(is);

        ChannelTensor tensor(ue, L, M, OfdmGrid(bandwidth_hz, P));
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t p = 0; p < P; ++p)
                {
                    const double re = std::bit_cast<double>(get_le<std::uint64_t>(is));
                    const double im = std::bit_cast<double>(get_le<std::uint64_t>(is));
                    tensor(l, m, p) = cplx(re, im);
                }
        return tensor;
    }
}
