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

#include "cfsq/beamsquint.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fmt/ranges.h>

namespace cfsq
{
    Eigen::MatrixXcd dft_matrix(std::size_t size)
    {
        if (size == 0)
            throw UsageError("DFT size must be at least 1");
        const double scale = 1.0 / std::sqrt(static_cast<double>(size));
        Eigen::MatrixXcd F(size, size);
        for (std::size_t a = 0; a < size; ++a)
            for (std::size_t b = 0; b < size; ++b)
                F(a, b) = scale * unit_phasor(static_cast<double>((a * b) % size) / static_cast<double>(size));
        return F;
    }

    std::vector<cplx> dft_direct(std::span<const cplx> x, bool adjoint)
    {
        const std::size_t n = x.size();
        if (n == 0)
            throw UsageError("DFT size must be at least 1");
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        std::vector<cplx> y(n);
        for (std::size_t b = 0; b < n; ++b)
        {
            cplx sum = 0.0;
            for (std::size_t a = 0; a < n; ++a)
            {
                const cplx w = unit_phasor(static_cast<double>((a * b) % n) / static_cast<double>(n));
                sum += (adjoint ? std::conj(w) : w) * x[a];
            }
            y[b] = scale * sum;
        }
        return y;
    }

    std::vector<cplx> fft_radix2(std::span<const cplx> x, bool adjoint)
    {
        const std::size_t n = x.size();
        if (n == 0 || !std::has_single_bit(n))
            throw UsageError("radix-2 FFT needs a power-of-two length");

        std::vector<cplx> y(x.begin(), x.end());
        const int bits = std::countr_zero(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            std::size_t r = 0;
            for (int b = 0; b < bits; ++b)
                r |= ((i >> b) & 1u) << (bits - 1 - b);
            if (r > i)
                std::swap(y[i], y[r]);
        }

        const double sign = adjoint ? 1.0 : -1.0;
        for (std::size_t len = 2; len <= n; len <<= 1)
        {
            const std::size_t half = len / 2;
            for (std::size_t start = 0; start < n; start += len)
                for (std::size_t j = 0; j < half; ++j)
                {
                    const cplx w = std::polar(1.0, sign * two_pi * static_cast<double>(j) / static_cast<double>(len));
                    const cplx u = y[start + j];
                    const cplx v = w * y[start + j + half];
                    y[start + j] = u + v;
                    y[start + j + half] = u - v;
                }
        }

        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (auto &v : y)
            v *= scale;
        return y;
    }

    std::vector<cplx> to_virtual_angle(std::span<const cplx> x)
    {
        if (std::has_single_bit(x.size()))
            return fft_radix2(x, true);
        return dft_direct(x, true);
    }

    namespace
    {
        void append_spectrum_row(VirtualAngleSpectrum &spectrum, std::span<const cplx> x)
        {
            double energy = 0.0;
            for (const auto &v : x)
                energy += std::norm(v);
            spectrum.input_energy.push_back(energy);
            for (const auto &v : to_virtual_angle(x))
                spectrum.magnitudes.push_back(std::abs(v));
        }
    }

    VirtualAngleSpectrum virtual_angle_transform(const ChannelTensor &tensor, std::size_t ap)
    {
        if (ap >= tensor.num_aps())
            throw UsageError("AP index out of range for virtual-angle transform");

        VirtualAngleSpectrum spectrum;
        spectrum.size = tensor.num_antennas();
        spectrum.frequencies = tensor.grid().frequencies();
        std::vector<cplx> column(tensor.num_antennas());
        for (std::size_t p = 0; p < tensor.num_subcarriers(); ++p)
        {
            for (std::size_t m = 0; m < tensor.num_antennas(); ++m)
                column[m] = tensor(ap, m, p);
            append_spectrum_row(spectrum, column);
        }
        return spectrum;
    }

    VirtualAngleSpectrum macro_virtual_transform(const Scenario &scenario, const OfdmGrid &grid, std::size_t ue)
    {
        VirtualAngleSpectrum spectrum;
        spectrum.size = scenario.num_aps();
        spectrum.frequencies = grid.frequencies();
        for (std::size_t p = 0; p < grid.num_subcarriers(); ++p)
        {
            const auto d = macro_steering(scenario, ue, grid.frequency(p));
            append_spectrum_row(spectrum, std::span<const cplx>(d.entries.data(), d.entries.size()));
        }
        return spectrum;
    }

    std::size_t circular_bin_distance(std::size_t a, std::size_t b, std::size_t size)
    {
        const std::size_t diff = a > b ? a - b : b - a;
        return std::min(diff, size - diff);
    }

    SquintReport squint_report(const VirtualAngleSpectrum &spectrum, std::vector<double> true_doas)
    {
        if (spectrum.num_subcarriers() == 0 || spectrum.size == 0)
            throw UsageError("squint report needs a non-empty spectrum");

        SquintReport report;
        report.true_doas = std::move(true_doas);
        for (std::size_t p = 0; p < spectrum.num_subcarriers(); ++p)
        {
            const auto row = spectrum.magnitudes.begin() + static_cast<std::ptrdiff_t>(p * spectrum.size);
            const auto peak = std::max_element(row, row + static_cast<std::ptrdiff_t>(spectrum.size));
            report.peak_per_subcarrier.push_back(static_cast<std::size_t>(peak - row));
        }
        report.excursion_bins = circular_bin_distance(report.peak_per_subcarrier.front(),
                                                      report.peak_per_subcarrier.back(), spectrum.size);
        return report;
    }

    void write_spectrum_csv(std::ostream &os, const VirtualAngleSpectrum &spectrum)
    {
        os << "subcarrier,bin,magnitude\n";
        for (std::size_t p = 0; p < spectrum.num_subcarriers(); ++p)
            for (std::size_t b = 0; b < spectrum.size; ++b)
                fmt::print(os, "{},{},{:.17g}\n", p, b, spectrum.magnitude(p, b));
    }

    void write_squint_json(std::ostream &os, const SquintReport &report)
    {
        fmt::print(os, "{{\"peak_per_subcarrier\": [{}], \"excursion_bins\": {}, \"true_doas_rad\": [{:.17g}]}}\n",
                   fmt::join(report.peak_per_subcarrier, ", "), report.excursion_bins, fmt::join(report.true_doas, ", "));
    }
}
