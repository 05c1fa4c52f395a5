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

#include "cfsq/ofdm.hpp"
#include "cfsq/beamsquint.hpp"
#include "cfsq/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace cfsq
{
    cplx phase_shift(const PathSet &paths, const OfdmGrid &grid, std::size_t ue, std::size_t ap, std::size_t antenna,
                     std::size_t path, std::size_t subcarrier)
    {
        const auto &sc = paths.scenario();
        sc.check_antenna(antenna);
        const double f = grid.frequency(subcarrier);
        const double d = sc.distance(ue, ap);
        const double offset = static_cast<double>(antenna) * sc.array().antenna_spacing_m * std::sin(paths.at(ue, ap, path).doa);
        return unit_phasor(f * (d / speed_of_light + offset / speed_of_light));
    }

    DelayBudget delay_budget(const PathSet &paths, double sample_rate_hz, std::size_t ue)
    {
        const auto &sc = paths.scenario();
        sc.check_ue(ue);
        if (!std::isfinite(sample_rate_hz) || sample_rate_hz < 0.0)
            throw ConfigError("ofdm.bandwidth_hz", "must be finite and nonnegative");

        DelayBudget budget;
        budget.ue = ue;
        budget.sample_rate_hz = sample_rate_hz;
        budget.num_aps = sc.num_aps();
        budget.num_antennas = sc.num_antennas();
        budget.num_paths = sc.num_paths();
        const std::size_t L = budget.num_aps, M = budget.num_antennas, N = budget.num_paths;
        const double spacing = sc.array().antenna_spacing_m;

        budget.dominant_path.resize(L);
        budget.tau_p.resize(L * M);
        budget.tau_p_per_path.resize(L * M * N);
        budget.tau_p_antenna_ignored.resize(L);
        for (std::size_t l = 0; l < L; ++l)
        {
            const auto ap_paths = paths.paths(ue, l);
            const auto strongest = std::max_element(ap_paths.begin(), ap_paths.end(), [](const auto &a, const auto &b)
                                                    { return std::abs(a.gain) < std::abs(b.gain); });
            budget.dominant_path[l] = static_cast<std::size_t>(strongest - ap_paths.begin());

            const double d = sc.distance(ue, l);
            budget.tau_p_antenna_ignored[l] = sample_rate_hz * (d / speed_of_light);
            for (std::size_t m = 0; m < M; ++m)
            {
                for (std::size_t n = 0; n < N; ++n)
                    budget.tau_p_per_path[(l * M + m) * N + n] =
                        sample_rate_hz * compute_delay(d, m, spacing, ap_paths[n].doa);
                budget.tau_p[l * M + m] = budget.tau_p_per_path[(l * M + m) * N + budget.dominant_path[l]];
            }
        }
        return budget;
    }

    CpReport min_cp(const PathSet &paths, const OfdmGrid &grid, std::size_t ue)
    {
        const auto budget = delay_budget(paths, grid, ue);
        const auto &sc = paths.scenario();

        CpReport report;
        report.bandwidth_hz = grid.bandwidth();
        for (std::size_t l = 0; l < sc.num_aps(); ++l)
            report.per_ap.push_back(ApDelay{l, sc.distance(ue, l), budget.tau_p_antenna_ignored[l]});

        // ties keep input order, so the sorted table is a deterministic function of the geometry
        std::stable_sort(report.per_ap.begin(), report.per_ap.end(),
                         [](const ApDelay &a, const ApDelay &b) { return a.distance_m < b.distance_m; });

        const double nearest = report.per_ap.front().distance_m;
        const double farthest = report.per_ap.back().distance_m;
        report.cp_min_samples = grid.bandwidth() * std::abs((farthest - nearest) / speed_of_light);

        const auto [lo, hi] = std::minmax_element(budget.tau_p.begin(), budget.tau_p.end());
        report.cp_min_exact_samples = *hi - *lo;
        return report;
    }

    void write_cp_json(std::ostream &os, const CpReport &report)
    {
        fmt::print(os, "{{\"cp_min_approx_samples\": {:.17g}, \"cp_min_exact_samples\": {:.17g}, \"w_hz\": {:.17g}, \"per_ap\": [",
                   report.cp_min_samples, report.cp_min_exact_samples, report.bandwidth_hz);
        for (std::size_t i = 0; i < report.per_ap.size(); ++i)
        {
            const auto &a = report.per_ap[i];
            fmt::print(os, "{}{{\"ap\": {}, \"distance_m\": {:.17g}, \"tau_p_samples\": {:.17g}}}", i ? ", " : "", a.ap,
                       a.distance_m, a.tau_p_samples);
        }
        os << "]}\n";
    }

    namespace
    {
        std::vector<cplx> transform(std::span<const cplx> x, bool adjoint)
        {
            if (std::has_single_bit(x.size()))
                return fft_radix2(x, adjoint);
            return dft_direct(x, adjoint);
        }

        // Sparse sampled impulse response of one receive branch.
        struct BranchChannel
        {
            std::vector<std::pair<std::size_t, cplx>> taps; // (delay in samples, gain)
            std::vector<cplx> response;                     // per DFT bin
        };
    }

    double simulate_isi(const PathSet &paths, const OfdmGrid &grid, std::size_t ue, std::size_t cp_len,
                        std::size_t num_symbols, std::uint64_t seed)
    {
        const auto &sc = paths.scenario();
        sc.check_ue(ue);
        const std::size_t P = grid.num_subcarriers();
        const double W = grid.bandwidth();
        if (!(W > 0.0))
            throw ConfigError("ofdm.bandwidth_hz", "ISI simulation needs a positive sample rate");
        if (cp_len > P)
            throw ConfigError("isi.cp_lengths", "cyclic prefix of " + std::to_string(cp_len) +
                                                    " samples exceeds the symbol length " + std::to_string(P));
        if (num_symbols < 2)
            throw ConfigError("isi.num_symbols", "at least 2 symbols are required");

        const std::size_t L = sc.num_aps();
        const std::size_t M = sc.num_antennas();

        // Tap placement relative to the earliest arrival over every branch.
        std::vector<std::vector<Tap>> branch_taps;
        long long earliest = std::numeric_limits<long long>::max();
        for (std::size_t l = 0; l < L; ++l)
            for (std::size_t m = 0; m < M; ++m)
            {
                branch_taps.push_back(spatial_time_tap_gains(paths, ue, l, m));
                for (const auto &tap : branch_taps.back())
                    earliest = std::min(earliest, std::llround(tap.delay_s * W));
            }

        std::vector<BranchChannel> branches(branch_taps.size());
        for (std::size_t b = 0; b < branch_taps.size(); ++b)
        {
            auto &ch = branches[b];
            for (const auto &tap : branch_taps[b])
            {
                const auto delay = static_cast<std::size_t>(std::llround(tap.delay_s * W) - earliest);
                auto it = std::find_if(ch.taps.begin(), ch.taps.end(), [&](const auto &t) { return t.first == delay; });
                if (it == ch.taps.end())
                    ch.taps.emplace_back(delay, tap.gain);
                else
                    it->second += tap.gain;
            }
            ch.response.assign(P, cplx(0.0));
            for (std::size_t bin = 0; bin < P; ++bin)
                for (const auto &[delay, gain] : ch.taps)
                    ch.response[bin] += gain * unit_phasor(static_cast<double>((bin * delay) % P) / static_cast<double>(P));
        }

        // Transmit stream
        const std::size_t symbol_len = P + cp_len;
        std::vector<std::vector<cplx>> data(num_symbols, std::vector<cplx>(P));
        std::vector<cplx> tx(num_symbols * symbol_len);
        const double qpsk = 1.0 / std::sqrt(2.0);
        for (std::size_t i = 0; i < num_symbols; ++i)
        {
            RandomStream stream(derive_seed(seed, StreamTag::isi_symbols, ue, i));
            std::vector<cplx> by_bin(P);
            for (std::size_t p = 0; p < P; ++p)
            {
                const std::uint64_t bits = stream.next_u64();
                data[i][p] = cplx((bits & 1u) ? qpsk : -qpsk, (bits & 2u) ? qpsk : -qpsk);
                by_bin[grid.dft_bin(p)] = data[i][p];
            }
            const auto samples = transform(by_bin, true);
            auto out = tx.begin() + static_cast<std::ptrdiff_t>(i * symbol_len);
            out = std::copy(samples.end() - static_cast<std::ptrdiff_t>(cp_len), samples.end(), out);
            std::copy(samples.begin(), samples.end(), out);
        }

        // Receive, equalize, combine
        double error_energy = 0.0;
        double signal_energy = 0.0;
        std::vector<std::vector<cplx>> equalized(branches.size());
        std::vector<cplx> window(P);
        for (std::size_t i = 1; i < num_symbols; ++i)
        {
            const std::size_t start = i * symbol_len + cp_len;
            for (std::size_t b = 0; b < branches.size(); ++b)
            {
                for (std::size_t n = 0; n < P; ++n)
                {
                    cplx acc = 0.0;
                    for (const auto &[delay, gain] : branches[b].taps)
                        if (start + n >= delay)
                            acc += gain * tx[start + n - delay];
                    window[n] = acc;
                }
                equalized[b] = transform(window, false);
            }

            for (std::size_t p = 0; p < P; ++p)
            {
                const std::size_t bin = grid.dft_bin(p);
                double strongest = 0.0;
                for (const auto &ch : branches)
                    strongest = std::max(strongest, std::abs(ch.response[bin]));
                if (!(strongest > 0.0))
                    throw DegenerateChannelError("every receive branch vanishes on subcarrier " + std::to_string(p));

                cplx combined = 0.0;
                std::size_t used = 0;
                for (std::size_t b = 0; b < branches.size(); ++b)
                {
                    const cplx h = branches[b].response[bin];
                    if (std::abs(h) <= 1e-12 * strongest)
                        continue;
                    combined += equalized[b][bin] / h;
                    ++used;
                }
                combined /= static_cast<double>(used);
                error_energy += std::norm(combined - data[i][p]);
                signal_energy += std::norm(data[i][p]);
            }
        }
        return std::sqrt(error_energy / signal_energy);
    }

    void write_isi_csv(std::ostream &os, const std::vector<std::pair<std::size_t, double>> &sweep)
    {
        os << "cp_len,evm\n";
        for (const auto &[cp, evm] : sweep)
            fmt::print(os, "{},{:.17g}\n", cp, evm);
    }
}
