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

#include "cfsq/scenario.hpp"
#include "cfsq/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace cfsq
{
    cplx unit_phasor(double cycles)
    {
        const double frac = cycles - std::floor(cycles);
        return std::polar(1.0, -two_pi * frac);
    }

    void ArrayConfig::validate() const
    {
        if (num_antennas < 1)
            throw ConfigError("array.num_antennas", "must be at least 1");
        if (!std::isfinite(antenna_spacing_m) || antenna_spacing_m <= 0.0)
            throw ConfigError("array.spacing_wavelengths", "antenna spacing must be positive and finite");
        if (!std::isfinite(carrier_frequency_hz) || carrier_frequency_hz <= 0.0)
            throw ConfigError("array.carrier_frequency_hz", "must be positive and finite");
    }

    double PathlossModel::gain(double distance_m) const
    {
        return std::pow(distance_m / reference_distance_m, -exponent);
    }

    Scenario::Scenario(std::vector<Point2> ap_positions, std::vector<Point2> ue_positions,
                       ArrayConfig array, std::size_t num_paths)
        : aps_(std::move(ap_positions)), ues_(std::move(ue_positions)), array_(array), num_paths_(num_paths)
    {
        if (aps_.empty())
            throw ConfigError("aps.positions", "at least one AP is required");
        if (ues_.empty())
            throw ConfigError("ues.positions", "at least one UE is required");
        if (num_paths_ == 0)
            throw ConfigError("paths.count", "must be at least 1");
        array_.validate();

        auto finite = [](const Point2 &p) { return std::isfinite(p.x) && std::isfinite(p.y); };
        for (std::size_t l = 0; l < aps_.size(); ++l)
            if (!finite(aps_[l]))
                throw ConfigError("aps.positions", "non-finite coordinate at index " + std::to_string(l));
        for (std::size_t k = 0; k < ues_.size(); ++k)
            if (!finite(ues_[k]))
                throw ConfigError("ues.positions", "non-finite coordinate at index " + std::to_string(k));

        distances_.resize(ues_.size() * aps_.size());
        for (std::size_t k = 0; k < ues_.size(); ++k)
            for (std::size_t l = 0; l < aps_.size(); ++l)
            {
                const double d = std::hypot(ues_[k].x - aps_[l].x, ues_[k].y - aps_[l].y);
                if (!(d > 0.0))
                    throw GeometryError("UE " + std::to_string(k) + " coincides with AP " + std::to_string(l));
                distances_[k * aps_.size() + l] = d;
            }
    }

    double Scenario::distance(std::size_t ue, std::size_t ap) const
    {
        check_ue(ue);
        check_ap(ap);
        return distances_[ue * aps_.size() + ap];
    }

    void Scenario::check_ue(std::size_t ue) const
    {
        if (ue >= ues_.size())
            throw UsageError("UE index " + std::to_string(ue) + " out of range (K = " + std::to_string(ues_.size()) + ")");
    }

    void Scenario::check_ap(std::size_t ap) const
    {
        if (ap >= aps_.size())
            throw UsageError("AP index " + std::to_string(ap) + " out of range (L = " + std::to_string(aps_.size()) + ")");
    }

    void Scenario::check_antenna(std::size_t antenna) const
    {
        if (antenna >= array_.num_antennas)
            throw UsageError("antenna index " + std::to_string(antenna) + " out of range (M = " +
                             std::to_string(array_.num_antennas) + ")");
    }

    void Scenario::check_path(std::size_t path) const
    {
        if (path >= num_paths_)
            throw UsageError("path index " + std::to_string(path) + " out of range (N = " + std::to_string(num_paths_) + ")");
    }

    PathSet::PathSet(Scenario scenario, std::vector<cplx> raw_gains, std::vector<double> doas)
        : scenario_(std::move(scenario))
    {
        const std::size_t L = scenario_.num_aps();
        const std::size_t N = scenario_.num_paths();
        const std::size_t count = scenario_.num_ues() * L * N;
        if (raw_gains.size() != count || doas.size() != count)
            throw UsageError("path set needs exactly K * L * N = " + std::to_string(count) + " gains and DoAs");

        const double lambda = scenario_.array().wavelength_m();
        entries_.resize(count);
        for (std::size_t k = 0; k < scenario_.num_ues(); ++k)
            for (std::size_t l = 0; l < L; ++l)
            {
                const cplx rotation = unit_phasor(scenario_.distance(k, l) / lambda);
                for (std::size_t n = 0; n < N; ++n)
                {
                    const std::size_t i = (k * L + l) * N + n;
                    if (!(std::abs(doas[i]) <= pi / 2.0))
                        throw UsageError("DoA must lie in [-pi/2, pi/2]");
                    entries_[i] = PathEntry{raw_gains[i], doas[i], raw_gains[i] * rotation};
                }
            }
    }

    const PathEntry &PathSet::at(std::size_t ue, std::size_t ap, std::size_t path) const
    {
        scenario_.check_path(path);
        return paths(ue, ap)[path];
    }

    std::span<const PathEntry> PathSet::paths(std::size_t ue, std::size_t ap) const
    {
        scenario_.check_ue(ue);
        scenario_.check_ap(ap);
        const std::size_t N = scenario_.num_paths();
        return std::span<const PathEntry>(entries_).subspan((ue * scenario_.num_aps() + ap) * N, N);
    }

    PathSet PathSet::scaled(cplx factor) const
    {
        std::vector<cplx> gains;
        std::vector<double> doas;
        gains.reserve(entries_.size());
        doas.reserve(entries_.size());
        for (const auto &e : entries_)
        {
            gains.push_back(e.raw_gain * factor);
            doas.push_back(e.doa);
        }
        return PathSet(scenario_, std::move(gains), std::move(doas));
    }

    std::vector<double> exponential_power_profile(std::size_t count, double decay)
    {
        if (count == 0)
            throw ConfigError("paths.count", "must be at least 1");
        if (!(decay > 0.0))
            throw ConfigError("paths.power_decay", "must be positive");
        std::vector<double> w(count);
        for (std::size_t n = 0; n < count; ++n)
            w[n] = std::exp(-static_cast<double>(n) / decay);
        return w;
    }

    PathSet generate_paths(const Scenario &scenario, std::uint64_t seed, const PathModel &model)
    {
        return generate_paths(scenario, seed, seed, model);
    }

    PathSet generate_paths(const Scenario &scenario, std::uint64_t gain_seed, std::uint64_t doa_seed,
                           const PathModel &model)
    {
        const auto &profile = model.power_profile;
        if (profile.size() != scenario.num_paths())
            throw ConfigError("paths.power_profile", "needs exactly paths.count = " +
                                                         std::to_string(scenario.num_paths()) + " entries");
        for (double w : profile)
            if (!std::isfinite(w) || w < 0.0)
                throw ConfigError("paths.power_profile", "weights must be finite and nonnegative");
        if (!(std::accumulate(profile.begin(), profile.end(), 0.0) > 0.0))
            throw ConfigError("paths.power_profile", "weights must sum to a positive value");
        if (!(model.pathloss.reference_distance_m > 0.0) || !std::isfinite(model.pathloss.reference_distance_m))
            throw ConfigError("pathloss.reference_distance_m", "must be positive and finite");
        if (!std::isfinite(model.pathloss.exponent))
            throw ConfigError("pathloss.exponent", "must be finite");

        const std::size_t K = scenario.num_ues();
        const std::size_t L = scenario.num_aps();
        const std::size_t N = scenario.num_paths();
        std::vector<cplx> gains(K * L * N);
        std::vector<double> doas(K * L * N);

        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t l = 0; l < L; ++l)
            {
                const double pl = model.pathloss.gain(scenario.distance(k, l));
                RandomStream gain_stream(derive_seed(gain_seed, StreamTag::path_gain, k, l));
                RandomStream doa_stream(derive_seed(doa_seed, StreamTag::path_doa, k, l));
                for (std::size_t n = 0; n < N; ++n)
                {
                    const std::size_t i = (k * L + l) * N + n;
                    gains[i] = gain_stream.complex_gaussian(pl * profile[n]);
                    doas[i] = doa_stream.uniform_open(-pi / 2.0, pi / 2.0);
                }
            }
        return PathSet(scenario, std::move(gains), std::move(doas));
    }

    double compute_delay(double distance_m, std::size_t antenna, double spacing_m, double doa)
    {
        if (!(distance_m > 0.0))
            throw UsageError("distance must be positive");
        return distance_m / speed_of_light + static_cast<double>(antenna) * spacing_m * std::sin(doa) / speed_of_light;
    }
}
