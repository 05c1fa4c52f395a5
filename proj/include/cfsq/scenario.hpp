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

#ifndef CFSQ_SCENARIO_HPP
#define CFSQ_SCENARIO_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cfsq/common.hpp"

namespace cfsq
{
    struct Point2
    {
        double x = 0.0; // m
        double y = 0.0; // m
    };

    // Uniform linear array shared by every AP.
    struct ArrayConfig
    {
        std::size_t num_antennas = 1;
        double antenna_spacing_m = 0.0;
        double carrier_frequency_hz = 0.0;

        double wavelength_m() const { return speed_of_light / carrier_frequency_hz; }

        // Throws ConfigError if M < 1, spacing <= 0 or f_c <= 0.
        void validate() const;
    };

    // Log-distance pathloss PL(d) = (d / d_ref)^(-exponent).
    struct PathlossModel
    {
        double reference_distance_m = 1.0;
        double exponent = 3.19;

        double gain(double distance_m) const;
    };

    // Deployment geometry. Distances are computed once at construction.
    class Scenario
    {
    public:
        // Throws ConfigError on empty lists, non-finite coordinates or zero paths,
        // GeometryError when a UE coincides with an AP.
        Scenario(std::vector<Point2> ap_positions, std::vector<Point2> ue_positions,
                 ArrayConfig array, std::size_t num_paths);

        std::size_t num_aps() const { return aps_.size(); }
        std::size_t num_ues() const { return ues_.size(); }
        std::size_t num_paths() const { return num_paths_; }
        std::size_t num_antennas() const { return array_.num_antennas; }
        const ArrayConfig &array() const { return array_; }
        const std::vector<Point2> &ap_positions() const { return aps_; }
        const std::vector<Point2> &ue_positions() const { return ues_; }

        // d_{k,l} in meters
        double distance(std::size_t ue, std::size_t ap) const;

        void check_ue(std::size_t ue) const;
        void check_ap(std::size_t ap) const;
        void check_antenna(std::size_t antenna) const;
        void check_path(std::size_t path) const;

    private:
        std::vector<Point2> aps_;
        std::vector<Point2> ues_;
        ArrayConfig array_;
        std::size_t num_paths_;
        std::vector<double> distances_; // [ue * L + ap]
    };

    struct PathEntry
    {
        cplx raw_gain;  // gain before the distance rotation
        double doa = 0; // radians
        cplx gain;      // raw_gain * e^{-j 2 pi d / lambda_c}
    };

    // Per (UE, AP) propagation paths. Immutable once built; carries a copy of the
    // scenario it was drawn for.
    class PathSet
    {
    public:
        // Builds a path set from explicit raw gains and DoAs, both laid out as
        // [(ue * L + ap) * N + path]. DoAs must lie in [-pi/2, pi/2].
        PathSet(Scenario scenario, std::vector<cplx> raw_gains, std::vector<double> doas);

        const Scenario &scenario() const { return scenario_; }

        const PathEntry &at(std::size_t ue, std::size_t ap, std::size_t path) const;
        std::span<const PathEntry> paths(std::size_t ue, std::size_t ap) const;

        // Copy with every raw gain multiplied by factor.
        PathSet scaled(cplx factor) const;

    private:
        Scenario scenario_;
        std::vector<PathEntry> entries_;
    };

    // Parameters of the stochastic path generator.
    struct PathModel
    {
        std::vector<double> power_profile{1.0}; // one weight per path, linear
        PathlossModel pathloss;
    };

    // Weights e^{-n / decay} for n = 0..count-1.
    std::vector<double> exponential_power_profile(std::size_t count, double decay);

    // Draws Rayleigh gains with E{|g_n|^2} = PL(d) * w_n and DoAs uniform on (-pi/2, pi/2).
    // Gains of pair (k, l) come from substream (seed, path_gain, k, l), DoAs from
    // (seed, path_doa, k, l).
    PathSet generate_paths(const Scenario &scenario, std::uint64_t seed, const PathModel &model);

    // Same generator with gains and DoAs drawn from independent master seeds. Holding
    // doa_seed fixed while varying gain_seed redraws the gains over frozen directions.
    PathSet generate_paths(const Scenario &scenario, std::uint64_t gain_seed, std::uint64_t doa_seed,
                           const PathModel &model);

    // tau = d / c + m * spacing * sin(theta) / c, in seconds.
    double compute_delay(double distance_m, std::size_t antenna, double spacing_m, double doa);
}

#endif
