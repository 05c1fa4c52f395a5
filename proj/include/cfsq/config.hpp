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

#ifndef CFSQ_CONFIG_HPP
#define CFSQ_CONFIG_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cfsq/channel.hpp"
#include "cfsq/correlation.hpp"
#include "cfsq/scenario.hpp"

namespace cfsq
{
    // Parsed scenario file. Only the geometry, array and path keys are mandatory; the
    // remaining sections fall back to the defaults below.
    struct ScenarioDescription
    {
        std::vector<Point2> ap_positions;     // aps.positions
        std::vector<Point2> ue_positions;     // ues.positions
        std::size_t num_antennas = 1;         // array.num_antennas
        double spacing_wavelengths = 0.5;     // array.spacing_wavelengths
        double carrier_frequency_hz = 28e9;   // array.carrier_frequency_hz
        std::size_t num_paths = 1;            // paths.count
        std::vector<double> power_profile;    // paths.power_profile, or generated from paths.power_decay
        std::uint64_t seed = 0;               // paths.seed
        PathlossModel pathloss;               // pathloss.reference_distance_m, pathloss.exponent

        double bandwidth_hz = 400e6;          // ofdm.bandwidth_hz
        std::size_t num_subcarriers = 64;     // ofdm.num_subcarriers
        SubcarrierLayout layout = SubcarrierLayout::centered; // ofdm.layout: centered | one_sided

        std::size_t isi_num_symbols = 16;                       // isi.num_symbols
        std::vector<std::size_t> isi_cp_lengths{0, 8, 16, 32, 48}; // isi.cp_lengths

        std::size_t correlation_trials = 1000;                  // correlation.trials
        Expectation correlation_expectation = Expectation::gains_and_doas; // correlation.expectation
    };

    // Throws ConfigError naming the offending key.
    ScenarioDescription parse_description(const std::string &yaml_text);

    // Throws IoError if the file cannot be read, ConfigError on schema violations.
    ScenarioDescription load_description(const std::filesystem::path &path);

    // Deterministic; throws ConfigError or GeometryError.
    Scenario build_scenario(const ScenarioDescription &description);

    PathModel path_model(const ScenarioDescription &description);
    OfdmGrid ofdm_grid(const ScenarioDescription &description);
}

#endif
