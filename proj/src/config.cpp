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

#include "cfsq/config.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace cfsq
{
    namespace
    {
        const std::set<std::string> known_keys{
            "aps.positions", "ues.positions", "array.num_antennas", "array.spacing_wavelengths",
            "array.carrier_frequency_hz", "paths.count", "paths.power_profile", "paths.power_decay", "paths.seed",
            "pathloss.reference_distance_m", "pathloss.exponent", "ofdm.bandwidth_hz", "ofdm.num_subcarriers",
            "ofdm.layout", "isi.num_symbols", "isi.cp_lengths", "correlation.trials", "correlation.expectation"};

        YAML::Node lookup(const YAML::Node &root, const std::string &key)
        {
            const auto dot = key.find('.');
            const YAML::Node section = root[key.substr(0, dot)];
            if (!section)
                return section;
            return section[key.substr(dot + 1)];
        }

        template <typename T>
        T scalar(const YAML::Node &node, const std::string &key)
        {
            if (!node.IsScalar())
                throw ConfigError(key, "expected a scalar value");
            try
            {
                return node.as<T>();
            }
            catch (const YAML::Exception &)
            {
                throw ConfigError(key, "cannot interpret '" + node.Scalar() + "'");
            }
        }

        template <typename T>
        T required(const YAML::Node &root, const std::string &key)
        {
            const auto node = lookup(root, key);
            if (!node)
                throw ConfigError(key, "missing required key");
            return scalar<T>(node, key);
        }

        template <typename T>
        T optional(const YAML::Node &root, const std::string &key, T fallback)
        {
            const auto node = lookup(root, key);
            return node ? scalar<T>(node, key) : fallback;
        }

        std::size_t positive_count(const YAML::Node &root, const std::string &key, std::optional<std::size_t> fallback)
        {
            const auto node = lookup(root, key);
            if (!node)
            {
                if (!fallback)
                    throw ConfigError(key, "missing required key");
                return *fallback;
            }
            const auto value = scalar<long long>(node, key);
            if (value < 1)
                throw ConfigError(key, "must be a positive integer");
            return static_cast<std::size_t>(value);
        }

        double finite_real(const YAML::Node &root, const std::string &key, std::optional<double> fallback)
        {
            const auto node = lookup(root, key);
            if (!node && !fallback)
                throw ConfigError(key, "missing required key");
            const double value = node ? scalar<double>(node, key) : *fallback;
            if (!std::isfinite(value))
                throw ConfigError(key, "must be finite");
            return value;
        }

        std::vector<Point2> positions(const YAML::Node &root, const std::string &key)
        {
            const auto node = lookup(root, key);
            if (!node)
                throw ConfigError(key, "missing required key");
            if (!node.IsSequence() || node.size() == 0)
                throw ConfigError(key, "expected a non-empty list of [x, y] pairs");
            std::vector<Point2> out;
            for (std::size_t i = 0; i < node.size(); ++i)
            {
                const auto &p = node[i];
                const std::string where = key + "[" + std::to_string(i) + "]";
                if (!p.IsSequence() || p.size() != 2)
                    throw ConfigError(where, "expected an [x, y] pair in meters");
                const Point2 point{scalar<double>(p[0], where), scalar<double>(p[1], where)};
                if (!std::isfinite(point.x) || !std::isfinite(point.y))
                    throw ConfigError(where, "coordinates must be finite");
                out.push_back(point);
            }
            return out;
        }

        template <typename T>
        std::vector<T> list(const YAML::Node &node, const std::string &key)
        {
            if (!node.IsSequence())
                throw ConfigError(key, "expected a list");
            std::vector<T> out;
            for (std::size_t i = 0; i < node.size(); ++i)
                out.push_back(scalar<T>(node[i], key + "[" + std::to_string(i) + "]"));
            return out;
        }

        void reject_unknown_keys(const YAML::Node &root)
        {
            if (!root.IsMap())
                throw ConfigError("<document>", "expected a mapping of sections");
            for (const auto &section : root)
            {
                const auto name = section.first.as<std::string>();
                if (!section.second.IsMap())
                    throw ConfigError(name, "expected a section of key/value pairs");
                for (const auto &entry : section.second)
                {
                    const auto key = name + "." + entry.first.as<std::string>();
                    if (!known_keys.contains(key))
                        throw ConfigError(key, "unknown key");
                }
            }
        }
    }

    ScenarioDescription parse_description(const std::string &yaml_text)
    {
        YAML::Node root;
        try
        {
            root = YAML::Load(yaml_text);
        }
        catch (const YAML::Exception &e)
        {
            throw ConfigError("<document>", std::string("malformed scenario file: ") + e.what());
        }
        reject_unknown_keys(root);

        ScenarioDescription d;
        d.ap_positions = positions(root, "aps.positions");
        d.ue_positions = positions(root, "ues.positions");
        d.num_antennas = positive_count(root, "array.num_antennas", std::nullopt);
        d.spacing_wavelengths = finite_real(root, "array.spacing_wavelengths", std::nullopt);
        if (!(d.spacing_wavelengths > 0.0))
            throw ConfigError("array.spacing_wavelengths", "must be positive");
        d.carrier_frequency_hz = finite_real(root, "array.carrier_frequency_hz", std::nullopt);
        if (!(d.carrier_frequency_hz > 0.0))
            throw ConfigError("array.carrier_frequency_hz", "must be positive");

        d.num_paths = positive_count(root, "paths.count", std::nullopt);
        if (const auto profile = lookup(root, "paths.power_profile"))
            d.power_profile = list<double>(profile, "paths.power_profile");
        else if (lookup(root, "paths.power_decay"))
            d.power_profile = exponential_power_profile(d.num_paths, finite_real(root, "paths.power_decay", std::nullopt));
        else
            throw ConfigError("paths.power_profile", "missing required key");
        if (d.power_profile.size() != d.num_paths)
            throw ConfigError("paths.power_profile", "needs exactly paths.count entries");
        d.seed = required<std::uint64_t>(root, "paths.seed");

        d.pathloss.reference_distance_m = finite_real(root, "pathloss.reference_distance_m", 1.0);
        if (!(d.pathloss.reference_distance_m > 0.0))
            throw ConfigError("pathloss.reference_distance_m", "must be positive");
        d.pathloss.exponent = finite_real(root, "pathloss.exponent", 3.19);

        d.bandwidth_hz = finite_real(root, "ofdm.bandwidth_hz", 400e6);
        if (d.bandwidth_hz < 0.0)
            throw ConfigError("ofdm.bandwidth_hz", "must be nonnegative");
        d.num_subcarriers = positive_count(root, "ofdm.num_subcarriers", 64);
        const auto layout = optional<std::string>(root, "ofdm.layout", "centered");
        if (layout == "centered")
            d.layout = SubcarrierLayout::centered;
        else if (layout == "one_sided")
            d.layout = SubcarrierLayout::one_sided;
        else
            throw ConfigError("ofdm.layout", "expected 'centered' or 'one_sided'");

        d.isi_num_symbols = positive_count(root, "isi.num_symbols", 16);
        if (d.isi_num_symbols < 2)
            throw ConfigError("isi.num_symbols", "at least 2 symbols are required");
        if (const auto cps = lookup(root, "isi.cp_lengths"))
        {
            d.isi_cp_lengths.clear();
            for (long long v : list<long long>(cps, "isi.cp_lengths"))
            {
                if (v < 0)
                    throw ConfigError("isi.cp_lengths", "entries must be nonnegative");
                d.isi_cp_lengths.push_back(static_cast<std::size_t>(v));
            }
        }

        d.correlation_trials = positive_count(root, "correlation.trials", 1000);
        if (d.correlation_trials < 2)
            throw ConfigError("correlation.trials", "at least 2 trials are required");
        const auto expectation = optional<std::string>(root, "correlation.expectation", "gains_and_doas");
        if (expectation == "gains_and_doas")
            d.correlation_expectation = Expectation::gains_and_doas;
        else if (expectation == "fixed_doas")
            d.correlation_expectation = Expectation::fixed_doas;
        else
            throw ConfigError("correlation.expectation", "expected 'gains_and_doas' or 'fixed_doas'");

        return d;
    }

    ScenarioDescription load_description(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
            throw IoError("cannot open scenario file " + path.string());
        std::ostringstream text;
        text << in.rdbuf();
        return parse_description(text.str());
    }

    Scenario build_scenario(const ScenarioDescription &description)
    {
        ArrayConfig array;
        array.num_antennas = description.num_antennas;
        array.carrier_frequency_hz = description.carrier_frequency_hz;
        if (!(description.carrier_frequency_hz > 0.0))
            throw ConfigError("array.carrier_frequency_hz", "must be positive");
        array.antenna_spacing_m = description.spacing_wavelengths * array.wavelength_m();
        return Scenario(description.ap_positions, description.ue_positions, array, description.num_paths);
    }

    PathModel path_model(const ScenarioDescription &description)
    {
        return PathModel{description.power_profile, description.pathloss};
    }

    OfdmGrid ofdm_grid(const ScenarioDescription &description)
    {
        return OfdmGrid(description.bandwidth_hz, description.num_subcarriers, description.layout);
    }
}
