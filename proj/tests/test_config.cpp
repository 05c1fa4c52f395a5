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

#include <doctest.h>

#include <cmath>
#include <string>

#include "cfsq/config.hpp"

using namespace cfsq;

namespace
{
    const std::string minimal = R"(
aps:
  positions: [[0, 0], [100, 0]]
ues:
  positions: [[35, 0]]
array:
  num_antennas: 8
  spacing_wavelengths: 0.5
  carrier_frequency_hz: 28.0e9
paths:
  count: 2
  power_profile: [1.0, 0.5]
  seed: 42
)";

    std::string field_of(const std::string &yaml)
    {
        try
        {
            parse_description(yaml);
        }
        catch (const ConfigError &e)
        {
            return e.field();
        }
        return "<no error>";
    }

    std::string replace(std::string s, const std::string &from, const std::string &to)
    {
        const auto at = s.find(from);
        REQUIRE(at != std::string::npos);
        return s.replace(at, from.size(), to);
    }
}

TEST_CASE("scenario description")
{
    SUBCASE("minimal document with defaults")
    {
        const auto d = parse_description(minimal);
        CHECK(d.ap_positions.size() == 2);
        CHECK(d.ap_positions[1].x == 100.0);
        CHECK(d.ue_positions[0].x == 35.0);
        CHECK(d.num_antennas == 8);
        CHECK(d.num_paths == 2);
        CHECK(d.power_profile == std::vector<double>{1.0, 0.5});
        CHECK(d.seed == 42);
        CHECK(d.bandwidth_hz == 400e6);
        CHECK(d.num_subcarriers == 64);
        CHECK(d.layout == SubcarrierLayout::centered);
        CHECK(d.pathloss.reference_distance_m == 1.0);
        CHECK(d.pathloss.exponent == 3.19);
        CHECK(d.isi_cp_lengths == std::vector<std::size_t>{0, 8, 16, 32, 48});

        const auto sc = build_scenario(d);
        CHECK(sc.num_aps() == 2);
        CHECK(sc.distance(0, 1) == 65.0);
        CHECK(sc.array().antenna_spacing_m == doctest::Approx(0.5 * 299792458.0 / 28e9).epsilon(1e-15));
        CHECK(ofdm_grid(d).spacing() == 400e6 / 64);
        CHECK(path_model(d).power_profile.size() == 2);
    }
    SUBCASE("optional sections")
    {
        const auto d = parse_description(minimal + R"(
pathloss:
  reference_distance_m: 2.0
  exponent: 2.5
ofdm:
  bandwidth_hz: 1.0e8
  num_subcarriers: 32
  layout: one_sided
isi:
  num_symbols: 5
  cp_lengths: [0, 4]
correlation:
  trials: 20
  expectation: fixed_doas
)");
        CHECK(d.pathloss.exponent == 2.5);
        CHECK(d.layout == SubcarrierLayout::one_sided);
        CHECK(d.num_subcarriers == 32);
        CHECK(d.isi_num_symbols == 5);
        CHECK(d.correlation_trials == 20);
        CHECK(d.correlation_expectation == Expectation::fixed_doas);
    }
    SUBCASE("exponential decay instead of an explicit profile")
    {
        const auto d = parse_description(replace(minimal, "power_profile: [1.0, 0.5]", "power_decay: 2.0"));
        REQUIRE(d.power_profile.size() == 2);
        CHECK(d.power_profile[0] == 1.0);
        CHECK(d.power_profile[1] == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    }
}

TEST_CASE("description errors name the field")
{
    CHECK(field_of(replace(minimal, "  positions: [[35, 0]]\n", "  positions: []\n")) == "ues.positions");
    CHECK(field_of(replace(minimal, "[[0, 0], [100, 0]]", "[[0, 0], [100]]")) == "aps.positions[1]");
    CHECK(field_of(replace(minimal, "count: 2", "count: 0")) == "paths.count");
    CHECK(field_of(replace(minimal, "num_antennas: 8", "num_antennas: -1")) == "array.num_antennas");
    CHECK(field_of(replace(minimal, "spacing_wavelengths: 0.5", "spacing_wavelengths: 0")) == "array.spacing_wavelengths");
    CHECK(field_of(replace(minimal, "carrier_frequency_hz: 28.0e9", "carrier_frequency_hz: fast")) ==
          "array.carrier_frequency_hz");
    CHECK(field_of(replace(minimal, "[1.0, 0.5]", "[1.0]")) == "paths.power_profile");
    CHECK(field_of(replace(minimal, "  seed: 42\n", "")) == "paths.seed");
    CHECK(field_of(minimal + "ofdm:\n  num_subcarriers: 0\n") == "ofdm.num_subcarriers");
    CHECK(field_of(minimal + "ofdm:\n  layout: diagonal\n") == "ofdm.layout");
    CHECK(field_of(minimal + "ofdm:\n  bandwidth: 1e6\n") == "ofdm.bandwidth");
    CHECK(field_of(minimal + "extras: 1\n") == "extras");
    CHECK(field_of(minimal + "correlation:\n  trials: 1\n") == "correlation.trials");
    CHECK(field_of("aps: [") != "<no error>");
    CHECK_THROWS_AS(load_description("/nonexistent/scenario.yaml"), IoError);
}

TEST_CASE("geometry errors surface when the scenario is built")
{
    const auto d = parse_description(replace(minimal, "[[35, 0]]", "[[100, 0]]"));
    CHECK_THROWS_AS(build_scenario(d), GeometryError);
}
