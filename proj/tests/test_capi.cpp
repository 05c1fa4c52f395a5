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

// Exercises the shared library strictly through its C interface.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cfsq.h"

namespace fs = std::filesystem;

namespace
{
    const std::string fixture = std::string(CFSQ_FIXTURE_DIR) + "/two_ap.yaml";

    struct TempDir
    {
        fs::path path;
        TempDir() : path(fs::temp_directory_path() / ("cfsq_capi_" + std::to_string(::getpid()))) { fs::create_directories(path); }
        ~TempDir() { fs::remove_all(path); }
        std::string file(const std::string &name) const { return (path / name).string(); }
    };

    std::string slurp(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    cfsq_config *load()
    {
        cfsq_config *cfg = nullptr;
        REQUIRE(cfsq_config_load(fixture.c_str(), &cfg) == CFSQ_OK);
        return cfg;
    }
}

TEST_CASE("version and error state")
{
    CHECK(std::string(cfsq_version()).size() > 0);
    cfsq_config *cfg = nullptr;
    CHECK(cfsq_config_parse("aps: {positions: []}", &cfg) == CFSQ_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(std::string(cfsq_last_error()).size() > 0);
    CHECK(std::string(cfsq_last_error_field()) == "aps.positions");
    CHECK(cfsq_config_load("/nonexistent.yaml", &cfg) == CFSQ_ERR_IO);
    CHECK(cfsq_config_load(nullptr, &cfg) == CFSQ_ERR_USAGE);
    cfsq_config_free(nullptr);
    cfsq_paths_free(nullptr);
    cfsq_channel_free(nullptr);
    cfsq_correlation_free(nullptr);
}

TEST_CASE("configuration handle")
{
    cfsq_config *cfg = load();
    cfsq_config_info info{};
    REQUIRE(cfsq_config_info_get(cfg, &info) == CFSQ_OK);
    CHECK(info.num_aps == 2);
    CHECK(info.num_ues == 1);
    CHECK(info.num_antennas == 8);
    CHECK(info.num_paths == 2);
    CHECK(info.num_subcarriers == 64);
    CHECK(info.bandwidth_hz == 400e6);
    CHECK(info.seed == 20260101u);
    CHECK(info.num_isi_cp_lengths == 5);
    CHECK(info.correlation_trials == 500);

    std::vector<size_t> cps(5);
    CHECK(cfsq_config_isi_cp_lengths(cfg, cps.data(), cps.size()) == CFSQ_OK);
    CHECK(cps == std::vector<size_t>{0, 8, 16, 32, 48});
    CHECK(cfsq_config_isi_cp_lengths(cfg, cps.data(), 2) == CFSQ_ERR_USAGE);

    double d = 0;
    CHECK(cfsq_config_distance(cfg, 0, 1, &d) == CFSQ_OK);
    CHECK(d == 65.0);
    CHECK(cfsq_config_distance(cfg, 0, 2, &d) == CFSQ_ERR_USAGE);

    CHECK(cfsq_config_set_bandwidth(cfg, 100e6) == CFSQ_OK);
    CHECK(cfsq_config_set_num_antennas(cfg, 4) == CFSQ_OK);
    CHECK(cfsq_config_set_num_aps(cfg, 1) == CFSQ_OK);
    CHECK(cfsq_config_set_seed(cfg, 5) == CFSQ_OK);
    REQUIRE(cfsq_config_info_get(cfg, &info) == CFSQ_OK);
    CHECK(info.bandwidth_hz == 100e6);
    CHECK(info.num_antennas == 4);
    CHECK(info.num_aps == 1);
    CHECK(info.seed == 5);
    CHECK(cfsq_config_set_num_aps(cfg, 3) == CFSQ_ERR_CONFIG);
    CHECK(cfsq_config_set_num_antennas(cfg, 0) == CFSQ_ERR_CONFIG);
    CHECK(cfsq_config_set_bandwidth(cfg, -1.0) == CFSQ_ERR_CONFIG);
    cfsq_config_free(cfg);

    double tau = 0;
    CHECK(cfsq_compute_delay(300.0, 4, 299792458.0 / 28e9 / 2, M_PI / 6, &tau) == CFSQ_OK);
    CHECK(std::abs(tau - 1.0007279998801704344e-6) <= 1e-12 * tau);
    CHECK(cfsq_compute_delay(0.0, 0, 0.005, 0.0, &tau) == CFSQ_ERR_USAGE);
}

TEST_CASE("geometry error code")
{
    cfsq_config *cfg = nullptr;
    REQUIRE(cfsq_config_parse(R"(
aps: {positions: [[0, 0], [5, 5]]}
ues: {positions: [[5, 5]]}
array: {num_antennas: 2, spacing_wavelengths: 0.5, carrier_frequency_hz: 28.0e9}
paths: {count: 1, power_profile: [1.0], seed: 1}
)",
                              &cfg) == CFSQ_OK);
    double d = 0;
    CHECK(cfsq_config_distance(cfg, 0, 0, &d) == CFSQ_ERR_GEOMETRY);
    cfsq_paths *paths = nullptr;
    CHECK(cfsq_paths_generate(cfg, &paths) == CFSQ_ERR_GEOMETRY);
    CHECK(paths == nullptr);
    cfsq_config_free(cfg);
}

TEST_CASE("paths, channel and derived artifacts")
{
    TempDir tmp;
    cfsq_config *cfg = load();
    cfsq_paths *paths = nullptr;
    REQUIRE(cfsq_paths_generate(cfg, &paths) == CFSQ_OK);

    cfsq_path_info pi{};
    REQUIRE(cfsq_paths_get(paths, 0, 1, 1, &pi) == CFSQ_OK);
    CHECK(std::abs(pi.doa_rad) < M_PI / 2);
    CHECK(std::hypot(pi.gain_re, pi.gain_im) == doctest::Approx(std::hypot(pi.raw_gain_re, pi.raw_gain_im)).epsilon(1e-12));
    CHECK(cfsq_paths_get(paths, 0, 1, 2, &pi) == CFSQ_ERR_USAGE);

    cfsq_channel *ch = nullptr;
    REQUIRE(cfsq_channel_assemble(paths, 0, &ch) == CFSQ_OK);
    size_t L = 0, M = 0, P = 0;
    REQUIRE(cfsq_channel_dims(ch, &L, &M, &P) == CFSQ_OK);
    CHECK(L == 2);
    CHECK(M == 8);
    CHECK(P == 64);
    for (size_t p = 0; p < P; p += 7)
    {
        double re = 0, im = 0, sre = 0, sim = 0;
        REQUIRE(cfsq_channel_get(ch, 1, 5, p, &re, &im) == CFSQ_OK);
        REQUIRE(cfsq_spatial_frequency_response(paths, 0, 1, 5, p, &sre, &sim) == CFSQ_OK);
        CHECK(std::hypot(re - sre, im - sim) <= 1e-10 * std::hypot(sre, sim));
    }
    double re, im;
    CHECK(cfsq_channel_get(ch, 2, 0, 0, &re, &im) == CFSQ_ERR_USAGE);
    CHECK(cfsq_channel_assemble(paths, 1, &ch) == CFSQ_ERR_USAGE);

    const cfsq_channel *list[] = {ch};
    CHECK(cfsq_channel_write_csv(list, 1, tmp.file("ch.csv").c_str()) == CFSQ_OK);
    CHECK(cfsq_channel_write_binary(ch, tmp.file("ch.bin").c_str()) == CFSQ_OK);
    CHECK(slurp(tmp.file("ch.bin")).size() == 16 + 16 * L * M * P);
    CHECK(cfsq_channel_write_binary(ch, (tmp.path / "missing" / "ch.bin").c_str()) == CFSQ_ERR_IO);

    size_t excursion = 99;
    CHECK(cfsq_squint_micro(paths, 0, 0, tmp.file("s.csv").c_str(), nullptr, &excursion) == CFSQ_OK);
    CHECK(excursion < 8);
    CHECK(cfsq_squint_macro(paths, 0, nullptr, tmp.file("m.json").c_str(), &excursion) == CFSQ_OK);
    CHECK(slurp(tmp.file("m.json")).find("excursion_bins") != std::string::npos);

    cfsq_cp_summary cp{};
    REQUIRE(cfsq_min_cp(paths, 0, &cp) == CFSQ_OK);
    CHECK(std::abs(cp.cp_min_approx_samples - 40.027691423778245949) <= 1e-12 * 40.03);
    CHECK(cp.cp_min_exact_samples >= cp.cp_min_approx_samples - 1.0);
    CHECK(cfsq_write_cp_report(paths, 0, tmp.file("cp.json").c_str()) == CFSQ_OK);

    const size_t cps[] = {0, 8, 16, 32, 48};
    double evm[5];
    REQUIRE(cfsq_isi_sweep(paths, 0, cps, 5, 8, 3, tmp.file("isi.csv").c_str(), evm) == CFSQ_OK);
    double single = 0;
    REQUIRE(cfsq_simulate_isi(paths, 0, 16, 8, 3, &single) == CFSQ_OK);
    CHECK(single == evm[2]);
    CHECK(evm[4] < 1e-6);
    CHECK(cfsq_simulate_isi(paths, 0, 65, 8, 3, &single) == CFSQ_ERR_CONFIG);
    CHECK(std::string(cfsq_last_error_field()) == "isi.cp_lengths");

    cfsq_channel_free(ch);
    cfsq_paths_free(paths);
    cfsq_config_free(cfg);
}

TEST_CASE("correlation handle")
{
    TempDir tmp;
    cfsq_config *cfg = load();
    cfsq_correlation *r = nullptr;
    REQUIRE(cfsq_correlation_estimate(cfg, 0, 50, 4, CFSQ_BAND_AVERAGE, CFSQ_EXPECT_GAINS_AND_DOAS, &r) == CFSQ_OK);
    size_t L = 0, M = 0;
    REQUIRE(cfsq_correlation_dims(r, &L, &M) == CFSQ_OK);
    CHECK(L == 2);
    CHECK(M == 8);
    double re = 0, im = 0, re2 = 0, im2 = 0;
    REQUIRE(cfsq_correlation_get(r, 3, 12, &re, &im) == CFSQ_OK);
    REQUIRE(cfsq_correlation_get(r, 12, 3, &re2, &im2) == CFSQ_OK);
    CHECK(re == re2);
    CHECK(im == -im2);
    CHECK(cfsq_correlation_get(r, 16, 0, &re, &im) == CFSQ_ERR_USAGE);
    REQUIRE(cfsq_correlation_macro_get(r, 1, 1, &re, &im) == CFSQ_OK);
    CHECK(re > 0.0);
    double lam = 0;
    REQUIRE(cfsq_correlation_min_eigenvalue(r, &lam) == CFSQ_OK);
    CHECK(lam >= -1e-8 * re);
    CHECK(cfsq_correlation_write(r, tmp.file("full.csv").c_str(), tmp.file("macro.csv").c_str(),
                                 tmp.file("coef.csv").c_str(), tmp.file("meta.json").c_str()) == CFSQ_OK);
    CHECK(slurp(tmp.file("full.csv")).rfind("row,col,re,im\n", 0) == 0);
    cfsq_correlation_free(r);

    CHECK(cfsq_correlation_estimate(cfg, 0, 1, 4, 0, CFSQ_EXPECT_FIXED_DOAS, &r) == CFSQ_ERR_CONFIG);
    CHECK(cfsq_correlation_estimate(cfg, 0, 10, 4, 64, CFSQ_EXPECT_FIXED_DOAS, &r) == CFSQ_ERR_USAGE);
    cfsq_config_free(cfg);
}

TEST_CASE("sha256")
{
    TempDir tmp;
    {
        std::ofstream(tmp.file("abc.txt"), std::ios::binary) << "abc";
    }
    char hex[65] = {};
    REQUIRE(cfsq_sha256_file(tmp.file("abc.txt").c_str(), hex) == CFSQ_OK);
    CHECK(std::string(hex) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(cfsq_sha256_file(tmp.file("none.txt").c_str(), hex) == CFSQ_ERR_IO);
}
