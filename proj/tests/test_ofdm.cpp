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

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "cfsq/ofdm.hpp"
#include "cfsq/rng.hpp"
#include "test_support.hpp"

using namespace cfsq;
using namespace cfsq::testing;

namespace
{
    using CVec = Eigen::VectorXcd;
    using CMat = Eigen::MatrixXcd;

    CMat unitary_dft(std::size_t n)
    {
        CMat F(n, n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
            {
                const double ang = -2.0 * M_PI * static_cast<double>(a * b % n) / static_cast<double>(n);
                F(a, b) = std::polar(1.0 / std::sqrt(double(n)), ang);
            }
        return F;
    }

    // Reference receiver: whole-stream linear convolution as a dense Toeplitz product, then
    // per-branch CP removal, DFT, zero forcing against the sampled response and equal-gain combining.
    double reference_evm(const PathSet &paths, const OfdmGrid &grid, std::size_t cp, std::size_t S, std::uint64_t seed)
    {
        const auto &sc = paths.scenario();
        const std::size_t P = grid.num_subcarriers();
        const double W = grid.bandwidth();
        const CMat F = unitary_dft(P);

        std::vector<std::map<long long, cplx>> branches;
        long long first = std::numeric_limits<long long>::max();
        for (std::size_t l = 0; l < sc.num_aps(); ++l)
            for (std::size_t m = 0; m < sc.num_antennas(); ++m)
            {
                std::map<long long, cplx> taps;
                for (const auto &t : spatial_time_tap_gains(paths, 0, l, m))
                {
                    const long long d = std::llround(t.delay_s * W);
                    taps[d] += t.gain;
                    first = std::min(first, d);
                }
                branches.push_back(taps);
            }

        const double a = 1.0 / std::sqrt(2.0);
        const std::size_t len = S * (P + cp);
        CVec tx(len);
        std::vector<CVec> symbols;
        for (std::size_t i = 0; i < S; ++i)
        {
            RandomStream stream(derive_seed(seed, StreamTag::isi_symbols, 0, i));
            CVec s(P), bins(P);
            for (std::size_t p = 0; p < P; ++p)
            {
                const auto bits = stream.next_u64();
                s(p) = {(bits & 1u) ? a : -a, (bits & 2u) ? a : -a};
                bins(grid.dft_bin(p)) = s(p);
            }
            const CVec time = F.adjoint() * bins;
            for (std::size_t n = 0; n < cp; ++n)
                tx(i * (P + cp) + n) = time(P - cp + n);
            tx.segment(i * (P + cp) + cp, P) = time;
            symbols.push_back(s);
        }

        std::vector<CVec> rx, response;
        for (const auto &taps : branches)
        {
            CMat T = CMat::Zero(len, len);
            CVec H = CVec::Zero(P);
            for (const auto &[d, g] : taps)
            {
                const auto shift = static_cast<std::size_t>(d - first);
                for (std::size_t n = shift; n < len; ++n)
                    T(n, n - shift) += g;
                for (std::size_t b = 0; b < P; ++b)
                    H(b) += g * std::polar(1.0, -2.0 * M_PI * static_cast<double>(b * shift % P) / P);
            }
            rx.push_back(T * tx);
            response.push_back(H);
        }

        double err = 0, sig = 0;
        for (std::size_t i = 1; i < S; ++i)
        {
            CVec combined = CVec::Zero(P);
            std::vector<int> used(P, 0);
            double peak = 0;
            for (const auto &H : response)
                peak = std::max(peak, H.cwiseAbs().maxCoeff());
            for (std::size_t b = 0; b < rx.size(); ++b)
            {
                const CVec y = F * rx[b].segment(i * (P + cp) + cp, P);
                for (std::size_t k = 0; k < P; ++k)
                {
                    double strongest = 0;
                    for (const auto &H : response)
                        strongest = std::max(strongest, std::abs(H(k)));
                    if (std::abs(response[b](k)) <= 1e-12 * strongest)
                        continue;
                    combined(k) += y(k) / response[b](k);
                    ++used[k];
                }
            }
            for (std::size_t p = 0; p < P; ++p)
            {
                const auto k = grid.dft_bin(p);
                err += std::norm(combined(k) / double(used[k]) - symbols[i](p));
                sig += std::norm(symbols[i](p));
            }
        }
        return std::sqrt(err / sig);
    }
}

TEST_CASE("per-subcarrier phase shift")
{
    const auto array = half_wavelength_array(4, 28e9);
    const auto ps = single_path_set({{0, 0}}, {90, 0}, array, {0.5});
    const OfdmGrid grid(400e6, 8);

    SUBCASE("matches e^{-j 2 pi f tau}")
    {
        for (std::size_t m = 0; m < 4; ++m)
            for (std::size_t p = 0; p < 8; ++p)
            {
                const double tau = compute_delay(90.0, m, array.antenna_spacing_m, 0.5);
                const auto ref = raw_phasor(grid.frequency(p) * tau);
                CHECK(std::abs(phase_shift(ps, grid, 0, 0, m, 0, p) - ref) <= 1e-12);
            }
    }
    SUBCASE("f = 0 subcarrier has no shift")
    {
        CHECK(phase_shift(ps, grid, 0, 0, 3, 0, 4) == cplx(1.0, 0.0));
    }
    SUBCASE("bad indices")
    {
        CHECK_THROWS_AS(phase_shift(ps, grid, 0, 0, 4, 0, 0), UsageError);
        CHECK_THROWS_AS(phase_shift(ps, grid, 0, 0, 0, 1, 0), UsageError);
        CHECK_THROWS_AS(phase_shift(ps, grid, 0, 0, 0, 0, 8), UsageError);
    }
}

TEST_CASE("delay budget")
{
    SUBCASE("reference antenna at 150 m and 400 MHz")
    {
        const auto ps = single_path_set({{0, 0}}, {150, 0}, half_wavelength_array(2, 28e9), {0.3});
        const auto b = delay_budget(ps, 400e6, 0);
        CHECK(std::abs(b.at(0, 0) - 200.13845711889122975) <= 1e-12 * 200.14);
        CHECK(std::abs(b.tau_p_antenna_ignored[0] - 200.13845711889122975) <= 1e-12 * 200.14);
    }
    SUBCASE("budget equals P eta times the delay")
    {
        std::mt19937_64 rng(31);
        for (int trial = 0; trial < 30; ++trial)
        {
            auto inst = random_instance(rng);
            const auto &sc = inst.scenario;
            const auto b = delay_budget(inst.paths, inst.grid, 0);
            const double span = inst.grid.spacing() * inst.grid.num_subcarriers();
            for (std::size_t l = 0; l < sc.num_aps(); ++l)
            {
                const auto ap = inst.paths.paths(0, l);
                std::size_t strongest = 0;
                for (std::size_t n = 1; n < ap.size(); ++n)
                    if (std::abs(ap[n].gain) > std::abs(ap[strongest].gain))
                        strongest = n;
                CHECK(b.dominant_path[l] == strongest);
                for (std::size_t m = 0; m < sc.num_antennas(); ++m)
                {
                    const double tau = compute_delay(sc.distance(0, l), m, sc.array().antenna_spacing_m, ap[strongest].doa);
                    CHECK(std::abs(b.at(l, m) - span * tau) <= 1e-12 * b.at(l, m));
                    for (std::size_t n = 0; n < ap.size(); ++n)
                    {
                        const double tn = compute_delay(sc.distance(0, l), m, sc.array().antenna_spacing_m, ap[n].doa);
                        CHECK(std::abs(b.tau_p_per_path[(l * sc.num_antennas() + m) * sc.num_paths() + n] - span * tn) <=
                              1e-12 * span * tn);
                    }
                }
            }
        }
    }
    SUBCASE("zero bandwidth gives a zero budget")
    {
        const auto ps = single_path_set({{0, 0}, {10, 10}}, {150, 0}, half_wavelength_array(3, 28e9), {0.3, -0.2});
        const auto b = delay_budget(ps, 0.0, 0);
        for (double v : b.tau_p)
            CHECK(v == 0.0);
        CHECK_THROWS_AS(delay_budget(ps, -1.0, 0), ConfigError);
    }
}

TEST_CASE("minimum cyclic prefix")
{
    SUBCASE("30 m of spread at 400 MHz")
    {
        const auto ps = single_path_set({{0, 0}, {100, 0}}, {35, 0}, half_wavelength_array(1, 28e9), {0.0, 0.0});
        const auto r = min_cp(ps, OfdmGrid(400e6, 64), 0);
        CHECK(std::abs(r.cp_min_samples - 40.027691423778245949) <= 1e-12 * 40.03);
        CHECK(std::abs(r.cp_min_exact_samples - 40.027691423778245949) <= 1e-12 * 40.03);
        REQUIRE(r.per_ap.size() == 2);
        CHECK(r.per_ap[0].ap == 0);
        CHECK(r.per_ap[0].distance_m == 35.0);
        CHECK(r.per_ap[1].ap == 1);
    }
    SUBCASE("40 samples of spread is 29.9792458 m")
    {
        const auto ps = single_path_set({{0, 0}, {29.9792458, 0}}, {-50, 0}, half_wavelength_array(1, 28e9), {0.0, 0.0});
        const auto r = min_cp(ps, OfdmGrid(400e6, 64), 0);
        CHECK(std::abs(r.cp_min_samples - 40.0) <= 1e-12 * 40.0);
    }
    SUBCASE("one AP with one antenna needs no prefix")
    {
        const auto ps = single_path_set({{0, 0}}, {35, 0}, half_wavelength_array(1, 28e9), {0.4});
        const auto r = min_cp(ps, OfdmGrid(400e6, 64), 0);
        CHECK(r.cp_min_samples == 0.0);
        CHECK(r.cp_min_exact_samples == 0.0);
    }
    SUBCASE("bounds on random instances")
    {
        std::mt19937_64 rng(32);
        for (int trial = 0; trial < 200; ++trial)
        {
            auto inst = random_instance(rng);
            const auto &sc = inst.scenario;
            const auto r = min_cp(inst.paths, inst.grid, 0);
            const double W = inst.grid.bandwidth();
            const double aperture = double(sc.num_antennas() - 1) * sc.array().antenna_spacing_m * W / c0;
            CHECK(r.cp_min_samples >= 0.0);
            CHECK(r.cp_min_exact_samples >= 0.0);
            // the antenna terms move each AP's span by at most one aperture in either direction
            CHECK(std::abs(r.cp_min_exact_samples - r.cp_min_samples) <= 2.0 * aperture + 1e-9 * (1.0 + r.cp_min_samples));
            if (sc.num_antennas() == 1)
                CHECK(std::abs(r.cp_min_exact_samples - r.cp_min_samples) <= 1e-9 * (1.0 + r.cp_min_samples));
            for (std::size_t i = 1; i < r.per_ap.size(); ++i)
                CHECK(r.per_ap[i - 1].distance_m <= r.per_ap[i].distance_m);
        }
    }
    SUBCASE("AP order does not change the bound")
    {
        const auto array = half_wavelength_array(1, 28e9);
        const auto a = single_path_set({{0, 0}, {80, 5}, {-30, 40}}, {10, 10}, array, {0.1, 0.2, 0.3});
        const auto b = single_path_set({{-30, 40}, {0, 0}, {80, 5}}, {10, 10}, array, {0.3, 0.1, 0.2});
        const OfdmGrid grid(400e6, 16);
        const auto ra = min_cp(a, grid, 0), rb = min_cp(b, grid, 0);
        CHECK(ra.cp_min_samples == rb.cp_min_samples);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(ra.per_ap[i].distance_m == rb.per_ap[i].distance_m);
    }
    SUBCASE("JSON record")
    {
        const auto ps = single_path_set({{0, 0}, {100, 0}}, {35, 0}, half_wavelength_array(1, 28e9), {0.0, 0.0});
        std::ostringstream os;
        write_cp_json(os, min_cp(ps, OfdmGrid(400e6, 64), 0));
        const auto s = os.str();
        CHECK(s.find("\"cp_min_approx_samples\": 40.02769142377824") != std::string::npos);
        CHECK(s.find("\"w_hz\": 400000000") != std::string::npos);
        CHECK(s.find("\"per_ap\": [{\"ap\": 0") != std::string::npos);
    }
}

TEST_CASE("ISI simulation")
{
    SUBCASE("single tap is flat")
    {
        const auto ps = single_path_set({{0, 0}}, {37.3, 2}, half_wavelength_array(1, 28e9), {0.2}, {0.3, 0.9});
        for (std::size_t cp : {1u, 4u})
            CHECK(simulate_isi(ps, OfdmGrid(400e6, 64), 0, cp, 8, 5) < 1e-10);
    }
    SUBCASE("a prefix of ceil(exact) removes the echoes")
    {
        std::mt19937_64 rng(33);
        for (int trial = 0; trial < 10; ++trial)
        {
            const auto ps = on_grid_paths(rng, 3, 4, 2, 400e6, 50, 40);
            const OfdmGrid grid(400e6, 128);
            const auto r = min_cp(ps, grid, 0);
            const auto cp = static_cast<std::size_t>(std::ceil(r.cp_min_exact_samples));
            CHECK(simulate_isi(ps, grid, 0, cp, 6, 100 + trial) < 1e-6);
        }
    }
    SUBCASE("no prefix with 40 samples of spread")
    {
        const auto array = half_wavelength_array(1, 28e9);
        const double step = c0 / 400e6;
        const auto ps = single_path_set({{60 * step, 0}, {0, 100 * step}}, {0, 0}, array, {0.0, 0.0});
        const OfdmGrid grid(400e6, 64);
        CHECK(std::abs(min_cp(ps, grid, 0).cp_min_samples - 40.0) <= 1e-9);
        CHECK(simulate_isi(ps, grid, 0, 0, 12, 9) > 1e-2);
        CHECK(simulate_isi(ps, grid, 0, 40, 12, 9) < 1e-10);
    }
    SUBCASE("nonincreasing in the prefix length")
    {
        std::mt19937_64 rng(34);
        for (int trial = 0; trial < 8; ++trial)
        {
            const auto ps = on_grid_paths(rng, 4, 2, 3, 400e6, 30, 48);
            const OfdmGrid grid(400e6, 64);
            double prev = std::numeric_limits<double>::infinity();
            for (std::size_t cp : {0u, 8u, 16u, 32u, 48u, 64u})
            {
                const double evm = simulate_isi(ps, grid, 0, cp, 12, 7);
                CHECK(evm <= prev + 1e-8);
                prev = evm;
            }
            CHECK(prev < 1e-6);
        }
    }
    SUBCASE("agrees with a dense time-domain reference")
    {
        std::mt19937_64 rng(35);
        for (int trial = 0; trial < 6; ++trial)
        {
            const auto ps = on_grid_paths(rng, 2, 2, 2, 200e6, 5, 12);
            for (std::size_t P : {16u, 12u})
            {
                const OfdmGrid grid(200e6, P, trial % 2 ? SubcarrierLayout::one_sided : SubcarrierLayout::centered);
                for (std::size_t cp : {0u, 3u, 7u, 12u})
                {
                    const double got = simulate_isi(ps, grid, 0, cp, 5, 40 + trial);
                    const double ref = reference_evm(ps, grid, cp, 5, 40 + trial);
                    CHECK(std::abs(got - ref) <= 1e-9 * (1.0 + ref));
                }
            }
        }
    }
    SUBCASE("off-grid delays, checked against the same reference")
    {
        std::mt19937_64 rng(36);
        auto inst = random_instance(rng, InstanceLimits{3, 3, 16, 3, 1, 300e6});
        const OfdmGrid grid(std::max(inst.grid.bandwidth(), 1e7), 16);
        for (std::size_t cp : {0u, 5u, 16u})
        {
            const double got = simulate_isi(inst.paths, grid, 0, cp, 4, 77);
            CHECK(std::abs(got - reference_evm(inst.paths, grid, cp, 4, 77)) <= 1e-9 * (1.0 + got));
        }
    }
    SUBCASE("parameter errors")
    {
        const auto ps = single_path_set({{0, 0}}, {37.3, 2}, half_wavelength_array(1, 28e9), {0.2});
        CHECK_THROWS_AS(simulate_isi(ps, OfdmGrid(400e6, 16), 0, 17, 4, 1), ConfigError);
        CHECK_THROWS_AS(simulate_isi(ps, OfdmGrid(400e6, 16), 0, 4, 1, 1), ConfigError);
        CHECK_THROWS_AS(simulate_isi(ps, OfdmGrid(0.0, 16), 0, 4, 4, 1), ConfigError);
        CHECK_THROWS_AS(simulate_isi(ps.scaled(0.0), OfdmGrid(400e6, 16), 0, 4, 4, 1), DegenerateChannelError);
    }
    SUBCASE("CSV output")
    {
        std::ostringstream os;
        write_isi_csv(os, {{0, 0.5}, {8, 0.25}});
        CHECK(os.str() == "cp_len,evm\n0,0.5\n8,0.25\n");
    }
}
