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

#include "cfsq/correlation.hpp"
#include "cfsq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <fmt/ostream.h>

namespace cfsq
{
    std::string FrequencySelector::label() const
    {
        return band_average ? std::string("band-average") : std::to_string(subcarrier);
    }

    namespace
    {
        // Contribution of one trial: h h^H at the selected subcarrier or averaged over the band.
        Eigen::MatrixXcd trial_outer_product(const PathSet &paths, const OfdmGrid &grid, std::size_t ue,
                                             FrequencySelector frequency)
        {
            const auto &sc = paths.scenario();
            const std::size_t L = sc.num_aps();
            const std::size_t M = sc.num_antennas();
            if (!frequency.band_average)
            {
                const double f = grid.frequency(frequency.subcarrier);
                Eigen::VectorXcd h(L * M);
                for (std::size_t l = 0; l < L; ++l)
                    for (std::size_t m = 0; m < M; ++m)
                        h(l * M + m) = spatial_frequency_response_at(paths, ue, l, m, f);
                return h * h.adjoint();
            }

            const auto tensor = assemble_channel(paths, grid, ue);
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(L * M, L * M);
            for (std::size_t p = 0; p < grid.num_subcarriers(); ++p)
            {
                const Eigen::VectorXcd h = tensor.stacked(p);
                acc += h * h.adjoint();
            }
            return acc / static_cast<double>(grid.num_subcarriers());
        }

        struct TrialContext
        {
            const Scenario &scenario;
            const PathModel &model;
            const OfdmGrid &grid;
            std::size_t ue;
            std::uint64_t seed;
            FrequencySelector frequency;
            Expectation expectation;
        };

        Eigen::MatrixXcd pairwise_sum(const TrialContext &ctx, std::size_t first, std::size_t last)
        {
            constexpr std::size_t leaf = 16;
            if (last - first > leaf)
            {
                const std::size_t mid = first + (last - first) / 2;
                return pairwise_sum(ctx, first, mid) + pairwise_sum(ctx, mid, last);
            }

            const std::size_t dim = ctx.scenario.num_aps() * ctx.scenario.num_antennas();
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
            for (std::size_t t = first; t < last; ++t)
            {
                const auto gain_seed = derive_seed(ctx.seed, StreamTag::correlation_trial, t, 0);
                const auto doa_seed = ctx.expectation == Expectation::fixed_doas
                                          ? ctx.seed
                                          : derive_seed(ctx.seed, StreamTag::correlation_trial, t, 1);
                const auto paths = generate_paths(ctx.scenario, gain_seed, doa_seed, ctx.model);
                acc += trial_outer_product(paths, ctx.grid, ctx.ue, ctx.frequency);
            }
            return acc;
        }
    }

    CorrelationReport estimate_correlation(const Scenario &scenario, const PathModel &model, const OfdmGrid &grid,
                                           std::size_t ue, std::size_t num_trials, std::uint64_t seed,
                                           FrequencySelector frequency, Expectation expectation)
    {
        if (num_trials < 2)
            throw ConfigError("correlation.trials", "at least 2 trials are required");
        scenario.check_ue(ue);
        if (!frequency.band_average)
            grid.frequency(frequency.subcarrier); // range check

        const TrialContext ctx{scenario, model, grid, ue, seed, frequency, expectation};
        Eigen::MatrixXcd R = pairwise_sum(ctx, 0, num_trials) / static_cast<double>(num_trials);
        R = (0.5 * (R + R.adjoint())).eval();

        CorrelationReport report;
        report.num_antennas = scenario.num_antennas();
        report.micro_blocks = extract_micro_blocks(R, report.num_antennas);
        report.macro = macro_aggregate(R, report.num_antennas);
        report.full = std::move(R);
        report.num_trials = num_trials;
        report.seed = seed;
        report.frequency = frequency;
        report.expectation = expectation;
        return report;
    }

    namespace
    {
        std::size_t block_count(const Eigen::MatrixXcd &R, std::size_t num_antennas)
        {
            if (num_antennas == 0 || R.rows() != R.cols() || R.rows() == 0 ||
                static_cast<std::size_t>(R.rows()) % num_antennas != 0)
                throw UsageError("correlation matrix must be square with a side that is a multiple of M");
            return static_cast<std::size_t>(R.rows()) / num_antennas;
        }
    }

    Eigen::MatrixXcd macro_aggregate(const Eigen::MatrixXcd &R, std::size_t num_antennas)
    {
        const std::size_t L = block_count(R, num_antennas);
        const auto M = static_cast<Eigen::Index>(num_antennas);
        Eigen::MatrixXcd macro(L, L);
        for (std::size_t a = 0; a < L; ++a)
            for (std::size_t b = 0; b < L; ++b)
            {
                const auto i = static_cast<Eigen::Index>(a) * M;
                const auto j = static_cast<Eigen::Index>(b) * M;
                macro(a, b) = R.block(i, j, M, M).trace() / static_cast<double>(M);
            }
        return macro;
    }

    std::vector<Eigen::MatrixXcd> extract_micro_blocks(const Eigen::MatrixXcd &R, std::size_t num_antennas)
    {
        const std::size_t L = block_count(R, num_antennas);
        const auto M = static_cast<Eigen::Index>(num_antennas);
        std::vector<Eigen::MatrixXcd> blocks;
        for (std::size_t l = 0; l < L; ++l)
        {
            const auto i = static_cast<Eigen::Index>(l) * M;
            blocks.emplace_back(R.block(i, i, M, M));
        }
        return blocks;
    }

    Eigen::MatrixXd correlation_coefficient_map(const Eigen::MatrixXcd &R)
    {
        if (R.rows() != R.cols())
            throw UsageError("correlation matrix must be square");
        const auto n = R.rows();
        Eigen::VectorXd diag(n);
        for (Eigen::Index a = 0; a < n; ++a)
        {
            diag(a) = R(a, a).real();
            if (!(diag(a) > 0.0))
                throw DegenerateChannelError("diagonal entry " + std::to_string(a) + " of the correlation matrix is not positive");
        }

        Eigen::MatrixXd C(n, n);
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b)
                C(a, b) = a == b ? 1.0 : std::abs(R(a, b)) / std::sqrt(diag(a) * diag(b));
        return C;
    }

    double min_eigenvalue(const Eigen::MatrixXcd &R)
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(R, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    bool is_hermitian(const Eigen::MatrixXcd &R, double tolerance)
    {
        if (R.rows() != R.cols())
            return false;
        const double scale = std::max(R.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
        return (R - R.adjoint()).cwiseAbs().maxCoeff() <= tolerance * scale;
    }

    void write_complex_matrix_csv(std::ostream &os, const Eigen::MatrixXcd &R)
    {
        os << "row,col,re,im\n";
        for (Eigen::Index a = 0; a < R.rows(); ++a)
            for (Eigen::Index b = 0; b < R.cols(); ++b)
                fmt::print(os, "{},{},{:.17g},{:.17g}\n", a, b, R(a, b).real(), R(a, b).imag());
    }

    void write_real_matrix_csv(std::ostream &os, const Eigen::MatrixXd &C)
    {
        os << "row,col,value\n";
        for (Eigen::Index a = 0; a < C.rows(); ++a)
            for (Eigen::Index b = 0; b < C.cols(); ++b)
                fmt::print(os, "{},{},{:.17g}\n", a, b, C(a, b));
    }

    void write_correlation_sidecar(std::ostream &os, const CorrelationReport &report)
    {
        fmt::print(os,
                   "{{\"trials\": {}, \"seed\": {}, \"frequency_selector\": \"{}\", \"expectation\": \"{}\", "
                   "\"num_aps\": {}, \"num_antennas\": {}}}\n",
                   report.num_trials, report.seed, report.frequency.label(),
                   report.expectation == Expectation::fixed_doas ? "fixed_doas" : "gains_and_doas",
                   report.macro.rows(), report.num_antennas);
    }
}
