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

#ifndef CFSQ_CORRELATION_HPP
#define CFSQ_CORRELATION_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfsq/channel.hpp"
#include "cfsq/scenario.hpp"

namespace cfsq
{
    // Either one reference subcarrier or the average over the band.
    struct FrequencySelector
    {
        bool band_average = false;
        std::size_t subcarrier = 0;

        static FrequencySelector average() { return {true, 0}; }
        static FrequencySelector at(std::size_t p) { return {false, p}; }

        // "band-average" or the subcarrier index
        std::string label() const;
    };

    // What the sample mean averages over.
    enum class Expectation
    {
        gains_and_doas, // both redrawn per trial
        fixed_doas      // DoAs drawn once from the master seed, gains redrawn per trial
    };

    struct CorrelationReport
    {
        Eigen::MatrixXcd full;                     // LM x LM, AP-major ordering l * M + m
        std::vector<Eigen::MatrixXcd> micro_blocks; // L diagonal M x M blocks of full
        Eigen::MatrixXcd macro;                    // L x L block traces / M
        std::size_t num_antennas = 1;
        std::size_t num_trials = 0;
        std::uint64_t seed = 0;
        FrequencySelector frequency;
        Expectation expectation = Expectation::gains_and_doas;
    };

    // Sample mean of h h^H over num_trials independent path draws on a fixed geometry,
    // Hermitian-symmetrized. Trial t draws gains from derive_seed(seed, correlation_trial, t, 0)
    // and, unless DoAs are fixed, DoAs from derive_seed(seed, correlation_trial, t, 1). The sum
    // is a fixed pairwise tree over trial indices.
    CorrelationReport estimate_correlation(const Scenario &scenario, const PathModel &model, const OfdmGrid &grid,
                                           std::size_t ue, std::size_t num_trials, std::uint64_t seed,
                                           FrequencySelector frequency,
                                           Expectation expectation = Expectation::gains_and_doas);

    // (l, l') entry = trace(R[l, l']) / M.
    Eigen::MatrixXcd macro_aggregate(const Eigen::MatrixXcd &R, std::size_t num_antennas);

    std::vector<Eigen::MatrixXcd> extract_micro_blocks(const Eigen::MatrixXcd &R, std::size_t num_antennas);

    // |R_ab| / sqrt(R_aa R_bb). Throws DegenerateChannelError on a nonpositive diagonal entry.
    Eigen::MatrixXd correlation_coefficient_map(const Eigen::MatrixXcd &R);

    inline Eigen::MatrixXd correlation_coefficient_map(const CorrelationReport &report)
    {
        return correlation_coefficient_map(report.full);
    }

    double min_eigenvalue(const Eigen::MatrixXcd &R);
    bool is_hermitian(const Eigen::MatrixXcd &R, double tolerance);

    // CSV (row, col, re, im)
    void write_complex_matrix_csv(std::ostream &os, const Eigen::MatrixXcd &R);
    // CSV (row, col, value)
    void write_real_matrix_csv(std::ostream &os, const Eigen::MatrixXd &C);
    // {"trials", "seed", "frequency_selector", "expectation", "num_aps", "num_antennas"}
    void write_correlation_sidecar(std::ostream &os, const CorrelationReport &report);
}

#endif
