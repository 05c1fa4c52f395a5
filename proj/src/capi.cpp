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

#include "cfsq.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "cfsq/beamsquint.hpp"
#include "cfsq/channel.hpp"
#include "cfsq/config.hpp"
#include "cfsq/correlation.hpp"
#include "cfsq/ofdm.hpp"
#include "cfsq/scenario.hpp"

#ifndef CFSQ_VERSION_STRING
#define CFSQ_VERSION_STRING "0.0.0"
#endif

struct cfsq_config
{
    cfsq::ScenarioDescription description;
};

struct cfsq_paths
{
    cfsq::PathSet paths;
    cfsq::OfdmGrid grid;
};

struct cfsq_channel
{
    cfsq::ChannelTensor tensor;
};

struct cfsq_correlation
{
    cfsq::CorrelationReport report;
};

namespace
{
    thread_local std::string last_error;
    thread_local std::string last_error_field;

    cfsq_status fail(cfsq_status status, std::string message, std::string field = {})
    {
        last_error = std::move(message);
        last_error_field = std::move(field);
        return status;
    }

    // Runs body and translates the library's exceptions into status codes.
    template <typename Body>
    cfsq_status guarded(Body &&body)
    {
        try
        {
            body();
            last_error.clear();
            last_error_field.clear();
            return CFSQ_OK;
        }
        catch (const cfsq::ConfigError &e)
        {
            return fail(CFSQ_ERR_CONFIG, e.what(), e.field());
        }
        catch (const cfsq::GeometryError &e)
        {
            return fail(CFSQ_ERR_GEOMETRY, e.what());
        }
        catch (const cfsq::UsageError &e)
        {
            return fail(CFSQ_ERR_USAGE, e.what());
        }
        catch (const cfsq::IoError &e)
        {
            return fail(CFSQ_ERR_IO, e.what());
        }
        catch (const cfsq::DegenerateChannelError &e)
        {
            return fail(CFSQ_ERR_DEGENERATE, e.what());
        }
        catch (const std::exception &e)
        {
            return fail(CFSQ_ERR_INTERNAL, e.what());
        }
        catch (...)
        {
            return fail(CFSQ_ERR_INTERNAL, "unknown error");
        }
    }

    template <typename... Ptrs>
    void require(const Ptrs *...ptrs)
    {
        if (((ptrs == nullptr) || ...))
            throw cfsq::UsageError("NULL argument");
    }

    // Writes via a callback into a file that is opened only when path is non-NULL.
    template <typename Writer>
    void write_file(const char *path, Writer &&writer)
    {
        if (path == nullptr)
            return;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os)
            throw cfsq::IoError(std::string("cannot open ") + path + " for writing");
        writer(os);
        os.flush();
        if (!os)
            throw cfsq::IoError(std::string("failed writing ") + path);
    }
}

const char *cfsq_version(void)
{
    return CFSQ_VERSION_STRING;
}

const char *cfsq_last_error(void)
{
    return last_error.c_str();
}

const char *cfsq_last_error_field(void)
{
    return last_error_field.c_str();
}

cfsq_status cfsq_config_load(const char *path, cfsq_config **out)
{
    return guarded([&]
                   {
        require(path, out);
        *out = new cfsq_config{cfsq::load_description(path)}; });
}

cfsq_status cfsq_config_parse(const char *yaml_text, cfsq_config **out)
{
    return guarded([&]
                   {
        require(yaml_text, out);
        *out = new cfsq_config{cfsq::parse_description(yaml_text)}; });
}

void cfsq_config_free(cfsq_config *config)
{
    delete config;
}

cfsq_status cfsq_config_info_get(const cfsq_config *config, cfsq_config_info *out)
{
    return guarded([&]
                   {
        require(config, out);
        const auto &d = config->description;
        *out = cfsq_config_info{};
        out->num_aps = d.ap_positions.size();
        out->num_ues = d.ue_positions.size();
        out->num_antennas = d.num_antennas;
        out->num_paths = d.num_paths;
        out->num_subcarriers = d.num_subcarriers;
        out->bandwidth_hz = d.bandwidth_hz;
        out->carrier_frequency_hz = d.carrier_frequency_hz;
        out->antenna_spacing_m = d.spacing_wavelengths * cfsq::speed_of_light / d.carrier_frequency_hz;
        out->seed = d.seed;
        out->isi_num_symbols = d.isi_num_symbols;
        out->num_isi_cp_lengths = d.isi_cp_lengths.size();
        out->correlation_trials = d.correlation_trials;
        out->correlation_expectation = d.correlation_expectation == cfsq::Expectation::fixed_doas
                                           ? CFSQ_EXPECT_FIXED_DOAS
                                           : CFSQ_EXPECT_GAINS_AND_DOAS; });
}

cfsq_status cfsq_config_isi_cp_lengths(const cfsq_config *config, size_t *buffer, size_t capacity)
{
    return guarded([&]
                   {
        require(config, buffer);
        const auto &cps = config->description.isi_cp_lengths;
        if (capacity < cps.size())
            throw cfsq::UsageError("buffer too small for the cp length list");
        std::copy(cps.begin(), cps.end(), buffer); });
}

cfsq_status cfsq_config_set_seed(cfsq_config *config, uint64_t seed)
{
    return guarded([&]
                   {
        require(config);
        config->description.seed = seed; });
}

cfsq_status cfsq_config_set_bandwidth(cfsq_config *config, double bandwidth_hz)
{
    return guarded([&]
                   {
        require(config);
        if (!std::isfinite(bandwidth_hz) || bandwidth_hz < 0.0)
            throw cfsq::ConfigError("bandwidth_hz", "must be finite and nonnegative");
        config->description.bandwidth_hz = bandwidth_hz; });
}

cfsq_status cfsq_config_set_num_antennas(cfsq_config *config, size_t num_antennas)
{
    return guarded([&]
                   {
        require(config);
        if (num_antennas < 1)
            throw cfsq::ConfigError("num_antennas", "must be at least 1");
        config->description.num_antennas = num_antennas; });
}

cfsq_status cfsq_config_set_num_aps(cfsq_config *config, size_t num_aps)
{
    return guarded([&]
                   {
        require(config);
        auto &aps = config->description.ap_positions;
        if (num_aps < 1 || num_aps > aps.size())
            throw cfsq::ConfigError("num_aps", fmt::format("must lie in [1, {}] (the number of listed AP positions)", aps.size()));
        aps.resize(num_aps); });
}

cfsq_status cfsq_config_distance(const cfsq_config *config, size_t ue, size_t ap, double *out_m)
{
    return guarded([&]
                   {
        require(config, out_m);
        *out_m = cfsq::build_scenario(config->description).distance(ue, ap); });
}

cfsq_status cfsq_compute_delay(double distance_m, size_t antenna, double spacing_m, double doa_rad, double *out_s)
{
    return guarded([&]
                   {
        require(out_s);
        *out_s = cfsq::compute_delay(distance_m, antenna, spacing_m, doa_rad); });
}

cfsq_status cfsq_paths_generate(const cfsq_config *config, cfsq_paths **out)
{
    return guarded([&]
                   {
        require(config, out);
        const auto &d = config->description;
        auto scenario = cfsq::build_scenario(d);
        auto paths = cfsq::generate_paths(scenario, d.seed, cfsq::path_model(d));
        *out = new cfsq_paths{std::move(paths), cfsq::ofdm_grid(d)}; });
}

void cfsq_paths_free(cfsq_paths *paths)
{
    delete paths;
}

cfsq_status cfsq_paths_get(const cfsq_paths *paths, size_t ue, size_t ap, size_t path, cfsq_path_info *out)
{
    return guarded([&]
                   {
        require(paths, out);
        const auto &e = paths->paths.at(ue, ap, path);
        *out = cfsq_path_info{e.raw_gain.real(), e.raw_gain.imag(), e.gain.real(), e.gain.imag(), e.doa}; });
}

cfsq_status cfsq_spatial_frequency_response(const cfsq_paths *paths, size_t ue, size_t ap, size_t antenna,
                                            size_t subcarrier, double *re, double *im)
{
    return guarded([&]
                   {
        require(paths, re, im);
        const auto h = cfsq::spatial_frequency_response(paths->paths, paths->grid, ue, ap, antenna, subcarrier);
        *re = h.real();
        *im = h.imag(); });
}

cfsq_status cfsq_channel_assemble(const cfsq_paths *paths, size_t ue, cfsq_channel **out)
{
    return guarded([&]
                   {
        require(paths, out);
        *out = new cfsq_channel{cfsq::assemble_channel(paths->paths, paths->grid, ue)}; });
}

void cfsq_channel_free(cfsq_channel *channel)
{
    delete channel;
}

cfsq_status cfsq_channel_dims(const cfsq_channel *channel, size_t *num_aps, size_t *num_antennas,
                              size_t *num_subcarriers)
{
    return guarded([&]
                   {
        require(channel, num_aps, num_antennas, num_subcarriers);
        *num_aps = channel->tensor.num_aps();
        *num_antennas = channel->tensor.num_antennas();
        *num_subcarriers = channel->tensor.num_subcarriers(); });
}

cfsq_status cfsq_channel_get(const cfsq_channel *channel, size_t ap, size_t antenna, size_t subcarrier, double *re,
                             double *im)
{
    return guarded([&]
                   {
        require(channel, re, im);
        const auto h = channel->tensor(ap, antenna, subcarrier);
        *re = h.real();
        *im = h.imag(); });
}

cfsq_status cfsq_channel_write_csv(const cfsq_channel *const *channels, size_t count, const char *path)
{
    return guarded([&]
                   {
        require(channels, path);
        for (size_t i = 0; i < count; ++i)
            require(channels[i]);
        write_file(path, [&](std::ostream &os)
                   {
            cfsq::write_channel_csv_header(os);
            for (size_t i = 0; i < count; ++i)
                cfsq::write_channel_csv_rows(os, channels[i]->tensor); }); });
}

cfsq_status cfsq_channel_write_binary(const cfsq_channel *channel, const char *path)
{
    return guarded([&]
                   {
        require(channel, path);
        write_file(path, [&](std::ostream &os) { cfsq::write_channel_binary(os, channel->tensor); }); });
}

namespace
{
    void emit_squint(const cfsq::VirtualAngleSpectrum &spectrum, std::vector<double> doas, const char *spectrum_csv,
                     const char *report_json, size_t *excursion_bins)
    {
        const auto report = cfsq::squint_report(spectrum, std::move(doas));
        write_file(spectrum_csv, [&](std::ostream &os) { cfsq::write_spectrum_csv(os, spectrum); });
        write_file(report_json, [&](std::ostream &os) { cfsq::write_squint_json(os, report); });
        if (excursion_bins != nullptr)
            *excursion_bins = report.excursion_bins;
    }
}

cfsq_status cfsq_squint_micro(const cfsq_paths *paths, size_t ue, size_t ap, const char *spectrum_csv,
                              const char *report_json, size_t *excursion_bins)
{
    return guarded([&]
                   {
        require(paths);
        const auto tensor = cfsq::assemble_channel(paths->paths, paths->grid, ue);
        std::vector<double> doas;
        for (const auto &e : paths->paths.paths(ue, ap))
            doas.push_back(e.doa);
        emit_squint(cfsq::virtual_angle_transform(tensor, ap), std::move(doas), spectrum_csv, report_json,
                    excursion_bins); });
}

cfsq_status cfsq_squint_macro(const cfsq_paths *paths, size_t ue, const char *spectrum_csv, const char *report_json,
                              size_t *excursion_bins)
{
    return guarded([&]
                   {
        require(paths);
        emit_squint(cfsq::macro_virtual_transform(paths->paths.scenario(), paths->grid, ue), {}, spectrum_csv,
                    report_json, excursion_bins); });
}

cfsq_status cfsq_min_cp(const cfsq_paths *paths, size_t ue, cfsq_cp_summary *out)
{
    return guarded([&]
                   {
        require(paths, out);
        const auto r = cfsq::min_cp(paths->paths, paths->grid, ue);
        *out = cfsq_cp_summary{r.cp_min_samples, r.cp_min_exact_samples, r.bandwidth_hz}; });
}

cfsq_status cfsq_write_cp_report(const cfsq_paths *paths, size_t ue, const char *json_path)
{
    return guarded([&]
                   {
        require(paths, json_path);
        const auto r = cfsq::min_cp(paths->paths, paths->grid, ue);
        write_file(json_path, [&](std::ostream &os) { cfsq::write_cp_json(os, r); }); });
}

cfsq_status cfsq_simulate_isi(const cfsq_paths *paths, size_t ue, size_t cp_len, size_t num_symbols, uint64_t seed,
                              double *evm)
{
    return guarded([&]
                   {
        require(paths, evm);
        *evm = cfsq::simulate_isi(paths->paths, paths->grid, ue, cp_len, num_symbols, seed); });
}

cfsq_status cfsq_isi_sweep(const cfsq_paths *paths, size_t ue, const size_t *cp_lengths, size_t count,
                           size_t num_symbols, uint64_t seed, const char *csv_path, double *evm_out)
{
    return guarded([&]
                   {
        require(paths);
        if (count > 0)
            require(cp_lengths);
        std::vector<std::pair<std::size_t, double>> sweep;
        for (size_t i = 0; i < count; ++i)
            sweep.emplace_back(cp_lengths[i],
                               cfsq::simulate_isi(paths->paths, paths->grid, ue, cp_lengths[i], num_symbols, seed));
        write_file(csv_path, [&](std::ostream &os) { cfsq::write_isi_csv(os, sweep); });
        if (evm_out != nullptr)
            for (size_t i = 0; i < count; ++i)
                evm_out[i] = sweep[i].second; });
}

cfsq_status cfsq_correlation_estimate(const cfsq_config *config, size_t ue, size_t num_trials, uint64_t seed,
                                      int64_t subcarrier, cfsq_expectation expectation, cfsq_correlation **out)
{
    return guarded([&]
                   {
        require(config, out);
        const auto &d = config->description;
        if (subcarrier < CFSQ_BAND_AVERAGE)
            throw cfsq::UsageError("subcarrier selector must be an index or CFSQ_BAND_AVERAGE");
        const auto selector = subcarrier == CFSQ_BAND_AVERAGE
                                  ? cfsq::FrequencySelector::average()
                                  : cfsq::FrequencySelector::at(static_cast<std::size_t>(subcarrier));
        const auto mode = expectation == CFSQ_EXPECT_FIXED_DOAS ? cfsq::Expectation::fixed_doas
                                                                : cfsq::Expectation::gains_and_doas;
        *out = new cfsq_correlation{cfsq::estimate_correlation(cfsq::build_scenario(d), cfsq::path_model(d),
                                                               cfsq::ofdm_grid(d), ue, num_trials, seed, selector,
                                                               mode)}; });
}

void cfsq_correlation_free(cfsq_correlation *correlation)
{
    delete correlation;
}

cfsq_status cfsq_correlation_dims(const cfsq_correlation *correlation, size_t *num_aps, size_t *num_antennas)
{
    return guarded([&]
                   {
        require(correlation, num_aps, num_antennas);
        *num_aps = static_cast<size_t>(correlation->report.macro.rows());
        *num_antennas = correlation->report.num_antennas; });
}

cfsq_status cfsq_correlation_get(const cfsq_correlation *correlation, size_t row, size_t col, double *re, double *im)
{
    return guarded([&]
                   {
        require(correlation, re, im);
        const auto &R = correlation->report.full;
        if (row >= static_cast<size_t>(R.rows()) || col >= static_cast<size_t>(R.cols()))
            throw cfsq::UsageError("correlation index out of range");
        *re = R(row, col).real();
        *im = R(row, col).imag(); });
}

cfsq_status cfsq_correlation_macro_get(const cfsq_correlation *correlation, size_t ap_a, size_t ap_b, double *re,
                                       double *im)
{
    return guarded([&]
                   {
        require(correlation, re, im);
        const auto &G = correlation->report.macro;
        if (ap_a >= static_cast<size_t>(G.rows()) || ap_b >= static_cast<size_t>(G.cols()))
            throw cfsq::UsageError("macro index out of range");
        *re = G(ap_a, ap_b).real();
        *im = G(ap_a, ap_b).imag(); });
}

cfsq_status cfsq_correlation_min_eigenvalue(const cfsq_correlation *correlation, double *out)
{
    return guarded([&]
                   {
        require(correlation, out);
        *out = cfsq::min_eigenvalue(correlation->report.full); });
}

cfsq_status cfsq_correlation_write(const cfsq_correlation *correlation, const char *full_csv, const char *macro_csv,
                                   const char *coefficient_csv, const char *sidecar_json)
{
    return guarded([&]
                   {
        require(correlation);
        const auto &r = correlation->report;
        std::optional<Eigen::MatrixXd> coefficients;
        if (coefficient_csv != nullptr)
            coefficients = cfsq::correlation_coefficient_map(r);
        write_file(full_csv, [&](std::ostream &os) { cfsq::write_complex_matrix_csv(os, r.full); });
        write_file(macro_csv, [&](std::ostream &os) { cfsq::write_complex_matrix_csv(os, r.macro); });
        write_file(coefficient_csv, [&](std::ostream &os) { cfsq::write_real_matrix_csv(os, *coefficients); });
        write_file(sidecar_json, [&](std::ostream &os) { cfsq::write_correlation_sidecar(os, r); }); });
}

cfsq_status cfsq_sha256_file(const char *path, char out_hex[65])
{
    return guarded([&]
                   {
        require(path, out_hex);
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw cfsq::IoError(std::string("cannot open ") + path);

        std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
        if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("SHA-256 initialisation failed");
        std::array<char, 1 << 16> buffer{};
        while (in)
        {
            in.read(buffer.data(), buffer.size());
            if (in.gcount() > 0)
                EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<size_t>(in.gcount()));
        }
        if (in.bad())
            throw cfsq::IoError(std::string("failed reading ") + path);
        std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
        unsigned int length = 0;
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
        for (unsigned int i = 0; i < length; ++i)
            fmt::format_to(out_hex + 2 * i, "{:02x}", digest[i]);
        out_hex[2 * length] = '\0'; });
}
