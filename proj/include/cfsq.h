/* SPDX-License-Identifier: Apache-2.0
 *
 * cfsquint: spatial-wideband channel simulator for mmWave cell-free massive MIMO
 * Copyright (C) 2026 The cfsquint Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the cfsquint shared library.
 *
 * Every object is an opaque handle created by a *_load / *_generate / *_assemble /
 * *_estimate call and released with the matching *_free (NULL is accepted). Every
 * fallible call returns a cfsq_status; on failure cfsq_last_error() describes the
 * problem. Error text is kept per thread. Handles are immutable after creation
 * except cfsq_config, whose setters must not race with readers.
 */

#ifndef CFSQ_H
#define CFSQ_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CFSQ_API __declspec(dllexport)
#else
#define CFSQ_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cfsq_status
{
    CFSQ_OK = 0,
    CFSQ_ERR_CONFIG = 1,     /* schema violation; cfsq_last_error_field() names the key */
    CFSQ_ERR_GEOMETRY = 2,   /* a UE coincides with an AP */
    CFSQ_ERR_USAGE = 3,      /* bad index, NULL argument, dimension mismatch */
    CFSQ_ERR_IO = 4,         /* file could not be read or written */
    CFSQ_ERR_DEGENERATE = 5, /* vanishing channel where a normalization needs power */
    CFSQ_ERR_INTERNAL = 6
} cfsq_status;

typedef enum cfsq_expectation
{
    CFSQ_EXPECT_GAINS_AND_DOAS = 0,
    CFSQ_EXPECT_FIXED_DOAS = 1
} cfsq_expectation;

/* Band-average selector for cfsq_correlation_estimate. */
#define CFSQ_BAND_AVERAGE (-1)

typedef struct cfsq_config cfsq_config;
typedef struct cfsq_paths cfsq_paths;
typedef struct cfsq_channel cfsq_channel;
typedef struct cfsq_correlation cfsq_correlation;

typedef struct cfsq_config_info
{
    size_t num_aps;
    size_t num_ues;
    size_t num_antennas;
    size_t num_paths;
    size_t num_subcarriers;
    double bandwidth_hz;
    double carrier_frequency_hz;
    double antenna_spacing_m;
    uint64_t seed;
    size_t isi_num_symbols;
    size_t num_isi_cp_lengths;
    size_t correlation_trials;
    cfsq_expectation correlation_expectation;
} cfsq_config_info;

typedef struct cfsq_path_info
{
    double raw_gain_re, raw_gain_im; /* before the distance rotation */
    double gain_re, gain_im;         /* after e^{-j 2 pi d / lambda_c} */
    double doa_rad;
} cfsq_path_info;

typedef struct cfsq_cp_summary
{
    double cp_min_approx_samples;
    double cp_min_exact_samples;
    double bandwidth_hz;
} cfsq_cp_summary;

CFSQ_API const char *cfsq_version(void);
CFSQ_API const char *cfsq_last_error(void);
CFSQ_API const char *cfsq_last_error_field(void);

/* ---- scenario description ---- */
CFSQ_API cfsq_status cfsq_config_load(const char *path, cfsq_config **out);
CFSQ_API cfsq_status cfsq_config_parse(const char *yaml_text, cfsq_config **out);
CFSQ_API void cfsq_config_free(cfsq_config *config);
CFSQ_API cfsq_status cfsq_config_info_get(const cfsq_config *config, cfsq_config_info *out);
CFSQ_API cfsq_status cfsq_config_isi_cp_lengths(const cfsq_config *config, size_t *buffer, size_t capacity);
CFSQ_API cfsq_status cfsq_config_set_seed(cfsq_config *config, uint64_t seed);
CFSQ_API cfsq_status cfsq_config_set_bandwidth(cfsq_config *config, double bandwidth_hz);
CFSQ_API cfsq_status cfsq_config_set_num_antennas(cfsq_config *config, size_t num_antennas);
/* Keeps the first num_aps entries of aps.positions. */
CFSQ_API cfsq_status cfsq_config_set_num_aps(cfsq_config *config, size_t num_aps);
/* Validates geometry (CFSQ_ERR_GEOMETRY on coincident UE/AP) and reports d_{k,l}. */
CFSQ_API cfsq_status cfsq_config_distance(const cfsq_config *config, size_t ue, size_t ap, double *out_m);

CFSQ_API cfsq_status cfsq_compute_delay(double distance_m, size_t antenna, double spacing_m, double doa_rad,
                                        double *out_s);

/* ---- paths ---- */
/* Draws a path set with the configured seed and remembers the configured OFDM grid. */
CFSQ_API cfsq_status cfsq_paths_generate(const cfsq_config *config, cfsq_paths **out);
CFSQ_API void cfsq_paths_free(cfsq_paths *paths);
CFSQ_API cfsq_status cfsq_paths_get(const cfsq_paths *paths, size_t ue, size_t ap, size_t path, cfsq_path_info *out);
CFSQ_API cfsq_status cfsq_spatial_frequency_response(const cfsq_paths *paths, size_t ue, size_t ap, size_t antenna,
                                                     size_t subcarrier, double *re, double *im);

/* ---- channel tensor ---- */
CFSQ_API cfsq_status cfsq_channel_assemble(const cfsq_paths *paths, size_t ue, cfsq_channel **out);
CFSQ_API void cfsq_channel_free(cfsq_channel *channel);
CFSQ_API cfsq_status cfsq_channel_dims(const cfsq_channel *channel, size_t *num_aps, size_t *num_antennas,
                                       size_t *num_subcarriers);
CFSQ_API cfsq_status cfsq_channel_get(const cfsq_channel *channel, size_t ap, size_t antenna, size_t subcarrier,
                                      double *re, double *im);
/* One CSV (ue, ap, antenna, subcarrier, freq_offset_hz, re, im) holding every tensor in order. */
CFSQ_API cfsq_status cfsq_channel_write_csv(const cfsq_channel *const *channels, size_t count, const char *path);
CFSQ_API cfsq_status cfsq_channel_write_binary(const cfsq_channel *channel, const char *path);

/* ---- beam squint ---- */
/* Antenna-domain spectrum of AP ap. Either output path may be NULL. */
CFSQ_API cfsq_status cfsq_squint_micro(const cfsq_paths *paths, size_t ue, size_t ap, const char *spectrum_csv,
                                       const char *report_json, size_t *excursion_bins);
/* AP-domain spectrum of the macro-steering vector. */
CFSQ_API cfsq_status cfsq_squint_macro(const cfsq_paths *paths, size_t ue, const char *spectrum_csv,
                                       const char *report_json, size_t *excursion_bins);

/* ---- cyclic prefix / ISI ---- */
CFSQ_API cfsq_status cfsq_min_cp(const cfsq_paths *paths, size_t ue, cfsq_cp_summary *out);
CFSQ_API cfsq_status cfsq_write_cp_report(const cfsq_paths *paths, size_t ue, const char *json_path);
CFSQ_API cfsq_status cfsq_simulate_isi(const cfsq_paths *paths, size_t ue, size_t cp_len, size_t num_symbols,
                                       uint64_t seed, double *evm);
/* Runs simulate_isi for every cp length and writes CSV (cp_len, evm). evm_out may be NULL. */
CFSQ_API cfsq_status cfsq_isi_sweep(const cfsq_paths *paths, size_t ue, const size_t *cp_lengths, size_t count,
                                    size_t num_symbols, uint64_t seed, const char *csv_path, double *evm_out);

/* ---- spatial correlation ---- */
/* subcarrier = CFSQ_BAND_AVERAGE selects the band average. */
CFSQ_API cfsq_status cfsq_correlation_estimate(const cfsq_config *config, size_t ue, size_t num_trials, uint64_t seed,
                                               int64_t subcarrier, cfsq_expectation expectation,
                                               cfsq_correlation **out);
CFSQ_API void cfsq_correlation_free(cfsq_correlation *correlation);
CFSQ_API cfsq_status cfsq_correlation_dims(const cfsq_correlation *correlation, size_t *num_aps,
                                           size_t *num_antennas);
CFSQ_API cfsq_status cfsq_correlation_get(const cfsq_correlation *correlation, size_t row, size_t col, double *re,
                                          double *im);
CFSQ_API cfsq_status cfsq_correlation_macro_get(const cfsq_correlation *correlation, size_t ap_a, size_t ap_b,
                                                double *re, double *im);
CFSQ_API cfsq_status cfsq_correlation_min_eigenvalue(const cfsq_correlation *correlation, double *out);
/* Any path may be NULL. The coefficient map fails with CFSQ_ERR_DEGENERATE on a zero diagonal. */
CFSQ_API cfsq_status cfsq_correlation_write(const cfsq_correlation *correlation, const char *full_csv,
                                            const char *macro_csv, const char *coefficient_csv,
                                            const char *sidecar_json);

/* ---- utilities ---- */
/* Lowercase hex SHA-256 of a file, NUL-terminated (65 bytes). */
CFSQ_API cfsq_status cfsq_sha256_file(const char *path, char out_hex[65]);

#ifdef __cplusplus
}
#endif

#endif
