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

// cfsquint command-line front end. Talks to the simulator exclusively through the C API.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "cfsq.h"

namespace fs = std::filesystem;

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_config = 2;
    constexpr int exit_io = 3;

    const std::set<std::string> experiments{"channel", "squint", "cp", "isi-sweep", "correlation"};
    const std::set<std::string> sweep_parameters{"bandwidth_hz", "num_antennas", "num_aps"};

    // Carries a C API failure up to main with the exit code it maps to.
    struct RunError
    {
        int exit_code;
        std::string message;
    };

    [[noreturn]] void raise(cfsq_status status, const std::string &context)
    {
        std::string message = context + ": " + cfsq_last_error();
        if (status == CFSQ_ERR_IO)
            throw RunError{exit_io, message};
        throw RunError{exit_config, message};
    }

    void check(cfsq_status status, const std::string &context)
    {
        if (status != CFSQ_OK)
            raise(status, context);
    }

    template <typename T, void (*Free)(T *)>
    struct Handle
    {
        T *ptr = nullptr;
        Handle() = default;
        Handle(const Handle &) = delete;
        Handle &operator=(const Handle &) = delete;
        ~Handle() { Free(ptr); }
        T **out() { return &ptr; }
        T *get() const { return ptr; }
    };

    using ConfigHandle = Handle<cfsq_config, cfsq_config_free>;
    using PathsHandle = Handle<cfsq_paths, cfsq_paths_free>;
    using ChannelHandle = Handle<cfsq_channel, cfsq_channel_free>;
    using CorrelationHandle = Handle<cfsq_correlation, cfsq_correlation_free>;

    struct SweepSpec
    {
        std::string parameter;
        std::vector<std::string> labels; // values as typed, used for directory names
        std::vector<double> values;
    };

    SweepSpec parse_sweep(const std::string &text)
    {
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw RunError{exit_config, "--sweep: expected <param>=<v1,v2,...>"};
        SweepSpec sweep;
        sweep.parameter = text.substr(0, eq);
        if (!sweep_parameters.contains(sweep.parameter))
            throw RunError{exit_config, "--sweep: unknown parameter '" + sweep.parameter +
                                            "' (expected bandwidth_hz, num_antennas or num_aps)"};

        std::stringstream list(text.substr(eq + 1));
        std::string item;
        while (std::getline(list, item, ','))
        {
            std::size_t used = 0;
            double value = 0.0;
            try
            {
                value = std::stod(item, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used != item.size() || item.empty() || !std::isfinite(value))
                throw RunError{exit_config, "--sweep: cannot parse value '" + item + "'"};
            if (!(value > 0.0))
                throw RunError{exit_config, "--sweep: values must be positive"};
            if (sweep.parameter != "bandwidth_hz" && value != std::floor(value))
                throw RunError{exit_config, "--sweep: " + sweep.parameter + " values must be integers"};
            if (!sweep.values.empty() && !(value > sweep.values.back()))
                throw RunError{exit_config, "--sweep: values must be strictly increasing"};
            sweep.labels.push_back(item);
            sweep.values.push_back(value);
        }
        if (sweep.values.empty())
            throw RunError{exit_config, "--sweep: no values given"};
        return sweep;
    }

    struct RunOptions
    {
        std::string scenario;
        std::string experiment;
        fs::path out;
        std::optional<std::uint64_t> seed;
        std::optional<SweepSpec> sweep;
        std::int64_t frequency = CFSQ_BAND_AVERAGE;
        std::string frequency_label = "band-average";
    };

    // Artifact bookkeeping: paths relative to the output root, in emission order.
    class Artifacts
    {
    public:
        explicit Artifacts(fs::path root) : root_(std::move(root)) {}

        std::string add(const fs::path &relative)
        {
            relative_.push_back(relative.generic_string());
            return (root_ / relative).string();
        }

        const std::vector<std::string> &relative() const { return relative_; }
        const fs::path &root() const { return root_; }

        void remove_all() const
        {
            std::error_code ec;
            for (const auto &r : relative_)
                fs::remove(root_ / r, ec);
        }

    private:
        fs::path root_;
        std::vector<std::string> relative_;
    };

    void load_config(const RunOptions &options, ConfigHandle &config)
    {
        const auto status = cfsq_config_load(options.scenario.c_str(), config.out());
        if (status != CFSQ_OK)
        {
            // an unreadable or invalid scenario is a configuration problem, not an output failure
            throw RunError{exit_config, "scenario " + options.scenario + ": " + cfsq_last_error()};
        }
        if (options.seed)
            check(cfsq_config_set_seed(config.get(), *options.seed), "--seed");
    }

    void apply_sweep_point(cfsq_config *config, const std::string &parameter, double value)
    {
        if (parameter == "bandwidth_hz")
            check(cfsq_config_set_bandwidth(config, value), "--sweep bandwidth_hz");
        else if (parameter == "num_antennas")
            check(cfsq_config_set_num_antennas(config, static_cast<size_t>(value)), "--sweep num_antennas");
        else
            check(cfsq_config_set_num_aps(config, static_cast<size_t>(value)), "--sweep num_aps");
    }

    void run_channel(cfsq_config *config, const fs::path &prefix, Artifacts &artifacts)
    {
        cfsq_config_info info{};
        check(cfsq_config_info_get(config, &info), "config");
        PathsHandle paths;
        check(cfsq_paths_generate(config, paths.out()), "generate paths");

        std::vector<ChannelHandle> tensors(info.num_ues);
        std::vector<const cfsq_channel *> views;
        for (size_t k = 0; k < info.num_ues; ++k)
        {
            check(cfsq_channel_assemble(paths.get(), k, tensors[k].out()), "assemble channel");
            views.push_back(tensors[k].get());
        }
        check(cfsq_channel_write_csv(views.data(), views.size(), artifacts.add(prefix / "channel.csv").c_str()),
              "write channel.csv");
        for (size_t k = 0; k < info.num_ues; ++k)
        {
            const auto name = fmt::format("channel_ue{}.bin", k);
            check(cfsq_channel_write_binary(tensors[k].get(), artifacts.add(prefix / name).c_str()), "write " + name);
        }
    }

    void run_squint(cfsq_config *config, const fs::path &prefix, Artifacts &artifacts)
    {
        cfsq_config_info info{};
        check(cfsq_config_info_get(config, &info), "config");
        PathsHandle paths;
        check(cfsq_paths_generate(config, paths.out()), "generate paths");
        for (size_t k = 0; k < info.num_ues; ++k)
        {
            for (size_t l = 0; l < info.num_aps; ++l)
            {
                const auto stem = fmt::format("squint_micro_ue{}_ap{}", k, l);
                const auto csv = artifacts.add(prefix / (stem + ".csv"));
                const auto json = artifacts.add(prefix / (stem + ".json"));
                check(cfsq_squint_micro(paths.get(), k, l, csv.c_str(), json.c_str(), nullptr), stem);
            }
            const auto stem = fmt::format("squint_macro_ue{}", k);
            const auto csv = artifacts.add(prefix / (stem + ".csv"));
            const auto json = artifacts.add(prefix / (stem + ".json"));
            check(cfsq_squint_macro(paths.get(), k, csv.c_str(), json.c_str(), nullptr), stem);
        }
    }

    void run_cp(cfsq_config *config, const fs::path &prefix, Artifacts &artifacts)
    {
        cfsq_config_info info{};
        check(cfsq_config_info_get(config, &info), "config");
        PathsHandle paths;
        check(cfsq_paths_generate(config, paths.out()), "generate paths");
        for (size_t k = 0; k < info.num_ues; ++k)
        {
            const auto name = fmt::format("cp_report_ue{}.json", k);
            check(cfsq_write_cp_report(paths.get(), k, artifacts.add(prefix / name).c_str()), name);
        }
    }

    void run_isi_sweep(cfsq_config *config, const fs::path &prefix, Artifacts &artifacts)
    {
        cfsq_config_info info{};
        check(cfsq_config_info_get(config, &info), "config");
        std::vector<size_t> cps(info.num_isi_cp_lengths);
        if (!cps.empty())
            check(cfsq_config_isi_cp_lengths(config, cps.data(), cps.size()), "isi.cp_lengths");
        PathsHandle paths;
        check(cfsq_paths_generate(config, paths.out()), "generate paths");
        for (size_t k = 0; k < info.num_ues; ++k)
        {
            const auto name = fmt::format("isi_sweep_ue{}.csv", k);
            check(cfsq_isi_sweep(paths.get(), k, cps.data(), cps.size(), info.isi_num_symbols, info.seed,
                                 artifacts.add(prefix / name).c_str(), nullptr),
                  name);
        }
    }

    void run_correlation(cfsq_config *config, const RunOptions &options, const fs::path &prefix, Artifacts &artifacts)
    {
        cfsq_config_info info{};
        check(cfsq_config_info_get(config, &info), "config");
        for (size_t k = 0; k < info.num_ues; ++k)
        {
            CorrelationHandle corr;
            check(cfsq_correlation_estimate(config, k, info.correlation_trials, info.seed, options.frequency,
                                            info.correlation_expectation, corr.out()),
                  "estimate correlation");
            const auto stem = fmt::format("correlation_ue{}", k);
            const auto full = artifacts.add(prefix / (stem + "_full.csv"));
            const auto macro = artifacts.add(prefix / (stem + "_macro.csv"));
            const auto coeff = artifacts.add(prefix / (stem + "_coefficients.csv"));
            const auto meta = artifacts.add(prefix / (stem + "_meta.json"));
            check(cfsq_correlation_write(corr.get(), full.c_str(), macro.c_str(), coeff.c_str(), meta.c_str()), stem);
        }
    }

    void run_point(cfsq_config *config, const RunOptions &options, const fs::path &prefix, Artifacts &artifacts)
    {
        std::error_code ec;
        fs::create_directories(artifacts.root() / prefix, ec);
        if (ec)
            throw RunError{exit_io, "cannot create " + (artifacts.root() / prefix).string() + ": " + ec.message()};

        if (options.experiment == "channel")
            run_channel(config, prefix, artifacts);
        else if (options.experiment == "squint")
            run_squint(config, prefix, artifacts);
        else if (options.experiment == "cp")
            run_cp(config, prefix, artifacts);
        else if (options.experiment == "isi-sweep")
            run_isi_sweep(config, prefix, artifacts);
        else
            run_correlation(config, options, prefix, artifacts);
    }

    std::string sha256(const fs::path &path)
    {
        char hex[65] = {};
        check(cfsq_sha256_file(path.string().c_str(), hex), "checksum " + path.string());
        return hex;
    }

    void write_manifest(const RunOptions &options, std::uint64_t seed, const Artifacts &artifacts)
    {
        nlohmann::ordered_json manifest;
        manifest["tool_version"] = cfsq_version();
        manifest["scenario_checksum"] = sha256(options.scenario);
        manifest["seed"] = seed;
        manifest["experiment"] = options.experiment;
        if (options.experiment == "correlation")
            manifest["frequency_selector"] = options.frequency_label;
        if (options.sweep)
        {
            manifest["sweep"] = {{"parameter", options.sweep->parameter}, {"values", options.sweep->labels}};
        }
        auto list = nlohmann::ordered_json::array();
        for (const auto &relative : artifacts.relative())
            list.push_back({{"path", relative}, {"sha256", sha256(artifacts.root() / relative)}});
        manifest["artifacts"] = list;

        const auto path = artifacts.root() / ("manifest_" + options.experiment + ".json");
        std::ofstream os(path, std::ios::trunc);
        os << manifest.dump(2) << '\n';
        os.flush();
        if (!os)
            throw RunError{exit_io, "failed writing " + path.string()};
    }

    int run(const RunOptions &options)
    {
        if (!experiments.contains(options.experiment))
        {
            std::cerr << "error: unknown experiment '" << options.experiment
                      << "' (expected channel, squint, cp, isi-sweep or correlation)\n";
            return exit_config;
        }

        Artifacts artifacts(options.out);
        try
        {
            ConfigHandle base;
            load_config(options, base);
            cfsq_config_info info{};
            check(cfsq_config_info_get(base.get(), &info), "config");

            if (!options.sweep)
                run_point(base.get(), options, {}, artifacts);
            else
            {
                const auto &sweep = *options.sweep;
                for (std::size_t i = 0; i < sweep.values.size(); ++i)
                {
                    ConfigHandle point;
                    load_config(options, point);
                    apply_sweep_point(point.get(), sweep.parameter, sweep.values[i]);
                    run_point(point.get(), options, fs::path(sweep.parameter + "_" + sweep.labels[i]), artifacts);
                }
            }
            write_manifest(options, info.seed, artifacts);
        }
        catch (const RunError &e)
        {
            artifacts.remove_all();
            std::cerr << "error: " << e.message << '\n';
            return e.exit_code;
        }
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"cfsquint: spatial-wideband channel experiments for mmWave cell-free massive MIMO"};
    app.set_version_flag("--version", std::string(cfsq_version()));

    RunOptions options;
    std::string out;
    std::uint64_t seed = 0;
    std::string sweep;
    std::string frequency = "avg";
    app.add_option("--scenario", options.scenario, "Scenario description (YAML)")->required();
    app.add_option("--experiment", options.experiment, "channel | squint | cp | isi-sweep | correlation")->required();
    app.add_option("--out", out, "Output directory")->required();
    auto *seed_opt = app.add_option("--seed", seed, "Override paths.seed");
    auto *sweep_opt = app.add_option("--sweep", sweep, "Parameter sweep <bandwidth_hz|num_antennas|num_aps>=<v1,v2,...>");
    app.add_option("--frequency", frequency, "Correlation frequency: subcarrier index or 'avg'");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    options.out = out;
    if (*seed_opt)
        options.seed = seed;
    try
    {
        if (*sweep_opt)
            options.sweep = parse_sweep(sweep);
        if (frequency != "avg")
        {
            std::size_t used = 0;
            long long index = -1;
            try
            {
                index = std::stoll(frequency, &used);
            }
            catch (const std::exception &)
            {
                used = 0;
            }
            if (used != frequency.size() || index < 0)
                throw RunError{exit_config, "--frequency: expected a subcarrier index or 'avg'"};
            options.frequency = index;
        }
        options.frequency_label = frequency == "avg" ? "band-average" : frequency;
    }
    catch (const RunError &e)
    {
        std::cerr << "error: " << e.message << '\n';
        return e.exit_code;
    }

    return run(options);
}
