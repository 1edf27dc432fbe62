// SPDX-License-Identifier: Apache-2.0
//
// mrelay: correlated massive MIMO relay simulation with low-resolution ADCs
// Copyright (C) 2026 The mrelay Authors
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


// mrelay: command-line front end for the relay sweeps and the validation suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrelay/experiments.hpp"

namespace
{

enum exit_code : int
{
    exit_ok = 0,
    exit_config = 1,
    exit_numerical = 2,
    exit_validation = 3,
};

struct cli_state
{
    std::string config_path;
    std::uint64_t seed = 0;
    int trials = 0;
    std::string out;
    std::vector<std::string> sets;
    std::string values;
    mrelay::run_options opt;
};

mrelay::config_document build_document(const cli_state &st)
{
    mrelay::config_document doc;
    if (!st.config_path.empty())
        doc = mrelay::load_config(st.config_path);
    for (const auto &kv : st.sets)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
            throw mrelay::config_error("--set expects key=value, got '" + kv + "'");
        mrelay::assign_key(doc, kv.substr(0, eq), mrelay::parse_value(kv.substr(eq + 1)));
    }
    doc.scenario.validate();
    return doc;
}

std::vector<mrelay::json> split_values(const std::string &text)
{
    std::vector<mrelay::json> out;
    std::size_t start = 0;
    while (start <= text.size())
    {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string item = text.substr(start, end - start);
        if (item.empty())
            throw mrelay::config_error("--values contains an empty entry");
        out.push_back(mrelay::parse_value(item));
        start = end + 1;
    }
    return out;
}

void emit(const std::string &text, const std::string &path)
{
    if (path.empty() || path == "-")
    {
        std::fwrite(text.data(), 1, text.size(), stdout);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw mrelay::config_error("cannot open output file '" + path + "'");
    f << text;
    if (!f)
        throw mrelay::numerical_error("failed writing output file '" + path + "'");
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Correlated massive MIMO relay uplink with low-resolution ADCs"};
    app.set_version_flag("--version", mrelay::version);
    app.require_subcommand(1);
    app.fallthrough();

    cli_state st;
    app.add_option("--config", st.config_path, "JSON scenario and sweep file")->check(CLI::ExistingFile);
    auto *seed_opt = app.add_option("--seed", st.seed, "master seed");
    auto *trials_opt = app.add_option("--trials", st.trials, "Monte Carlo trials per grid point")->check(CLI::PositiveNumber);
    app.add_option("--out", st.out, "CSV output path (default stdout)");
    app.add_flag("--closed-form-only", st.opt.closed_form_only, "skip Monte Carlo");
    app.add_flag("--mc-only", st.opt.mc_only, "skip closed forms");
    app.add_option("--threads", st.opt.threads, "worker threads (0: MRELAY_THREADS or all cores)");
    app.add_option("--set", st.sets, "override a config key, key=value (JSON value)");
    app.add_option("--values", st.values, "comma-separated sweep values");
    app.add_flag("--sampled-noise", st.opt.sampled_noise, "draw AWGN and quantization noise in rate trials");

    const std::vector<std::pair<const char *, const char *>> commands = {
        {"mse-sweep", "channel-estimation MSE vs pilot power"},
        {"rate-vs-n", "ergodic sum rate vs N, Monte Carlo and closed form"},
        {"power-scaling", "sum rate under P_U = E_U/N^a, P_R = E_R/M^b"},
        {"correlation-impact", "sum rate for swapped relay and base-station correlation"},
        {"adc-impact", "sum rate for swapped ADC resolutions"},
        {"validate", "oracle suite"},
    };
    for (const auto &[name, help] : commands)
        app.add_subcommand(name, help);
    auto *validate = app.get_subcommand("validate");
    validate->add_option("--filter", st.opt.filter, "run checks whose name contains this text");
    validate->add_flag("--corrupt-table1", st.opt.corrupt_table1)->group("");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_config;
    }

    try
    {
        if (seed_opt->count())
            st.opt.seed = st.seed;
        if (trials_opt->count())
            st.opt.trials = st.trials;
        if (!st.values.empty())
            st.opt.values = split_values(st.values);
        const auto doc = build_document(st);
        const std::string cmd = app.get_subcommands().front()->get_name();

        if (cmd == "validate")
        {
            const auto res = mrelay::cmd_validate(doc, st.opt);
            emit(res.table.str(), st.out);
            std::fprintf(stderr, "validate: %s\n", res.passed ? "all checks passed" : "FAILED");
            return res.passed ? exit_ok : exit_validation;
        }
        mrelay::csv_table table({"unused"});
        if (cmd == "mse-sweep")
            table = mrelay::cmd_mse_sweep(doc, st.opt);
        else if (cmd == "rate-vs-n")
            table = mrelay::cmd_rate_vs_n(doc, st.opt);
        else if (cmd == "power-scaling")
            table = mrelay::cmd_power_scaling(doc, st.opt);
        else if (cmd == "correlation-impact")
            table = mrelay::cmd_correlation_impact(doc, st.opt);
        else
            table = mrelay::cmd_adc_impact(doc, st.opt);
        emit(table.str(), st.out);
        return exit_ok;
    }
    catch (const mrelay::config_error &e)
    {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    }
    catch (const mrelay::numerical_error &e)
    {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return exit_numerical;
    }
    catch (const std::exception &e)
    {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
}
