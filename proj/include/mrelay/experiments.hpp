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


#ifndef MRELAY_EXPERIMENTS_HPP
#define MRELAY_EXPERIMENTS_HPP

#include <charconv>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "config.hpp"
#include "error.hpp"
#include "estimation.hpp"
#include "link.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "validation.hpp"

namespace mrelay
{

inline constexpr const char *version = "0.1.0";

// Shortest round-trip decimal representation, independent of the C locale.
inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline constexpr double not_computed = std::numeric_limits<double>::quiet_NaN();

class csv_table
{
public:
    explicit csv_table(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> row)
    {
        if (row.size() != header_.size())
            throw std::logic_error("csv_table: row width does not match the header");
        rows_.push_back(std::move(row));
    }

    void add_metadata(const std::string &key, const std::string &value) { meta_.emplace_back(key, value); }

    std::size_t rows() const { return rows_.size(); }

    std::string str() const
    {
        std::string out;
        auto line = [&](const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i)
            {
                if (i)
                    out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header_);
        for (const auto &r : rows_)
            line(r);
        for (const auto &[k, v] : meta_)
            out += "# " + k + ": " + v + "\n";
        return out;
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::pair<std::string, std::string>> meta_;
};

struct run_options
{
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    unsigned threads = 0;
    bool closed_form_only = false;
    bool mc_only = false;
    bool sampled_noise = false;
    std::optional<std::vector<json>> values;
    std::string filter;
    bool corrupt_table1 = false;
};

// Base scenario and sweep keys after command-line overrides.
struct sweep_context
{
    scenario_config base;
    json extra;
    run_options opt;
    std::uint64_t seed = 1;
    int trials = 500;

    bool want_mc() const { return !opt.closed_form_only; }
    bool want_closed() const { return !opt.mc_only; }

    json list(const std::string &key, json fallback) const
    {
        if (!extra.contains(key))
            return fallback;
        const json &v = extra.at(key);
        if (!v.is_array() || v.empty())
            throw config_error("config: '" + key + "' must be a non-empty array");
        return v;
    }

    std::string axis(const std::string &fallback) const
    {
        if (!extra.contains("axis"))
            return fallback;
        if (!extra.at("axis").is_string())
            throw config_error("config: 'axis' must be a string");
        return extra.at("axis").get<std::string>();
    }

    std::vector<json> values(json fallback) const
    {
        json v = opt.values ? json(*opt.values) : list("values", std::move(fallback));
        if (!v.is_array() || v.empty())
            throw config_error("sweep: the values list is empty");
        return v.get<std::vector<json>>();
    }

    std::uint64_t point_seed(std::size_t index) const { return substream_seed(seed, index, stream_tag::grid_point); }

    unsigned threads() const { return opt.threads ? opt.threads : base.threads; }
};

inline sweep_context make_context(const config_document &doc, const run_options &opt, int default_trials)
{
    if (opt.closed_form_only && opt.mc_only)
        throw config_error("--closed-form-only and --mc-only are mutually exclusive");
    sweep_context ctx;
    ctx.base = doc.scenario;
    ctx.extra = doc.extra;
    ctx.opt = opt;
    ctx.seed = opt.seed ? *opt.seed : doc.scenario.seed;
    ctx.trials = opt.trials ? *opt.trials : (doc.trials_set ? doc.scenario.trials : default_trials);
    if (ctx.trials < 1)
        throw config_error("trials must be >= 1");
    ctx.base.seed = ctx.seed;
    ctx.base.trials = ctx.trials;
    return ctx;
}

inline void apply_axis(scenario_config &c, const std::string &axis, const json &value)
{
    if (!apply_key(c, axis, value))
        throw config_error("sweep: unknown axis '" + axis + "'");
}

inline std::string json_label(const json &v)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number())
        return format_double(v.get<double>());
    return v.dump();
}

inline void add_common_metadata(csv_table &t, const std::string &command, const sweep_context &ctx)
{
    t.add_metadata("command", command);
    t.add_metadata("seed", std::to_string(ctx.seed));
    t.add_metadata("trials", std::to_string(ctx.trials));
    t.add_metadata("version", version);
}

// ----- mse-sweep --------------------------------------------------------------------------

struct mse_point
{
    double simulated = not_computed;
    double stderr_sim = not_computed;
    double closed = not_computed;
};

// Per-element estimation MSE of F (hop 1) or G (hop 2): closed form and pilot-chain simulation.
inline mse_point mse_at(const system_model &s, int hop, int trials, std::uint64_t seed, bool mc, bool closed,
                        unsigned threads)
{
    mse_point p;
    if (closed)
        p.closed = hop == 1 ? mse_F_per_element(s) : mse_G_per_element(s);
    if (!mc)
        return p;
    std::vector<double> err(static_cast<std::size_t>(trials));
    const double elems = static_cast<double>(hop == 1 ? s.N : s.M) * s.K;
    if (hop == 1)
    {
        const pilot_estimator_F est(s);
        parallel_for(
            err.size(),
            [&](std::size_t t) {
                rng gen(substream_seed(seed, t, stream_tag::pilot_noise_F));
                const auto o = est.simulate(gen);
                err[t] = (o.estimate - o.truth).squaredNorm() / elems;
            },
            threads);
    }
    else
    {
        const pilot_estimator_G est(s);
        parallel_for(
            err.size(),
            [&](std::size_t t) {
                rng gen(substream_seed(seed, t, stream_tag::pilot_noise_G));
                const auto o = est.simulate(gen);
                err[t] = (o.estimate - o.truth).squaredNorm() / elems;
            },
            threads);
    }
    double sum = 0.0, sq = 0.0;
    for (double e : err)
    {
        sum += e;
        sq += e * e;
    }
    const double n = static_cast<double>(trials);
    p.simulated = sum / n;
    p.stderr_sim = n > 1 ? std::sqrt(std::max(sq / n - p.simulated * p.simulated, 0.0) / (n - 1.0)) : 0.0;
    return p;
}

inline csv_table cmd_mse_sweep(const config_document &doc, const run_options &opt)
{
    const auto ctx = make_context(doc, opt, 2000);
    const std::string axis = ctx.axis("P-dB");
    const auto values = ctx.values(json::array({0, 10, 20, 30, 40}));
    const json qs = ctx.list("q_list", json::array({1, 2, 3, "ideal"}));

    struct point
    {
        json q, value;
        int hop;
    };
    std::vector<point> grid;
    for (const auto &q : qs)
        for (const auto &v : values)
            for (int hop : {1, 2})
                grid.push_back({q, v, hop});

    std::vector<mse_point> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        scenario_config c = ctx.base;
        apply_axis(c, axis, grid[i].value);
        (grid[i].hop == 1 ? c.q1 : c.q2) = parse_adc(grid[i].q, "q_list");
        const auto s = system_model::from(c);
        out[i] = mse_at(s, grid[i].hop, ctx.trials, ctx.point_seed(i), ctx.want_mc(), ctx.want_closed(), ctx.threads());
    }

    csv_table t({axis, "q", "hop", "mse_sim", "mse_sim_stderr", "mse_closed"});
    for (std::size_t i = 0; i < grid.size(); ++i)
        t.add_row({json_label(grid[i].value), json_label(grid[i].q), grid[i].hop == 1 ? "F" : "G",
                   format_double(out[i].simulated), format_double(out[i].stderr_sim), format_double(out[i].closed)});
    add_common_metadata(t, "mse-sweep", ctx);
    return t;
}

// ----- rate sweeps ------------------------------------------------------------------------

struct rate_point
{
    double mc = not_computed;
    double mc_ci = not_computed;
    double closed = not_computed;
    double gamma1 = not_computed;
};

inline rate_point rate_at(const scenario_config &c, const sweep_context &ctx, std::size_t index)
{
    const auto s = system_model::from(c);
    rate_point p;
    if (s.K == 0)
        return {0.0, 0.0, 0.0, not_computed};
    const auto [F, G] = estimate_models(s);
    if (ctx.want_closed())
    {
        const auto r = sum_rate_approx(s, F, G);
        p.closed = r.sum_rate;
        p.gamma1 = r.sinr()(0);
    }
    if (ctx.want_mc())
    {
        mc_options o;
        o.trials = ctx.trials;
        o.seed = ctx.point_seed(index);
        o.threads = ctx.threads();
        o.sampled_noise = ctx.opt.sampled_noise;
        const auto r = ergodic_sum_rate_mc(s, F, G, o);
        p.mc = r.report.sum_rate;
        p.mc_ci = r.report.ci_halfwidth;
    }
    return p;
}

inline csv_table cmd_rate_vs_n(const config_document &doc, const run_options &opt)
{
    const auto ctx = make_context(doc, opt, 500);
    const std::string axis = ctx.axis("N");
    const auto values = ctx.values(json::array({64, 128, 256}));
    const json qs = ctx.list("q_list", json::array({1, 2, "ideal"}));

    csv_table t({axis, "q1", "q2", "rate_mc", "rate_mc_ci", "rate_closed", "rel_gap"});
    std::size_t index = 0;
    for (const auto &q : qs)
        for (const auto &v : values)
        {
            scenario_config c = ctx.base;
            c.q1 = c.q2 = parse_adc(q, "q_list");
            apply_axis(c, axis, v);
            const auto p = rate_at(c, ctx, index++);
            const double gap = (p.mc - p.closed) / p.closed;
            t.add_row({json_label(v), c.q1.label(), c.q2.label(), format_double(p.mc), format_double(p.mc_ci),
                       format_double(p.closed), format_double(gap)});
        }
    add_common_metadata(t, "rate-vs-n", ctx);
    return t;
}

inline csv_table cmd_power_scaling(const config_document &doc, const run_options &opt)
{
    const auto ctx = make_context(doc, opt, 500);
    const std::string axis = ctx.axis("N");
    const auto values = ctx.values(json::array({128, 256, 512, 1024}));
    const json ab = ctx.list("ab_list", json::array({json::array({ctx.base.a, ctx.base.b})}));

    csv_table t({"a", "b", "regime", axis, "rate_mc", "rate_mc_ci", "rate_closed", "rate_limit", "gamma1_closed",
                 "gamma1_limit"});
    std::size_t index = 0;
    for (const auto &pair : ab)
    {
        if (!pair.is_array() || pair.size() != 2)
            throw config_error("config: 'ab_list' entries must be [a, b] pairs");
        for (const auto &v : values)
        {
            scenario_config c = ctx.base;
            c.a = detail::number(pair[0], "ab_list");
            c.b = detail::number(pair[1], "ab_list");
            apply_axis(c, axis, v);
            c.validate();
            const auto lim = power_scaling_limit(c, 0);
            const auto p = rate_at(c, ctx, index++);
            t.add_row({format_double(c.a), format_double(c.b), to_string(lim.regime), json_label(v),
                       format_double(p.mc), format_double(p.mc_ci), format_double(p.closed),
                       format_double(asymptotic_sum_rate(c)), format_double(p.gamma1), format_double(lim.value)});
        }
    }
    add_common_metadata(t, "power-scaling", ctx);
    return t;
}

// Shared layout of the correlation and ADC impact studies: curves x delta x axis values.
inline csv_table impact_sweep(const config_document &doc, const run_options &opt, const std::string &command,
                              const std::string &pair_key, json default_pairs,
                              const std::function<void(scenario_config &, const json &)> &set_pair,
                              const std::function<std::vector<std::string>(const scenario_config &)> &labels,
                              std::vector<std::string> label_names)
{
    const auto ctx = make_context(doc, opt, 500);
    const std::string axis = ctx.axis("N");
    const auto values = ctx.values(json::array({100, 200, 300}));
    const json deltas = ctx.list("delta_list", json::array({0.5, 2.0}));
    const json pairs = ctx.list(pair_key, std::move(default_pairs));

    std::vector<std::string> header{"delta"};
    header.insert(header.end(), label_names.begin(), label_names.end());
    header.insert(header.end(), {axis, "rate_closed", "rate_mc", "rate_mc_ci"});
    csv_table t(header);
    std::size_t index = 0;
    for (const auto &d : deltas)
        for (const auto &pair : pairs)
        {
            if (!pair.is_array() || pair.size() != 2)
                throw config_error("config: '" + pair_key + "' entries must be pairs");
            for (const auto &v : values)
            {
                scenario_config c = ctx.base;
                c.delta = detail::number(d, "delta_list");
                set_pair(c, pair);
                apply_axis(c, axis, v);
                const auto p = rate_at(c, ctx, index++);
                std::vector<std::string> row{format_double(c.delta)};
                for (auto &l : labels(c))
                    row.push_back(l);
                row.insert(row.end(), {json_label(v), format_double(p.closed), format_double(p.mc), format_double(p.mc_ci)});
                t.add_row(row);
            }
        }
    add_common_metadata(t, command, ctx);
    return t;
}

inline csv_table cmd_correlation_impact(const config_document &doc, const run_options &opt)
{
    return impact_sweep(
        doc, opt, "correlation-impact", "r_pairs", json::array({json::array({0.0, 0.8}), json::array({0.8, 0.0})}),
        [](scenario_config &c, const json &p) {
            c.r_R = detail::coefficient(p[0], "r_pairs");
            c.r_B = detail::coefficient(p[1], "r_pairs");
        },
        [](const scenario_config &c) {
            return std::vector<std::string>{format_double(c.r_R.real()), format_double(c.r_B.real())};
        },
        {"r_R", "r_B"});
}

inline csv_table cmd_adc_impact(const config_document &doc, const run_options &opt)
{
    return impact_sweep(
        doc, opt, "adc-impact", "q_pairs", json::array({json::array({3, 1}), json::array({1, 3})}),
        [](scenario_config &c, const json &p) {
            c.q1 = parse_adc(p[0], "q_pairs");
            c.q2 = parse_adc(p[1], "q_pairs");
        },
        [](const scenario_config &c) { return std::vector<std::string>{c.q1.label(), c.q2.label()}; },
        {"q1", "q2"});
}

// ----- validate ---------------------------------------------------------------------------

struct validate_outcome
{
    csv_table table;
    bool passed = false;
};

inline validate_outcome cmd_validate(const config_document &doc, const run_options &opt)
{
    const auto ctx = make_context(doc, opt, 1000);
    validation_options v;
    v.seed = ctx.seed;
    v.trials = ctx.trials;
    v.threads = ctx.threads();
    v.filter = opt.filter;
    v.corrupt_table1 = opt.corrupt_table1;
    const auto report = run_validation(v);
    if (report.checks.empty())
        throw config_error("validate: no check matches filter '" + opt.filter + "'");

    validate_outcome out{csv_table({"check", "measured", "tolerance", "unit", "result"}), report.passed()};
    for (const auto &c : report.checks)
        out.table.add_row({c.name, format_double(c.measured), format_double(c.tolerance), c.unit,
                           c.passed ? "pass" : "fail"});
    add_common_metadata(out.table, "validate", ctx);
    return out;
}

} // namespace mrelay

#endif
