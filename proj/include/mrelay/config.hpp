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


#ifndef MRELAY_CONFIG_HPP
#define MRELAY_CONFIG_HPP

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "json.hpp"

#include "error.hpp"
#include "quantizer.hpp"
#include "scenario.hpp"

namespace mrelay
{

using json = nlohmann::json;

namespace detail
{

inline bool ends_with(std::string_view s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline double number(const json &v, const std::string &key)
{
    if (!v.is_number())
        throw config_error("config: field '" + key + "' must be a number");
    return v.get<double>();
}

inline int integer(const json &v, const std::string &key)
{
    if (!v.is_number_integer() && !(v.is_number() && std::floor(v.get<double>()) == v.get<double>()))
        throw config_error("config: field '" + key + "' must be an integer");
    return static_cast<int>(v.get<double>());
}

inline std::vector<double> numbers(const json &v, const std::string &key)
{
    if (!v.is_array())
        throw config_error("config: field '" + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto &x : v)
        out.push_back(number(x, key));
    return out;
}

inline cplx coefficient(const json &v, const std::string &key)
{
    if (v.is_number())
        return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2)
        return {number(v[0], key), number(v[1], key)};
    throw config_error("config: field '" + key + "' must be a number or [re, im]");
}

} // namespace detail

// Integer bit count or the string "ideal".
inline adc_spec parse_adc(const json &v, const std::string &key = "q")
{
    if (v.is_string())
    {
        const auto s = v.get<std::string>();
        if (s == "ideal" || s == "IDEAL" || s == "inf")
            return adc_spec::ideal();
        try
        {
            std::size_t used = 0;
            const int q = std::stoi(s, &used);
            if (used == s.size())
                return adc_spec::with_bits(q);
        }
        catch (const std::logic_error &)
        {
        }
        throw config_error("config: field '" + key + "' must be a bit count or \"ideal\"");
    }
    return adc_spec::with_bits(detail::integer(v, key));
}

inline json adc_to_json(const adc_spec &a)
{
    if (a.is_ideal())
        return "ideal";
    return *a.bits;
}

// Assigns one flat key. Keys with a "-dB" suffix take decibel values for the power
// and noise fields and "P-dB" sets both pilot powers. Returns false for unknown keys.
inline bool apply_key(scenario_config &c, const std::string &key, const json &v)
{
    using namespace detail;
    std::string name = key;
    bool db = false;
    if (ends_with(key, "-dB"))
    {
        name = key.substr(0, key.size() - 3);
        db = true;
    }
    auto power = [&](double &field) {
        const double x = number(v, key);
        field = db ? db_to_linear(x) : x;
    };

    if (name == "E_U")
        power(c.E_U);
    else if (name == "E_R")
        power(c.E_R);
    else if (name == "P_U")
    {
        power(c.E_U); // P_U = E_U when a = 0
        c.a = 0.0;
    }
    else if (name == "P_R")
    {
        power(c.E_R);
        c.b = 0.0;
    }
    else if (name == "P1")
        power(c.P1);
    else if (name == "P2")
        power(c.P2);
    else if (name == "P")
    {
        power(c.P1);
        c.P2 = c.P1;
    }
    else if (name == "sigma_R2")
        power(c.sigma_R2);
    else if (name == "sigma_B2")
        power(c.sigma_B2);
    else if (db)
        return false;
    else if (name == "N")
        c.N = integer(v, key);
    else if (name == "delta")
        c.delta = number(v, key);
    else if (name == "K")
        c.K = integer(v, key);
    else if (name == "a")
        c.a = number(v, key);
    else if (name == "b")
        c.b = number(v, key);
    else if (name == "T")
        c.T = integer(v, key);
    else if (name == "tau1")
        c.tau1 = integer(v, key);
    else if (name == "tau2")
        c.tau2 = integer(v, key);
    else if (name == "q1")
        c.q1 = parse_adc(v, key);
    else if (name == "q2")
        c.q2 = parse_adc(v, key);
    else if (name == "q")
        c.q1 = c.q2 = parse_adc(v, key);
    else if (name == "r_R")
        c.r_R = coefficient(v, key);
    else if (name == "r_B")
        c.r_B = coefficient(v, key);
    else if (name == "r")
        c.r_R = c.r_B = coefficient(v, key);
    else if (name == "d_ref")
        c.d_ref = number(v, key);
    else if (name == "d_UkR")
        c.d_UkR = numbers(v, key);
    else if (name == "d_RB")
        c.d_RB = number(v, key);
    else if (name == "nu")
        c.nu = number(v, key);
    else if (name == "betas")
        c.betas = numbers(v, key);
    else if (name == "eta")
        c.eta = number(v, key);
    else if (name == "perfect_csi")
    {
        if (!v.is_boolean())
            throw config_error("config: field 'perfect_csi' must be true or false");
        c.perfect_csi = v.get<bool>();
    }
    else if (name == "trials")
        c.trials = integer(v, key);
    else if (name == "seed")
    {
        if (!v.is_number_unsigned() && !v.is_number_integer())
            throw config_error("config: field 'seed' must be a non-negative integer");
        c.seed = v.get<std::uint64_t>();
    }
    else if (name == "threads")
        c.threads = static_cast<unsigned>(integer(v, key));
    else
        return false;
    return true;
}

// Parsed config document: scenario fields plus any sweep keys left for the command.
struct config_document
{
    scenario_config scenario;
    json extra = json::object();
    bool trials_set = false;
};

// Keys read by the sweep commands rather than the scenario.
inline constexpr std::array<std::string_view, 7> sweep_keys = {"axis",       "values",  "q_list", "ab_list",
                                                              "delta_list", "r_pairs", "q_pairs"};

inline void assign_key(config_document &doc, const std::string &key, const json &value)
{
    if (apply_key(doc.scenario, key, value))
    {
        if (key == "trials")
            doc.trials_set = true;
        return;
    }
    if (std::find(sweep_keys.begin(), sweep_keys.end(), key) == sweep_keys.end())
        throw config_error("config: unknown key '" + key + "'");
    doc.extra[key] = value;
}

inline config_document parse_config(const json &doc)
{
    if (!doc.is_object())
        throw config_error("config: top level must be an object of key/value pairs");
    config_document out;
    for (const auto &[key, value] : doc.items())
        assign_key(out, key, value);
    return out;
}

inline config_document load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    json doc;
    try
    {
        doc = json::parse(in, nullptr, true, true);
    }
    catch (const json::parse_error &e)
    {
        throw config_error("config: " + path + ": " + e.what());
    }
    return parse_config(doc);
}

// Parses the right-hand side of key=value as JSON, falling back to a string.
inline json parse_value(const std::string &text)
{
    try
    {
        return json::parse(text);
    }
    catch (const json::parse_error &)
    {
        return text;
    }
}

} // namespace mrelay

#endif
