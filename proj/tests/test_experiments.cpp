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


#include <gtest/gtest.h>

#include <clocale>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mrelay/experiments.hpp"

using namespace mrelay;

namespace
{

struct parsed_csv
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> metadata;
};

parsed_csv parse_csv(const std::string &text)
{
    parsed_csv out;
    std::istringstream in(text);
    std::string line;
    auto split = [](const std::string &l) {
        std::vector<std::string> cells;
        std::stringstream ss(l);
        std::string cell;
        while (std::getline(ss, cell, ','))
            cells.push_back(cell);
        return cells;
    };
    while (std::getline(in, line))
    {
        if (line.rfind("#", 0) == 0)
            out.metadata.push_back(line);
        else if (out.header.empty())
            out.header = split(line);
        else
            out.rows.push_back(split(line));
    }
    return out;
}

config_document doc_with(std::initializer_list<std::pair<const char *, json>> kv)
{
    config_document d;
    for (const auto &[k, v] : kv)
        assign_key(d, k, v);
    return d;
}

double cell(const parsed_csv &t, std::size_t row, const std::string &column)
{
    for (std::size_t c = 0; c < t.header.size(); ++c)
        if (t.header[c] == column)
            return std::stod(t.rows[row][c]);
    throw std::runtime_error("no column " + column);
}

std::string read_file(const std::filesystem::path &p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

int run_cli(const std::string &args)
{
    const std::string cmd = std::string(MRELAY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST(FormatDouble, RoundTripAndLocaleIndependent)
{
    for (double v : {0.1, 1.0 / 3.0, 12345.678, 1e-300, -2.5})
        EXPECT_EQ(std::stod(format_double(v)), v);
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_EQ(format_double(not_computed), "nan");
    if (std::setlocale(LC_ALL, "de_DE.UTF-8"))
    {
        EXPECT_EQ(format_double(0.5), "0.5");
        std::setlocale(LC_ALL, "C");
    }
}

TEST(CsvTable, HeaderRowsAndMetadata)
{
    csv_table t({"a", "b"});
    t.add_row({"1", "2"});
    t.add_metadata("seed", "4");
    EXPECT_EQ(t.str(), "a,b\n1,2\n# seed: 4\n");
    EXPECT_THROW(t.add_row({"1"}), std::logic_error);
}

TEST(Config, ParsesKeysAndDecibels)
{
    const auto d = parse_config(json::parse(R"({"N": 64, "delta": 0.5, "E_U-dB": 10, "q1": "ideal", "q2": 3,
                                               "r_R": [0.1, 0.2], "betas": [1, 2], "values": [1, 2]})"));
    EXPECT_EQ(d.scenario.N, 64);
    EXPECT_EQ(d.scenario.delta, 0.5);
    EXPECT_NEAR(d.scenario.E_U, 10.0, 1e-12);
    EXPECT_TRUE(d.scenario.q1.is_ideal());
    EXPECT_EQ(d.scenario.q2.bits, 3);
    EXPECT_EQ(d.scenario.r_R, cplx(0.1, 0.2));
    ASSERT_TRUE(d.scenario.betas.has_value());
    EXPECT_EQ(d.scenario.betas->size(), 2u);
    EXPECT_TRUE(d.extra.contains("values"));
    EXPECT_FALSE(d.trials_set);
}

TEST(Config, RejectsBadInput)
{
    EXPECT_THROW(parse_config(json::parse(R"({"Nn": 64})")), config_error);
    EXPECT_THROW(parse_config(json::parse(R"({"N": "many"})")), config_error);
    EXPECT_THROW(parse_config(json::parse(R"({"q1": 0})")), config_error);
    EXPECT_THROW(parse_config(json::parse(R"([1, 2])")), config_error);
    EXPECT_THROW(load_config("/nonexistent/config.json"), config_error);
}

TEST(Config, LoadsFileWithComments)
{
    const auto path = std::filesystem::temp_directory_path() / "mrelay_test_config.json";
    {
        std::ofstream f(path);
        f << "{\n  // baseline with a smaller array\n  \"N\": 32,\n  \"trials\": 20\n}\n";
    }
    const auto d = load_config(path.string());
    EXPECT_EQ(d.scenario.N, 32);
    EXPECT_TRUE(d.trials_set);
    std::filesystem::remove(path);
}

TEST(MseSweep, FloorAndIdealDecay)
{
    run_options opt;
    opt.closed_form_only = true;
    const auto d = doc_with({{"q_list", json::array({1, "ideal"})}});
    const auto t = parse_csv(cmd_mse_sweep(d, opt).str());
    ASSERT_EQ(t.rows.size(), 2u * 5u * 2u);
    EXPECT_EQ(t.header, (std::vector<std::string>{"P-dB", "q", "hop", "mse_sim", "mse_sim_stderr", "mse_closed"}));
    // Row order: q, then power, then hop.
    for (std::size_t hop = 0; hop < 2; ++hop)
    {
        EXPECT_GE(cell(t, 8 + hop, "mse_closed") / cell(t, 6 + hop, "mse_closed"), 0.9);
        EXPECT_LE(cell(t, 18 + hop, "mse_closed") / cell(t, 10 + hop, "mse_closed"), 0.01);
    }
    EXPECT_EQ(t.rows[0][3], "nan");
}

TEST(MseSweep, SimulationTracksClosedForm)
{
    run_options opt;
    opt.trials = 400;
    opt.values = std::vector<json>{0, 30};
    const auto d = doc_with({{"q_list", json::array({2})}, {"N", 32}});
    const auto t = parse_csv(cmd_mse_sweep(d, opt).str());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        EXPECT_LE(std::abs(cell(t, r, "mse_sim") - cell(t, r, "mse_closed")), 4.0 * cell(t, r, "mse_sim_stderr"));
}

TEST(MseSweep, EmptyValuesRejected)
{
    run_options opt;
    opt.values = std::vector<json>{};
    EXPECT_THROW(cmd_mse_sweep(config_document{}, opt), config_error);
    EXPECT_THROW(cmd_mse_sweep(doc_with({{"values", json::array()}}), run_options{}), config_error);
}

TEST(RateVsN, SingleValueSingleRowAndGap)
{
    run_options opt;
    opt.trials = 200;
    opt.values = std::vector<json>{64};
    const auto t = parse_csv(cmd_rate_vs_n(doc_with({{"q_list", json::array({1, 2})}}), opt).str());
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.header,
              (std::vector<std::string>{"N", "q1", "q2", "rate_mc", "rate_mc_ci", "rate_closed", "rel_gap"}));
    for (std::size_t r = 0; r < 2; ++r)
        EXPECT_LE(std::abs(cell(t, r, "rel_gap")), 0.05);
    EXPECT_GT(cell(t, 1, "rate_mc"), cell(t, 0, "rate_mc"));
    EXPECT_GT(cell(t, 1, "rate_closed"), cell(t, 0, "rate_closed"));
}

TEST(RateVsN, EngineSelection)
{
    run_options opt;
    opt.values = std::vector<json>{32};
    opt.mc_only = true;
    opt.trials = 10;
    auto t = parse_csv(cmd_rate_vs_n(config_document{}, opt).str());
    EXPECT_EQ(t.rows[0][5], "nan");
    EXPECT_NE(t.rows[0][3], "nan");
    opt.closed_form_only = true;
    EXPECT_THROW(cmd_rate_vs_n(config_document{}, opt), config_error);
}

TEST(PowerScaling, RegimesAndTrends)
{
    run_options opt;
    opt.closed_form_only = true;
    opt.values = std::vector<json>{64, 128, 256, 512};
    auto d = doc_with({{"ab_list", json::array({json::array({1, 1}), json::array({0, 0})})},
                       {"perfect_csi", true},
                       {"betas", json::array({1, 1, 1, 1, 1, 1, 1, 1, 1, 1})},
                       {"eta", 1.0}});
    const auto t = parse_csv(cmd_power_scaling(d, opt).str());
    ASSERT_EQ(t.rows.size(), 8u);
    EXPECT_EQ(t.rows[0][2], "both_limited");
    EXPECT_EQ(t.rows[4][2], "unbounded");
    const double limit = cell(t, 0, "rate_limit");
    for (std::size_t r = 0; r < 4; ++r)
    {
        EXPECT_LT(cell(t, r, "rate_closed"), limit);
        if (r > 0)
        {
            EXPECT_GT(cell(t, r, "rate_closed"), cell(t, r - 1, "rate_closed"));
        }
    }
    EXPECT_GT(cell(t, 6, "rate_closed"), cell(t, 4, "rate_closed"));
    EXPECT_EQ(t.rows[4][7], "inf");
}

TEST(ImpactSweeps, CrossoversAtN200)
{
    run_options opt;
    opt.closed_form_only = true;
    opt.values = std::vector<json>{200};
    const auto corr = parse_csv(cmd_correlation_impact(config_document{}, opt).str());
    ASSERT_EQ(corr.rows.size(), 4u);
    // Rows: delta 0.5 then 2; pairs (0, 0.8) then (0.8, 0).
    EXPECT_LT(cell(corr, 0, "rate_closed"), cell(corr, 1, "rate_closed"));
    EXPECT_GT(cell(corr, 2, "rate_closed"), cell(corr, 3, "rate_closed"));
    const auto adc = parse_csv(cmd_adc_impact(config_document{}, opt).str());
    EXPECT_LT(cell(adc, 0, "rate_closed"), cell(adc, 1, "rate_closed"));
    EXPECT_GT(cell(adc, 2, "rate_closed"), cell(adc, 3, "rate_closed"));
    EXPECT_EQ(adc.header[1], "q1");
}

TEST(Validate, FilterAndNegativeControl)
{
    run_options opt;
    opt.filter = "lemma1";
    const auto lemma = cmd_validate(config_document{}, opt);
    EXPECT_TRUE(lemma.passed);
    const auto t = parse_csv(lemma.table.str());
    ASSERT_FALSE(t.rows.empty());
    for (const auto &r : t.rows)
        EXPECT_EQ(r[0].rfind("lemma1/", 0), 0u);

    opt.filter = "lloyd_max";
    EXPECT_TRUE(cmd_validate(config_document{}, opt).passed);
    opt.corrupt_table1 = true;
    EXPECT_FALSE(cmd_validate(config_document{}, opt).passed);

    opt.filter = "no-such-check";
    EXPECT_THROW(cmd_validate(config_document{}, opt), config_error);
}

TEST(Validate, FullSuitePasses)
{
    run_options opt;
    const auto res = cmd_validate(config_document{}, opt);
    EXPECT_TRUE(res.passed) << res.table.str();
}

TEST(Determinism, ByteIdenticalAcrossRunsAndThreads)
{
    run_options opt;
    opt.trials = 40;
    opt.values = std::vector<json>{32, 48};
    const auto d = doc_with({{"q_list", json::array({1, "ideal"})}});
    opt.threads = 1;
    const std::string a = cmd_rate_vs_n(d, opt).str();
    const std::string b = cmd_rate_vs_n(d, opt).str();
    opt.threads = 4;
    const std::string c = cmd_rate_vs_n(d, opt).str();
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    opt.values = std::vector<json>{0, 20};
    opt.threads = 1;
    const std::string m1 = cmd_mse_sweep(doc_with({{"N", 16}}), opt).str();
    opt.threads = 3;
    EXPECT_EQ(m1, cmd_mse_sweep(doc_with({{"N", 16}}), opt).str());
}

TEST(Cli, ExitCodesAndOutputFile)
{
    const auto dir = std::filesystem::temp_directory_path();
    const auto out = dir / "mrelay_cli_test.csv";
    EXPECT_EQ(run_cli("rate-vs-n --closed-form-only --values 32 --out " + out.string()), 0);
    const std::string text = read_file(out);
    EXPECT_NE(text.find("# seed: 1"), std::string::npos);
    EXPECT_NE(text.find("# command: rate-vs-n"), std::string::npos);
    EXPECT_NE(text.find("# version: "), std::string::npos);
    std::filesystem::remove(out);

    EXPECT_EQ(run_cli("rate-vs-n --set N=-3"), 1);
    EXPECT_EQ(run_cli("rate-vs-n --set bogus=1"), 1);
    EXPECT_EQ(run_cli("no-such-command"), 1);
    EXPECT_EQ(run_cli("rate-vs-n --config /nonexistent.json"), 1);
    EXPECT_EQ(run_cli("rate-vs-n --closed-form-only --set P1=0 --values 32"), 2);
    EXPECT_EQ(run_cli("validate --filter lloyd_max --corrupt-table1"), 3);
    EXPECT_EQ(run_cli("validate --filter lloyd_max"), 0);
}
