#include "anonsense/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "anonsense/anonymity.hpp"

using namespace anonsense;
namespace fs = std::filesystem;

namespace {

struct Captured {
    int exit_code = -1;
    std::string out;
};

Captured run_cli(const std::string& args) {
    const std::string cmd = std::string(ANONSENSE_CLI_PATH) + " " + args + " 2>/dev/null";
    Captured c;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return c;
    char buf[4096];
    std::size_t n = 0;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) c.out.append(buf, n);
    const int status = pclose(pipe);
    c.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return c;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

fs::path temp_file(const std::string& name, const std::string& contents) {
    const auto path = fs::temp_directory_path() / ("anonsense_test_" + name);
    std::ofstream(path) << contents;
    return path;
}

}  // namespace

TEST(Config, DefaultsValidate) {
    ExperimentConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    EXPECT_FALSE(cfg.N.has_value());
}

TEST(Config, JsonMergeAndRoundTrip) {
    ExperimentConfig cfg;
    apply_json(cfg, nlohmann::json::parse(R"({"L": 64, "k": 2, "N": 100, "mode": "both", "dt": 0.3})"));
    EXPECT_EQ(cfg.L, 64u);
    EXPECT_EQ(cfg.k, 2u);
    EXPECT_EQ(cfg.N, 100u);
    EXPECT_EQ(cfg.mode, Mode::both);
    EXPECT_EQ(cfg.dt, 0.3);
    EXPECT_EQ(cfg.omega_max, 5.0);
    const auto again = config_from_json(to_json(cfg));
    EXPECT_EQ(to_json(again), to_json(cfg));
    apply_json(cfg, nlohmann::json::parse(R"({"N": "auto"})"));
    EXPECT_FALSE(cfg.N.has_value());
}

TEST(Config, RejectsBadInput) {
    ExperimentConfig cfg;
    EXPECT_THROW(apply_json(cfg, nlohmann::json::parse(R"({"bogus": 1})")), ConfigError);
    EXPECT_THROW(apply_json(cfg, nlohmann::json::parse(R"({"L": "many"})")), ConfigError);
    EXPECT_THROW(apply_json(cfg, nlohmann::json::parse(R"({"N": "lots"})")), ConfigError);
    EXPECT_THROW(apply_json(cfg, nlohmann::json::parse("[1]")), ConfigError);
    EXPECT_THROW(mode_from_string("fast"), ConfigError);

    auto check = [](auto mutate) {
        ExperimentConfig c;
        mutate(c);
        EXPECT_THROW(c.validate(), ConfigError);
    };
    check([](ExperimentConfig& c) { c.L = 0; });
    check([](ExperimentConfig& c) { c.k = 0; });
    check([](ExperimentConfig& c) { c.omega_min = 6.0; });
    check([](ExperimentConfig& c) { c.dt_grid = 2; });
    check([](ExperimentConfig& c) { c.N = 0; });
    check([](ExperimentConfig& c) { c.dt = -1.0; });
    check([](ExperimentConfig& c) { c.L_list = {100, 10}; });
}

TEST(Config, AutoN) {
    ExperimentConfig cfg;
    EXPECT_EQ(resolve_N(cfg, 1'000'000), 50'660u);
    EXPECT_THROW(resolve_N(cfg, 10), ConfigError);
    cfg.N = 7;
    EXPECT_EQ(resolve_N(cfg, 10), 7u);
}

TEST(Config, LargeRunsAreAnalyticOnly) {
    ExperimentConfig cfg;
    cfg.mode = Mode::both;
    EXPECT_EQ(effective_mode(cfg, 1000), Mode::both);
    EXPECT_EQ(effective_mode(cfg, kAnalyticOnlySites), Mode::analytic);
}

TEST(SweepDt, InteriorMinimumAndCsvShape) {
    ExperimentConfig cfg;
    cfg.dt_grid = 60;
    const auto result = run_sweep_dt(cfg);
    ASSERT_EQ(result.rows.size(), 60u);
    EXPECT_GT(result.best_index, 0u);
    EXPECT_LT(result.best_index, 59u);
    EXPECT_EQ(result.metadata["resolved"]["N"], max_secure_N(10'000, 1));

    const auto csv = lines(to_csv(result));
    ASSERT_EQ(csv.size(), 62u);
    EXPECT_EQ(csv[0].rfind("# config: {", 0), 0u);
    EXPECT_EQ(csv[1], csv_header() + ",log10_relative_uncertainty");
    EXPECT_EQ(csv[2].rfind("10000,1,", 0), 0u);
}

TEST(SweepDt, MonteCarloColumnsAndSelfCheck) {
    ExperimentConfig cfg;
    cfg.L = 64;
    cfg.N = 2000;
    cfg.dt_grid = 5;
    cfg.mode = Mode::both;
    cfg.self_check = true;
    const auto a = run_sweep_dt(cfg);
    const auto b = run_sweep_dt(cfg);
    EXPECT_TRUE(a.self_check_passed);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        ASSERT_TRUE(a.rows[i].mc_z);
        EXPECT_EQ(*a.rows[i].mc_moment_estimate, *b.rows[i].mc_moment_estimate);
    }
    EXPECT_NE(lines(to_csv(a))[1].find(",mc_moment_estimate,mc_z"), std::string::npos);
}

TEST(SweepL, TrendAndCsv) {
    ExperimentConfig cfg;
    cfg.dt_grid = 40;
    const auto result = run_sweep_L(cfg, {1'000, 10'000, 100'000});
    ASSERT_EQ(result.rows.size(), 3u);
    EXPECT_TRUE(result.non_increasing);
    EXPECT_TRUE(result.warnings.empty());
    for (const auto& row : result.rows) EXPECT_EQ(row.N, max_secure_N(row.L, 1));
    EXPECT_EQ(lines(to_csv(result))[1], "L,N,dt_star,min_relative_uncertainty,log10_min_relative_uncertainty");
    EXPECT_THROW(run_sweep_L(cfg, {}), ConfigError);
}

TEST(Estimate, FixedDtAndFieldsFile) {
    const auto path = temp_file("fields.txt", "# two sites\n1\n5\n");
    ExperimentConfig cfg;
    cfg.fields_path = path.string();
    cfg.dt = 0.2;
    cfg.N = 10'000;
    const auto result = run_estimate(cfg);
    EXPECT_EQ(result.report.L, 2u);
    EXPECT_NEAR(result.report.total_uncertainty, 0.4047885264156645, 1e-12);
    fs::remove(path);

    cfg.fields_path = "/nonexistent/fields.txt";
    EXPECT_THROW(run_estimate(cfg), ConfigError);
}

TEST(Cli, EstimateMatchesLibrary) {
    const auto path = temp_file("cli_fields.json", "[1, 5]");
    const auto c = run_cli("estimate --fields " + path.string() + " --dt 0.2 -N 10000");
    fs::remove(path);
    ASSERT_EQ(c.exit_code, 0);
    const auto csv = lines(c.out);
    ASSERT_EQ(csv.size(), 3u);
    EXPECT_EQ(csv[1], csv_header());
    EXPECT_EQ(csv[2].rfind("2,1,0.2,10000,", 0), 0u);
}

TEST(Cli, ConfigFileWithFlagOverride) {
    const auto path = temp_file("cli_config.json", R"({"L": 500, "k": 2, "N": 40, "dt": 0.1})");
    const auto c = run_cli("estimate --config " + path.string() + " -k 1");
    fs::remove(path);
    ASSERT_EQ(c.exit_code, 0);
    EXPECT_EQ(lines(c.out)[2].rfind("500,1,0.1,40,", 0), 0u);
}

TEST(Cli, AnonymityAndSample) {
    const auto a = run_cli("anonymity -L 1000000 -k 1 --dt 0.1");
    ASSERT_EQ(a.exit_code, 0);
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j.at("N"), 50'660);
    EXPECT_EQ(j.at("secure"), true);

    const auto s = run_cli("sample -L 64 -k 1 --dt 0.3 -N 1000 --seed 4 --raw");
    ASSERT_EQ(s.exit_code, 0);
    const auto js = nlohmann::json::parse(s.out);
    EXPECT_EQ(js.at("run").at("per_repeat_C").size(), 1000u);
    EXPECT_EQ(run_cli("sample -L 64 -k 1 --dt 0.3 -N 1000 --seed 4 --raw").out, s.out);
}

TEST(Cli, ExitCodes) {
    EXPECT_EQ(run_cli("sweep-dt -L 0").exit_code, 2);
    EXPECT_EQ(run_cli("sweep-dt -L 10").exit_code, 2);
    EXPECT_EQ(run_cli("estimate --mode turbo").exit_code, 2);
    EXPECT_EQ(run_cli("estimate -N many").exit_code, 2);
    EXPECT_EQ(run_cli("estimate --fields /nonexistent").exit_code, 2);
    EXPECT_EQ(run_cli("nonsense").exit_code, 2);
    EXPECT_EQ(run_cli("validate-oracle --oracle-sites 6").exit_code, 2);
    EXPECT_EQ(run_cli("validate-oracle --oracle-sites 2,4 --trials 3").exit_code, 0);
}

TEST(Cli, OutputFile) {
    const auto path = fs::temp_directory_path() / "anonsense_test_sweep.csv";
    const auto c = run_cli("sweep-dt -L 2000 --dt-grid 10 -o " + path.string());
    ASSERT_EQ(c.exit_code, 0);
    EXPECT_TRUE(c.out.empty());
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(lines(ss.str()).size(), 12u);
    fs::remove(path);
}
