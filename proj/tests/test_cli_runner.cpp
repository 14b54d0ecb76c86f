#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcrelay/cli_runner.hpp"

using namespace mcrelay;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / fs::path("mcrelay_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                     "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json small_experiment(const std::string& name) {
    return {{"name", name},         {"M", 2},          {"K", 1},           {"snr_db_start", 10.0},
            {"snr_db_stop", 20.0},  {"snr_db_step", 5.0}, {"trials", 20000}, {"seed", 3},
            {"outputs", {"csv", "json"}}};
}

}  // namespace

TEST(Units, BitsToThreshold) {
    EXPECT_NEAR(threshold_from_xi(bits_to_nats(1.0)), 1.3863, 1e-4);
    EXPECT_DOUBLE_EQ(threshold_from_xi(1.0), 2.0);
    const auto spec = parse_run_spec({{"experiments", {{{"rate_bits", 1.0}}}}});
    EXPECT_NEAR(spec.experiments[0].s_threshold(), 2.0 * std::log(2.0), 1e-15);
}

TEST(ParseSpec, DefaultsMirrorPaperSetup) {
    const auto spec = parse_run_spec({{"experiments", {nlohmann::json::object()}}});
    ASSERT_EQ(spec.experiments.size(), 1u);
    const auto& e = spec.experiments[0];
    EXPECT_EQ(e.name, "exp0");
    EXPECT_EQ(e.M, 2);
    EXPECT_EQ(e.K, 2);
    EXPECT_EQ(e.protocol, ProtocolKind::DF);
    EXPECT_EQ(e.scheme, SelectionScheme::Bulk);
    EXPECT_EQ(e.mu1, 1.0);
    EXPECT_EQ(e.mu2, 1.0);
    EXPECT_EQ(e.s_threshold(), 2.0);
    EXPECT_EQ(e.snr_grid_db(), (std::vector<double>{15, 20, 25, 30, 35, 40, 45, 50}));
}

TEST(ParseSpec, ReadsFields) {
    const auto spec = parse_run_spec({{"output_dir", "out"},
                                      {"threads", 3},
                                      {"experiments",
                                       {{{"name", "vg"},
                                         {"M", 3},
                                         {"K", 4},
                                         {"protocol", "vg"},
                                         {"scheme", "per-subcarrier"},
                                         {"mu2", 2.5},
                                         {"xi", 0.75},
                                         {"snr_db_start", 0},
                                         {"snr_db_stop", 1},
                                         {"snr_db_step", 0.25},
                                         {"trials", 10},
                                         {"seed", 77},
                                         {"outputs", {"json"}}}}}});
    EXPECT_EQ(spec.output_dir, "out");
    EXPECT_EQ(spec.threads, 3u);
    const auto& e = spec.experiments[0];
    EXPECT_EQ(e.protocol, ProtocolKind::VG);
    EXPECT_EQ(e.scheme, SelectionScheme::PerSubcarrier);
    EXPECT_EQ(e.M, 3);
    EXPECT_EQ(e.K, 4);
    EXPECT_EQ(e.mu2, 2.5);
    EXPECT_EQ(e.s_threshold(), 1.5);
    EXPECT_EQ(e.snr_grid_db().size(), 5u);
    EXPECT_EQ(e.seed, 77u);
    EXPECT_EQ(e.outputs, std::vector<std::string>{"json"});
}

TEST(ParseSpec, Errors) {
    const auto bad = [](nlohmann::json exp) {
        EXPECT_THROW(parse_run_spec({{"experiments", {exp}}}), std::invalid_argument) << exp.dump();
    };
    bad({{"M", 0}});
    bad({{"K", 0}});
    bad({{"K", 65}});
    bad({{"M", 1.5}});
    bad({{"M", 4294967298LL}});
    bad({{"trials", -1}});
    bad({{"trials", 0}});
    bad({{"protocol", "AF"}});
    bad({{"scheme", "best"}});
    bad({{"mu1", 0.0}});
    bad({{"xi", 1.0}, {"rate_bits", 1.0}});
    bad({{"xi", -1.0}});
    bad({{"snr_db_step", 0.0}});
    bad({{"snr_db_start", 30.0}, {"snr_db_stop", 20.0}});
    bad({{"outputs", {"xml"}}});
    bad({{"colour", "blue"}});
    bad({{"name", "../escape"}});
    bad({{"name", "summary"}});
    bad(42);
    EXPECT_THROW(parse_run_spec(nlohmann::json::array()), std::invalid_argument);
    EXPECT_THROW(parse_run_spec({{"runs", nlohmann::json::array()}}), std::invalid_argument);
    EXPECT_THROW(parse_run_spec({{"experiments", {{{"name", "a"}}, {{"name", "a"}}}}}), std::invalid_argument);
}

TEST(LoadSpec, FileErrors) {
    TempDir dir;
    EXPECT_THROW(load_run_spec(dir.path() / "missing.json"), std::invalid_argument);
    std::ofstream(dir.path() / "broken.json") << "{ not json";
    EXPECT_THROW(load_run_spec(dir.path() / "broken.json"), std::invalid_argument);
    std::ofstream(dir.path() / "ok.json") << R"({"experiments": [{"name": "a", "K": 1}]})";
    EXPECT_EQ(load_run_spec(dir.path() / "ok.json").experiments.at(0).K, 1);
}

TEST(Csv, HeaderAndRows) {
    OutageCurve curve(2);
    curve[0].snr_db = 10.0;
    curve[0].analytic = 0.5;
    curve[0].asymptotic = 0.25;
    curve[0].mc = wilson_estimate(5, 10);
    curve[1].snr_db = 15.0;
    curve[1].clamped = true;
    curve[1].mc = wilson_estimate(0, 10);
    const auto csv = format_csv(curve);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "snr_db,analytic,asymptotic,mc_p_hat,mc_ci_low,mc_ci_high,clamped_flag");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("1.000000000000e+01,5.000000000000e-01,2.500000000000e-01,5.000000000000e-01,", 0), 0u) << line;
    EXPECT_EQ(line.back(), '0');
    std::getline(in, line);
    EXPECT_NE(line.find(",0.000000000000e+00,,"), std::string::npos) << line;
    EXPECT_EQ(line.back(), '1');
}

TEST(Json, SameFieldsAsCsv) {
    OutageCurve curve(1);
    curve[0].snr_db = 20.0;
    curve[0].mc = wilson_estimate(3, 100);
    const auto j = curve_to_json(curve);
    ASSERT_EQ(j.size(), 1u);
    for (const char* key : {"snr_db", "analytic", "asymptotic", "mc_p_hat", "mc_ci_low", "mc_ci_high", "clamped_flag"})
        EXPECT_TRUE(j[0].contains(key)) << key;
    EXPECT_EQ(j[0].size(), 7u);
    EXPECT_TRUE(j[0]["asymptotic"].is_null());
    EXPECT_EQ(j[0]["mc_p_hat"].get<double>(), 0.03);
}

TEST(Slope, FitsTopWindow) {
    OutageCurve curve;
    for (double db = 0.0; db <= 50.0; db += 5.0) {
        CurvePoint p;
        p.snr_db = db;
        p.analytic = db < 30.0 ? 0.5 : std::pow(10.0, -0.4 * db);
        p.mc = wilson_estimate(100, 1000);
        curve.push_back(p);
    }
    const auto fit = fit_high_snr_slope(curve);
    ASSERT_TRUE(fit.analytic.has_value());
    EXPECT_NEAR(*fit.analytic, -0.4, 1e-12);
    ASSERT_TRUE(fit.monte_carlo.has_value());
    EXPECT_NEAR(*fit.monte_carlo, 0.0, 1e-12);
    EXPECT_FALSE(fit_high_snr_slope({}).analytic.has_value());
}

TEST(OutputDir, Precedence) {
    RunSpec spec;
    ::unsetenv(kOutputDirEnv);
    EXPECT_EQ(resolve_output_dir(std::nullopt, spec), fs::path("."));
    ::setenv(kOutputDirEnv, "/tmp/from_env", 1);
    EXPECT_EQ(resolve_output_dir(std::nullopt, spec), fs::path("/tmp/from_env"));
    spec.output_dir = "from_spec";
    EXPECT_EQ(resolve_output_dir(std::nullopt, spec), fs::path("from_spec"));
    EXPECT_EQ(resolve_output_dir(std::string("explicit"), spec), fs::path("explicit"));
    ::unsetenv(kOutputDirEnv);
}

TEST(Run, EmptySpecWritesNothing) {
    TempDir dir;
    std::ostringstream log;
    EXPECT_EQ(run(parse_run_spec({{"experiments", nlohmann::json::array()}}), dir.path() / "out", log), 0);
    EXPECT_FALSE(fs::exists(dir.path() / "out"));
}

TEST(Run, WritesFilesAndSummary) {
    TempDir dir;
    auto vg = small_experiment("vg");
    vg["protocol"] = "VG";
    const auto spec = parse_run_spec({{"experiments", {small_experiment("df"), vg}}});
    std::ostringstream log;
    std::vector<ExperimentOutcome> outcomes;
    ASSERT_EQ(run(spec, dir.path(), log, &outcomes), 0) << log.str();
    ASSERT_EQ(outcomes.size(), 2u);
    EXPECT_EQ(outcomes[0].diversity, 2);

    const auto csv = slurp(dir.path() / "df.csv");
    EXPECT_EQ(csv.rfind(std::string(kCsvHeader) + "\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    const auto json = nlohmann::json::parse(slurp(dir.path() / "df.json"));
    EXPECT_EQ(json.size(), 3u);
    EXPECT_EQ(json[2]["snr_db"].get<double>(), 20.0);

    // VG has no asymptote: the column is empty.
    const auto vg_csv = slurp(dir.path() / "vg.csv");
    EXPECT_NE(vg_csv.find(",,"), std::string::npos);

    const auto summary = slurp(dir.path() / "summary.csv");
    EXPECT_EQ(summary.rfind("name,diversity,expected_slope_per_db,analytic_slope_per_db,mc_slope_per_db,status\n", 0), 0u);
    EXPECT_NE(summary.find("df,2,-0.200000,"), std::string::npos) << summary;
}

TEST(Run, DeterministicAcrossThreadCounts) {
    TempDir dir;
    auto spec = parse_run_spec({{"experiments", {small_experiment("a")}}});
    std::ostringstream log;
    spec.threads = 1;
    ASSERT_EQ(run(spec, dir.path() / "t1", log), 0);
    spec.threads = 4;
    ASSERT_EQ(run(spec, dir.path() / "t4", log), 0);
    EXPECT_EQ(slurp(dir.path() / "t1" / "a.csv"), slurp(dir.path() / "t4" / "a.csv"));
    EXPECT_EQ(slurp(dir.path() / "t1" / "a.json"), slurp(dir.path() / "t4" / "a.json"));
}

TEST(Run, FailingExperimentDoesNotAbortBatch) {
    TempDir dir;
    // A directory where the CSV should go makes the first experiment fail.
    fs::create_directories(dir.path() / "blocked.csv");
    const auto spec = parse_run_spec({{"experiments", {small_experiment("blocked"), small_experiment("fine")}}});
    std::ostringstream log;
    std::vector<ExperimentOutcome> outcomes;
    EXPECT_EQ(run(spec, dir.path(), log, &outcomes), 1);
    EXPECT_FALSE(outcomes[0].ok);
    EXPECT_TRUE(outcomes[1].ok);
    EXPECT_TRUE(fs::exists(dir.path() / "fine.csv"));
    EXPECT_NE(log.str().find("blocked,"), std::string::npos);
    EXPECT_NE(slurp(dir.path() / "summary.csv").find("failed"), std::string::npos);
}
