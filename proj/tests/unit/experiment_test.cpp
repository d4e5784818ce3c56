#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcakdd/errors.hpp"
#include "dcakdd/experiment.hpp"
#include "synthetic_kdd.hpp"

namespace dcakdd {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// provenance.txt without its timestamp line.
std::string provenance_body(const fs::path& dir) {
  const auto text = slurp(dir / "provenance.txt");
  return text.substr(text.find('\n') + 1);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class ExperimentTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    for (const auto& l : testing::synthetic_kdd_lines(1500, 17)) {
      records_.push_back(parse_kdd_record(l));
    }
  }
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dcakdd_experiment_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static ExperimentConfig small(ExperimentId id) {
    ExperimentConfig c;
    c.experiment = id;
    c.seeds = {1, 2, 3};
    c.nsa.detector_count = 100;
    return c;
  }

  static inline std::vector<ConnectionRecord> records_;
  fs::path dir_;
};

TEST_F(ExperimentTest, DefaultSweepsHaveTheDocumentedRowCounts) {
  EXPECT_EQ(run_experiment(small(ExperimentId::E1_1), records_).configurations.size(), 1u);
  const auto e12 = run_experiment(small(ExperimentId::E1_2), records_);
  EXPECT_EQ(e12.configurations.size(), 4u);
  EXPECT_EQ(e12.significance.size(), 4u);
  const auto e13 = run_experiment(small(ExperimentId::E1_3), records_);
  EXPECT_EQ(e13.configurations.size(), 7u);
  EXPECT_EQ(e13.significance.size(), 7u);
  const auto e2 = run_experiment(small(ExperimentId::E2), records_);
  ASSERT_EQ(e2.configurations.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(e2.configurations[i].parameter, std::to_string(i + 2));
    EXPECT_EQ(e2.configurations[i].runs.size(), 10u);  // one per fold
  }
  const auto e1 = run_experiment(small(ExperimentId::E1), records_);
  EXPECT_EQ(e1.configurations.size(), 12u);
  EXPECT_EQ(e1.configurations.front().category, "E1.1");
}

TEST_F(ExperimentTest, PerSeedRunsAndMcavTables) {
  auto config = small(ExperimentId::E1_1);
  config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto report = run_experiment(config, records_);
  const auto& c = report.configurations.front();
  EXPECT_EQ(c.runs.size(), 10u);
  EXPECT_EQ(c.mcav_tables.size(), 10u);
  EXPECT_EQ(report.perfect.size(), 5u);  // http normal and back share a type
  ASSERT_TRUE(c.mean.tp_rate.has_value());
  EXPECT_GT(*c.mean.tp_rate, 0.5);
  EXPECT_GT(*c.mean.tn_rate, 0.5);
}

TEST_F(ExperimentTest, EmitReportStructure) {
  auto config = small(ExperimentId::E1_1);
  config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  emit_report(run_experiment(config, records_), dir_);

  const auto table = lines_of(slurp(dir_ / "table.tsv"));
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0], "category\tparameter\ttp\ttn\tfp\tfn");
  EXPECT_EQ(table[1].substr(0, 7), "E1.1\t-\t");
  EXPECT_EQ(lines_of(slurp(dir_ / "runs.tsv")).size(), 11u);
  EXPECT_EQ(lines_of(slurp(dir_ / "roc_points.tsv")).size(), 2u);
  EXPECT_TRUE(fs::exists(dir_ / "mcav" / "perfect.tsv"));
  EXPECT_TRUE(fs::exists(dir_ / "mcav" / "E1.1_-_seed10.tsv"));
  EXPECT_TRUE(fs::exists(dir_ / "signals.cfg"));
  EXPECT_FALSE(fs::exists(dir_ / "significance.tsv"));

  const auto prov = slurp(dir_ / "provenance.txt");
  EXPECT_EQ(prov.rfind("# generated ", 0), 0u);
  EXPECT_NE(prov.find("seeds 1 2 3 4 5 6 7 8 9 10\n"), std::string::npos);
  EXPECT_NE(prov.find("reference C4.5 tp_rate 0.988 fp_rate 0.008"), std::string::npos);
  for (const auto& entry : fs::directory_iterator(dir_)) {
    EXPECT_NE(entry.path().extension(), ".tmp");
  }

  EXPECT_THROW(emit_report(ExperimentReport{}, dir_ / "empty"), DomainError);
}

TEST_F(ExperimentTest, ReportsAreByteIdenticalAcrossReruns) {
  for (auto id : {ExperimentId::E1_2, ExperimentId::E2}) {
    auto config = small(id);
    config.dimensions = {2, 3};
    emit_report(run_experiment(config, records_), dir_ / "a");
    emit_report(run_experiment(config, records_), dir_ / "b");
    for (const auto& entry : fs::recursive_directory_iterator(dir_ / "a")) {
      if (!entry.is_regular_file()) continue;
      const auto rel = fs::relative(entry.path(), dir_ / "a");
      if (rel == "provenance.txt") {
        EXPECT_EQ(provenance_body(dir_ / "a"), provenance_body(dir_ / "b"));
      } else {
        EXPECT_EQ(slurp(entry.path()), slurp(dir_ / "b" / rel)) << rel;
      }
    }
    fs::remove_all(dir_ / "a");
    fs::remove_all(dir_ / "b");
  }
}

TEST_F(ExperimentTest, SignificanceRowsCompareAgainstBase) {
  auto config = small(ExperimentId::E1_3);
  config.windows = {2, 1000};
  const auto report = run_experiment(config, records_);
  ASSERT_EQ(report.significance.size(), 2u);
  for (const auto& s : report.significance) {
    EXPECT_EQ(s.baseline, "E1.1:-");
    EXPECT_EQ(s.test.u_x + s.test.u_y, 9.0);
  }
  emit_report(report, dir_);
  EXPECT_EQ(lines_of(slurp(dir_ / "significance.tsv")).size(), 3u);
}

TEST_F(ExperimentTest, CustomRunUsesItsParameters) {
  auto config = small(ExperimentId::Custom);
  config.dca.multiplier = 5;
  config.dca.window = 3;
  const auto report = run_experiment(config, records_);
  ASSERT_EQ(report.configurations.size(), 1u);
  EXPECT_EQ(report.configurations[0].parameter, "k=5,w=3");
  std::uint64_t presented = 0;
  for (const auto& [type, e] : report.configurations[0].mcav_tables[0].entries()) presented += e.total;
  EXPECT_EQ(presented, 5u * records_.size());
}

TEST_F(ExperimentTest, ConfigValidation) {
  auto c = small(ExperimentId::E1_2);
  c.multipliers = {};
  EXPECT_THROW(run_experiment(c, records_), ConfigError);
  c = small(ExperimentId::E1_3);
  c.windows = {0};
  EXPECT_THROW(run_experiment(c, records_), ConfigError);
  c = small(ExperimentId::E2);
  c.dimensions = {11};
  EXPECT_THROW(run_experiment(c, records_), ConfigError);
  c = small(ExperimentId::E1_1);
  c.seeds = {};
  EXPECT_THROW(run_experiment(c, records_), ConfigError);
  EXPECT_THROW(run_experiment(small(ExperimentId::E1_1), std::span<const ConnectionRecord>{}),
               ConfigError);
  c = small(ExperimentId::E1_1);
  c.data_path = dir_ / "missing.gz";
  EXPECT_THROW(run_experiment(c), IoError);
}

TEST(ExperimentConfigJson, RoundTripAndOverrides) {
  ExperimentConfig c;
  c.experiment = ExperimentId::E2;
  c.seeds = {5, 6};
  c.dimensions = {2, 4};
  c.nsa.detector_count = 77;
  c.weighting = Weighting::Types;
  const auto back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back.experiment, ExperimentId::E2);
  EXPECT_EQ(back.seeds, c.seeds);
  EXPECT_EQ(back.dimensions, c.dimensions);
  EXPECT_EQ(back.nsa.detector_count, 77u);
  EXPECT_EQ(back.weighting, Weighting::Types);
  EXPECT_EQ(back.dca.weights, WeightMatrix::defaults());
  EXPECT_EQ(back.to_json(), c.to_json());

  const auto partial = ExperimentConfig::from_json(R"({"dca": {"threshold_range": [50, 60]}})");
  EXPECT_EQ(partial.dca.threshold_lower, 50.0);
  EXPECT_EQ(partial.dca.threshold_upper, 60.0);
  EXPECT_EQ(partial.seeds.size(), 10u);

  EXPECT_THROW(ExperimentConfig::from_json(R"({"bogus": 1})"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"dca": {"bogus": 1}})"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"seeds": "x"})"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json("{"), ConfigError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"experiment": "E9"})"), ConfigError);
}

TEST(ExperimentConfigJson, DefaultsMatchReferenceSetup) {
  const ExperimentConfig c;
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_EQ(c.multipliers, (std::vector<std::int64_t>{5, 10, 50, 100}));
  EXPECT_EQ(c.windows, (std::vector<std::int64_t>{2, 3, 5, 7, 10, 100, 1000}));
  EXPECT_EQ(c.dimensions, (std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8, 9, 10}));
  EXPECT_EQ(c.folds, 10u);
  EXPECT_EQ(c.alpha, 0.05);
  EXPECT_EQ(c.dca.population, 100u);
  EXPECT_EQ(c.nsa.detector_count, 1000u);
}

TEST(FormatRate, ShortestAndUndefined) {
  EXPECT_EQ(format_rate(0.7375), "0.7375");
  EXPECT_EQ(format_rate(1.0), "1");
  EXPECT_EQ(format_rate(std::nullopt), "NA");
}

TEST_F(ExperimentTest, InfogainFile) {
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 16; ++i) {
    const bool attack = i % 4 == 0;
    records.push_back(parse_kdd_record(testing::kdd_line(
        "tcp", "http", "SF", attack ? "smurf" : "normal", {{24, attack ? 1.0 : 0.0}})));
  }
  emit_infogain(records, dir_ / "nested" / "gain.tsv");
  const auto rows = lines_of(slurp(dir_ / "nested" / "gain.tsv"));
  ASSERT_EQ(rows.size(), 42u);
  EXPECT_EQ(rows[0], "attribute\tgain\tdefault_signal");
  // The determining attribute carries the full label entropy of (1/4, 3/4).
  EXPECT_EQ(rows[1].substr(0, 12), "serror_rate\t");
  EXPECT_NEAR(std::stod(rows[1].substr(12)), 0.8112781244591328, 1e-15);
  EXPECT_EQ(rows[1].substr(rows[1].rfind('\t')), "\tyes");
  EXPECT_EQ(rows[2], "duration\t0\tno");
  double previous = 2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto gain = std::stod(rows[i].substr(rows[i].find('\t') + 1));
    EXPECT_LE(gain, previous);
    previous = gain;
  }
}

}  // namespace
}  // namespace dcakdd
