#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "dcakdd/errors.hpp"
#include "dcakdd/evaluation.hpp"
#include "dcakdd/mann_whitney.hpp"
#include "dcakdd/random.hpp"
#include "oracles.hpp"
#include "synthetic_kdd.hpp"

namespace dcakdd {
namespace {

using testing::kdd_line;
constexpr auto N = BinaryLabel::Normal;
constexpr auto A = BinaryLabel::Anomalous;

TEST(PerfectMcav, Examples) {
  std::vector<ConnectionRecord> records;
  for (int i = 0; i < 10; ++i) {
    records.push_back(parse_kdd_record(kdd_line("tcp", "http", "SF", i < 8 ? "back" : "normal")));
  }
  for (int i = 0; i < 4; ++i) records.push_back(parse_kdd_record(kdd_line("udp", "domain_u", "SF", "normal")));
  for (int i = 0; i < 3; ++i) records.push_back(parse_kdd_record(kdd_line("icmp", "ecr_i", "SF", "smurf")));
  const auto t = perfect_mcav(records);
  EXPECT_DOUBLE_EQ(*t.mcav("tcp:http:SF"), 0.8);
  EXPECT_EQ(*t.mcav("udp:domain_u:SF"), 0.0);
  EXPECT_EQ(*t.mcav("icmp:ecr_i:SF"), 1.0);
  const auto counts = type_instance_counts(records);
  EXPECT_EQ(counts.at("tcp:http:SF"), 10u);
  EXPECT_EQ(counts.at("icmp:ecr_i:SF"), 3u);
}

TEST(PerfectMcav, BoundedAndExactForPureTypes) {
  std::vector<ConnectionRecord> records;
  for (const auto& l : testing::synthetic_kdd_lines(2000, 4)) records.push_back(parse_kdd_record(l));
  const auto table = perfect_mcav(records);
  for (const auto& [type, e] : table.entries()) {
    EXPECT_GE(e.mcav, 0.0);
    EXPECT_LE(e.mcav, 1.0);
    if (e.mature == 0) EXPECT_EQ(e.mcav, 0.0);
    if (e.mature == e.total) EXPECT_EQ(e.mcav, 1.0);
  }
}

TEST(Confusion, PerfectAgreement) {
  const std::map<std::string, BinaryLabel> truth{{"a", A}, {"b", N}};
  const std::map<std::string, std::uint64_t> w{{"a", 3}, {"b", 5}};
  const auto r = confusion_rates(truth, truth, w);
  EXPECT_EQ(r, (ConfusionRates{1.0, 1.0, 0.0, 0.0}));
}

TEST(Confusion, DegenerateTruthLeavesRatesUndefined) {
  const std::map<std::string, BinaryLabel> truth{{"a", A}, {"b", A}};
  const std::map<std::string, BinaryLabel> predicted{{"a", N}, {"b", N}};
  const std::map<std::string, std::uint64_t> w{{"a", 1}, {"b", 1}};
  const auto r = confusion_rates(predicted, truth, w);
  EXPECT_EQ(r.tp_rate, 0.0);
  EXPECT_EQ(r.fn_rate, 1.0);
  EXPECT_FALSE(r.tn_rate.has_value());
  EXPECT_FALSE(r.fp_rate.has_value());
}

TEST(Confusion, InstanceWeighting) {
  const std::map<std::string, BinaryLabel> truth{{"A", A}, {"B", A}};
  const std::map<std::string, BinaryLabel> predicted{{"A", A}, {"B", N}};
  const std::map<std::string, std::uint64_t> w{{"A", 10}, {"B", 10}};
  const auto r = confusion_rates(predicted, truth, w);
  EXPECT_EQ(r.tp_rate, 0.5);
  EXPECT_EQ(r.fn_rate, 0.5);

  const std::map<std::string, std::uint64_t> skewed{{"A", 30}, {"B", 10}};
  EXPECT_EQ(confusion_rates(predicted, truth, skewed).tp_rate, 0.75);
  EXPECT_EQ(confusion_rates(predicted, truth, skewed, Weighting::Types).tp_rate, 0.5);
}

TEST(Confusion, CellsSumToTotalWeight) {
  Rng rng(3);
  std::map<std::string, BinaryLabel> truth, predicted;
  std::map<std::string, std::uint64_t> w;
  std::uint64_t total = 0;
  for (int i = 0; i < 50; ++i) {
    const auto name = "t" + std::to_string(i);
    truth[name] = rng.below(2) ? A : N;
    predicted[name] = rng.below(2) ? A : N;
    w[name] = 1 + rng.below(1000);
    total += w[name];
  }
  const auto c = confusion_counts(predicted, truth, w);
  EXPECT_EQ(c.total(), static_cast<double>(total));
  const auto r = ConfusionRates::from_counts(c);
  EXPECT_DOUBLE_EQ(*r.tp_rate + *r.fn_rate, 1.0);
  EXPECT_DOUBLE_EQ(*r.tn_rate + *r.fp_rate, 1.0);
}

TEST(Confusion, MismatchedUniversesAreErrors) {
  const std::map<std::string, BinaryLabel> truth{{"a", A}};
  const std::map<std::string, BinaryLabel> other{{"b", A}};
  const std::map<std::string, BinaryLabel> two{{"a", A}, {"b", A}};
  EXPECT_THROW(confusion_rates(other, truth, {{"a", 1}}), DomainError);
  EXPECT_THROW(confusion_rates(two, truth, {{"a", 1}}), DomainError);
  EXPECT_THROW(confusion_rates(truth, truth, {}), DomainError);
  EXPECT_NO_THROW(confusion_rates(truth, truth, {}, Weighting::Types));
}

RunResult run(std::uint64_t seed, std::optional<double> tp, std::optional<double> tn = 1.0) {
  ConfusionRates r;
  r.tp_rate = tp;
  r.fn_rate = tp ? std::optional<double>(1.0 - *tp) : std::nullopt;
  r.tn_rate = tn;
  r.fp_rate = tn ? std::optional<double>(1.0 - *tn) : std::nullopt;
  return {"cfg", seed, r};
}

TEST(Average, Examples) {
  std::vector<RunResult> same(10, run(1, 0.7375));
  const auto mean = average_runs(same);
  EXPECT_DOUBLE_EQ(*mean.tp_rate, 0.7375);
  EXPECT_DOUBLE_EQ(*mean.fn_rate, 1.0 - 0.7375);
  EXPECT_EQ(mean.tn_rate, 1.0);
  EXPECT_EQ(mean.fp_rate, 0.0);

  const std::vector<RunResult> two{run(1, 0.7), run(2, 0.8)};
  EXPECT_DOUBLE_EQ(*average_runs(two).tp_rate, 0.75);

  EXPECT_THROW(average_runs({}), DomainError);
  std::vector<RunResult> mixed{run(1, 0.5), run(2, 0.5)};
  mixed[1].configuration = "other";
  EXPECT_THROW(average_runs(mixed), DomainError);
}

TEST(Average, UndefinedPropagates) {
  const std::vector<RunResult> runs{run(1, 0.5), run(2, std::nullopt)};
  const auto mean = average_runs(runs);
  EXPECT_FALSE(mean.tp_rate.has_value());
  EXPECT_EQ(mean.tn_rate, 1.0);
}

TEST(Average, PermutationInvariantBitForBit) {
  Rng rng(12);
  std::vector<RunResult> runs;
  for (std::uint64_t s = 0; s < 10; ++s) runs.push_back(run(s, rng.uniform01(), rng.uniform01()));
  const auto reference = average_runs(runs);
  for (int i = 0; i < 50; ++i) {
    rng.shuffle(std::span<RunResult>(runs));
    EXPECT_EQ(average_runs(runs), reference);
  }
}

TEST(MannWhitney, Examples) {
  std::vector<double> x(10), y(10);
  std::iota(x.begin(), x.end(), 1.0);
  std::iota(y.begin(), y.end(), 11.0);
  const auto r = mann_whitney_two_sided(x, y);
  EXPECT_EQ(r.u, 0.0);
  EXPECT_TRUE(r.exact);
  EXPECT_TRUE(r.reject);
  EXPECT_NEAR(r.p_value, 1.082508822446903e-05, 1e-15);  // 2 / C(20, 10)
  EXPECT_EQ(r.u_x + r.u_y, 100.0);

  const auto same = mann_whitney_two_sided(x, x);
  EXPECT_FALSE(same.reject);
  EXPECT_EQ(same.u_x + same.u_y, 100.0);

  EXPECT_THROW(mann_whitney_two_sided({}, y), DomainError);
}

TEST(MannWhitney, ReferenceValues) {
  // Exact, no ties.
  const std::vector<double> a{1.5, 2.5, 7, 8, 9}, b{3, 4, 5, 6, 10, 11};
  const auto r = mann_whitney_two_sided(a, b);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.u, 12.0);
  EXPECT_NEAR(r.p_value, 0.6623376623376623, 1e-12);

  // Ties: normal approximation with tie correction and continuity.
  const std::vector<double> c{1, 2, 2, 3, 5, 8}, d{2, 3, 4, 6, 7, 9, 9};
  const auto t = mann_whitney_two_sided(c, d);
  EXPECT_FALSE(t.exact);
  EXPECT_EQ(t.u, 10.5);
  EXPECT_NEAR(t.p_value, 0.14972798189545122, 1e-9);
}

TEST(MannWhitney, UCountsSumToBinomial) {
  for (std::size_t nx = 1; nx <= 10; ++nx) {
    for (std::size_t ny = 1; ny <= 10; ++ny) {
      const auto counts = mann_whitney_u_counts(nx, ny);
      ASSERT_EQ(counts.size(), nx * ny + 1);
      long double sum = 0, binom = 1;
      for (auto c : counts) sum += c;
      for (std::size_t i = 1; i <= nx; ++i) binom = binom * (ny + i) / i;
      EXPECT_NEAR(static_cast<double>(sum), static_cast<double>(binom), 1e-6);
      for (std::size_t u = 0; u < counts.size(); ++u) {
        EXPECT_EQ(counts[u], counts[counts.size() - 1 - u]);
      }
    }
  }
}

// Every sample-size pair up to 7 and every attainable U, against full
// enumeration of rank assignments.
TEST(MannWhitney, ExactMatchesEnumeration) {
  for (std::size_t nx = 1; nx <= 7; ++nx) {
    for (std::size_t ny = 1; ny <= 7; ++ny) {
      for (std::size_t u = 0; 2 * u <= nx * ny; ++u) {
        const double want = oracle::mann_whitney_p(static_cast<double>(u), nx, ny);
        ASSERT_NEAR(mann_whitney_exact_p(static_cast<double>(u), nx, ny), want, 1e-12)
            << nx << "x" << ny << " u=" << u;
      }
      // Through the public test on concrete samples: x takes ranks from a
      // seeded shuffle.
      Rng rng(nx * 10 + ny);
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> values(nx + ny);
        std::iota(values.begin(), values.end(), 1.0);
        rng.shuffle(std::span<double>(values));
        const std::span<const double> x(values.data(), nx), y(values.data() + nx, ny);
        const auto r = mann_whitney_two_sided(x, y);
        ASSERT_TRUE(r.exact);
        ASSERT_NEAR(r.p_value, oracle::mann_whitney_p(r.u, nx, ny), 1e-12);
        const auto swapped = mann_whitney_two_sided(y, x);
        ASSERT_EQ(swapped.reject, r.reject);
        ASSERT_EQ(swapped.u, r.u);
      }
    }
  }
}

TEST(MannWhitney, ExactAndNormalAgreeAtTen) {
  for (std::size_t u = 0; u <= 100; ++u) {
    const double exact = mann_whitney_exact_p(static_cast<double>(u), 10, 10);
    const double normal = mann_whitney_normal_p(static_cast<double>(u), 10, 10);
    EXPECT_NEAR(exact, normal, 0.02) << "u=" << u;
  }
}

TEST(MannWhitney, DecisionIsSymmetric) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> x(1 + rng.below(12)), y(1 + rng.below(12));
    // Coarse values force ties in many trials.
    for (auto& v : x) v = static_cast<double>(rng.below(6));
    for (auto& v : y) v = static_cast<double>(rng.below(6)) + (trial % 2 ? 0.0 : 1.0);
    const auto a = mann_whitney_two_sided(x, y);
    const auto b = mann_whitney_two_sided(y, x);
    EXPECT_EQ(a.reject, b.reject);
    EXPECT_DOUBLE_EQ(a.p_value, b.p_value);
    EXPECT_DOUBLE_EQ(a.u_x + a.u_y, static_cast<double>(x.size() * y.size()));
    EXPECT_GE(a.p_value, 0.0);
    EXPECT_LE(a.p_value, 1.0);
  }
}

TEST(MannWhitney, IdenticalConstantSamplesDoNotReject) {
  const std::vector<double> x(10, 0.7375);
  const auto r = mann_whitney_two_sided(x, x);
  EXPECT_FALSE(r.reject);
  EXPECT_EQ(r.p_value, 1.0);
}

}  // namespace
}  // namespace dcakdd
