#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <limits>

#include "hivesound/feature_select.hpp"
#include "hivesound/rng.hpp"
#include "test_util.hpp"

using namespace hivesound;

namespace {

// independent O(n^2) oracle: literal pair enumeration
bool brute_force_tau(const std::vector<double>& x, const std::vector<double>& y, double& out) {
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double prod = (x[i] - x[j]) * (y[i] - y[j]);
      if (prod > 0.0) ++concordant;
      if (prod < 0.0) ++discordant;
    }
  if (concordant + discordant == 0) return false;
  out = static_cast<double>(concordant - discordant) / static_cast<double>(concordant + discordant);
  return true;
}

FeatureTable tiny_table(const std::vector<std::string>& names,
                        const std::vector<std::pair<Label, std::vector<double>>>& rows) {
  FeatureTable t;
  t.feature_names = names;
  int i = 0;
  for (const auto& [label, values] : rows) {
    FeatureRow r;
    r.source_id = "r" + std::to_string(i++);
    r.label = label;
    r.values = values;
    t.rows.push_back(std::move(r));
  }
  return t;
}

}  // namespace

TEST_CASE("kendall tau: perfect concordance and reversal") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  CHECK(kendall_tau(x, x) == doctest::Approx(1.0));
  const std::vector<double> rev = {5, 4, 3, 2, 1};
  CHECK(kendall_tau(x, rev) == doctest::Approx(-1.0));
}

TEST_CASE("kendall tau: worked four-point example") {
  // C = 5, D = 1 -> 4/6
  CHECK(kendall_tau({1, 2, 3, 4}, {1, 3, 2, 4}) == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("kendall tau: all-tied input is an error") {
  CHECK_THROWS(kendall_tau({1, 1, 1}, {2, 3, 4}));
  CHECK_THROWS(kendall_tau({1, 1, 2, 2}, {5, 5, 5, 5}));
  CHECK_THROWS(kendall_tau({1}, {1}));
}

TEST_CASE("kendall tau: matches brute force on short sequences over a 4-value alphabet") {
  Rng rng(2024);
  int checked = 0;
  for (int round = 0; round < 10000; ++round) {
    const auto n = static_cast<std::size_t>(rng.integer(2, 12));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = static_cast<double>(rng.index(4));
      y[i] = static_cast<double>(rng.index(4));
    }
    double expected = 0.0;
    if (!brute_force_tau(x, y, expected)) {
      CHECK_THROWS(kendall_tau(x, y));
      continue;
    }
    ++checked;
    CHECK(kendall_tau(x, y) == expected);  // exact, both are ratios of integers
  }
  CHECK(checked > 8000);
}

TEST_CASE("kendall tau: antisymmetry and monotone invariance") {
  Rng rng(5);
  for (int round = 0; round < 200; ++round) {
    const auto n = static_cast<std::size_t>(rng.integer(3, 30));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.uniform();  // continuous, no ties
      y[i] = rng.uniform();
    }
    std::vector<double> neg_y(n), exp_x(n);
    for (std::size_t i = 0; i < n; ++i) {
      neg_y[i] = -y[i];
      exp_x[i] = std::exp(3.0 * x[i]) + 1.0;  // strictly increasing transform
    }
    const double tau = kendall_tau(x, y);
    CHECK(kendall_tau(x, neg_y) == -tau);
    CHECK(kendall_tau(exp_x, y) == tau);
  }
}

TEST_CASE("anova F: identical means give zero") {
  CHECK(anova_f({1, 2, 3, 1, 2, 3}, {0, 0, 0, 1, 1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("anova F: worked example {1,2,3} vs {4,5,6}") {
  // SS_between = 13.5, SS_within = 4 -> F = 13.5 / (4/4) = 13.5
  CHECK(anova_f({1, 2, 3, 4, 5, 6}, {0, 0, 0, 1, 1, 1}) == doctest::Approx(13.5).epsilon(1e-12));
}

TEST_CASE("anova F: degenerate and separated inputs") {
  CHECK_THROWS(anova_f({2, 2, 2, 2}, {0, 0, 1, 1}));  // zero variance, zero effect
  CHECK_THROWS(anova_f({1, 2, 3}, {0, 0, 0}));        // one class absent
  CHECK(std::isinf(anova_f({1, 1, 5, 5}, {0, 0, 1, 1})));  // perfect separation
}

TEST_CASE("anova F: matches a direct sum-of-squares oracle on random inputs") {
  Rng rng(99);
  for (int round = 0; round < 1000; ++round) {
    const auto n = static_cast<std::size_t>(rng.integer(4, 60));
    std::vector<double> values(n);
    std::vector<int> groups(n);
    groups[0] = 0;
    groups[1] = 1;  // both classes present
    for (std::size_t i = 0; i < n; ++i) {
      values[i] = rng.uniform(-5.0, 5.0);
      if (i > 1) groups[i] = rng.index(2) == 0 ? 0 : 1;
    }

    // oracle: explicit group means and squared deviations
    double mean[2] = {0, 0}, count[2] = {0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      mean[groups[i]] += values[i];
      count[groups[i]] += 1;
    }
    mean[0] /= count[0];
    mean[1] /= count[1];
    const double grand = (mean[0] * count[0] + mean[1] * count[1]) / static_cast<double>(n);
    double ssb = count[0] * (mean[0] - grand) * (mean[0] - grand) +
                 count[1] * (mean[1] - grand) * (mean[1] - grand);
    double ssw = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      ssw += (values[i] - mean[groups[i]]) * (values[i] - mean[groups[i]]);
    const double expected = ssb / (ssw / static_cast<double>(n - 2));

    const double got = anova_f(values, groups);
    CHECK(std::abs(got - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("anova F: shift and scale invariance") {
  Rng rng(7);
  std::vector<double> values(40);
  std::vector<int> groups(40);
  for (std::size_t i = 0; i < 40; ++i) {
    values[i] = rng.uniform(-1.0, 1.0);
    groups[i] = i % 2 == 0 ? 0 : 1;
  }
  const double base = anova_f(values, groups);
  std::vector<double> scaled(40);
  for (std::size_t i = 0; i < 40; ++i) scaled[i] = -3.7 * values[i] + 11.0;
  CHECK(anova_f(scaled, groups) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("rank_features: oracle feature tops the F ranking; noise stays flat on tau") {
  Rng rng(123);
  const std::size_t n = 4070;
  FeatureTable table;
  table.feature_names = {"oracle", "noise"};
  for (std::size_t i = 0; i < n; ++i) {
    FeatureRow row;
    row.source_id = "r";
    row.label = i % 4 == 0 ? Label::Bee : Label::NoBee;
    row.values = {row.label == Label::NoBee ? 1.0 : 0.0, rng.uniform()};
    table.rows.push_back(std::move(row));
  }

  const SelectionReport f_report = rank_features(table, SelectionMethod::AnovaF);
  REQUIRE(f_report.ranking.size() == 2);
  CHECK(f_report.ranking[0].name == "oracle");
  CHECK(std::isinf(f_report.ranking[0].score));  // perfect separation

  const SelectionReport tau_report = rank_features(table, SelectionMethod::KendallTau);
  for (const auto& entry : tau_report.ranking) {
    if (entry.name != "noise") continue;
    REQUIRE(entry.ok);
    CHECK(std::abs(entry.score) < 0.05);
  }
  // feature equal to the label in the stated encoding: tau is +1
  for (const auto& entry : tau_report.ranking)
    if (entry.name == "oracle") CHECK(entry.score == doctest::Approx(1.0));
}

TEST_CASE("rank_features: constant feature is recorded as failed, not fatal") {
  const auto table = tiny_table({"flat", "good"}, {{Label::Bee, {1.0, 0.1}},
                                                   {Label::Bee, {1.0, 0.2}},
                                                   {Label::NoBee, {1.0, 0.9}},
                                                   {Label::NoBee, {1.0, 1.1}}});
  const SelectionReport report = rank_features(table, SelectionMethod::AnovaF);
  REQUIRE(report.ranking.size() == 2);
  CHECK(report.ranking[0].name == "good");
  CHECK(report.ranking[0].ok);
  CHECK(report.ranking[1].name == "flat");
  CHECK_FALSE(report.ranking[1].ok);
  CHECK(!report.ranking[1].error.empty());
}

TEST_CASE("rank_features: deterministic and complete over 134 columns") {
  Rng rng(55);
  FeatureTable table;
  table.feature_names = feature_names();
  for (int i = 0; i < 60; ++i) {
    FeatureRow row;
    row.source_id = "r";
    row.label = i % 3 == 0 ? Label::Bee : Label::NoBee;
    row.values.resize(134);
    for (auto& v : row.values) v = rng.uniform();
    table.rows.push_back(std::move(row));
  }
  const SelectionReport a = rank_features(table, SelectionMethod::AnovaF);
  const SelectionReport b = rank_features(table, SelectionMethod::AnovaF);
  REQUIRE(a.ranking.size() == 134);
  std::vector<std::string> seen;
  for (std::size_t i = 0; i < a.ranking.size(); ++i) {
    CHECK(a.ranking[i].name == b.ranking[i].name);
    CHECK(a.ranking[i].score == b.ranking[i].score);
    seen.push_back(a.ranking[i].name);
  }
  std::sort(seen.begin(), seen.end());
  std::vector<std::string> expected = feature_names();
  std::sort(expected.begin(), expected.end());
  CHECK(seen == expected);  // every feature exactly once
}

TEST_CASE("select_k_best: boundaries and the 26-feature operating point") {
  const auto table = tiny_table({"a", "b", "c"}, {{Label::Bee, {0.0, 5.0, 0.1}},
                                                  {Label::Bee, {0.1, 4.0, 0.3}},
                                                  {Label::NoBee, {1.0, 5.1, 0.2}},
                                                  {Label::NoBee, {1.1, 4.2, 0.4}}});
  const FeatureTable one = select_k_best(table, 1);
  REQUIRE(one.feature_names.size() == 1);
  CHECK(one.feature_names[0] == "a");  // near-oracle separation
  CHECK(one.rows.size() == 4);
  CHECK(one.rows[0].values[0] == 0.0);

  const FeatureTable all = select_k_best(table, 3);
  CHECK(all.feature_names == std::vector<std::string>{"a", "b", "c"});

  CHECK_THROWS(select_k_best(table, 0));
  CHECK_THROWS(select_k_best(table, 4));

  CHECK(preferred_feature_set().size() == 26);
}

TEST_CASE("selection csv: layout and determinism") {
  const auto table = tiny_table({"flat", "good"}, {{Label::Bee, {1.0, 0.1}},
                                                   {Label::Bee, {1.0, 0.2}},
                                                   {Label::NoBee, {1.0, 0.9}},
                                                   {Label::NoBee, {1.0, 1.1}}});
  const SelectionReport report = rank_features(table, SelectionMethod::AnovaF);
  testutil::TempDir dir("sel");
  write_selection_csv(report, dir.file("r.csv"));
  std::ifstream f(dir.file("r.csv"));
  std::string line;
  std::getline(f, line);
  CHECK(line == "feature,score,rank");
  std::getline(f, line);
  CHECK(line.substr(0, 5) == "good,");
  std::getline(f, line);
  CHECK(line == "flat,nan,2");
}
