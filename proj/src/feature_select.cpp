#include "hivesound/feature_select.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hivesound {

std::string to_string(SelectionMethod m) {
  return m == SelectionMethod::KendallTau ? "tau" : "anova";
}

SelectionMethod parse_selection_method(const std::string& text) {
  if (text == "tau" || text == "kendall") return SelectionMethod::KendallTau;
  if (text == "anova" || text == "f") return SelectionMethod::AnovaF;
  throw std::invalid_argument("unknown selection method: " + text);
}

namespace {

// Counts strict inversions of v with merge sort.
long long count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo,
                           std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<long long>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<long>(lo), scratch.begin() + static_cast<long>(hi),
            v.begin() + static_cast<long>(lo));
  return inv;
}

long long tied_pairs(long long run) { return run * (run - 1) / 2; }

}  // namespace

double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw std::invalid_argument("kendall_tau: length mismatch");
  if (n < 2) throw std::invalid_argument("kendall_tau: need at least two observations");
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw std::runtime_error("kendall_tau: non-finite value");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  const long long n0 = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;

  // pairs tied in x, and tied in both x and y
  long long tx = 0, txy = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[order[j]] == x[order[i]]) ++j;
    tx += tied_pairs(static_cast<long long>(j - i));
    for (std::size_t a = i; a < j;) {
      std::size_t b = a;
      while (b < j && y[order[b]] == y[order[a]]) ++b;
      txy += tied_pairs(static_cast<long long>(b - a));
      a = b;
    }
    i = j;
  }

  // pairs tied in y
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  {
    std::vector<double> sorted_y = ys;
    std::sort(sorted_y.begin(), sorted_y.end());
    long long ty = 0;
    for (std::size_t i = 0; i < n;) {
      std::size_t j = i;
      while (j < n && sorted_y[j] == sorted_y[i]) ++j;
      ty += tied_pairs(static_cast<long long>(j - i));
      i = j;
    }
    std::vector<double> scratch(n);
    const long long discordant = count_inversions(ys, scratch, 0, n);
    const long long cd = n0 - tx - ty + txy;  // pairs tied in neither
    if (cd == 0) throw std::runtime_error("kendall_tau: all pairs tied, tau undefined");
    return static_cast<double>(cd - 2 * discordant) / static_cast<double>(cd);
  }
}

double anova_f(const std::vector<double>& values, const std::vector<int>& groups) {
  const std::size_t n = values.size();
  if (n != groups.size()) throw std::invalid_argument("anova_f: length mismatch");
  if (n < 3) throw std::invalid_argument("anova_f: need at least three observations");

  double sum[2] = {0.0, 0.0};
  long count[2] = {0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    if (groups[i] != 0 && groups[i] != 1) throw std::invalid_argument("anova_f: groups must be 0/1");
    if (!std::isfinite(values[i])) throw std::runtime_error("anova_f: non-finite value");
    sum[groups[i]] += values[i];
    ++count[groups[i]];
  }
  if (count[0] == 0 || count[1] == 0) throw std::runtime_error("anova_f: a class is absent");

  const double mean0 = sum[0] / static_cast<double>(count[0]);
  const double mean1 = sum[1] / static_cast<double>(count[1]);
  const double grand = (sum[0] + sum[1]) / static_cast<double>(n);

  double ss_within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = values[i] - (groups[i] == 0 ? mean0 : mean1);
    ss_within += d * d;
  }
  double ss_between = static_cast<double>(count[0]) * (mean0 - grand) * (mean0 - grand) +
                      static_cast<double>(count[1]) * (mean1 - grand) * (mean1 - grand);

  constexpr int k = 2;
  if (ss_within == 0.0) {
    if (ss_between == 0.0)
      throw std::runtime_error("anova_f: zero variance and zero effect");
    return std::numeric_limits<double>::infinity();  // perfect separation
  }
  return (ss_between / (k - 1)) / (ss_within / static_cast<double>(n - k));
}

SelectionReport rank_features(const FeatureTable& table, SelectionMethod method) {
  if (table.rows.empty()) throw std::runtime_error("rank_features: empty table");

  const std::size_t n = table.rows.size();
  std::vector<double> target(n);
  std::vector<int> groups(n);
  bool has_bee = false, has_nobee = false;
  for (std::size_t i = 0; i < n; ++i) {
    const int g = table.rows[i].label == Label::NoBee ? 1 : 0;  // Bee=0, NoBee=1
    groups[i] = g;
    target[i] = g;
    (g == 0 ? has_bee : has_nobee) = true;
  }
  if (!has_bee || !has_nobee) throw std::runtime_error("rank_features: both labels required");

  SelectionReport report;
  report.method = method;
  report.ranking.resize(table.feature_names.size());

  std::vector<double> column(n);
  for (std::size_t j = 0; j < table.feature_names.size(); ++j) {
    auto& entry = report.ranking[j];
    entry.name = table.feature_names[j];
    for (std::size_t i = 0; i < n; ++i) column[i] = table.rows[i].values[j];
    try {
      entry.score = method == SelectionMethod::KendallTau ? kendall_tau(column, target)
                                                          : anova_f(column, groups);
    } catch (const std::exception& e) {
      entry.ok = false;
      entry.error = e.what();
    }
  }

  // descending score; failed features last; ties keep canonical column order
  std::stable_sort(report.ranking.begin(), report.ranking.end(),
                   [](const ScoredFeature& a, const ScoredFeature& b) {
                     if (a.ok != b.ok) return a.ok;
                     return a.ok && a.score > b.score;
                   });
  return report;
}

FeatureTable select_k_best(const FeatureTable& table, int k, SelectionMethod method) {
  if (k < 1 || static_cast<std::size_t>(k) > table.feature_names.size())
    throw std::invalid_argument("select_k_best: k out of range");
  const SelectionReport report = rank_features(table, method);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) names.push_back(report.ranking[static_cast<std::size_t>(i)].name);
  return project_features(table, names);
}

const std::vector<std::string>& preferred_feature_set() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v = {"spectral_bandwidth", "spectral_centroid", "rolloff",
                                  "zero_crossing_rate", "rmse",              "chroma_stft"};
    for (int i = 1; i <= 20; ++i) v.push_back("mfcc" + std::to_string(i));
    return v;
  }();
  return names;
}

void write_selection_csv(const SelectionReport& report, const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "feature,score,rank\n";
  char buf[64];
  int rank = 0;
  for (const auto& entry : report.ranking) {
    ++rank;
    if (entry.ok)
      std::snprintf(buf, sizeof buf, "%.9g", entry.score);
    else
      std::snprintf(buf, sizeof buf, "nan");
    f << entry.name << ',' << buf << ',' << rank << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace hivesound
