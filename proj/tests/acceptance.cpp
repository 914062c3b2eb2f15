// Acceptance suite: end-to-end checks of the whole toolkit on synthetic
// data, one pass/fail line per criterion. Exits nonzero if any criterion
// fails.

#include <chrono>
#include <unistd.h>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "hivesound/eval.hpp"
#include "hivesound/feature_select.hpp"
#include "hivesound/rng.hpp"

namespace fs = std::filesystem;
using namespace hivesound;
using Clock = std::chrono::steady_clock;

namespace {

int criteria_passed = 0;
int criteria_failed = 0;
std::vector<std::string> notes;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int index, bool ok, const std::string& name, double seconds) {
  std::printf("[%d/8] %s %s (%.1fs)\n", index, ok ? "PASS" : "FAIL", name.c_str(), seconds);
  std::fflush(stdout);
  (ok ? criteria_passed : criteria_failed) += 1;
}

void note(const std::string& text) { notes.push_back(text); }

std::string slurp(const fs::path& path) {
  std::ifstream f(path);
  return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

constexpr int kRate = 22050;
const StftConfig kCfg{};  // 2048 / 512 / hann / centered

AudioClip sine(double freq, double seconds, double amplitude = 1.0) {
  AudioClip clip;
  clip.sample_rate = kRate;
  clip.samples.resize(static_cast<std::size_t>(seconds * kRate));
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] =
        amplitude * std::sin(2.0 * 3.14159265358979323846 * freq * static_cast<double>(i) / kRate);
  return clip;
}

// ---------------------------------------------------------------------------
// criterion 1: dsp oracles + amplitude-scale invariance fuzz
// ---------------------------------------------------------------------------
bool dsp_oracles(const MelFilterbank& fb) {
  bool ok = true;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) {
      ok = false;
      note(std::string("dsp: ") + what);
    }
  };

  // pure-sine centroid within one bin
  const double bin = static_cast<double>(kRate) / kCfg.n_fft;
  expect(std::abs(spectral_centroid(stft(sine(440.0, 2.0), kCfg)) - 440.0) < bin,
         "sine centroid off by more than one bin");

  // zcr of a 440 Hz sine within 2% of 880/22050
  {
    const AudioClip clip = sine(440.0, 2.0);
    const auto series = zero_crossing_rate_series(frame_signal(clip, kCfg.n_fft, kCfg.hop));
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    expect(std::abs(mean - 880.0 / kRate) / (880.0 / kRate) < 0.02, "sine zcr off by over 2%");
  }

  // rms of a unit sine within 1% of 1/sqrt(2)
  {
    const auto series = rmse_series(frame_signal(sine(440.0, 2.0), kCfg.n_fft, kCfg.hop));
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    expect(std::abs(mean - 1.0 / std::sqrt(2.0)) / (1.0 / std::sqrt(2.0)) < 0.01,
           "sine rms off by over 1%");
  }

  // Parseval on a random 2048-sample frame, full-spectrum form
  {
    Rng rng(99);
    AudioClip clip;
    clip.sample_rate = kRate;
    clip.samples.resize(2048);
    for (auto& v : clip.samples) v = 2.0 * rng.uniform() - 1.0;
    StftConfig cfg;
    cfg.hop = 2048;
    cfg.window = Window::Rectangular;
    cfg.center_pad = false;
    const Spectrogram spec = stft(clip, cfg);
    double time_energy = 0.0;
    for (double v : clip.samples) time_energy += v * v;
    double spec_energy = spec.magnitudes(0, 0) * spec.magnitudes(0, 0) +
                         spec.magnitudes(0, 1024) * spec.magnitudes(0, 1024);
    for (std::size_t k = 1; k < 1024; ++k)
      spec_energy += 2.0 * spec.magnitudes(0, k) * spec.magnitudes(0, k);
    spec_energy /= 2048.0;
    expect(std::abs(spec_energy - time_energy) / time_energy < 1e-6, "Parseval error over 1e-6");
  }

  // DCT basis orthonormality to 1e-9
  {
    const std::size_t n = 128;
    Matrix eye(n, n);
    for (std::size_t i = 0; i < n; ++i) eye(i, i) = 1.0;
    const Matrix basis = dct_ii(eye, static_cast<int>(n));
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a; b < n; ++b) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += basis(a, i) * basis(b, i);
        worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
      }
    expect(worst < 1e-9, "DCT orthonormality worse than 1e-9");
  }

  // amplitude-scale invariance on 1000 fuzzed clips
  {
    Rng rng(4242);
    for (int round = 0; round < 1000 && ok; ++round) {
      AudioClip clip;
      clip.sample_rate = kRate;
      clip.samples.resize(static_cast<std::size_t>(rng.uniform(0.12, 0.2) * kRate));
      const double amp = rng.uniform(0.05, 0.9);
      const double tone = rng.uniform(80.0, 8000.0);
      const double tone_mix = rng.uniform(0.0, 0.8);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        const double t = static_cast<double>(i) / kRate;
        clip.samples[i] = amp * ((1.0 - tone_mix) * (2.0 * rng.uniform() - 1.0) +
                                 tone_mix * std::sin(2.0 * 3.14159265358979323846 * tone * t));
      }
      const double a = std::exp(rng.uniform(-1.4, 1.4));
      AudioClip scaled = clip;
      for (auto& v : scaled.samples) v *= a;

      const auto base = extract_vector(clip, kCfg, fb);
      const auto got = extract_vector(scaled, kCfg, fb);
      validate_features(base, kRate);
      validate_features(got, kRate);
      for (int idx : {0, 2, 3, 4, 5})  // chroma, centroid, bandwidth, rolloff, zcr
        expect(std::abs(got[static_cast<std::size_t>(idx)] -
                        base[static_cast<std::size_t>(idx)]) <=
                   1e-6 * std::max(1.0, std::abs(base[static_cast<std::size_t>(idx)])),
               "shape feature not scale-invariant");
      expect(std::abs(got[1] - a * base[1]) <= 1e-9 * std::max(1.0, std::abs(a * base[1])),
             "rmse did not scale linearly");
      const double shift = 10.0 * std::log10(a * a) * std::sqrt(128.0);
      expect(std::abs((got[6] - base[6]) - shift) < 1e-6, "mfcc1 shift wrong");
      for (std::size_t k = 7; k < 134 && ok; ++k)
        expect(std::abs(got[k] - base[k]) < 1e-6, "higher mfcc changed under scaling");
    }
  }
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 2: statistics oracles
// ---------------------------------------------------------------------------
bool statistics_oracles() {
  bool ok = true;
  auto expect = [&](bool cond, const char* what) {
    if (!cond) {
      ok = false;
      note(std::string("stats: ") + what);
    }
  };

  // tau against literal pair enumeration, 10000 sampled short sequences
  {
    Rng rng(2024);
    for (int round = 0; round < 10000 && ok; ++round) {
      const auto n = static_cast<std::size_t>(rng.integer(2, 12));
      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = static_cast<double>(rng.index(4));
        y[i] = static_cast<double>(rng.index(4));
      }
      long long concordant = 0, discordant = 0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
          const double prod = (x[i] - x[j]) * (y[i] - y[j]);
          if (prod > 0.0) ++concordant;
          if (prod < 0.0) ++discordant;
        }
      if (concordant + discordant == 0) {
        bool threw = false;
        try {
          (void)kendall_tau(x, y);
        } catch (const std::exception&) {
          threw = true;
        }
        expect(threw, "all-tied tau did not raise");
        continue;
      }
      const double brute = static_cast<double>(concordant - discordant) /
                           static_cast<double>(concordant + discordant);
      expect(kendall_tau(x, y) == brute, "tau differs from brute-force enumeration");
    }
  }

  // anova against a direct SS computation, 1000 random two-group instances
  {
    Rng rng(77);
    for (int round = 0; round < 1000 && ok; ++round) {
      const auto n = static_cast<std::size_t>(rng.integer(4, 80));
      std::vector<double> values(n);
      std::vector<int> groups(n);
      groups[0] = 0;
      groups[1] = 1;
      for (std::size_t i = 0; i < n; ++i) {
        values[i] = rng.uniform(-10.0, 10.0);
        if (i > 1) groups[i] = static_cast<int>(rng.index(2));
      }
      double mean[2] = {0, 0};
      double count[2] = {0, 0};
      for (std::size_t i = 0; i < n; ++i) {
        mean[groups[i]] += values[i];
        count[groups[i]] += 1;
      }
      mean[0] /= count[0];
      mean[1] /= count[1];
      const double grand = (mean[0] * count[0] + mean[1] * count[1]) / static_cast<double>(n);
      const double ssb = count[0] * (mean[0] - grand) * (mean[0] - grand) +
                         count[1] * (mean[1] - grand) * (mean[1] - grand);
      double ssw = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        ssw += (values[i] - mean[groups[i]]) * (values[i] - mean[groups[i]]);
      const double expected = ssb / (ssw / static_cast<double>(n - 2));
      const double got = anova_f(values, groups);
      expect(std::abs(got - expected) <= 1e-9 * std::max(1.0, std::abs(expected)),
             "anova differs from direct SS computation");
    }
  }

  // worked example reproduced exactly
  expect(anova_f({1, 2, 3, 4, 5, 6}, {0, 0, 0, 1, 1, 1}) == 13.5, "worked F != 13.5");
  return ok;
}

// ---------------------------------------------------------------------------
// criterion 3: gradient check
// ---------------------------------------------------------------------------
bool gradient_check() {
  MlpSpec spec;
  spec.hidden_layers = {4};
  spec.hidden_activation = Activation::Sigmoid;

  MlpParams params;
  params.spec = spec;
  params.layer_sizes = {2, 4, 1};
  Rng rng(9);
  params.weights = {std::vector<double>(8), std::vector<double>(4)};
  params.biases = {std::vector<double>(4), std::vector<double>(1)};
  for (auto& layer : params.weights)
    for (auto& w : layer) w = rng.uniform(-0.8, 0.8);
  for (auto& layer : params.biases)
    for (auto& b : layer) b = rng.uniform(-0.3, 0.3);

  std::vector<std::vector<double>> rows;
  std::vector<double> targets;
  for (int i = 0; i < 5; ++i) {
    rows.push_back({rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)});
    targets.push_back(i % 2 == 0 ? 1.0 : 0.0);
  }

  const auto analytic = mlp_loss_gradients(params, rows, targets);
  const auto flat = mlp_flatten(params);
  const double h = 1e-5;
  double max_rel = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) {
    MlpParams probe = params;
    auto bump = flat;
    bump[i] = flat[i] + h;
    mlp_unflatten(probe, bump);
    const double up = mlp_loss(probe, rows, targets);
    bump[i] = flat[i] - h;
    mlp_unflatten(probe, bump);
    const double down = mlp_loss(probe, rows, targets);
    const double fd = (up - down) / (2.0 * h);
    max_rel = std::max(max_rel, std::abs(fd - analytic[i]) /
                                    std::max({std::abs(fd), std::abs(analytic[i]), 1e-8}));
  }
  if (max_rel >= 1e-4) note("gradient: max relative error " + std::to_string(max_rel));
  return max_rel < 1e-4;
}

// ---------------------------------------------------------------------------
// criteria 4-7 share one pipeline run
// ---------------------------------------------------------------------------
struct PipelineRun {
  FeatureTable table134;
  FeatureTable reduced;
  SelectionReport report;
  TrainedModel mlp;
  TrainedModel forest;
  double mlp_accuracy = 0.0;
  double forest_accuracy = 0.0;
  double mixval_score = 0.0;
  Segment heldout_bee, heldout_nobee;
  double train_seconds = 0.0;
};

PipelineRun run_pipeline(std::uint64_t seed, const fs::path& dir, const MelFilterbank& fb) {
  fs::create_directories(dir);
  PipelineRun out;

  {
    const auto corpus = gen_synthetic_corpus(400, 400, seed);
    out.table134 = build_table(corpus, kCfg, fb, 0);
  }
  write_feature_csv(out.table134, (dir / "features.csv").string());

  out.reduced = project_features(out.table134, preferred_feature_set());
  write_feature_csv(out.reduced, (dir / "reduced.csv").string());

  out.report = rank_features(out.table134, SelectionMethod::AnovaF);
  write_selection_csv(out.report, (dir / "report.csv").string());

  const auto [train, test] = stratified_split(out.reduced, 0.2, derive_seed(seed, 1));

  const auto t0 = Clock::now();
  MlpSpec spec;  // sigmoid + adamax, 256/128/64, lr 1e-3, decay 1e-5, 1000 epochs, batch 128
  spec.seed = derive_seed(seed, 2);
  out.mlp = train_mlp(train, spec);
  out.train_seconds = seconds_since(t0);

  EvalReport mlp_report = evaluate_holdout(out.mlp, test);
  mlp_report.seed = seed;
  write_eval_csv(mlp_report, (dir / "eval_mlp.csv").string());
  out.mlp_accuracy = mlp_report.accuracy;

  ForestConfig forest_cfg;
  forest_cfg.seed = derive_seed(seed, 3);
  out.forest = train_forest(train, forest_cfg);
  EvalReport forest_report = evaluate_holdout(out.forest, test);
  forest_report.seed = seed;
  write_eval_csv(forest_report, (dir / "eval_forest.csv").string());
  out.forest_accuracy = forest_report.accuracy;

  // held-out sources: index-400 streams, never part of the 400-clip corpus
  {
    const auto extended = gen_synthetic_corpus(401, 401, seed);
    out.heldout_bee = extended[400];
    out.heldout_nobee = extended[801];
  }
  const auto mix = run_mixed_validation(out.mlp, out.heldout_bee, out.heldout_nobee, kCfg, fb);
  write_mixval_csv(mix, (dir / "mixval.csv").string());
  out.mixval_score = mix.matching_accuracy;
  return out;
}

}  // namespace

int main() {
  const fs::path work =
      fs::temp_directory_path() / ("hivesound_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  const MelFilterbank fb = mel_filterbank(kNumMfcc, kCfg.n_fft, kRate);

  // 1. dsp oracle suite
  {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = dsp_oracles(fb);
    } catch (const std::exception& e) {
      note(std::string("dsp: exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (dt >= 5.0) {
      note("dsp: over the 5 s budget");
      ok = false;
    }
    report(1, ok, "dsp oracle suite", dt);
  }

  // 2. statistics oracle suite
  {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = statistics_oracles();
    } catch (const std::exception& e) {
      note(std::string("stats: exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (dt >= 10.0) {
      note("stats: over the 10 s budget");
      ok = false;
    }
    report(2, ok, "statistics oracle suite", dt);
  }

  // 3. gradient check
  {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = gradient_check();
    } catch (const std::exception& e) {
      note(std::string("gradient: exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (dt >= 5.0) {
      note("gradient: over the 5 s budget");
      ok = false;
    }
    report(3, ok, "mlp gradient check", dt);
  }

  // 4. synthetic end-to-end
  PipelineRun run_a;
  {
    const auto t0 = Clock::now();
    bool ok = false;
    double dt = 0.0;
    try {
      run_a = run_pipeline(42, work / "run_a", fb);
      dt = seconds_since(t0);
      ok = run_a.mlp_accuracy >= 0.95 && run_a.forest_accuracy >= 0.95 &&
           run_a.mlp_accuracy > 0.50 && run_a.forest_accuracy > 0.50;
      if (!ok)
        note("end-to-end: mlp " + std::to_string(run_a.mlp_accuracy) + ", forest " +
             std::to_string(run_a.forest_accuracy));
      if (dt >= 120.0) {
        note("end-to-end: over the 2 min budget");
        ok = false;
      }
    } catch (const std::exception& e) {
      dt = seconds_since(t0);
      note(std::string("end-to-end: exception: ") + e.what());
    }
    char line[128];
    std::snprintf(line, sizeof line, "synthetic end-to-end (mlp %.4f, forest %.4f)",
                  run_a.mlp_accuracy, run_a.forest_accuracy);
    report(4, ok, line, dt);
  }

  // 5. feature-selection sanity
  {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      std::set<std::string> top26;
      for (int i = 0; i < 26 && i < static_cast<int>(run_a.report.ranking.size()); ++i)
        top26.insert(run_a.report.ranking[static_cast<std::size_t>(i)].name);
      ok = true;
      for (const char* name :
           {"spectral_bandwidth", "rolloff", "spectral_centroid", "zero_crossing_rate"}) {
        if (top26.count(name) == 0) {
          ok = false;
          note(std::string("selection: ") + name + " not in the anova top 26");
        }
      }
    } catch (const std::exception& e) {
      note(std::string("selection: exception: ") + e.what());
    }
    report(5, ok, "feature-selection sanity (anova top 26)", seconds_since(t0));
  }

  // 6. mixed-wave validation
  {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      ok = run_a.mixval_score >= 0.8;
      if (!ok) note("mixval: mlp score " + std::to_string(run_a.mixval_score));

      // constant-Bee stub scores exactly 0.6 under the rule arithmetic
      const PredictFn const_bee = [](const std::vector<std::string>&,
                                     const std::vector<double>&) {
        Prediction p;
        p.label = Label::Bee;
        p.score = 0.0;
        return p;
      };
      const auto stub = run_mixed_validation(const_bee, run_a.heldout_bee, run_a.heldout_nobee,
                                             kCfg, fb, run_a.mlp.feature_names);
      if (stub.matching_accuracy != 0.6) {
        ok = false;
        note("mixval: constant-bee stub scored " + std::to_string(stub.matching_accuracy));
      }
    } catch (const std::exception& e) {
      ok = false;
      note(std::string("mixval: exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    if (dt >= 30.0) {
      note("mixval: over the 30 s budget");
      ok = false;
    }
    char line[128];
    std::snprintf(line, sizeof line, "mixed-wave validation (mlp %.2f, stub 0.6)",
                  run_a.mixval_score);
    report(6, ok, line, dt);
  }

  // 7. determinism: identical artifacts on a rerun, exact kfold partition
  {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      const PipelineRun run_b = run_pipeline(42, work / "run_b", fb);
      (void)run_b;
      ok = true;
      for (const char* name : {"features.csv", "reduced.csv", "report.csv", "eval_mlp.csv",
                               "eval_forest.csv", "mixval.csv"}) {
        if (slurp(work / "run_a" / name) != slurp(work / "run_b" / name) ||
            slurp(work / "run_a" / name).empty()) {
          ok = false;
          note(std::string("determinism: ") + name + " differs between reruns");
        }
      }

      const auto folds = kfold(run_a.reduced, 10, derive_seed(42, 7));
      std::set<std::string> seen;
      std::size_t total = 0;
      for (const auto& [train, val] : folds) {
        total += val.rows.size();
        if (val.rows.size() != 80) {
          ok = false;
          note("determinism: fold size " + std::to_string(val.rows.size()) + " != 80");
        }
        for (const auto& row : val.rows)
          if (!seen.insert(row.source_id).second) {
            ok = false;
            note("determinism: row validated twice: " + row.source_id);
          }
      }
      if (total != run_a.reduced.rows.size()) {
        ok = false;
        note("determinism: folds do not cover the table");
      }
    } catch (const std::exception& e) {
      ok = false;
      note(std::string("determinism: exception: ") + e.what());
    }
    report(7, ok, "determinism and exact kfold partition", seconds_since(t0));
  }

  // 8. serialization round-trip on every model kind
  {
    const auto t0 = Clock::now();
    bool ok = false;
    try {
      FeatureTable slice;
      slice.feature_names = run_a.reduced.feature_names;
      for (std::size_t i = 0; i < run_a.reduced.rows.size(); i += 4)
        slice.rows.push_back(run_a.reduced.rows[i]);

      MlpSpec mlp_spec;
      mlp_spec.hidden_layers = {16, 8};
      mlp_spec.epochs = 40;
      mlp_spec.seed = 5;
      ForestConfig forest_cfg;
      forest_cfg.n_trees = 15;
      forest_cfg.seed = 6;
      SvmConfig svm_cfg;
      svm_cfg.epochs = 300;

      std::vector<TrainedModel> models;
      models.push_back(train_mlp(slice, mlp_spec));
      models.push_back(train_gnb(slice));
      models.push_back(train_tree(slice));
      models.push_back(train_forest(slice, forest_cfg));
      models.push_back(train_svm(slice, svm_cfg));

      Rng rng(31337);
      std::vector<std::vector<double>> reference;
      for (int i = 0; i < 100; ++i) {
        const auto& base = slice.rows[rng.index(slice.rows.size())].values;
        std::vector<double> v = base;
        for (auto& x : v) x += 0.05 * rng.normal() * (std::abs(x) + 1.0);
        reference.push_back(std::move(v));
      }

      ok = true;
      for (const auto& model : models) {
        const std::string path = (work / (to_string(model.kind()) + ".model")).string();
        save_model(model, path);
        const TrainedModel loaded = load_model(path);
        for (const auto& v : reference) {
          const Prediction a = predict(model, model.feature_names, v);
          const Prediction b = predict(loaded, loaded.feature_names, v);
          if (a.label != b.label || a.score != b.score) {
            ok = false;
            note("serialization: " + to_string(model.kind()) + " predictions differ after reload");
            break;
          }
        }
      }
    } catch (const std::exception& e) {
      ok = false;
      note(std::string("serialization: exception: ") + e.what());
    }
    report(8, ok, "model serialization round-trip", seconds_since(t0));
  }

  for (const auto& n : notes) std::printf("  - %s\n", n.c_str());
  std::printf("acceptance: %d/8 criteria passed\n", criteria_passed);
  fs::remove_all(work);
  return criteria_failed == 0 ? 0 : 1;
}
