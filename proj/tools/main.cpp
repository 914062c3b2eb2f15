// hivesound — command-line pipeline for beehive audio classification:
// segment annotated recordings, extract features, rank and select them,
// train and evaluate classifiers, and validate on mixed waves.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "hivesound/eval.hpp"
#include "hivesound/feature_select.hpp"
#include "hivesound/rng.hpp"

namespace fs = std::filesystem;
using namespace hivesound;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = all hardware threads
};

struct StftOpts {
  int n_fft = 2048;
  int hop = 512;
  std::string window = "hann";
  int sample_rate = 22050;
  double block_seconds = 2.0;

  StftConfig config() const {
    StftConfig cfg;
    cfg.n_fft = n_fft;
    cfg.hop = hop;
    if (window == "hann")
      cfg.window = Window::Hann;
    else if (window == "rect")
      cfg.window = Window::Rectangular;
    else
      throw std::invalid_argument("unknown window '" + window + "' (hann|rect)");
    return cfg;
  }
};

void add_stft_flags(CLI::App* cmd, StftOpts& opts) {
  cmd->add_option("--rate", opts.sample_rate, "pipeline sample rate in Hz")->capture_default_str();
  cmd->add_option("--block", opts.block_seconds, "segment block length in seconds")
      ->capture_default_str();
  cmd->add_option("--n-fft", opts.n_fft, "FFT size (power of two)")->capture_default_str();
  cmd->add_option("--hop", opts.hop, "STFT hop in samples")->capture_default_str();
  cmd->add_option("--window", opts.window, "analysis window: hann|rect")->capture_default_str();
}

std::string label_filename(const std::string& source_id, std::size_t index, Label label) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%05zu_", index);
  return source_id + buf + to_string(label) + ".wav";
}

void write_manifest(const std::vector<Segment>& segments, const std::vector<std::string>& files,
                    const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << "file,source_id,label,offset_seconds\n";
  char buf[64];
  for (std::size_t i = 0; i < segments.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.9g", segments[i].offset);
    f << files[i] << ',' << segments[i].source_id << ',' << to_string(segments[i].label) << ','
      << buf << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path);
}

struct ManifestRow {
  std::string file;
  std::string source_id;
  Label label;
  double offset;
};

std::vector<ManifestRow> read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open manifest: " + path);
  std::string line;
  if (!std::getline(f, line)) throw std::runtime_error(path + ": empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "file,source_id,label,offset_seconds")
    throw std::runtime_error(path + ": bad manifest header");

  std::vector<ManifestRow> rows;
  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        fields.push_back(line.substr(pos));
        break;
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (fields.size() != 4)
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": expected 4 fields");
    ManifestRow row;
    row.file = fields[0];
    row.source_id = fields[1];
    row.label = parse_label(fields[2]);
    row.offset = std::stod(fields[3]);
    rows.push_back(std::move(row));
  }
  return rows;
}

// one block-length clip: repeat-pad when short, reject when clearly longer
AudioClip to_block(AudioClip clip, const StftOpts& stft_opts, const std::string& origin) {
  clip = resample(clip, stft_opts.sample_rate);
  const auto block_len = static_cast<std::size_t>(
      std::llround(stft_opts.block_seconds * stft_opts.sample_rate));
  if (clip.samples.empty()) throw std::runtime_error(origin + ": empty clip");
  if (clip.samples.size() > block_len + 1)
    throw std::runtime_error(origin + ": longer than one block (" +
                             std::to_string(clip.samples.size()) + " > " +
                             std::to_string(block_len) + " samples)");
  const std::size_t avail = std::min(clip.samples.size(), block_len);
  clip.samples.resize(block_len);
  for (std::size_t i = avail; i < block_len; ++i) clip.samples[i] = clip.samples[i % avail];
  return clip;
}

Segment load_block(const std::string& wav_path, Label label, const StftOpts& stft_opts) {
  AudioClip clip = resample(read_wav(wav_path), stft_opts.sample_rate);
  if (clip.samples.empty()) throw std::runtime_error(wav_path + ": empty clip");
  const auto block_len = static_cast<std::size_t>(
      std::llround(stft_opts.block_seconds * stft_opts.sample_rate));
  Segment seg;
  seg.clip.sample_rate = stft_opts.sample_rate;
  seg.clip.samples.resize(block_len);
  for (std::size_t i = 0; i < block_len; ++i)
    seg.clip.samples[i] = clip.samples[i % clip.samples.size()];
  seg.label = label;
  seg.source_id = fs::path(wav_path).stem().string();
  return seg;
}

MlpSpec mlp_spec_from(const std::string& activation, const std::string& optimizer, double lr,
                      double decay, int epochs, int batch, std::uint64_t seed) {
  MlpSpec spec;
  spec.hidden_activation = parse_activation(activation);
  spec.optimizer = parse_optimizer(optimizer);
  spec.learning_rate = lr;
  spec.decay = decay;
  spec.epochs = epochs;
  spec.batch_size = batch;
  spec.seed = seed;
  return spec;
}

double training_accuracy(const TrainedModel& model, const FeatureTable& table) {
  long correct = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    if (predict_row(model, table, i).label == table.rows[i].label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(table.rows.size());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hivesound: beehive audio classification pipeline"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "plain key=value config file; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);  // unknown keys rejected

  GlobalOpts global;
  app.add_option("--seed", global.seed, "base seed for all randomness")->capture_default_str();
  app.add_option("--threads", global.threads, "worker threads for extraction (0 = auto)")
      ->capture_default_str();

  // --- segment ---------------------------------------------------------
  auto* cmd_segment = app.add_subcommand("segment", "cut an annotated wav into labeled blocks");
  struct {
    std::string wav, annotations, out_dir, source_id;
    StftOpts stft;
  } seg_opts;
  cmd_segment->add_option("--wav", seg_opts.wav, "input wav file")->required();
  cmd_segment->add_option("--annotations", seg_opts.annotations, "tsv annotation file")->required();
  cmd_segment->add_option("--out-dir", seg_opts.out_dir, "output directory")->required();
  cmd_segment->add_option("--source-id", seg_opts.source_id, "provenance id (default: wav stem)");
  add_stft_flags(cmd_segment, seg_opts.stft);
  cmd_segment->callback([&] {
    const auto annotations = parse_annotations_file(seg_opts.annotations);
    AudioClip clip = resample(read_wav(seg_opts.wav), seg_opts.stft.sample_rate);
    const std::string source = seg_opts.source_id.empty()
                                   ? fs::path(seg_opts.wav).stem().string()
                                   : seg_opts.source_id;
    const auto segments = segment_clip(clip, annotations, seg_opts.stft.block_seconds, source);

    fs::create_directories(seg_opts.out_dir);
    std::vector<std::string> files;
    long bees = 0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const std::string name = label_filename(source, i, segments[i].label);
      write_wav(segments[i].clip, (fs::path(seg_opts.out_dir) / name).string());
      files.push_back(name);
      if (segments[i].label == Label::Bee) ++bees;
    }
    write_manifest(segments, files, (fs::path(seg_opts.out_dir) / "manifest.csv").string());
    std::printf("wrote %zu segments (%ld bee, %ld nobee) to %s\n", segments.size(), bees,
                static_cast<long>(segments.size()) - bees, seg_opts.out_dir.c_str());
  });

  // --- synth -----------------------------------------------------------
  auto* cmd_synth = app.add_subcommand("synth", "generate a synthetic bee/nobee corpus");
  struct {
    std::string out_dir;
    int bees = 400, nobees = 400;
  } synth_opts;
  cmd_synth->add_option("--out-dir", synth_opts.out_dir, "output directory")->required();
  cmd_synth->add_option("--bees", synth_opts.bees, "bee segment count")->capture_default_str();
  cmd_synth->add_option("--nobees", synth_opts.nobees, "nobee segment count")->capture_default_str();
  cmd_synth->callback([&] {
    const auto corpus = gen_synthetic_corpus(synth_opts.bees, synth_opts.nobees, global.seed);
    fs::create_directories(synth_opts.out_dir);
    std::vector<std::string> files;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const std::string name = corpus[i].source_id + ".wav";
      write_wav(corpus[i].clip, (fs::path(synth_opts.out_dir) / name).string());
      files.push_back(name);
    }
    write_manifest(corpus, files, (fs::path(synth_opts.out_dir) / "manifest.csv").string());
    std::printf("wrote %d bee and %d nobee synthetic segments to %s\n", synth_opts.bees,
                synth_opts.nobees, synth_opts.out_dir.c_str());
  });

  // --- extract ---------------------------------------------------------
  auto* cmd_extract = app.add_subcommand("extract", "compute the 134-feature table for segments");
  struct {
    std::string manifest, out;
    StftOpts stft;
  } extract_opts;
  cmd_extract->add_option("--manifest", extract_opts.manifest, "segment manifest csv")->required();
  cmd_extract->add_option("--out", extract_opts.out, "output features csv")->required();
  add_stft_flags(cmd_extract, extract_opts.stft);
  cmd_extract->callback([&] {
    const auto manifest = read_manifest(extract_opts.manifest);
    if (manifest.empty()) throw std::runtime_error("manifest lists no segments");
    const fs::path base = fs::path(extract_opts.manifest).parent_path();

    std::vector<Segment> segments;
    segments.reserve(manifest.size());
    for (const auto& row : manifest) {
      Segment seg;
      seg.clip = to_block(read_wav((base / row.file).string()), extract_opts.stft, row.file);
      seg.label = row.label;
      seg.source_id = row.source_id;
      seg.offset = row.offset;
      segments.push_back(std::move(seg));
    }

    const MelFilterbank fb = mel_filterbank(kNumMfcc, extract_opts.stft.n_fft,
                                            extract_opts.stft.sample_rate);
    const FeatureTable table =
        build_table(segments, extract_opts.stft.config(), fb, global.threads);
    write_feature_csv(table, extract_opts.out);
    std::printf("extracted %zu rows x %zu features to %s\n", table.rows.size(),
                table.feature_names.size(), extract_opts.out.c_str());
  });

  // --- select ----------------------------------------------------------
  auto* cmd_select = app.add_subcommand("select", "rank features and emit a reduced table");
  struct {
    std::string features, out, report;
    std::string method = "anova";
    int k = 26;
    bool by_score = false;
  } select_opts;
  cmd_select->add_option("--features", select_opts.features, "input features csv")->required();
  cmd_select->add_option("--out", select_opts.out, "reduced features csv");
  cmd_select->add_option("--report", select_opts.report, "ranking report csv");
  cmd_select->add_option("--method", select_opts.method, "scoring statistic: anova|tau")
      ->capture_default_str();
  cmd_select->add_option("--k", select_opts.k, "number of features to keep")->capture_default_str();
  cmd_select->add_flag("--by-score", select_opts.by_score,
                       "pick the top-k scored features instead of the fixed 26-name set");
  cmd_select->callback([&] {
    const FeatureTable table = read_feature_csv(select_opts.features);
    const SelectionMethod method = parse_selection_method(select_opts.method);
    const SelectionReport report = rank_features(table, method);
    if (!select_opts.report.empty()) write_selection_csv(report, select_opts.report);

    if (!select_opts.out.empty()) {
      FeatureTable reduced;
      if (select_opts.by_score) {
        reduced = select_k_best(table, select_opts.k, method);
      } else {
        if (select_opts.k != 26)
          throw std::invalid_argument(
              "the named operating set has exactly 26 features; pass --by-score to use --k");
        reduced = project_features(table, preferred_feature_set());
      }
      write_feature_csv(reduced, select_opts.out);
      std::printf("selected %zu features (%s) -> %s\n", reduced.feature_names.size(),
                  select_opts.by_score ? "by score" : "named set", select_opts.out.c_str());
    } else {
      std::printf("ranked %zu features by %s\n", report.ranking.size(), to_string(method).c_str());
    }
  });

  // --- train -----------------------------------------------------------
  auto* cmd_train = app.add_subcommand("train", "fit a classifier on a features csv");
  struct {
    std::string features, model;
    std::string kind = "mlp";
    std::string activation = "sigmoid";
    std::string optimizer = "adamax";
    double lr = 1e-3, decay = 1e-5;
    int epochs = 1000, batch = 128;
    std::string criterion = "gini";
    int max_depth = 0, min_split = 2;
    int trees = 100, max_features = 0;
    bool no_bootstrap = false;
    double c = 1.0;
  } train_opts;
  cmd_train->add_option("--features", train_opts.features, "training features csv")->required();
  cmd_train->add_option("--model", train_opts.model, "output model file")->required();
  cmd_train->add_option("--kind", train_opts.kind, "mlp|gnb|tree|forest|svm")->capture_default_str();
  cmd_train->add_option("--activation", train_opts.activation, "mlp hidden activation")
      ->capture_default_str();
  cmd_train->add_option("--optimizer", train_opts.optimizer, "mlp optimizer")->capture_default_str();
  cmd_train->add_option("--lr", train_opts.lr, "learning rate")->capture_default_str();
  cmd_train->add_option("--decay", train_opts.decay, "per-step learning-rate decay")
      ->capture_default_str();
  cmd_train->add_option("--epochs", train_opts.epochs, "training epochs (mlp and svm)")
      ->capture_default_str();
  cmd_train->add_option("--batch", train_opts.batch, "mlp mini-batch size")->capture_default_str();
  cmd_train->add_option("--criterion", train_opts.criterion, "tree impurity: gini|entropy")
      ->capture_default_str();
  cmd_train->add_option("--max-depth", train_opts.max_depth, "tree depth cap (0 = unbounded)")
      ->capture_default_str();
  cmd_train->add_option("--min-split", train_opts.min_split, "minimum rows to split a node")
      ->capture_default_str();
  cmd_train->add_option("--trees", train_opts.trees, "forest size")->capture_default_str();
  cmd_train->add_option("--max-features", train_opts.max_features,
                        "features per forest split (0 = sqrt)")
      ->capture_default_str();
  cmd_train->add_flag("--no-bootstrap", train_opts.no_bootstrap,
                      "train forest trees without bagging");
  cmd_train->add_option("--c", train_opts.c, "svm regularization constant")->capture_default_str();
  cmd_train->callback([&] {
    const FeatureTable table = read_feature_csv(train_opts.features);
    const ModelKind kind = parse_model_kind(train_opts.kind);

    TrainedModel model;
    switch (kind) {
      case ModelKind::Mlp:
        model = train_mlp(table, mlp_spec_from(train_opts.activation, train_opts.optimizer,
                                               train_opts.lr, train_opts.decay, train_opts.epochs,
                                               train_opts.batch, global.seed));
        break;
      case ModelKind::Gnb:
        model = train_gnb(table);
        break;
      case ModelKind::Tree: {
        TreeConfig cfg;
        cfg.criterion = parse_criterion(train_opts.criterion);
        cfg.max_depth = train_opts.max_depth;
        cfg.min_split = train_opts.min_split;
        model = train_tree(table, cfg);
        break;
      }
      case ModelKind::Forest: {
        ForestConfig cfg;
        cfg.n_trees = train_opts.trees;
        cfg.max_features = train_opts.max_features;
        cfg.bootstrap = !train_opts.no_bootstrap;
        cfg.tree.criterion = parse_criterion(train_opts.criterion);
        cfg.tree.max_depth = train_opts.max_depth;
        cfg.tree.min_split = train_opts.min_split;
        cfg.seed = global.seed;
        model = train_forest(table, cfg);
        break;
      }
      case ModelKind::Svm: {
        SvmConfig cfg;
        cfg.c = train_opts.c;
        cfg.epochs = train_opts.epochs;
        cfg.seed = global.seed;
        model = train_svm(table, cfg);
        break;
      }
    }
    save_model(model, train_opts.model);
    std::printf("trained %s on %zu rows x %zu features; training accuracy %.9g\n",
                to_string(kind).c_str(), table.rows.size(), table.feature_names.size(),
                training_accuracy(model, table));
  });

  // --- evaluate ----------------------------------------------------------
  auto* cmd_eval = app.add_subcommand("evaluate", "score a model on a features csv");
  struct {
    std::string model, features, out;
    int folds = 0;
  } eval_opts;
  cmd_eval->add_option("--model", eval_opts.model, "model file")->required();
  cmd_eval->add_option("--features", eval_opts.features, "evaluation features csv")->required();
  cmd_eval->add_option("--out", eval_opts.out, "report csv");
  cmd_eval->add_option("--kfold", eval_opts.folds,
                       "retrain and cross-validate with this many stratified folds")
      ->capture_default_str();
  cmd_eval->callback([&] {
    const TrainedModel model = load_model(eval_opts.model);
    const FeatureTable table = read_feature_csv(eval_opts.features);
    EvalReport report = eval_opts.folds > 0
                            ? evaluate_kfold(model, table, eval_opts.folds, global.seed)
                            : evaluate_holdout(model, table);
    report.seed = global.seed;
    if (!eval_opts.out.empty()) write_eval_csv(report, eval_opts.out);
    std::printf("accuracy %.9g over %ld rows\n", report.accuracy, report.rows);
    if (!report.fold_accuracies.empty()) {
      double mean = 0.0;
      for (double v : report.fold_accuracies) mean += v;
      std::printf("fold mean %.9g over %zu folds\n",
                  mean / static_cast<double>(report.fold_accuracies.size()),
                  report.fold_accuracies.size());
    }
  });

  // --- predict -----------------------------------------------------------
  auto* cmd_predict = app.add_subcommand("predict", "label each block of a wav file");
  struct {
    std::string model, wav;
    StftOpts stft;
  } predict_opts;
  cmd_predict->add_option("--model", predict_opts.model, "model file")->required();
  cmd_predict->add_option("--wav", predict_opts.wav, "input wav")->required();
  add_stft_flags(cmd_predict, predict_opts.stft);
  cmd_predict->callback([&] {
    const TrainedModel model = load_model(predict_opts.model);
    AudioClip clip = resample(read_wav(predict_opts.wav), predict_opts.stft.sample_rate);
    if (clip.samples.empty()) throw std::runtime_error(predict_opts.wav + ": empty clip");

    const auto block_len = static_cast<std::size_t>(
        std::llround(predict_opts.stft.block_seconds * predict_opts.stft.sample_rate));
    const MelFilterbank fb = mel_filterbank(kNumMfcc, predict_opts.stft.n_fft,
                                            predict_opts.stft.sample_rate);
    const StftConfig cfg = predict_opts.stft.config();

    const std::size_t n_blocks = (clip.samples.size() + block_len - 1) / block_len;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const std::size_t begin = b * block_len;
      const std::size_t avail = std::min(block_len, clip.samples.size() - begin);
      AudioClip block;
      block.sample_rate = clip.sample_rate;
      block.samples.resize(block_len);
      for (std::size_t i = 0; i < block_len; ++i)
        block.samples[i] = clip.samples[begin + (i % avail)];

      const auto full = extract_vector(block, cfg, fb);
      std::vector<double> values;
      values.reserve(model.feature_names.size());
      for (const auto& name : model.feature_names) {
        const int idx = feature_index(name);
        if (idx < 0) throw std::runtime_error("model uses unknown feature '" + name + "'");
        values.push_back(full[static_cast<std::size_t>(idx)]);
      }
      const Prediction pred = predict(model, model.feature_names, values);
      std::printf("%.9g\t%s\t%.9g\n", static_cast<double>(begin) / predict_opts.stft.sample_rate,
                  to_string(pred.label).c_str(), pred.score);
    }
  });

  // --- mixval ------------------------------------------------------------
  auto* cmd_mixval =
      app.add_subcommand("mixval", "run the five-wave mixed validation against a model");
  struct {
    std::string model, bee, nobee, out;
    StftOpts stft;
  } mix_opts;
  cmd_mixval->add_option("--model", mix_opts.model, "model file")->required();
  cmd_mixval->add_option("--bee", mix_opts.bee, "bee source wav (one block)")->required();
  cmd_mixval->add_option("--nobee", mix_opts.nobee, "nobee source wav (one block)")->required();
  cmd_mixval->add_option("--out", mix_opts.out, "per-case report csv");
  add_stft_flags(cmd_mixval, mix_opts.stft);
  cmd_mixval->callback([&] {
    const TrainedModel model = load_model(mix_opts.model);
    const Segment bee = load_block(mix_opts.bee, Label::Bee, mix_opts.stft);
    const Segment nobee = load_block(mix_opts.nobee, Label::NoBee, mix_opts.stft);
    const MelFilterbank fb =
        mel_filterbank(kNumMfcc, mix_opts.stft.n_fft, mix_opts.stft.sample_rate);
    const auto result = run_mixed_validation(model, bee, nobee, mix_opts.stft.config(), fb);
    if (!mix_opts.out.empty()) write_mixval_csv(result, mix_opts.out);
    for (const auto& c : result.cases)
      std::printf("%s\t%s\t%s\t%s\t%s\n", c.name.c_str(), c.composition.c_str(),
                  to_string(c.expected).c_str(), to_string(c.predicted).c_str(),
                  c.correct ? "correct" : "wrong");
    std::printf("matching accuracy %.9g\n", result.matching_accuracy);
  });

  // --- sweep ---------------------------------------------------------------
  auto* cmd_sweep = app.add_subcommand("sweep", "accuracy grid over activations x optimizers");
  struct {
    std::string features, out;
    std::vector<std::string> activations = {"relu", "sigmoid", "tanh"};
    std::vector<std::string> optimizers = {"adam", "adadelta", "adagrad", "adamax",
                                           "ftrl", "nadam",    "rmsprop", "sgd"};
    double lr = 1e-3, decay = 1e-5, test_fraction = 0.2;
    int epochs = 1000, batch = 128;
  } sweep_opts;
  cmd_sweep->add_option("--features", sweep_opts.features, "features csv")->required();
  cmd_sweep->add_option("--out", sweep_opts.out, "grid csv")->required();
  cmd_sweep->add_option("--activations", sweep_opts.activations, "activations to sweep")
      ->delimiter(',')
      ->capture_default_str();
  cmd_sweep->add_option("--optimizers", sweep_opts.optimizers, "optimizers to sweep")
      ->delimiter(',')
      ->capture_default_str();
  cmd_sweep->add_option("--epochs", sweep_opts.epochs, "epochs per cell")->capture_default_str();
  cmd_sweep->add_option("--batch", sweep_opts.batch, "mini-batch size")->capture_default_str();
  cmd_sweep->add_option("--lr", sweep_opts.lr, "learning rate")->capture_default_str();
  cmd_sweep->add_option("--decay", sweep_opts.decay, "learning-rate decay")->capture_default_str();
  cmd_sweep->add_option("--test-fraction", sweep_opts.test_fraction, "holdout fraction")
      ->capture_default_str();
  cmd_sweep->callback([&] {
    const FeatureTable table = read_feature_csv(sweep_opts.features);
    std::vector<Activation> activations;
    for (const auto& a : sweep_opts.activations) activations.push_back(parse_activation(a));
    std::vector<OptimizerKind> optimizers;
    for (const auto& o : sweep_opts.optimizers) optimizers.push_back(parse_optimizer(o));

    MlpSpec base;
    base.learning_rate = sweep_opts.lr;
    base.decay = sweep_opts.decay;
    base.epochs = sweep_opts.epochs;
    base.batch_size = sweep_opts.batch;

    const SweepGrid grid = activation_optimizer_sweep(table, activations, optimizers, base,
                                                      sweep_opts.test_fraction, global.seed);
    write_sweep_csv(grid, sweep_opts.out);
    for (const auto& err : grid.errors)
      std::fprintf(stderr, "hivesound: cell failed: %s\n", err.c_str());
    std::printf("swept %zu x %zu cells -> %s\n", grid.activations.size(), grid.optimizers.size(),
                sweep_opts.out.c_str());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "hivesound: error[usage]: %s\n", e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "hivesound: error[usage]: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "hivesound: error[data]: %s\n", e.what());
    return 2;
  }
  return 0;
}
