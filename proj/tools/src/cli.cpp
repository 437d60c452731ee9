// Copyright 2026 The MMGCN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mmgcn/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mmgcn/augment.hpp"
#include "mmgcn/config.hpp"
#include "mmgcn/encoding.hpp"
#include "mmgcn/errors.hpp"
#include "mmgcn/experiments.hpp"
#include "mmgcn/io.hpp"
#include "mmgcn/metrics.hpp"
#include "mmgcn/train.hpp"
#include "mmgcn/weights.hpp"

namespace mmgcn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Published reference costs for a 120-frame window (GFLOPs).
struct FlopReference {
  const char* ratio;
  std::size_t visual_per_30;
  double reference_gflops;
};
constexpr FlopReference kFlopRows[] = {{"30:1", 1, 131.0}, {"30:2", 2, 220.0}, {"30:30", 30, 2687.3}};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

/// Collects artifacts written during one command and emits manifest.json.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create " + dir_.string() + ": " + ec.message());
  }

  const fs::path& dir() const { return dir_; }

  void write(const std::string& name, const std::string& contents) {
    write_file_atomic(dir_ / name, contents);
    artifacts_[name] = sha256_hex(contents);
  }

  /// Registers a file written by other means.
  void track(const std::string& name) { artifacts_[name] = sha256_hex(read_file(dir_ / name)); }

  void manifest(const std::string& command, const std::vector<std::string>& args, const json& config,
                std::uint64_t seed) {
    json m;
    m["tool"] = "mmgcn";
    m["version"] = kVersion;
    m["command"] = command;
    m["args"] = args;
    m["config"] = config;
    m["config_digest"] = config_digest(config);
    m["seed"] = seed;
    m["artifacts"] = artifacts_;
    write_file_atomic(dir_ / "manifest.json", m.dump(2) + "\n");
  }

 private:
  fs::path dir_;
  std::map<std::string, std::string> artifacts_;
};

std::string report_csv_header() { return "accuracy,f1_macro,f1_micro,f1_at_10,f1_at_25,f1_at_50"; }

std::string report_csv_fields(const EvalReport& r) {
  return fmt(r.accuracy) + "," + fmt(r.f1_macro) + "," + fmt(r.f1_micro) + "," + fmt(r.f1_at[0]) + "," +
         fmt(r.f1_at[1]) + "," + fmt(r.f1_at[2]);
}

json report_json(const EvalReport& r) {
  json j;
  j["accuracy"] = r.accuracy;
  j["f1_macro"] = r.f1_macro;
  j["f1_micro"] = r.f1_micro;
  for (std::size_t k = 0; k < kOverlapThresholds.size(); ++k) {
    const std::string key = std::to_string(kOverlapThresholds[k]);
    j["f1_at"][key] = r.f1_at[k];
    j["segment_counts"][key] = {{"tp", r.segment_counts[k].tp},
                                {"fp", r.segment_counts[k].fp},
                                {"fn", r.segment_counts[k].fn}};
  }
  return j;
}

std::string class_color(int c) {
  static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
                                   "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};
  return kPalette[static_cast<std::size_t>(c) % std::size(kPalette)];
}

/// Ground truth above prediction, one pair of tracks per sequence.
std::string timeline_svg(const std::vector<std::vector<int>>& gt, const std::vector<std::vector<int>>& pred,
                         const std::vector<std::string>& class_names, std::size_t max_sequences) {
  const std::size_t n = std::min(gt.size(), max_sequences);
  const double width = 720.0, track = 14.0, label_w = 60.0, gap = 10.0;
  const double height = 30.0 + static_cast<double>(n) * (2 * track + gap) + 24.0;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + width + 10 << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  double y = 20.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double frames = static_cast<double>(gt[i].size());
    const double scale = width / frames;
    s << "<text x=\"2\" y=\"" << y + 10 << "\">seq " << i << " gt</text>\n";
    s << "<text x=\"2\" y=\"" << y + track + 10 << "\">pred</text>\n";
    for (int row = 0; row < 2; ++row) {
      const auto& ids = row == 0 ? gt[i] : pred[i];
      for (const auto& seg : extract_segments(ids)) {
        s << "<rect x=\"" << label_w + static_cast<double>(seg.start) * scale << "\" y=\"" << y + row * track
          << "\" width=\"" << static_cast<double>(seg.length()) * scale << "\" height=\"" << track - 1
          << "\" fill=\"" << class_color(seg.label) << "\"><title>" << class_names.at(seg.label) << " ["
          << seg.start << "," << seg.end << ")</title></rect>\n";
      }
    }
    y += 2 * track + gap;
  }
  double x = label_w;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"10\" height=\"10\" fill=\""
      << class_color(static_cast<int>(c)) << "\"/><text x=\"" << x + 13 << "\" y=\"" << y + 9 << "\">"
      << class_names[c] << "</text>\n";
    x += 80.0;
  }
  s << "</svg>\n";
  return s.str();
}

std::vector<std::vector<int>> ground_truth(const Dataset& ds) {
  std::vector<std::vector<int>> gt;
  for (const auto& s : ds.sequences) gt.push_back(s.labels);
  return gt;
}

void apply_seed(RunConfig& rc, std::optional<std::uint64_t> seed) {
  if (!seed) return;
  rc.seed = *seed;
  rc.train.seed = *seed;
  rc.synthetic.seed = *seed;
}

std::vector<double> parse_rates(const std::string& text) {
  std::vector<double> rates;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ValueError("--rates: cannot parse '" + item + "'");
    if (!(v >= 0.0 && v <= 1.0)) throw ValueError("--rates: " + item + " outside [0, 1]");
    rates.push_back(v);
  }
  if (rates.empty()) throw ValueError("--rates: empty list");
  return rates;
}

Model model_for_dataset(const fs::path& weights, const Dataset& ds) {
  Model m = load_weights(weights);
  const ModelConfig& c = m.config();
  if (c.motion_frames != ds.meta.motion_frames || c.visual_frames != ds.meta.visual_frames ||
      c.node_count() != ds.meta.node_count() || c.num_classes != ds.meta.num_classes ||
      c.visual_channels != ds.meta.visual_channels) {
    throw DataError("dataset shape (T_m=" + std::to_string(ds.meta.motion_frames) +
                    ", T_v=" + std::to_string(ds.meta.visual_frames) + ", V=" + std::to_string(ds.meta.node_count()) +
                    ", K=" + std::to_string(ds.meta.num_classes) + ") does not match the weights");
  }
  return m;
}

std::string history_csv(const std::vector<EpochStats>& history) {
  std::string s = "epoch,learning_rate,loss,batch_accuracy,train_accuracy\n";
  for (const auto& e : history) {
    s += std::to_string(e.epoch) + "," + fmt(e.learning_rate) + "," + fmt(e.loss) + "," + fmt(e.batch_accuracy) + "," +
         fmt(e.train_accuracy) + "\n";
  }
  return s;
}

// ---------------------------------------------------------------------------
// Subcommands

struct Common {
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
};

std::size_t resolve_threads(std::size_t requested) { return requested == 0 ? threads_from_env() : requested; }

int cmd_generate(const std::string& config, const std::string& out_dir, const Common& common,
                 const std::vector<std::string>& args, std::ostream& out) {
  RunConfig rc = load_run_config(config);
  apply_seed(rc, common.seed);
  const Dataset ds = generate_synthetic(rc.synthetic);
  Outputs o(out_dir);
  save_dataset(ds, o.dir());
  for (const auto& e : fs::directory_iterator(o.dir())) {
    const std::string name = e.path().filename().string();
    if (name != "manifest.json") o.track(name);
  }
  o.manifest("generate", args, to_json(rc.synthetic), rc.seed);
  out << "wrote " << ds.sequences.size() << " sequences to " << out_dir << "\n";
  return kOk;
}

int cmd_train(const std::string& config, const std::string& data, const std::string& out_dir, const Common& common,
              const std::vector<std::string>& args, std::ostream& out) {
  RunConfig rc = load_run_config(config);
  apply_seed(rc, common.seed);
  rc.train.threads = resolve_threads(common.threads);
  const Dataset ds = load_dataset(data);
  rc.model.adopt(ds.meta);
  rc.data_dir = data;
  rc.output_dir = out_dir;
  Outputs o(out_dir);
  const auto result = train(ds, rc.model, rc.train, [&](const EpochStats& e) {
    out << "epoch " << e.epoch << " lr " << e.learning_rate << " loss " << fixed(e.loss, 5);
    if (e.train_accuracy >= 0) out << " acc " << fixed(e.train_accuracy, 4);
    out << "\n";
  });
  rc.train.threads = 0;  // not part of the result's identity
  save_weights(o.dir() / "weights.bin", result.model);
  o.track("weights.bin");
  o.write("history.csv", history_csv(result.history));
  json cfg = to_json(rc);
  cfg.erase("data_dir");
  cfg.erase("output_dir");
  o.write("config.json", cfg.dump(2) + "\n");
  o.manifest("train", args, cfg, rc.seed);
  return kOk;
}

int cmd_eval(const std::string& weights, const std::string& data, const std::string& out_dir,
             const std::string& predictor, std::optional<int> ignore_class, std::size_t svg_sequences,
             const Common& common, const std::vector<std::string>& args, std::ostream& out) {
  const Dataset ds = load_dataset(data);
  const auto gt = ground_truth(ds);
  std::vector<std::vector<int>> pred;
  json cfg;
  if (predictor == "identity") {
    pred = gt;
    cfg["predictor"] = "identity";
  } else {
    if (weights.empty()) throw ValueError("eval: --weights is required unless --predictor identity");
    const Model m = model_for_dataset(weights, ds);
    pred = predict_dataset(m, ds, resolve_threads(common.threads));
    cfg["predictor"] = "model";
    cfg["model"] = to_json(m.config());
    cfg["weights_sha256"] = sha256_hex(read_file(weights));
  }
  if (ignore_class) {
    if (*ignore_class < 0 || static_cast<std::size_t>(*ignore_class) >= ds.meta.num_classes) {
      throw ValueError("--ignore-class outside the class range");
    }
    cfg["ignore_class"] = *ignore_class;
  }
  const EvalReport r = evaluate_many(gt, pred, ds.meta.num_classes, ignore_class);
  Outputs o(out_dir);
  json rj = report_json(r);
  rj["sequences"] = ds.sequences.size();
  o.write("report.json", rj.dump(2) + "\n");
  o.write("report.csv", report_csv_header() + "\n" + report_csv_fields(r) + "\n");
  std::string per_seq = "sequence," + report_csv_header() + "\n";
  std::string preds = "sequence,frame,class_id\n";
  for (std::size_t i = 0; i < gt.size(); ++i) {
    per_seq += std::to_string(i) + "," + report_csv_fields(evaluate(gt[i], pred[i], ds.meta.num_classes, ignore_class)) + "\n";
    for (std::size_t t = 0; t < pred[i].size(); ++t) {
      preds += std::to_string(i) + "," + std::to_string(t) + "," + std::to_string(pred[i][t]) + "\n";
    }
  }
  o.write("per_sequence.csv", per_seq);
  o.write("predictions.csv", preds);
  o.write("timeline.svg", timeline_svg(gt, pred, ds.meta.class_names, svg_sequences));
  o.manifest("eval", args, cfg, common.seed.value_or(0));
  out << "accuracy " << fixed(r.accuracy, 4) << "  F1 macro " << fixed(r.f1_macro, 4) << "  F1@{10,25,50} "
      << fixed(r.f1_at[0], 4) << " " << fixed(r.f1_at[1], 4) << " " << fixed(r.f1_at[2], 4) << "\n";
  return kOk;
}

int cmd_augment(const std::string& config, const std::string& data, const std::string& out_dir, std::size_t count,
                const Common& common, const std::vector<std::string>& args, std::ostream& out) {
  RunConfig rc = load_run_config(config);
  apply_seed(rc, common.seed);
  const Dataset ds = load_dataset(data);
  rc.model.adopt(ds.meta);
  const std::size_t n = std::min(count == 0 ? rc.train.batch_size : count, ds.sequences.size());
  if (n < 2 && rc.train.mixing.enabled) throw ValueError("augment: mixing needs at least two sequences");
  std::vector<TrainingSample> batch;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = ds.sequences[i];
    Tensor motion = rc.model.use_sinusoidal ? encode_sequence(s.motion, rc.model.encoding) : raw_positions(s.motion);
    batch.push_back({motion, ds.visual_tensor(i), LabelSequence::one_hot(s.labels, ds.meta.num_classes)});
  }
  const auto mixed = apply_smoothlabelmix(batch, rc.train.smoothing, rc.train.mixing, derive_seed(rc.seed, 0xa06));
  const std::size_t k = ds.meta.num_classes;
  std::string header = "sequence,frame";
  for (std::size_t c = 0; c < k; ++c) header += ",p_" + std::to_string(c);
  std::string before = header + "\n", after = header + "\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = batch[i].labels.probs.data(), a = mixed[i].labels.probs.data();
    for (std::size_t t = 0; t < batch[i].labels.frames(); ++t) {
      const std::string key = std::to_string(i) + "," + std::to_string(t);
      before += key;
      after += key;
      for (std::size_t c = 0; c < k; ++c) {
        before += "," + fmt(b[t * k + c]);
        after += "," + fmt(a[t * k + c]);
      }
      before += "\n";
      after += "\n";
    }
  }
  Outputs o(out_dir);
  o.write("labels_before.csv", before);
  o.write("labels_after.csv", after);
  json cfg = to_json(rc.train);
  cfg["sequences"] = n;
  o.manifest("augment", args, cfg, rc.seed);
  out << "augmented " << n << " sequences\n";
  return kOk;
}

int cmd_perturb(const std::string& data, double rate, const std::string& out_dir, const Common& common,
                const std::vector<std::string>& args, std::ostream& out) {
  const std::uint64_t seed = common.seed.value_or(0);
  const Dataset noisy = inject_node_dropout(load_dataset(data), {rate, seed});
  Outputs o(out_dir);
  save_dataset(noisy, o.dir());
  for (const auto& e : fs::directory_iterator(o.dir())) {
    const std::string name = e.path().filename().string();
    if (name != "manifest.json") o.track(name);
  }
  o.manifest("perturb", args, {{"node_drop_rate", rate}}, seed);
  out << "node dropout " << rate << " applied to " << noisy.sequences.size() << " sequences\n";
  return kOk;
}

int cmd_robustness(const std::string& weights, const std::string& data, const std::string& rates_text,
                   const std::string& out_dir, const Common& common, const std::vector<std::string>& args,
                   std::ostream& out) {
  const auto rates = parse_rates(rates_text);
  const Dataset ds = load_dataset(data);
  const Model m = model_for_dataset(weights, ds);
  const std::uint64_t seed = common.seed.value_or(0);
  const auto rows = robustness_sweep(m, ds, rates, seed, resolve_threads(common.threads));
  std::string csv = "rate," + report_csv_header() + "\n";
  for (const auto& r : rows) {
    csv += fmt(r.rate) + "," + report_csv_fields(r.report) + "\n";
    out << "rate " << fixed(r.rate, 2) << "  accuracy " << fixed(r.report.accuracy, 4) << "  F1@50 "
        << fixed(r.report.f1_at[2], 4) << "\n";
  }
  Outputs o(out_dir);
  o.write("robustness.csv", csv);
  o.manifest("robustness", args, {{"rates", rates}, {"weights_sha256", sha256_hex(read_file(weights))}}, seed);
  return kOk;
}

int cmd_ablate(const std::string& grid_path, const std::string& config, const std::string& data,
               const std::string& out_dir, const Common& common, const std::vector<std::string>& args,
               std::ostream& out) {
  RunConfig rc = load_run_config(config);
  apply_seed(rc, common.seed);
  rc.train.threads = resolve_threads(common.threads);
  AblationGrid grid;
  if (grid_path != "default") {
    json j;
    try {
      j = json::parse(read_file(grid_path));
    } catch (const json::exception& e) {
      throw ConfigError(grid_path + ": invalid JSON (" + e.what() + ")");
    }
    grid = ablation_grid_from_json(j);
  }
  const Dataset ds = load_dataset(data);
  rc.model.adopt(ds.meta);
  std::string csv = "cell,smoothing,mixing,refinement,fusion,seed," + report_csv_header() + "\n";
  std::map<std::string, std::vector<EvalReport>> by_cell;
  std::vector<std::string> order;
  const auto results = run_ablation(ds, rc, grid, [&](const AblationResult& r) {
    out << r.cell.label() << " seed " << r.seed << "  accuracy " << fixed(r.report.accuracy, 4) << "  F1@50 "
        << fixed(r.report.f1_at[2], 4) << std::endl;
  });
  for (const auto& r : results) {
    const std::string label = r.cell.label();
    const char* smoothing = r.cell.smoothing == SmoothingKind::kOriginal ? "O"
                            : r.cell.smoothing == SmoothingKind::kLinear ? "L"
                                                                         : "G";
    csv += label + "," + smoothing + "," + (r.cell.mixing ? "1" : "0") + "," + (r.cell.refinement ? "1" : "0") + "," +
           to_string(r.cell.fusion) + "," + std::to_string(r.seed) + "," + report_csv_fields(r.report) + "\n";
    if (!by_cell.count(label)) order.push_back(label);
    by_cell[label].push_back(r.report);
  }
  std::string summary = "cell,runs,mean_accuracy,mean_f1_macro,mean_f1_micro,mean_f1_at_10,mean_f1_at_25,mean_f1_at_50\n";
  std::string table = "| configuration | runs | accuracy | F1 macro | F1@10 | F1@25 | F1@50 |\n|---|---|---|---|---|---|---|\n";
  for (const auto& label : order) {
    const auto& reps = by_cell[label];
    EvalReport mean;
    for (const auto& r : reps) {
      const double w = 1.0 / static_cast<double>(reps.size());
      mean.accuracy += w * r.accuracy;
      mean.f1_macro += w * r.f1_macro;
      mean.f1_micro += w * r.f1_micro;
      for (std::size_t k = 0; k < 3; ++k) mean.f1_at[k] += w * r.f1_at[k];
    }
    summary += label + "," + std::to_string(reps.size()) + "," + report_csv_fields(mean) + "\n";
    auto pct = [](double v) { return fixed(100.0 * v, 2); };
    table += "| " + label + " | " + std::to_string(reps.size()) + " | " + pct(mean.accuracy) + " | " +
             pct(mean.f1_macro) + " | " + pct(mean.f1_at[0]) + " | " + pct(mean.f1_at[1]) + " | " +
             pct(mean.f1_at[2]) + " |\n";
  }
  Outputs o(out_dir);
  o.write("ablation.csv", csv);
  o.write("ablation_summary.csv", summary);
  o.write("ablation.md", table);
  rc.train.threads = 0;
  json cfg = to_json(rc);
  cfg.erase("data_dir");
  cfg.erase("output_dir");
  o.manifest("ablate", args, {{"run", cfg}, {"grid", to_json(grid)}}, rc.seed);
  out << table;
  return kOk;
}

int cmd_flops(const std::string& config, const std::string& out_dir, const Common& common,
              const std::vector<std::string>& args, std::ostream& out) {
  RunConfig rc = load_run_config(config);
  apply_seed(rc, common.seed);
  const ModelConfig& m = rc.model;
  const std::size_t t_m = m.motion_frames;
  std::string csv = "ratio,t_m,t_v,visual_encoder,refinement,gcn,classifier,total,reference_gflops\n";
  out << "ratio   T_m  T_v   visual(G)  refine(G)     gcn(G)  classif(G)   total(G)  reference(G)\n";
  double base = 0.0;
  for (const auto& row : kFlopRows) {
    const std::size_t t_v = t_m * row.visual_per_30 / 30;
    const FlopBreakdown f = estimate_flops(m, t_m, t_v);
    if (base == 0.0) base = f.total();
    char line[200];
    std::snprintf(line, sizeof line, "%-6s %4zu %4zu %11.4f %10.4f %10.4f %11.4f %10.4f %13.1f\n", row.ratio, t_m, t_v,
                  f.visual_encoder / 1e9, f.refinement / 1e9, f.gcn / 1e9, f.classifier / 1e9, f.total() / 1e9,
                  row.reference_gflops);
    out << line;
    csv += std::string(row.ratio) + "," + std::to_string(t_m) + "," + std::to_string(t_v) + "," +
           fmt(f.visual_encoder) + "," + fmt(f.refinement) + "," + fmt(f.gcn) + "," + fmt(f.classifier) + "," +
           fmt(f.total()) + "," + fmt(row.reference_gflops) + "\n";
    if (row.visual_per_30 == 30) out << "ratio 30:30 / 30:1 = " << fixed(f.total() / base, 2) << "\n";
  }
  if (!out_dir.empty()) {
    Outputs o(out_dir);
    o.write("flops.csv", csv);
    o.manifest("flops", args, to_json(m), rc.seed);
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-modal graph convolutional network for action segmentation", "mmgcn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  std::string config = "default", data, out_dir, weights, predictor = "model", rates_text = "0,0.05,0.1,0.15,0.2,0.25",
              grid = "default";
  double rate = 0.0;
  std::optional<int> ignore_class;
  std::size_t count = 0, svg_sequences = 8;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "Seed overriding the config");
    sub->add_option("--threads", common.threads, "Worker threads (0: MMGCN_THREADS or 1)");
  };

  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  gen->add_option("--config", config, "Run config JSON or 'default'");
  gen->add_option("--out", out_dir, "Output directory")->required();
  add_common(gen);

  auto* tr = app.add_subcommand("train", "Train a model; writes weights and history");
  tr->add_option("--config", config, "Run config JSON or 'default'");
  tr->add_option("--data", data, "Dataset directory")->required();
  tr->add_option("--out", out_dir, "Output directory")->required();
  add_common(tr);

  auto* ev = app.add_subcommand("eval", "Evaluate weights on a dataset");
  ev->add_option("--weights", weights, "Weights file");
  ev->add_option("--data", data, "Dataset directory")->required();
  ev->add_option("--out", out_dir, "Output directory")->required();
  ev->add_option("--predictor", predictor, "model, or identity (emits the ground truth)")
      ->check(CLI::IsMember({"model", "identity"}));
  ev->add_option("--ignore-class", ignore_class, "Class whose segments F1@k skips");
  ev->add_option("--svg-sequences", svg_sequences, "Sequences drawn in timeline.svg");
  add_common(ev);

  auto* aug = app.add_subcommand("augment", "Write labels before and after SmoothLabelMix");
  aug->add_option("--config", config, "Run config JSON or 'default'");
  aug->add_option("--data", data, "Dataset directory")->required();
  aug->add_option("--out", out_dir, "Output directory")->required();
  aug->add_option("--count", count, "Sequences in the batch (0: batch size)");
  add_common(aug);

  auto* per = app.add_subcommand("perturb", "Apply node dropout to a dataset");
  per->add_option("--data", data, "Dataset directory")->required();
  per->add_option("--rate", rate, "Per-(frame, node) drop probability")->required();
  per->add_option("--out", out_dir, "Output directory")->required();
  add_common(per);

  auto* rob = app.add_subcommand("robustness", "Accuracy and F1@50 against node dropout rate");
  rob->add_option("--weights", weights, "Weights file")->required();
  rob->add_option("--data", data, "Dataset directory")->required();
  rob->add_option("--rates", rates_text, "Comma-separated dropout rates");
  rob->add_option("--out", out_dir, "Output directory")->required();
  add_common(rob);

  auto* abl = app.add_subcommand("ablate", "Train and evaluate every cell of an ablation grid");
  abl->add_option("--grid", grid, "Grid JSON or 'default'");
  abl->add_option("--config", config, "Base run config JSON or 'default'");
  abl->add_option("--data", data, "Dataset directory")->required();
  abl->add_option("--out", out_dir, "Output directory")->required();
  add_common(abl);

  auto* fl = app.add_subcommand("flops", "Cost model for 30:1, 30:2 and 30:30 sampling");
  fl->add_option("--config", config, "Run config JSON or 'default'");
  fl->add_option("--out", out_dir, "Optional output directory for flops.csv");
  add_common(fl);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*gen) return cmd_generate(config, out_dir, common, args, out);
    if (*tr) return cmd_train(config, data, out_dir, common, args, out);
    if (*ev) return cmd_eval(weights, data, out_dir, predictor, ignore_class, svg_sequences, common, args, out);
    if (*aug) return cmd_augment(config, data, out_dir, count, common, args, out);
    if (*per) return cmd_perturb(data, rate, out_dir, common, args, out);
    if (*rob) return cmd_robustness(weights, data, rates_text, out_dir, common, args, out);
    if (*abl) return cmd_ablate(grid, config, data, out_dir, common, args, out);
    if (*fl) return cmd_flops(config, out_dir, common, args, out);
  } catch (const ValueError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kData;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return kData;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return kNumeric;
  }
  return kUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace mmgcn::cli
