#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "texfuse/errors.hpp"
#include "texfuse/fbm.hpp"
#include "texfuse/features.hpp"
#include "texfuse/io.hpp"
#include "texfuse/model_io.hpp"
#include "texfuse/rng.hpp"
#include "texfuse/rtv.hpp"
#include "texfuse/twoview.hpp"
#include "texfuse/wavelet.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace texfuse::cli {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Field I/O dispatching on the extension: ".f64" is the raw little-endian
// double dump, everything else goes through the image readers/writers.
bool is_raw_path(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".f64") == 0;
}

GrayField read_field_any(const std::string& path) {
  return is_raw_path(path) ? read_field_raw(path) : read_image(path);
}

void write_field_any(const GrayField& field, const std::string& path) {
  if (is_raw_path(path)) {
    write_field_raw(field, path);
  } else {
    write_image(field, path);
  }
}

GrayField offset_field(const GrayField& field, double offset) {
  GrayField out = field;
  for (auto& v : out.data) v += offset;
  return out;
}

GrayField minmax_unit(const GrayField& field) {
  const auto [lo_it, hi_it] = std::minmax_element(field.data.begin(), field.data.end());
  const double lo = *lo_it;
  const double range = *hi_it - lo;
  GrayField out = field;
  for (auto& v : out.data) v = range > 0.0 ? (v - lo) / range : 0.5;
  return out;
}

void emit_text(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
  } else {
    write_text_atomic(path, content);
  }
}

std::string resolve_against(const std::string& anchor_file, const std::string& path) {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  const fs::path parent = fs::path(anchor_file).parent_path();
  return parent.empty() ? path : (parent / p).string();
}

// ---------------------------------------------------------------------------
// key=value config files

struct RunConfig {
  FeatureConfig features;
  TwoViewConfig twoview;
};

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double config_double(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty() || !std::isfinite(v))
    throw input_error("config key " + key + ": expected a number, got '" + text + "'");
  return v;
}

int config_int(const std::string& key, const std::string& text) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || text.empty())
    throw input_error("config key " + key + ": expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

// Strict parser: every key must belong to the vocabulary below; anything
// else (typo, stale key) is rejected rather than silently ignored.
void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw input_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));

    if (key == "rtv.lambda") cfg.features.rtv.lambda = config_double(key, value);
    else if (key == "rtv.sigma_s") cfg.features.rtv.sigma_s = config_double(key, value);
    else if (key == "rtv.eps") cfg.features.rtv.eps = config_double(key, value);
    else if (key == "rtv.iterations") cfg.features.rtv.iterations = config_int(key, value);
    else if (key == "pc.scales") cfg.features.pc.scales = config_int(key, value);
    else if (key == "pc.orientations") cfg.features.pc.orientations = config_int(key, value);
    else if (key == "pc.gamma") cfg.features.pc.gamma = config_double(key, value);
    else if (key == "pc.eps") cfg.features.pc.eps = config_double(key, value);
    else if (key == "pc.min_wavelength") cfg.features.pc.min_wavelength = config_double(key, value);
    else if (key == "pc.mult") cfg.features.pc.mult = config_double(key, value);
    else if (key == "pc.sigma_onf") cfg.features.pc.sigma_onf = config_double(key, value);
    else if (key == "sth.quant_levels") cfg.features.sth.quant_levels = config_int(key, value);
    else if (key == "sth.dark_threshold") cfg.features.sth.dark_threshold = config_int(key, value);
    else if (key == "sth.connectivity") cfg.features.sth.connectivity = config_int(key, value);
    else if (key == "features.patch_size") cfg.features.patch_size = config_int(key, value);
    else if (key == "features.hurst_max_lag") cfg.features.hurst_max_lag = config_int(key, value);
    else if (key == "features.structural_mode") {
      if (value == "pc") cfg.features.structural_mode = StructuralMode::pc;
      else if (value == "sth") cfg.features.structural_mode = StructuralMode::sth;
      else throw input_error("config key " + key + ": expected pc or sth");
    } else if (key == "svm.c") cfg.twoview.svm.c = config_double(key, value);
    else if (key == "svm.gamma") cfg.twoview.svm.rbf_gamma = config_double(key, value);
    else if (key == "svm.tol") cfg.twoview.svm.tol = config_double(key, value);
    else if (key == "svm.kernel") {
      if (value == "rbf") cfg.twoview.svm.kernel = SvmKernel::rbf;
      else if (value == "linear") cfg.twoview.svm.kernel = SvmKernel::linear;
      else throw input_error("config key " + key + ": expected rbf or linear");
    } else if (key == "nn.epochs") cfg.twoview.nn_epochs = config_int(key, value);
    else if (key == "nn.lr") cfg.twoview.nn_lr = config_double(key, value);
    else if (key == "nn.restart_loss") cfg.twoview.nn_restart_loss = config_double(key, value);
    else if (key == "nn.max_restarts") cfg.twoview.nn_max_restarts = config_int(key, value);
    else if (key == "split.test_count") {
      const int v = config_int(key, value);
      if (v < 0) throw input_error("config key split.test_count: must be >= 0");
      cfg.twoview.test_count = static_cast<std::size_t>(v);
    } else {
      throw input_error("unknown config key: " + key);
    }
  }
}

// ---------------------------------------------------------------------------
// features CSV

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string features_csv(const std::vector<std::string>& paths,
                         const std::vector<TwoViewFeatures>& rows, bool with_t,
                         bool with_s) {
  std::ostringstream out;
  out << "path,label";
  if (with_t)
    for (std::size_t i = 0; i < rows.front().phi_t.size(); ++i) out << ",phi_t_" << i;
  if (with_s)
    for (std::size_t i = 0; i < rows.front().phi_s.size(); ++i) out << ",phi_s_" << i;
  out << "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << paths[r] << "," << rows[r].label;
    if (with_t)
      for (double v : rows[r].phi_t) out << "," << fmt_double(v);
    if (with_s)
      for (double v : rows[r].phi_s) out << "," << fmt_double(v);
    out << "\n";
  }
  return out.str();
}

struct FeatureTable {
  std::vector<std::string> paths;
  TwoViewDataset data;
};

// Columns are located by header name; phi_t_*/phi_s_* suffixes must be
// contiguous from zero. Both views are required when need_both is set.
FeatureTable read_features_csv(const std::string& path, bool need_both) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open features file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("empty features file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = split_csv_line(line);
  int path_col = -1;
  int label_col = -1;
  std::vector<std::pair<int, int>> t_cols;  // (suffix, column)
  std::vector<std::pair<int, int>> s_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name = trim(header[c]);
    if (name == "path") path_col = static_cast<int>(c);
    else if (name == "label") label_col = static_cast<int>(c);
    else if (name.rfind("phi_t_", 0) == 0)
      t_cols.emplace_back(config_int(name, name.substr(6)), static_cast<int>(c));
    else if (name.rfind("phi_s_", 0) == 0)
      s_cols.emplace_back(config_int(name, name.substr(6)), static_cast<int>(c));
    else throw input_error("features file: unknown column '" + name + "'");
  }
  if (label_col < 0) throw input_error("features file: missing label column");
  auto check_contiguous = [&](std::vector<std::pair<int, int>>& cols, const char* view) {
    std::sort(cols.begin(), cols.end());
    for (std::size_t i = 0; i < cols.size(); ++i)
      if (cols[i].first != static_cast<int>(i))
        throw input_error(std::string("features file: ") + view +
                          " columns must be numbered 0..n-1");
  };
  check_contiguous(t_cols, "phi_t");
  check_contiguous(s_cols, "phi_s");
  if (need_both && (t_cols.empty() || s_cols.empty()))
    throw input_error("features file: both phi_t_* and phi_s_* columns are required");
  if (t_cols.empty() && s_cols.empty())
    throw input_error("features file: no feature columns");

  FeatureTable table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw input_error("features file line " + std::to_string(lineno) +
                        ": expected " + std::to_string(header.size()) + " cells");
    table.paths.push_back(path_col >= 0 ? cells[path_col] : "");
    const int label = config_int("label", trim(cells[label_col]));
    if (label < 0)
      throw input_error("features file line " + std::to_string(lineno) +
                        ": negative label");
    table.data.labels.push_back(label);
    auto read_vec = [&](const std::vector<std::pair<int, int>>& cols) {
      std::vector<double> v;
      v.reserve(cols.size());
      for (const auto& [suffix, col] : cols) {
        (void)suffix;
        v.push_back(config_double("feature", trim(cells[col])));
      }
      return v;
    };
    table.data.phi_t.push_back(read_vec(t_cols));
    table.data.phi_s.push_back(read_vec(s_cols));
  }
  if (table.data.labels.empty()) throw input_error("features file has no rows");
  table.data.k = *std::max_element(table.data.labels.begin(), table.data.labels.end()) + 1;
  return table;
}

void override_k(TwoViewDataset& data, int k) {
  if (k <= 0) return;
  if (k < data.k)
    throw input_error("--k " + std::to_string(k) + " is below the largest label " +
                      std::to_string(data.k - 1));
  data.k = k;
}

// ---------------------------------------------------------------------------
// JSON fragments

json metrics_json(const Metrics& m) {
  json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["specificity"] = m.specificity;
  j["f_measure"] = m.f_measure;
  j["confusion"] = m.confusion;
  return j;
}

json scalar_metrics_json(const Metrics& m) {
  json j;
  j["accuracy"] = m.accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["specificity"] = m.specificity;
  j["f_measure"] = m.f_measure;
  return j;
}

json aggregate_json(const MetricsAggregate& agg) {
  json j;
  j["mean"] = scalar_metrics_json(agg.mean);
  j["std"] = scalar_metrics_json(agg.stddev);
  j["confusion_total"] = agg.mean.confusion;
  return j;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

// ---------------------------------------------------------------------------
// subcommands

int cmd_synth(double hurst, double sigma, int size, std::uint64_t seed,
              const std::string& method, const std::string& out,
              const std::string& out_raw) {
  const FbmParams params = make_fbm_params(hurst, sigma);
  const std::uint64_t stream = seed_for(seed, seed_tag::synth);
  const GrayField field = method == "spectral" ? synth_fbm_spectral(params, size, stream)
                                               : synth_fbm_exact(params, size, stream);
  if (!out_raw.empty()) write_field_raw(field, out_raw);
  if (is_raw_path(out)) {
    write_field_raw(field, out);
  } else {
    write_image(minmax_unit(field), out);
  }
  return 0;
}

int cmd_estimate_hurst(const std::string& in, int max_lag) {
  const HurstEstimate est = estimate_hurst(read_field_any(in), max_lag);
  json j;
  j["h_hat"] = est.h_hat;
  j["slope"] = est.slope;
  j["intercept"] = est.intercept;
  j["r_squared"] = est.r_squared;
  j["lags_used"] = est.lags_used;
  j["clamped"] = est.clamped;
  print_json(j);
  return 0;
}

int cmd_decompose(const std::string& in, const std::string& out_structure,
                  const std::string& out_texture, const RtvConfig& config,
                  const std::string& out_raw) {
  const GrayField image = read_field_any(in);
  const auto [structure, texture] = rtv_decompose(image, config);
  write_field_any(structure, out_structure);
  if (is_raw_path(out_texture)) {
    write_field_raw(texture, out_texture);
  } else {
    // Texture is zero-mean; the +0.5 offset keeps it visible in 8-bit output.
    write_image(offset_field(texture, 0.5), out_texture);
  }
  if (!out_raw.empty()) write_field_raw(texture, out_raw);
  return 0;
}

int cmd_selfsim(const std::string& in, const std::string& emit_csv,
                const std::string& emit_plot_csv) {
  const SelfSimReport report = self_similarity_report(read_field_any(in));
  json j;
  j["kl_12"] = report.kl_12;
  j["kl_12_rescaled"] = report.kl_12_rescaled;
  j["l1_13"] = report.l1_13;
  j["l2_13"] = report.l2_13;
  j["linf_13"] = report.linf_13;
  j["variance_ratios"] = report.variance_ratios;
  j["levels"] = json::array();
  for (const auto& s : report.level_stats) {
    json lj;
    lj["level"] = s.level;
    lj["sigma_hat"] = s.sigma_hat;
    lj["count"] = s.count;
    lj["excess_kurtosis"] = s.excess_kurtosis;
    j["levels"].push_back(lj);
  }

  if (!emit_csv.empty()) {
    std::ostringstream csv;
    csv << "level,sigma_hat,kurtosis\n";
    for (const auto& s : report.level_stats)
      csv << s.level << "," << fmt_double(s.sigma_hat) << ","
          << fmt_double(s.excess_kurtosis) << "\n";
    write_text_atomic(emit_csv, csv.str());
  }
  if (!emit_plot_csv.empty()) {
    std::ostringstream csv;
    csv << "series,index,value\n";
    for (const auto& s : report.level_stats) {
      csv << "sigma_hat," << s.level << "," << fmt_double(s.sigma_hat) << "\n";
      csv << "log2_sigma," << s.level << "," << fmt_double(std::log2(s.sigma_hat)) << "\n";
      csv << "excess_kurtosis," << s.level << "," << fmt_double(s.excess_kurtosis) << "\n";
    }
    for (std::size_t i = 0; i < report.variance_ratios.size(); ++i)
      csv << "variance_ratio," << (i + 1) << ","
          << fmt_double(report.variance_ratios[i]) << "\n";
    write_text_atomic(emit_plot_csv, csv.str());
  }
  print_json(j);
  return 0;
}

int cmd_features(const std::string& manifest, const std::string& view,
                 const RunConfig& cfg, const std::string& out) {
  const DatasetManifest man = load_manifest(manifest);
  std::vector<std::string> paths;
  std::vector<TwoViewFeatures> rows;
  paths.reserve(man.entries.size());
  rows.reserve(man.entries.size());
  for (const auto& entry : man.entries) {
    const GrayField image = read_image(resolve_against(manifest, entry.path));
    rows.push_back(two_view_features(image, entry.label, cfg.features, entry.roi));
    paths.push_back(entry.path);
  }
  emit_text(out, features_csv(paths, rows, view != "structure", view != "texture"));
  return 0;
}

json train_summary_json(const TwoViewTrainOutcome& outcome, const TwoViewDataset& data) {
  const Metrics test = evaluate_two_view(outcome.model, data, outcome.split.test);
  json j;
  j["k"] = outcome.model.k;
  j["n"] = data.labels.size();
  j["split"] = {{"svm_train", outcome.split.svm_train.size()},
                {"nn_train", outcome.split.nn_train.size()},
                {"test", outcome.split.test.size()}};
  j["nn_final_loss"] = outcome.model.nn_loss_curve.back();
  j["nn_restarts"] = outcome.model.nn_restarts;
  j["test_metrics"] = metrics_json(test);
  return j;
}

int cmd_train(const std::string& features_path, int k, const RunConfig& cfg,
              std::uint64_t seed, const std::string& out) {
  FeatureTable table = read_features_csv(features_path, true);
  override_k(table.data, k);
  const TwoViewTrainOutcome outcome = train_two_view(table.data, cfg.twoview, seed);
  save_model(outcome.model, out);
  print_json(train_summary_json(outcome, table.data));
  return 0;
}

int cmd_evaluate(const std::string& model_path, const std::string& features_path) {
  const TwoViewModel model = load_model(model_path);
  FeatureTable table = read_features_csv(features_path, true);
  if (table.data.k > model.k)
    throw input_error("features contain label " + std::to_string(table.data.k - 1) +
                      " but the model has k=" + std::to_string(model.k));
  table.data.k = model.k;
  std::vector<std::size_t> all(table.data.labels.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const Metrics m = evaluate_two_view(model, table.data, all);
  json j = metrics_json(m);
  j["n"] = all.size();
  print_json(j);
  return 0;
}

std::string repeat_csv(const RepeatResult& result) {
  static const char* kMethods[] = {"t", "s", "concat", "fused"};
  static const char* kMetrics[] = {"accuracy", "precision", "recall",
                                   "specificity", "f_measure"};
  auto pick = [](const RepeatRep& rep, int method) -> const Metrics& {
    switch (method) {
      case 0: return rep.t_only;
      case 1: return rep.s_only;
      case 2: return rep.concat;
      default: return rep.fused;
    }
  };
  auto scalar = [](const Metrics& m, int metric) {
    switch (metric) {
      case 0: return m.accuracy;
      case 1: return m.precision;
      case 2: return m.recall;
      case 3: return m.specificity;
      default: return m.f_measure;
    }
  };
  std::ostringstream out;
  out << "rep,seed";
  for (int metric = 0; metric < 5; ++metric)
    for (int method = 0; method < 4; ++method)
      out << "," << kMetrics[metric] << "_" << kMethods[method];
  out << ",nn_restarts\n";
  for (const auto& rep : result.reps) {
    out << rep.rep << "," << rep.seed;
    for (int metric = 0; metric < 5; ++metric)
      for (int method = 0; method < 4; ++method)
        out << "," << fmt_double(scalar(pick(rep, method), metric));
    out << "," << rep.nn_restarts << "\n";
  }
  return out.str();
}

std::string repeat_plot_csv(const RepeatResult& result) {
  std::ostringstream out;
  out << "rep,method,accuracy\n";
  for (const auto& rep : result.reps) {
    out << rep.rep << ",t," << fmt_double(rep.t_only.accuracy) << "\n";
    out << rep.rep << ",s," << fmt_double(rep.s_only.accuracy) << "\n";
    out << rep.rep << ",concat," << fmt_double(rep.concat.accuracy) << "\n";
    out << rep.rep << ",fused," << fmt_double(rep.fused.accuracy) << "\n";
  }
  return out.str();
}

json repeat_summary_json(const RepeatResult& result) {
  json j;
  j["reps"] = result.reps.size();
  j["t"] = aggregate_json(result.t_only);
  j["s"] = aggregate_json(result.s_only);
  j["concat"] = aggregate_json(result.concat);
  j["fused"] = aggregate_json(result.fused);
  return j;
}

int cmd_repeat(const std::string& features_path, int k, const RunConfig& cfg,
               std::uint64_t seed, int reps, const std::string& out,
               const std::string& emit_plot_csv) {
  FeatureTable table = read_features_csv(features_path, true);
  override_k(table.data, k);
  const RepeatResult result = repeat_eval(table.data, cfg.twoview, reps, seed);
  write_text_atomic(out, repeat_csv(result));
  if (!emit_plot_csv.empty()) write_text_atomic(emit_plot_csv, repeat_plot_csv(result));
  print_json(repeat_summary_json(result));
  return 0;
}

int cmd_pipeline(const std::string& manifest, int reps, std::uint64_t seed,
                 const std::string& out_dir, const RunConfig& cfg) {
  const DatasetManifest man = load_manifest(manifest);
  const fs::path root(out_dir);
  fs::create_directories(root / "structure");
  fs::create_directories(root / "texture");

  std::vector<std::string> paths;
  std::vector<TwoViewFeatures> rows;
  TwoViewDataset data;
  data.k = man.class_count;
  for (std::size_t i = 0; i < man.entries.size(); ++i) {
    const auto& entry = man.entries[i];
    const GrayField image = read_image(resolve_against(manifest, entry.path));
    const auto [structure, texture] = rtv_decompose(image, cfg.features.rtv);

    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%04zu_", i);
    const std::string name =
        prefix + fs::path(entry.path).filename().replace_extension(".pgm").string();
    write_image(structure, (root / "structure" / name).string());
    write_image(offset_field(texture, 0.5), (root / "texture" / name).string());

    rows.push_back(two_view_features_from_layers(structure, texture, entry.label,
                                                 cfg.features, entry.roi));
    paths.push_back(entry.path);
    data.phi_t.push_back(rows.back().phi_t);
    data.phi_s.push_back(rows.back().phi_s);
    data.labels.push_back(entry.label);
  }
  write_text_atomic((root / "features.csv").string(), features_csv(paths, rows, true, true));

  const TwoViewTrainOutcome outcome = train_two_view(data, cfg.twoview, seed);
  save_model(outcome.model, (root / "model.json").string());

  const RepeatResult result = repeat_eval(data, cfg.twoview, reps, seed);
  write_text_atomic((root / "repeat.csv").string(), repeat_csv(result));

  json summary;
  summary["k"] = data.k;
  summary["n"] = data.labels.size();
  summary["seed"] = seed;
  summary["train"] = train_summary_json(outcome, data);
  summary["repeat"] = repeat_summary_json(result);
  write_text_atomic((root / "summary.json").string(), summary.dump(2) + "\n");
  print_json(summary);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"texfuse: a stochastic-texture two-view classification pipeline"};
  app.require_subcommand(1);

  // synth
  double hurst = 0.5, sigma = 1.0;
  int size = 64;
  std::uint64_t seed = 0;
  std::string method = "exact";
  std::string out, out_raw;
  auto* synth = app.add_subcommand(
      "synth", "Sample a fractional Brownian field and write it as an image");
  synth->add_option("--hurst", hurst, "Hurst exponent in (0,1)")->capture_default_str();
  synth->add_option("--sigma", sigma, "field amplitude sigma_H")->capture_default_str();
  synth->add_option("--size", size, "grid side length")->capture_default_str();
  synth->add_option("--seed", seed, "64-bit master seed")->capture_default_str();
  synth->add_option("--method", method, "exact (n <= 96) or spectral (n a power of two)")
      ->check(CLI::IsMember({"exact", "spectral"}))
      ->capture_default_str();
  synth->add_option("--out", out, "output image; .pgm is min-max scaled, .f64 is exact")
      ->required();
  synth->add_option("--out-raw", out_raw, "additionally dump the exact field as .f64");

  // estimate-hurst
  std::string eh_in;
  int max_lag = 8;
  auto* eh = app.add_subcommand("estimate-hurst",
                                "Estimate the Hurst exponent of a field (JSON on stdout)");
  eh->add_option("--in", eh_in, "input image (.pgm/.png) or raw field (.f64)")->required();
  eh->add_option("--max-lag", max_lag, "largest increment lag in the regression")
      ->capture_default_str();

  // decompose
  std::string dc_in, dc_out_s, dc_out_t, dc_out_raw;
  RtvConfig rtv_cfg;
  auto* dc = app.add_subcommand("decompose",
                                "Split an image into structure and texture layers");
  dc->add_option("--in", dc_in, "input image or .f64 field")->required();
  dc->add_option("--out-structure", dc_out_s, "structure layer output")->required();
  dc->add_option("--out-texture", dc_out_t,
                 "texture layer output (+0.5 offset in 8-bit formats)")
      ->required();
  dc->add_option("--lambda", rtv_cfg.lambda, "smoothing weight")->capture_default_str();
  dc->add_option("--sigma-s", rtv_cfg.sigma_s, "spatial window scale, pixels")
      ->capture_default_str();
  dc->add_option("--iterations", rtv_cfg.iterations, "reweighting iterations")
      ->capture_default_str();
  dc->add_option("--out-raw", dc_out_raw, "raw texture dump (.f64, no offset)");

  // selfsim
  std::string ss_in, ss_csv, ss_plot;
  auto* ss = app.add_subcommand(
      "selfsim", "Wavelet self-similarity report of a field (JSON on stdout)");
  ss->add_option("--in", ss_in, "input image or .f64 field")->required();
  ss->add_option("--emit-csv", ss_csv, "write per-level (level,sigma_hat,kurtosis) CSV");
  ss->add_option("--emit-plot-csv", ss_plot, "write tidy (series,index,value) CSV");

  // features
  std::string ft_manifest, ft_view = "both", ft_mode = "pc", ft_config, ft_out;
  int ft_patch = 32;
  auto* ft = app.add_subcommand("features",
                                "Extract two-view features for a dataset manifest");
  ft->add_option("--manifest", ft_manifest, "dataset manifest CSV")->required();
  ft->add_option("--view", ft_view, "which views to emit")
      ->check(CLI::IsMember({"texture", "structure", "both"}))
      ->capture_default_str();
  ft->add_option("--structural-mode", ft_mode, "structural feature: pc or sth")
      ->check(CLI::IsMember({"pc", "sth"}))
      ->capture_default_str();
  ft->add_option("--patch-size", ft_patch, "textural patch side")->capture_default_str();
  ft->add_option("--config", ft_config, "key=value parameter file");
  ft->add_option("--out", ft_out, "output CSV (stdout when omitted)");

  // train
  std::string tr_features, tr_config, tr_out;
  int tr_k = 0;
  std::uint64_t tr_seed = 0;
  auto* tr = app.add_subcommand("train", "Train the two-view fusion classifier");
  tr->add_option("--features", tr_features, "features CSV with both views")->required();
  tr->add_option("--k", tr_k, "class count (default: inferred from labels)");
  tr->add_option("--config", tr_config, "key=value parameter file");
  tr->add_option("--seed", tr_seed, "64-bit master seed")->capture_default_str();
  tr->add_option("--out", tr_out, "model JSON path")->required();

  // evaluate
  std::string ev_model, ev_features;
  auto* ev = app.add_subcommand("evaluate",
                                "Evaluate a trained model on a features CSV (JSON)");
  ev->add_option("--model", ev_model, "model JSON from train")->required();
  ev->add_option("--features", ev_features, "features CSV with both views")->required();

  // repeat
  std::string rp_features, rp_config, rp_out, rp_plot;
  int rp_k = 0, rp_reps = 10;
  std::uint64_t rp_seed = 0;
  auto* rp = app.add_subcommand(
      "repeat", "Repeated random-split evaluation with single-view baselines");
  rp->add_option("--features", rp_features, "features CSV with both views")->required();
  rp->add_option("--k", rp_k, "class count (default: inferred from labels)");
  rp->add_option("--config", rp_config, "key=value parameter file");
  rp->add_option("--seed", rp_seed, "base seed; repetition r uses seed+r")
      ->capture_default_str();
  rp->add_option("--reps", rp_reps, "number of repetitions")->capture_default_str();
  rp->add_option("--out", rp_out, "per-repetition metrics CSV")->required();
  rp->add_option("--emit-plot-csv", rp_plot, "tidy (rep,method,accuracy) CSV");

  // pipeline
  std::string pl_manifest, pl_config, pl_dir = "pipeline_out", pl_mode = "pc";
  int pl_reps = 10, pl_patch = 32;
  std::uint64_t pl_seed = 0;
  auto* pl = app.add_subcommand(
      "pipeline", "decompose -> features -> train -> repeat from one manifest");
  pl->add_option("--manifest", pl_manifest, "dataset manifest CSV")->required();
  pl->add_option("--reps", pl_reps, "number of repetitions")->capture_default_str();
  pl->add_option("--seed", pl_seed, "64-bit master seed")->capture_default_str();
  pl->add_option("--out-dir", pl_dir, "output directory")->capture_default_str();
  pl->add_option("--config", pl_config, "key=value parameter file");
  pl->add_option("--structural-mode", pl_mode, "structural feature: pc or sth")
      ->check(CLI::IsMember({"pc", "sth"}))
      ->capture_default_str();
  pl->add_option("--patch-size", pl_patch, "textural patch side")->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("texfuse");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());

    if (app.got_subcommand(synth))
      return cmd_synth(hurst, sigma, size, seed, method, out, out_raw);
    if (app.got_subcommand(eh)) return cmd_estimate_hurst(eh_in, max_lag);
    if (app.got_subcommand(dc))
      return cmd_decompose(dc_in, dc_out_s, dc_out_t, rtv_cfg, dc_out_raw);
    if (app.got_subcommand(ss)) return cmd_selfsim(ss_in, ss_csv, ss_plot);
    if (app.got_subcommand(ft)) {
      RunConfig cfg;
      if (!ft_config.empty()) apply_config_file(cfg, ft_config);
      if (ft->count("--patch-size") > 0) cfg.features.patch_size = ft_patch;
      if (ft->count("--structural-mode") > 0)
        cfg.features.structural_mode =
            ft_mode == "sth" ? StructuralMode::sth : StructuralMode::pc;
      return cmd_features(ft_manifest, ft_view, cfg, ft_out);
    }
    if (app.got_subcommand(tr)) {
      RunConfig cfg;
      if (!tr_config.empty()) apply_config_file(cfg, tr_config);
      return cmd_train(tr_features, tr_k, cfg, tr_seed, tr_out);
    }
    if (app.got_subcommand(ev)) return cmd_evaluate(ev_model, ev_features);
    if (app.got_subcommand(rp)) {
      RunConfig cfg;
      if (!rp_config.empty()) apply_config_file(cfg, rp_config);
      return cmd_repeat(rp_features, rp_k, cfg, rp_seed, rp_reps, rp_out, rp_plot);
    }
    if (app.got_subcommand(pl)) {
      RunConfig cfg;
      if (!pl_config.empty()) apply_config_file(cfg, pl_config);
      if (pl->count("--structural-mode") > 0)
        cfg.features.structural_mode =
            pl_mode == "sth" ? StructuralMode::sth : StructuralMode::pc;
      if (pl->count("--patch-size") > 0) cfg.features.patch_size = pl_patch;
      return cmd_pipeline(pl_manifest, pl_reps, pl_seed, pl_dir, cfg);
    }
    return 0;
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const input_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace texfuse::cli
