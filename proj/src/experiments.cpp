#include "hsdr/experiments.hpp"

#include "hsdr/cube.hpp"
#include "hsdr/metrics.hpp"
#include "hsdr/reducers.hpp"
#include "hsdr/sampling.hpp"
#include "hsdr/scene.hpp"
#include "hsdr/tasks.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace hsdr {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

const std::set<std::string>& allowed_keys(const std::string& command) {
  static const std::set<std::string> common = {"seed", "out", "format"};
  static const std::map<std::string, std::set<std::string>> per_command = {
      {"synth",
       {"lines", "samples", "bands", "endmembers", "smoothness", "noise_sigma",
        "stripe_sigma", "smile_amplitude", "cube_out", "labels_out", "mask_out",
        "target_class"}},
      {"fit", {"input", "method", "r", "model_out", "tol", "max_iter", "lpp_k",
               "lpp_subsample", "ica_alpha", "cs_columns", "dbn_pretrain_epochs",
               "dbn_lr_pretrain", "dbn_lr_finetune", "dbn_momentum", "dbn_l1",
               "dbn_chain", "dbn_batch"}},
      {"transform", {"input", "model", "cube_out"}},
      {"reconstruct",
       {"input", "methods", "r_list", "n_list", "sample_repeats", "tol",
        "max_iter", "lpp_k", "lpp_subsample", "ica_alpha", "cs_columns",
        "dbn_pretrain_epochs", "dbn_lr_pretrain", "dbn_lr_finetune",
        "dbn_momentum", "dbn_l1", "dbn_chain", "dbn_batch", "nmf_max_iter",
        "dbn_max_iter", "fastica_max_iter"}},
      {"eval-mi", {"input", "methods", "r", "mi_k", "mi_sample", "tol",
                   "max_iter", "lpp_k", "lpp_subsample", "ica_alpha",
                   "cs_columns", "dbn_pretrain_epochs", "dbn_lr_pretrain",
                   "dbn_lr_finetune", "dbn_momentum", "dbn_l1", "dbn_chain",
                   "dbn_batch", "nmf_max_iter", "dbn_max_iter",
                   "fastica_max_iter"}},
      {"eval-atpv", {"input", "methods", "r", "tol", "max_iter", "lpp_k",
                     "lpp_subsample", "ica_alpha", "cs_columns",
                     "dbn_pretrain_epochs", "dbn_lr_pretrain",
                     "dbn_lr_finetune", "dbn_momentum", "dbn_l1", "dbn_chain",
                     "dbn_batch", "nmf_max_iter", "dbn_max_iter",
                     "fastica_max_iter"}},
      {"detect", {"input", "mask", "methods", "r_list", "tol", "max_iter",
                  "lpp_k", "lpp_subsample", "ica_alpha", "cs_columns",
                  "dbn_pretrain_epochs", "dbn_lr_pretrain", "dbn_lr_finetune",
                  "dbn_momentum", "dbn_l1", "dbn_chain", "dbn_batch",
                  "nmf_max_iter", "dbn_max_iter", "fastica_max_iter",
                  "include_raw"}},
      {"classify", {"input", "labels", "methods", "r_list", "train_pixels",
                    "exclude_saturated", "svm_lambda", "svm_epochs", "tol",
                    "max_iter", "lpp_k", "lpp_subsample", "ica_alpha",
                    "cs_columns", "dbn_pretrain_epochs", "dbn_lr_pretrain",
                    "dbn_lr_finetune", "dbn_momentum", "dbn_l1", "dbn_chain",
                    "dbn_batch", "nmf_max_iter", "dbn_max_iter",
                    "fastica_max_iter", "include_raw"}},
      {"bench", {"input", "methods", "n_list", "r", "repeats", "tol",
                 "max_iter", "lpp_k", "lpp_subsample", "ica_alpha",
                 "cs_columns", "dbn_pretrain_epochs", "dbn_lr_pretrain",
                 "dbn_lr_finetune", "dbn_momentum", "dbn_l1", "dbn_chain",
                 "dbn_batch", "nmf_max_iter", "dbn_max_iter",
                 "fastica_max_iter", "nmf_tol", "dbn_tol", "fastica_tol"}},
  };
  const auto it = per_command.find(command);
  if (it == per_command.end()) throw ConfigError("unknown command '" + command + "'");
  static thread_local std::set<std::string> merged;
  merged = it->second;
  merged.insert(common.begin(), common.end());
  return merged;
}

}  // namespace

ExperimentConfig::ExperimentConfig(
    std::string command, std::vector<std::pair<std::string, std::string>> entries)
    : command_(std::move(command)), entries_(std::move(entries)) {
  const auto& allowed = allowed_keys(command_);
  for (const auto& [key, value] : entries_)
    if (!allowed.count(key))
      throw ConfigError("unknown config key '" + key + "' for command '" +
                        command_ + "'");
}

const std::string* ExperimentConfig::find(const std::string& key) const {
  const std::string* hit = nullptr;
  for (const auto& [k, v] : entries_)
    if (k == key) hit = &v;  // last assignment wins
  return hit;
}

bool ExperimentConfig::has(const std::string& key) const { return find(key) != nullptr; }

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!allowed_keys(command_).count(key))
    throw ConfigError("unknown config key '" + key + "' for command '" + command_ + "'");
  entries_.emplace_back(key, value);
}

std::string ExperimentConfig::get_string(const std::string& key) const {
  const std::string* v = find(key);
  if (!v || v->empty()) throw ConfigError("missing required config key '" + key + "'");
  return *v;
}

std::string ExperimentConfig::get_string(const std::string& key,
                                         const std::string& fallback) const {
  const std::string* v = find(key);
  return v ? *v : fallback;
}

double ExperimentConfig::get_double(const std::string& key, double fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const double parsed = std::stod(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not a number: " + *v);
  }
}

long long ExperimentConfig::get_int(const std::string& key, long long fallback) const {
  const std::string* v = find(key);
  if (!v) return fallback;
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(*v, &used);
    if (used != v->size()) throw std::invalid_argument(*v);
    return parsed;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' is not an integer: " + *v);
  }
}

long long ExperimentConfig::get_int(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing required config key '" + key + "'");
  return get_int(key, 0);
}

std::uint64_t ExperimentConfig::get_seed() const {
  return static_cast<std::uint64_t>(get_int("seed", 0));
}

std::vector<std::string> ExperimentConfig::get_string_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get_string(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
  return out;
}

std::vector<long long> ExperimentConfig::get_int_list(const std::string& key) const {
  std::vector<long long> out;
  for (const std::string& item : get_string_list(key)) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' has a non-integer entry: " + item);
    }
    if (out.back() <= 0)
      throw ConfigError("config key '" + key + "' entries must be positive");
  }
  return out;
}

ExperimentConfig parse_config_text(const std::string& command,
                                   const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not 'key = value': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
    entries.emplace_back(key, value);
  }
  return ExperimentConfig(command, std::move(entries));
}

ExperimentConfig load_config(const std::string& command, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(command, buf.str());
}

namespace {

FitConfig make_fit_config(const ExperimentConfig& cfg, const std::string& method,
                          Index r, std::uint64_t seed) {
  FitConfig fc;
  fc.r = r;
  fc.seed = seed;
  fc.tol = cfg.get_double(method + "_tol", cfg.get_double("tol", 0.0));
  fc.max_iter = static_cast<int>(
      cfg.get_int(method + "_max_iter", cfg.get_int("max_iter", 0)));
  fc.lpp_k = static_cast<int>(cfg.get_int("lpp_k", 5));
  fc.lpp_subsample = static_cast<Index>(cfg.get_int("lpp_subsample", 2000));
  fc.ica_alpha = cfg.get_double("ica_alpha", 1.0);
  fc.cs_columns = static_cast<Index>(cfg.get_int("cs_columns", 0));
  fc.dbn_pretrain_epochs = static_cast<int>(cfg.get_int("dbn_pretrain_epochs", 10));
  fc.dbn_lr_pretrain = cfg.get_double("dbn_lr_pretrain", 0.05);
  fc.dbn_lr_finetune = cfg.get_double("dbn_lr_finetune", 0.01);
  fc.dbn_momentum = cfg.get_double("dbn_momentum", 0.9);
  fc.dbn_l1 = cfg.get_double("dbn_l1", 1e-4);
  fc.dbn_chain = static_cast<int>(cfg.get_int("dbn_chain", 2));
  fc.dbn_batch = static_cast<int>(cfg.get_int("dbn_batch", 64));
  return fc;
}

SceneSpec scene_spec_from(const ExperimentConfig& cfg) {
  SceneSpec spec;
  spec.lines = static_cast<Index>(cfg.get_int("lines", 64));
  spec.samples = static_cast<Index>(cfg.get_int("samples", 64));
  spec.bands = static_cast<Index>(cfg.get_int("bands", 116));
  spec.endmember_count = static_cast<Index>(cfg.get_int("endmembers", 4));
  spec.abundance_smoothness = cfg.get_double("smoothness", 6.0);
  spec.noise_sigma = cfg.get_double("noise_sigma", 0.0);
  spec.stripe_sigma = cfg.get_double("stripe_sigma", 0.0);
  spec.smile_amplitude = cfg.get_double("smile_amplitude", 0.0);
  spec.seed = cfg.get_seed();
  return spec;
}

void run_synth(const ExperimentConfig& cfg, EvalReport& report) {
  const SceneSpec spec = scene_spec_from(cfg);
  const Scene scene = generate_scene(spec);
  save_cube(scene.cube, cfg.get_string("cube_out"));
  if (cfg.has("labels_out")) save_labels(scene.labels, cfg.get_string("labels_out"));
  if (cfg.has("mask_out")) {
    const int target_class = static_cast<int>(cfg.get_int("target_class", 0));
    TargetMask mask;
    for (Index p = 0; p < scene.cube.pixel_count(); ++p)
      if (scene.labels.class_of[static_cast<std::size_t>(p)] == target_class)
        mask.indices.push_back(p);
    if (mask.indices.empty())
      std::fprintf(stderr, "synth: target class %d has no pixels\n", target_class);
    save_mask(mask, cfg.get_string("mask_out"));
  }
  Index saturated = 0;
  for (Index p = 0; p < scene.cube.pixel_count(); ++p)
    if ((scene.cube.values.row(p).array() >= kSceneSaturation).any()) ++saturated;
  report.add("scene", {}, "pixel_count", static_cast<double>(scene.cube.pixel_count()));
  report.add("scene", {}, "saturated_pixels", static_cast<double>(saturated));
}

void run_fit(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const std::string method_tag = cfg.get_string("method");
  const Method method = method_from_name(method_tag);
  const Index r = static_cast<Index>(cfg.get_int("r", 2));
  const FittedReducer model =
      fit(method, cube.values, make_fit_config(cfg, method_tag, r, cfg.get_seed()));
  save_reducer(model, cfg.get_string("model_out"));
  report.add(method_tag, {{"r", static_cast<double>(r)}}, "fit_seconds",
             model.fit_seconds);
}

void run_transform(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const FittedReducer model = load_reducer(cfg.get_string("model"));
  HsiCube encoded;
  encoded.lines = cube.lines;
  encoded.samples = cube.samples;
  encoded.bands = model.r;
  encoded.values = encode(model, cube.values);
  save_cube(encoded, cfg.get_string("cube_out"));
  report.add(method_name(model.method), {{"r", static_cast<double>(model.r)}},
             "pixels", static_cast<double>(cube.pixel_count()));
}

void run_reconstruct(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const std::vector<std::string> methods = cfg.get_string_list("methods");
  const std::vector<long long> r_list = cfg.get_int_list("r_list");
  const std::uint64_t seed = cfg.get_seed();
  const long long repeats = cfg.get_int("sample_repeats", 1);

  std::vector<long long> n_list;
  if (cfg.has("n_list")) n_list = cfg.get_int_list("n_list");
  else n_list.push_back(cube.pixel_count());

  for (const std::string& method_tag : methods) {
    const Method method = method_from_name(method_tag);
    for (long long r : r_list) {
      if (r > cube.bands)
        throw ConfigError("r_list entry exceeds band count: " + std::to_string(r));
      for (long long n : n_list) {
        if (n > cube.pixel_count())
          throw ConfigError("n_list entry exceeds pixel count: " + std::to_string(n));
        for (long long rep = 0; rep < repeats; ++rep) {
          // one sample per (n, repeat), shared by every method
          const Matrix fit_data =
              n < cube.pixel_count()
                  ? sample_rows(cube.values, static_cast<Index>(n),
                                detail::mix_seed(seed, 0xf17 + static_cast<std::uint64_t>(
                                                                   rep * 1000 + n)))
                  : cube.values;
          const FittedReducer model =
              fit(method, fit_data,
                  make_fit_config(cfg, method_tag, static_cast<Index>(r), seed));
          report.add(method_tag,
                     {{"r", static_cast<double>(r)},
                      {"n", static_cast<double>(n)},
                      {"repeat", static_cast<double>(rep)}},
                     "e_r", reconstruction_error(cube.values, model));
        }
      }
    }
  }
}

void run_eval_mi(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const std::vector<std::string> methods = cfg.get_string_list("methods");
  const std::uint64_t seed = cfg.get_seed();
  const Index r = std::min<Index>(
      {static_cast<Index>(cfg.get_int("r", 25)), Index{25}, cube.bands});
  const int k = static_cast<int>(cfg.get_int("mi_k", 3));
  const Index sample = std::min<Index>(
      static_cast<Index>(cfg.get_int("mi_sample", 43120)), cube.pixel_count());

  for (const std::string& method_tag : methods) {
    const Method method = method_from_name(method_tag);
    const FittedReducer model =
        fit(method, cube.values, make_fit_config(cfg, method_tag, r, seed));
    const Matrix encoded = encode(model, cube.values);
    const MiMatrix mi = mi_matrix(encoded, k, sample, seed);
    for (Index i = 0; i < r; ++i)
      for (Index j = i + 1; j < r; ++j)
        report.add(method_tag,
                   {{"r", static_cast<double>(r)},
                    {"i", static_cast<double>(i)},
                    {"j", static_cast<double>(j)}},
                   "mi_nats", mi.values(i, j));
  }
}

void run_eval_atpv(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const std::vector<std::string> methods = cfg.get_string_list("methods");
  const std::uint64_t seed = cfg.get_seed();
  const Index r = std::min<Index>(
      {static_cast<Index>(cfg.get_int("r", 25)), Index{25}, cube.bands});

  auto add_plane = [&](const std::string& tag, Index component, double r_param,
                       const Matrix& plane) {
    try {
      report.add(tag,
                 {{"r", r_param}, {"component", static_cast<double>(component)}},
                 "atpv", atpv(plane));
    } catch (const DegenerateData&) {
      std::fprintf(stderr, "eval-atpv: %s component %lld is constant, skipped\n",
                   tag.c_str(), static_cast<long long>(component));
    }
  };

  for (Index b = 0; b < cube.bands; ++b)
    add_plane("raw", b, static_cast<double>(cube.bands), cube.band_plane(b));

  for (const std::string& method_tag : methods) {
    const Method method = method_from_name(method_tag);
    const FittedReducer model =
        fit(method, cube.values, make_fit_config(cfg, method_tag, r, seed));
    const Matrix encoded = encode(model, cube.values);
    for (Index j = 0; j < r; ++j) {
      Matrix plane(cube.lines, cube.samples);
      for (Index l = 0; l < cube.lines; ++l)
        for (Index s = 0; s < cube.samples; ++s)
          plane(l, s) = encoded(cube.pixel_index(l, s), j);
      add_plane(method_tag, j, static_cast<double>(r), plane);
    }
  }
}

void add_detection_rows(EvalReport& report, const std::string& method_tag,
                        double r_param, const std::string& detector,
                        const DetectionResult& result) {
  const std::map<std::string, double> params = {{"r", r_param}};
  auto add = [&](const std::string& name, double value) {
    report.rows.push_back(
        ReportRow{method_tag, params, detector + "_" + name, value});
  };
  add("f1", result.f1);
  add("iou", result.iou);
  add("precision", result.precision);
  add("recall", result.recall);
  add("threshold", result.threshold);
}

void detect_on(EvalReport& report, const std::string& method_tag,
               const Matrix& components, const TargetMask& mask, double r_param) {
  const Matrix standardized = standardize(components);
  Vector target = Vector::Zero(components.cols());
  for (Index idx : mask.indices) target += standardized.row(idx).transpose();
  target /= static_cast<Scalar>(mask.indices.size());

  add_detection_rows(report, method_tag, r_param, "sam",
                     sweep_threshold(sam_map(standardized, target), mask));
  add_detection_rows(report, method_tag, r_param, "ace",
                     sweep_threshold(ace_map(standardized, target), mask));
}

void run_detect(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const TargetMask mask = load_mask(cfg.get_string("mask"));
  if (mask.indices.empty()) throw ConfigError("detect: mask file has no indices");
  const std::vector<std::string> methods = cfg.get_string_list("methods");
  const std::vector<long long> r_list = cfg.get_int_list("r_list");
  const std::uint64_t seed = cfg.get_seed();

  if (cfg.get_int("include_raw", 1) != 0)
    detect_on(report, "raw", cube.values, mask, static_cast<double>(cube.bands));

  for (const std::string& method_tag : methods) {
    const Method method = method_from_name(method_tag);
    for (long long r : r_list) {
      const FittedReducer model =
          fit(method, cube.values,
              make_fit_config(cfg, method_tag, static_cast<Index>(r), seed));
      detect_on(report, method_tag, encode(model, cube.values), mask,
                static_cast<double>(r));
    }
  }
}

void run_classify(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const LabelSet labels = load_labels(cfg.get_string("labels"));
  if (static_cast<Index>(labels.class_of.size()) != cube.pixel_count())
    throw ConfigError("classify: label count does not match the cube");
  const std::vector<std::string> methods = cfg.get_string_list("methods");
  const std::vector<long long> r_list = cfg.get_int_list("r_list");
  const std::uint64_t seed = cfg.get_seed();
  const Index train_pixels = static_cast<Index>(cfg.get_int("train_pixels", 10000));

  // Saturated pixels never enter training or evaluation.
  std::vector<Index> usable;
  const bool exclude = cfg.get_int("exclude_saturated", 1) != 0;
  for (Index p = 0; p < cube.pixel_count(); ++p) {
    if (exclude && (cube.values.row(p).array() >= kSceneSaturation).any()) continue;
    usable.push_back(p);
  }
  if (train_pixels >= static_cast<Index>(usable.size()))
    throw ConfigError("classify: train_pixels must leave evaluation pixels");

  const std::vector<Index> shuffle =
      sample_indices(static_cast<Index>(usable.size()),
                     static_cast<Index>(usable.size()), detail::mix_seed(seed, 0xc1a));

  int class_count = 0;
  for (int c : labels.class_of) class_count = std::max(class_count, c + 1);

  SvmConfig svm_cfg;
  svm_cfg.lambda = cfg.get_double("svm_lambda", 1e-4);
  svm_cfg.epochs = static_cast<int>(cfg.get_int("svm_epochs", 20));
  svm_cfg.seed = detail::mix_seed(seed, 0x57b);

  auto classify_on = [&](const std::string& tag, const Matrix& components,
                         double r_param) {
    const Matrix standardized = standardize(components);
    Matrix train(train_pixels, standardized.cols());
    std::vector<int> train_labels(static_cast<std::size_t>(train_pixels));
    for (Index i = 0; i < train_pixels; ++i) {
      const Index p = usable[static_cast<std::size_t>(shuffle[static_cast<std::size_t>(i)])];
      train.row(i) = standardized.row(p);
      train_labels[static_cast<std::size_t>(i)] = labels.class_of[static_cast<std::size_t>(p)];
    }
    const Index eval_count = static_cast<Index>(usable.size()) - train_pixels;
    Matrix eval(eval_count, standardized.cols());
    std::vector<int> eval_labels(static_cast<std::size_t>(eval_count));
    for (Index i = 0; i < eval_count; ++i) {
      const Index p = usable[static_cast<std::size_t>(
          shuffle[static_cast<std::size_t>(train_pixels + i)])];
      eval.row(i) = standardized.row(p);
      eval_labels[static_cast<std::size_t>(i)] = labels.class_of[static_cast<std::size_t>(p)];
    }
    const SvmModel model = svm_train_ovr(train, train_labels, class_count, svm_cfg);
    const AccuracyReport acc = accuracy_metrics(svm_predict(model, eval), eval_labels);
    report.add(tag, {{"r", r_param}, {"n_train", static_cast<double>(train_pixels)}},
               "oa", acc.overall);
    report.add(tag, {{"r", r_param}, {"n_train", static_cast<double>(train_pixels)}},
               "aa", acc.average);
  };

  if (cfg.get_int("include_raw", 1) != 0)
    classify_on("raw", cube.values, static_cast<double>(cube.bands));

  for (const std::string& method_tag : methods) {
    const Method method = method_from_name(method_tag);
    for (long long r : r_list) {
      const FittedReducer model =
          fit(method, cube.values,
              make_fit_config(cfg, method_tag, static_cast<Index>(r), seed));
      classify_on(method_tag, encode(model, cube.values), static_cast<double>(r));
    }
  }
}

void run_bench(const ExperimentConfig& cfg, EvalReport& report) {
  const HsiCube cube = load_cube(cfg.get_string("input"));
  const std::vector<std::string> methods = cfg.get_string_list("methods");
  const std::vector<long long> n_list = cfg.get_int_list("n_list");
  const Index r = static_cast<Index>(cfg.get_int("r", 12));
  const int repeats = static_cast<int>(cfg.get_int("repeats", 3));
  const std::uint64_t seed = cfg.get_seed();

  // strictly serial: one sample per n, reused by every method
  for (long long n : n_list) {
    if (n > cube.pixel_count())
      throw ConfigError("n_list entry exceeds pixel count: " + std::to_string(n));
    const Matrix sample =
        n < cube.pixel_count()
            ? sample_rows(cube.values, static_cast<Index>(n),
                          detail::mix_seed(seed, 0xbe7c + static_cast<std::uint64_t>(n)))
            : cube.values;
    for (const std::string& method_tag : methods) {
      const Method method = method_from_name(method_tag);
      const TimingRecord record =
          time_fit(method, sample, make_fit_config(cfg, method_tag, r, seed), repeats);
      for (std::size_t run = 0; run < record.run_durations.size(); ++run)
        report.add(method_tag,
                   {{"n", static_cast<double>(n)},
                    {"r", static_cast<double>(r)},
                    {"run", static_cast<double>(run)}},
                   "run_seconds", record.run_durations[run]);
      report.add(method_tag,
                 {{"n", static_cast<double>(n)}, {"r", static_cast<double>(r)}},
                 "median_seconds", record.median_seconds);
    }
  }
}

}  // namespace

EvalReport run(const ExperimentConfig& config) {
  EvalReport report;
  report.command = config.command();
  for (const auto& entry : config.entries()) report.config.push_back(entry);

  {
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &utc);
    report.created_at = stamp;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string& cmd = config.command();
  if (cmd == "synth") run_synth(config, report);
  else if (cmd == "fit") run_fit(config, report);
  else if (cmd == "transform") run_transform(config, report);
  else if (cmd == "reconstruct") run_reconstruct(config, report);
  else if (cmd == "eval-mi") run_eval_mi(config, report);
  else if (cmd == "eval-atpv") run_eval_atpv(config, report);
  else if (cmd == "detect") run_detect(config, report);
  else if (cmd == "classify") run_classify(config, report);
  else if (cmd == "bench") run_bench(config, report);
  else throw ConfigError("unknown command '" + cmd + "'");
  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace hsdr
