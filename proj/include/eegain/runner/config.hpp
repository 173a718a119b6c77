#pragma once

// Run configuration: one TOML (or JSON) document with sections [dataset],
// [transform], [ground_truth], [split], [model], [training] and [logging].

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>

#include <json.hpp>
#include <toml.hpp>

#include "eegain/dataset.hpp"
#include "eegain/error.hpp"
#include "eegain/labeling.hpp"
#include "eegain/models/classifier.hpp"
#include "eegain/splitting.hpp"
#include "eegain/transform.hpp"

namespace eegain {

inline constexpr std::string_view kCodeVersion = "eegain-0.1.0";

struct DatasetSource {
  std::optional<std::string> manifest;        // path, relative to the config file
  std::optional<SyntheticSpec> synthetic;     // generated under <output_dir>/data

  bool operator==(const DatasetSource&) const = default;
};

struct RunConfig {
  DatasetSource dataset;
  std::optional<std::string> transform_preset;
  TransformSpec transform;
  GroundTruthScheme ground_truth;
  SplitScheme split;
  double train_ratio = kDefaultTrainRatio;
  ClassifierSpec model;
  TrainingSpec training;
  std::uint64_t seed = 0;
  std::string output_dir = "eegain-out";
  bool log_predictions = true;

  // Directory relative paths are resolved against; not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::string& p) const {
    const std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  }
  std::filesystem::path output_path() const { return resolve(output_dir); }

  /// Equality of the serialized content (base_dir excluded).
  bool operator==(const RunConfig& o) const {
    return dataset == o.dataset && transform_preset == o.transform_preset &&
           transform == o.transform && ground_truth == o.ground_truth && split == o.split &&
           train_ratio == o.train_ratio && model == o.model && training == o.training &&
           seed == o.seed && output_dir == o.output_dir && log_predictions == o.log_predictions;
  }
};

/// Transform used when a config names neither preset nor steps.
inline TransformSpec default_transform() { return TransformSpec{{WindowSpec{4.0, 0.0}}}; }

namespace detail {

inline void check_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                       const std::string& where) {
  require(obj.is_object(), "config: '" + where + "' must be a table", ErrorKind::data);
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || a == key;
    require(known, "config: unknown key '" + (where.empty() ? key : where + "." + key) + "'",
            ErrorKind::data);
  }
}

template <typename T>
T parse_section(const nlohmann::json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, "config: [" + where + "]: " + e.what());
  }
}

inline nlohmann::json toml_to_json(const toml::node& node, const std::string& where) {
  if (const auto* t = node.as_table()) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : *t) {
      const std::string key(k.str());
      j[key] = toml_to_json(v, where.empty() ? key : where + "." + key);
    }
    return j;
  }
  if (const auto* a = node.as_array()) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& v : *a) j.push_back(toml_to_json(v, where));
    return j;
  }
  if (const auto* v = node.as_string()) return v->get();
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  fail(ErrorKind::data, "config: unsupported value type at '" + where + "'");
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const RunConfig& c) {
  nlohmann::json dataset = nlohmann::json::object();
  if (c.dataset.manifest) dataset["manifest"] = *c.dataset.manifest;
  if (c.dataset.synthetic) dataset["synthetic"] = *c.dataset.synthetic;
  nlohmann::json transform{{"steps", c.transform}};
  if (c.transform_preset) transform["preset"] = *c.transform_preset;
  nlohmann::json split = c.split;
  split["train_ratio"] = c.train_ratio;
  j = nlohmann::json{{"seed", c.seed},
                     {"dataset", dataset},
                     {"transform", transform},
                     {"ground_truth", c.ground_truth},
                     {"split", split},
                     {"model", c.model},
                     {"training", c.training},
                     {"logging",
                      {{"output_dir", c.output_dir}, {"log_predictions", c.log_predictions}}}};
}

/// Strict: unknown keys anywhere are rejected with the key's dotted path.
inline void from_json(const nlohmann::json& j, RunConfig& c) {
  using detail::check_keys;
  using detail::parse_section;
  c = RunConfig{};
  check_keys(j, {"seed", "dataset", "transform", "ground_truth", "split", "model", "training",
                 "logging"},
             "");
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    require(s.is_number_integer(), "config: 'seed' must be an integer", ErrorKind::data);
    c.seed = s.is_number_unsigned() ? s.get<std::uint64_t>()
                                    : static_cast<std::uint64_t>(s.get<std::int64_t>());
  }

  require(j.contains("dataset"), "config: missing [dataset] section", ErrorKind::data);
  const auto& ds = j.at("dataset");
  check_keys(ds, {"manifest", "synthetic"}, "dataset");
  require(ds.contains("manifest") != ds.contains("synthetic"),
          "config: [dataset] needs exactly one of 'manifest' or 'synthetic'", ErrorKind::data);
  if (ds.contains("manifest")) {
    c.dataset.manifest = parse_section<std::string>(ds.at("manifest"), "dataset.manifest");
  } else {
    check_keys(ds.at("synthetic"),
               {"dataset_name", "n_subjects", "n_sessions_per_subject", "n_trials_per_session",
                "n_channels", "n_peripheral_channels", "trial_length_s", "sampling_rate_hz",
                "label_schema", "class_effect", "class_names", "noise_sd", "seed"},
               "dataset.synthetic");
    c.dataset.synthetic = parse_section<SyntheticSpec>(ds.at("synthetic"), "dataset.synthetic");
  }

  const auto tr = j.value("transform", nlohmann::json::object());
  check_keys(tr, {"preset", "steps"}, "transform");
  if (tr.contains("preset")) {
    c.transform_preset = parse_section<std::string>(tr.at("preset"), "transform.preset");
    c.transform = preset(*c.transform_preset);
  }
  if (tr.contains("steps")) {
    for (const auto& step : tr.at("steps")) {
      check_keys(step, {"type", "pre_s", "post_s", "names", "f0_hz", "q", "lo_hz", "hi_hz",
                        "order", "fs_out_hz", "method", "size_s", "overlap_s"},
                 "transform.steps");
    }
    auto steps = parse_section<TransformSpec>(tr.at("steps"), "transform.steps");
    require(!c.transform_preset || steps == c.transform,
            "config: [transform] steps disagree with preset '" + c.transform_preset.value_or("") +
                "'",
            ErrorKind::data);
    c.transform = std::move(steps);
  }
  if (!tr.contains("preset") && !tr.contains("steps")) c.transform = default_transform();
  check_transform_spec(c.transform);

  const auto gt = j.value("ground_truth", nlohmann::json::object());
  check_keys(gt, {"kind", "dimension", "threshold", "valence_threshold", "arousal_threshold",
                  "class_names"},
             "ground_truth");
  c.ground_truth = parse_section<GroundTruthScheme>(gt, "ground_truth");

  auto split = j.value("split", nlohmann::json{{"kind", "loso"}});
  check_keys(split, {"kind", "k", "train_ids", "test_ids", "train_ratio"}, "split");
  if (!split.contains("kind")) split["kind"] = "loso";
  c.split = parse_section<SplitScheme>(split, "split");
  c.train_ratio = split.value("train_ratio", kDefaultTrainRatio);
  require(c.train_ratio > 0.0 && c.train_ratio < 1.0,
          "config: split.train_ratio must lie in (0, 1)", ErrorKind::data);

  const auto model = j.value("model", nlohmann::json::object());
  check_keys(model, {"kind", "hidden_sizes", "bands", "external_id"}, "model");
  c.model = parse_section<ClassifierSpec>(model, "model");

  const auto training = j.value("training", nlohmann::json::object());
  check_keys(training, {"epochs", "batch_size", "learning_rate", "label_smoothing", "optimizer",
                        "beta1", "beta2", "epsilon"},
             "training");
  c.training = parse_section<TrainingSpec>(training, "training");
  check_training_spec(c.training);

  const auto logging = j.value("logging", nlohmann::json::object());
  check_keys(logging, {"output_dir", "log_predictions"}, "logging");
  c.output_dir = logging.value("output_dir", c.output_dir);
  c.log_predictions = logging.value("log_predictions", c.log_predictions);
}

inline RunConfig parse_run_config_json(const nlohmann::json& j) {
  try {
    return j.get<RunConfig>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::data, std::string("config: ") + e.what());
  }
}

inline RunConfig parse_run_config_toml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "line " << e.source().begin.line << ": " << e.description();
    fail(ErrorKind::data, msg.str());
  }
  return parse_run_config_json(detail::toml_to_json(table, ""));
}

/// Reads a `.json` or TOML config; relative paths resolve against its folder.
inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, path.string() + ": cannot open config");
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig c;
  try {
    if (path.extension() == ".json") {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(buf.str());
      } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::data, std::string("invalid JSON: ") + e.what());
      }
      c = parse_run_config_json(j);
    } else {
      c = parse_run_config_toml(buf.str());
    }
  } catch (const Error& e) {
    fail(e.kind(), path.string() + ": " + e.what());
  }
  c.base_dir = path.parent_path();
  return c;
}

}  // namespace eegain
