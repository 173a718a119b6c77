#pragma once

// End-to-end execution of one run configuration: load, label, transform,
// split, fit, evaluate, and write artifacts.

#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eegain/dataset.hpp"
#include "eegain/error.hpp"
#include "eegain/labeling.hpp"
#include "eegain/metrics.hpp"
#include "eegain/models/classifier.hpp"
#include "eegain/rng.hpp"
#include "eegain/runner/config.hpp"
#include "eegain/splitting.hpp"
#include "eegain/transform.hpp"

namespace eegain {

inline constexpr int kSummarySchemaVersion = 1;
inline constexpr const char* kWorkersEnv = "EEGAIN_WORKERS";
inline constexpr const char* kPredictionsFile = "predictions.csv";
inline constexpr const char* kSummaryFile = "summary.json";

struct RunArtifacts {
  std::string run_id;
  RunConfig config;  // resolved
  std::filesystem::path output_dir;
  std::filesystem::path summary_path;
  std::optional<std::filesystem::path> predictions_path;
  std::vector<std::filesystem::path> history_paths;  // one per fold
  std::vector<std::filesystem::path> model_paths;    // one per fold
  std::vector<MetricReport> fold_reports;
  AggregateReport aggregate;
};

/// FNV-1a 64-bit over the resolved config and the code version.
inline std::string compute_run_id(const RunConfig& config) {
  const std::string text = nlohmann::json(config).dump() + "\n" + std::string(kCodeVersion);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Worker count from EEGAIN_WORKERS, else the hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv(kWorkersEnv); env && *env) {
    int n = 0;
    const auto* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, n);
    require(ec == std::errc{} && ptr == end && n >= 1,
            std::string(kWorkersEnv) + " must be a positive integer");
    return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. If any call throws,
/// the exception of the lowest index is rethrown after all threads finish.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Rethrows any exception with "<context>: " prepended, keeping its kind.
template <typename Fn>
auto with_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    fail(e.kind(), context + ": " + e.what());
  } catch (const std::exception& e) {
    fail(ErrorKind::io, context + ": " + e.what());
  }
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, file.string() + ": cannot open for writing");
  out << text;
  if (!out) fail(ErrorKind::io, file.string() + ": write failed");
}

struct PreparedData {
  DatasetManifest manifest;
  std::vector<WindowSegment> windows;  // manifest order, then window order
};

struct FoldOutcome {
  int fold_index = 0;
  std::vector<std::size_t> test;  // indices into PreparedData::windows
  std::size_t n_train_windows = 0;
  std::size_t n_val_windows = 0;
  std::vector<std::string> warnings;
  std::unique_ptr<TrainedModel> model;
  PredictionBatch predictions;
  MetricReport report;
  double fit_seconds = 0.0;
  double predict_seconds = 0.0;
};

/// Fills in categorical class names from the manifest and checks that the
/// scheme matches the manifest's label schema.
inline GroundTruthScheme resolve_scheme(GroundTruthScheme scheme, const DatasetManifest& m) {
  if (scheme.kind == SchemeKind::categorical) {
    require(m.label_schema != LabelSchema::dimensional,
            "categorical ground truth needs a manifest with categorical labels", ErrorKind::data);
    if (scheme.class_names.empty() && m.categorical_classes) {
      scheme.class_names = *m.categorical_classes;
    }
  } else {
    require(m.label_schema != LabelSchema::categorical,
            "dimensional ground truth needs a manifest with dimensional ratings", ErrorKind::data);
  }
  check_scheme(scheme);
  return scheme;
}

inline DatasetManifest load_dataset(const RunConfig& config) {
  if (config.dataset.manifest) return load_manifest(config.resolve(*config.dataset.manifest));
  return generate_synthetic(*config.dataset.synthetic, config.output_path() / "data");
}

inline std::vector<WindowSegment> transform_all(const DatasetManifest& m, const RunConfig& config,
                                                std::size_t workers) {
  struct Job {
    TrialKey key;
    ClassLabel label;
  };
  std::vector<Job> jobs;
  for_each_trial(m, [&](const SubjectRecord& s, const SessionRecord& se, const TrialRecord& t) {
    const TrialKey key{s.subject_id, se.session_id, t.trial_id};
    jobs.push_back({key, with_context("trial " + key.str(), [&] {
                      return label_trial(t.label, config.ground_truth);
                    })});
  });
  std::vector<std::vector<WindowSegment>> per_trial(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const auto& job = jobs[i];
    with_context("trial " + job.key.str(), [&] {
      const auto signal =
          read_trial_signal(m, job.key.subject_id, job.key.session_id, job.key.trial_id);
      per_trial[i] = apply_pipeline(signal, job.key, job.label, config.transform);
    });
  });
  std::vector<WindowSegment> windows;
  for (auto& w : per_trial) {
    std::move(w.begin(), w.end(), std::back_inserter(windows));
  }
  return windows;
}

inline FoldOutcome run_fold(const FoldPlan& fold, const PreparedData& data,
                            const RunConfig& config, const ModelRegistry& registry) {
  const std::size_t n_classes = config.ground_truth.n_classes();
  const std::uint64_t fold_seed = derive_seed(config.seed, static_cast<std::uint64_t>(fold.fold_index));
  FoldOutcome out;
  out.fold_index = fold.fold_index;
  const std::string where = "fold " + std::to_string(fold.fold_index) + ", stage ";

  const auto routed = with_context(where + "split", [&] {
    auto r = materialize_fold(fold, data.windows, true);
    require(!r.train.empty(), "no training windows", ErrorKind::data);
    require(!r.test.empty(), "no test windows", ErrorKind::data);
    return r;
  });
  out.test = routed.test;

  std::vector<WindowRef> train, val;
  with_context(where + "train_val_split", [&] {
    std::map<std::string, int> unit_labels;
    for (auto i : routed.train) {
      unit_labels.emplace(data.windows[i].parent.str(), data.windows[i].label.index);
    }
    std::vector<LabeledUnit> units;
    for (const auto& [u, l] : unit_labels) units.push_back({u, l});
    const auto split = train_val_split(units, config.train_ratio, derive_seed(fold_seed, 1), n_classes);
    out.warnings = split.warnings;
    for (auto i : routed.train) {
      const auto u = data.windows[i].parent.str();
      (split.val_units.count(u) ? val : train).emplace_back(data.windows[i]);
    }
    out.n_train_windows = train.size();
    out.n_val_windows = val.size();
  });

  const auto t_fit = std::chrono::steady_clock::now();
  out.model = with_context(where + "fit", [&] {
    TrainingSpec training = config.training;
    training.seed = derive_seed(fold_seed, 2);
    return fit(config.model, train, val, n_classes, training, registry);
  });
  out.fit_seconds = seconds_since(t_fit);

  const auto t_predict = std::chrono::steady_clock::now();
  const auto test = gather(data.windows, routed.test);
  out.predictions = with_context(where + "predict", [&] {
    auto p = out.model->predict(test);
    require(p.predicted.size() == test.size() && p.probabilities.size() == test.size(),
            "model returned the wrong number of predictions", ErrorKind::data);
    return p;
  });
  out.predict_seconds = seconds_since(t_predict);

  out.report = with_context(where + "evaluate", [&] {
    std::vector<int> truth;
    for (const WindowSegment& w : test) truth.push_back(w.label.index);
    return evaluate(truth, out.predictions.predicted, n_classes);
  });
  return out;
}

inline std::string predictions_csv(const std::string& run_id, const PreparedData& data,
                                   const std::vector<FoldOutcome>& folds,
                                   const std::vector<std::string>& class_names) {
  std::string csv =
      "run_id,fold_index,subject_id,session_id,trial_id,window_index,selected_epoch,"
      "true_label,predicted_label";
  for (const auto& name : class_names) csv += "," + csv_field("prob_" + name);
  csv += "\n";
  for (const auto& fold : folds) {
    const std::string prefix = run_id + "," + std::to_string(fold.fold_index) + ",";
    const std::string epoch = std::to_string(fold.model->selected_epoch());
    for (std::size_t r = 0; r < fold.test.size(); ++r) {
      const WindowSegment& w = data.windows[fold.test[r]];
      csv += prefix + csv_field(w.parent.subject_id) + "," + csv_field(w.parent.session_id) + "," +
             csv_field(w.parent.trial_id) + "," + std::to_string(w.window_index) + "," + epoch +
             "," + std::to_string(w.label.index) + "," +
             std::to_string(fold.predictions.predicted[r]);
      for (double p : fold.predictions.probabilities[r]) csv += "," + format_double(p);
      csv += "\n";
    }
  }
  return csv;
}

inline std::string history_csv(const TrainingHistory& h) {
  std::string csv = "epoch,train_loss,val_accuracy\n";
  const std::size_t n = std::max(h.train_loss.size(), h.val_accuracy.size());
  for (std::size_t e = 0; e < n; ++e) {
    csv += std::to_string(e) + ",";
    if (e < h.train_loss.size()) csv += format_double(h.train_loss[e]);
    csv += ",";
    if (e < h.val_accuracy.size()) csv += format_double(h.val_accuracy[e]);
    csv += "\n";
  }
  return csv;
}

}  // namespace detail

/// Executes a run. Folds run in parallel (EEGAIN_WORKERS); every artifact is
/// written once all folds succeed. On failure, files written by this call are
/// removed and the error names the fold and stage.
inline RunArtifacts execute_run(const RunConfig& input,
                                const ModelRegistry& registry = ModelRegistry::global()) {
  using Clock = std::chrono::steady_clock;
  const auto t_start = Clock::now();
  const std::size_t workers = worker_count();

  RunArtifacts art;
  art.config = input;
  RunConfig& config = art.config;
  art.output_dir = config.output_path();

  const auto t_load = Clock::now();
  detail::PreparedData data;
  data.manifest = detail::with_context("stage dataset", [&] { return detail::load_dataset(config); });
  config.ground_truth = detail::with_context("stage ground_truth", [&] {
    return detail::resolve_scheme(config.ground_truth, data.manifest);
  });
  const double load_seconds = detail::seconds_since(t_load);
  art.run_id = compute_run_id(config);

  const auto folds =
      detail::with_context("stage split", [&] { return plan_folds(data.manifest, config.split); });

  const auto t_transform = Clock::now();
  data.windows = detail::with_context(
      "stage transform", [&] { return detail::transform_all(data.manifest, config, workers); });
  const double transform_seconds = detail::seconds_since(t_transform);

  std::vector<detail::FoldOutcome> outcomes(folds.size());
  detail::parallel_for(folds.size(), workers, [&](std::size_t i) {
    outcomes[i] = detail::run_fold(folds[i], data, config, registry);
  });
  for (const auto& o : outcomes) art.fold_reports.push_back(o.report);
  art.aggregate = aggregate(art.fold_reports);

  std::vector<std::filesystem::path> written;
  try {
    std::filesystem::create_directories(art.output_dir);
    auto write = [&](const std::filesystem::path& file, const std::string& text) {
      written.push_back(file);
      detail::write_text(file, text);
    };
    if (config.log_predictions) {
      art.predictions_path = art.output_dir / kPredictionsFile;
      write(*art.predictions_path,
            detail::predictions_csv(art.run_id, data, outcomes, config.ground_truth.class_names));
    }
    nlohmann::json fold_json = nlohmann::json::array();
    nlohmann::json fold_timings = nlohmann::json::array();
    for (const auto& o : outcomes) {
      const auto history = art.output_dir / ("history_fold_" + std::to_string(o.fold_index) + ".csv");
      write(history, detail::history_csv(o.model->history()));
      art.history_paths.push_back(history);
      const auto params = art.output_dir / ("model_fold_" + std::to_string(o.fold_index) + ".f32");
      written.push_back(params);
      o.model->export_parameters(params);
      art.model_paths.push_back(params);
      fold_json.push_back({{"fold_index", o.fold_index},
                           {"selected_epoch", o.model->selected_epoch()},
                           {"n_train_windows", o.n_train_windows},
                           {"n_val_windows", o.n_val_windows},
                           {"n_test_windows", o.test.size()},
                           {"warnings", o.warnings},
                           {"metrics", o.report}});
      fold_timings.push_back(
          {{"fold_index", o.fold_index}, {"fit_s", o.fit_seconds}, {"predict_s", o.predict_seconds}});
    }
    nlohmann::json summary{
        {"schema_version", kSummarySchemaVersion},
        {"run_id", art.run_id},
        {"code_version", kCodeVersion},
        {"config", config},
        {"conventions",
         {{"label_boundary", kBoundaryConvention},
          {"std_estimator", "sample (n - 1); 0 for a single fold"},
          {"metric_level", "window"},
          {"fold_seed", "derive_seed(seed, fold_index) = splitmix64 mixing chain"},
          {"model_selection", "best validation accuracy, earliest epoch on ties"}}},
        {"dataset",
         {{"name", data.manifest.dataset_name},
          {"n_subjects", data.manifest.subjects.size()},
          {"n_trials", data.manifest.n_trials()},
          {"n_windows", data.windows.size()}}},
        {"fold_plan", folds},
        {"folds", fold_json},
        {"aggregate", art.aggregate},
        {"timings",
         {{"load_s", load_seconds},
          {"transform_s", transform_seconds},
          {"folds", fold_timings},
          {"total_s", detail::seconds_since(t_start)}}}};
    art.summary_path = art.output_dir / kSummaryFile;
    write(art.summary_path, summary.dump(2) + "\n");
  } catch (const std::exception& e) {
    for (const auto& f : written) {
      std::error_code ec;
      std::filesystem::remove(f, ec);
    }
    const auto* err = dynamic_cast<const Error*>(&e);
    fail(err ? err->kind() : ErrorKind::io, std::string("stage write: ") + e.what());
  }
  return art;
}

inline RunArtifacts execute_run(const std::filesystem::path& config_path) {
  return execute_run(load_run_config(config_path));
}

}  // namespace eegain
