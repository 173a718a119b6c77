#pragma once

// Pluggable classifiers: the trivial baselines, the band-power MLP, and a
// registry through which externally implemented models are resolved.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eegain/error.hpp"
#include "eegain/models/bandpower.hpp"
#include "eegain/models/mlp.hpp"
#include "eegain/rng.hpp"
#include "eegain/transform.hpp"

namespace eegain {

enum class ClassifierKind { majority_baseline, distribution_baseline, bandpower_mlp, external };

inline std::string_view to_string(ClassifierKind k) {
  switch (k) {
    case ClassifierKind::majority_baseline: return "majority_baseline";
    case ClassifierKind::distribution_baseline: return "distribution_baseline";
    case ClassifierKind::bandpower_mlp: return "bandpower_mlp";
    case ClassifierKind::external: return "external";
  }
  return "?";
}

inline ClassifierKind classifier_kind_from_string(std::string_view s) {
  for (auto k : {ClassifierKind::majority_baseline, ClassifierKind::distribution_baseline,
                 ClassifierKind::bandpower_mlp, ClassifierKind::external}) {
    if (to_string(k) == s) return k;
  }
  fail(ErrorKind::data, "unknown model kind '" + std::string(s) + "'");
}

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::bandpower_mlp;
  std::vector<int> hidden_sizes = {64, 64};
  std::vector<Band> bands = default_bands();
  std::string external_id;  // resolved through ModelRegistry

  bool operator==(const ClassifierSpec&) const = default;
};

struct TrainingSpec {
  int epochs = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double label_smoothing = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;  // set per fold by the runner

  bool operator==(const TrainingSpec&) const = default;
};

inline void check_training_spec(const TrainingSpec& t) {
  require(t.epochs >= 1, "training: epochs must be >= 1", ErrorKind::data);
  require(t.batch_size >= 1, "training: batch_size must be >= 1", ErrorKind::data);
  require(t.learning_rate > 0.0, "training: learning_rate must be positive", ErrorKind::data);
  require(t.label_smoothing >= 0.0 && t.label_smoothing < 1.0,
          "training: label_smoothing must lie in [0, 1)", ErrorKind::data);
  require(t.beta1 > 0.0 && t.beta1 < 1.0 && t.beta2 > 0.0 && t.beta2 < 1.0 && t.epsilon > 0.0,
          "training: invalid Adam parameters", ErrorKind::data);
}

using WindowRef = std::reference_wrapper<const WindowSegment>;
using WindowView = std::span<const WindowRef>;

inline std::vector<WindowRef> window_refs(std::span<const WindowSegment> windows) {
  return {windows.begin(), windows.end()};
}

inline std::vector<WindowRef> gather(std::span<const WindowSegment> windows,
                                     std::span<const std::size_t> indices) {
  std::vector<WindowRef> out;
  out.reserve(indices.size());
  for (auto i : indices) out.emplace_back(windows[i]);
  return out;
}

struct PredictionBatch {
  std::vector<int> predicted;
  std::vector<std::vector<double>> probabilities;  // per window, per class
};

struct TrainingHistory {
  std::vector<double> train_loss;    // per epoch (empty for baselines)
  std::vector<double> val_accuracy;  // per epoch
};

/// First index of the maximum; lowest index wins exact ties.
inline int argmax(std::span<const double> v) {
  return static_cast<int>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  virtual PredictionBatch predict(WindowView windows) const = 0;

  /// Writes fitted parameters as little-endian float32, layer by layer.
  /// Models without numeric parameters write their class probabilities.
  virtual void export_parameters(const std::filesystem::path& file) const = 0;

  const ClassifierSpec& spec() const { return spec_; }
  std::size_t n_classes() const { return n_classes_; }
  const TrainingHistory& history() const { return history_; }
  int selected_epoch() const { return selected_epoch_; }

 protected:
  TrainedModel(ClassifierSpec spec, std::size_t n_classes)
      : spec_(std::move(spec)), n_classes_(n_classes) {}

  ClassifierSpec spec_;
  std::size_t n_classes_;
  TrainingHistory history_;
  int selected_epoch_ = 0;
};

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::unique_ptr<TrainedModel> fit(WindowView train, WindowView val,
                                            std::size_t n_classes,
                                            const TrainingSpec& training) const = 0;
};

namespace detail {

inline void write_f32(const std::filesystem::path& file, std::span<const double> values) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, file.string() + ": cannot open for writing");
  for (double v : values) {
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    if constexpr (std::endian::native == std::endian::big) {
      bits = ((bits & 0xffu) << 24) | ((bits & 0xff00u) << 8) | ((bits >> 8) & 0xff00u) |
             (bits >> 24);
    }
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) fail(ErrorKind::io, file.string() + ": write failed");
}

inline std::vector<std::int64_t> label_counts(WindowView a, WindowView b, std::size_t n_classes) {
  std::vector<std::int64_t> counts(n_classes, 0);
  for (auto view : {a, b}) {
    for (const WindowSegment& w : view) {
      require(w.label.index >= 0 && static_cast<std::size_t>(w.label.index) < n_classes,
              "window label out of range");
      ++counts[static_cast<std::size_t>(w.label.index)];
    }
  }
  return counts;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Trivial baselines (fit on train + validation labels)

class MajorityModel final : public TrainedModel {
 public:
  MajorityModel(ClassifierSpec spec, std::size_t n_classes, int modal_class)
      : TrainedModel(std::move(spec), n_classes), modal_(modal_class) {}

  int modal_class() const { return modal_; }

  PredictionBatch predict(WindowView windows) const override {
    PredictionBatch out;
    std::vector<double> p(n_classes_, 0.0);
    p[static_cast<std::size_t>(modal_)] = 1.0;
    out.predicted.assign(windows.size(), modal_);
    out.probabilities.assign(windows.size(), p);
    return out;
  }

  void export_parameters(const std::filesystem::path& file) const override {
    std::vector<double> p(n_classes_, 0.0);
    p[static_cast<std::size_t>(modal_)] = 1.0;
    detail::write_f32(file, p);
  }

 private:
  int modal_;
};

class DistributionModel final : public TrainedModel {
 public:
  DistributionModel(ClassifierSpec spec, std::vector<double> probabilities, std::uint64_t seed)
      : TrainedModel(std::move(spec), probabilities.size()),
        probabilities_(std::move(probabilities)),
        seed_(seed) {}

  const std::vector<double>& class_probabilities() const { return probabilities_; }

  /// Seeded categorical draws, restarted from the stored seed on every call.
  PredictionBatch predict(WindowView windows) const override {
    PredictionBatch out;
    Rng rng(derive_seed(seed_, 0xd157));
    out.predicted.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
      out.predicted.push_back(static_cast<int>(rng.categorical(probabilities_)));
    }
    out.probabilities.assign(windows.size(), probabilities_);
    return out;
  }

  void export_parameters(const std::filesystem::path& file) const override {
    detail::write_f32(file, probabilities_);
  }

 private:
  std::vector<double> probabilities_;
  std::uint64_t seed_;
};

class MajorityBaseline final : public Classifier {
 public:
  explicit MajorityBaseline(ClassifierSpec spec) : spec_(std::move(spec)) {}

  std::unique_ptr<TrainedModel> fit(WindowView train, WindowView val, std::size_t n_classes,
                                    const TrainingSpec&) const override {
    require(!train.empty(), "fit: empty training set");
    const auto counts = detail::label_counts(train, val, n_classes);
    const auto modal = std::distance(counts.begin(), std::max_element(counts.begin(), counts.end()));
    return std::make_unique<MajorityModel>(spec_, n_classes, static_cast<int>(modal));
  }

 private:
  ClassifierSpec spec_;
};

class DistributionBaseline final : public Classifier {
 public:
  explicit DistributionBaseline(ClassifierSpec spec) : spec_(std::move(spec)) {}

  std::unique_ptr<TrainedModel> fit(WindowView train, WindowView val, std::size_t n_classes,
                                    const TrainingSpec& training) const override {
    require(!train.empty(), "fit: empty training set");
    const auto counts = detail::label_counts(train, val, n_classes);
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    std::vector<double> p;
    for (auto c : counts) p.push_back(static_cast<double>(c) / static_cast<double>(total));
    return std::make_unique<DistributionModel>(spec_, std::move(p), training.seed);
  }

 private:
  ClassifierSpec spec_;
};

// ---------------------------------------------------------------------------
// Band-power MLP

struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static FeatureScaler fit(const std::vector<std::vector<double>>& rows) {
    FeatureScaler s;
    const std::size_t d = rows.front().size();
    s.mean.assign(d, 0.0);
    s.scale.assign(d, 1.0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < d; ++i) s.mean[i] += r[i];
    for (double& m : s.mean) m /= static_cast<double>(rows.size());
    std::vector<double> ss(d, 0.0);
    for (const auto& r : rows)
      for (std::size_t i = 0; i < d; ++i) ss[i] += (r[i] - s.mean[i]) * (r[i] - s.mean[i]);
    for (std::size_t i = 0; i < d; ++i) {
      const double sd = std::sqrt(ss[i] / static_cast<double>(rows.size()));
      s.scale[i] = sd > 0.0 ? sd : 1.0;
    }
    return s;
  }

  void apply(std::vector<double>& row) const {
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = (row[i] - mean[i]) / scale[i];
  }
};

class BandpowerMlpModel final : public TrainedModel {
 public:
  BandpowerMlpModel(ClassifierSpec spec, std::size_t n_classes, Mlp net, FeatureScaler scaler,
                    TrainingHistory history, int selected_epoch)
      : TrainedModel(std::move(spec), n_classes), net_(std::move(net)), scaler_(std::move(scaler)) {
    history_ = std::move(history);
    selected_epoch_ = selected_epoch;
  }

  const Mlp& network() const { return net_; }
  std::size_t feature_dimension() const { return net_.layout().input; }

  std::vector<double> features(const WindowSegment& w) const {
    auto f = bandpower_features(w.signal, spec_.bands);
    require(f.size() == feature_dimension(),
            "predict: feature dimension " + std::to_string(f.size()) + " does not match the model (" +
                std::to_string(feature_dimension()) + ")");
    scaler_.apply(f);
    return f;
  }

  PredictionBatch predict(WindowView windows) const override {
    PredictionBatch out;
    out.predicted.reserve(windows.size());
    out.probabilities.reserve(windows.size());
    for (const WindowSegment& w : windows) {
      auto p = net_.probabilities(features(w));
      out.predicted.push_back(argmax(p));
      out.probabilities.push_back(std::move(p));
    }
    return out;
  }

  void export_parameters(const std::filesystem::path& file) const override {
    detail::write_f32(file, net_.params());
  }

 private:
  Mlp net_;
  FeatureScaler scaler_;
};

class BandpowerMlp final : public Classifier {
 public:
  explicit BandpowerMlp(ClassifierSpec spec) : spec_(std::move(spec)) {
    check_bands(spec_.bands);
    for (int h : spec_.hidden_sizes) require(h >= 1, "hidden sizes must be >= 1", ErrorKind::data);
  }

  /// Mini-batch Adam on smoothed cross-entropy. Validation accuracy is
  /// measured after every epoch and the parameters of the best epoch (first
  /// on ties) are restored.
  std::unique_ptr<TrainedModel> fit(WindowView train, WindowView val, std::size_t n_classes,
                                    const TrainingSpec& training) const override {
    check_training_spec(training);
    require(!train.empty(), "fit: empty training set");
    require(!val.empty(), "fit: empty validation set");

    auto extract = [&](WindowView view, std::vector<std::vector<double>>& rows,
                       std::vector<int>& labels) {
      for (const WindowSegment& w : view) {
        rows.push_back(bandpower_features(w.signal, spec_.bands));
        labels.push_back(w.label.index);
      }
    };
    std::vector<std::vector<double>> train_rows, val_rows;
    std::vector<int> train_labels, val_labels;
    extract(train, train_rows, train_labels);
    extract(val, val_rows, val_labels);
    const std::size_t dim = train_rows.front().size();
    for (const auto* rows : {&train_rows, &val_rows}) {
      for (const auto& r : *rows) {
        require(r.size() == dim, "fit: feature dimension mismatch between windows", ErrorKind::data);
      }
    }
    for (int l : train_labels) {
      require(l >= 0 && static_cast<std::size_t>(l) < n_classes, "fit: label out of range");
    }

    const auto scaler = FeatureScaler::fit(train_rows);
    for (auto& r : train_rows) scaler.apply(r);
    for (auto& r : val_rows) scaler.apply(r);

    MlpLayout layout{dim, {}, n_classes};
    for (int h : spec_.hidden_sizes) layout.hidden.push_back(static_cast<std::size_t>(h));
    Mlp net(layout, derive_seed(training.seed, 1));
    Adam adam(net.n_params(), {training.learning_rate, training.beta1, training.beta2,
                               training.epsilon});
    Rng shuffle_rng(derive_seed(training.seed, 2));

    std::vector<std::size_t> order(train_rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<double> grad(net.n_params());
    std::vector<double> batch_x;
    std::vector<int> batch_y;
    const auto batch_size = static_cast<std::size_t>(training.batch_size);

    TrainingHistory history;
    std::vector<double> best_params(net.params().begin(), net.params().end());
    double best_accuracy = -1.0;
    int best_epoch = 0;

    for (int epoch = 0; epoch < training.epochs; ++epoch) {
      shuffle_rng.shuffle(std::span<std::size_t>(order));
      double loss_sum = 0.0;
      for (std::size_t start = 0; start < order.size(); start += batch_size) {
        const std::size_t end = std::min(order.size(), start + batch_size);
        batch_x.clear();
        batch_y.clear();
        for (std::size_t i = start; i < end; ++i) {
          const auto& row = train_rows[order[i]];
          batch_x.insert(batch_x.end(), row.begin(), row.end());
          batch_y.push_back(train_labels[order[i]]);
        }
        const double loss = net.loss_and_gradient(batch_x, batch_y, training.label_smoothing, grad);
        loss_sum += loss * static_cast<double>(end - start);
        adam.step(net.params(), grad);
      }
      history.train_loss.push_back(loss_sum / static_cast<double>(order.size()));

      std::size_t correct = 0;
      for (std::size_t i = 0; i < val_rows.size(); ++i) {
        if (argmax(net.logits(val_rows[i])) == val_labels[i]) ++correct;
      }
      const double acc = static_cast<double>(correct) / static_cast<double>(val_rows.size());
      history.val_accuracy.push_back(acc);
      if (acc > best_accuracy) {
        best_accuracy = acc;
        best_epoch = epoch;
        std::copy(net.params().begin(), net.params().end(), best_params.begin());
      }
    }
    std::copy(best_params.begin(), best_params.end(), net.params().begin());
    return std::make_unique<BandpowerMlpModel>(spec_, n_classes, std::move(net), scaler,
                                               std::move(history), best_epoch);
  }

 private:
  ClassifierSpec spec_;
};

// ---------------------------------------------------------------------------
// Registry

using ClassifierFactory = std::function<std::unique_ptr<Classifier>(const ClassifierSpec&)>;

/// Maps `external_id` strings to factories for models implemented outside
/// this library (convolutional networks and the like).
class ModelRegistry {
 public:
  void add(std::string id, ClassifierFactory factory) {
    factories_[std::move(id)] = std::move(factory);
  }

  bool contains(const std::string& id) const { return factories_.count(id) > 0; }

  std::unique_ptr<Classifier> make(const ClassifierSpec& spec) const {
    switch (spec.kind) {
      case ClassifierKind::majority_baseline: return std::make_unique<MajorityBaseline>(spec);
      case ClassifierKind::distribution_baseline:
        return std::make_unique<DistributionBaseline>(spec);
      case ClassifierKind::bandpower_mlp: return std::make_unique<BandpowerMlp>(spec);
      case ClassifierKind::external: {
        const auto it = factories_.find(spec.external_id);
        require(it != factories_.end(),
                "no external model registered as '" + spec.external_id + "'", ErrorKind::data);
        return it->second(spec);
      }
    }
    fail(ErrorKind::data, "unhandled model kind");
  }

  static ModelRegistry& global() {
    static ModelRegistry registry;
    return registry;
  }

 private:
  std::map<std::string, ClassifierFactory> factories_;
};

inline std::unique_ptr<TrainedModel> fit(const ClassifierSpec& spec, WindowView train,
                                         WindowView val, std::size_t n_classes,
                                         const TrainingSpec& training,
                                         const ModelRegistry& registry = ModelRegistry::global()) {
  return registry.make(spec)->fit(train, val, n_classes, training);
}

// ---------------------------------------------------------------------------
// JSON mapping

inline void to_json(nlohmann::json& j, const Band& b) {
  j = nlohmann::json{{"name", b.name}, {"lo_hz", b.lo_hz}, {"hi_hz", b.hi_hz}};
}

inline void from_json(const nlohmann::json& j, Band& b) {
  b.name = j.at("name").get<std::string>();
  b.lo_hz = j.at("lo_hz").get<double>();
  b.hi_hz = j.at("hi_hz").get<double>();
}

inline void to_json(nlohmann::json& j, const ClassifierSpec& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)},
                     {"hidden_sizes", s.hidden_sizes},
                     {"bands", s.bands}};
  if (s.kind == ClassifierKind::external) j["external_id"] = s.external_id;
}

inline void from_json(const nlohmann::json& j, ClassifierSpec& s) {
  const ClassifierSpec d;
  s.kind = classifier_kind_from_string(j.value("kind", std::string(to_string(d.kind))));
  s.hidden_sizes = j.value("hidden_sizes", d.hidden_sizes);
  s.bands = j.contains("bands") ? j.at("bands").get<std::vector<Band>>() : d.bands;
  s.external_id = j.value("external_id", std::string{});
}

inline void to_json(nlohmann::json& j, const TrainingSpec& t) {
  j = nlohmann::json{{"epochs", t.epochs},
                     {"batch_size", t.batch_size},
                     {"learning_rate", t.learning_rate},
                     {"label_smoothing", t.label_smoothing},
                     {"optimizer", "adam"},
                     {"beta1", t.beta1},
                     {"beta2", t.beta2},
                     {"epsilon", t.epsilon}};
}

inline void from_json(const nlohmann::json& j, TrainingSpec& t) {
  const TrainingSpec d;
  t.epochs = j.value("epochs", d.epochs);
  t.batch_size = j.value("batch_size", d.batch_size);
  t.learning_rate = j.value("learning_rate", d.learning_rate);
  t.label_smoothing = j.value("label_smoothing", d.label_smoothing);
  const auto optimizer = j.value("optimizer", std::string("adam"));
  require(optimizer == "adam", "training.optimizer: only 'adam' is supported", ErrorKind::data);
  t.beta1 = j.value("beta1", d.beta1);
  t.beta2 = j.value("beta2", d.beta2);
  t.epsilon = j.value("epsilon", d.epsilon);
}

}  // namespace eegain
