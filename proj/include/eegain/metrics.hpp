#pragma once

// Confusion-matrix metrics and cross-fold aggregation.
//
// Zero-denominator conventions: precision, recall and F1 of a class are 0
// when undefined; MCC and kappa are 0 when undefined. Aggregation uses the
// sample standard deviation (n - 1), 0 for a single fold.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eegain/error.hpp"

namespace eegain {

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(std::size_t n_classes)
      : n_(n_classes), counts_(n_classes * n_classes, 0) {}

  std::size_t n_classes() const { return n_; }

  /// Number of samples of true class `truth` predicted as `pred`.
  std::int64_t at(std::size_t truth, std::size_t pred) const { return counts_[truth * n_ + pred]; }
  std::int64_t& at(std::size_t truth, std::size_t pred) { return counts_[truth * n_ + pred]; }

  std::int64_t row_sum(std::size_t truth) const {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < n_; ++j) s += at(truth, j);
    return s;
  }

  std::int64_t col_sum(std::size_t pred) const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n_; ++i) s += at(i, pred);
    return s;
  }

  std::int64_t trace() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n_; ++i) s += at(i, i);
    return s;
  }

  std::int64_t total() const {
    std::int64_t s = 0;
    for (auto c : counts_) s += c;
    return s;
  }

  std::vector<std::vector<std::int64_t>> rows() const {
    std::vector<std::vector<std::int64_t>> r(n_, std::vector<std::int64_t>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r[i][j] = at(i, j);
    return r;
  }

  static ConfusionMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows) {
    ConfusionMatrix cm(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      require(rows[i].size() == rows.size(), "confusion matrix must be square");
      for (std::size_t j = 0; j < rows.size(); ++j) {
        require(rows[i][j] >= 0, "confusion matrix counts must be >= 0");
        cm.at(i, j) = rows[i][j];
      }
    }
    return cm;
  }

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> counts_;
};

inline ConfusionMatrix confusion_matrix(std::span<const int> y_true, std::span<const int> y_pred,
                                        std::size_t n_classes) {
  require(y_true.size() == y_pred.size(), "confusion matrix: label vectors differ in length");
  require(!y_true.empty(), "confusion matrix: no samples");
  require(n_classes >= 1, "confusion matrix: need at least one class");
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int t = y_true[i], p = y_pred[i];
    require(t >= 0 && static_cast<std::size_t>(t) < n_classes && p >= 0 &&
                static_cast<std::size_t>(p) < n_classes,
            "confusion matrix: label out of range");
    ++cm.at(static_cast<std::size_t>(t), static_cast<std::size_t>(p));
  }
  return cm;
}

inline double accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  require(total > 0, "accuracy of an empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

struct ClassScores {
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::int64_t> support;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
};

inline ClassScores precision_recall_f1(const ConfusionMatrix& cm) {
  const std::size_t n = cm.n_classes();
  const auto total = cm.total();
  require(total > 0, "precision/recall of an empty confusion matrix");
  ClassScores s;
  s.precision.resize(n);
  s.recall.resize(n);
  s.f1.resize(n);
  s.support.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto tp = static_cast<double>(cm.at(c, c));
    const auto predicted = cm.col_sum(c);
    const auto actual = cm.row_sum(c);
    const double p = predicted > 0 ? tp / static_cast<double>(predicted) : 0.0;
    const double r = actual > 0 ? tp / static_cast<double>(actual) : 0.0;
    s.precision[c] = p;
    s.recall[c] = r;
    s.f1[c] = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    s.support[c] = actual;
    s.macro_precision += p;
    s.macro_recall += r;
    s.macro_f1 += s.f1[c];
    s.weighted_f1 += static_cast<double>(actual) / static_cast<double>(total) * s.f1[c];
  }
  s.macro_precision /= static_cast<double>(n);
  s.macro_recall /= static_cast<double>(n);
  s.macro_f1 /= static_cast<double>(n);
  return s;
}

/// Multiclass Matthews correlation coefficient.
inline double mcc(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  require(total > 0, "MCC of an empty confusion matrix");
  const double s = static_cast<double>(total);
  const double c = static_cast<double>(cm.trace());
  double pt = 0.0, pp = 0.0, tt = 0.0;
  for (std::size_t k = 0; k < cm.n_classes(); ++k) {
    const double p = static_cast<double>(cm.col_sum(k));
    const double t = static_cast<double>(cm.row_sum(k));
    pt += p * t;
    pp += p * p;
    tt += t * t;
  }
  const double denom = (s * s - pp) * (s * s - tt);
  if (denom <= 0.0) return 0.0;
  return (c * s - pt) / std::sqrt(denom);
}

/// Cohen's kappa.
inline double kappa(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  require(total > 0, "kappa of an empty confusion matrix");
  const double s = static_cast<double>(total);
  const double po = static_cast<double>(cm.trace()) / s;
  double pe = 0.0;
  for (std::size_t k = 0; k < cm.n_classes(); ++k) {
    pe += (static_cast<double>(cm.row_sum(k)) / s) * (static_cast<double>(cm.col_sum(k)) / s);
  }
  if (pe >= 1.0) return 0.0;
  return (po - pe) / (1.0 - pe);
}

struct MetricReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  std::vector<std::int64_t> support;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  double mcc = 0.0;
  double kappa = 0.0;
  std::optional<double> positive_f1;  // binary tasks: F1 of class 1

  /// Scalar metrics by name, in a fixed order, for aggregation and output.
  std::vector<std::pair<std::string, double>> scalars() const {
    std::vector<std::pair<std::string, double>> v = {
        {"accuracy", accuracy},   {"macro_f1", macro_f1},
        {"weighted_f1", weighted_f1}, {"macro_precision", macro_precision},
        {"macro_recall", macro_recall}, {"mcc", mcc},
        {"kappa", kappa}};
    if (positive_f1) v.emplace_back("positive_f1", *positive_f1);
    return v;
  }
};

inline MetricReport evaluate(const ConfusionMatrix& cm) {
  MetricReport r;
  r.confusion = cm;
  r.accuracy = accuracy(cm);
  auto s = precision_recall_f1(cm);
  r.precision = std::move(s.precision);
  r.recall = std::move(s.recall);
  r.f1 = std::move(s.f1);
  r.support = std::move(s.support);
  r.macro_precision = s.macro_precision;
  r.macro_recall = s.macro_recall;
  r.macro_f1 = s.macro_f1;
  r.weighted_f1 = s.weighted_f1;
  r.mcc = mcc(cm);
  r.kappa = kappa(cm);
  if (cm.n_classes() == 2) r.positive_f1 = r.f1[1];
  return r;
}

inline MetricReport evaluate(std::span<const int> y_true, std::span<const int> y_pred,
                             std::size_t n_classes) {
  return evaluate(confusion_matrix(y_true, y_pred, n_classes));
}

/// Flat name -> value view of a report, for callers that want a mapping.
inline std::map<std::string, double> metric_map(const MetricReport& r) {
  std::map<std::string, double> m;
  for (const auto& [name, value] : r.scalars()) m[name] = value;
  return m;
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct AggregateReport {
  std::vector<std::pair<std::string, MeanStd>> metrics;  // in MetricReport::scalars() order
  std::vector<MetricReport> folds;

  const MeanStd& at(const std::string& name) const {
    for (const auto& [n, v] : metrics)
      if (n == name) return v;
    fail(ErrorKind::invalid_argument, "no aggregated metric '" + name + "'");
  }
};

inline MeanStd mean_std(std::span<const double> values) {
  require(!values.empty(), "mean/std of no values");
  MeanStd r;
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

inline AggregateReport aggregate(std::span<const MetricReport> reports) {
  require(!reports.empty(), "aggregate: no fold reports");
  AggregateReport agg;
  agg.folds.assign(reports.begin(), reports.end());
  const auto names = reports.front().scalars();
  for (std::size_t m = 0; m < names.size(); ++m) {
    std::vector<double> values;
    for (const auto& r : reports) {
      const auto s = r.scalars();
      require(s.size() == names.size(), "aggregate: fold reports have different metric sets");
      values.push_back(s[m].second);
    }
    agg.metrics.emplace_back(names[m].first, mean_std(values));
  }
  return agg;
}

// ---------------------------------------------------------------------------
// JSON mapping

inline void to_json(nlohmann::json& j, const MetricReport& r) {
  j = nlohmann::json{{"confusion_matrix", r.confusion.rows()},
                     {"precision", r.precision},
                     {"recall", r.recall},
                     {"f1", r.f1},
                     {"support", r.support}};
  for (const auto& [name, value] : r.scalars()) j[name] = value;
}

inline void from_json(const nlohmann::json& j, MetricReport& r) {
  r.confusion = ConfusionMatrix::from_rows(
      j.at("confusion_matrix").get<std::vector<std::vector<std::int64_t>>>());
  r.precision = j.at("precision").get<std::vector<double>>();
  r.recall = j.at("recall").get<std::vector<double>>();
  r.f1 = j.at("f1").get<std::vector<double>>();
  r.support = j.at("support").get<std::vector<std::int64_t>>();
  r.accuracy = j.at("accuracy").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  r.weighted_f1 = j.at("weighted_f1").get<double>();
  r.macro_precision = j.at("macro_precision").get<double>();
  r.macro_recall = j.at("macro_recall").get<double>();
  r.mcc = j.at("mcc").get<double>();
  r.kappa = j.at("kappa").get<double>();
  if (j.contains("positive_f1")) r.positive_f1 = j.at("positive_f1").get<double>();
}

inline void to_json(nlohmann::json& j, const AggregateReport& a) {
  j = nlohmann::json::object();
  for (const auto& [name, v] : a.metrics) j[name] = {{"mean", v.mean}, {"std", v.std}};
}

}  // namespace eegain
