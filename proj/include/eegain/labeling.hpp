#pragma once

// Ground-truth definition: turning self-assessment ratings or categorical
// tags into class indices under an explicit scheme.
//
// Boundary convention everywhere: rating <= threshold is "low" (class 0),
// rating > threshold is "high" (class 1).

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eegain/error.hpp"

namespace eegain {

inline constexpr std::string_view kBoundaryConvention =
    "rating <= threshold -> low (0); rating > threshold -> high (1)";

/// Self-assessment attached to one trial.
struct LabelRecord {
  std::map<std::string, double> dimensional;  // e.g. "valence" -> 6.2
  std::optional<std::string> categorical;
  double scale_min = 1.0;
  double scale_max = 9.0;

  bool operator==(const LabelRecord&) const = default;
};

enum class SchemeKind { dimensional_binary, dimensional_quadrant, categorical };

struct GroundTruthScheme {
  SchemeKind kind = SchemeKind::dimensional_binary;
  std::string dimension = "valence";   // binary only
  double threshold = 4.5;              // binary only
  double valence_threshold = 4.5;      // quadrant only
  double arousal_threshold = 4.5;      // quadrant only
  std::vector<std::string> class_names = {"low", "high"};

  std::size_t n_classes() const { return class_names.size(); }

  bool operator==(const GroundTruthScheme&) const = default;
};

struct ClassLabel {
  int index = 0;
  std::string name;

  bool operator==(const ClassLabel&) const = default;
};

struct ClassDistribution {
  std::vector<std::int64_t> counts;
  std::vector<double> proportions;
};

inline std::string_view to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::dimensional_binary: return "dimensional_binary";
    case SchemeKind::dimensional_quadrant: return "dimensional_quadrant";
    case SchemeKind::categorical: return "categorical";
  }
  return "?";
}

inline SchemeKind scheme_kind_from_string(std::string_view s) {
  if (s == "dimensional_binary") return SchemeKind::dimensional_binary;
  if (s == "dimensional_quadrant") return SchemeKind::dimensional_quadrant;
  if (s == "categorical") return SchemeKind::categorical;
  fail(ErrorKind::data, "unknown ground-truth kind '" + std::string(s) + "'");
}

inline const std::vector<std::string>& binary_class_names() {
  static const std::vector<std::string> names = {"low", "high"};
  return names;
}

inline const std::vector<std::string>& quadrant_class_names() {
  static const std::vector<std::string> names = {"LALV", "LAHV", "HALV", "HAHV"};
  return names;
}

struct RatingScale {
  double min = 1.0;
  double max = 9.0;

  bool contains(double r) const { return r >= min && r <= max; }
};

inline void check_rating(double rating, RatingScale scale) {
  require(scale.contains(rating),
          "rating " + std::to_string(rating) + " outside scale [" +
              std::to_string(scale.min) + ", " + std::to_string(scale.max) + "]",
          ErrorKind::data);
}

inline ClassLabel binarize(double rating, double threshold,
                           RatingScale scale = {}) {
  check_rating(rating, scale);
  const int index = rating > threshold ? 1 : 0;
  return {index, binary_class_names()[index]};
}

/// Four-class valence/arousal quadrant: index = 2*(arousal high) + (valence high).
inline ClassLabel quadrantize(double valence, double arousal,
                              double valence_threshold,
                              double arousal_threshold, RatingScale scale = {}) {
  check_rating(valence, scale);
  check_rating(arousal, scale);
  const int index = 2 * (arousal > arousal_threshold ? 1 : 0) +
                    (valence > valence_threshold ? 1 : 0);
  return {index, quadrant_class_names()[index]};
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

inline ClassLabel map_categorical(std::string_view raw,
                                  const GroundTruthScheme& scheme) {
  const std::string key = to_lower(raw);
  for (std::size_t i = 0; i < scheme.class_names.size(); ++i) {
    if (to_lower(scheme.class_names[i]) == key) {
      return {static_cast<int>(i), scheme.class_names[i]};
    }
  }
  fail(ErrorKind::data, "unknown class '" + std::string(raw) + "'");
}

/// Structural checks that do not need a dataset.
inline void check_scheme(const GroundTruthScheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::dimensional_binary:
      require(scheme.class_names.size() == 2,
              "binary ground truth needs exactly 2 class names", ErrorKind::data);
      require(!scheme.dimension.empty(), "binary ground truth needs a dimension",
              ErrorKind::data);
      break;
    case SchemeKind::dimensional_quadrant:
      require(scheme.class_names.size() == 4,
              "quadrant ground truth needs exactly 4 class names", ErrorKind::data);
      break;
    case SchemeKind::categorical:
      require(!scheme.class_names.empty(),
              "categorical ground truth needs class names", ErrorKind::data);
      break;
  }
}

/// Thresholds must lie within the dataset's rating scale.
inline void check_scheme(const GroundTruthScheme& scheme, RatingScale scale) {
  check_scheme(scheme);
  if (scheme.kind == SchemeKind::dimensional_binary) {
    require(scale.contains(scheme.threshold),
            "ground-truth threshold outside the rating scale", ErrorKind::data);
  } else if (scheme.kind == SchemeKind::dimensional_quadrant) {
    require(scale.contains(scheme.valence_threshold) &&
                scale.contains(scheme.arousal_threshold),
            "quadrant thresholds outside the rating scale", ErrorKind::data);
  }
}

inline double dimension_rating(const LabelRecord& label, const std::string& dim) {
  const auto it = label.dimensional.find(dim);
  require(it != label.dimensional.end(),
          "label has no '" + dim + "' rating", ErrorKind::data);
  return it->second;
}

/// Applies a scheme to one trial's label record.
inline ClassLabel label_trial(const LabelRecord& label,
                              const GroundTruthScheme& scheme) {
  const RatingScale scale{label.scale_min, label.scale_max};
  switch (scheme.kind) {
    case SchemeKind::dimensional_binary: {
      ClassLabel l = binarize(dimension_rating(label, scheme.dimension),
                              scheme.threshold, scale);
      l.name = scheme.class_names[l.index];
      return l;
    }
    case SchemeKind::dimensional_quadrant: {
      ClassLabel l = quadrantize(dimension_rating(label, "valence"),
                                 dimension_rating(label, "arousal"),
                                 scheme.valence_threshold,
                                 scheme.arousal_threshold, scale);
      l.name = scheme.class_names[l.index];
      return l;
    }
    case SchemeKind::categorical:
      require(label.categorical.has_value(),
              "label has no categorical tag", ErrorKind::data);
      return map_categorical(*label.categorical, scheme);
  }
  fail(ErrorKind::data, "unhandled ground-truth kind");
}

inline ClassDistribution class_distribution(std::span<const int> labels,
                                            std::size_t n_classes) {
  require(!labels.empty(), "class distribution of an empty label list");
  require(n_classes > 0, "class distribution needs at least one class");
  ClassDistribution d;
  d.counts.assign(n_classes, 0);
  for (int l : labels) {
    require(l >= 0 && static_cast<std::size_t>(l) < n_classes,
            "label index out of range");
    ++d.counts[static_cast<std::size_t>(l)];
  }
  const auto total = static_cast<double>(labels.size());
  d.proportions.reserve(n_classes);
  for (auto c : d.counts) d.proportions.push_back(static_cast<double>(c) / total);
  return d;
}

inline ClassDistribution class_distribution(std::span<const ClassLabel> labels,
                                            std::size_t n_classes) {
  std::vector<int> indices;
  indices.reserve(labels.size());
  for (const auto& l : labels) indices.push_back(l.index);
  return class_distribution(std::span<const int>(indices), n_classes);
}

/// Published per-dataset defaults: 4.5 on 1-9 scales, 3.0 on DREAMER's 1-5
/// scale, fixed categorical class orders for SEED and SEED-IV.
inline GroundTruthScheme default_scheme(std::string_view dataset) {
  GroundTruthScheme s;
  const std::string name = to_lower(dataset);
  if (name == "deap" || name == "amigos" || name == "mahnob_hci" ||
      name == "mahnob-hci") {
    s.threshold = 4.5;
  } else if (name == "dreamer") {
    s.threshold = 3.0;
  } else if (name == "seed") {
    s.kind = SchemeKind::categorical;
    s.class_names = {"negative", "neutral", "positive"};
  } else if (name == "seed_iv" || name == "seed-iv") {
    s.kind = SchemeKind::categorical;
    s.class_names = {"neutral", "sadness", "fear", "happiness"};
  } else {
    fail(ErrorKind::invalid_argument, "no default ground truth for '" +
                                          std::string(dataset) + "'");
  }
  return s;
}

inline void to_json(nlohmann::json& j, const GroundTruthScheme& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}, {"class_names", s.class_names}};
  if (s.kind == SchemeKind::dimensional_binary) {
    j["dimension"] = s.dimension;
    j["threshold"] = s.threshold;
  } else if (s.kind == SchemeKind::dimensional_quadrant) {
    j["valence_threshold"] = s.valence_threshold;
    j["arousal_threshold"] = s.arousal_threshold;
  }
}

/// Missing class names default per kind; categorical names default to empty
/// and are filled from the manifest by the runner.
inline void from_json(const nlohmann::json& j, GroundTruthScheme& s) {
  const GroundTruthScheme d;
  s.kind = scheme_kind_from_string(j.value("kind", std::string(to_string(d.kind))));
  s.dimension = j.value("dimension", d.dimension);
  s.threshold = j.value("threshold", d.threshold);
  s.valence_threshold = j.value("valence_threshold", d.valence_threshold);
  s.arousal_threshold = j.value("arousal_threshold", d.arousal_threshold);
  if (j.contains("class_names")) {
    s.class_names = j.at("class_names").get<std::vector<std::string>>();
  } else if (s.kind == SchemeKind::dimensional_binary) {
    s.class_names = binary_class_names();
  } else if (s.kind == SchemeKind::dimensional_quadrant) {
    s.class_names = quadrant_class_names();
  } else {
    s.class_names.clear();
  }
}

}  // namespace eegain
