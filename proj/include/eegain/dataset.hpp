#pragma once

// Canonical on-disk dataset layout:
//
//   <root>/manifest.json                              (schema_version 1)
//   <root>/<subject_id>/<session_id>/<trial_id>.f32raw
//
// Signal files hold little-endian IEEE-754 float32 samples, channel-major:
// all samples of channel 0, then channel 1, and so on. The byte length is
// therefore n_channels * n_samples * 4 and can be checked without decoding.
// Labels live in the manifest only.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eegain/error.hpp"
#include "eegain/labeling.hpp"
#include "eegain/rng.hpp"
#include "eegain/signal.hpp"

namespace eegain {

namespace fs = std::filesystem;
using json = nlohmann::json;

inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kManifestFileName = "manifest.json";
inline constexpr const char* kSignalExtension = ".f32raw";

enum class ChannelKind { eeg, peripheral };

struct ChannelSpec {
  std::string name;
  ChannelKind kind = ChannelKind::eeg;

  bool operator==(const ChannelSpec&) const = default;
};

struct TrialRecord {
  std::string trial_id;
  std::string signal_path;  // relative to the manifest root
  std::int64_t n_samples = 0;
  LabelRecord label;

  bool operator==(const TrialRecord&) const = default;
};

struct SessionRecord {
  std::string session_id;
  std::vector<TrialRecord> trials;

  bool operator==(const SessionRecord&) const = default;
};

struct SubjectRecord {
  std::string subject_id;
  std::vector<SessionRecord> sessions;

  bool operator==(const SubjectRecord&) const = default;
};

enum class LabelSchema { dimensional, categorical, both };

struct DatasetManifest {
  int schema_version = kManifestSchemaVersion;
  std::string dataset_name;
  double sampling_rate_hz = 0.0;
  std::vector<ChannelSpec> channels;
  LabelSchema label_schema = LabelSchema::dimensional;
  std::optional<std::vector<std::string>> categorical_classes;
  std::vector<SubjectRecord> subjects;

  // Directory the manifest was loaded from; not serialized.
  fs::path root;

  std::vector<std::string> channel_names() const {
    std::vector<std::string> names;
    names.reserve(channels.size());
    for (const auto& c : channels) names.push_back(c.name);
    return names;
  }

  std::size_t n_trials() const {
    std::size_t n = 0;
    for (const auto& s : subjects)
      for (const auto& se : s.sessions) n += se.trials.size();
    return n;
  }

  /// Equality of the serialized content (root excluded).
  bool operator==(const DatasetManifest& o) const {
    return schema_version == o.schema_version && dataset_name == o.dataset_name &&
           sampling_rate_hz == o.sampling_rate_hz && channels == o.channels &&
           label_schema == o.label_schema &&
           categorical_classes == o.categorical_classes && subjects == o.subjects;
  }
};

/// Visits every trial in manifest order.
template <typename Fn>
void for_each_trial(const DatasetManifest& m, Fn&& fn) {
  for (const auto& subject : m.subjects)
    for (const auto& session : subject.sessions)
      for (const auto& trial : session.trials) fn(subject, session, trial);
}

// ---------------------------------------------------------------------------
// JSON mapping

inline std::string_view to_string(ChannelKind k) {
  return k == ChannelKind::eeg ? "eeg" : "peripheral";
}

inline std::string_view to_string(LabelSchema s) {
  switch (s) {
    case LabelSchema::dimensional: return "dimensional";
    case LabelSchema::categorical: return "categorical";
    case LabelSchema::both: return "both";
  }
  return "?";
}

inline LabelSchema label_schema_from_string(std::string_view s) {
  if (s == "dimensional") return LabelSchema::dimensional;
  if (s == "categorical") return LabelSchema::categorical;
  if (s == "both") return LabelSchema::both;
  fail(ErrorKind::data, "unknown label_schema '" + std::string(s) + "'");
}

inline void to_json(json& j, const ChannelSpec& c) {
  j = json{{"name", c.name}, {"kind", to_string(c.kind)}};
}

inline void from_json(const json& j, ChannelSpec& c) {
  c.name = j.at("name").get<std::string>();
  const auto kind = j.value("kind", std::string("eeg"));
  if (kind == "eeg") {
    c.kind = ChannelKind::eeg;
  } else if (kind == "peripheral") {
    c.kind = ChannelKind::peripheral;
  } else {
    fail(ErrorKind::data, "unknown channel kind '" + kind + "'");
  }
}

inline void to_json(json& j, const LabelRecord& l) {
  j = json{{"scale_min", l.scale_min}, {"scale_max", l.scale_max}};
  if (!l.dimensional.empty()) j["dimensional"] = l.dimensional;
  if (l.categorical) j["categorical"] = *l.categorical;
}

inline void from_json(const json& j, LabelRecord& l) {
  l.scale_min = j.at("scale_min").get<double>();
  l.scale_max = j.at("scale_max").get<double>();
  l.dimensional = j.value("dimensional", std::map<std::string, double>{});
  if (j.contains("categorical")) {
    l.categorical = j.at("categorical").get<std::string>();
  } else {
    l.categorical.reset();
  }
}

inline void to_json(json& j, const TrialRecord& t) {
  j = json{{"trial_id", t.trial_id},
           {"signal_path", t.signal_path},
           {"n_samples", t.n_samples},
           {"label", t.label}};
}

inline void from_json(const json& j, TrialRecord& t) {
  t.trial_id = j.at("trial_id").get<std::string>();
  t.signal_path = j.at("signal_path").get<std::string>();
  t.n_samples = j.at("n_samples").get<std::int64_t>();
  t.label = j.at("label").get<LabelRecord>();
}

inline void to_json(json& j, const SessionRecord& s) {
  j = json{{"session_id", s.session_id}, {"trials", s.trials}};
}

inline void from_json(const json& j, SessionRecord& s) {
  s.session_id = j.at("session_id").get<std::string>();
  s.trials = j.at("trials").get<std::vector<TrialRecord>>();
}

inline void to_json(json& j, const SubjectRecord& s) {
  j = json{{"subject_id", s.subject_id}, {"sessions", s.sessions}};
}

inline void from_json(const json& j, SubjectRecord& s) {
  s.subject_id = j.at("subject_id").get<std::string>();
  s.sessions = j.at("sessions").get<std::vector<SessionRecord>>();
}

inline void to_json(json& j, const DatasetManifest& m) {
  j = json{{"schema_version", m.schema_version},
           {"dataset_name", m.dataset_name},
           {"sampling_rate_hz", m.sampling_rate_hz},
           {"channels", m.channels},
           {"label_schema", to_string(m.label_schema)},
           {"subjects", m.subjects}};
  if (m.categorical_classes) j["categorical_classes"] = *m.categorical_classes;
}

inline void from_json(const json& j, DatasetManifest& m) {
  m.schema_version = j.at("schema_version").get<int>();
  m.dataset_name = j.at("dataset_name").get<std::string>();
  m.sampling_rate_hz = j.at("sampling_rate_hz").get<double>();
  m.channels = j.at("channels").get<std::vector<ChannelSpec>>();
  m.label_schema = label_schema_from_string(j.at("label_schema").get<std::string>());
  if (j.contains("categorical_classes")) {
    m.categorical_classes = j.at("categorical_classes").get<std::vector<std::string>>();
  } else {
    m.categorical_classes.reset();
  }
  m.subjects = j.at("subjects").get<std::vector<SubjectRecord>>();
}

// ---------------------------------------------------------------------------
// Invariants

namespace detail {

inline bool path_stays_under_root(const std::string& relative) {
  const fs::path p(relative);
  if (relative.empty() || p.is_absolute() || p.has_root_name()) return false;
  int depth = 0;
  for (const auto& part : p.lexically_normal()) {
    if (part == "..") {
      if (--depth < 0) return false;
    } else if (part != ".") {
      ++depth;
    }
  }
  return depth > 0;
}

}  // namespace detail

/// Throws ErrorKind::data naming the first violated manifest invariant.
inline void check_manifest(const DatasetManifest& m) {
  auto bad = [](const std::string& what) { fail(ErrorKind::data, what); };
  if (m.schema_version != kManifestSchemaVersion)
    bad("unsupported schema_version " + std::to_string(m.schema_version));
  if (!(m.sampling_rate_hz > 0.0) || !std::isfinite(m.sampling_rate_hz))
    bad("sampling_rate_hz must be positive");
  if (m.channels.empty()) bad("manifest declares no channels");
  std::set<std::string> names;
  for (const auto& c : m.channels) {
    if (c.name.empty()) bad("empty channel name");
    if (!names.insert(c.name).second) bad("duplicate channel name '" + c.name + "'");
  }
  if (m.label_schema != LabelSchema::dimensional &&
      (!m.categorical_classes || m.categorical_classes->empty()))
    bad("categorical label schema requires categorical_classes");
  if (m.subjects.empty()) bad("manifest declares no subjects");

  std::set<std::string> subject_ids;
  for (const auto& subject : m.subjects) {
    if (subject.subject_id.empty()) bad("empty subject_id");
    if (!subject_ids.insert(subject.subject_id).second)
      bad("duplicate subject_id '" + subject.subject_id + "'");
    if (subject.sessions.empty())
      bad("subject '" + subject.subject_id + "' has no sessions");
    std::set<std::string> session_ids;
    for (const auto& session : subject.sessions) {
      const std::string where = subject.subject_id + "/" + session.session_id;
      if (session.session_id.empty()) bad("empty session_id in " + subject.subject_id);
      if (!session_ids.insert(session.session_id).second)
        bad("duplicate session_id '" + where + "'");
      if (session.trials.empty()) bad("session '" + where + "' has no trials");
      std::set<std::string> trial_ids;
      for (const auto& trial : session.trials) {
        const std::string t = where + "/" + trial.trial_id;
        if (trial.trial_id.empty()) bad("empty trial_id in " + where);
        if (!trial_ids.insert(trial.trial_id).second)
          bad("duplicate trial_id '" + t + "'");
        if (trial.n_samples <= 0) bad("trial '" + t + "' has n_samples <= 0");
        if (!detail::path_stays_under_root(trial.signal_path))
          bad("trial '" + t + "' signal_path escapes the dataset root");
        if (trial.label.dimensional.empty() && !trial.label.categorical)
          bad("trial '" + t + "' has no label");
        if (!(trial.label.scale_min < trial.label.scale_max))
          bad("trial '" + t + "' has an empty rating scale");
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Manifest I/O

inline fs::path manifest_file(const fs::path& path) {
  return fs::is_directory(path) ? path / kManifestFileName : path;
}

/// Parses and checks a manifest. Does not touch any signal file.
inline DatasetManifest load_manifest(const fs::path& path) {
  const fs::path file = manifest_file(path);
  std::ifstream in(file);
  if (!in) fail(ErrorKind::io, file.string() + ": cannot open manifest");
  DatasetManifest m;
  try {
    m = json::parse(in).get<DatasetManifest>();
  } catch (const json::exception& e) {
    fail(ErrorKind::data, file.string() + ": malformed manifest: " + e.what());
  }
  try {
    check_manifest(m);
  } catch (const Error& e) {
    fail(e.kind(), file.string() + ": " + e.what());
  }
  m.root = file.parent_path();
  return m;
}

inline void save_manifest(const DatasetManifest& m, const fs::path& dir) {
  check_manifest(m);
  fs::create_directories(dir);
  const fs::path file = dir / kManifestFileName;
  std::ofstream out(file, std::ios::binary);
  if (!out) fail(ErrorKind::io, file.string() + ": cannot write manifest");
  out << json(m).dump(2) << '\n';
  if (!out) fail(ErrorKind::io, file.string() + ": write failed");
}

// ---------------------------------------------------------------------------
// Signal files

namespace detail {

inline std::uint32_t to_little_endian(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

}  // namespace detail

inline void write_signal_file(const fs::path& file, const SignalBlock& s) {
  check_signal(s);
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::vector<std::uint32_t> words;
  words.reserve(s.n_channels() * s.n_samples());
  for (const auto& ch : s.data) {
    for (double v : ch) {
      words.push_back(detail::to_little_endian(
          std::bit_cast<std::uint32_t>(static_cast<float>(v))));
    }
  }
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, file.string() + ": cannot open for writing");
  out.write(reinterpret_cast<const char*>(words.data()),
            static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!out) fail(ErrorKind::io, file.string() + ": write failed");
}

inline std::uintmax_t expected_signal_bytes(const DatasetManifest& m,
                                            const TrialRecord& t) {
  return static_cast<std::uintmax_t>(m.channels.size()) *
         static_cast<std::uintmax_t>(t.n_samples) * 4u;
}

struct TrialLocation {
  const SubjectRecord* subject = nullptr;
  const SessionRecord* session = nullptr;
  const TrialRecord* trial = nullptr;
};

inline TrialLocation find_trial(const DatasetManifest& m, const std::string& subject_id,
                                const std::string& session_id,
                                const std::string& trial_id) {
  for (const auto& subject : m.subjects) {
    if (subject.subject_id != subject_id) continue;
    for (const auto& session : subject.sessions) {
      if (session.session_id != session_id) continue;
      for (const auto& trial : session.trials) {
        if (trial.trial_id == trial_id) return {&subject, &session, &trial};
      }
      fail(ErrorKind::data, "unknown trial '" + trial_id + "' in " + subject_id +
                                "/" + session_id);
    }
    fail(ErrorKind::data, "unknown session '" + session_id + "' for subject " +
                              subject_id);
  }
  fail(ErrorKind::data, "unknown subject '" + subject_id + "'");
}

inline SignalBlock read_trial_signal(const DatasetManifest& m,
                                     const std::string& subject_id,
                                     const std::string& session_id,
                                     const std::string& trial_id) {
  const TrialRecord& trial = *find_trial(m, subject_id, session_id, trial_id).trial;
  const fs::path file = m.root / trial.signal_path;
  std::error_code ec;
  const auto size = fs::file_size(file, ec);
  if (ec) fail(ErrorKind::io, file.string() + ": " + ec.message());
  if (size != expected_signal_bytes(m, trial)) {
    fail(ErrorKind::data, file.string() + ": length " + std::to_string(size) +
                              " bytes, expected " +
                              std::to_string(expected_signal_bytes(m, trial)));
  }
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorKind::io, file.string() + ": cannot open");
  const auto n = static_cast<std::size_t>(trial.n_samples);
  std::vector<std::uint32_t> words(m.channels.size() * n);
  in.read(reinterpret_cast<char*>(words.data()),
          static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!in) fail(ErrorKind::io, file.string() + ": read failed");

  SignalBlock s;
  s.channels = m.channel_names();
  s.sampling_rate_hz = m.sampling_rate_hz;
  s.data.assign(m.channels.size(), std::vector<double>(n));
  for (std::size_t c = 0; c < m.channels.size(); ++c) {
    for (std::size_t t = 0; t < n; ++t) {
      s.data[c][t] = static_cast<double>(
          std::bit_cast<float>(detail::to_little_endian(words[c * n + t])));
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Validation

enum class FindingKind { missing_file, size_mismatch, rating_out_of_scale, unknown_category };

inline std::string_view to_string(FindingKind k) {
  switch (k) {
    case FindingKind::missing_file: return "missing_file";
    case FindingKind::size_mismatch: return "size_mismatch";
    case FindingKind::rating_out_of_scale: return "rating_out_of_scale";
    case FindingKind::unknown_category: return "unknown_category";
  }
  return "?";
}

struct Finding {
  TrialKey trial;
  FindingKind kind;
  std::string message;
};

struct ValidationReport {
  std::size_t trials_checked = 0;
  std::vector<Finding> findings;

  bool ok() const { return findings.empty(); }
};

/// Checks every trial's signal file and label against the manifest. Problems
/// are reported as findings, never thrown.
inline ValidationReport validate_manifest(const DatasetManifest& m, const fs::path& root) {
  ValidationReport report;
  for_each_trial(m, [&](const SubjectRecord& subject, const SessionRecord& session,
                        const TrialRecord& trial) {
    ++report.trials_checked;
    const TrialKey key{subject.subject_id, session.session_id, trial.trial_id};
    const fs::path file = root / trial.signal_path;
    std::error_code ec;
    if (!fs::is_regular_file(file, ec)) {
      report.findings.push_back({key, FindingKind::missing_file,
                                 file.string() + " does not exist"});
    } else {
      const auto size = fs::file_size(file, ec);
      const auto expected = expected_signal_bytes(m, trial);
      if (ec || size != expected) {
        report.findings.push_back(
            {key, FindingKind::size_mismatch,
             file.string() + " has " + std::to_string(size) + " bytes, expected " +
                 std::to_string(expected)});
      }
    }
    const RatingScale scale{trial.label.scale_min, trial.label.scale_max};
    for (const auto& [dim, rating] : trial.label.dimensional) {
      if (!scale.contains(rating)) {
        std::ostringstream msg;
        msg << dim << " rating " << rating << " outside [" << scale.min << ", "
            << scale.max << "]";
        report.findings.push_back({key, FindingKind::rating_out_of_scale, msg.str()});
      }
    }
    if (trial.label.categorical && m.categorical_classes) {
      const auto& classes = *m.categorical_classes;
      const std::string tag = to_lower(*trial.label.categorical);
      const bool known = std::any_of(classes.begin(), classes.end(), [&](const auto& c) {
        return to_lower(c) == tag;
      });
      if (!known) {
        report.findings.push_back({key, FindingKind::unknown_category,
                                   "category '" + *trial.label.categorical +
                                       "' not in categorical_classes"});
      }
    }
  });
  return report;
}

inline ValidationReport validate_manifest(const DatasetManifest& m) {
  return validate_manifest(m, m.root);
}

// ---------------------------------------------------------------------------
// Summary

struct SummaryStats {
  std::string dataset_name;
  std::size_t n_subjects = 0;
  std::vector<std::pair<std::string, std::size_t>> trials_per_subject;
  std::size_t n_trials = 0;
  std::size_t n_channels = 0;
  double sampling_rate_hz = 0.0;
  double total_trial_seconds = 0.0;
  std::optional<ClassDistribution> class_distribution;
};

inline SummaryStats dataset_summary(const DatasetManifest& m,
                                    const std::optional<GroundTruthScheme>& scheme = {}) {
  SummaryStats s;
  s.dataset_name = m.dataset_name;
  s.n_subjects = m.subjects.size();
  s.n_channels = m.channels.size();
  s.sampling_rate_hz = m.sampling_rate_hz;
  std::int64_t total_samples = 0;
  std::vector<int> labels;
  for (const auto& subject : m.subjects) {
    std::size_t count = 0;
    for (const auto& session : subject.sessions) {
      count += session.trials.size();
      for (const auto& trial : session.trials) {
        total_samples += trial.n_samples;
        if (scheme) labels.push_back(label_trial(trial.label, *scheme).index);
      }
    }
    s.trials_per_subject.emplace_back(subject.subject_id, count);
    s.n_trials += count;
  }
  s.total_trial_seconds = static_cast<double>(total_samples) / m.sampling_rate_hz;
  if (scheme && !labels.empty()) {
    s.class_distribution = class_distribution(std::span<const int>(labels),
                                              scheme->n_classes());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Synthetic datasets

/// Parameters for a synthetic dataset whose classes differ in alpha-band
/// (8-13 Hz) amplitude.
struct SyntheticSpec {
  std::string dataset_name = "synthetic";
  int n_subjects = 2;
  int n_sessions_per_subject = 1;
  int n_trials_per_session = 4;
  int n_channels = 4;
  int n_peripheral_channels = 0;  // pure-noise "EXG<n>" channels
  double trial_length_s = 10.0;
  double sampling_rate_hz = 128.0;
  LabelSchema label_schema = LabelSchema::dimensional;
  std::vector<double> class_effect = {1.0, 3.0};  // alpha amplitude per class
  std::vector<std::string> class_names;           // categorical; defaults class_<i>
  double noise_sd = 1.0;
  std::uint64_t seed = 0;

  std::size_t n_classes() const { return class_effect.size(); }

  bool operator==(const SyntheticSpec&) const = default;
};

inline void to_json(json& j, const SyntheticSpec& s) {
  j = json{{"dataset_name", s.dataset_name},
           {"n_subjects", s.n_subjects},
           {"n_sessions_per_subject", s.n_sessions_per_subject},
           {"n_trials_per_session", s.n_trials_per_session},
           {"n_channels", s.n_channels},
           {"n_peripheral_channels", s.n_peripheral_channels},
           {"trial_length_s", s.trial_length_s},
           {"sampling_rate_hz", s.sampling_rate_hz},
           {"label_schema", to_string(s.label_schema)},
           {"class_effect", s.class_effect},
           {"class_names", s.class_names},
           {"noise_sd", s.noise_sd},
           {"seed", s.seed}};
}

inline void from_json(const json& j, SyntheticSpec& s) {
  const SyntheticSpec d;
  s.dataset_name = j.value("dataset_name", d.dataset_name);
  s.n_subjects = j.value("n_subjects", d.n_subjects);
  s.n_sessions_per_subject = j.value("n_sessions_per_subject", d.n_sessions_per_subject);
  s.n_trials_per_session = j.value("n_trials_per_session", d.n_trials_per_session);
  s.n_channels = j.value("n_channels", d.n_channels);
  s.n_peripheral_channels = j.value("n_peripheral_channels", d.n_peripheral_channels);
  s.trial_length_s = j.value("trial_length_s", d.trial_length_s);
  s.sampling_rate_hz = j.value("sampling_rate_hz", d.sampling_rate_hz);
  s.label_schema = label_schema_from_string(
      j.value("label_schema", std::string(to_string(d.label_schema))));
  s.class_effect = j.value("class_effect", d.class_effect);
  s.class_names = j.value("class_names", d.class_names);
  s.noise_sd = j.value("noise_sd", d.noise_sd);
  s.seed = j.value("seed", d.seed);
}

inline void check_synthetic_spec(const SyntheticSpec& s) {
  require(s.n_subjects >= 1, "synthetic spec: n_subjects must be >= 1");
  require(s.n_sessions_per_subject >= 1, "synthetic spec: n_sessions_per_subject must be >= 1");
  require(s.n_trials_per_session >= 1, "synthetic spec: n_trials_per_session must be >= 1");
  require(s.n_channels >= 1, "synthetic spec: n_channels must be >= 1");
  require(s.n_peripheral_channels >= 0, "synthetic spec: n_peripheral_channels must be >= 0");
  require(s.sampling_rate_hz > 0.0, "synthetic spec: sampling_rate_hz must be positive");
  require(s.trial_length_s > 0.0, "synthetic spec: trial_length_s must be positive");
  require(std::llround(s.trial_length_s * s.sampling_rate_hz) >= 1,
          "synthetic spec: trial shorter than one sample");
  require(s.noise_sd >= 0.0, "synthetic spec: noise_sd must be >= 0");
  require(!s.class_effect.empty(), "synthetic spec: class_effect is empty");
  for (double e : s.class_effect)
    require(e > 0.0, "synthetic spec: class_effect multipliers must be > 0");
  if (s.label_schema != LabelSchema::categorical) {
    require(s.n_classes() == 2 || s.n_classes() == 4,
            "synthetic spec: dimensional labels need 2 (valence) or 4 (quadrant) classes");
  }
  if (!s.class_names.empty()) {
    require(s.class_names.size() == s.n_classes(),
            "synthetic spec: class_names must match class_effect in length");
  }
}

namespace detail {

inline const std::vector<std::string>& standard_eeg_names() {
  static const std::vector<std::string> names = {
      "Fp1", "AF3", "F3",  "F7",  "FC5", "FC1", "C3", "T7", "CP5", "CP1", "P3",
      "P7",  "PO3", "O1",  "Oz",  "Pz",  "Fp2", "AF4", "Fz", "F4", "F8",  "FC6",
      "FC2", "Cz",  "C4",  "T8",  "CP6", "CP2", "P4", "P8", "PO4", "O2"};
  return names;
}

inline std::string padded_id(const char* prefix, int value, int count) {
  const int width = static_cast<int>(std::to_string(count).size()) < 2
                        ? 2
                        : static_cast<int>(std::to_string(count).size());
  std::string digits = std::to_string(value);
  if (static_cast<int>(digits.size()) < width)
    digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

// Integer rating on a 1-9 scale on the requested side of 4.5.
inline double synthetic_rating(Rng& rng, bool high) {
  return high ? 5.0 + static_cast<double>(rng.uniform_index(5))
              : 1.0 + static_cast<double>(rng.uniform_index(4));
}

}  // namespace detail

inline std::vector<std::string> synthetic_class_names(const SyntheticSpec& s) {
  if (!s.class_names.empty()) return s.class_names;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < s.n_classes(); ++i) names.push_back("class_" + std::to_string(i));
  return names;
}

/// Writes a complete dataset (manifest and signal files) under `out`.
///
/// Labels are drawn uniformly over classes. Each EEG channel is white
/// Gaussian noise (sd = noise_sd) plus one sinusoid with frequency uniform in
/// 8-13 Hz, random phase, and amplitude class_effect[class]. Dimensional
/// ratings are integers on 1-9 that fall on the class's side of 4.5 (valence
/// for two classes; valence and arousal bits for four). The output is a pure
/// function of `spec`, byte for byte.
inline DatasetManifest generate_synthetic(const SyntheticSpec& spec, const fs::path& out) {
  check_synthetic_spec(spec);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) fail(ErrorKind::io, out.string() + ": " + ec.message());

  DatasetManifest m;
  m.dataset_name = spec.dataset_name;
  m.sampling_rate_hz = spec.sampling_rate_hz;
  m.label_schema = spec.label_schema;
  const auto class_names = synthetic_class_names(spec);
  if (spec.label_schema != LabelSchema::dimensional) m.categorical_classes = class_names;

  const auto& eeg_names = detail::standard_eeg_names();
  for (int c = 0; c < spec.n_channels; ++c) {
    const auto idx = static_cast<std::size_t>(c);
    m.channels.push_back({idx < eeg_names.size() ? eeg_names[idx]
                                                 : detail::padded_id("E", c + 1, spec.n_channels),
                          ChannelKind::eeg});
  }
  for (int c = 0; c < spec.n_peripheral_channels; ++c) {
    m.channels.push_back({"EXG" + std::to_string(c + 1), ChannelKind::peripheral});
  }

  const auto n_samples =
      static_cast<std::size_t>(std::llround(spec.trial_length_s * spec.sampling_rate_hz));
  Rng label_rng(derive_seed(spec.seed, 0));
  std::uint64_t trial_counter = 0;

  for (int s = 0; s < spec.n_subjects; ++s) {
    SubjectRecord subject{detail::padded_id("s", s + 1, spec.n_subjects), {}};
    for (int se = 0; se < spec.n_sessions_per_subject; ++se) {
      SessionRecord session{detail::padded_id("sess", se + 1, spec.n_sessions_per_subject), {}};
      for (int t = 0; t < spec.n_trials_per_session; ++t) {
        const auto cls = static_cast<std::size_t>(label_rng.uniform_index(spec.n_classes()));
        TrialRecord trial;
        trial.trial_id = detail::padded_id("t", t + 1, spec.n_trials_per_session);
        trial.signal_path = subject.subject_id + "/" + session.session_id + "/" +
                            trial.trial_id + kSignalExtension;
        trial.n_samples = static_cast<std::int64_t>(n_samples);
        trial.label.scale_min = 1.0;
        trial.label.scale_max = 9.0;
        if (spec.label_schema != LabelSchema::categorical) {
          if (spec.n_classes() == 2) {
            trial.label.dimensional["valence"] = detail::synthetic_rating(label_rng, cls == 1);
            trial.label.dimensional["arousal"] = 1.0 + static_cast<double>(label_rng.uniform_index(9));
          } else {
            trial.label.dimensional["valence"] = detail::synthetic_rating(label_rng, (cls & 1u) != 0);
            trial.label.dimensional["arousal"] = detail::synthetic_rating(label_rng, (cls & 2u) != 0);
          }
        }
        if (spec.label_schema != LabelSchema::dimensional) trial.label.categorical = class_names[cls];

        Rng signal_rng(derive_seed(spec.seed, ++trial_counter));
        SignalBlock block;
        block.channels = m.channel_names();
        block.sampling_rate_hz = spec.sampling_rate_hz;
        block.data.assign(m.channels.size(), std::vector<double>(n_samples));
        const double amplitude = spec.class_effect[cls];
        for (std::size_t c = 0; c < m.channels.size(); ++c) {
          const bool eeg = m.channels[c].kind == ChannelKind::eeg;
          const double freq = signal_rng.uniform(8.0, 13.0);
          const double phase = signal_rng.uniform(0.0, 2.0 * std::numbers::pi);
          auto& ch = block.data[c];
          for (std::size_t i = 0; i < n_samples; ++i) {
            double v = spec.noise_sd * signal_rng.normal();
            if (eeg) {
              const double time = static_cast<double>(i) / spec.sampling_rate_hz;
              v += amplitude * std::sin(2.0 * std::numbers::pi * freq * time + phase);
            }
            ch[i] = v;
          }
        }
        write_signal_file(out / trial.signal_path, block);
        session.trials.push_back(std::move(trial));
      }
      subject.sessions.push_back(std::move(session));
    }
    m.subjects.push_back(std::move(subject));
  }
  save_manifest(m, out);
  m.root = out;
  return m;
}

}  // namespace eegain
