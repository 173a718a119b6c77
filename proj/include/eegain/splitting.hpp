#pragma once

// Cross-validation fold plans over subjects, sessions or trials.
//
// Folds are planned over units BEFORE any windowing; windows are then routed
// by the unit their parent trial belongs to, so windows cut from one trial
// can never sit on both sides of a split.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "eegain/dataset.hpp"
#include "eegain/error.hpp"
#include "eegain/rng.hpp"
#include "eegain/transform.hpp"

namespace eegain {

enum class SplitKind { loso, lkso, loto, lkto, leave_one_session_out, fixed };
enum class UnitKind { subject, session, trial };

inline std::string_view to_string(SplitKind k) {
  switch (k) {
    case SplitKind::loso: return "loso";
    case SplitKind::lkso: return "lkso";
    case SplitKind::loto: return "loto";
    case SplitKind::lkto: return "lkto";
    case SplitKind::leave_one_session_out: return "leave_one_session_out";
    case SplitKind::fixed: return "fixed";
  }
  return "?";
}

inline SplitKind split_kind_from_string(std::string_view s) {
  for (auto k : {SplitKind::loso, SplitKind::lkso, SplitKind::loto, SplitKind::lkto,
                 SplitKind::leave_one_session_out, SplitKind::fixed}) {
    if (to_string(k) == s) return k;
  }
  fail(ErrorKind::data, "unknown split kind '" + std::string(s) + "'");
}

inline std::string_view to_string(UnitKind u) {
  switch (u) {
    case UnitKind::subject: return "subject";
    case UnitKind::session: return "session";
    case UnitKind::trial: return "trial";
  }
  return "?";
}

struct SplitScheme {
  SplitKind kind = SplitKind::loso;
  int k = 1;                           // lkso / lkto
  std::vector<std::string> train_ids;  // fixed: subject ids
  std::vector<std::string> test_ids;   // fixed: subject ids

  UnitKind unit() const {
    switch (kind) {
      case SplitKind::loto:
      case SplitKind::lkto: return UnitKind::trial;
      case SplitKind::leave_one_session_out: return UnitKind::session;
      default: return UnitKind::subject;
    }
  }

  bool subject_dependent() const { return unit() != UnitKind::subject; }

  bool operator==(const SplitScheme&) const = default;
};

struct FoldPlan {
  int fold_index = 0;
  UnitKind unit = UnitKind::subject;
  std::set<std::string> train_units;
  std::set<std::string> test_units;
  std::optional<std::string> scope_subject;  // subject-dependent schemes
};

/// Unit id of a trial: "s01", "s01/sess1" or "s01/sess1/t03".
inline std::string unit_of(const TrialKey& key, UnitKind unit) {
  switch (unit) {
    case UnitKind::subject: return key.subject_id;
    case UnitKind::session: return key.subject_id + "/" + key.session_id;
    case UnitKind::trial: return key.str();
  }
  return {};
}

namespace detail {

inline std::vector<std::vector<std::string>> chunk_sorted(std::vector<std::string> ids, int k) {
  std::sort(ids.begin(), ids.end());
  std::vector<std::vector<std::string>> chunks;
  for (std::size_t i = 0; i < ids.size(); i += static_cast<std::size_t>(k)) {
    const auto end = std::min(ids.size(), i + static_cast<std::size_t>(k));
    chunks.emplace_back(ids.begin() + static_cast<std::ptrdiff_t>(i),
                        ids.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return chunks;
}

inline void insufficient(const std::string& what) {
  fail(ErrorKind::data, "insufficient units: " + what);
}

}  // namespace detail

inline std::vector<FoldPlan> plan_folds(const DatasetManifest& manifest,
                                        const SplitScheme& scheme) {
  std::vector<FoldPlan> folds;
  std::vector<std::string> subjects;
  for (const auto& s : manifest.subjects) subjects.push_back(s.subject_id);

  auto add_fold = [&](UnitKind unit, const std::vector<std::string>& universe,
                      const std::set<std::string>& test,
                      std::optional<std::string> scope) {
    FoldPlan f;
    f.fold_index = static_cast<int>(folds.size());
    f.unit = unit;
    f.test_units = test;
    for (const auto& u : universe)
      if (!test.count(u)) f.train_units.insert(u);
    f.scope_subject = std::move(scope);
    folds.push_back(std::move(f));
  };

  switch (scheme.kind) {
    case SplitKind::loso:
    case SplitKind::lkso: {
      const int k = scheme.kind == SplitKind::loso ? 1 : scheme.k;
      require(k >= 1, "lkso: k must be >= 1", ErrorKind::data);
      if (subjects.size() < 2) detail::insufficient("subject-level splitting needs >= 2 subjects");
      if (static_cast<std::size_t>(k) >= subjects.size())
        detail::insufficient("lkso needs k < number of subjects");
      if (k == 1) {
        for (const auto& s : subjects) add_fold(UnitKind::subject, subjects, {s}, std::nullopt);
      } else {
        for (const auto& chunk : detail::chunk_sorted(subjects, k)) {
          add_fold(UnitKind::subject, subjects, {chunk.begin(), chunk.end()}, std::nullopt);
        }
      }
      break;
    }
    case SplitKind::loto:
    case SplitKind::lkto: {
      const int k = scheme.kind == SplitKind::loto ? 1 : scheme.k;
      require(k >= 1, "lkto: k must be >= 1", ErrorKind::data);
      for (const auto& subject : manifest.subjects) {
        std::vector<std::string> trials;
        for (const auto& session : subject.sessions)
          for (const auto& trial : session.trials)
            trials.push_back(TrialKey{subject.subject_id, session.session_id, trial.trial_id}.str());
        if (trials.size() < 2)
          detail::insufficient("trial-level splitting needs >= 2 trials for subject " +
                               subject.subject_id);
        if (static_cast<std::size_t>(k) >= trials.size())
          detail::insufficient("lkto needs k < number of trials for subject " +
                               subject.subject_id);
        if (k == 1) {
          for (const auto& t : trials) add_fold(UnitKind::trial, trials, {t}, subject.subject_id);
        } else {
          for (const auto& chunk : detail::chunk_sorted(trials, k)) {
            add_fold(UnitKind::trial, trials, {chunk.begin(), chunk.end()}, subject.subject_id);
          }
        }
      }
      break;
    }
    case SplitKind::leave_one_session_out: {
      for (const auto& subject : manifest.subjects) {
        std::vector<std::string> sessions;
        for (const auto& session : subject.sessions)
          sessions.push_back(subject.subject_id + "/" + session.session_id);
        if (sessions.size() < 2)
          detail::insufficient("session-level splitting needs >= 2 sessions for subject " +
                               subject.subject_id);
        for (const auto& s : sessions) add_fold(UnitKind::session, sessions, {s}, subject.subject_id);
      }
      break;
    }
    case SplitKind::fixed: {
      const std::set<std::string> known(subjects.begin(), subjects.end());
      const std::set<std::string> train(scheme.train_ids.begin(), scheme.train_ids.end());
      const std::set<std::string> test(scheme.test_ids.begin(), scheme.test_ids.end());
      require(!train.empty() && !test.empty(), "fixed split: train and test ids must be nonempty",
              ErrorKind::data);
      for (const auto& id : train)
        require(known.count(id) > 0, "fixed split: unknown subject '" + id + "'", ErrorKind::data);
      for (const auto& id : test) {
        require(known.count(id) > 0, "fixed split: unknown subject '" + id + "'", ErrorKind::data);
        require(!train.count(id), "fixed split: subject '" + id + "' on both sides",
                ErrorKind::data);
      }
      FoldPlan f;
      f.unit = UnitKind::subject;
      f.train_units = train;
      f.test_units = test;
      folds.push_back(std::move(f));
      break;
    }
  }
  return folds;
}

/// True when the window's unit is on either side of the fold.
inline bool fold_covers(const FoldPlan& fold, const TrialKey& key) {
  const auto u = unit_of(key, fold.unit);
  return fold.train_units.count(u) > 0 || fold.test_units.count(u) > 0;
}

struct FoldWindows {
  std::vector<std::size_t> train;  // indices into the window list
  std::vector<std::size_t> test;
};

/// Routes windows to the side their parent unit belongs to. A window on
/// neither side is an error unless `skip_uncovered` is set (subject-dependent
/// folds and fixed splits that leave subjects out).
inline FoldWindows materialize_fold(const FoldPlan& fold, std::span<const WindowSegment> windows,
                                    bool skip_uncovered = false) {
  FoldWindows out;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto u = unit_of(windows[i].parent, fold.unit);
    if (fold.test_units.count(u)) {
      out.test.push_back(i);
    } else if (fold.train_units.count(u)) {
      out.train.push_back(i);
    } else if (!skip_uncovered) {
      fail(ErrorKind::data, "window of " + windows[i].parent.str() + " belongs to neither side of fold " +
                                std::to_string(fold.fold_index));
    }
  }
  return out;
}

struct VerificationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks each fold's train/test disjointness and, when `exhaustive`, that
/// every unit in a scope is tested exactly once across that scope's folds.
inline VerificationReport verify_disjoint(std::span<const FoldPlan> folds, bool exhaustive = true) {
  VerificationReport r;
  std::map<std::string, std::set<std::string>> universe;
  std::map<std::string, std::map<std::string, int>> tested;
  for (const auto& f : folds) {
    const std::string fid = "fold " + std::to_string(f.fold_index);
    if (f.test_units.empty()) r.violations.push_back(fid + ": empty test set");
    for (const auto& u : f.test_units) {
      if (f.train_units.count(u)) r.violations.push_back(fid + ": unit '" + u + "' on both sides");
    }
    const std::string scope = f.scope_subject.value_or("");
    auto& uni = universe[scope];
    uni.insert(f.train_units.begin(), f.train_units.end());
    uni.insert(f.test_units.begin(), f.test_units.end());
    for (const auto& u : f.test_units) ++tested[scope][u];
  }
  if (exhaustive) {
    for (const auto& [scope, units] : universe) {
      const std::string where = scope.empty() ? std::string("all folds") : "scope " + scope;
      for (const auto& u : units) {
        const int n = tested[scope].count(u) ? tested[scope].at(u) : 0;
        if (n != 1) {
          r.violations.push_back(where + ": unit '" + u + "' tested " + std::to_string(n) +
                                 " times");
        }
      }
      for (const auto& f : folds) {
        if (f.scope_subject.value_or("") != scope) continue;
        if (f.train_units.size() + f.test_units.size() != units.size()) {
          r.violations.push_back("fold " + std::to_string(f.fold_index) +
                                 ": train and test do not cover " + where);
        }
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Balanced train / validation split

struct LabeledUnit {
  std::string unit;
  int label = 0;
};

struct TrainValSplit {
  std::set<std::string> train_units;
  std::set<std::string> val_units;
  double ratio = 0.8;
  std::vector<std::string> warnings;
};

inline constexpr double kDefaultTrainRatio = 0.8;

/// Per class, floor(count * ratio) units go to train after a seeded shuffle,
/// keeping at least one for validation when the class has >= 2 units. A
/// single-unit class goes to train with a warning.
inline TrainValSplit train_val_split(std::span<const LabeledUnit> units, double ratio,
                                     std::uint64_t seed, std::size_t n_classes) {
  require(ratio > 0.0 && ratio < 1.0, "train/val ratio must lie in (0, 1)");
  std::vector<std::vector<std::string>> by_class(n_classes);
  for (const auto& u : units) {
    require(u.label >= 0 && static_cast<std::size_t>(u.label) < n_classes,
            "train/val split: label out of range");
    by_class[static_cast<std::size_t>(u.label)].push_back(u.unit);
  }
  TrainValSplit out;
  out.ratio = ratio;
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& ids = by_class[c];
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) {
      out.warnings.push_back("class " + std::to_string(c) + " has no units");
      continue;
    }
    if (ids.size() == 1) {
      out.warnings.push_back("class " + std::to_string(c) +
                             " has a single unit; it goes to train only");
      out.train_units.insert(ids.front());
      continue;
    }
    Rng rng(derive_seed(seed, c));
    rng.shuffle(std::span<std::string>(ids));
    auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(ids.size()) * ratio));
    n_train = std::min(n_train, ids.size() - 1);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      (i < n_train ? out.train_units : out.val_units).insert(ids[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON mapping

inline void to_json(nlohmann::json& j, const SplitScheme& s) {
  j = nlohmann::json{{"kind", to_string(s.kind)}};
  if (s.kind == SplitKind::lkso || s.kind == SplitKind::lkto) j["k"] = s.k;
  if (s.kind == SplitKind::fixed) {
    j["train_ids"] = s.train_ids;
    j["test_ids"] = s.test_ids;
  }
}

inline void from_json(const nlohmann::json& j, SplitScheme& s) {
  s.kind = split_kind_from_string(j.at("kind").get<std::string>());
  s.k = j.value("k", 1);
  s.train_ids = j.value("train_ids", std::vector<std::string>{});
  s.test_ids = j.value("test_ids", std::vector<std::string>{});
}

inline void to_json(nlohmann::json& j, const FoldPlan& f) {
  j = nlohmann::json{{"fold_index", f.fold_index},
                     {"unit", to_string(f.unit)},
                     {"train_units", f.train_units},
                     {"test_units", f.test_units}};
  if (f.scope_subject) j["scope_subject"] = *f.scope_subject;
}

}  // namespace eegain
