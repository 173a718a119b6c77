#pragma once

// Shared fixtures for the test binaries.

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "eegain/dataset.hpp"
#include "eegain/signal.hpp"

namespace eegain::test {

inline std::vector<double> tone(double freq_hz, double fs, std::size_t n, double amplitude = 1.0,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude *
           std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs + phase);
  }
  return x;
}

inline double rms(const std::vector<double>& x, std::size_t skip = 0) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = skip; i + skip < x.size(); ++i, ++n) s += x[i] * x[i];
  return std::sqrt(s / static_cast<double>(n));
}

struct SineFit {
  double amplitude = 0.0;
  double residual_rms = 0.0;
};

/// Least-squares fit of a*sin + b*cos + c at a known frequency over
/// samples [skip, n - skip).
inline SineFit fit_sine(const std::vector<double>& x, double freq_hz, double fs,
                        std::size_t skip = 0) {
  double m[3][3] = {}, r[3] = {};
  auto basis = [&](std::size_t i, double* b) {
    const double t = 2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / fs;
    b[0] = std::sin(t);
    b[1] = std::cos(t);
    b[2] = 1.0;
  };
  for (std::size_t i = skip; i + skip < x.size(); ++i) {
    double b[3];
    basis(i, b);
    for (int p = 0; p < 3; ++p) {
      r[p] += b[p] * x[i];
      for (int q = 0; q < 3; ++q) m[p][q] += b[p] * b[q];
    }
  }
  // Gaussian elimination on the 3x3 normal equations.
  for (int p = 0; p < 3; ++p) {
    for (int q = p + 1; q < 3; ++q) {
      const double f = m[q][p] / m[p][p];
      for (int k = p; k < 3; ++k) m[q][k] -= f * m[p][k];
      r[q] -= f * r[p];
    }
  }
  double c[3];
  for (int p = 2; p >= 0; --p) {
    double s = r[p];
    for (int k = p + 1; k < 3; ++k) s -= m[p][k] * c[k];
    c[p] = s / m[p][p];
  }
  SineFit fit;
  fit.amplitude = std::hypot(c[0], c[1]);
  double ss = 0.0;
  std::size_t n = 0;
  for (std::size_t i = skip; i + skip < x.size(); ++i, ++n) {
    double b[3];
    basis(i, b);
    const double e = x[i] - (c[0] * b[0] + c[1] * b[1] + c[2] * b[2]);
    ss += e * e;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(n));
  return fit;
}

/// Fresh, empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("eegain-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

/// In-memory manifest with the given trial counts per subject (one session).
inline DatasetManifest make_manifest(const std::vector<int>& trials_per_subject,
                                     int sessions = 1) {
  DatasetManifest m;
  m.dataset_name = "fixture";
  m.sampling_rate_hz = 128.0;
  m.channels = {{"Fz", ChannelKind::eeg}};
  for (std::size_t s = 0; s < trials_per_subject.size(); ++s) {
    SubjectRecord subject;
    subject.subject_id = "s" + std::to_string(s + 1);
    for (int se = 0; se < sessions; ++se) {
      SessionRecord session;
      session.session_id = "sess" + std::to_string(se + 1);
      for (int t = 0; t < trials_per_subject[s]; ++t) {
        TrialRecord trial;
        trial.trial_id = "t" + std::to_string(t + 1);
        trial.n_samples = 512;
        trial.signal_path = subject.subject_id + "/" + session.session_id + "/" +
                            trial.trial_id + ".f32raw";
        trial.label.dimensional = {{"valence", 1.0 + (t % 9)}, {"arousal", 9.0 - (t % 9)}};
        session.trials.push_back(trial);
      }
      subject.sessions.push_back(session);
    }
    m.subjects.push_back(subject);
  }
  return m;
}

}  // namespace eegain::test
