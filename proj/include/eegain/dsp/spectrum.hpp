#pragma once

// One-sided periodogram (Hann window, density scaling) backed by FFTW.

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <fftw3.h>

#include "eegain/error.hpp"

namespace eegain::dsp {

namespace detail {

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
using fftw_buffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
fftw_buffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return fftw_buffer<T>(p);
}

// FFTW's planner is not thread-safe; plans are created once per size under a
// lock and executed with the new-array interface, which is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan r2c(std::size_t n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    auto in = fftw_alloc<double>(n);
    auto out = fftw_alloc<fftw_complex>(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(),
                                          FFTW_ESTIMATE);
    plans_.emplace(n, plan);
    return plan;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }

  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

}  // namespace detail

/// Periodic Hann window, w[n] = 0.5 - 0.5 cos(2 pi n / N).
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  }
  return w;
}

struct Periodogram {
  double bin_hz = 0.0;
  std::vector<double> power;  // power[k] at k * bin_hz, k = 0 .. N/2
};

/// Power spectral density estimate |X_k|^2 / (fs * sum w^2) with one-sided
/// doubling of every bin except DC and (for even N) Nyquist.
inline Periodogram periodogram(std::span<const double> x, double fs) {
  const std::size_t n = x.size();
  require(n >= 2, "periodogram needs at least two samples");
  require(fs > 0.0, "periodogram: sampling rate must be positive");
  const auto w = hann_window(n);
  double w2 = 0.0;
  for (double v : w) w2 += v * v;

  auto in = detail::fftw_alloc<double>(n);
  auto out = detail::fftw_alloc<fftw_complex>(n / 2 + 1);
  for (std::size_t i = 0; i < n; ++i) in[i] = x[i] * w[i];
  fftw_execute_dft_r2c(detail::PlanCache::instance().r2c(n), in.get(), out.get());

  Periodogram p;
  p.bin_hz = fs / static_cast<double>(n);
  p.power.resize(n / 2 + 1);
  const double scale = 1.0 / (fs * w2);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double re = out[k][0], im = out[k][1];
    double v = (re * re + im * im) * scale;
    const bool unpaired = k == 0 || (n % 2 == 0 && k == n / 2);
    if (!unpaired) v *= 2.0;
    p.power[k] = v;
  }
  return p;
}

}  // namespace eegain::dsp
