#pragma once

// Rational polyphase resampling with a Kaiser-windowed-sinc anti-alias
// prototype.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "eegain/error.hpp"

namespace eegain::dsp {

inline constexpr double kResamplerKaiserBeta = 8.6;
inline constexpr int kResamplerTapsPerPhase = 24;
inline constexpr std::int64_t kMaxRatioTerm = 1024;

struct RationalRatio {
  std::int64_t up = 1;    // L
  std::int64_t down = 1;  // M

  bool operator==(const RationalRatio&) const = default;
};

/// fs_out / fs_in as a reduced fraction L/M with L, M <= 1024. Uses the
/// continued-fraction convergents of the ratio and accepts the first one that
/// reproduces it to 1e-12 relative error.
inline RationalRatio rational_ratio(double fs_in, double fs_out) {
  require(fs_in > 0.0 && fs_out > 0.0, "resample: rates must be positive");
  const double target = fs_out / fs_in;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double rest = target;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(rest);
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t p2 = ai * p1 + p0;
    const std::int64_t q2 = ai * q1 + q0;
    if (p2 > kMaxRatioTerm || q2 > kMaxRatioTerm) break;
    if (q2 > 0 && p2 > 0 &&
        std::abs(static_cast<double>(p2) / static_cast<double>(q2) - target) <=
            1e-12 * target) {
      const std::int64_t g = std::gcd(p2, q2);
      return {p2 / g, q2 / g};
    }
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = rest - a;
    if (frac <= 0.0) break;
    rest = 1.0 / frac;
  }
  fail(ErrorKind::invalid_argument,
       "resample: ratio " + std::to_string(fs_out) + "/" + std::to_string(fs_in) +
           " is not expressible as L/M with L, M <= 1024");
}

/// Low-pass prototype at the up-sampled rate fs_in * L, cut off at
/// 0.9 * min(fs_in, fs_out) / 2, odd length 24 * max(L, M) + 1, normalized so
/// that each polyphase branch has unit DC gain (sum = L).
inline std::vector<double> design_resampler_filter(RationalRatio r, double fs_in, double fs_out) {
  const std::int64_t span_factor = std::max(r.up, r.down);
  const std::int64_t half = kResamplerTapsPerPhase * span_factor / 2;
  const std::int64_t length = 2 * half + 1;
  const double fs_up = fs_in * static_cast<double>(r.up);
  const double cutoff = 0.9 * std::min(fs_in, fs_out) / 2.0 / fs_up;  // cycles/sample
  const double i0_beta = std::cyl_bessel_i(0.0, kResamplerKaiserBeta);

  std::vector<double> h(static_cast<std::size_t>(length));
  double sum = 0.0;
  for (std::int64_t n = 0; n < length; ++n) {
    const double t = static_cast<double>(n - half);
    const double arg = 2.0 * cutoff * t;
    const double sinc = t == 0.0 ? 1.0
                                 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    const double ratio = static_cast<double>(n - half) / static_cast<double>(half);
    const double window =
        std::cyl_bessel_i(0.0, kResamplerKaiserBeta * std::sqrt(std::max(0.0, 1.0 - ratio * ratio))) /
        i0_beta;
    h[static_cast<std::size_t>(n)] = 2.0 * cutoff * sinc * window;
    sum += h[static_cast<std::size_t>(n)];
  }
  for (double& v : h) v *= static_cast<double>(r.up) / sum;
  return h;
}

/// Output length floor(n * L / M).
inline std::size_t resampled_length(std::size_t n, RationalRatio r) {
  return static_cast<std::size_t>((static_cast<std::int64_t>(n) * r.up) / r.down);
}

/// Resamples by L/M. Group delay of the prototype is compensated so that
/// output sample m lies at input time m * M / L; the signal is treated as
/// zero outside its support.
inline std::vector<double> resample_poly(std::span<const double> x, RationalRatio r,
                                         std::span<const double> h) {
  if (r.up == 1 && r.down == 1) return {x.begin(), x.end()};
  const auto n_in = static_cast<std::int64_t>(x.size());
  const auto n_out = static_cast<std::int64_t>(resampled_length(x.size(), r));
  const auto len = static_cast<std::int64_t>(h.size());
  const std::int64_t half = (len - 1) / 2;
  std::vector<double> y(static_cast<std::size_t>(n_out));
  for (std::int64_t m = 0; m < n_out; ++m) {
    // Position on the up-sampled grid, shifted by the filter delay.
    const std::int64_t pos = m * r.down + half;
    // Input n contributes h[pos - n*L] for 0 <= pos - n*L < len.
    std::int64_t n_hi = pos / r.up;
    std::int64_t n_lo = pos - (len - 1) <= 0 ? 0 : (pos - (len - 1) + r.up - 1) / r.up;
    n_hi = std::min(n_hi, n_in - 1);
    double acc = 0.0;
    for (std::int64_t n = n_lo; n <= n_hi; ++n) {
      acc += x[static_cast<std::size_t>(n)] * h[static_cast<std::size_t>(pos - n * r.up)];
    }
    y[static_cast<std::size_t>(m)] = acc;
  }
  return y;
}

}  // namespace eegain::dsp
