#pragma once

// IIR filters as cascades of second-order sections (a0 = 1), designed by the
// bilinear transform, and zero-phase forward-backward application.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "eegain/error.hpp"

namespace eegain::dsp {

struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

using Sos = std::vector<Biquad>;

/// H(e^{jw}) of the cascade at `freq_hz`.
inline std::complex<double> frequency_response(const Sos& sos, double freq_hz, double fs) {
  const double w = 2.0 * std::numbers::pi * freq_hz / fs;
  const std::complex<double> z1 = std::polar(1.0, -w);
  const std::complex<double> z2 = z1 * z1;
  std::complex<double> h = 1.0;
  for (const auto& s : sos) {
    h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
  }
  return h;
}

/// Second-order IIR notch at f0_hz with quality factor q (-3 dB bandwidth
/// f0/q).
inline Sos design_notch(double f0_hz, double q, double fs) {
  require(fs > 0.0, "notch: sampling rate must be positive");
  require(f0_hz > 0.0 && f0_hz < fs / 2.0,
          "notch: f0 must lie strictly between 0 and Nyquist (" +
              std::to_string(fs / 2.0) + " Hz)");
  require(q > 0.0, "notch: quality factor must be positive");
  const double w0 = 2.0 * std::numbers::pi * f0_hz / fs;
  const double bw = w0 / q;
  const double beta = std::tan(bw / 2.0);
  const double gain = 1.0 / (1.0 + beta);
  const double c = std::cos(w0);
  return {Biquad{gain, -2.0 * gain * c, gain, -2.0 * gain * c, 2.0 * gain - 1.0}};
}

/// Butterworth band-pass with an order-N analog low-pass prototype
/// (2N poles in total, N sections), bilinear transform with pre-warped band
/// edges. Gain is unity at the geometric band centre.
inline Sos design_butterworth_bandpass(double lo_hz, double hi_hz, int order, double fs) {
  require(fs > 0.0, "band-pass: sampling rate must be positive");
  require(lo_hz > 0.0 && lo_hz < hi_hz && hi_hz < fs / 2.0,
          "band-pass: need 0 < lo < hi < Nyquist (" + std::to_string(fs / 2.0) +
              " Hz), got [" + std::to_string(lo_hz) + ", " + std::to_string(hi_hz) + "]");
  require(order >= 2 && order % 2 == 0, "band-pass: order must be a positive even integer");

  using cplx = std::complex<double>;
  const double k2 = 2.0 * fs;
  const double wl = k2 * std::tan(std::numbers::pi * lo_hz / fs);
  const double wh = k2 * std::tan(std::numbers::pi * hi_hz / fs);
  const double bw = wh - wl;
  const double w0 = std::sqrt(wl * wh);

  std::vector<cplx> analog_poles;
  analog_poles.reserve(static_cast<std::size_t>(2 * order));
  for (int m = -order + 1; m < order; m += 2) {
    const cplx p = -std::exp(cplx(0.0, std::numbers::pi * m / (2.0 * order)));
    const cplx scaled = p * (bw / 2.0);
    const cplx root = std::sqrt(scaled * scaled - w0 * w0);
    analog_poles.push_back(scaled + root);
    analog_poles.push_back(scaled - root);
  }

  // Analog gain bw^N with N zeros at s = 0; the bilinear map sends those to
  // z = 1 and the N zeros at infinity to z = -1.
  cplx gain = std::pow(bw, order);
  for (int i = 0; i < order; ++i) gain *= k2;  // prod(k2 - 0) over analog zeros
  std::vector<cplx> poles;
  poles.reserve(analog_poles.size());
  for (const auto& p : analog_poles) {
    gain /= (k2 - p);
    poles.push_back((k2 + p) / (k2 - p));
  }

  std::vector<cplx> upper;
  std::vector<double> real_poles;
  for (const auto& p : poles) {
    if (std::abs(p.imag()) > 1e-14 * std::abs(p)) {
      if (p.imag() > 0.0) upper.push_back(p);
    } else {
      real_poles.push_back(p.real());
    }
  }
  std::sort(upper.begin(), upper.end(),
            [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
  std::sort(real_poles.begin(), real_poles.end());

  Sos sos;
  for (const auto& p : upper) {
    sos.push_back({1.0, 0.0, -1.0, -2.0 * p.real(), std::norm(p)});
  }
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
    sos.push_back({1.0, 0.0, -1.0, -(real_poles[i] + real_poles[i + 1]),
                   real_poles[i] * real_poles[i + 1]});
  }
  require(sos.size() == static_cast<std::size_t>(order),
          "band-pass: pole pairing failed (band too narrow or too wide)");
  const double g = gain.real();
  sos.front().b0 *= g;
  sos.front().b1 *= g;
  sos.front().b2 *= g;
  return sos;
}

/// Largest pole magnitude over all sections.
inline double max_pole_radius(const Sos& sos) {
  double r = 0.0;
  for (const auto& s : sos) {
    const double disc = s.a1 * s.a1 - 4.0 * s.a2;
    if (disc < 0.0) {
      r = std::max(r, std::sqrt(s.a2));
    } else {
      const double sq = std::sqrt(disc);
      r = std::max({r, std::abs((-s.a1 + sq) / 2.0), std::abs((-s.a1 - sq) / 2.0)});
    }
  }
  return r;
}

/// Samples until the slowest pole's envelope decays to 1e-3.
inline std::size_t significant_length(const Sos& sos) {
  const double r = max_pole_radius(sos);
  std::size_t n = 2 * sos.size() + 1;
  if (r > 0.0 && r < 1.0) {
    n = std::max(n, static_cast<std::size_t>(std::ceil(std::log(1e-3) / std::log(r))));
  }
  return n;
}

/// Per-section transposed direct-form-II state ([z1, z2] per section).
using SosState = std::vector<std::array<double, 2>>;

/// State that makes the cascade start in steady state for a unit-step input.
inline SosState steady_state(const Sos& sos) {
  SosState zi(sos.size());
  double level = 1.0;
  for (std::size_t i = 0; i < sos.size(); ++i) {
    const auto& s = sos[i];
    const double y = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    const double z2 = (s.b2 - s.a2 * y) * level;
    const double z1 = (s.b1 - s.a1 * y) * level + z2;
    zi[i] = {z1, z2};
    level *= y;
  }
  return zi;
}

/// Causal filtering in place. `state` is updated.
inline void sosfilt_inplace(const Sos& sos, std::span<double> x, SosState& state) {
  for (std::size_t k = 0; k < sos.size(); ++k) {
    const auto& s = sos[k];
    double z1 = state[k][0], z2 = state[k][1];
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
    state[k] = {z1, z2};
  }
}

inline std::vector<double> sosfilt(const Sos& sos, std::span<const double> x) {
  std::vector<double> y(x.begin(), x.end());
  SosState state(sos.size(), {0.0, 0.0});
  sosfilt_inplace(sos, y, state);
  return y;
}

/// Zero-phase filtering: odd-reflection padding of 3x the significant
/// impulse-response length (capped at n - 1), forward pass from steady-state
/// initial conditions, backward pass likewise, then trimming. Length is
/// preserved and the magnitude response is squared.
inline std::vector<double> filtfilt(const Sos& sos, std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  if (n == 1) {
    // A single sample has no shape to filter; apply the DC gain twice.
    const double g = std::abs(frequency_response(sos, 0.0, 1.0));
    return {x[0] * g * g};
  }
  const std::size_t pad = std::min(3 * significant_length(sos), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const SosState zi = steady_state(sos);
  auto scaled = [&](double level) {
    SosState s = zi;
    for (auto& z : s) {
      z[0] *= level;
      z[1] *= level;
    }
    return s;
  };

  SosState state = scaled(ext.front());
  sosfilt_inplace(sos, ext, state);
  std::reverse(ext.begin(), ext.end());
  state = scaled(ext.front());
  sosfilt_inplace(sos, ext, state);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(pad),
          ext.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

}  // namespace eegain::dsp
