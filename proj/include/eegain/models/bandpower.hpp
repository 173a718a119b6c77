#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "eegain/dsp/spectrum.hpp"
#include "eegain/error.hpp"
#include "eegain/signal.hpp"

namespace eegain {

struct Band {
  std::string name;
  double lo_hz = 0.0;
  double hi_hz = 0.0;

  bool operator==(const Band&) const = default;
};

inline std::vector<Band> default_bands() {
  return {{"delta", 0.5, 4.0},
          {"theta", 4.0, 8.0},
          {"alpha", 8.0, 13.0},
          {"beta", 13.0, 30.0},
          {"gamma", 30.0, 45.0}};
}

inline constexpr double kLogPowerFloor = 1e-12;

inline void check_bands(std::span<const Band> bands) {
  require(!bands.empty(), "band list is empty");
  for (std::size_t i = 0; i < bands.size(); ++i) {
    require(bands[i].lo_hz >= 0.0 && bands[i].lo_hz < bands[i].hi_hz,
            "band '" + bands[i].name + "' must satisfy 0 <= lo < hi");
    for (std::size_t j = 0; j < i; ++j) {
      require(bands[i].hi_hz <= bands[j].lo_hz || bands[j].hi_hz <= bands[i].lo_hz,
              "bands '" + bands[j].name + "' and '" + bands[i].name + "' overlap");
    }
  }
}

/// log(mean periodogram power in [lo, hi) + 1e-12) per channel and band,
/// channel-major: features[c * n_bands + b].
inline std::vector<double> bandpower_features(const SignalBlock& signal,
                                              std::span<const Band> bands) {
  check_signal(signal);
  check_bands(bands);
  const double nyquist = signal.sampling_rate_hz / 2.0;
  for (const auto& b : bands) {
    require(b.hi_hz <= nyquist, "band '" + b.name + "' extends above Nyquist (" +
                                    std::to_string(nyquist) + " Hz)");
  }
  std::vector<double> features;
  features.reserve(signal.n_channels() * bands.size());
  for (const auto& ch : signal.data) {
    const auto p = dsp::periodogram(ch, signal.sampling_rate_hz);
    for (const auto& b : bands) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t k = 0; k < p.power.size(); ++k) {
        const double f = static_cast<double>(k) * p.bin_hz;
        if (f >= b.lo_hz && f < b.hi_hz) {
          sum += p.power[k];
          ++count;
        }
      }
      require(count > 0, "band '" + b.name + "' contains no frequency bin at this window length");
      features.push_back(std::log(sum / static_cast<double>(count) + kLogPowerFloor));
    }
  }
  return features;
}

}  // namespace eegain
