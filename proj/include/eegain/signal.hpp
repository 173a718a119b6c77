#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eegain/error.hpp"

namespace eegain {

/// One trial (or window) of multichannel EEG, channel-major, in microvolts.
struct SignalBlock {
  std::vector<std::string> channels;
  std::vector<std::vector<double>> data;  // data[c][t]
  double sampling_rate_hz = 0.0;

  std::size_t n_channels() const { return channels.size(); }
  std::size_t n_samples() const { return data.empty() ? 0 : data.front().size(); }
  double duration_s() const {
    return static_cast<double>(n_samples()) / sampling_rate_hz;
  }

  bool operator==(const SignalBlock&) const = default;
};

/// Throws unless channel names and data agree and all channels have equal
/// length.
inline void check_signal(const SignalBlock& s) {
  require(s.sampling_rate_hz > 0.0, "signal sampling rate must be positive");
  require(s.channels.size() == s.data.size(),
          "signal channel list and data disagree in channel count");
  for (const auto& ch : s.data) {
    require(ch.size() == s.n_samples(), "signal channels differ in length");
  }
}

/// Identity of the trial a window was cut from.
struct TrialKey {
  std::string subject_id;
  std::string session_id;
  std::string trial_id;

  auto operator<=>(const TrialKey&) const = default;

  std::string str() const { return subject_id + "/" + session_id + "/" + trial_id; }
};

}  // namespace eegain
