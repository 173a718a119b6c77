#pragma once

// Pre-processing: crop, channel drop, notch and band-pass filtering,
// resampling, normalization, and windowing, composed as an ordered recipe.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "eegain/dsp/iir.hpp"
#include "eegain/dsp/resample.hpp"
#include "eegain/error.hpp"
#include "eegain/labeling.hpp"
#include "eegain/signal.hpp"

namespace eegain {

inline constexpr double kDefaultNotchQ = 30.0;
inline constexpr int kDefaultBandpassOrder = 4;

struct CropSpec {
  double pre_s = 0.0;
  double post_s = 0.0;
  bool operator==(const CropSpec&) const = default;
};

struct ChannelDropSpec {
  std::vector<std::string> names;
  bool operator==(const ChannelDropSpec&) const = default;
};

struct NotchSpec {
  double f0_hz = 50.0;
  double q = kDefaultNotchQ;
  bool operator==(const NotchSpec&) const = default;
};

struct BandpassSpec {
  double lo_hz = 0.3;
  double hi_hz = 45.0;
  int order = kDefaultBandpassOrder;
  bool operator==(const BandpassSpec&) const = default;
};

struct ResampleSpec {
  double fs_out_hz = 128.0;
  bool operator==(const ResampleSpec&) const = default;
};

enum class NormalizeMethod { zscore, minmax };

struct NormalizeSpec {
  NormalizeMethod method = NormalizeMethod::zscore;
  bool operator==(const NormalizeSpec&) const = default;
};

struct WindowSpec {
  double size_s = 4.0;
  double overlap_s = 0.0;
  bool operator==(const WindowSpec&) const = default;
};

using TransformStep = std::variant<CropSpec, ChannelDropSpec, NotchSpec, BandpassSpec,
                                   ResampleSpec, NormalizeSpec, WindowSpec>;

struct TransformSpec {
  std::vector<TransformStep> steps;
  bool operator==(const TransformSpec&) const = default;
};

/// A fixed-length piece of one trial, carrying the trial's label.
struct WindowSegment {
  TrialKey parent;
  int window_index = 0;
  SignalBlock signal;
  ClassLabel label;
};

inline std::string_view step_name(const TransformStep& step) {
  return std::visit(
      [](const auto& s) -> std::string_view {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CropSpec>) return "crop";
        else if constexpr (std::is_same_v<T, ChannelDropSpec>) return "drop_channels";
        else if constexpr (std::is_same_v<T, NotchSpec>) return "notch";
        else if constexpr (std::is_same_v<T, BandpassSpec>) return "bandpass";
        else if constexpr (std::is_same_v<T, ResampleSpec>) return "resample";
        else if constexpr (std::is_same_v<T, NormalizeSpec>) return "normalize";
        else return "window";
      },
      step);
}

// ---------------------------------------------------------------------------
// Operations

inline SignalBlock crop(const SignalBlock& signal, double pre_s, double post_s) {
  check_signal(signal);
  require(pre_s >= 0.0 && post_s >= 0.0, "crop: durations must be >= 0");
  const auto pre = static_cast<std::size_t>(std::llround(pre_s * signal.sampling_rate_hz));
  const auto post = static_cast<std::size_t>(std::llround(post_s * signal.sampling_rate_hz));
  require(pre + post < signal.n_samples(),
          "crop: removing " + std::to_string(pre + post) + " of " +
              std::to_string(signal.n_samples()) + " samples leaves nothing");
  SignalBlock out{signal.channels, {}, signal.sampling_rate_hz};
  out.data.reserve(signal.data.size());
  for (const auto& ch : signal.data) {
    out.data.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(pre),
                          ch.end() - static_cast<std::ptrdiff_t>(post));
  }
  return out;
}

inline SignalBlock drop_channels(const SignalBlock& signal,
                                 const std::vector<std::string>& names) {
  check_signal(signal);
  const std::set<std::string> drop(names.begin(), names.end());
  for (const auto& name : drop) {
    require(std::find(signal.channels.begin(), signal.channels.end(), name) !=
                signal.channels.end(),
            "drop_channels: unknown channel '" + name + "'");
  }
  SignalBlock out{{}, {}, signal.sampling_rate_hz};
  for (std::size_t c = 0; c < signal.channels.size(); ++c) {
    if (drop.count(signal.channels[c])) continue;
    out.channels.push_back(signal.channels[c]);
    out.data.push_back(signal.data[c]);
  }
  return out;
}

inline SignalBlock apply_zero_phase(const SignalBlock& signal, const dsp::Sos& sos) {
  SignalBlock out{signal.channels, {}, signal.sampling_rate_hz};
  out.data.reserve(signal.data.size());
  for (const auto& ch : signal.data) out.data.push_back(dsp::filtfilt(sos, ch));
  return out;
}

/// Zero-phase second-order notch.
inline SignalBlock notch_filter(const SignalBlock& signal, double f0_hz,
                                double q = kDefaultNotchQ) {
  check_signal(signal);
  return apply_zero_phase(signal, dsp::design_notch(f0_hz, q, signal.sampling_rate_hz));
}

/// Zero-phase Butterworth band-pass of design order `order`.
inline SignalBlock bandpass_butterworth(const SignalBlock& signal, double lo_hz, double hi_hz,
                                        int order = kDefaultBandpassOrder) {
  check_signal(signal);
  return apply_zero_phase(
      signal, dsp::design_butterworth_bandpass(lo_hz, hi_hz, order, signal.sampling_rate_hz));
}

inline SignalBlock resample(const SignalBlock& signal, double fs_out_hz) {
  check_signal(signal);
  require(fs_out_hz > 0.0, "resample: target rate must be positive");
  const auto ratio = dsp::rational_ratio(signal.sampling_rate_hz, fs_out_hz);
  if (ratio.up == 1 && ratio.down == 1) return signal;
  const auto h = dsp::design_resampler_filter(ratio, signal.sampling_rate_hz, fs_out_hz);
  SignalBlock out{signal.channels, {}, fs_out_hz};
  out.data.reserve(signal.data.size());
  for (const auto& ch : signal.data) out.data.push_back(dsp::resample_poly(ch, ratio, h));
  return out;
}

/// Per-channel z-score (population sd) or min-max scaling to [0, 1].
/// Constant channels become all zeros.
inline SignalBlock normalize(const SignalBlock& signal, NormalizeMethod method) {
  check_signal(signal);
  require(signal.n_samples() > 0, "normalize: empty signal");
  SignalBlock out = signal;
  for (auto& ch : out.data) {
    if (method == NormalizeMethod::zscore) {
      const double n = static_cast<double>(ch.size());
      const double mean = std::accumulate(ch.begin(), ch.end(), 0.0) / n;
      double ss = 0.0;
      for (double v : ch) ss += (v - mean) * (v - mean);
      const double sd = std::sqrt(ss / n);
      for (double& v : ch) v = sd > 0.0 ? (v - mean) / sd : 0.0;
    } else {
      const auto [lo, hi] = std::minmax_element(ch.begin(), ch.end());
      const double min = *lo, range = *hi - *lo;
      for (double& v : ch) v = range > 0.0 ? (v - min) / range : 0.0;
    }
  }
  return out;
}

/// Number of windows `window` emits for n samples.
inline std::size_t window_count(std::size_t n, std::size_t size, std::size_t step) {
  if (size == 0 || step == 0 || size > n) return 0;
  return (n - size) / step + 1;
}

/// Cuts consecutive windows of round(size_s * fs) samples starting every
/// round((size_s - overlap_s) * fs) samples. A trailing remainder shorter than
/// a window is discarded.
inline std::vector<WindowSegment> window(const SignalBlock& signal, double size_s,
                                         double overlap_s, const TrialKey& parent = {},
                                         const ClassLabel& label = {}) {
  check_signal(signal);
  require(overlap_s >= 0.0 && overlap_s < size_s,
          "window: need 0 <= overlap < size");
  const double fs = signal.sampling_rate_hz;
  const auto size = static_cast<std::size_t>(std::llround(size_s * fs));
  const auto step = static_cast<std::size_t>(std::llround((size_s - overlap_s) * fs));
  require(size >= 1 && step >= 1, "window: size and step must cover at least one sample");
  require(size <= signal.n_samples(),
          "window: " + std::to_string(size) + "-sample window exceeds the " +
              std::to_string(signal.n_samples()) + "-sample trial");
  const std::size_t k = window_count(signal.n_samples(), size, step);
  std::vector<WindowSegment> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    WindowSegment seg;
    seg.parent = parent;
    seg.window_index = static_cast<int>(i);
    seg.label = label;
    seg.signal.channels = signal.channels;
    seg.signal.sampling_rate_hz = fs;
    seg.signal.data.reserve(signal.data.size());
    const auto start = static_cast<std::ptrdiff_t>(i * step);
    for (const auto& ch : signal.data) {
      seg.signal.data.emplace_back(ch.begin() + start,
                                   ch.begin() + start + static_cast<std::ptrdiff_t>(size));
    }
    out.push_back(std::move(seg));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recipes

/// Structural checks that do not depend on the signal: at most one window
/// step and only in last position, sane parameters.
inline void check_transform_spec(const TransformSpec& spec) {
  for (std::size_t i = 0; i < spec.steps.size(); ++i) {
    const auto& step = spec.steps[i];
    const std::string where = "transform step " + std::to_string(i) + " (" +
                              std::string(step_name(step)) + "): ";
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, CropSpec>) {
            require(s.pre_s >= 0.0 && s.post_s >= 0.0, where + "durations must be >= 0");
          } else if constexpr (std::is_same_v<T, NotchSpec>) {
            require(s.f0_hz > 0.0 && s.q > 0.0, where + "f0 and q must be positive");
          } else if constexpr (std::is_same_v<T, BandpassSpec>) {
            require(s.lo_hz > 0.0 && s.lo_hz < s.hi_hz, where + "need 0 < lo < hi");
            require(s.order >= 2 && s.order % 2 == 0, where + "order must be even and >= 2");
          } else if constexpr (std::is_same_v<T, ResampleSpec>) {
            require(s.fs_out_hz > 0.0, where + "target rate must be positive");
          } else if constexpr (std::is_same_v<T, WindowSpec>) {
            require(i + 1 == spec.steps.size(), where + "window must be the last step");
            require(s.overlap_s >= 0.0 && s.overlap_s < s.size_s,
                    where + "need 0 <= overlap < size");
          }
        },
        step);
  }
}

inline SignalBlock apply_step(const SignalBlock& signal, const TransformStep& step) {
  return std::visit(
      [&](const auto& s) -> SignalBlock {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CropSpec>) return crop(signal, s.pre_s, s.post_s);
        else if constexpr (std::is_same_v<T, ChannelDropSpec>) return drop_channels(signal, s.names);
        else if constexpr (std::is_same_v<T, NotchSpec>) return notch_filter(signal, s.f0_hz, s.q);
        else if constexpr (std::is_same_v<T, BandpassSpec>)
          return bandpass_butterworth(signal, s.lo_hz, s.hi_hz, s.order);
        else if constexpr (std::is_same_v<T, ResampleSpec>) return resample(signal, s.fs_out_hz);
        else if constexpr (std::is_same_v<T, NormalizeSpec>) return normalize(signal, s.method);
        else fail(ErrorKind::invalid_argument, "window is handled by apply_pipeline");
      },
      step);
}

/// Runs the recipe on one trial. Without a window step the whole processed
/// trial becomes a single segment. Errors name the failing step.
inline std::vector<WindowSegment> apply_pipeline(const SignalBlock& signal,
                                                 const TrialKey& parent,
                                                 const ClassLabel& label,
                                                 const TransformSpec& spec) {
  check_transform_spec(spec);
  SignalBlock current = signal;
  for (std::size_t i = 0; i < spec.steps.size(); ++i) {
    const auto& step = spec.steps[i];
    try {
      if (const auto* w = std::get_if<WindowSpec>(&step)) {
        return window(current, w->size_s, w->overlap_s, parent, label);
      }
      current = apply_step(current, step);
    } catch (const Error& e) {
      fail(e.kind(), "transform step " + std::to_string(i) + " (" +
                         std::string(step_name(step)) + "): " + e.what());
    }
  }
  check_signal(current);
  std::vector<WindowSegment> out(1);
  out[0].parent = parent;
  out[0].label = label;
  out[0].signal = std::move(current);
  return out;
}

// ---------------------------------------------------------------------------
// Presets

inline std::vector<std::string> preset_names() {
  return {"mahnob_hci", "deap", "amigos", "dreamer", "seed", "seed_iv", "deap_loto_validation"};
}

/// Per-dataset recipes for the leave-one-subject-out protocol: the crop,
/// channel-drop, band-pass and notch columns of the published table, then
/// resampling to 128 Hz and 4 s windows without overlap.
/// `deap_loto_validation` is the separate leave-one-trial-out DEAP recipe.
inline TransformSpec preset(std::string_view name) {
  const std::vector<std::string> deap_aux = {"EXG1", "EXG2", "EXG3", "EXG4",
                                             "GSR1", "Plet", "Resp", "Temp"};
  const BandpassSpec broadband{0.3, 45.0, kDefaultBandpassOrder};
  const NotchSpec mains{50.0, kDefaultNotchQ};
  const ResampleSpec to128{128.0};
  const WindowSpec win{4.0, 0.0};
  const std::string key = to_lower(name);

  if (key == "mahnob_hci" || key == "mahnob-hci") {
    return {{CropSpec{30.0, 30.0},
             ChannelDropSpec{{"EXG1", "EXG2", "EXG3", "EXG4", "EXG5", "EXG6", "EXG7", "EXG8",
                              "GSR1", "GSR2", "Erg1", "Erg2", "Resp", "Temp", "Status"}},
             broadband, mains, to128, win}};
  }
  if (key == "deap") {
    return {{CropSpec{3.0, 0.0}, ChannelDropSpec{deap_aux}, mains, to128, win}};
  }
  if (key == "amigos") {
    return {{ChannelDropSpec{{"ECG_Right", "ECG_Left", "GSR"}}, mains, to128, win}};
  }
  if (key == "dreamer" || key == "seed" || key == "seed_iv" || key == "seed-iv") {
    return {{broadband, mains, to128, win}};
  }
  if (key == "deap_loto_validation") {
    auto dropped = deap_aux;
    for (const char* c : {"Oz", "Pz", "Fz", "Cz"}) dropped.emplace_back(c);
    return {{CropSpec{3.0, 0.0}, ChannelDropSpec{dropped}, to128,
             BandpassSpec{4.0, 45.0, kDefaultBandpassOrder}, win}};
  }
  fail(ErrorKind::data, "unknown transform preset '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// JSON mapping

inline void to_json(nlohmann::json& j, const TransformStep& step) {
  j = nlohmann::json{{"type", step_name(step)}};
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CropSpec>) {
          j["pre_s"] = s.pre_s;
          j["post_s"] = s.post_s;
        } else if constexpr (std::is_same_v<T, ChannelDropSpec>) {
          j["names"] = s.names;
        } else if constexpr (std::is_same_v<T, NotchSpec>) {
          j["f0_hz"] = s.f0_hz;
          j["q"] = s.q;
        } else if constexpr (std::is_same_v<T, BandpassSpec>) {
          j["lo_hz"] = s.lo_hz;
          j["hi_hz"] = s.hi_hz;
          j["order"] = s.order;
        } else if constexpr (std::is_same_v<T, ResampleSpec>) {
          j["fs_out_hz"] = s.fs_out_hz;
        } else if constexpr (std::is_same_v<T, NormalizeSpec>) {
          j["method"] = s.method == NormalizeMethod::zscore ? "zscore" : "minmax";
        } else {
          j["size_s"] = s.size_s;
          j["overlap_s"] = s.overlap_s;
        }
      },
      step);
}

inline void from_json(const nlohmann::json& j, TransformStep& step) {
  const auto type = j.at("type").get<std::string>();
  if (type == "crop") {
    step = CropSpec{j.value("pre_s", 0.0), j.value("post_s", 0.0)};
  } else if (type == "drop_channels") {
    step = ChannelDropSpec{j.value("names", std::vector<std::string>{})};
  } else if (type == "notch") {
    step = NotchSpec{j.at("f0_hz").get<double>(), j.value("q", kDefaultNotchQ)};
  } else if (type == "bandpass") {
    step = BandpassSpec{j.at("lo_hz").get<double>(), j.at("hi_hz").get<double>(),
                        j.value("order", kDefaultBandpassOrder)};
  } else if (type == "resample") {
    step = ResampleSpec{j.at("fs_out_hz").get<double>()};
  } else if (type == "normalize") {
    const auto method = j.value("method", std::string("zscore"));
    if (method == "zscore") {
      step = NormalizeSpec{NormalizeMethod::zscore};
    } else if (method == "minmax") {
      step = NormalizeSpec{NormalizeMethod::minmax};
    } else {
      fail(ErrorKind::data, "unknown normalize method '" + method + "'");
    }
  } else if (type == "window") {
    step = WindowSpec{j.at("size_s").get<double>(), j.value("overlap_s", 0.0)};
  } else {
    fail(ErrorKind::data, "unknown transform step type '" + type + "'");
  }
}

inline void to_json(nlohmann::json& j, const TransformSpec& spec) {
  j = nlohmann::json::array();
  for (const auto& step : spec.steps) j.push_back(step);
}

inline void from_json(const nlohmann::json& j, TransformSpec& spec) {
  spec.steps = j.get<std::vector<TransformStep>>();
}

}  // namespace eegain
