#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "eegain/dsp/iir.hpp"
#include "eegain/rng.hpp"
#include "eegain/transform.hpp"
#include "support.hpp"

using namespace eegain;
using eegain::test::fit_sine;
using eegain::test::rms;
using eegain::test::tone;

namespace {

SignalBlock block(std::vector<std::vector<double>> data, double fs,
                  std::vector<std::string> names = {}) {
  SignalBlock s;
  if (names.empty())
    for (std::size_t c = 0; c < data.size(); ++c) names.push_back("C" + std::to_string(c));
  s.channels = std::move(names);
  s.data = std::move(data);
  s.sampling_rate_hz = fs;
  return s;
}

}  // namespace

TEST(Crop, RemovesRoundedSampleCountsAtEachEnd) {
  std::vector<double> x(1000);
  std::iota(x.begin(), x.end(), 0.0);
  const auto out = crop(block({x}, 100.0), 1.0, 2.5);
  ASSERT_EQ(out.n_samples(), 1000u - 100u - 250u);
  EXPECT_EQ(out.data[0].front(), 100.0);
  EXPECT_EQ(out.data[0].back(), 749.0);
  EXPECT_THROW(crop(block({x}, 100.0), 5.0, 5.0), Error);
  EXPECT_THROW(crop(block({x}, 100.0), -1.0, 0.0), Error);
}

TEST(DropChannels, KeepsOrderAndRejectsUnknownNames) {
  const auto s = block({{1}, {2}, {3}}, 128.0, {"Fp1", "EXG1", "Cz"});
  const auto out = drop_channels(s, {"EXG1"});
  EXPECT_EQ(out.channels, (std::vector<std::string>{"Fp1", "Cz"}));
  EXPECT_EQ(out.data[1][0], 3.0);
  EXPECT_THROW(drop_channels(s, {"Status"}), Error);
}

// Tone gains are measured in steady state: the first and last
// significant_length samples (impulse response decayed to 1e-3) are skipped.
// Edge transients of forward-backward filtering are covered separately.

TEST(Notch, RemovesMainsAndKeepsAlphaAtCommonRates) {
  for (double fs : {128.0, 256.0, 512.0}) {
    const std::size_t n = static_cast<std::size_t>(10 * fs);
    const auto skip = dsp::significant_length(dsp::design_notch(50.0, kDefaultNotchQ, fs));
    const auto mains = notch_filter(block({tone(50.0, fs, n)}, fs), 50.0);
    EXPECT_LE(rms(mains.data[0], skip) / rms(tone(50.0, fs, n), skip), 0.01) << fs;
    const auto alpha = notch_filter(block({tone(10.0, fs, n)}, fs), 50.0);
    EXPECT_NEAR(rms(alpha.data[0], skip) / rms(tone(10.0, fs, n), skip), 1.0, 0.01) << fs;
  }
}

TEST(Bandpass, AttenuatesStopbandAndPassesAlpha) {
  const double fs = 256.0;
  const std::size_t n = 60 * 256;
  const auto skip = dsp::significant_length(dsp::design_butterworth_bandpass(0.3, 45.0, 4, fs));
  ASSERT_LT(2 * skip, n);
  const auto hi = bandpass_butterworth(block({tone(90.0, fs, n)}, fs), 0.3, 45.0, 4);
  EXPECT_LE(20.0 * std::log10(rms(hi.data[0], skip) / rms(tone(90.0, fs, n), skip)), -20.0);
  const auto mid = bandpass_butterworth(block({tone(10.0, fs, n)}, fs), 0.3, 45.0, 4);
  EXPECT_NEAR(rms(mid.data[0], skip) / rms(tone(10.0, fs, n), skip), 1.0, 0.02);
  const auto dc = bandpass_butterworth(block({std::vector<double>(n, 5.0)}, fs), 0.3, 45.0, 4);
  EXPECT_LT(rms(dc.data[0], skip), 0.05);

  const double fs2 = 128.0;
  const std::size_t n2 = 60 * 128;
  const auto skip2 = dsp::significant_length(dsp::design_butterworth_bandpass(0.3, 45.0, 4, fs2));
  const auto alpha = bandpass_butterworth(block({tone(10.0, fs2, n2)}, fs2), 0.3, 45.0, 4);
  EXPECT_NEAR(rms(alpha.data[0], skip2) / rms(tone(10.0, fs2, n2), skip2), 1.0, 0.02);
}

TEST(Filtfilt, EdgeTransientsStayBounded) {
  // Whole-signal output of a stop-band tone, edges included, never exceeds
  // the input amplitude and concentrates within the settling length.
  const double fs = 256.0;
  const auto sos = dsp::design_notch(50.0, kDefaultNotchQ, fs);
  const auto skip = dsp::significant_length(sos);
  const auto x = tone(50.0, fs, 2560, 1.0, 0.7);
  const auto y = dsp::filtfilt(sos, x);
  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::abs(v));
  EXPECT_LT(peak, 2.0);
  double edge = 0.0, total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    total += y[i] * y[i];
    if (i < skip || i + skip >= y.size()) edge += y[i] * y[i];
  }
  EXPECT_GT(edge / total, 0.99);
}

TEST(Resample, TonesSurviveCommonRateConversions) {
  for (double fs : {512.0, 256.0, 200.0, 1000.0}) {
    const auto n = static_cast<std::size_t>(20 * fs);
    const auto out = resample(block({tone(10.0, fs, n, 2.0)}, fs), 128.0);
    EXPECT_EQ(out.sampling_rate_hz, 128.0);
    EXPECT_EQ(out.n_samples(), 2560u);
    const auto fit = fit_sine(out.data[0], 10.0, 128.0, 64);
    EXPECT_NEAR(fit.amplitude / 2.0, 1.0, 0.01) << fs;
    EXPECT_LT(fit.residual_rms, 0.01) << fs;
  }
}

TEST(Resample, SameRateIsIdentity) {
  const auto s = block({tone(10.0, 128.0, 300)}, 128.0);
  EXPECT_EQ(resample(s, 128.0), s);
}

TEST(Normalize, ZscoreAndMinmax) {
  Rng rng(1);
  std::vector<double> x(500);
  for (auto& v : x) v = 3.0 + 2.0 * rng.normal();
  const auto z = normalize(block({x, std::vector<double>(500, 7.0)}, 128.0), NormalizeMethod::zscore);
  double mean = 0, ss = 0;
  for (double v : z.data[0]) mean += v;
  mean /= 500.0;
  for (double v : z.data[0]) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(ss / 500.0, 1.0, 1e-12);
  for (double v : z.data[1]) EXPECT_EQ(v, 0.0);

  const auto m = normalize(block({x}, 128.0), NormalizeMethod::minmax);
  EXPECT_EQ(*std::min_element(m.data[0].begin(), m.data[0].end()), 0.0);
  EXPECT_EQ(*std::max_element(m.data[0].begin(), m.data[0].end()), 1.0);
}

TEST(Window, SegmentsAreConsecutiveSlices) {
  std::vector<double> x(1280);
  std::iota(x.begin(), x.end(), 0.0);
  const TrialKey key{"s1", "sess1", "t1"};
  const ClassLabel label{1, "high"};
  const auto w = window(block({x, x}, 128.0), 4.0, 1.0, key, label);
  ASSERT_EQ(w.size(), window_count(1280, 512, 384));
  ASSERT_EQ(w.size(), 3u);
  EXPECT_EQ(w[1].window_index, 1);
  EXPECT_EQ(w[1].signal.data[1][0], 384.0);
  EXPECT_EQ(w[1].signal.n_samples(), 512u);
  EXPECT_EQ(w[1].parent, key);
  EXPECT_EQ(w[1].label, label);
}

TEST(Window, CountMatchesClosedFormOnSampleGrid) {
  Rng rng(99);
  for (int rep = 0; rep < 500; ++rep) {
    const double fs = 128.0;
    const int size_n = 1 + static_cast<int>(rng.uniform_index(1024));
    const int overlap_n = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(size_n)));
    const int dur_n = size_n + static_cast<int>(rng.uniform_index(4096));
    const auto w = window(block({std::vector<double>(static_cast<std::size_t>(dur_n))}, fs),
                          size_n / fs, overlap_n / fs);
    const int step = size_n - overlap_n;
    EXPECT_EQ(static_cast<int>(w.size()), (dur_n - size_n) / step + 1);
  }
}

TEST(Window, RejectsBadGeometry) {
  const auto s = block({std::vector<double>(100)}, 128.0);
  EXPECT_THROW(window(s, 4.0, 0.0), Error);  // longer than the trial
  EXPECT_THROW(window(s, 0.5, 0.5), Error);
  EXPECT_THROW(window(s, 0.5, -0.1), Error);
}

TEST(Pipeline, MahnobRecipeOnTwoMinuteTrial) {
  const double fs = 256.0;
  std::vector<std::string> names = {"Fp1", "Fz", "Cz", "Pz"};
  for (const char* aux : {"EXG1", "EXG2", "EXG3", "EXG4", "EXG5", "EXG6", "EXG7", "EXG8", "GSR1",
                          "GSR2", "Erg1", "Erg2", "Resp", "Temp", "Status"})
    names.emplace_back(aux);
  std::vector<std::vector<double>> data(names.size(), tone(10.0, fs, 120 * 256));
  const auto w = apply_pipeline(block(data, fs, names), {}, {}, preset("mahnob_hci"));
  // 120 s - 60 s cropped = 60 s; floor((60 - 4) / 4) + 1 windows.
  ASSERT_EQ(w.size(), 15u);
  for (const auto& seg : w) {
    EXPECT_EQ(seg.signal.n_samples(), 512u);
    EXPECT_EQ(seg.signal.n_channels(), 4u);
    EXPECT_EQ(seg.signal.sampling_rate_hz, 128.0);
  }
}

TEST(Pipeline, WithoutWindowStepYieldsWholeTrial) {
  const auto s = block({tone(10.0, 128.0, 640)}, 128.0);
  const auto out = apply_pipeline(s, {"a", "b", "c"}, {0, "low"}, {{CropSpec{1.0, 0.0}}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].signal.n_samples(), 512u);
  EXPECT_EQ(out[0].parent.trial_id, "c");
}

TEST(Pipeline, ErrorsNameTheFailingStep) {
  const auto s = block({std::vector<double>(256)}, 128.0);
  const TransformSpec spec{{CropSpec{0.5, 0.0}, ChannelDropSpec{{"Oz"}}, WindowSpec{1.0, 0.0}}};
  try {
    apply_pipeline(s, {}, {}, spec);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("step 1 (drop_channels)"), std::string::npos) << e.what();
  }
  EXPECT_THROW(check_transform_spec({{WindowSpec{}, CropSpec{}}}), Error);
  EXPECT_THROW(check_transform_spec({{BandpassSpec{4.0, 45.0, 3}}}), Error);
}

TEST(Presets, AllResolveAndRoundTripThroughJson) {
  for (const auto& name : preset_names()) {
    const auto spec = preset(name);
    EXPECT_NO_THROW(check_transform_spec(spec)) << name;
    ASSERT_FALSE(spec.steps.empty());
    EXPECT_TRUE(std::holds_alternative<WindowSpec>(spec.steps.back())) << name;
    const nlohmann::json j = spec;
    EXPECT_EQ(j.get<TransformSpec>(), spec) << name;
  }
  EXPECT_THROW(preset("bogus"), Error);
}

TEST(Presets, TableColumnsAreTranscribed) {
  const auto deap = preset("deap");
  EXPECT_EQ(std::get<CropSpec>(deap.steps[0]), (CropSpec{3.0, 0.0}));
  EXPECT_EQ(std::get<ChannelDropSpec>(deap.steps[1]).names.size(), 8u);
  EXPECT_EQ(std::get<NotchSpec>(deap.steps[2]).f0_hz, 50.0);
  const auto dreamer = preset("dreamer");
  EXPECT_EQ(std::get<BandpassSpec>(dreamer.steps[0]), (BandpassSpec{0.3, 45.0, 4}));
  const auto amigos = preset("amigos");
  EXPECT_EQ(std::get<ChannelDropSpec>(amigos.steps[0]).names,
            (std::vector<std::string>{"ECG_Right", "ECG_Left", "GSR"}));
  for (const auto& name : preset_names()) {
    EXPECT_EQ(std::get<WindowSpec>(preset(name).steps.back()), (WindowSpec{4.0, 0.0}));
  }
}

TEST(StepJson, UnknownTypeIsDataError) {
  try {
    nlohmann::json{{"type", "wavelet"}}.get<TransformStep>();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
}
