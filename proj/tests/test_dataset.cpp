#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <iterator>

#include "eegain/dataset.hpp"
#include "eegain/dsp/spectrum.hpp"
#include "support.hpp"

using namespace eegain;
using eegain::test::TempDir;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SyntheticSpec small_spec() {
  SyntheticSpec s;
  s.n_subjects = 3;
  s.n_sessions_per_subject = 2;
  s.n_trials_per_session = 5;
  s.n_channels = 3;
  s.n_peripheral_channels = 1;
  s.trial_length_s = 4.0;
  s.seed = 42;
  return s;
}

}  // namespace

TEST(Manifest, SaveLoadRoundTrip) {
  TempDir dir("manifest");
  auto m = test::make_manifest({3, 2}, 2);
  m.label_schema = LabelSchema::both;
  m.categorical_classes = std::vector<std::string>{"a", "b"};
  m.subjects[0].sessions[0].trials[0].label.categorical = "a";
  save_manifest(m, dir.path());
  const auto loaded = load_manifest(dir.path());
  EXPECT_EQ(loaded, m);
  EXPECT_EQ(loaded.root, dir.path());
  EXPECT_EQ(load_manifest(dir / "manifest.json"), m);
}

TEST(Manifest, MissingFileIsIoError) {
  TempDir dir("manifest");
  try {
    load_manifest(dir / "nope.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

TEST(Manifest, MalformedJsonIsDataErrorNamingFile) {
  TempDir dir("manifest");
  std::ofstream(dir / "manifest.json") << "{\"schema_version\": 1,";
  try {
    load_manifest(dir.path());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
    EXPECT_NE(std::string(e.what()).find("manifest.json"), std::string::npos);
  }
}

TEST(Manifest, InvariantViolationsAreRejected) {
  auto expect_bad = [](DatasetManifest m) { EXPECT_THROW(check_manifest(m), Error); };
  auto m = test::make_manifest({2, 2});
  EXPECT_NO_THROW(check_manifest(m));

  auto dup = m;
  dup.subjects[1].subject_id = dup.subjects[0].subject_id;
  expect_bad(dup);
  auto dup_trial = m;
  dup_trial.subjects[0].sessions[0].trials[1].trial_id = "t1";
  expect_bad(dup_trial);
  auto escape = m;
  escape.subjects[0].sessions[0].trials[0].signal_path = "../outside.f32raw";
  expect_bad(escape);
  auto absolute = m;
  absolute.subjects[0].sessions[0].trials[0].signal_path = "/etc/passwd";
  expect_bad(absolute);
  auto rate = m;
  rate.sampling_rate_hz = 0.0;
  expect_bad(rate);
  auto no_channels = m;
  no_channels.channels.clear();
  expect_bad(no_channels);
  auto categorical = m;
  categorical.label_schema = LabelSchema::categorical;
  expect_bad(categorical);
  auto version = m;
  version.schema_version = 2;
  expect_bad(version);
}

TEST(SignalFile, WriteReadRoundTripAtFloat32Precision) {
  TempDir dir("signal");
  auto m = test::make_manifest({1});
  m.channels = {{"A", ChannelKind::eeg}, {"B", ChannelKind::eeg}};
  m.root = dir.path();
  auto& trial = m.subjects[0].sessions[0].trials[0];
  trial.n_samples = 100;
  SignalBlock s;
  s.channels = {"A", "B"};
  s.sampling_rate_hz = 128.0;
  s.data.assign(2, std::vector<double>(100));
  for (std::size_t i = 0; i < 100; ++i) {
    s.data[0][i] = 0.1 * double(i) - 3.0;
    s.data[1][i] = std::sin(double(i));
  }
  write_signal_file(dir / trial.signal_path, s);
  EXPECT_EQ(fs::file_size(dir / trial.signal_path), 2u * 100u * 4u);
  const auto back = read_trial_signal(m, "s1", "sess1", "t1");
  ASSERT_EQ(back.n_channels(), 2u);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t i = 0; i < 100; ++i)
      EXPECT_EQ(back.data[c][i], double(static_cast<float>(s.data[c][i])));
  // Little-endian channel-major layout: first word is channel A sample 0.
  const auto bytes = slurp(dir / trial.signal_path);
  const float first = -3.0f;
  const auto bits = std::bit_cast<std::uint32_t>(first);
  EXPECT_EQ(static_cast<unsigned char>(bytes[0]), bits & 0xffu);
  EXPECT_EQ(static_cast<unsigned char>(bytes[3]), bits >> 24);
}

TEST(SignalFile, LengthMismatchAndUnknownIds) {
  TempDir dir("signal");
  auto m = test::make_manifest({1});
  m.root = dir.path();
  const auto& trial = m.subjects[0].sessions[0].trials[0];
  fs::create_directories((dir / trial.signal_path).parent_path());
  std::ofstream(dir / trial.signal_path, std::ios::binary) << std::string(100, '\0');
  try {
    read_trial_signal(m, "s1", "sess1", "t1");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
  EXPECT_THROW(read_trial_signal(m, "s9", "sess1", "t1"), Error);
  EXPECT_THROW(read_trial_signal(m, "s1", "sess9", "t1"), Error);
  EXPECT_THROW(read_trial_signal(m, "s1", "sess1", "t99"), Error);
}

TEST(Validate, ReportsEachProblemAsFinding) {
  TempDir dir("validate");
  auto m = generate_synthetic(small_spec(), dir.path());
  EXPECT_TRUE(validate_manifest(m).ok());
  EXPECT_EQ(validate_manifest(m).trials_checked, 30u);

  const auto& t0 = m.subjects[0].sessions[0].trials[0];
  fs::resize_file(dir / t0.signal_path, 10);
  fs::remove(dir / m.subjects[1].sessions[0].trials[2].signal_path);
  m.subjects[2].sessions[1].trials[0].label.dimensional["valence"] = 12.0;
  const auto report = validate_manifest(m);
  ASSERT_EQ(report.findings.size(), 3u);
  EXPECT_EQ(report.findings[0].kind, FindingKind::size_mismatch);
  EXPECT_EQ(report.findings[0].trial.str(), "s01/sess01/t01");
  EXPECT_EQ(report.findings[1].kind, FindingKind::missing_file);
  EXPECT_EQ(report.findings[2].kind, FindingKind::rating_out_of_scale);
}

TEST(Summary, CountsMatchBruteForceIteration) {
  Rng rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<int> per_subject(1 + rng.uniform_index(8));
    for (auto& n : per_subject) n = 1 + static_cast<int>(rng.uniform_index(12));
    const int sessions = 1 + static_cast<int>(rng.uniform_index(3));
    const auto m = test::make_manifest(per_subject, sessions);
    const auto s = dataset_summary(m, GroundTruthScheme{});
    std::size_t trials = 0, high = 0;
    std::int64_t samples = 0;
    for (const auto& subj : m.subjects)
      for (const auto& se : subj.sessions)
        for (const auto& t : se.trials) {
          ++trials;
          samples += t.n_samples;
          high += t.label.dimensional.at("valence") > 4.5;
        }
    EXPECT_EQ(s.n_subjects, per_subject.size());
    EXPECT_EQ(s.n_trials, trials);
    EXPECT_DOUBLE_EQ(s.total_trial_seconds, double(samples) / 128.0);
    ASSERT_TRUE(s.class_distribution);
    EXPECT_EQ(static_cast<std::size_t>(s.class_distribution->counts[1]), high);
    for (std::size_t i = 0; i < per_subject.size(); ++i)
      EXPECT_EQ(s.trials_per_subject[i].second, std::size_t(per_subject[i] * sessions));
  }
}

TEST(Synthetic, LayoutAndLabels) {
  TempDir dir("synth");
  const auto m = generate_synthetic(small_spec(), dir.path());
  EXPECT_EQ(m.subjects.size(), 3u);
  EXPECT_EQ(m.n_trials(), 30u);
  ASSERT_EQ(m.channels.size(), 4u);
  EXPECT_EQ(m.channels[0].name, "Fp1");
  EXPECT_EQ(m.channels[3].name, "EXG1");
  EXPECT_EQ(m.channels[3].kind, ChannelKind::peripheral);
  EXPECT_EQ(m.subjects[0].subject_id, "s01");
  EXPECT_EQ(load_manifest(dir.path()), m);
  for_each_trial(m, [](const auto&, const auto&, const TrialRecord& t) {
    EXPECT_EQ(t.n_samples, 512);
    const double v = t.label.dimensional.at("valence");
    EXPECT_EQ(v, std::round(v));
    EXPECT_NE(v, 4.5);
  });
}

TEST(Synthetic, ByteIdenticalAcrossRuns) {
  TempDir a("synth"), b("synth");
  generate_synthetic(small_spec(), a.path());
  generate_synthetic(small_spec(), b.path());
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a.path())) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), a.path());
    EXPECT_EQ(slurp(e.path()), slurp(b.path() / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 31u);
  auto other = small_spec();
  other.seed = 43;
  TempDir c("synth");
  generate_synthetic(other, c.path());
  EXPECT_NE(slurp(a / "s01/sess01/t01.f32raw"), slurp(c / "s01/sess01/t01.f32raw"));
}

TEST(Synthetic, HighClassCarriesMoreAlphaPower) {
  TempDir dir("synth");
  auto spec = small_spec();
  spec.n_peripheral_channels = 0;
  const auto m = generate_synthetic(spec, dir.path());
  double alpha[2] = {0, 0};
  int count[2] = {0, 0};
  for_each_trial(m, [&](const SubjectRecord& s, const SessionRecord& se, const TrialRecord& t) {
    const int cls = t.label.dimensional.at("valence") > 4.5;
    const auto sig = read_trial_signal(m, s.subject_id, se.session_id, t.trial_id);
    for (const auto& ch : sig.data) {
      const auto p = dsp::periodogram(ch, sig.sampling_rate_hz);
      double band = 0.0;
      for (std::size_t k = 0; k < p.power.size(); ++k) {
        const double f = double(k) * p.bin_hz;
        if (f >= 8.0 && f < 13.0) band += p.power[k] * p.bin_hz;
      }
      alpha[cls] += band;
      ++count[cls];
    }
  });
  ASSERT_GT(count[0], 0);
  ASSERT_GT(count[1], 0);
  // Sinusoid power a^2 / 2: 0.5 for class 0 and 4.5 for class 1, plus noise.
  EXPECT_GT(alpha[1] / count[1], 3.0 * alpha[0] / count[0]);
}

TEST(Synthetic, SpecJsonRoundTripAndChecks) {
  auto s = small_spec();
  s.label_schema = LabelSchema::both;
  s.class_names = {"neg", "pos"};
  EXPECT_EQ(nlohmann::json(s).get<SyntheticSpec>(), s);
  auto bad = s;
  bad.class_effect = {1.0, 2.0, 3.0};
  bad.class_names.clear();
  bad.label_schema = LabelSchema::dimensional;
  EXPECT_THROW(check_synthetic_spec(bad), Error);
  bad = s;
  bad.n_subjects = 0;
  EXPECT_THROW(check_synthetic_spec(bad), Error);
}

TEST(Synthetic, CategoricalSchemaUsesClassNames) {
  TempDir dir("synth");
  auto s = small_spec();
  s.label_schema = LabelSchema::categorical;
  s.class_effect = {1.0, 2.0, 3.0};
  s.class_names = {"negative", "neutral", "positive"};
  const auto m = generate_synthetic(s, dir.path());
  ASSERT_TRUE(m.categorical_classes);
  EXPECT_EQ(*m.categorical_classes, s.class_names);
  for_each_trial(m, [](const auto&, const auto&, const TrialRecord& t) {
    ASSERT_TRUE(t.label.categorical);
    EXPECT_TRUE(t.label.dimensional.empty());
  });
  EXPECT_TRUE(validate_manifest(m).ok());
}
