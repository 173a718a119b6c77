#include <gtest/gtest.h>

#include <vector>

#include "eegain/labeling.hpp"
#include "eegain/rng.hpp"

using namespace eegain;

TEST(Binarize, ThresholdItselfIsLow) {
  EXPECT_EQ(binarize(4.5, 4.5).index, 0);
  EXPECT_EQ(binarize(4.5000001, 4.5).index, 1);
  EXPECT_EQ(binarize(1.0, 4.5).name, "low");
  EXPECT_EQ(binarize(9.0, 4.5).name, "high");
  EXPECT_EQ(binarize(5.0, 5.0).index, 0);
}

TEST(Binarize, RatingOutsideScaleIsDataError) {
  try {
    binarize(9.5, 4.5);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::data);
  }
  EXPECT_THROW(binarize(0.5, 4.5), Error);
  EXPECT_NO_THROW(binarize(0.0, 2.5, {0.0, 5.0}));
}

TEST(Binarize, HighFractionMatchesCountOracle) {
  Rng rng(3);
  std::vector<double> ratings(5000);
  for (auto& r : ratings) r = 1.0 + 0.01 * static_cast<double>(rng.uniform_index(801));
  for (double threshold : {3.0, 4.0, 4.5, 5.0, 7.25}) {
    std::size_t high = 0, oracle = 0;
    for (double r : ratings) {
      high += static_cast<std::size_t>(binarize(r, threshold).index);
      oracle += r > threshold ? 1u : 0u;
    }
    EXPECT_EQ(high, oracle) << threshold;
  }
}

TEST(Quadrantize, IndexEncodesArousalThenValence) {
  EXPECT_EQ(quadrantize(2, 2, 4.5, 4.5).name, "LALV");
  EXPECT_EQ(quadrantize(7, 2, 4.5, 4.5).name, "LAHV");
  EXPECT_EQ(quadrantize(2, 7, 4.5, 4.5).name, "HALV");
  EXPECT_EQ(quadrantize(7, 7, 4.5, 4.5).name, "HAHV");
  EXPECT_EQ(quadrantize(7, 7, 4.5, 4.5).index, 3);
  // Boundary: equal to the threshold is low on both axes.
  EXPECT_EQ(quadrantize(4.5, 4.5, 4.5, 4.5).index, 0);
  // Independent thresholds.
  EXPECT_EQ(quadrantize(4.0, 6.0, 3.0, 6.5).index, 1);
}

TEST(Categorical, CaseInsensitiveLookup) {
  GroundTruthScheme s;
  s.kind = SchemeKind::categorical;
  s.class_names = {"Negative", "neutral", "POSITIVE"};
  EXPECT_EQ(map_categorical("negative", s).index, 0);
  EXPECT_EQ(map_categorical("Positive", s).index, 2);
  EXPECT_EQ(map_categorical("positive", s).name, "POSITIVE");
  EXPECT_THROW(map_categorical("angry", s), Error);
}

TEST(LabelTrial, AppliesSchemeToRecord) {
  LabelRecord r;
  r.dimensional = {{"valence", 6.0}, {"arousal", 3.0}};
  GroundTruthScheme binary;
  EXPECT_EQ(label_trial(r, binary).index, 1);
  binary.dimension = "arousal";
  EXPECT_EQ(label_trial(r, binary).index, 0);
  binary.class_names = {"calm", "excited"};
  EXPECT_EQ(label_trial(r, binary).name, "calm");
  binary.dimension = "dominance";
  EXPECT_THROW(label_trial(r, binary), Error);

  GroundTruthScheme quad;
  quad.kind = SchemeKind::dimensional_quadrant;
  quad.class_names = quadrant_class_names();
  EXPECT_EQ(label_trial(r, quad).name, "LAHV");

  GroundTruthScheme cat;
  cat.kind = SchemeKind::categorical;
  cat.class_names = {"sad", "happy"};
  EXPECT_THROW(label_trial(r, cat), Error);
  r.categorical = "Happy";
  EXPECT_EQ(label_trial(r, cat).index, 1);
}

TEST(LabelTrial, UsesRecordScale) {
  LabelRecord r;
  r.dimensional = {{"valence", 4.0}};
  r.scale_min = 1.0;
  r.scale_max = 5.0;
  GroundTruthScheme s;
  s.threshold = 3.0;
  EXPECT_EQ(label_trial(r, s).index, 1);
  r.dimensional["valence"] = 6.0;
  EXPECT_THROW(label_trial(r, s), Error);
}

TEST(CheckScheme, StructuralRules) {
  GroundTruthScheme s;
  EXPECT_NO_THROW(check_scheme(s));
  s.class_names = {"a", "b", "c"};
  EXPECT_THROW(check_scheme(s), Error);
  s.kind = SchemeKind::dimensional_quadrant;
  EXPECT_THROW(check_scheme(s), Error);
  s.class_names = quadrant_class_names();
  EXPECT_NO_THROW(check_scheme(s));
  s.kind = SchemeKind::categorical;
  s.class_names.clear();
  EXPECT_THROW(check_scheme(s), Error);

  GroundTruthScheme t;
  t.threshold = 10.0;
  EXPECT_THROW(check_scheme(t, RatingScale{1.0, 9.0}), Error);
  t.threshold = 3.0;
  EXPECT_NO_THROW(check_scheme(t, RatingScale{1.0, 5.0}));
}

TEST(ClassDistribution, CountsMatchBruteForce) {
  Rng rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const std::size_t k = 2 + rng.uniform_index(4);
    std::vector<int> labels(1 + rng.uniform_index(200));
    for (auto& l : labels) l = static_cast<int>(rng.uniform_index(k));
    const auto d = class_distribution(std::span<const int>(labels), k);
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      std::int64_t n = 0;
      for (int l : labels) n += l == static_cast<int>(c);
      EXPECT_EQ(d.counts[c], n);
      EXPECT_DOUBLE_EQ(d.proportions[c], double(n) / double(labels.size()));
      total += d.proportions[c];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_THROW(class_distribution(std::span<const int>(std::vector<int>{0, 2}), 2), Error);
}

TEST(DefaultScheme, PerDatasetThresholdsAndClasses) {
  EXPECT_DOUBLE_EQ(default_scheme("deap").threshold, 4.5);
  EXPECT_DOUBLE_EQ(default_scheme("AMIGOS").threshold, 4.5);
  EXPECT_DOUBLE_EQ(default_scheme("mahnob_hci").threshold, 4.5);
  EXPECT_DOUBLE_EQ(default_scheme("dreamer").threshold, 3.0);
  EXPECT_EQ(default_scheme("seed").kind, SchemeKind::categorical);
  EXPECT_EQ(default_scheme("seed").class_names.size(), 3u);
  EXPECT_EQ(default_scheme("seed_iv").class_names.size(), 4u);
  EXPECT_THROW(default_scheme("unknown"), Error);
}

TEST(SchemeJson, RoundTripsAndFillsDefaults) {
  GroundTruthScheme s;
  s.dimension = "arousal";
  s.threshold = 5.0;
  const nlohmann::json j = s;
  EXPECT_EQ(j.get<GroundTruthScheme>(), s);

  GroundTruthScheme q;
  q.kind = SchemeKind::dimensional_quadrant;
  q.class_names = quadrant_class_names();
  q.valence_threshold = 5.0;
  EXPECT_EQ(nlohmann::json(q).get<GroundTruthScheme>(), q);

  const auto parsed = nlohmann::json{{"kind", "dimensional_quadrant"}}.get<GroundTruthScheme>();
  EXPECT_EQ(parsed.class_names, quadrant_class_names());
  EXPECT_THROW((nlohmann::json{{"kind", "ordinal"}}.get<GroundTruthScheme>()), Error);
}
