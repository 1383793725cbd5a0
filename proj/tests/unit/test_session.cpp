#include <doctest.h>

#include <algorithm>
#include <random>

#include "hdproto/error.hpp"
#include "hdproto/experiment.hpp"
#include "hdproto/session.hpp"
#include "hdproto/synth.hpp"
#include "oracles.hpp"

using namespace hdp;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoError;
}

LabeledFeatures take(const LabeledFeatures& all, ClassId lo, ClassId hi, std::size_t per_class) {
  LabeledFeatures out;
  std::vector<std::size_t> seen(hi, 0);
  for (std::size_t i = 0; i < all.size(); ++i) {
    const ClassId c = all.labels[i];
    if (c < lo || c >= hi || seen[c] >= per_class) continue;
    ++seen[c];
    out.push_back(c, all.features.row(i));
  }
  return out;
}

LabeledFeatures classes_below(const LabeledFeatures& all, ClassId hi) {
  return take(all, 0, hi, all.size());
}

Dataset small_data(std::uint32_t seed, double sigma = 0.1) {
  SynthSpec spec;
  spec.class_count = 20;
  spec.d_f = 32;
  spec.cluster_sigma = sigma;
  spec.shots_train = 8;
  spec.shots_eval = 4;
  spec.seed = seed;
  return generate_synthetic(spec);
}

ModeConfig mode_cfg(Mode m) {
  ModeConfig cfg;
  cfg.mode = m;
  cfg.retrain.iterations = 5;
  cfg.nudge.iterations = 5;
  return cfg;
}

std::vector<double> vec(VecView v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("memory grows by exactly the classes of each session") {
  const Dataset data = small_data(1);
  for (Mode m : {Mode::Averaged, Mode::Bipolarized, Mode::Nudged}) {
    Learner learner(EmbedLayer::random(48, 32, 2), mode_cfg(m));
    learner.run_base_session(classes_below(data.train, 10));
    CHECK(learner.session() == 1);
    CHECK(learner.memory().size() == 10);
    CHECK(learner.gaa_memory().has_value() == (m != Mode::Averaged));
    for (ClassId s = 0; s < 5; ++s) {
      learner.run_incremental_session(take(data.train, 10 + 2 * s, 12 + 2 * s, 3), 3);
      CHECK(learner.memory().size() == 12 + 2 * s);
      if (learner.gaa_memory()) CHECK(learner.gaa_memory()->size() == 12 + 2 * s);
    }
    CHECK(learner.session() == 6);
  }
}

TEST_CASE("one class with one sample stores its embedding") {
  LabeledFeatures one;
  one.push_back(4, RealVec{1, -2, 0.5});
  const EmbedLayer layer = EmbedLayer::random(5, 3, 3);
  Learner learner(layer, ModeConfig{});
  learner.run_base_session(one);
  CHECK(vec(learner.memory().prototypes().row(0)) == layer.forward(RealVec{1, -2, 0.5}));
}

TEST_CASE("incremental session errors") {
  const Dataset data = small_data(4);
  Learner learner(EmbedLayer::random(48, 32, 5), mode_cfg(Mode::Nudged));
  learner.run_base_session(classes_below(data.train, 10));
  CHECK(code_of([&] { learner.run_incremental_session(take(data.train, 9, 12, 3), 3); }) == Errc::DuplicateClass);
  CHECK(code_of([&] { learner.run_incremental_session(take(data.train, 10, 12, 2), 3); }) == Errc::ShotCountMismatch);
  CHECK(learner.memory().size() == 10);
  CHECK(learner.session() == 1);
  CHECK(code_of([&] { learner.run_base_session(classes_below(data.train, 3)); }) == Errc::InvalidArgument);
}

TEST_CASE("retraining modes regenerate every prototype from the current layer") {
  const Dataset data = small_data(6);
  for (Mode m : {Mode::Bipolarized, Mode::Nudged}) {
    Learner learner(EmbedLayer::random(48, 32, 7), mode_cfg(m));
    learner.run_base_session(classes_below(data.train, 10));
    learner.run_incremental_session(take(data.train, 10, 15, 3), 3);
    const Matrix expect = learner.layer().forward_rows(learner.gaa_memory()->activations());
    CHECK(learner.memory().prototypes() == expect);
    CHECK_FALSE(learner.layer() == learner.base_layer());
    CHECK(learner.last_diagnostics().retrain_trace.size() == 6);
    if (m == Mode::Nudged) CHECK(learner.last_diagnostics().nudge_trace.size() == 6);
  }
}

TEST_CASE("reset_fcl retrains from the base-session layer") {
  const Dataset data = small_data(8);
  ModeConfig cfg = mode_cfg(Mode::Bipolarized);
  cfg.reset_fcl = true;
  const EmbedLayer initial = EmbedLayer::random(48, 32, 9);
  Learner learner(initial, cfg);
  learner.run_base_session(classes_below(data.train, 10));
  const EmbedLayer after_base = learner.layer();
  learner.run_incremental_session(take(data.train, 10, 12, 3), 3);
  CHECK(learner.base_layer() == initial);

  const Matrix& acts = learner.gaa_memory()->activations();
  Matrix targets = after_base.forward_rows(acts);
  for (double& x : targets.flat()) x = x < 0 ? -1.0 : 1.0;
  CHECK(learner.layer() == retrain(initial, targets, acts, cfg.retrain).layer);

  cfg.reset_fcl = false;
  Learner carried(initial, cfg);
  carried.run_base_session(classes_below(data.train, 10));
  carried.run_incremental_session(take(data.train, 10, 12, 3), 3);
  CHECK(carried.layer() == retrain(after_base, targets, acts, cfg.retrain).layer);
}

TEST_CASE("degenerate retraining configurations reproduce plain averaging") {
  const Dataset data = small_data(10, 0.6);
  const EmbedLayer layer = EmbedLayer::random(48, 32, 11);
  auto run = [&](ModeConfig cfg) {
    Learner l(layer, cfg);
    l.run_base_session(classes_below(data.train, 10));
    l.run_incremental_session(take(data.train, 10, 15, 3), 3);
    l.run_incremental_session(take(data.train, 15, 20, 3), 3);
    std::vector<ClassId> preds;
    const PrototypeScorer scorer(l.memory());
    for (std::size_t i = 0; i < data.eval.size(); ++i) preds.push_back(scorer.predict(l.layer(), data.eval.features.row(i)));
    return std::make_pair(l.memory(), preds);
  };
  const auto plain = run(ModeConfig{});
  ModeConfig m3;
  m3.mode = Mode::Nudged;
  m3.nudge.iterations = 0;
  m3.retrain.iterations = 0;
  ModeConfig m2;
  m2.mode = Mode::Bipolarized;
  m2.retrain.iterations = 0;
  for (const ModeConfig& cfg : {m2, m3}) {
    const auto got = run(cfg);
    CHECK(got.second == plain.second);
    CHECK(got.first.class_ids() == plain.first.class_ids());
    CHECK(got.first.prototypes() == plain.first.prototypes());
  }
}

TEST_CASE("evaluation") {
  const Dataset data = small_data(12);
  Learner learner(EmbedLayer::random(256, 32, 13), ModeConfig{});
  const LabeledFeatures base = classes_below(data.train, 10);
  learner.run_base_session(base);

  // the support set itself on well separated clusters
  CHECK(learner.evaluate(base).accuracy == 1.0);
  const SessionResult r = learner.evaluate(classes_below(data.eval, 10));
  CHECK(r.session == 1);
  CHECK(r.class_count == 10);
  CHECK(r.accuracy >= 0.99);
  CHECK(r.diagnostics.mean_nll > 0.0);

  CHECK(code_of([&] { learner.evaluate(LabeledFeatures{}); }) == Errc::EmptyEvaluation);
  CHECK(code_of([&] { learner.evaluate(take(data.eval, 10, 11, 1)); }) == Errc::UnknownLabel);
  CHECK(code_of([] { Learner(EmbedLayer::identity(2), ModeConfig{}).evaluate(LabeledFeatures{{0}, Matrix(1, 2, {1, 0})}); }) == Errc::EmptyMemory);
}

TEST_CASE("accuracy does not depend on evaluation order") {
  const Dataset data = small_data(14, 0.8);
  Learner learner(EmbedLayer::random(48, 32, 15), mode_cfg(Mode::Nudged));
  learner.run_base_session(classes_below(data.train, 20));
  const SessionResult ordered = learner.evaluate(data.eval);
  std::vector<std::size_t> perm(data.eval.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::mt19937 gen(16);
  for (int t = 0; t < 3; ++t) {
    std::shuffle(perm.begin(), perm.end(), gen);
    LabeledFeatures shuffled;
    for (std::size_t i : perm) shuffled.push_back(data.eval.labels[i], data.eval.features.row(i));
    const SessionResult r = learner.evaluate(shuffled);
    CHECK(r.accuracy == ordered.accuracy);
    CHECK(r.diagnostics.mean_nll == doctest::Approx(ordered.diagnostics.mean_nll).epsilon(1e-12));
  }
}

TEST_CASE("compressed evaluation uses the decompressed prototypes") {
  const Dataset data = small_data(17);
  ModeConfig cfg;
  cfg.compress_em = true;
  cfg.compression_seed = KeySeed{5};
  Learner learner(EmbedLayer::random(256, 32, 18), cfg);
  learner.run_base_session(classes_below(data.train, 7));
  REQUIRE(learner.compressed().has_value());
  CHECK(learner.compressed()->slot_count() == 4);
  const ExplicitMemory dec = compress(learner.memory(), KeySeed{5}).decompress_all();
  const PrototypeScorer scorer(dec);
  const LabeledFeatures eval = classes_below(data.eval, 7);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < eval.size(); ++i) correct += scorer.predict(learner.layer(), eval.features.row(i)) == eval.labels[i];
  CHECK(learner.evaluate(eval).accuracy == double(correct) / eval.size());
}

TEST_CASE("schedules") {
  CHECK(SessionSchedule::mini_imagenet().class_counts() == std::vector<std::size_t>{60, 65, 70, 75, 80, 85, 90, 95, 100});
  CHECK(SessionSchedule::cifar100().total_classes() == 100);
  const auto omni = SessionSchedule::omniglot().class_counts();
  REQUIRE(omni.size() == 10);
  CHECK(omni.front() == 1200);
  CHECK(omni[1] == 1247);
  CHECK(omni.back() == 1623);
  CHECK_THROWS_AS((SessionSchedule{0, {}}.validate()), Error);
  CHECK_THROWS_AS((SessionSchedule{5, {{0, 5}}}.validate()), Error);
}

TEST_CASE("session split") {
  const Dataset data = small_data(19);
  const SessionSchedule sched{10, {{5, 3}, {5, 2}}};
  const auto splits = split_sessions(data, sched);
  REQUIRE(splits.size() == 3);
  CHECK(splits[0].classes.size() == 10);
  CHECK(splits[0].train.size() == 80);
  CHECK(splits[1].classes == std::vector<ClassId>{10, 11, 12, 13, 14});
  CHECK(splits[1].train.size() == 15);
  CHECK(splits[2].train.size() == 10);
  CHECK(splits[0].eval.size() == 40);
  CHECK(splits[1].eval.size() == 60);
  CHECK(splits[2].eval.size() == 80);
  // first k samples of each class in file order
  CHECK(vec(splits[1].train.features.row(0)) == vec(take(data.train, 10, 11, 1).features.row(0)));
  CHECK_THROWS_AS(split_sessions(data, SessionSchedule{10, {{5, 9}}}), Error);
  CHECK_THROWS_AS(split_sessions(data, SessionSchedule{18, {{5, 1}}}), Error);
}

TEST_CASE("experiments are deterministic and report one row per session") {
  const Dataset data = small_data(20, 0.5);
  const SessionSchedule sched{10, {{5, 3}, {5, 3}}};
  for (Mode m : {Mode::Averaged, Mode::Nudged}) {
    const auto a = run_experiment(data, sched, mode_cfg(m), 48, 21);
    const auto b = run_experiment(data, sched, mode_cfg(m), 48, 21);
    REQUIRE(a.size() == 3);
    for (std::size_t s = 0; s < 3; ++s) {
      CHECK(a[s].session == s + 1);
      CHECK(a[s].class_count == 10 + 5 * s);
      CHECK(a[s].accuracy == b[s].accuracy);
      CHECK(a[s].diagnostics.crosstalk.mean_abs == b[s].diagnostics.crosstalk.mean_abs);
    }
  }
  CHECK(run_experiment(data, SessionSchedule{20, {}}, ModeConfig{}, 48, 1).size() == 1);
}

TEST_CASE("nearest class mean oracle") {
  const Dataset data = small_data(22);
  const auto acc = nearest_mean_accuracy(data, SessionSchedule{10, {{5, 3}, {5, 3}}});
  REQUIRE(acc.size() == 3);
  for (double a : acc) CHECK(a >= 0.99);
}
