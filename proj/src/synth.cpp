#include "hdproto/synth.hpp"

#include <random>

#include "hdproto/error.hpp"

namespace hdp {

void SynthSpec::validate() const {
  if (class_count == 0 || d_f == 0) raise(Errc::ConfigError, "synth spec needs classes and a dimension");
  if (!(cluster_sigma >= 0.0)) raise(Errc::ConfigError, "synth spec: cluster_sigma must be nonnegative");
  if (!(cluster_center_scale >= 0.0)) raise(Errc::ConfigError, "synth spec: negative center scale");
  if (shots_train == 0) raise(Errc::ConfigError, "synth spec: shots_train must be positive");
}

Dataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 gen(spec.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  Dataset data;
  data.train.features = Matrix(0, spec.d_f);
  data.eval.features = Matrix(0, spec.d_f);
  RealVec center(spec.d_f);
  RealVec sample(spec.d_f);
  auto draw = [&](LabeledFeatures& into, ClassId label) {
    for (std::size_t j = 0; j < spec.d_f; ++j) sample[j] = center[j] + spec.cluster_sigma * unit(gen);
    into.push_back(label, sample);
  };
  for (std::size_t c = 0; c < spec.class_count; ++c) {
    const auto label = static_cast<ClassId>(c);
    for (double& x : center) x = spec.cluster_center_scale * unit(gen);
    for (std::size_t n = 0; n < spec.shots_train; ++n) draw(data.train, label);
    for (std::size_t n = 0; n < spec.shots_eval; ++n) draw(data.eval, label);
  }
  return data;
}

}  // namespace hdp
