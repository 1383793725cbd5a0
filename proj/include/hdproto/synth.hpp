#pragma once

#include <cstddef>
#include <cstdint>

#include "hdproto/experiment.hpp"

namespace hdp {

/// Isotropic Gaussian clusters standing in for extracted features. Labels
/// are 0 .. class_count-1; samples are grouped by class.
struct SynthSpec {
  std::size_t class_count = 100;
  std::size_t d_f = 640;
  double cluster_center_scale = 1.0;  // std-dev of each center coordinate
  double cluster_sigma = 0.1;         // std-dev of samples around their center
  std::size_t shots_train = 20;
  std::size_t shots_eval = 10;
  std::uint32_t seed = 0;

  void validate() const;
};

Dataset generate_synthetic(const SynthSpec& spec);

}  // namespace hdp
