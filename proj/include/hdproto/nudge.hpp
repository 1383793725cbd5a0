#pragma once

// Prototype nudging: gradient descent on the sum of a pairwise
// cross-correlation penalty and a pull back toward the starting prototypes.
// Matrices hold one prototype per row.

#include <cstddef>
#include <vector>

#include "hdproto/hdvec.hpp"
#include "hdproto/matrix.hpp"

namespace hdp {

enum class NudgeVariant {
  Symmetric,       // penalize |cos| (pairs pushed toward orthogonality)
  AntiCorrelated,  // penalize cos (pairs pushed toward anti-correlation)
};

struct NudgeConfig {
  std::size_t iterations = 100;
  double rate = 0.01;
  SharpenConfig sharpen;
  NudgeVariant variant = NudgeVariant::Symmetric;
  void validate() const;
};

class NudgeState {
 public:
  explicit NudgeState(Matrix initial) : current_(initial), initial_(std::move(initial)) {}

  const Matrix& current() const noexcept { return current_; }
  const Matrix& initial() const noexcept { return initial_; }
  std::size_t step() const noexcept { return step_; }

  void apply(const Matrix& grad, double rate);

 private:
  Matrix current_;
  const Matrix initial_;
  std::size_t step_ = 0;
};

/// Sum over ordered pairs i != j of the penalty on cos(tanh(k_i), tanh(k_j)).
double loss_lo(const Matrix& prototypes, const NudgeConfig& cfg);

/// -sum_i cos(tanh(k_i), tanh(k0_i))
double loss_lm(const Matrix& prototypes, const Matrix& initial);

/// Gradient of loss_lo + loss_lm with respect to the current prototypes.
Matrix grad_nudge(const NudgeState& state, const NudgeConfig& cfg);

struct NudgeResult {
  Matrix prototypes;
  std::vector<double> trace;  // loss_lo + loss_lm before the first step, then after each
};

NudgeResult run_nudging(const Matrix& initial, const NudgeConfig& cfg);

/// Off-diagonal |cos| statistics between tanh'd prototype rows.
struct CrossTalk {
  double mean_abs = 0.0;
  double max_abs = 0.0;
};

CrossTalk offdiag_cosine(const Matrix& prototypes);

}  // namespace hdp
