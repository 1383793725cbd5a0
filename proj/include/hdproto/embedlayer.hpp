#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hdproto/hdvec.hpp"
#include "hdproto/matrix.hpp"

namespace hdp {

/// Plain gradient descent settings for the embedding layer.
struct RetrainConfig {
  std::size_t iterations = 10;
  double rate = 0.01;
  void validate() const;
};

/// Bias-free linear map from feature space (in_dim) to prototype space
/// (out_dim). Weights are out_dim x in_dim, row-major.
class EmbedLayer {
 public:
  EmbedLayer() = default;
  explicit EmbedLayer(Matrix weights);

  /// Entries i.i.d. normal(0, 1/in_dim).
  static EmbedLayer random(std::size_t out_dim, std::size_t in_dim, std::uint32_t seed);
  static EmbedLayer identity(std::size_t n);

  std::size_t out_dim() const noexcept { return weights_.rows(); }
  std::size_t in_dim() const noexcept { return weights_.cols(); }
  const Matrix& weights() const noexcept { return weights_; }

  RealVec forward(VecView features) const;

  /// Row i of the result is forward(features.row(i)).
  Matrix forward_rows(const Matrix& features) const;

  bool operator==(const EmbedLayer&) const = default;

 private:
  Matrix weights_;
};

// In the functions below targets is C x out_dim and activations is
// C x in_dim, one class per row.

/// -sum_i cos(tanh(target_i), tanh(layer(activation_i)))
double loss_lf(const EmbedLayer& layer, const Matrix& targets, const Matrix& activations);

/// Analytic d loss_lf / d weights, shaped like the weights.
Matrix grad_lf(const EmbedLayer& layer, const Matrix& targets, const Matrix& activations);

struct RetrainResult {
  EmbedLayer layer;
  std::vector<double> trace;  // loss before the first step, then after each step
};

RetrainResult retrain(EmbedLayer layer, const Matrix& targets, const Matrix& activations,
                      const RetrainConfig& cfg);

Matrix regenerate_prototypes(const EmbedLayer& layer, const Matrix& activations);

/// Negative log of the attention mass on class `label` when `query` is
/// scored against the prototype rows.
double meta_loss_nll(const EmbedLayer& layer, const Matrix& prototypes, VecView query,
                     std::size_t label, const SharpenConfig& cfg, Attention attention);

}  // namespace hdp
