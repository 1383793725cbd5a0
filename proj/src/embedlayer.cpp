#include "hdproto/embedlayer.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "hdproto/error.hpp"
#include "hdproto/kernels.hpp"

namespace hdp {
namespace {

void check_pair_shapes(const EmbedLayer& layer, const Matrix& targets, const Matrix& activations) {
  if (targets.rows() != activations.rows()) {
    raise(Errc::DimensionMismatch, "targets and activations differ in class count");
  }
  if (targets.rows() == 0) raise(Errc::EmptyInput, "no classes to align");
  if (targets.cols() != layer.out_dim() || activations.cols() != layer.in_dim()) {
    raise(Errc::DimensionMismatch, "targets/activations do not match layer shape");
  }
}

}  // namespace

void RetrainConfig::validate() const {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    raise(Errc::InvalidArgument, "retrain rate must be finite and non-negative");
  }
}

EmbedLayer::EmbedLayer(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() == 0 || weights_.cols() == 0) {
    raise(Errc::InvalidArgument, "embed layer needs positive dimensions");
  }
  require_finite(weights_.flat(), "embed layer weights");
}

EmbedLayer EmbedLayer::random(std::size_t out_dim, std::size_t in_dim, std::uint32_t seed) {
  if (out_dim == 0 || in_dim == 0) raise(Errc::InvalidArgument, "embed layer needs positive dimensions");
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(in_dim)));
  Matrix w(out_dim, in_dim);
  for (double& x : w.flat()) x = dist(gen);
  return EmbedLayer(std::move(w));
}

EmbedLayer EmbedLayer::identity(std::size_t n) { return EmbedLayer(Matrix::identity(n)); }

RealVec EmbedLayer::forward(VecView features) const {
  if (features.size() != in_dim()) {
    raise(Errc::DimensionMismatch, "feature dim " + std::to_string(features.size()) +
                                       " != layer input dim " + std::to_string(in_dim()));
  }
  RealVec out(out_dim());
  kernels::active().gemv(weights_.flat().data(), out_dim(), in_dim(), features.data(), out.data());
  return out;
}

Matrix EmbedLayer::forward_rows(const Matrix& features) const {
  if (features.rows() != 0 && features.cols() != in_dim()) {
    raise(Errc::DimensionMismatch, "feature dim " + std::to_string(features.cols()) +
                                       " != layer input dim " + std::to_string(in_dim()));
  }
  Matrix out(features.rows(), out_dim());
  const auto& k = kernels::active();
  // Weight row outer, sample inner: one weight row stays hot across samples.
  for (std::size_t r = 0; r < out_dim(); ++r) {
    const double* w = weights_.row(r).data();
    for (std::size_t i = 0; i < features.rows(); ++i) {
      out(i, r) = k.dot(w, features.row(i).data(), in_dim());
    }
  }
  return out;
}

namespace {

// Loss value and, when grad is non-null, its gradient from one forward pass.
double evaluate_lf(const Matrix& weights, const Matrix& squashed_targets,
                   const Matrix& activations, Matrix* grad) {
  const std::size_t d = weights.rows();
  const std::size_t in = weights.cols();
  const auto& k = kernels::active();

  Matrix z(activations.rows(), d);
  for (std::size_t r = 0; r < d; ++r) {
    const double* w = weights.row(r).data();
    for (std::size_t i = 0; i < activations.rows(); ++i) {
      z(i, r) = k.dot(w, activations.row(i).data(), in);
    }
  }
  for (double v : z.flat()) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
  }

  double loss = 0.0;
  // dz[i] = d loss / d z_i = -(d cos / d t_i) * (1 - t_i^2), t_i = tanh(z_i)
  Matrix dz(grad ? activations.rows() : 0, d);
  RealVec dcos(d);
  for (std::size_t i = 0; i < activations.rows(); ++i) {
    const RealVec t = tanh_elem(z.row(i));
    const VecView q = squashed_targets.row(i);
    if (!grad) {
      loss -= cosine(q, t);
      continue;
    }
    loss -= cosine_grad(t, q, dcos);
    auto out = dz.row(i);
    for (std::size_t r = 0; r < d; ++r) out[r] = -dcos[r] * (1.0 - t[r] * t[r]);
  }

  if (grad) {
    // grad = sum_i dz_i a_i^T
    *grad = Matrix(d, in);
    for (std::size_t r = 0; r < d; ++r) {
      double* g = grad->row(r).data();
      for (std::size_t i = 0; i < activations.rows(); ++i) {
        k.axpy(dz(i, r), activations.row(i).data(), g, in);
      }
    }
  }
  return loss;
}

Matrix squash_rows(const Matrix& m) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const RealVec t = tanh_elem(m.row(i));
    std::copy(t.begin(), t.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

double loss_lf(const EmbedLayer& layer, const Matrix& targets, const Matrix& activations) {
  check_pair_shapes(layer, targets, activations);
  const double loss = evaluate_lf(layer.weights(), squash_rows(targets), activations, nullptr);
  if (!std::isfinite(loss)) raise(Errc::NonFiniteLoss, "alignment loss overflowed");
  return loss;
}

Matrix grad_lf(const EmbedLayer& layer, const Matrix& targets, const Matrix& activations) {
  check_pair_shapes(layer, targets, activations);
  Matrix grad;
  const double loss = evaluate_lf(layer.weights(), squash_rows(targets), activations, &grad);
  if (!std::isfinite(loss)) raise(Errc::NonFiniteLoss, "alignment loss overflowed");
  return grad;
}

RetrainResult retrain(EmbedLayer layer, const Matrix& targets, const Matrix& activations,
                      const RetrainConfig& cfg) {
  cfg.validate();
  check_pair_shapes(layer, targets, activations);
  const Matrix squashed = squash_rows(targets);

  RetrainResult result;
  result.trace.reserve(cfg.iterations + 1);
  if (cfg.iterations == 0 || cfg.rate == 0.0) {
    const double loss = evaluate_lf(layer.weights(), squashed, activations, nullptr);
    result.trace.assign(cfg.iterations + 1, loss);
    result.layer = std::move(layer);
    return result;
  }

  Matrix weights = layer.weights();
  Matrix grad;
  for (std::size_t step = 0; step < cfg.iterations; ++step) {
    const double loss = evaluate_lf(weights, squashed, activations, &grad);
    if (!std::isfinite(loss)) {
      raise(Errc::NonFiniteLoss, "retrain loss not finite at step " + std::to_string(step));
    }
    result.trace.push_back(loss);
    kernels::active().axpy(-cfg.rate, grad.flat().data(), weights.flat().data(),
                           weights.flat().size());
    for (double w : weights.flat()) {
      if (!std::isfinite(w)) raise(Errc::NonFiniteLoss, "retrain diverged at step " + std::to_string(step));
    }
  }
  const double final_loss = evaluate_lf(weights, squashed, activations, nullptr);
  if (!std::isfinite(final_loss)) {
    raise(Errc::NonFiniteLoss, "retrain loss not finite after the last step");
  }
  result.trace.push_back(final_loss);
  result.layer = EmbedLayer(std::move(weights));
  return result;
}

Matrix regenerate_prototypes(const EmbedLayer& layer, const Matrix& activations) {
  if (activations.rows() == 0) raise(Errc::EmptyInput, "no activations to regenerate from");
  return layer.forward_rows(activations);
}

double meta_loss_nll(const EmbedLayer& layer, const Matrix& prototypes, VecView query,
                     std::size_t label, const SharpenConfig& cfg, Attention attention) {
  if (label >= prototypes.rows()) {
    raise(Errc::LabelOutOfRange, "label " + std::to_string(label) + " outside " +
                                     std::to_string(prototypes.rows()) + " classes");
  }
  const RealVec embedded = tanh_elem(layer.forward(query));
  RealVec scores(prototypes.rows());
  for (std::size_t i = 0; i < prototypes.rows(); ++i) {
    scores[i] = cosine(embedded, tanh_elem(prototypes.row(i)));
  }
  const RealVec weights = attend(scores, attention, cfg);
  return -std::log(weights[label]);
}

}  // namespace hdp
