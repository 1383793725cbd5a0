#include "hdproto/hdvec.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hdproto/error.hpp"
#include "hdproto/kernels.hpp"

namespace hdp {
namespace {

void require_same_dim(VecView a, VecView b) {
  if (a.size() != b.size()) {
    raise(Errc::DimensionMismatch,
          "dimension mismatch: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

void require_nonempty(VecView v, const char* what) {
  if (v.empty()) raise(Errc::EmptyInput, std::string(what) + ": empty input");
}

double sigmoid(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void SharpenConfig::validate() const {
  if (!(stiffness > 0.0) || !(tau > 0.0) || !(alpha > 0.0)) {
    raise(Errc::InvalidArgument, "sharpen config: stiffness, tau and alpha must be positive");
  }
}

void require_finite(VecView v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) raise(Errc::NonFiniteInput, std::string(what) + ": non-finite entry");
  }
}

double norm(VecView v) noexcept { return std::sqrt(kernels::dot(v, v)); }

double cosine(VecView u, VecView v) {
  require_same_dim(u, v);
  require_nonempty(u, "cosine");
  const double nu = norm(u);
  const double nv = norm(v);
  if (!(nu >= kZeroNormThreshold) || !(nv >= kZeroNormThreshold)) {
    raise(Errc::ZeroVector, "cosine of a zero-norm vector");
  }
  return std::clamp(kernels::dot(u, v) / (nu * nv), -1.0, 1.0);
}

double cosine_grad(VecView u, VecView v, std::span<double> grad_u) {
  require_same_dim(u, v);
  const double nu = norm(u);
  const double nv = norm(v);
  if (!(nu >= kZeroNormThreshold) || !(nv >= kZeroNormThreshold)) {
    raise(Errc::ZeroVector, "cosine of a zero-norm vector");
  }
  // Unclamped on purpose: the gradient must be consistent with the value.
  const double c = kernels::dot(u, v) / (nu * nv);
  const double a = 1.0 / (nu * nv);
  const double b = c / (nu * nu);
  for (std::size_t i = 0; i < u.size(); ++i) grad_u[i] = a * v[i] - b * u[i];
  return c;
}

RealVec tanh_elem(VecView v) {
  require_finite(v, "tanh_elem");
  RealVec out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::tanh(x); });
  return out;
}

RealVec bipolarize(VecView v) {
  require_finite(v, "bipolarize");
  RealVec out(v.size());
  std::transform(v.begin(), v.end(), out.begin(), [](double x) { return x < 0.0 ? -1.0 : 1.0; });
  return out;
}

double softabs_sharpen(double c, const SharpenConfig& cfg) noexcept {
  const double beta = cfg.stiffness;
  return sigmoid(beta * (c - 0.5)) + sigmoid(beta * (-c - 0.5));
}

RealVec softabs_attention(VecView scores, const SharpenConfig& cfg) {
  require_nonempty(scores, "softabs_attention");
  require_finite(scores, "softabs_attention");
  RealVec out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = softabs_sharpen(scores[i], cfg);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

RealVec softmax_attention(VecView scores, const SharpenConfig& cfg) {
  require_nonempty(scores, "softmax_attention");
  require_finite(scores, "softmax_attention");
  const double top = *std::max_element(scores.begin(), scores.end());
  RealVec out(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp(cfg.tau * (scores[i] - top));
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

RealVec attend(VecView scores, Attention attention, const SharpenConfig& cfg) {
  return attention == Attention::Softabs ? softabs_attention(scores, cfg)
                                         : softmax_attention(scores, cfg);
}

double nudge_activation(double c, const SharpenConfig& cfg) noexcept {
  return std::exp(cfg.alpha * c) + std::exp(-cfg.alpha * c) - 2.0;
}

double nudge_activation_anticorr(double c, const SharpenConfig& cfg) noexcept {
  return std::exp(cfg.alpha * c) - 1.0;
}

double nudge_activation_slope(double c, const SharpenConfig& cfg) noexcept {
  return cfg.alpha * (std::exp(cfg.alpha * c) - std::exp(-cfg.alpha * c));
}

double nudge_activation_anticorr_slope(double c, const SharpenConfig& cfg) noexcept {
  return cfg.alpha * std::exp(cfg.alpha * c);
}

RealVec circ_convolve(VecView a, VecView b) {
  require_same_dim(a, b);
  require_nonempty(a, "circ_convolve");
  const std::size_t d = a.size();
  // reversed[m] = b[(-m) mod d], stored twice so every output is one dot product
  RealVec reversed(2 * d);
  for (std::size_t m = 0; m < d; ++m) reversed[m] = reversed[m + d] = b[(d - m) % d];
  RealVec out(d);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < d; ++i) out[i] = k.dot(a.data(), reversed.data() + (d - i), d);
  return out;
}

RealVec circ_correlate(VecView a, VecView b) {
  require_same_dim(a, b);
  require_nonempty(a, "circ_correlate");
  const std::size_t d = a.size();
  RealVec doubled(2 * d);
  std::copy(a.begin(), a.end(), doubled.begin());
  std::copy(a.begin(), a.end(), doubled.begin() + static_cast<std::ptrdiff_t>(d));
  RealVec out(d);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < d; ++i) out[i] = k.dot(doubled.data() + i, b.data(), d);
  return out;
}

RealVec key_from_seed(KeySeed seed, std::size_t d) {
  if (d == 0) raise(Errc::InvalidArgument, "key dimension must be positive");
  std::mt19937 gen(seed.value);
  std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  RealVec key(d);
  for (double& x : key) x = dist(gen);
  return key;
}

}  // namespace hdp
