#include "hdproto/nudge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hdproto/error.hpp"
#include "hdproto/kernels.hpp"

namespace hdp {
namespace {

// tanh of each row scaled to unit norm, plus the pre-normalization norms.
struct Squashed {
  Matrix tanh_rows;
  Matrix unit;
  RealVec norms;
};

Squashed squash(const Matrix& k) {
  Squashed s{Matrix(k.rows(), k.cols()), Matrix(k.rows(), k.cols()), RealVec(k.rows())};
  for (std::size_t i = 0; i < k.rows(); ++i) {
    const RealVec t = tanh_elem(k.row(i));
    const double n = norm(t);
    if (!(n >= kZeroNormThreshold)) {
      raise(Errc::ZeroVector, "prototype row " + std::to_string(i) + " squashes to zero");
    }
    s.norms[i] = n;
    auto tr = s.tanh_rows.row(i);
    auto ur = s.unit.row(i);
    for (std::size_t j = 0; j < t.size(); ++j) {
      tr[j] = t[j];
      ur[j] = t[j] / n;
    }
  }
  return s;
}

double penalty(double c, const NudgeConfig& cfg) noexcept {
  return cfg.variant == NudgeVariant::Symmetric ? nudge_activation(c, cfg.sharpen)
                                                : nudge_activation_anticorr(c, cfg.sharpen);
}

double penalty_slope(double c, const NudgeConfig& cfg) noexcept {
  return cfg.variant == NudgeVariant::Symmetric ? nudge_activation_slope(c, cfg.sharpen)
                                                : nudge_activation_anticorr_slope(c, cfg.sharpen);
}

// Upper-triangular Gram of unit rows; the lower half mirrors it.
Matrix gram(const Matrix& unit) {
  const std::size_t c = unit.rows();
  Matrix g(c, c);
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < c; ++i) {
    g(i, i) = 1.0;
    for (std::size_t j = i + 1; j < c; ++j) {
      g(i, j) = g(j, i) = k.dot(unit.row(i).data(), unit.row(j).data(), unit.cols());
    }
  }
  return g;
}

double lo_from_gram(const Matrix& g, const NudgeConfig& cfg) {
  double loss = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = i + 1; j < g.rows(); ++j) loss += 2.0 * penalty(g(i, j), cfg);
  }
  return loss;
}

double lm_from_unit(const Matrix& unit, const Matrix& unit0) {
  double loss = 0.0;
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < unit.rows(); ++i) {
    loss -= k.dot(unit.row(i).data(), unit0.row(i).data(), unit.cols());
  }
  return loss;
}

void check_shapes(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    raise(Errc::DimensionMismatch, "current and initial prototypes differ in shape");
  }
}

}  // namespace

void NudgeConfig::validate() const {
  if (!(rate >= 0.0) || !std::isfinite(rate)) {
    raise(Errc::InvalidArgument, "nudge rate must be finite and non-negative");
  }
  sharpen.validate();
}

void NudgeState::apply(const Matrix& grad, double rate) {
  check_shapes(current_, grad);
  kernels::active().axpy(-rate, grad.flat().data(), current_.flat().data(), current_.flat().size());
  ++step_;
}

double loss_lo(const Matrix& prototypes, const NudgeConfig& cfg) {
  if (prototypes.rows() == 0) raise(Errc::EmptyInput, "no prototypes");
  return lo_from_gram(gram(squash(prototypes).unit), cfg);
}

double loss_lm(const Matrix& prototypes, const Matrix& initial) {
  check_shapes(prototypes, initial);
  if (prototypes.rows() == 0) raise(Errc::EmptyInput, "no prototypes");
  return lm_from_unit(squash(prototypes).unit, squash(initial).unit);
}

Matrix grad_nudge(const NudgeState& state, const NudgeConfig& cfg) {
  const Matrix& k = state.current();
  check_shapes(k, state.initial());
  if (k.rows() == 0) raise(Errc::EmptyInput, "no prototypes");
  const std::size_t c = k.rows();
  const std::size_t d = k.cols();
  const Squashed s = squash(k);
  const Squashed s0 = squash(state.initial());
  const Matrix g = gram(s.unit);
  const auto& kern = kernels::active();

  // With n_i = t_i / |t_i|:  d cos(t_i, t_j) / d t_i = (n_j - cos_ij n_i) / |t_i|.
  // Ordered pairs count (i, j) and (j, i), hence the factor 2 on the pair term.
  Matrix grad(c, d);
  RealVec gt(d);
  for (std::size_t i = 0; i < c; ++i) {
    std::fill(gt.begin(), gt.end(), 0.0);
    double self = 0.0;  // coefficient on n_i
    for (std::size_t j = 0; j < c; ++j) {
      if (j == i) continue;
      const double w = 2.0 * penalty_slope(g(i, j), cfg);
      kern.axpy(w, s.unit.row(j).data(), gt.data(), d);
      self -= w * g(i, j);
    }
    const double c0 = kern.dot(s.unit.row(i).data(), s0.unit.row(i).data(), d);
    kern.axpy(-1.0, s0.unit.row(i).data(), gt.data(), d);
    self += c0;
    kern.axpy(self, s.unit.row(i).data(), gt.data(), d);

    const double inv = 1.0 / s.norms[i];
    const VecView t = s.tanh_rows.row(i);
    auto out = grad.row(i);
    for (std::size_t r = 0; r < d; ++r) out[r] = gt[r] * inv * (1.0 - t[r] * t[r]);
  }
  return grad;
}

NudgeResult run_nudging(const Matrix& initial, const NudgeConfig& cfg) {
  cfg.validate();
  if (initial.rows() == 0) raise(Errc::EmptyInput, "no prototypes to nudge");
  require_finite(initial.flat(), "initial prototypes");

  const Matrix unit0 = squash(initial).unit;
  auto total = [&](const Matrix& k) {
    const Matrix unit = squash(k).unit;
    return lo_from_gram(gram(unit), cfg) + lm_from_unit(unit, unit0);
  };

  NudgeState state(initial);
  NudgeResult result;
  result.trace.reserve(cfg.iterations + 1);
  result.trace.push_back(total(initial));
  for (std::size_t u = 0; u < cfg.iterations; ++u) {
    if (cfg.rate == 0.0) {
      result.trace.push_back(result.trace.front());
      continue;
    }
    state.apply(grad_nudge(state, cfg), cfg.rate);
    const auto& k = state.current().flat();
    const bool diverged = std::any_of(k.begin(), k.end(), [](double x) { return !std::isfinite(x); });
    const double loss = diverged ? std::numeric_limits<double>::quiet_NaN() : total(state.current());
    if (!std::isfinite(loss)) {
      raise(Errc::NonFiniteLoss, "nudging loss not finite at step " + std::to_string(u + 1));
    }
    result.trace.push_back(loss);
  }
  result.prototypes = state.current();
  return result;
}

CrossTalk offdiag_cosine(const Matrix& prototypes) {
  CrossTalk ct;
  const std::size_t c = prototypes.rows();
  if (c < 2) return ct;
  const Matrix g = gram(squash(prototypes).unit);
  double sum = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      const double a = std::abs(g(i, j));
      sum += a;
      ct.max_abs = std::max(ct.max_abs, a);
    }
  }
  ct.mean_abs = sum / static_cast<double>(c * (c - 1) / 2);
  return ct;
}

}  // namespace hdp
