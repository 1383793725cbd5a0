#include "hdproto/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "hdproto/embedlayer.hpp"
#include "hdproto/nudge.hpp"

namespace hdp {
namespace {

Matrix random_matrix(std::mt19937& gen, std::size_t rows, std::size_t cols, double scale) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (double& x : m.flat()) x = dist(gen);
  return m;
}

// Central differences of f around x, one coordinate at a time.
Matrix numeric_gradient(Matrix x, double step, const std::function<double(const Matrix&)>& f) {
  Matrix grad(x.rows(), x.cols());
  auto flat = x.flat();
  for (std::size_t i = 0; i < flat.size(); ++i) {
    const double saved = flat[i];
    flat[i] = saved + step;
    const double up = f(x);
    flat[i] = saved - step;
    const double down = f(x);
    flat[i] = saved;
    grad.flat()[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

double relative_error(const Matrix& analytic, const Matrix& numeric) {
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.flat().size(); ++i) {
    const double a = analytic.flat()[i];
    const double n = numeric.flat()[i];
    diff += (a - n) * (a - n);
    na += a * a;
    nn += n * n;
  }
  const double denom = std::max({std::sqrt(na), std::sqrt(nn), 1e-300});
  return std::sqrt(diff) / denom;
}

}  // namespace

GradcheckReport run_gradcheck(const GradcheckOptions& opts) {
  std::mt19937 gen(opts.seed);
  std::uniform_int_distribution<std::size_t> dim(3, 8);
  std::uniform_int_distribution<std::size_t> classes(2, 5);
  GradcheckReport report;
  report.points = opts.points;

  for (std::size_t p = 0; p < opts.points; ++p) {
    const std::size_t d = dim(gen);
    const std::size_t d_f = dim(gen);
    const std::size_t c = classes(gen);
    const Matrix weights = random_matrix(gen, d, d_f, 1.0 / std::sqrt(static_cast<double>(d_f)));
    const Matrix targets = random_matrix(gen, c, d, 1.0);
    const Matrix activations = random_matrix(gen, c, d_f, 1.0);

    const Matrix analytic = grad_lf(EmbedLayer(weights), targets, activations);
    const Matrix numeric = numeric_gradient(weights, opts.step, [&](const Matrix& w) {
      return loss_lf(EmbedLayer(w), targets, activations);
    });
    report.max_rel_error_layer = std::max(report.max_rel_error_layer, relative_error(analytic, numeric));
  }

  for (std::size_t p = 0; p < opts.points; ++p) {
    const std::size_t d = dim(gen);
    const std::size_t c = classes(gen);
    NudgeConfig cfg;
    cfg.variant = p % 2 == 0 ? NudgeVariant::Symmetric : NudgeVariant::AntiCorrelated;
    const Matrix initial = random_matrix(gen, c, d, 1.0);
    Matrix current = initial;
    const Matrix offset = random_matrix(gen, c, d, 0.3);
    for (std::size_t i = 0; i < current.flat().size(); ++i) current.flat()[i] += offset.flat()[i];

    NudgeState state(initial);
    state.apply(offset, -1.0);  // moves current to initial + offset
    const Matrix analytic = grad_nudge(state, cfg);
    const Matrix numeric = numeric_gradient(current, opts.step, [&](const Matrix& k) {
      return loss_lo(k, cfg) + loss_lm(k, initial);
    });
    report.max_rel_error_nudge = std::max(report.max_rel_error_nudge, relative_error(analytic, numeric));
  }
  return report;
}

}  // namespace hdp
