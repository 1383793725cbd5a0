#pragma once

#include <cstddef>
#include <cstdint>

namespace hdp {

/// Central finite-difference check of the analytic gradients of the layer
/// alignment loss and of the nudging objective. The relative error at one
/// point is |g_analytic - g_numeric|_2 / max(|g_analytic|_2, |g_numeric|_2).
struct GradcheckOptions {
  std::uint32_t seed = 0;
  std::size_t points = 20;
  double step = 1e-5;
};

struct GradcheckReport {
  double max_rel_error_layer = 0.0;
  double max_rel_error_nudge = 0.0;
  std::size_t points = 0;

  double max_rel_error() const noexcept {
    return max_rel_error_layer > max_rel_error_nudge ? max_rel_error_layer : max_rel_error_nudge;
  }
};

GradcheckReport run_gradcheck(const GradcheckOptions& opts);

}  // namespace hdp
