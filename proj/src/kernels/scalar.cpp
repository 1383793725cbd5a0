#include "hdproto/kernels.hpp"

namespace hdp::kernels::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) noexcept {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 double* y) noexcept {
  for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(w + r * cols, x, cols);
}

}  // namespace

const KernelTable scalar_table{Isa::Scalar, "scalar", &dot_scalar, &axpy_scalar, &gemv_scalar};

}  // namespace hdp::kernels::detail
