#pragma once

// Dense double-precision inner loops. Every kernel has a portable scalar
// reference and, on x86-64, an AVX2+FMA variant. The variant is chosen once
// per process at first use (CPUID, overridable with HDPROTO_SIMD=scalar|avx2).
//
// Variants agree to rounding, not bit-for-bit: the vector paths reassociate
// sums. Within one process the selected table never changes, so results are
// reproducible run to run on the same machine.

#include <cstddef>
#include <span>
#include <string_view>

namespace hdp::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n) noexcept;
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n) noexcept;
  // y = W x, W row-major rows x cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x,
               double* y) noexcept;
};

bool isa_available(Isa isa) noexcept;

/// Table for a specific ISA; throws hdp::Error(InvalidArgument) when the CPU
/// or the build lacks it.
const KernelTable& table_for(Isa isa);

const KernelTable& active() noexcept;

std::string_view isa_name(Isa isa) noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace hdp::kernels
