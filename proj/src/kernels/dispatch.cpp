#include <cstdlib>
#include <string>

#include "hdproto/error.hpp"
#include "hdproto/kernels.hpp"

namespace hdp::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& select() noexcept {
  const char* env = std::getenv("HDPROTO_SIMD");
  const std::string want = env ? env : "auto";
  if (want == "scalar") return detail::scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

}  // namespace

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return cpu_has_avx2();
  }
  return false;
}

const KernelTable& table_for(Isa isa) {
  if (!isa_available(isa)) {
    raise(Errc::InvalidArgument, "kernel ISA not available: " + std::string(isa_name(isa)));
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (isa == Isa::Avx2) return detail::avx2_table;
#endif
  return detail::scalar_table;
}

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace hdp::kernels
