#pragma once

// Elementary operations on real hypervectors: similarity, the tanh squashing
// used before every comparison, sign quantization, attention sharpening and
// holographic binding.

#include <cstdint>
#include <span>

#include "hdproto/matrix.hpp"

namespace hdp {

/// Sharpening and nudging shape parameters.
struct SharpenConfig {
  double stiffness = 10.0;  // slope of the soft-absolute sigmoid pair
  double tau = 10.0;        // inverse softmax temperature
  double alpha = 4.0;       // steepness of the cross-correlation penalty
  void validate() const;
};

/// Seed for a regenerable random key. Only the 32-bit seed is stored.
struct KeySeed {
  std::uint32_t value = 0;
  bool operator==(const KeySeed&) const = default;
};

enum class Attention { Softabs, Softmax };

inline constexpr double kZeroNormThreshold = 1e-12;

void require_finite(VecView v, const char* what);

double norm(VecView v) noexcept;

double cosine(VecView u, VecView v);

/// Writes d cos(u, v) / du into grad_u and returns cos(u, v).
double cosine_grad(VecView u, VecView v, std::span<double> grad_u);

RealVec tanh_elem(VecView v);

/// Element-wise sign; zero (either sign) maps to +1.
RealVec bipolarize(VecView v);

double softabs_sharpen(double c, const SharpenConfig& cfg) noexcept;
RealVec softabs_attention(VecView scores, const SharpenConfig& cfg);
RealVec softmax_attention(VecView scores, const SharpenConfig& cfg);
RealVec attend(VecView scores, Attention attention, const SharpenConfig& cfg);

// Pairwise penalty on a cosine c and its derivative. The symmetric form
// penalizes |c|; the anti-correlation form rewards c < 0.
double nudge_activation(double c, const SharpenConfig& cfg) noexcept;
double nudge_activation_anticorr(double c, const SharpenConfig& cfg) noexcept;
double nudge_activation_slope(double c, const SharpenConfig& cfg) noexcept;
double nudge_activation_anticorr_slope(double c, const SharpenConfig& cfg) noexcept;

/// out[k] = sum_j a[j] * b[(k - j) mod d]
RealVec circ_convolve(VecView a, VecView b);

/// out[k] = sum_j a[(j + k) mod d] * b[j]; the cross-correlation of a against
/// b, so circ_correlate(circ_convolve(p, key), key) ~ p.
RealVec circ_correlate(VecView a, VecView b);

/// d i.i.d. normal(0, 1/d) entries from a generator seeded with seed.
RealVec key_from_seed(KeySeed seed, std::size_t d);

}  // namespace hdp
