#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hdproto/error.hpp"
#include "hdproto/hdvec.hpp"
#include "oracles.hpp"

using namespace hdp;

namespace {
const SharpenConfig kDefault{};

bool throws_code(Errc code, auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}
}  // namespace

TEST_CASE("cosine") {
  const RealVec v{0.3, -1.2, 4.0};
  CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(RealVec{1, 1}, RealVec{1, -1}) == 0.0);
  CHECK(cosine(RealVec{3, 4}, RealVec{4, 3}) == doctest::Approx(0.96).epsilon(1e-15));

  CHECK(throws_code(Errc::DimensionMismatch, [] { cosine(RealVec{1, 2}, RealVec{1, 2, 3}); }));
  CHECK(throws_code(Errc::ZeroVector, [] { cosine(RealVec{0, 0}, RealVec{1, 2}); }));
  CHECK(throws_code(Errc::ZeroVector, [] { cosine(RealVec{1, 2}, RealVec{1e-13, 0}); }));
}

TEST_CASE("cosine is invariant to positive rescaling") {
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> scale(1e-3, 1e3);
  for (int t = 0; t < 100; ++t) {
    const auto u = oracle::gaussian(gen, 17);
    const auto v = oracle::gaussian(gen, 17);
    const double lam = scale(gen), mu = scale(gen);
    RealVec su(u), sv(v);
    for (double& x : su) x *= lam;
    for (double& x : sv) x *= mu;
    CHECK(std::abs(cosine(su, sv) - cosine(u, v)) < 1e-12);
  }
}

TEST_CASE("cosine_grad matches central differences") {
  std::mt19937 gen(2);
  const auto u = oracle::gaussian(gen, 6);
  const auto v = oracle::gaussian(gen, 6);
  RealVec g(6);
  const double c = cosine_grad(u, v, g);
  CHECK(c == doctest::Approx(oracle::cosine(u, v)).epsilon(1e-14));
  for (std::size_t i = 0; i < u.size(); ++i) {
    RealVec up(u), dn(u);
    up[i] += 1e-6;
    dn[i] -= 1e-6;
    CHECK(g[i] == doctest::Approx((oracle::cosine(up, v) - oracle::cosine(dn, v)) / 2e-6).epsilon(1e-6));
  }
}

TEST_CASE("tanh_elem") {
  CHECK(tanh_elem(RealVec{0, 0}) == RealVec{0, 0});
  CHECK(std::abs(tanh_elem(RealVec{10})[0] - 1.0) < 1e-8);
  const RealVec h = tanh_elem(RealVec{0.5, -0.5});
  CHECK(h[0] == doctest::Approx(0.462117157260009758).epsilon(1e-15));
  CHECK(h[1] == doctest::Approx(-0.462117157260009758).epsilon(1e-15));
  CHECK(throws_code(Errc::NonFiniteInput, [] { tanh_elem(RealVec{NAN}); }));
  CHECK(throws_code(Errc::NonFiniteInput, [] { tanh_elem(RealVec{INFINITY}); }));
}

TEST_CASE("bipolarize") {
  CHECK(bipolarize(RealVec{0.3, -0.2}) == RealVec{1, -1});
  CHECK(bipolarize(RealVec{0.0, -0.0}) == RealVec{1, 1});
  std::mt19937 gen(3);
  const auto v = oracle::gaussian(gen, 64);
  const RealVec once = bipolarize(v);
  CHECK(bipolarize(once) == once);
  CHECK(std::all_of(once.begin(), once.end(), [](double x) { return x == 1.0 || x == -1.0; }));
}

TEST_CASE("softabs sharpening") {
  // 2 / (1 + e^5) and 1/(1+e^-5) + 1/(1+e^15), evaluated with mpmath
  CHECK(std::abs(softabs_sharpen(0.0, kDefault) - 0.0133857018485697111) < 1e-12);
  CHECK(std::abs(softabs_sharpen(1.0, kDefault) - 0.9933074549779420701) < 1e-12);

  std::mt19937 gen(4);
  std::uniform_real_distribution<double> in(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double c = in(gen);
    CHECK(softabs_sharpen(c, kDefault) == doctest::Approx(softabs_sharpen(-c, kDefault)).epsilon(1e-15));
    if (c != 0.0) CHECK(softabs_sharpen(0.0, kDefault) < softabs_sharpen(c, kDefault));
  }
  double prev = softabs_sharpen(0.5, kDefault);
  for (int i = 1; i <= 100; ++i) {
    const double cur = softabs_sharpen(0.5 + 0.005 * i, kDefault);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("softabs attention") {
  const RealVec u = softabs_attention(RealVec{0.5, 0.5, 0.5}, kDefault);
  for (double x : u) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  const RealVec h = softabs_attention(RealVec{1.0, 0.0}, kDefault);
  CHECK(std::abs(h[0] - 0.986703295082717511) < 1e-12);
  CHECK(std::abs(h[1] - 0.013296704917282489) < 1e-12);

  const RealVec l{0.9, -0.2, 0.1, 0.4};
  const RealVec base = softabs_attention(l, kDefault);
  std::vector<std::size_t> perm{2, 0, 3, 1};
  RealVec pl(4);
  for (std::size_t i = 0; i < 4; ++i) pl[i] = l[perm[i]];
  const RealVec ph = softabs_attention(pl, kDefault);
  for (std::size_t i = 0; i < 4; ++i) CHECK(ph[i] == doctest::Approx(base[perm[i]]).epsilon(1e-15));

  CHECK(throws_code(Errc::EmptyInput, [] { softabs_attention(RealVec{}, kDefault); }));
}

TEST_CASE("softmax attention") {
  const RealVec u = softmax_attention(RealVec{0.2, 0.2}, kDefault);
  CHECK(u[0] == doctest::Approx(0.5));
  const RealVec r = softmax_attention(RealVec{1.0, 0.0}, kDefault);
  CHECK(std::abs(r[0] - 0.99995460213129756561) < 1e-13);
  CHECK(std::abs(r[1] - 0.0000453978687024343945) < 1e-13);

  const RealVec l{0.3, -0.7, 0.9};
  const RealVec base = softmax_attention(l, kDefault);
  const RealVec shifted = softmax_attention(RealVec{l[0] + 5.0, l[1] + 5.0, l[2] + 5.0}, kDefault);
  for (std::size_t i = 0; i < 3; ++i) CHECK(shifted[i] == doctest::Approx(base[i]).epsilon(1e-12));

  // max-subtraction keeps extreme scores finite
  const RealVec big = softmax_attention(RealVec{1e4, 0.0}, kDefault);
  CHECK(big[0] == 1.0);
  CHECK(throws_code(Errc::EmptyInput, [] { softmax_attention(RealVec{}, kDefault); }));
}

TEST_CASE("attention outputs are probability vectors") {
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> in(-1.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    RealVec l(1 + t % 13);
    for (double& x : l) x = in(gen);
    for (Attention a : {Attention::Softabs, Attention::Softmax}) {
      const RealVec p = attend(l, a, kDefault);
      CHECK(std::all_of(p.begin(), p.end(), [](double x) { return x >= 0.0; }));
      CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("nudge activations") {
  CHECK(nudge_activation(0.0, kDefault) == 0.0);
  CHECK(nudge_activation_anticorr(0.0, kDefault) == 0.0);
  CHECK(std::abs(nudge_activation(1.0, kDefault) - 52.616465672032973) < 1e-9);
  std::mt19937 gen(6);
  std::uniform_real_distribution<double> in(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double c = in(gen);
    CHECK(nudge_activation(c, kDefault) == doctest::Approx(nudge_activation(-c, kDefault)).epsilon(1e-14));
    CHECK(nudge_activation(c, kDefault) >= 0.0);
    const double h = 1e-6;
    CHECK(nudge_activation_slope(c, kDefault) ==
          doctest::Approx((nudge_activation(c + h, kDefault) - nudge_activation(c - h, kDefault)) / (2 * h)).epsilon(1e-6));
    CHECK(nudge_activation_anticorr_slope(c, kDefault) ==
          doctest::Approx((nudge_activation_anticorr(c + h, kDefault) - nudge_activation_anticorr(c - h, kDefault)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("sharpen config validation") {
  CHECK_NOTHROW(kDefault.validate());
  CHECK(throws_code(Errc::InvalidArgument, [] { SharpenConfig{0.0, 10.0, 4.0}.validate(); }));
  CHECK(throws_code(Errc::InvalidArgument, [] { SharpenConfig{10.0, -1.0, 4.0}.validate(); }));
  CHECK(throws_code(Errc::InvalidArgument, [] { SharpenConfig{10.0, 10.0, 0.0}.validate(); }));
}

TEST_CASE("circular convolution and correlation") {
  RealVec delta(5, 0.0);
  delta[0] = 1.0;
  const RealVec v{0.5, -1.0, 2.0, 3.0, 0.25};
  CHECK(circ_convolve(v, delta) == v);
  CHECK(circ_convolve(RealVec{1, 2, 3, 4}, RealVec{1, 0, 0, 1}) == RealVec{3, 5, 7, 5});
  CHECK(oracle::convolve({1, 2, 3, 4}, {1, 0, 0, 1}) == std::vector<double>{3, 5, 7, 5});

  CHECK(throws_code(Errc::DimensionMismatch, [] { circ_convolve(RealVec{1, 2}, RealVec{1}); }));
  CHECK(throws_code(Errc::DimensionMismatch, [] { circ_correlate(RealVec{1, 2}, RealVec{1}); }));

  std::mt19937 gen(7);
  for (std::size_t d : {1u, 3u, 4u, 8u, 17u, 64u}) {
    const auto a = oracle::gaussian(gen, d);
    const auto b = oracle::gaussian(gen, d);
    const auto c = oracle::gaussian(gen, d);
    const RealVec conv = circ_convolve(a, b);
    const RealVec corr = circ_correlate(a, b);
    const auto conv_ref = oracle::convolve(a, b);
    const auto corr_ref = oracle::correlate(a, b);
    for (std::size_t k = 0; k < d; ++k) {
      CHECK(std::abs(conv[k] - conv_ref[k]) < 1e-10);
      CHECK(std::abs(corr[k] - corr_ref[k]) < 1e-10);
    }
    // binding distributes over superposition
    RealVec ab(d);
    for (std::size_t k = 0; k < d; ++k) ab[k] = a[k] + b[k];
    const RealVec lhs = circ_convolve(ab, c);
    const RealVec ac = circ_convolve(a, c), bc = circ_convolve(b, c);
    for (std::size_t k = 0; k < d; ++k) CHECK(std::abs(lhs[k] - (ac[k] + bc[k])) < 1e-9);
  }
}

TEST_CASE("unbinding recovers a bound vector up to key noise") {
  // Monte-Carlo reference (numpy, 4000 trials): mean cosine 0.710, min ~0.60
  // at d = 512 with normal(0, 1/d) keys.
  std::mt19937 gen(8);
  double sum = 0.0, lo = 1.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const auto p = oracle::gaussian(gen, 512);
    RealVec key = key_from_seed(KeySeed{static_cast<std::uint32_t>(1000 + t)}, 512);
    const double n = norm(key);
    for (double& x : key) x /= n;  // unit-norm key
    const double c = cosine(circ_correlate(circ_convolve(p, key), key), p);
    sum += c;
    lo = std::min(lo, c);
  }
  CHECK(sum / trials == doctest::Approx(0.71).epsilon(0.04));
  CHECK(lo > 0.55);
}

TEST_CASE("keys from seeds") {
  const RealVec a = key_from_seed(KeySeed{42}, 512);
  const RealVec b = key_from_seed(KeySeed{42}, 512);
  CHECK(a == b);

  double norm_sq = 0.0;
  for (std::uint32_t s = 0; s < 1000; ++s) {
    const RealVec k = key_from_seed(KeySeed{s}, 512);
    norm_sq += std::inner_product(k.begin(), k.end(), k.begin(), 0.0);
  }
  CHECK(std::abs(norm_sq / 1000.0 - 1.0) < 0.05);

  int quasi_orthogonal = 0;
  for (std::uint32_t s = 0; s < 1000; ++s) {
    if (std::abs(cosine(key_from_seed(KeySeed{2 * s}, 512), key_from_seed(KeySeed{2 * s + 1}, 512))) < 0.2) {
      ++quasi_orthogonal;
    }
  }
  CHECK(quasi_orthogonal >= 990);
  CHECK(throws_code(Errc::InvalidArgument, [] { key_from_seed(KeySeed{1}, 0); }));
}
