#pragma once

// Independent reference computations used by the unit tests. Nothing here
// calls into the library's kernels.

#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t d = a.size();
  std::vector<double> out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < d; ++j) out[k] += a[j] * b[(k + d - j) % d];
  return out;
}

// Cross-correlation of a against b: out[k] = sum_j a[(j + k) mod d] * b[j]
inline std::vector<double> correlate(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t d = a.size();
  std::vector<double> out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < d; ++j) out[k] += a[(j + k) % d] * b[j];
  return out;
}

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
  double uv = 0, uu = 0, vv = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  return uv / std::sqrt(uu * vv);
}

inline std::vector<double> squash(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
  return out;
}

inline std::vector<double> matvec(const std::vector<std::vector<double>>& w, const std::vector<double>& x) {
  std::vector<double> out(w.size(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r)
    for (std::size_t c = 0; c < x.size(); ++c) out[r] += w[r][c] * x[c];
  return out;
}

inline std::vector<double> gaussian(std::mt19937& gen, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> dist(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

}  // namespace oracle
