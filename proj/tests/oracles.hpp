#pragma once

// Test-only reference computations. Nothing here calls into the library's
// moment or tiling code: each oracle integrates directly over the cube face,
// the unit box, or an explicit membership test.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

struct Estimate {
  double mean = 0.0;
  double se_mean = 0.0;
  double var = 0.0;
  double se_var = 0.0;
};

inline Estimate estimate(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = (x - mean) * (x - mean);
    m2 += d;
    m4 += d * d;
  }
  Estimate e;
  e.mean = mean;
  e.var = m2 / (n - 1.0);
  e.se_mean = std::sqrt(e.var / n);
  e.se_var = std::sqrt(std::max(0.0, (m4 / n - e.var * e.var) / n));
  return e;
}

/// Streams N values of f(u), u uniform on [-1,1]^m, without storing them.
inline Estimate box_mc(int m, std::size_t samples, std::uint64_t seed,
                       const std::function<double(const Eigen::VectorXd&)>& f) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::VectorXd u(m);
  std::vector<double> vals;
  vals.reserve(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < m; ++i) u[i] = unif(gen);
    vals.push_back(f(u));
  }
  return estimate(vals);
}

/// E over the face {y_S = eps} of g(basis * y) with y_free uniform.
inline Estimate face_mc(const Eigen::MatrixXd& basis, const std::vector<int>& fixed,
                        const std::vector<int>& signs, std::size_t samples, std::uint64_t seed,
                        const std::function<double(const Eigen::VectorXd&)>& g) {
  const int n = static_cast<int>(basis.cols());
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> vals;
  vals.reserve(samples);
  Eigen::VectorXd y(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < n; ++i) y[i] = unif(gen);
    for (std::size_t j = 0; j < fixed.size(); ++j) y[fixed[j]] = signs[j];
    vals.push_back(g(basis * y));
  }
  return estimate(vals);
}

/// Composite Simpson rule on [a, b] with `intervals` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int intervals = 2000) {
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

/// Eigenvalues of a symmetric 2x2 matrix, closed form.
inline std::pair<double, double> eig2(double a, double b, double d) {
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return {mid - rad, mid + rad};
}

/// Uniform points on the regular hexagon P_E([-1,1]^3), E = (1,1,1)-perp,
/// by rejection from its bounding box in the coordinates of `basis` (2x3,
/// orthonormal rows). Membership: y = p + t(1,1,1) fits in the cube iff
/// max(p) - min(p) <= 2.
inline std::vector<Eigen::Vector2d> hexagon_points(const Eigen::MatrixXd& basis, std::size_t samples,
                                                   std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const double hx = basis.row(0).cwiseAbs().sum();
  const double hy = basis.row(1).cwiseAbs().sum();
  std::uniform_real_distribution<double> ux(-hx, hx), uy(-hy, hy);
  std::vector<Eigen::Vector2d> out;
  out.reserve(samples);
  while (out.size() < samples) {
    const Eigen::Vector2d c(ux(gen), uy(gen));
    const Eigen::Vector3d p = basis.transpose() * c;
    if (p.maxCoeff() - p.minCoeff() <= 2.0) out.push_back(c);
  }
  return out;
}

}  // namespace oracle
