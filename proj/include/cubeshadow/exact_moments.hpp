#pragma once

#include "cubeshadow/face_tiling.hpp"
#include "cubeshadow/subspace.hpp"

#include <vector>

namespace cubeshadow {

/// E over P_E(F) of <x, theta>^2 for a unit theta in E (theta given in R^n):
/// 1/3 + (sum_j eps_j theta_{i_j})^2 - (1/3) sum_j theta_{i_j}^2.
double face_moment_dir(const Subspace& s, const Face& f, const Vector& theta);

/// E over P_E(F) of |x|^2:
/// (n-k)/3 + |P_E(sum_j eps_j e_{i_j})|^2 - (1/3) sum_j |P_E e_{i_j}|^2.
double face_moment(const Subspace& s, const Face& f);

/// Variance of u -> u^T Q u for u uniform on [-1,1]^m:
/// (4/45) sum_i q_ii^2 + (2/9) sum_{i != j} q_ij^2.
double centered_quadratic_variance(const Matrix& q);

/// Var of |x|^2 over a tile: the centered quadratic part plus the
/// translation term (4/3)|T^T a|^2.
double tile_variance(const TileGeometry& g);

/// E|x|^2 over a tile from its geometry: trace(Q)/3 + |a|^2.
double tile_mean_sq(const TileGeometry& g);

struct TileMoments {
  std::size_t tile = 0;
  double mean_sq = 0.0;   ///< E over P_E(F_i) of |x|^2
  double variance = 0.0;  ///< Var over P_E(F_i) of |x|^2
};

struct BoundFlags {
  double mean_lower = 0.0;   ///< (n-2k)/3
  double mean_upper = 0.0;   ///< (n+2k)/3
  double lambda_lower = 0.0; ///< (n-2k)/(3(n-k))
  bool mean_ok = false;      ///< body mean within [mean_lower, mean_upper]
  bool face_means_ok = false;///< every tile mean within the same interval
  bool lambda_ok = false;    ///< lambda_sq >= mean_sq/(n-k) >= lambda_lower
  double max_face_dev = 0.0; ///< max_i |E_i - mean_sq|
  bool face_dev_ok = false;  ///< max_face_dev <= 4k/3
  double max_tile_var_over_n = 0.0;  ///< max_i Var_i / n

  bool all_ok() const { return mean_ok && face_means_ok && lambda_ok && face_dev_ok; }
};

/// Exact second- and fourth-order statistics of the uniform measure on K.
struct MomentReport {
  int n = 0;
  int k = 0;
  double mean_sq = 0.0;
  double variance = 0.0;
  Matrix covariance;  ///< (n-k)x(n-k), E-coordinates
  double lambda_sq = 0.0;
  double ratio = 0.0;  ///< variance / (lambda_sq * mean_sq)
  std::vector<TileMoments> per_tile;
  BoundFlags bounds;
};

/// Closed-form moment report for the tiling's body. Per-tile terms come
/// from entries of P_E restricted to each face's fixed coordinates, so the
/// cost is O(l k^3 + n^2 (n-k)). Set `keep_per_tile` to false to drop the
/// per-tile list for very large tilings.
MomentReport body_report(const Tiling& t, bool keep_per_tile = true, double bound_tol = 1e-9);

/// Largest eigenvalue of a symmetric matrix.
double largest_eigenvalue(const Matrix& sym);

}  // namespace cubeshadow
