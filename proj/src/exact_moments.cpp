#include "cubeshadow/exact_moments.hpp"

#include <algorithm>
#include <cmath>

namespace cubeshadow {

namespace {

constexpr double kMembershipTol = 1e-10;

}  // namespace

double face_moment_dir(const Subspace& s, const Face& f, const Vector& theta) {
  validate_face(f, s.n(), s.k());
  if (theta.size() != s.n())
    throw Error(ErrorKind::DimensionMismatch, "face_moment_dir: theta must have length n");
  if (std::abs(theta.norm() - 1.0) > kMembershipTol)
    throw Error(ErrorKind::InvalidArgument, "face_moment_dir: theta must be a unit vector");
  if ((s.projector() * theta - theta).norm() > kMembershipTol)
    throw Error(ErrorKind::InvalidArgument, "face_moment_dir: theta must lie in E");
  double signed_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t j = 0; j < f.fixed.size(); ++j) {
    const double th = theta[f.fixed[j]];
    signed_sum += f.signs[j] * th;
    sq_sum += th * th;
  }
  return 1.0 / 3.0 + signed_sum * signed_sum - sq_sum / 3.0;
}

double face_moment(const Subspace& s, const Face& f) {
  validate_face(f, s.n(), s.k());
  const Matrix& p = s.projector();
  double shift_sq = 0.0;
  double diag = 0.0;
  for (std::size_t a = 0; a < f.fixed.size(); ++a) {
    const int i = f.fixed[a];
    diag += p(i, i);
    for (std::size_t b = 0; b < f.fixed.size(); ++b)
      shift_sq += f.signs[a] * f.signs[b] * p(i, f.fixed[b]);
  }
  return s.dim() / 3.0 + shift_sq - diag / 3.0;
}

double centered_quadratic_variance(const Matrix& q) {
  if (q.rows() != q.cols())
    throw Error(ErrorKind::DimensionMismatch, "centered_quadratic_variance: Q must be square");
  const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
  if ((q - q.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw Error(ErrorKind::InvalidArgument, "centered_quadratic_variance: Q must be symmetric");
  double diag = 0.0;
  double off = 0.0;
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      const double v = q(i, j) * q(i, j);
      (i == j ? diag : off) += v;
    }
  }
  return 4.0 / 45.0 * diag + 2.0 / 9.0 * off;
}

double tile_variance(const TileGeometry& g) {
  const Vector ta = g.map.transpose() * g.shift;
  return centered_quadratic_variance(g.gram) + 4.0 / 3.0 * ta.squaredNorm();
}

double tile_mean_sq(const TileGeometry& g) { return g.gram.trace() / 3.0 + g.shift.squaredNorm(); }

double largest_eigenvalue(const Matrix& sym) {
  if (sym.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "symmetric eigen-solve failed");
  return eig.eigenvalues().maxCoeff();
}

MomentReport body_report(const Tiling& t, bool keep_per_tile, double bound_tol) {
  const Subspace& s = t.subspace();
  const int n = s.n();
  const int k = s.k();
  const int m = s.dim();
  const Matrix& p = s.projector();

  // Whole-matrix sums reused by every tile: the Gram matrix of a tile is the
  // principal submatrix of P_E on the face's free coordinates.
  double diag_sq_total = 0.0;
  double off_sq_total = 0.0;
  Vector off_row(n);
  for (int i = 0; i < n; ++i) {
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j != i) row += p(i, j) * p(i, j);
    }
    off_row[i] = row;
    off_sq_total += row;
    diag_sq_total += p(i, i) * p(i, i);
  }

  MomentReport rep;
  rep.n = n;
  rep.k = k;
  const std::size_t l = t.size();
  std::vector<double> means(l), vars(l);

  // Lifted second-moment matrix G on R^n; covariance = B G B^T.
  Matrix lifted = Matrix::Zero(n, n);
  Vector fixed_weight = Vector::Zero(n);
  Vector pa(k);

  for (std::size_t idx = 0; idx < l; ++idx) {
    const auto fx = t.fixed(idx);
    const auto sg = t.signs(idx);
    const double w = t.weight(idx);

    double shift_sq = 0.0, diag = 0.0, diag_sq = 0.0, row_sum = 0.0, inner_off_sq = 0.0;
    for (int a = 0; a < k; ++a) {
      const int i = fx[a];
      diag += p(i, i);
      diag_sq += p(i, i) * p(i, i);
      row_sum += off_row[i];
      double acc = 0.0;
      for (int b = 0; b < k; ++b) {
        const double pij = p(i, fx[b]);
        acc += sg[b] * pij;
        if (a != b) inner_off_sq += pij * pij;
      }
      pa[a] = acc;  // <P_E e_i, a_F>
      shift_sq += sg[a] * acc;
    }
    const double gram_diag_sq = diag_sq_total - diag_sq;
    const double gram_off_sq = off_sq_total - 2.0 * row_sum + inner_off_sq;
    const double ta_sq = shift_sq - pa.squaredNorm();

    means[idx] = m / 3.0 + shift_sq - diag / 3.0;
    vars[idx] = 4.0 / 45.0 * gram_diag_sq + 2.0 / 9.0 * gram_off_sq + 4.0 / 3.0 * ta_sq;

    for (int a = 0; a < k; ++a) {
      fixed_weight[fx[a]] += w;
      for (int b = 0; b < k; ++b) lifted(fx[a], fx[b]) += w * sg[a] * sg[b];
    }
  }
  for (int i = 0; i < n; ++i) lifted(i, i) += (1.0 - fixed_weight[i]) / 3.0;

  double mean_sq = 0.0;
  for (std::size_t i = 0; i < l; ++i) mean_sq += t.weight(i) * means[i];
  double within = 0.0, between = 0.0, max_dev = 0.0, max_var = 0.0;
  bool face_means_ok = true;
  const double lower = (n - 2.0 * k) / 3.0;
  const double upper = (n + 2.0 * k) / 3.0;
  for (std::size_t i = 0; i < l; ++i) {
    const double dev = means[i] - mean_sq;
    within += t.weight(i) * vars[i];
    between += t.weight(i) * dev * dev;
    max_dev = std::max(max_dev, std::abs(dev));
    max_var = std::max(max_var, vars[i]);
    if (means[i] < lower - bound_tol || means[i] > upper + bound_tol) face_means_ok = false;
  }

  rep.mean_sq = mean_sq;
  rep.variance = within + between;
  rep.covariance = s.basis() * lifted * s.basis().transpose();
  rep.covariance = 0.5 * (rep.covariance + rep.covariance.transpose());
  rep.lambda_sq = largest_eigenvalue(rep.covariance);
  rep.ratio = rep.variance / (rep.lambda_sq * rep.mean_sq);

  BoundFlags& bf = rep.bounds;
  bf.mean_lower = lower;
  bf.mean_upper = upper;
  bf.lambda_lower = (n - 2.0 * k) / (3.0 * m);
  bf.mean_ok = mean_sq >= lower - bound_tol && mean_sq <= upper + bound_tol;
  bf.face_means_ok = face_means_ok;
  bf.lambda_ok = rep.lambda_sq >= mean_sq / m - bound_tol && mean_sq / m >= bf.lambda_lower - bound_tol;
  bf.max_face_dev = max_dev;
  bf.face_dev_ok = max_dev <= 4.0 * k / 3.0 + bound_tol;
  bf.max_tile_var_over_n = max_var / n;

  if (keep_per_tile) {
    rep.per_tile.resize(l);
    for (std::size_t i = 0; i < l; ++i) rep.per_tile[i] = {i, means[i], vars[i]};
  }
  return rep;
}

}  // namespace cubeshadow
