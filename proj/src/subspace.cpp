#include "cubeshadow/subspace.hpp"

#include "cubeshadow/random.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace cubeshadow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooManySubsets: return "TooManySubsets";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DegenerateDirection: return "DegenerateDirection";
    case ErrorKind::DegenerateSubspace: return "DegenerateSubspace";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::AcceptanceTooLow: return "AcceptanceTooLow";
    case ErrorKind::EmptyBatch: return "EmptyBatch";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    const std::uint64_t numer = static_cast<std::uint64_t>(n - k + i);
    // result * numer / i is exact at every step; guard the multiplication.
    if (result > std::numeric_limits<std::uint64_t>::max() / numer)
      return std::numeric_limits<std::uint64_t>::max();
    result = result * numer / static_cast<std::uint64_t>(i);
  }
  return result;
}

namespace {

constexpr double kRankTol = 1e-10;

void check_dims(int n, int k) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
  if (k < 0) throw Error(ErrorKind::InvalidArgument, "k must be >= 0");
  if (k >= n) throw Error(ErrorKind::InvalidArgument, "k must be < n");
}

// Removes from v its components along the first `count` rows of q, twice.
void project_out(Vector& v, const Matrix& q, Eigen::Index count) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < count; ++j) {
      v -= q.row(j).dot(v) * q.row(j).transpose();
    }
  }
}

}  // namespace

Subspace::Subspace(int n, int k, Matrix basis, Matrix complement)
    : n_(n), k_(k), basis_(std::move(basis)), complement_(std::move(complement)) {
  projector_ = basis_.transpose() * basis_;
}

Matrix Subspace::complement_projector() const { return complement_.transpose() * complement_; }

Vector Subspace::to_E_coords(const Vector& v) const {
  if (v.size() != n_)
    throw Error(ErrorKind::DimensionMismatch, "to_E_coords: vector length " +
                                                  std::to_string(v.size()) + " != n = " +
                                                  std::to_string(n_));
  return basis_ * v;
}

Vector Subspace::to_complement_coords(const Vector& v) const {
  if (v.size() != n_)
    throw Error(ErrorKind::DimensionMismatch, "to_complement_coords: vector length mismatch");
  return complement_ * v;
}

Vector Subspace::from_E_coords(const Vector& c) const {
  if (c.size() != dim())
    throw Error(ErrorKind::DimensionMismatch, "from_E_coords: vector length mismatch");
  return basis_.transpose() * c;
}

Subspace orthonormalize(const Matrix& rows, int n, int k) {
  check_dims(n, k);
  const int m = n - k;
  if (rows.rows() != m || rows.cols() != n)
    throw Error(ErrorKind::DimensionMismatch,
                "orthonormalize: expected " + std::to_string(m) + "x" + std::to_string(n) +
                    " rows, got " + std::to_string(rows.rows()) + "x" +
                    std::to_string(rows.cols()));

  Matrix basis(m, n);
  for (int i = 0; i < m; ++i) {
    Vector v = rows.row(i).transpose();
    const double scale = v.norm();
    project_out(v, basis, i);
    const double residual = v.norm();
    if (!(scale > 0.0) || !(residual > kRankTol * scale))
      throw Error(ErrorKind::RankDeficient,
                  "rows do not span an " + std::to_string(m) + "-dimensional space (row " +
                      std::to_string(i + 1) + " is dependent)");
    basis.row(i) = (v / residual).transpose();
  }

  // Complete to an orthonormal basis of R^n with standard basis vectors,
  // greedily taking the e_j with the largest residual (lowest j on ties).
  Matrix all(n, n);
  all.topRows(m) = basis;
  for (int c = 0; c < k; ++c) {
    double best_norm = -1.0;
    Vector best;
    for (int j = 0; j < n; ++j) {
      Vector v = Vector::Unit(n, j);
      project_out(v, all, m + c);
      const double norm = v.norm();
      if (norm > best_norm + 1e-12) {
        best_norm = norm;
        best = std::move(v);
      }
    }
    if (!(best_norm > kRankTol))
      throw Error(ErrorKind::NumericalFailure, "failed to complete the orthonormal basis");
    all.row(m + c) = (best / best_norm).transpose();
  }
  return Subspace(n, k, std::move(basis), all.bottomRows(k));
}

Subspace haar_subspace(int n, int k, std::uint64_t seed) {
  check_dims(n, k);
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "haar_subspace requires k >= 1");
  Rng rng(seed);
  Matrix g(n - k, n);
  for (int i = 0; i < n - k; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
  return orthonormalize(g, n, k);
}

Subspace axis_subspace(int n, int k) {
  check_dims(n, k);
  return orthonormalize(Matrix::Identity(n - k, n), n, k);
}

Subspace read_subspace(std::istream& in) {
  int n = 0, k = 0;
  if (!(in >> n >> k)) throw Error(ErrorKind::InvalidArgument, "subspace file: expected header 'n k'");
  check_dims(n, k);
  Matrix rows(n - k, n);
  for (int i = 0; i < n - k; ++i) {
    for (int j = 0; j < n; ++j) {
      if (!(in >> rows(i, j)))
        throw Error(ErrorKind::InvalidArgument, "subspace file: expected " + std::to_string(n - k) +
                                                    " rows of " + std::to_string(n) + " numbers");
    }
  }
  return orthonormalize(rows, n, k);
}

Subspace load_subspace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open subspace file '" + path + "'");
  try {
    return read_subspace(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

void write_subspace(std::ostream& out, const Subspace& s) {
  std::ostringstream buf;
  buf.precision(17);
  buf << s.n() << ' ' << s.k() << '\n';
  for (int i = 0; i < s.dim(); ++i) {
    for (int j = 0; j < s.n(); ++j) buf << (j ? " " : "") << s.basis()(i, j);
    buf << '\n';
  }
  out << buf.str();
}

ProjectorDistance projector_distance(const Subspace& a, const Subspace& b) {
  if (a.n() != b.n() || a.k() != b.k())
    throw Error(ErrorKind::DimensionMismatch, "projector_distance: subspaces differ in (n, k)");
  const Matrix diff = a.projector() - b.projector();
  ProjectorDistance d;
  d.hs = diff.norm();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(diff, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorKind::NumericalFailure, "projector_distance: eigen-solve failed");
  d.op = eig.eigenvalues().cwiseAbs().maxCoeff();
  return d;
}

}  // namespace cubeshadow
