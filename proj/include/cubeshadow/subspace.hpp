#pragma once

#include "cubeshadow/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace cubeshadow {

/// An (n-k)-dimensional subspace E of R^n, stored as an orthonormal basis
/// (rows of `basis()`) together with an orthonormal basis of E-perp
/// (rows of `complement()`). Immutable once built.
class Subspace {
 public:
  int n() const { return n_; }
  int k() const { return k_; }
  /// Dimension of E, i.e. n - k.
  int dim() const { return n_ - k_; }

  /// (n-k) x n, orthonormal rows spanning E.
  const Matrix& basis() const { return basis_; }
  /// k x n, orthonormal rows spanning E-perp.
  const Matrix& complement() const { return complement_; }
  /// Orthogonal projector P_E = basis^T basis (n x n).
  const Matrix& projector() const { return projector_; }
  Matrix complement_projector() const;

  /// Coordinates of P_E v in the basis of E.
  Vector to_E_coords(const Vector& v) const;
  /// Coordinates of P_{E-perp} v in the complement basis.
  Vector to_complement_coords(const Vector& v) const;
  /// basis^T c: the point of R^n with E-coordinates c.
  Vector from_E_coords(const Vector& c) const;

 private:
  friend Subspace orthonormalize(const Matrix& rows, int n, int k);
  Subspace(int n, int k, Matrix basis, Matrix complement);

  int n_;
  int k_;
  Matrix basis_;
  Matrix complement_;
  Matrix projector_;
};

/// Gram-Schmidt (two passes) over the rows of an (n-k) x n matrix.
/// Throws RankDeficient when a row is dependent on its predecessors to
/// within a relative tolerance of 1e-10.
Subspace orthonormalize(const Matrix& rows, int n, int k);

/// Haar-distributed element of G_{n,n-k}: orthonormalized Gaussian rows.
Subspace haar_subspace(int n, int k, std::uint64_t seed);

/// span{e_1, ..., e_{n-k}}.
Subspace axis_subspace(int n, int k);

/// Parses the plain-text subspace format: "n k" followed by n-k rows of n
/// numbers. Rows need not be orthonormal.
Subspace read_subspace(std::istream& in);
Subspace load_subspace(const std::string& path);
void write_subspace(std::ostream& out, const Subspace& s);

struct ProjectorDistance {
  double hs = 0.0;  ///< Hilbert-Schmidt norm of P1 - P2
  double op = 0.0;  ///< operator norm of P1 - P2
};

ProjectorDistance projector_distance(const Subspace& a, const Subspace& b);

}  // namespace cubeshadow
