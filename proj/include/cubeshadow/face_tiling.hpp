#pragma once

#include "cubeshadow/subspace.hpp"
#include "cubeshadow/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace cubeshadow {

/// An (n-k)-face of the cube [-1,1]^n: the coordinates in `fixed` are pinned
/// to the matching entry of `signs`, the remaining n-k coordinates are free.
/// Indices are 0-based here; exports use 1-based indices.
struct Face {
  std::vector<int> fixed;  ///< strictly increasing
  std::vector<int> signs;  ///< each +1 or -1

  friend bool operator==(const Face&, const Face&) = default;
  friend auto operator<=>(const Face&, const Face&) = default;
};

/// Throws InvalidArgument unless `f` is a face of codimension k in R^n.
void validate_face(const Face& f, int n, int k);

/// Free coordinates of `f`, ascending.
std::vector<int> free_coordinates(const Face& f, int n);

/// The face S = {0..k-1}, all signs +1.
Face leading_face(int k);

/// P_E(F) = shift + map([-1,1]^{n-k}), all in E-coordinates.
struct TileGeometry {
  Vector shift;   ///< a_F
  Matrix map;     ///< T_F, columns = E-coords of e_j for free j ascending
  Matrix gram;    ///< T_F^T T_F
  double volume;  ///< 2^{n-k} |det T_F|
};

TileGeometry tile_geometry(const Subspace& s, const Face& f);

struct TilingOptions {
  /// Generic direction xi in E-perp coordinates (length k). When absent, a
  /// Haar-random unit vector is drawn from `seed`.
  std::optional<Vector> direction;
  std::uint64_t seed = 0;
  double det_rel_tol = 1e-10;
  double sign_rel_tol = 1e-10;
  int max_direction_attempts = 16;
  std::uint64_t max_subsets = 10'000'000;
  unsigned threads = 1;
};

/// The faces whose projections tile K = P_E([-1,1]^n), with their weights
/// |P_E(F_i)| / |K|. Faces are stored flat; per-tile geometry is rebuilt
/// on demand because it is (n-k)^2 doubles per tile.
class Tiling {
 public:
  const Subspace& subspace() const { return subspace_; }
  int n() const { return subspace_.n(); }
  int k() const { return subspace_.k(); }

  /// Number of tiles l.
  std::size_t size() const { return weights_.size(); }

  std::span<const int> fixed(std::size_t i) const {
    return {fixed_.data() + i * static_cast<std::size_t>(k()), static_cast<std::size_t>(k())};
  }
  std::span<const signed char> signs(std::size_t i) const {
    return {signs_.data() + i * static_cast<std::size_t>(k()), static_cast<std::size_t>(k())};
  }
  Face face(std::size_t i) const;

  double weight(std::size_t i) const { return weights_[i]; }
  double volume(std::size_t i) const { return volumes_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double total_volume() const { return total_volume_; }

  /// xi in E-perp coordinates.
  const Vector& direction() const { return direction_; }

  TileGeometry geometry(std::size_t i) const { return tile_geometry(subspace_, face(i)); }

 private:
  friend Tiling enumerate_tiling(const Subspace& s, const TilingOptions& options);
  explicit Tiling(Subspace s) : subspace_(std::move(s)) {}

  Subspace subspace_;
  std::vector<int> fixed_;
  std::vector<signed char> signs_;
  std::vector<double> weights_;
  std::vector<double> volumes_;
  double total_volume_ = 0.0;
  Vector direction_;
};

/// Upper-face tiling of the shadow. For every k-subset S whose block M_S of
/// the complement basis is nonsingular, solving M_S c = xi gives the unique
/// face (S, sign(c)) maximizing <xi, .> on the fibers above its projection.
/// Coordinates j with e_j in E are left out of the scan, so `max_subsets`
/// bounds C(n', k) where n' counts the remaining coordinates.
Tiling enumerate_tiling(const Subspace& s, const TilingOptions& options = {});

enum class LocateStatus { Inside, Boundary, Outside };

struct LocateResult {
  LocateStatus status = LocateStatus::Outside;
  std::size_t tile = 0;                ///< lowest accepting tile
  std::vector<std::size_t> candidates; ///< every accepting tile
  Vector u;                            ///< free-coordinate preimage in [-1,1]^{n-k}
  Vector preimage;                     ///< point of the cube projecting to x
};

/// Point location with per-tile factorizations cached. Intended for
/// tilings small enough that l dense (n-k)x(n-k) LUs fit in memory.
class TileLocator {
 public:
  explicit TileLocator(const Tiling& t, double tol = 1e-9);
  LocateResult locate(const Vector& x) const;

 private:
  const Tiling* tiling_;
  double tol_;
  std::vector<Vector> shifts_;
  std::vector<Eigen::PartialPivLU<Matrix>> lus_;
};

LocateResult locate(const Tiling& t, const Vector& x, double tol = 1e-9);

/// |K| via the zonotope formula 2^{n-k} sum_T |det B_T| over all
/// (n-k)-subsets T of columns of the basis. Independent of the tiling.
double zonotope_volume(const Subspace& s, std::uint64_t max_subsets = 10'000'000);

/// Advances `comb` (strictly increasing, values < n) to the next k-subset in
/// lexicographic order; returns false after the last one.
bool next_combination(std::vector<int>& comb, int n);

/// The `rank`-th k-subset of {0..n-1} in lexicographic order.
std::vector<int> unrank_combination(std::uint64_t rank, int n, int k);

}  // namespace cubeshadow
