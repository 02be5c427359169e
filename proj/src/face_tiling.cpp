#include "cubeshadow/face_tiling.hpp"

#include "cubeshadow/parallel.hpp"
#include "cubeshadow/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cubeshadow {

void validate_face(const Face& f, int n, int k) {
  if (static_cast<int>(f.fixed.size()) != k || static_cast<int>(f.signs.size()) != k)
    throw Error(ErrorKind::InvalidArgument,
                "face must fix exactly k = " + std::to_string(k) + " coordinates");
  for (int j = 0; j < k; ++j) {
    if (f.fixed[j] < 0 || f.fixed[j] >= n)
      throw Error(ErrorKind::InvalidArgument, "face index out of range");
    if (j > 0 && f.fixed[j] <= f.fixed[j - 1])
      throw Error(ErrorKind::InvalidArgument, "face indices must be strictly increasing");
    if (f.signs[j] != 1 && f.signs[j] != -1)
      throw Error(ErrorKind::InvalidArgument, "face signs must be +1 or -1");
  }
}

std::vector<int> free_coordinates(const Face& f, int n) {
  std::vector<int> out;
  out.reserve(n - f.fixed.size());
  std::size_t p = 0;
  for (int j = 0; j < n; ++j) {
    if (p < f.fixed.size() && f.fixed[p] == j) {
      ++p;
      continue;
    }
    out.push_back(j);
  }
  return out;
}

Face leading_face(int k) {
  Face f;
  for (int j = 0; j < k; ++j) {
    f.fixed.push_back(j);
    f.signs.push_back(1);
  }
  return f;
}

TileGeometry tile_geometry(const Subspace& s, const Face& f) {
  validate_face(f, s.n(), s.k());
  const Matrix& b = s.basis();
  const int m = s.dim();
  TileGeometry g;
  g.shift = Vector::Zero(m);
  for (std::size_t j = 0; j < f.fixed.size(); ++j) g.shift += f.signs[j] * b.col(f.fixed[j]);
  const std::vector<int> free = free_coordinates(f, s.n());
  g.map.resize(m, m);
  for (int c = 0; c < m; ++c) g.map.col(c) = b.col(free[c]);
  g.gram = g.map.transpose() * g.map;
  g.volume = std::ldexp(std::abs(g.map.determinant()), m);
  return g;
}

Face Tiling::face(std::size_t i) const {
  Face f;
  auto fx = fixed(i);
  auto sg = signs(i);
  f.fixed.assign(fx.begin(), fx.end());
  f.signs.assign(sg.begin(), sg.end());
  return f;
}

bool next_combination(std::vector<int>& comb, int n) {
  const int k = static_cast<int>(comb.size());
  int i = k - 1;
  while (i >= 0 && comb[i] == n - k + i) --i;
  if (i < 0) return false;
  ++comb[i];
  for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  return true;
}

std::vector<int> unrank_combination(std::uint64_t rank, int n, int k) {
  std::vector<int> comb;
  comb.reserve(k);
  int next = 0;
  for (int slot = 0; slot < k; ++slot) {
    // Skip leading values while the block of subsets starting with them
    // lies entirely below `rank`.
    for (;; ++next) {
      const std::uint64_t block = binomial(n - next - 1, k - slot - 1);
      if (rank < block) break;
      rank -= block;
    }
    comb.push_back(next++);
  }
  return comb;
}

namespace {

constexpr std::uint64_t kChunk = 1u << 15;
constexpr double kAbsDetFloor = 1e-300;
constexpr double kNullColumn = 1e-14;

struct SubsetScan {
  std::vector<double> abs_det;
  std::vector<signed char> signs;  // k per subset
  std::vector<double> min_ratio;   // min |c_i| / |c|_inf per subset
};

// Scans the k-subsets of `cols` in lexicographic order.
SubsetScan scan_subsets(const Subspace& s, const std::vector<int>& cols, const Vector& xi,
                        std::uint64_t total, unsigned threads) {
  const int n = static_cast<int>(cols.size());
  const int k = s.k();
  const Matrix& comp = s.complement();
  SubsetScan scan;
  scan.abs_det.resize(total);
  scan.signs.resize(total * k);
  scan.min_ratio.resize(total);
  const std::size_t chunks = (total + kChunk - 1) / kChunk;

  parallel_for(chunks, threads, [&](std::size_t chunk) {
    const std::uint64_t begin = chunk * kChunk;
    const std::uint64_t end = std::min<std::uint64_t>(total, begin + kChunk);
    std::vector<int> comb = unrank_combination(begin, n, k);
    Matrix m_s(k, k);
    Eigen::PartialPivLU<Matrix> lu(k);
    Vector c(k);
    for (std::uint64_t r = begin; r < end; ++r) {
      for (int j = 0; j < k; ++j) m_s.col(j) = comp.col(cols[comb[j]]);
      lu.compute(m_s);
      const double det = lu.determinant();
      scan.abs_det[r] = std::abs(det);
      if (det != 0.0 && std::isfinite(det)) {
        c.noalias() = lu.solve(xi);
        const double cmax = c.cwiseAbs().maxCoeff();
        double ratio = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          scan.signs[r * k + j] = c[j] >= 0.0 ? 1 : -1;
          ratio = std::min(ratio, cmax > 0.0 ? std::abs(c[j]) / cmax : 0.0);
        }
        scan.min_ratio[r] = ratio;
      } else {
        scan.min_ratio[r] = 0.0;
      }
      next_combination(comb, n);
    }
  });
  return scan;
}

Vector random_direction(int k, std::uint64_t seed, int attempt) {
  Rng rng(seed, 0x5ead0000ULL + static_cast<std::uint64_t>(attempt));
  Vector xi(k);
  do {
    for (int j = 0; j < k; ++j) xi[j] = rng.normal();
  } while (xi.norm() == 0.0);
  return xi / xi.norm();
}

}  // namespace

Tiling enumerate_tiling(const Subspace& s, const TilingOptions& options) {
  const int n = s.n();
  const int k = s.k();
  const int m = s.dim();
  Tiling t(s);

  if (k == 0) {
    t.volumes_ = {std::ldexp(1.0, m)};
    t.weights_ = {1.0};
    t.total_volume_ = t.volumes_[0];
    t.direction_ = Vector(0);
    return t;
  }

  // Coordinates with e_j in E have a zero complement column, so no subset
  // containing them has a nonzero minor. By Hadamard's inequality such a
  // subset's minor is at most that column's norm; the skip is confirmed
  // against the cutoff below and undone if it does not hold.
  std::vector<int> active;
  double max_skipped = 0.0;
  for (int j = 0; j < n; ++j) {
    const double norm = s.complement().col(j).norm();
    if (norm > kNullColumn) active.push_back(j);
    else max_skipped = std::max(max_skipped, norm);
  }
  if (static_cast<int>(active.size()) < k) {
    active.resize(n);
    for (int j = 0; j < n; ++j) active[j] = j;
    max_skipped = 0.0;
  }

  auto subset_count = [&] {
    const std::uint64_t total = binomial(static_cast<int>(active.size()), k);
    if (total > options.max_subsets)
      throw Error(ErrorKind::TooManySubsets, "C(" + std::to_string(active.size()) + "," + std::to_string(k) +
                                                 ") exceeds the subset cap of " +
                                                 std::to_string(options.max_subsets));
    return total;
  };
  std::uint64_t total = subset_count();
  if (options.direction) {
    if (options.direction->size() != k)
      throw Error(ErrorKind::DimensionMismatch, "direction must have length k");
    if (!(options.direction->norm() > 0.0))
      throw Error(ErrorKind::InvalidArgument, "direction must be nonzero");
  }

  const int attempts = options.direction ? 1 : std::max(1, options.max_direction_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    const Vector xi = options.direction ? *options.direction : random_direction(k, options.seed, attempt);
    SubsetScan scan = scan_subsets(s, active, xi, total, options.threads);
    double max_det = *std::max_element(scan.abs_det.begin(), scan.abs_det.end());
    if (max_skipped > 0.0 && !(max_skipped <= options.det_rel_tol * max_det)) {
      active.resize(n);
      for (int j = 0; j < n; ++j) active[j] = j;
      max_skipped = 0.0;
      total = subset_count();
      scan = scan_subsets(s, active, xi, total, options.threads);
      max_det = *std::max_element(scan.abs_det.begin(), scan.abs_det.end());
    }
    if (!(max_det > kAbsDetFloor))
      throw Error(ErrorKind::DegenerateSubspace, "every k x k minor of the complement basis vanishes");
    const double cutoff = options.det_rel_tol * max_det;

    bool degenerate_direction = false;
    for (std::uint64_t r = 0; r < total; ++r) {
      if (scan.abs_det[r] > cutoff && scan.min_ratio[r] <= options.sign_rel_tol) {
        degenerate_direction = true;
        break;
      }
    }
    if (degenerate_direction) continue;

    std::vector<int> comb(k);
    for (int j = 0; j < k; ++j) comb[j] = j;
    const int n_active = static_cast<int>(active.size());
    for (std::uint64_t r = 0; r < total; ++r, next_combination(comb, n_active)) {
      if (!(scan.abs_det[r] > cutoff)) continue;
      for (int j : comb) t.fixed_.push_back(active[j]);
      t.signs_.insert(t.signs_.end(), scan.signs.begin() + r * k, scan.signs.begin() + (r + 1) * k);
      // |det T_F| equals |det M_S|: complementary minors of the orthogonal
      // matrix [basis; complement].
      t.volumes_.push_back(std::ldexp(scan.abs_det[r], m));
    }
    double sum = 0.0;
    for (double v : t.volumes_) sum += v;
    t.total_volume_ = sum;
    t.weights_.resize(t.volumes_.size());
    for (std::size_t i = 0; i < t.volumes_.size(); ++i) t.weights_[i] = t.volumes_[i] / sum;
    t.direction_ = xi;
    return t;
  }
  throw Error(ErrorKind::DegenerateDirection,
              options.direction ? "supplied direction lies on a cone facet (zero multiplier)"
                                : "no generic direction found after " + std::to_string(attempts) +
                                      " attempts");
}

TileLocator::TileLocator(const Tiling& t, double tol) : tiling_(&t), tol_(tol) {
  shifts_.reserve(t.size());
  lus_.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    TileGeometry g = t.geometry(i);
    shifts_.push_back(std::move(g.shift));
    lus_.emplace_back(g.map);
  }
}

LocateResult TileLocator::locate(const Vector& x) const {
  const Tiling& t = *tiling_;
  if (x.size() != t.subspace().dim())
    throw Error(ErrorKind::DimensionMismatch, "locate: point must have length n - k");
  LocateResult res;
  for (std::size_t i = 0; i < lus_.size(); ++i) {
    Vector u = lus_[i].solve(x - shifts_[i]);
    if (u.cwiseAbs().maxCoeff() <= 1.0 + tol_) {
      if (res.candidates.empty()) {
        res.tile = i;
        res.u = std::move(u);
      }
      res.candidates.push_back(i);
    }
  }
  if (res.candidates.empty()) {
    res.status = LocateStatus::Outside;
    return res;
  }
  res.status = res.candidates.size() == 1 ? LocateStatus::Inside : LocateStatus::Boundary;
  const Face f = t.face(res.tile);
  const std::vector<int> free = free_coordinates(f, t.n());
  res.preimage = Vector::Zero(t.n());
  for (std::size_t j = 0; j < f.fixed.size(); ++j) res.preimage[f.fixed[j]] = f.signs[j];
  for (std::size_t j = 0; j < free.size(); ++j) res.preimage[free[j]] = res.u[j];
  return res;
}

LocateResult locate(const Tiling& t, const Vector& x, double tol) {
  return TileLocator(t, tol).locate(x);
}

double zonotope_volume(const Subspace& s, std::uint64_t max_subsets) {
  const int n = s.n();
  const int m = s.dim();
  const std::uint64_t total = binomial(n, m);
  if (total > max_subsets)
    throw Error(ErrorKind::TooManySubsets, "C(" + std::to_string(n) + "," + std::to_string(m) +
                                               ") exceeds the subset cap of " +
                                               std::to_string(max_subsets));
  const Matrix& b = s.basis();
  std::vector<int> comb(m);
  for (int j = 0; j < m; ++j) comb[j] = j;
  Matrix sub(m, m);
  Eigen::PartialPivLU<Matrix> lu(m);
  double sum = 0.0;
  do {
    for (int j = 0; j < m; ++j) sub.col(j) = b.col(comb[j]);
    lu.compute(sub);
    sum += std::abs(lu.determinant());
  } while (next_combination(comb, n));
  return std::ldexp(sum, m);
}

}  // namespace cubeshadow
