#include "cubeshadow/exact_moments.hpp"
#include "cubeshadow/random.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace cubeshadow;

namespace {

Subspace diag2() {
  Matrix rows(1, 2);
  rows << 1, 1;
  return orthonormalize(rows, 2, 1);
}

Subspace diag3_perp() {
  Matrix rows(2, 3);
  rows << 1, -1, 0, 0, 1, -1;
  return orthonormalize(rows, 3, 1);
}

TilingOptions seeded(std::uint64_t seed) {
  TilingOptions o;
  o.seed = seed;
  return o;
}

Matrix random_symmetric(int m, Rng& rng) {
  Matrix q(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) q(i, j) = q(j, i) = rng.normal();
  return q;
}

double quad(const Matrix& q, const Eigen::VectorXd& u) { return u.dot(q * u); }

}  // namespace

TEST_CASE("centered_quadratic_variance examples") {
  CHECK(centered_quadratic_variance(Matrix::Identity(1, 1)) == doctest::Approx(4.0 / 45));
  CHECK(centered_quadratic_variance(Matrix::Identity(5, 5)) == doctest::Approx(20.0 / 45));
  Matrix off(2, 2);
  off << 0, 1, 1, 0;
  // u^T Q u = 2 u1 u2, variance 4 * (1/3)^2
  CHECK(centered_quadratic_variance(off) == doctest::Approx(4.0 / 9));
  Matrix asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(centered_quadratic_variance(asym), Error);
}

TEST_CASE("centered_quadratic_variance against box Monte Carlo") {
  const Matrix eye = Matrix::Identity(3, 3);
  const oracle::Estimate e = oracle::box_mc(3, 4000000, 1, [&](const Eigen::VectorXd& u) { return quad(eye, u); });
  CHECK(std::abs(e.var - 12.0 / 45) <= 4 * e.se_var);
  Rng rng(2);
  for (int m : {2, 4, 6}) {
    const Matrix q = random_symmetric(m, rng);
    const oracle::Estimate f = oracle::box_mc(m, 400000, 10 + m, [&](const Eigen::VectorXd& u) { return quad(q, u); });
    CAPTURE(m);
    CHECK(std::abs(f.var - centered_quadratic_variance(q)) <= 4 * f.se_var);
    CHECK(std::abs(f.mean - q.trace() / 3) <= 4 * f.se_mean);
  }
}

TEST_CASE("diagonal line in R^2") {
  const Subspace s = diag2();
  // tile {y1 = 1}: x = (1 + y2)/sqrt(2), y2 uniform on [-1, 1]
  auto moment = [](int p) {
    return oracle::simpson([p](double y) { return 0.5 * std::pow((1 + y) / std::sqrt(2.0), p); }, -1, 1);
  };
  const double m2 = moment(2), m4 = moment(4);
  for (const Face& f : {Face{{0}, {1}}, Face{{1}, {-1}}}) {
    const TileGeometry g = tile_geometry(s, f);
    CHECK(face_moment(s, f) == doctest::Approx(m2).epsilon(1e-12));
    CHECK(face_moment(s, f) == doctest::Approx(2.0 / 3).epsilon(1e-14));
    CHECK(tile_variance(g) == doctest::Approx(m4 - m2 * m2).epsilon(1e-10));
    CHECK(tile_variance(g) == doctest::Approx(16.0 / 45).epsilon(1e-14));
    CHECK(face_moment_dir(s, f, s.basis().row(0).transpose()) == doctest::Approx(2.0 / 3).epsilon(1e-14));
  }
  const MomentReport r = body_report(enumerate_tiling(s, seeded(0)));
  CHECK(r.mean_sq == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(r.variance == doctest::Approx(16.0 / 45).epsilon(1e-14));
  CHECK(r.lambda_sq == doctest::Approx(2.0 / 3).epsilon(1e-14));
  CHECK(r.ratio == doctest::Approx(0.8).epsilon(1e-14));
}

TEST_CASE("regular hexagon as the shadow of the 3-cube") {
  const Subspace s = diag3_perp();
  const Face f{{0}, {1}};
  const TileGeometry g = tile_geometry(s, f);
  CHECK(face_moment(s, f) == doctest::Approx(10.0 / 9).epsilon(1e-14));
  CHECK(tile_variance(g) == doctest::Approx(172.0 / 405).epsilon(1e-13));
  CHECK(tile_mean_sq(g) == doctest::Approx(10.0 / 9).epsilon(1e-14));

  const Eigen::MatrixXd b = s.basis();
  const oracle::Estimate e =
      oracle::face_mc(b, {0}, {1}, 1000000, 3, [](const Eigen::VectorXd& x) { return x.squaredNorm(); });
  CHECK(std::abs(e.mean - 10.0 / 9) <= 4 * e.se_mean);
  CHECK(std::abs(e.var - 172.0 / 405) <= 4 * e.se_var);

  const MomentReport r = body_report(enumerate_tiling(s, seeded(0)));
  CHECK(r.mean_sq == doctest::Approx(10.0 / 9).epsilon(1e-14));
  CHECK(r.variance == doctest::Approx(172.0 / 405).epsilon(1e-13));
  CHECK(r.lambda_sq == doctest::Approx(5.0 / 9).epsilon(1e-14));
  CHECK(r.ratio == doctest::Approx(86.0 / 125).epsilon(1e-13));

  // independent check on the whole hexagon by rejection from its bounding box
  const auto pts = oracle::hexagon_points(b, 400000, 4);
  std::vector<double> sq;
  double cxx = 0, cxy = 0, cyy = 0;
  for (const auto& p : pts) {
    sq.push_back(p.squaredNorm());
    cxx += p.x() * p.x();
    cxy += p.x() * p.y();
    cyy += p.y() * p.y();
  }
  const double n = static_cast<double>(pts.size());
  const oracle::Estimate h = oracle::estimate(sq);
  CHECK(std::abs(h.mean - r.mean_sq) <= 4 * h.se_mean);
  CHECK(std::abs(h.var - r.variance) <= 4 * h.se_var);
  const auto [lo, hi] = oracle::eig2(cxx / n, cxy / n, cyy / n);
  CHECK(hi == doctest::Approx(5.0 / 9).epsilon(0.01));
  CHECK(lo == doctest::Approx(5.0 / 9).epsilon(0.01));
}

TEST_CASE("axis-aligned subspace gives the cube of dimension n-k") {
  for (auto [n, k] : {std::pair{5, 2}, std::pair{9, 3}}) {
    const MomentReport r = body_report(enumerate_tiling(axis_subspace(n, k), seeded(0)));
    const int m = n - k;
    CHECK(r.mean_sq == doctest::Approx(m / 3.0).epsilon(1e-14));
    CHECK(r.variance == doctest::Approx(4.0 * m / 45).epsilon(1e-14));
    CHECK(r.lambda_sq == doctest::Approx(1.0 / 3).epsilon(1e-14));
    CHECK(r.ratio == doctest::Approx(0.8).epsilon(1e-13));
    CHECK(r.covariance.isApprox(Matrix::Identity(m, m) / 3.0));
  }
}

TEST_CASE("face moments against face Monte Carlo on Haar subspaces") {
  Rng rng(5);
  for (std::uint64_t i = 0; i < 6; ++i) {
    const int n = 5 + static_cast<int>(i), k = 1 + static_cast<int>(i % 3);
    const Subspace s = haar_subspace(n, k, 100 + i);
    const std::vector<int> fixed = unrank_combination(rng.next_u64() % binomial(n, k), n, k);
    std::vector<int> signs;
    for (int j = 0; j < k; ++j) signs.push_back(rng.uniform() < 0.5 ? -1 : 1);
    const Face f{fixed, signs};
    const Eigen::MatrixXd b = s.basis();
    const oracle::Estimate e =
        oracle::face_mc(b, fixed, signs, 300000, 7 + i, [](const Eigen::VectorXd& x) { return x.squaredNorm(); });
    const TileGeometry g = tile_geometry(s, f);
    CAPTURE(n);
    CAPTURE(k);
    CHECK(std::abs(e.mean - face_moment(s, f)) <= 4 * e.se_mean);
    CHECK(std::abs(e.var - tile_variance(g)) <= 4 * e.se_var);

    Vector theta = s.basis().transpose() * Vector::Random(n - k);
    theta.normalize();
    const Vector te = s.to_E_coords(theta);
    const oracle::Estimate d = oracle::face_mc(b, fixed, signs, 300000, 70 + i, [&](const Eigen::VectorXd& x) {
      const double v = x.dot(te);
      return v * v;
    });
    CHECK(std::abs(d.mean - face_moment_dir(s, f, theta)) <= 4 * d.se_mean);
  }
}

TEST_CASE("directional moments over an orthonormal frame sum to the face moment") {
  for (std::uint64_t i = 0; i < 50; ++i) {
    const int n = 4 + static_cast<int>(i % 8), k = 1 + static_cast<int>(i % 3);
    const Subspace s = haar_subspace(n, k, i);
    Face f;
    for (int j = 0; j < k; ++j) {
      f.fixed.push_back(2 * j % n);
      f.signs.push_back(j % 2 ? -1 : 1);
    }
    std::sort(f.fixed.begin(), f.fixed.end());
    f.fixed.erase(std::unique(f.fixed.begin(), f.fixed.end()), f.fixed.end());
    if (static_cast<int>(f.fixed.size()) != k) continue;
    double sum = 0.0;
    for (int r = 0; r < n - k; ++r) sum += face_moment_dir(s, f, s.basis().row(r).transpose());
    CHECK(sum == doctest::Approx(face_moment(s, f)).epsilon(1e-12));
  }
}

TEST_CASE("face_moment_dir validates its direction") {
  const Subspace s = diag3_perp();
  const Face f{{0}, {1}};
  CHECK_THROWS_AS(face_moment_dir(s, f, 2.0 * s.basis().row(0).transpose()), Error);
  CHECK_THROWS_AS(face_moment_dir(s, f, Vector::Ones(3) / std::sqrt(3.0)), Error);
  CHECK_THROWS_AS(face_moment_dir(s, f, Vector::Ones(2)), Error);
}

TEST_CASE("body_report agrees with per-tile geometry") {
  for (auto [n, k] : {std::pair{6, 2}, std::pair{9, 3}, std::pair{10, 1}, std::pair{8, 4}}) {
    const Subspace s = haar_subspace(n, k, 7 * n + k);
    const Tiling t = enumerate_tiling(s, seeded(1));
    const MomentReport r = body_report(t);
    REQUIRE(r.per_tile.size() == t.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const TileGeometry g = t.geometry(i);
      CHECK(r.per_tile[i].mean_sq == doctest::Approx(tile_mean_sq(g)).epsilon(1e-10));
      CHECK(r.per_tile[i].mean_sq == doctest::Approx(face_moment(s, t.face(i))).epsilon(1e-10));
      CHECK(r.per_tile[i].variance == doctest::Approx(tile_variance(g)).epsilon(1e-9));
      mean += t.weight(i) * r.per_tile[i].mean_sq;
    }
    double var = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double d = r.per_tile[i].mean_sq - mean;
      var += t.weight(i) * (r.per_tile[i].variance + d * d);
    }
    CHECK(r.mean_sq == doctest::Approx(mean).epsilon(1e-12));
    CHECK(r.variance == doctest::Approx(var).epsilon(1e-10));
    CHECK(r.covariance.trace() == doctest::Approx(r.mean_sq).epsilon(1e-12));
    CHECK((r.covariance - r.covariance.transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r.covariance);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK(r.lambda_sq == doctest::Approx(eig.eigenvalues().maxCoeff()).epsilon(1e-13));
    CHECK(r.ratio == doctest::Approx(r.variance / (r.lambda_sq * r.mean_sq)).epsilon(1e-14));
    CHECK(body_report(t, false).per_tile.empty());
  }
}

TEST_CASE("moment report is independent of the tiling direction") {
  const Subspace s = haar_subspace(8, 3, 99);
  const MomentReport a = body_report(enumerate_tiling(s, seeded(1)));
  const MomentReport b = body_report(enumerate_tiling(s, seeded(2)));
  CHECK(a.mean_sq == doctest::Approx(b.mean_sq).epsilon(1e-12));
  CHECK(a.variance == doctest::Approx(b.variance).epsilon(1e-10));
  CHECK(a.lambda_sq == doctest::Approx(b.lambda_sq).epsilon(1e-12));
}

TEST_CASE("moment bounds hold on Haar subspaces") {
  for (std::uint64_t i = 0; i < 60; ++i) {
    const int n = 4 + static_cast<int>(i % 9);
    const int k = 1 + static_cast<int>(i % std::max(1, n / 3));
    const Subspace s = haar_subspace(n, k, 1000 + i);
    const MomentReport r = body_report(enumerate_tiling(s, seeded(i)));
    CAPTURE(n);
    CAPTURE(k);
    CHECK(r.bounds.all_ok());
    CHECK(r.bounds.mean_lower == doctest::Approx((n - 2.0 * k) / 3));
    CHECK(r.bounds.mean_upper == doctest::Approx((n + 2.0 * k) / 3));
    CHECK(r.bounds.max_face_dev <= 4.0 * k / 3);
    CHECK(r.bounds.max_tile_var_over_n <= 1.0);
    CHECK(r.ratio > 0.0);
  }
}

TEST_CASE("largest_eigenvalue") {
  Matrix a(3, 3);
  a << 2, 1, 0, 1, 2, 0, 0, 0, 1;
  CHECK(largest_eigenvalue(a) == doctest::Approx(3.0));
}
