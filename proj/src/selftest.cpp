#include "cubeshadow/cli.hpp"

#include "cubeshadow/exact_moments.hpp"
#include "cubeshadow/face_tiling.hpp"
#include "cubeshadow/grassmann_lab.hpp"
#include "cubeshadow/random.hpp"
#include "cubeshadow/sampler.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <string>

namespace cubeshadow {

namespace {

TilingOptions seeded(std::uint64_t seed) {
  TilingOptions opts;
  opts.seed = seed;
  return opts;
}

struct Check {
  std::string name;
  std::function<std::string()> run;  // empty string on success
};

std::string weight_normalization() {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Tiling t = enumerate_tiling(haar_subspace(8, 2, i), seeded(i));
    double sum = 0.0;
    for (double w : t.weights()) sum += w;
    if (std::abs(sum - 1.0) > 1e-10) return "sum of weights = " + std::to_string(sum);
  }
  return {};
}

std::string volume_cross_check() {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Subspace s = haar_subspace(10, 2, 100 + i);
    const Tiling t = enumerate_tiling(s, seeded(i));
    const double z = zonotope_volume(s);
    if (std::abs(t.total_volume() - z) > 1e-9 * z) return "tiling volume differs from zonotope volume";
  }
  return {};
}

std::string translation_identity() {
  Rng rng(20240917);
  for (int trial = 0; trial < 5; ++trial) {
    const int m = 1 + trial % 4;
    TileGeometry g;
    g.map = Matrix(m, m);
    g.shift = Vector(m);
    for (int i = 0; i < m; ++i) {
      g.shift[i] = rng.normal();
      for (int j = 0; j < m; ++j) g.map(i, j) = rng.normal() / std::sqrt(double(m));
    }
    g.gram = g.map.transpose() * g.map;
    const double exact = tile_variance(g);
    const std::size_t n = 200000;
    std::vector<double> vals(n);
    Vector u(m);
    for (std::size_t s = 0; s < n; ++s) {
      for (int i = 0; i < m; ++i) u[i] = rng.uniform(-1.0, 1.0);
      vals[s] = (g.shift + g.map * u).squaredNorm();
    }
    const MCMoments mc = mc_moments_of_values(vals);
    if (std::abs(mc.var_sq_hat - exact) > 4.0 * mc.se_var) return "MC variance off by > 4 SE";
  }
  return {};
}

std::string directional_consistency() {
  Rng rng(5);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const Subspace s = haar_subspace(9, 3, 300 + i);
    Vector c(s.dim());
    for (Eigen::Index j = 0; j < c.size(); ++j) c[j] = rng.normal();
    const Vector theta = s.from_E_coords(c / c.norm());
    const Face f = leading_face(3);
    const TileGeometry g = tile_geometry(s, f);
    const double shift_part = std::pow(g.shift.dot(s.to_E_coords(theta)), 2);
    double fixed_sq = 0.0;
    for (int idx : f.fixed) fixed_sq += theta[idx] * theta[idx];
    const double lhs = face_moment_dir(s, f, theta) - shift_part;
    if (std::abs(lhs - (1.0 - fixed_sq) / 3.0) > 1e-10) return "centered directional moment mismatch";
  }
  return {};
}

std::string sampler_equivalence(unsigned threads) {
  const std::pair<int, int> cases[] = {{4, 1}, {5, 2}, {6, 2}};
  std::uint64_t seed = 900;
  for (auto [n, k] : cases) {
    const Subspace s = haar_subspace(n, k, seed++);
    const Tiling t = enumerate_tiling(s, seeded(seed));
    const MCMoments a = mc_moments(sample_uniform(t, 20000, seed, threads));
    const MCMoments b = mc_moments(rejection_sample(s, 20000, seed + 1, threads));
    if (std::abs(a.mean_sq_hat - b.mean_sq_hat) > 4.0 * std::hypot(a.se_mean, b.se_mean))
      return "E|x|^2 estimates disagree";
    if (std::abs(a.var_sq_hat - b.var_sq_hat) > 4.0 * std::hypot(a.se_var, b.se_var))
      return "Var|x|^2 estimates disagree";
  }
  return {};
}

std::string bound_checks(unsigned threads) {
  EnsembleOptions opts;
  opts.threads = threads;
  for (int k = 1; k <= 3; ++k) {
    const auto recs = ensemble_run(12, k, 30, 77 + k, opts);
    if (summarize(recs).bound_violations != 0) return "bound violation at k = " + std::to_string(k);
  }
  const LipschitzProbe p = lipschitz_probe(10, 2, leading_face(2), 100, 3);
  if (!p.within_bound()) return "Lipschitz bound violated";
  return {};
}

std::string worked_example() {
  Matrix rows(1, 2);
  rows << 1.0, 1.0;
  const MomentReport r = body_report(enumerate_tiling(orthonormalize(rows, 2, 1)));
  if (std::abs(r.ratio - 0.8) > 1e-12) return "ratio = " + std::to_string(r.ratio);
  if (std::abs(r.variance - 16.0 / 45.0) > 1e-12) return "variance mismatch";
  return {};
}

}  // namespace

bool run_selftest(std::ostream& out, unsigned threads) {
  const Check checks[] = {
      {"weight normalization", weight_normalization},
      {"volume cross-check", volume_cross_check},
      {"translation identity", translation_identity},
      {"centered directional moments", directional_consistency},
      {"oracle sampler equivalence", [threads] { return sampler_equivalence(threads); }},
      {"moment and Lipschitz bounds", [threads] { return bound_checks(threads); }},
      {"worked example", worked_example},
  };
  bool ok = true;
  for (const auto& c : checks) {
    std::string failure;
    try {
      failure = c.run();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    out << (failure.empty() ? "PASS " : "FAIL ") << c.name;
    if (!failure.empty()) out << ": " << failure;
    out << '\n';
    ok = ok && failure.empty();
  }
  return ok;
}

}  // namespace cubeshadow
