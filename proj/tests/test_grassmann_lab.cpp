#include "cubeshadow/grassmann_lab.hpp"
#include "cubeshadow/random.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace cubeshadow;

TEST_CASE("grassmann_face_mean examples") {
  CHECK(grassmann_face_mean(2, 1) == doctest::Approx(2.0 / 3));
  CHECK(grassmann_face_mean(3, 1) == doctest::Approx(10.0 / 9));
  CHECK(grassmann_face_mean(16, 4) == doctest::Approx(6.0));
  CHECK(grassmann_face_mean(10, 0) == doctest::Approx(10.0 / 3));
}

TEST_CASE("grassmann_face_mean equals the rotation average of |x|^2 (n-k)/n over the face") {
  // for fixed x the Haar average of |P_E x|^2 is |x|^2 (n-k)/n, and
  // E|x|^2 over a k-face of the cube is k + (n-k)/3
  for (int n = 2; n <= 40; ++n)
    for (int k = 1; k < n; ++k)
      CHECK(grassmann_face_mean(n, k) == doctest::Approx((n - k) / static_cast<double>(n) * (k + (n - k) / 3.0)));
}

TEST_CASE("face_mean_experiment is consistent with its target") {
  const Face f{{0, 3}, {1, -1}};
  const FaceMeanResult r = face_mean_experiment(9, 2, f, 3000, 21);
  CHECK(r.trials == 3000);
  CHECK(r.target == doctest::Approx(grassmann_face_mean(9, 2)));
  CHECK(std::abs(r.z_score) < 4.0);
  CHECK(r.z_score == doctest::Approx((r.empirical_mean - r.target) / r.standard_error));
  const FaceMeanResult again = face_mean_experiment(9, 2, f, 3000, 21);
  CHECK(again.empirical_mean == r.empirical_mean);
  CHECK_THROWS_AS(face_mean_experiment(9, 2, Face{{0}, {1}}, 10, 1), Error);
}

TEST_CASE("ensemble_run determinism and replay") {
  const std::uint64_t seed = 99;
  const auto a = ensemble_run(8, 2, 12, seed);
  EnsembleOptions opt;
  opt.threads = 3;
  std::vector<std::uint64_t> order;
  opt.on_record = [&](const EnsembleRecord& r) { order.push_back(r.seed); };
  const auto b = ensemble_run(8, 2, 12, seed, opt);
  REQUIRE(a.size() == 12);
  REQUIRE(b.size() == 12);
  REQUIRE(order.size() == 12);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].seed == derive_seed(seed, i));
    CHECK(order[i] == a[i].seed);
    CHECK(a[i].ratio == b[i].ratio);
    CHECK(a[i].l == b[i].l);
    CHECK(a[i].wall_time == 0.0);
    CHECK(a[i].bounds_ok);
    CHECK(a[i].l <= binomial(8, 2));
    const EnsembleRecord r = ensemble_trial(8, 2, a[i].seed);
    CHECK(r.ratio == a[i].ratio);
    CHECK(r.mean_sq == a[i].mean_sq);
    CHECK(r.variance == a[i].variance);
  }
  opt.timing = true;
  opt.on_record = nullptr;
  for (const auto& r : ensemble_run(6, 1, 3, seed, opt)) CHECK(r.wall_time >= 0.0);
  CHECK_THROWS_AS(ensemble_run(5, 5, 3, seed), Error);
  CHECK_THROWS_AS(ensemble_run(5, 1, 0, seed), Error);
}

TEST_CASE("summarize examples") {
  std::vector<EnsembleRecord> recs(11);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    recs[i].ratio = static_cast<double>(11 - i);
    recs[i].bounds_ok = i != 4;
  }
  const EnsembleSummary s = summarize(recs, 8.5);
  CHECK(s.trials == 11);
  CHECK(s.max_ratio == 11.0);
  CHECK(s.min_ratio == 1.0);
  CHECK(s.median_ratio == doctest::Approx(6.0));
  CHECK(s.q90_ratio == doctest::Approx(10.0));
  CHECK(s.q99_ratio == doctest::Approx(10.9));
  CHECK(s.bound_violations == 1);
  CHECK(s.violation_fraction == doctest::Approx(1.0 / 11));
  CHECK(s.fraction_above_threshold == doctest::Approx(3.0 / 11));
  CHECK(s.threshold == 8.5);
}

TEST_CASE("lipschitz_pair examples and bound") {
  const Face f{{1}, {1}};
  const Subspace e = haar_subspace(6, 1, 3);
  const LipschitzPair same = lipschitz_pair(e, e, f);
  CHECK(same.degenerate);
  CHECK(same.delta_f == doctest::Approx(0.0).epsilon(1e-12));

  // rotating the plane of two coordinates by a small angle
  const Subspace a = axis_subspace(4, 1);
  const double t = 0.01;
  Matrix rows(3, 4);
  rows << 1, 0, 0, 0, 0, std::cos(t), 0, std::sin(t), 0, 0, 1, 0;
  const Subspace b = orthonormalize(rows, 4, 1);
  const LipschitzPair p = lipschitz_pair(a, b, Face{{3}, {1}});
  CHECK_FALSE(p.degenerate);
  CHECK(p.op_dist == doctest::Approx(std::sin(t)).epsilon(1e-10));
  CHECK(p.hs_dist == doctest::Approx(std::sqrt(2.0) * std::sin(t)).epsilon(1e-10));
  // f(E) = (n-k)/3 + |P e_4|^2 - |P e_4|^2 / 3, and |P e_4|^2 goes from 0 to sin^2 t
  CHECK(p.delta_f == doctest::Approx(2.0 / 3 * std::sin(t) * std::sin(t)).epsilon(1e-8));

  const LipschitzProbe probe = lipschitz_probe(10, 3, Face{{0, 4, 9}, {1, 1, -1}}, 40, 5);
  CHECK(probe.pairs.size() == 40);
  CHECK(probe.bound_op == doctest::Approx(8.0));
  CHECK(probe.bound_dist == doctest::Approx(8.0 * std::sqrt(2.0)));
  CHECK(probe.within_bound());
  CHECK(probe.max_ratio_op <= probe.bound_op);
  CHECK(probe.pairs[3].seed1 == derive_seed(5, 6));
  CHECK(probe.pairs[3].seed2 == derive_seed(5, 7));
}

TEST_CASE("deviation_histogram bookkeeping") {
  const DeviationHistogram h = deviation_histogram(9, 2, 20, 16, 4);
  CHECK(h.bin_edges.size() == 17);
  CHECK(h.bin_edges.front() == doctest::Approx(-8.0 / 3));
  CHECK(h.bin_edges.back() == doctest::Approx(8.0 / 3));
  CHECK(h.counts.size() == 16);
  CHECK(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}) == h.total);
  CHECK(h.total >= 20);
  CHECK(h.total <= 20 * binomial(9, 2));
  CHECK(h.target == doctest::Approx(grassmann_face_mean(9, 2)));
  CHECK(h.face_values_within_bounds);
  CHECK(h.deviations_within_width);
  CHECK(h.max_abs_dev <= 8.0 / 3);
  REQUIRE(h.tail_fractions.size() == h.tail_multipliers.size());
  for (std::size_t i = 1; i < h.tail_fractions.size(); ++i) CHECK(h.tail_fractions[i] <= h.tail_fractions[i - 1]);
  const DeviationHistogram g = deviation_histogram(9, 2, 20, 16, 4, 2);
  CHECK(g.counts == h.counts);
}

TEST_CASE("face mean does not depend on the face") {
  const std::vector<Face> faces{Face{{0, 1}, {1, 1}}, Face{{2, 7}, {-1, 1}}, Face{{4, 9}, {-1, -1}}};
  std::vector<FaceMeanResult> res;
  for (std::size_t i = 0; i < faces.size(); ++i) res.push_back(face_mean_experiment(10, 2, faces[i], 2000, 50 + i));
  for (std::size_t i = 0; i < res.size(); ++i) {
    CHECK(res[i].target == res[0].target);
    for (std::size_t j = i + 1; j < res.size(); ++j)
      CHECK(std::abs(res[i].empirical_mean - res[j].empirical_mean) <=
            4 * std::hypot(res[i].standard_error, res[j].standard_error));
  }
}
