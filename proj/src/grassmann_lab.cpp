#include "cubeshadow/grassmann_lab.hpp"

#include "cubeshadow/parallel.hpp"
#include "cubeshadow/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

namespace cubeshadow {

namespace {

void check_params(int n, int k, std::size_t trials) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "n must be >= 2");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  if (k >= n) throw Error(ErrorKind::InvalidArgument, "k must be < n");
  if (trials < 1) throw Error(ErrorKind::InvalidArgument, "trials must be >= 1");
}

double quantile(std::vector<double> sorted_values, double q) {
  if (sorted_values.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted_values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo]);
}

}  // namespace

EnsembleRecord ensemble_trial(int n, int k, std::uint64_t trial_seed, bool timing) {
  const auto start = std::chrono::steady_clock::now();
  const Subspace s = haar_subspace(n, k, trial_seed);
  TilingOptions opts;
  opts.seed = trial_seed;
  const Tiling t = enumerate_tiling(s, opts);
  const MomentReport rep = body_report(t, false);
  EnsembleRecord rec;
  rec.seed = trial_seed;
  rec.n = n;
  rec.k = k;
  rec.ratio = rep.ratio;
  rec.mean_sq = rep.mean_sq;
  rec.variance = rep.variance;
  rec.lambda_sq = rep.lambda_sq;
  rec.max_face_dev = rep.bounds.max_face_dev;
  rec.l = t.size();
  rec.bounds_ok = rep.bounds.all_ok() && std::isfinite(rep.ratio) && rep.ratio > 0.0;
  if (timing)
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<EnsembleRecord> ensemble_run(int n, int k, std::size_t trials, std::uint64_t seed,
                                         const EnsembleOptions& options) {
  check_params(n, k, trials);
  if (binomial(n, k) > TilingOptions{}.max_subsets)
    throw Error(ErrorKind::TooManySubsets, "C(n,k) exceeds the subset cap");
  std::vector<EnsembleRecord> records(trials);
  // Work in waves of `threads` trials so records can be streamed in order.
  const std::size_t wave = std::max(1u, options.threads);
  for (std::size_t begin = 0; begin < trials; begin += wave) {
    const std::size_t count = std::min(wave, trials - begin);
    parallel_for(count, options.threads, [&](std::size_t i) {
      records[begin + i] = ensemble_trial(n, k, derive_seed(seed, begin + i), options.timing);
    });
    if (options.on_record) {
      for (std::size_t i = 0; i < count; ++i) options.on_record(records[begin + i]);
    }
  }
  return records;
}

EnsembleSummary summarize(const std::vector<EnsembleRecord>& records, double threshold) {
  EnsembleSummary sum;
  sum.trials = records.size();
  sum.threshold = threshold;
  if (records.empty()) return sum;
  std::vector<double> ratios;
  ratios.reserve(records.size());
  std::size_t above = 0;
  for (const auto& r : records) {
    ratios.push_back(r.ratio);
    if (!r.bounds_ok) ++sum.bound_violations;
    if (r.ratio > threshold) ++above;
  }
  std::sort(ratios.begin(), ratios.end());
  sum.min_ratio = ratios.front();
  sum.max_ratio = ratios.back();
  sum.median_ratio = quantile(ratios, 0.5);
  sum.q90_ratio = quantile(ratios, 0.9);
  sum.q99_ratio = quantile(ratios, 0.99);
  sum.violation_fraction = static_cast<double>(sum.bound_violations) / static_cast<double>(records.size());
  sum.fraction_above_threshold = static_cast<double>(above) / static_cast<double>(records.size());
  return sum;
}

double grassmann_face_mean(int n, int k) {
  return static_cast<double>(n - k) * static_cast<double>(n + 2 * k) / (3.0 * n);
}

FaceMeanResult face_mean_experiment(int n, int k, const Face& face, std::size_t trials, std::uint64_t seed) {
  check_params(n, k, trials);
  validate_face(face, n, k);
  std::vector<double> values(trials);
  for (std::size_t i = 0; i < trials; ++i)
    values[i] = face_moment(haar_subspace(n, k, derive_seed(seed, i)), face);
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(trials);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  FaceMeanResult res;
  res.trials = trials;
  res.empirical_mean = mean;
  res.target = grassmann_face_mean(n, k);
  res.standard_error = trials > 1 ? std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials)) : 0.0;
  res.z_score = res.standard_error > 0.0 ? (mean - res.target) / res.standard_error : 0.0;
  return res;
}

LipschitzPair lipschitz_pair(const Subspace& e1, const Subspace& e2, const Face& face) {
  LipschitzPair p;
  p.delta_f = std::abs(face_moment(e1, face) - face_moment(e2, face));
  const ProjectorDistance d = projector_distance(e1, e2);
  p.op_dist = d.op;
  p.hs_dist = d.hs;
  p.degenerate = d.op <= 1e-14;
  return p;
}

bool LipschitzProbe::within_bound(double tol) const {
  for (const auto& p : pairs) {
    if (p.delta_f > bound_op * p.op_dist + tol) return false;
  }
  return true;
}

LipschitzProbe lipschitz_probe(int n, int k, const Face& face, std::size_t pairs, std::uint64_t seed) {
  check_params(n, k, pairs);
  validate_face(face, n, k);
  LipschitzProbe probe;
  probe.face = face;
  probe.bound_op = 8.0 * k / 3.0;
  probe.bound_dist = 8.0 * std::sqrt(2.0) * k / 3.0;
  probe.pairs.reserve(pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const std::uint64_t s1 = derive_seed(seed, 2 * i);
    const std::uint64_t s2 = derive_seed(seed, 2 * i + 1);
    LipschitzPair p = lipschitz_pair(haar_subspace(n, k, s1), haar_subspace(n, k, s2), face);
    p.seed1 = s1;
    p.seed2 = s2;
    if (p.degenerate) {
      ++probe.excluded;
    } else {
      probe.max_ratio_op = std::max(probe.max_ratio_op, p.delta_f / p.op_dist);
      probe.max_ratio_hs = std::max(probe.max_ratio_hs, p.delta_f / p.hs_dist);
    }
    probe.pairs.push_back(p);
  }
  return probe;
}

DeviationHistogram deviation_histogram(int n, int k, std::size_t trials, std::size_t bins,
                                       std::uint64_t seed, unsigned threads) {
  check_params(n, k, trials);
  if (bins < 1) throw Error(ErrorKind::InvalidArgument, "bins must be >= 1");
  DeviationHistogram h;
  h.n = n;
  h.k = k;
  h.target = grassmann_face_mean(n, k);
  const double half = 4.0 * k / 3.0;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    h.bin_edges[i] = -half + 2.0 * half * static_cast<double>(i) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  h.tail_multipliers = {0.5, 1.0, 2.0, 4.0};
  std::vector<std::uint64_t> tails(h.tail_multipliers.size(), 0);

  std::vector<std::vector<double>> per_trial(trials);
  parallel_for(trials, threads, [&](std::size_t i) {
    const std::uint64_t trial_seed = derive_seed(seed, i);
    const Subspace s = haar_subspace(n, k, trial_seed);
    TilingOptions opts;
    opts.seed = trial_seed;
    const Tiling t = enumerate_tiling(s, opts);
    per_trial[i].reserve(t.size());
    for (std::size_t j = 0; j < t.size(); ++j) per_trial[i].push_back(face_moment(s, t.face(j)));
  });

  const double lower = (n - 2.0 * k) / 3.0;
  const double upper = (n + 2.0 * k) / 3.0;
  const double rootn = std::sqrt(static_cast<double>(n));
  for (const auto& values : per_trial) {
    for (double v : values) {
      if (v < lower - 1e-9 || v > upper + 1e-9) h.face_values_within_bounds = false;
      const double dev = v - h.target;
      h.max_abs_dev = std::max(h.max_abs_dev, std::abs(dev));
      if (std::abs(dev) > half + 1e-9) h.deviations_within_width = false;
      auto bin = static_cast<std::ptrdiff_t>(std::floor((dev + half) / (2.0 * half) * static_cast<double>(bins)));
      bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(bins) - 1);
      ++h.counts[static_cast<std::size_t>(bin)];
      for (std::size_t t = 0; t < tails.size(); ++t)
        if (std::abs(dev) > h.tail_multipliers[t] * rootn) ++tails[t];
      ++h.total;
    }
  }
  h.tail_fractions.resize(tails.size());
  for (std::size_t t = 0; t < tails.size(); ++t)
    h.tail_fractions[t] = h.total ? static_cast<double>(tails[t]) / static_cast<double>(h.total) : 0.0;
  return h;
}

}  // namespace cubeshadow
