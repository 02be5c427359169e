#pragma once

#include "cubeshadow/exact_moments.hpp"
#include "cubeshadow/face_tiling.hpp"
#include "cubeshadow/subspace.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace cubeshadow {

struct EnsembleRecord {
  std::uint64_t seed = 0;  ///< seed of this trial's subspace (and its tiling)
  int n = 0;
  int k = 0;
  double ratio = 0.0;
  double mean_sq = 0.0;
  double variance = 0.0;
  double lambda_sq = 0.0;
  double max_face_dev = 0.0;
  std::size_t l = 0;
  double wall_time = 0.0;  ///< seconds; 0 unless timing was requested
  bool bounds_ok = false;
};

struct EnsembleOptions {
  unsigned threads = 1;
  bool timing = false;
  /// Called once per record, in trial order, as soon as the record and all
  /// its predecessors are available.
  std::function<void(const EnsembleRecord&)> on_record;
};

/// Trial i analyzes the Haar subspace with seed derive_seed(seed, i).
std::vector<EnsembleRecord> ensemble_run(int n, int k, std::size_t trials, std::uint64_t seed,
                                         const EnsembleOptions& options = {});

/// One trial, for replaying a single record.
EnsembleRecord ensemble_trial(int n, int k, std::uint64_t trial_seed, bool timing = false);

struct EnsembleSummary {
  std::size_t trials = 0;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  double median_ratio = 0.0;
  double q90_ratio = 0.0;
  double q99_ratio = 0.0;
  std::size_t bound_violations = 0;
  double violation_fraction = 0.0;
  double threshold = 0.0;
  double fraction_above_threshold = 0.0;
};

EnsembleSummary summarize(const std::vector<EnsembleRecord>& records, double threshold = 10.0);

/// Grassmannian average of E_F |P_E x|^2, which is independent of F.
double grassmann_face_mean(int n, int k);

struct FaceMeanResult {
  double empirical_mean = 0.0;
  double target = 0.0;
  double standard_error = 0.0;
  double z_score = 0.0;
  std::size_t trials = 0;
};

FaceMeanResult face_mean_experiment(int n, int k, const Face& face, std::size_t trials, std::uint64_t seed);

struct LipschitzPair {
  std::uint64_t seed1 = 0;
  std::uint64_t seed2 = 0;
  double delta_f = 0.0;  ///< |f(E1) - f(E2)| with f(E) = E_F |P_E x|^2
  double op_dist = 0.0;
  double hs_dist = 0.0;
  bool degenerate = false;  ///< E1 == E2 numerically; excluded from ratios
};

struct LipschitzProbe {
  std::vector<LipschitzPair> pairs;
  Face face;
  double bound_op = 0.0;        ///< 8k/3, against the operator norm
  double bound_dist = 0.0;      ///< 8 sqrt(2) k / 3, against d(E1, E2)
  double max_ratio_op = 0.0;
  double max_ratio_hs = 0.0;
  std::size_t excluded = 0;

  bool within_bound(double tol = 1e-9) const;
};

LipschitzPair lipschitz_pair(const Subspace& e1, const Subspace& e2, const Face& face);

/// Pair p compares the Haar subspaces with seeds derive_seed(seed, 2p) and
/// derive_seed(seed, 2p + 1).
LipschitzProbe lipschitz_probe(int n, int k, const Face& face, std::size_t pairs, std::uint64_t seed);

struct DeviationHistogram {
  int n = 0;
  int k = 0;
  double target = 0.0;
  std::vector<double> bin_edges;
  std::vector<std::uint64_t> counts;
  std::vector<double> tail_multipliers;  ///< t values
  std::vector<double> tail_fractions;    ///< fraction with |dev| > t sqrt(n)
  std::uint64_t total = 0;
  double max_abs_dev = 0.0;
  bool face_values_within_bounds = true;  ///< every E_F in [(n-2k)/3, (n+2k)/3]
  bool deviations_within_width = true;    ///< every |dev| <= 4k/3
};

/// Deviations of E_F |P_E x|^2 from the Grassmannian mean over all tiling
/// faces of `trials` Haar subspaces. Bins span [-4k/3, 4k/3].
DeviationHistogram deviation_histogram(int n, int k, std::size_t trials, std::size_t bins,
                                       std::uint64_t seed, unsigned threads = 1);

}  // namespace cubeshadow
