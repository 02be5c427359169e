#include "cubeshadow/sampler.hpp"

#include "cubeshadow/bounded_simplex.hpp"
#include "cubeshadow/parallel.hpp"
#include "cubeshadow/random.hpp"

#include <algorithm>
#include <cmath>

namespace cubeshadow {

const char* to_string(SampleMethod m) { return m == SampleMethod::Exact ? "exact" : "rejection"; }

namespace {

constexpr std::uint64_t kGuardProposals = 100'000;
constexpr double kMinAcceptance = 1e-6;

std::size_t chunk_count(std::size_t n) { return (n + kSampleChunk - 1) / kSampleChunk; }

}  // namespace

SampleBatch sample_uniform(const Tiling& t, std::size_t n_samples, std::uint64_t seed, unsigned threads) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "sample_uniform: n_samples must be >= 1");
  const Subspace& s = t.subspace();
  const int n = s.n();
  const int k = s.k();
  const Matrix& basis = s.basis();

  std::vector<double> cumulative(t.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) cumulative[i] = (acc += t.weight(i));

  SampleBatch batch;
  batch.seed = seed;
  batch.method = SampleMethod::Exact;
  batch.points.resize(static_cast<Eigen::Index>(n_samples), s.dim());
  batch.tile_ids.resize(n_samples);
  batch.proposals = n_samples;

  parallel_for(chunk_count(n_samples), threads, [&](std::size_t chunk) {
    Rng rng(seed, chunk);
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(n_samples, begin + kSampleChunk);
    Vector y(n);
    for (std::size_t r = begin; r < end; ++r) {
      const double pick = rng.uniform() * acc;
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
      const std::size_t tile =
          std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), t.size() - 1);
      for (int j = 0; j < n; ++j) y[j] = rng.uniform(-1.0, 1.0);
      const auto fx = t.fixed(tile);
      const auto sg = t.signs(tile);
      for (int j = 0; j < k; ++j) y[fx[j]] = sg[j];
      batch.points.row(static_cast<Eigen::Index>(r)) = (basis * y).transpose();
      batch.tile_ids[r] = static_cast<int>(tile);
    }
  });
  return batch;
}

bool contains(const Subspace& s, const Vector& x, double tol) {
  if (x.size() != s.dim()) throw Error(ErrorKind::DimensionMismatch, "contains: point must have length n - k");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "contains: tol must be positive");
  const Vector lo = Vector::Constant(s.n(), -1.0);
  const Vector hi = Vector::Constant(s.n(), 1.0);
  return lp::find_feasible_point(s.basis(), x, lo, hi, tol).status == lp::FeasibilityStatus::Feasible;
}

bool SupportCertificates::excludes(const Vector& x, double tol) const {
  for (Eigen::Index r = 0; r < directions.rows(); ++r) {
    if (std::abs(directions.row(r).dot(x)) > support[r] + tol) return true;
  }
  return false;
}

SupportCertificates facet_certificates(const Subspace& s, std::uint64_t max_directions) {
  const int n = s.n();
  const int m = s.dim();
  SupportCertificates cert;
  const std::uint64_t count = binomial(n, m - 1);
  if (count > max_directions) return cert;
  const Matrix& b = s.basis();
  std::vector<Vector> normals;
  std::vector<int> comb(m - 1);
  for (int j = 0; j < m - 1; ++j) comb[j] = j;
  Matrix gens_t(m - 1, m);
  do {
    // Normal of the hyperplane spanned by the chosen m-1 generators.
    for (int j = 0; j < m - 1; ++j) gens_t.row(j) = b.col(comb[j]).transpose();
    Vector normal;
    if (m == 1) {
      normal = Vector::Ones(1);
    } else {
      Eigen::FullPivLU<Matrix> lu(gens_t);
      lu.setThreshold(1e-10);
      const Matrix ker = lu.kernel();
      if (ker.cols() != 1) continue;
      normal = ker.col(0);
    }
    const double len = normal.norm();
    if (!(len > 0.0)) continue;
    normals.push_back(normal / len);
  } while (next_combination(comb, n));
  cert.directions.resize(static_cast<Eigen::Index>(normals.size()), m);
  cert.support.resize(static_cast<Eigen::Index>(normals.size()));
  for (std::size_t r = 0; r < normals.size(); ++r) {
    cert.directions.row(static_cast<Eigen::Index>(r)) = normals[r].transpose();
    cert.support[static_cast<Eigen::Index>(r)] = (b.transpose() * normals[r]).cwiseAbs().sum();
  }
  return cert;
}

Vector bounding_half_widths(const Subspace& s) { return s.basis().cwiseAbs().rowwise().sum(); }

SampleBatch rejection_sample(const Subspace& s, std::size_t n_samples, std::uint64_t seed, unsigned threads) {
  if (n_samples < 1) throw Error(ErrorKind::InvalidArgument, "rejection_sample: n_samples must be >= 1");
  const int m = s.dim();
  const Vector half = bounding_half_widths(s);
  const SupportCertificates cert = facet_certificates(s);

  SampleBatch batch;
  batch.seed = seed;
  batch.method = SampleMethod::Rejection;
  batch.points.resize(static_cast<Eigen::Index>(n_samples), m);
  batch.tile_ids.assign(n_samples, -1);
  const std::size_t chunks = chunk_count(n_samples);
  std::vector<std::uint64_t> proposals(chunks, 0);

  parallel_for(chunks, threads, [&](std::size_t chunk) {
    Rng rng(seed, chunk);
    const std::size_t begin = chunk * kSampleChunk;
    const std::size_t end = std::min(n_samples, begin + kSampleChunk);
    Vector x(m);
    std::uint64_t drawn = 0;
    std::size_t r = begin;
    while (r < end) {
      for (int j = 0; j < m; ++j) x[j] = rng.uniform(-half[j], half[j]);
      ++drawn;
      if (!cert.excludes(x, 1e-9) && contains(s, x)) batch.points.row(static_cast<Eigen::Index>(r++)) = x.transpose();
      if (drawn >= kGuardProposals &&
          static_cast<double>(r - begin) < kMinAcceptance * static_cast<double>(drawn))
        throw Error(ErrorKind::AcceptanceTooLow, "rejection_sample: acceptance rate below 1e-6");
    }
    proposals[chunk] = drawn;
  });
  for (auto p : proposals) batch.proposals += p;
  return batch;
}

MCMoments mc_moments_of_values(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorKind::EmptyBatch, "mc_moments: need at least two samples");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  const double nn = static_cast<double>(n);
  MCMoments out;
  out.n_samples = n;
  out.mean_sq_hat = mean;
  out.var_sq_hat = m2 / (nn - 1.0);
  out.se_mean = std::sqrt(out.var_sq_hat / nn);
  // Var(s^2) ~ (mu4 - (n-3)/(n-1) sigma^4) / n
  const double mu4 = m4 / nn;
  const double var_of_var = (mu4 - (nn - 3.0) / (nn - 1.0) * out.var_sq_hat * out.var_sq_hat) / nn;
  out.se_var = std::sqrt(std::max(0.0, var_of_var));
  return out;
}

MCMoments mc_moments(const SampleBatch& b) {
  std::vector<double> sq(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) sq[i] = b.points.row(static_cast<Eigen::Index>(i)).squaredNorm();
  return mc_moments_of_values(sq);
}

}  // namespace cubeshadow
