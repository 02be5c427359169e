#pragma once

#include "cubeshadow/face_tiling.hpp"
#include "cubeshadow/subspace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cubeshadow {

enum class SampleMethod { Exact, Rejection };

const char* to_string(SampleMethod m);

struct SampleBatch {
  RowMatrix points;           ///< one point per row, E-coordinates
  std::vector<int> tile_ids;  ///< exact sampler only; -1 for rejection
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::Exact;
  std::uint64_t proposals = 0;  ///< rejection sampler: boxes drawn

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
  double acceptance_rate() const {
    return proposals ? static_cast<double>(size()) / static_cast<double>(proposals) : 1.0;
  }
};

struct MCMoments {
  double mean_sq_hat = 0.0;
  double var_sq_hat = 0.0;
  double se_mean = 0.0;
  double se_var = 0.0;
  std::size_t n_samples = 0;
};

/// Samples are generated in fixed-size chunks, chunk c drawing from stream
/// c of `seed`; output is identical for any thread count.
inline constexpr std::size_t kSampleChunk = 4096;

/// Uniform law on K through the tiling: pick tile i with probability w_i,
/// draw the free coordinates uniformly on the face and project.
SampleBatch sample_uniform(const Tiling& t, std::size_t n_samples, std::uint64_t seed,
                           unsigned threads = 1);

/// x in P_E([-1,1]^n) up to `tol`, decided by a phase-1 LP on the fiber.
/// Independent of the tiling.
bool contains(const Subspace& s, const Vector& x, double tol = 1e-9);

/// Half-widths of the axis box enclosing K in E-coordinates: ||basis row||_1.
Vector bounding_half_widths(const Subspace& s);

/// Directions theta (E-coordinates) with their support values
/// h_K(theta) = ||basis^T theta||_1. A point with |<x, theta>| > h_K(theta)
/// is certainly outside K. Built from the facet normals of the zonotope when
/// there are at most `max_directions` of them, otherwise empty.
struct SupportCertificates {
  RowMatrix directions;
  Vector support;

  /// True when some direction proves x lies outside K (slack `tol`).
  bool excludes(const Vector& x, double tol) const;
};

SupportCertificates facet_certificates(const Subspace& s, std::uint64_t max_directions = 20000);

/// Uniform proposals in the bounding box, accepted through contains().
/// Proposals excluded by a support certificate skip the LP.
/// Throws AcceptanceTooLow if after 1e5 proposals fewer than 1e-6 of them
/// were accepted.
SampleBatch rejection_sample(const Subspace& s, std::size_t n_samples, std::uint64_t seed,
                             unsigned threads = 1);

/// Moments of |x|^2 over a batch; needs at least two points.
MCMoments mc_moments(const SampleBatch& b);
MCMoments mc_moments_of_values(std::span<const double> values);

}  // namespace cubeshadow
