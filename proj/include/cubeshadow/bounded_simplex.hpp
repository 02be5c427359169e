#pragma once

#include "cubeshadow/types.hpp"

namespace cubeshadow::lp {

enum class FeasibilityStatus { Feasible, Infeasible };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Infeasible;
  Vector point;          ///< best point found, always within the bounds
  double infeasibility = 0.0;  ///< phase-1 objective: l1 norm of the residual A y - b
  int iterations = 0;
};

/// Decides whether {y : A y = b, lower <= y <= upper} is nonempty with a
/// dense bounded-variable primal simplex on the phase-1 problem
///   min sum(art)  s.t.  sign * (A y - b) + art = 0,  art >= 0.
/// Pivoting follows Bland's rule (lowest eligible index enters, lowest basic
/// index leaves on ties) so degenerate cycling cannot occur. The set is
/// declared feasible when the optimal phase-1 objective is at most `tol`.
/// Throws NumericalFailure if the iteration cap is hit or values go
/// non-finite; infeasibility is reported through the status instead.
FeasibilityResult find_feasible_point(const Matrix& a, const Vector& b, const Vector& lower,
                                      const Vector& upper, double tol = 1e-9);

}  // namespace cubeshadow::lp
