#include "cubeshadow/bounded_simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace cubeshadow::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

FeasibilityResult find_feasible_point(const Matrix& a, const Vector& b, const Vector& lower,
                                      const Vector& upper, double tol) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index nstruct = a.cols();
  if (b.size() != rows || lower.size() != nstruct || upper.size() != nstruct)
    throw Error(ErrorKind::DimensionMismatch, "find_feasible_point: inconsistent dimensions");
  for (Eigen::Index j = 0; j < nstruct; ++j) {
    if (!(lower[j] <= upper[j]) || !std::isfinite(lower[j]) || !std::isfinite(upper[j]))
      throw Error(ErrorKind::InvalidArgument, "find_feasible_point: bounds must be finite with lower <= upper");
  }
  const Eigen::Index ncols = nstruct + rows;

  // Shift structurals to z = y - lower in [0, width]; artificials in [0, inf).
  Vector width(ncols);
  width.head(nstruct) = upper - lower;
  width.tail(rows).setConstant(kInf);
  Vector rhs = b - a * lower;

  Matrix tab(rows, ncols);
  tab.leftCols(nstruct) = a;
  tab.rightCols(rows).setIdentity();
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (rhs[i] < 0.0) {
      tab.row(i).head(nstruct) *= -1.0;
      rhs[i] = -rhs[i];
    }
  }

  std::vector<Eigen::Index> basic(rows);
  std::vector<bool> is_basic(ncols, false);
  std::vector<bool> at_upper(ncols, false);
  Vector value = Vector::Zero(ncols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    basic[i] = nstruct + i;
    is_basic[nstruct + i] = true;
    value[nstruct + i] = rhs[i];
  }
  Vector cost = Vector::Zero(ncols);
  cost.tail(rows).setOnes();

  FeasibilityResult res;
  const int max_iter = 50 * static_cast<int>(ncols + rows) + 100;
  Vector reduced(ncols);
  for (;;) {
    if (res.iterations > max_iter)
      throw Error(ErrorKind::NumericalFailure, "bounded simplex: iteration cap exceeded");

    reduced = cost;
    for (Eigen::Index i = 0; i < rows; ++i) reduced -= cost[basic[i]] * tab.row(i).transpose();

    Eigen::Index enter = -1;
    double dir = 0.0;
    for (Eigen::Index j = 0; j < ncols; ++j) {
      if (is_basic[j]) continue;
      if (!at_upper[j] && reduced[j] < -kCostTol) {
        enter = j;
        dir = 1.0;
        break;
      }
      if (at_upper[j] && reduced[j] > kCostTol) {
        enter = j;
        dir = -1.0;
        break;
      }
    }
    if (enter < 0) break;

    // Ratio test: the entering variable moves by dir * step, basic variable
    // i moves by -dir * step * tab(i, enter).
    double step = width[enter];
    Eigen::Index leave_row = -1;
    bool leave_to_upper = false;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double rate = dir * tab(i, enter);
      const Eigen::Index var = basic[i];
      double limit;
      bool to_upper;
      if (rate > kPivotTol) {
        limit = std::max(0.0, value[var]) / rate;
        to_upper = false;
      } else if (rate < -kPivotTol && std::isfinite(width[var])) {
        limit = std::max(0.0, width[var] - value[var]) / -rate;
        to_upper = true;
      } else {
        continue;
      }
      if (limit < step || (limit == step && leave_row >= 0 && var < basic[leave_row])) {
        step = limit;
        leave_row = i;
        leave_to_upper = to_upper;
      }
    }
    if (!std::isfinite(step))
      throw Error(ErrorKind::NumericalFailure, "bounded simplex: unbounded phase-1 ray");

    for (Eigen::Index i = 0; i < rows; ++i) value[basic[i]] -= dir * step * tab(i, enter);
    value[enter] += dir * step;

    if (leave_row < 0) {
      at_upper[enter] = dir > 0.0;  // bound flip
      value[enter] = at_upper[enter] ? width[enter] : 0.0;
    } else {
      const Eigen::Index leaving = basic[leave_row];
      const double piv = tab(leave_row, enter);
      tab.row(leave_row) /= piv;
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (i != leave_row && tab(i, enter) != 0.0) tab.row(i) -= tab(i, enter) * tab.row(leave_row);
      }
      is_basic[leaving] = false;
      at_upper[leaving] = leave_to_upper;
      value[leaving] = leave_to_upper ? width[leaving] : 0.0;
      is_basic[enter] = true;
      at_upper[enter] = false;
      basic[leave_row] = enter;
    }
    ++res.iterations;
    if (!value.allFinite()) throw Error(ErrorKind::NumericalFailure, "bounded simplex: non-finite values");
  }

  double objective = 0.0;
  for (Eigen::Index j = nstruct; j < ncols; ++j) objective += std::max(0.0, value[j]);
  Vector z = value.head(nstruct).cwiseMax(0.0).cwiseMin(width.head(nstruct));
  res.point = lower + z;
  res.infeasibility = objective;
  res.status = objective <= tol ? FeasibilityStatus::Feasible : FeasibilityStatus::Infeasible;
  return res;
}

}  // namespace cubeshadow::lp
