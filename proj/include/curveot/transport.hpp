#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "curveot/curve.hpp"
#include "curveot/matrix.hpp"

namespace curveot {

/// Nonnegative ground cost between the points of two curves (n x m).
using CostMatrix = Matrix;

enum class Variant { Balanced, Relaxed, Partial };

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

enum class PlanStatus { Optimal, Infeasible };

/// Per-row (nu) and per-column (mu) penalties subtracted from the ground cost
/// in partial transport.
struct PenaltyVectors {
  std::vector<double> nu;
  std::vector<double> mu;

  bool operator==(const PenaltyVectors&) const = default;
};

/// Dual variables of the transport LP. For the relaxed problem t is the
/// multiplier of the total-mass equality; it is zero for the other variants.
/// Balanced duals are free; relaxed and partial duals satisfy p, q <= 0.
struct DualSolution {
  std::vector<double> p;
  std::vector<double> q;
  double t = 0.0;
};

struct TransportPlan {
  Matrix pi;
  double objective = 0.0;
  double transported_mass = 0.0;
  PlanStatus status = PlanStatus::Optimal;
  DualSolution dual;
  std::size_t pivots = 0;
};

/// c_ij = |x_i - y_j|^order; order 1 is the plain Euclidean distance.
CostMatrix euclidean_cost(const Curve2D& a, const Curve2D& b, double order = 1.0);

/// d_ij = c_ij - nu_i - mu_j. Entries may be negative.
Matrix reduced_cost(const CostMatrix& cost, const PenaltyVectors& pen);

/// Exact optimal transport with equality marginals (network simplex).
TransportPlan solve_balanced(const CostMatrix& cost, std::span<const double> beta,
                             std::span<const double> alpha);

/// Row/column sums bounded by beta/alpha, total mass min(sum beta, sum alpha).
TransportPlan solve_relaxed(const CostMatrix& cost, std::span<const double> beta,
                            std::span<const double> alpha);

/// Minimizes sum (c_ij - mu_j - nu_i) pi_ij under <= marginals. The reported
/// objective is the reduced-cost objective.
TransportPlan solve_partial(const CostMatrix& cost, std::span<const double> beta,
                            std::span<const double> alpha, const PenaltyVectors& pen);

TransportPlan solve(Variant variant, const CostMatrix& cost, std::span<const double> beta,
                    std::span<const double> alpha, const PenaltyVectors* pen = nullptr);

/// Leading block {(i, j) : i <= rows, j <= cols} (1-based) of pairs whose
/// reduced cost is allowed to become nonpositive.
struct ActiveBlock {
  std::size_t rows = 0;
  std::size_t cols = 0;

  bool contains(std::size_t i, std::size_t j) const { return i < rows && j < cols; }
  bool operator==(const ActiveBlock&) const = default;
};

/// Validates that a set of 1-based pairs has the leading-block form.
ActiveBlock active_block_from_pairs(std::span<const std::pair<std::size_t, std::size_t>> pairs,
                                    std::size_t n, std::size_t m);

/// Penalties with c_ij > nu_i + mu_j strictly outside the block. Inside the
/// block each penalty is pushed as close to its outside bound as the strict
/// inequality permits, so c_ij <= nu_i + mu_j holds where that is reachable.
PenaltyVectors construct_penalties(const CostMatrix& cost, ActiveBlock active);

/// Pairs (0-based) outside the block where c_ij > nu_i + mu_j fails.
std::vector<std::pair<std::size_t, std::size_t>> penalty_violations(const CostMatrix& cost,
                                                                    ActiveBlock active,
                                                                    const PenaltyVectors& pen);

struct DualityReport {
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double duality_gap = 0.0;
  double max_primal_infeasibility = 0.0;
  double max_dual_infeasibility = 0.0;
  double max_slack_violation = 0.0;

  bool ok(double tol = 1e-7) const {
    return std::abs(duality_gap) <= tol && max_primal_infeasibility <= tol &&
           max_dual_infeasibility <= tol && max_slack_violation <= tol;
  }
};

/// Checks a primal/dual pair against the LP of the given variant. `cost` is
/// the raw ground cost; penalties are applied internally for Partial.
DualityReport dual_feasibility_check(const TransportPlan& plan, const DualSolution& dual,
                                     const CostMatrix& cost, std::span<const double> beta,
                                     std::span<const double> alpha, Variant variant,
                                     const PenaltyVectors* pen = nullptr);

}  // namespace curveot
