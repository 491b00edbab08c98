#include "curveot/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "curveot/error.hpp"
#include "network_simplex.hpp"
#include "numeric.hpp"

namespace curveot {
namespace {

constexpr double kPruneMass = 1e-15;
constexpr double kBalanceTol = 1e-9;

void check_dimensions(const Matrix& cost, std::span<const double> beta, std::span<const double> alpha) {
  if (cost.rows() != beta.size() || cost.cols() != alpha.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cost is " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) + " but marginals have " +
                    std::to_string(beta.size()) + " and " + std::to_string(alpha.size()) + " entries");
  }
  for (double v : cost.data()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "cost matrix has a non-finite entry");
  }
  auto check_mass = [](std::span<const double> w, const char* name) {
    for (double v : w) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error(ErrorCode::InvalidConfig, std::string("marginal ") + name + " has a negative or non-finite entry");
      }
    }
  };
  check_mass(beta, "beta");
  check_mass(alpha, "alpha");
}

std::vector<std::size_t> kept_indices(std::span<const double> w) {
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] >= kPruneMass) kept.push_back(i);
  }
  return kept;
}

// Solves the variant as a balanced min-cost flow on a bipartite network,
// adding a dummy sink and/or source to absorb mass the <= constraints leave
// unmatched. `cost` is the effective (possibly reduced) cost.
TransportPlan solve_network(const Matrix& cost, std::span<const double> beta, std::span<const double> alpha,
                            Variant variant) {
  const std::size_t n = beta.size();
  const std::size_t m = alpha.size();
  const auto rows = kept_indices(beta);
  const auto cols = kept_indices(alpha);
  const std::size_t nk = rows.size();
  const std::size_t mk = cols.size();

  detail::CompensatedSum sb;
  detail::CompensatedSum sa;
  for (auto i : rows) sb.add(beta[i]);
  for (auto j : cols) sa.add(alpha[j]);
  const double sum_beta = sb.value();
  const double sum_alpha = sa.value();

  const bool beta_larger = sum_beta >= sum_alpha;
  const bool dummy_sink = variant == Variant::Partial || (variant == Variant::Relaxed && beta_larger);
  const bool dummy_source = variant == Variant::Partial || (variant == Variant::Relaxed && !beta_larger);

  std::size_t num_nodes = nk + mk;
  const int sink_node = dummy_sink ? static_cast<int>(num_nodes++) : -1;
  const int source_node = dummy_source ? static_cast<int>(num_nodes++) : -1;

  std::vector<double> supply(num_nodes, 0.0);
  for (std::size_t a = 0; a < nk; ++a) supply[a] = beta[rows[a]];
  for (std::size_t b = 0; b < mk; ++b) supply[nk + b] = -alpha[cols[b]];
  if (variant == Variant::Partial) {
    supply[static_cast<std::size_t>(sink_node)] = -sum_beta;
    supply[static_cast<std::size_t>(source_node)] = sum_alpha;
  } else if (variant == Variant::Relaxed) {
    if (dummy_sink) supply[static_cast<std::size_t>(sink_node)] = -(sum_beta - sum_alpha);
    if (dummy_source) supply[static_cast<std::size_t>(source_node)] = sum_alpha - sum_beta;
  }

  detail::NetworkSimplex ns(num_nodes, std::move(supply));
  ns.reserve_arcs(nk * mk + nk + mk + 1);
  for (std::size_t a = 0; a < nk; ++a) {
    for (std::size_t b = 0; b < mk; ++b) {
      ns.add_arc(static_cast<int>(a), static_cast<int>(nk + b), cost(rows[a], cols[b]));
    }
  }
  if (dummy_sink) {
    for (std::size_t a = 0; a < nk; ++a) ns.add_arc(static_cast<int>(a), sink_node, 0.0);
  }
  if (dummy_source) {
    for (std::size_t b = 0; b < mk; ++b) ns.add_arc(source_node, static_cast<int>(nk + b), 0.0);
  }
  if (dummy_sink && dummy_source) ns.add_arc(source_node, sink_node, 0.0);

  const auto run = ns.run();

  TransportPlan plan;
  plan.pivots = run.pivots;
  plan.pi = Matrix(n, m, 0.0);
  detail::CompensatedSum objective;
  detail::CompensatedSum mass;
  for (std::size_t a = 0; a < nk; ++a) {
    for (std::size_t b = 0; b < mk; ++b) {
      const double f = ns.flow(a * mk + b);
      if (f != 0.0) {
        plan.pi(rows[a], cols[b]) = f;
        objective.add(f * cost(rows[a], cols[b]));
        mass.add(f);
      }
    }
  }
  plan.objective = objective.value();
  plan.transported_mass = mass.value();
  plan.status = run.artificial_flow > 2.0 * kBalanceTol ? PlanStatus::Infeasible : PlanStatus::Optimal;

  // Duals from node potentials: P_i + Q_j <= cost_ij on every real arc.
  const double base = nk > 0 ? ns.potential(0) : 0.0;
  std::vector<double> big_p(nk);
  std::vector<double> big_q(mk);
  for (std::size_t a = 0; a < nk; ++a) big_p[a] = base - ns.potential(a);
  for (std::size_t b = 0; b < mk; ++b) big_q[b] = ns.potential(nk + b) - base;
  const double q_sink = dummy_sink ? ns.potential(static_cast<std::size_t>(sink_node)) - base : 0.0;
  const double p_source = dummy_source ? base - ns.potential(static_cast<std::size_t>(source_node)) : 0.0;

  DualSolution& dual = plan.dual;
  dual.p.assign(n, 0.0);
  dual.q.assign(m, 0.0);
  const bool signed_duals = variant != Variant::Balanced;
  if (variant == Variant::Balanced) {
    for (std::size_t a = 0; a < nk; ++a) dual.p[rows[a]] = big_p[a];
    for (std::size_t b = 0; b < mk; ++b) dual.q[cols[b]] = big_q[b];
  } else if (variant == Variant::Partial) {
    for (std::size_t a = 0; a < nk; ++a) dual.p[rows[a]] = std::min(0.0, big_p[a] + q_sink);
    for (std::size_t b = 0; b < mk; ++b) dual.q[cols[b]] = std::min(0.0, big_q[b] + p_source);
  } else if (dummy_sink) {
    double t = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < mk; ++b) t = std::max(t, big_q[b] - q_sink);
    if (mk == 0) t = 0.0;
    dual.t = t;
    for (std::size_t a = 0; a < nk; ++a) dual.p[rows[a]] = std::min(0.0, big_p[a] + q_sink);
    for (std::size_t b = 0; b < mk; ++b) dual.q[cols[b]] = std::min(0.0, big_q[b] - q_sink - t);
  } else {
    double t = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < nk; ++a) t = std::max(t, big_p[a] - p_source);
    if (nk == 0) t = 0.0;
    dual.t = t;
    for (std::size_t b = 0; b < mk; ++b) dual.q[cols[b]] = std::min(0.0, big_q[b] + p_source);
    for (std::size_t a = 0; a < nk; ++a) dual.p[rows[a]] = std::min(0.0, big_p[a] - p_source - t);
  }

  // Pruned rows and columns carry no mass; give them the largest feasible dual.
  std::vector<char> row_kept(n, 0);
  std::vector<char> col_kept(m, 0);
  for (auto i : rows) row_kept[i] = 1;
  for (auto j : cols) col_kept[j] = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (row_kept[i]) continue;
    double v = signed_duals ? 0.0 : std::numeric_limits<double>::infinity();
    for (auto j : cols) v = std::min(v, cost(i, j) - dual.q[j] - dual.t);
    dual.p[i] = std::isfinite(v) ? v : 0.0;
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (col_kept[j]) continue;
    double v = signed_duals ? 0.0 : std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) v = std::min(v, cost(i, j) - dual.p[i] - dual.t);
    dual.q[j] = std::isfinite(v) ? v : 0.0;
  }
  return plan;
}

double total(std::span<const double> w) { return detail::compensated_sum(w); }

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Balanced: return "balanced";
    case Variant::Relaxed: return "relaxed";
    case Variant::Partial: return "partial";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  if (name == "balanced") return Variant::Balanced;
  if (name == "relaxed") return Variant::Relaxed;
  if (name == "partial") return Variant::Partial;
  throw Error(ErrorCode::InvalidConfig, "unknown transport variant '" + std::string(name) + "'");
}

CostMatrix euclidean_cost(const Curve2D& a, const Curve2D& b, double order) {
  if (!(order >= 1.0) || !std::isfinite(order)) {
    throw Error(ErrorCode::InvalidConfig, "cost order must be a finite number >= 1");
  }
  CostMatrix c(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double dx = a[i].x1 - b[j].x1;
      const double dy = a[i].x2 - b[j].x2;
      const double d = std::sqrt(dx * dx + dy * dy);
      c(i, j) = order == 1.0 ? d : std::pow(d, order);
    }
  }
  return c;
}

Matrix reduced_cost(const CostMatrix& cost, const PenaltyVectors& pen) {
  if (pen.nu.size() != cost.rows() || pen.mu.size() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "penalties have " + std::to_string(pen.nu.size()) + " row and " + std::to_string(pen.mu.size()) +
                    " column entries for a " + std::to_string(cost.rows()) + "x" + std::to_string(cost.cols()) +
                    " cost");
  }
  Matrix d(cost.rows(), cost.cols());
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t j = 0; j < cost.cols(); ++j) d(i, j) = cost(i, j) - pen.nu[i] - pen.mu[j];
  }
  return d;
}

TransportPlan solve_balanced(const CostMatrix& cost, std::span<const double> beta, std::span<const double> alpha) {
  check_dimensions(cost, beta, alpha);
  const double sb = total(beta);
  const double sa = total(alpha);
  if (std::abs(sb - sa) > kBalanceTol) {
    throw Error(ErrorCode::UnbalancedMarginals, "balanced transport needs equal totals; got " +
                                                    std::to_string(sb) + " and " + std::to_string(sa));
  }
  return solve_network(cost, beta, alpha, Variant::Balanced);
}

TransportPlan solve_relaxed(const CostMatrix& cost, std::span<const double> beta, std::span<const double> alpha) {
  check_dimensions(cost, beta, alpha);
  if (!(total(beta) > 0.0) || !(total(alpha) > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "relaxed transport needs positive total mass on both sides");
  }
  return solve_network(cost, beta, alpha, Variant::Relaxed);
}

TransportPlan solve_partial(const CostMatrix& cost, std::span<const double> beta, std::span<const double> alpha,
                            const PenaltyVectors& pen) {
  check_dimensions(cost, beta, alpha);
  for (double v : pen.nu) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::NegativePenalty, "row penalty nu must be >= 0");
  }
  for (double v : pen.mu) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw Error(ErrorCode::NegativePenalty, "column penalty mu must be >= 0");
  }
  return solve_network(reduced_cost(cost, pen), beta, alpha, Variant::Partial);
}

TransportPlan solve(Variant variant, const CostMatrix& cost, std::span<const double> beta,
                    std::span<const double> alpha, const PenaltyVectors* pen) {
  switch (variant) {
    case Variant::Balanced: return solve_balanced(cost, beta, alpha);
    case Variant::Relaxed: return solve_relaxed(cost, beta, alpha);
    case Variant::Partial:
      if (pen == nullptr) throw Error(ErrorCode::InvalidConfig, "partial transport requires penalties");
      return solve_partial(cost, beta, alpha, *pen);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown variant");
}

ActiveBlock active_block_from_pairs(std::span<const std::pair<std::size_t, std::size_t>> pairs, std::size_t n,
                                    std::size_t m) {
  ActiveBlock block;
  for (const auto& [i, j] : pairs) {
    if (i < 1 || i > n || j < 1 || j > m) {
      throw Error(ErrorCode::DimensionMismatch, "active pair (" + std::to_string(i) + ", " + std::to_string(j) +
                                                    ") lies outside the cost matrix");
    }
    block.rows = std::max(block.rows, i);
    block.cols = std::max(block.cols, j);
  }
  std::vector<char> seen(block.rows * block.cols, 0);
  for (const auto& [i, j] : pairs) seen[(i - 1) * block.cols + (j - 1)] = 1;
  if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
    throw Error(ErrorCode::InvalidConfig, "active set must be a leading block {(i, j) : i <= t, j <= k}");
  }
  return block;
}

PenaltyVectors construct_penalties(const CostMatrix& cost, ActiveBlock active) {
  const std::size_t n = cost.rows();
  const std::size_t m = cost.cols();
  const std::size_t t = std::min(active.rows, n);
  const std::size_t k = std::min(active.cols, m);
  PenaltyVectors pen{std::vector<double>(n, 0.0), std::vector<double>(m, 0.0)};

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (!(i < t && j < k) && !(cost(i, j) > 0.0)) {
        throw Error(ErrorCode::InfeasiblePenalties, "c(" + std::to_string(i + 1) + ", " + std::to_string(j + 1) +
                                                        ") = 0 outside the active block; no penalties can keep it positive");
      }
    }
  }
  const bool empty = t == 0 || k == 0;
  const bool everything = t == n && k == m;
  if (empty || everything) return pen;

  // Penalties vanish outside the block; inside, each one sits just below the
  // smallest cost it must stay under (or covers the block when unconstrained).
  constexpr double kMargin = 1e-3;
  for (std::size_t i = 0; i < t; ++i) {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t j = k; j < m; ++j) bound = std::min(bound, cost(i, j));
    if (std::isfinite(bound)) {
      pen.nu[i] = (1.0 - kMargin) * bound;
    } else {
      for (std::size_t j = 0; j < k; ++j) pen.nu[i] = std::max(pen.nu[i], cost(i, j));
    }
  }
  for (std::size_t j = 0; j < k; ++j) {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = t; i < n; ++i) bound = std::min(bound, cost(i, j));
    if (std::isfinite(bound)) {
      pen.mu[j] = (1.0 - kMargin) * bound;
    } else {
      for (std::size_t i = 0; i < t; ++i) pen.mu[j] = std::max(pen.mu[j], cost(i, j));
    }
  }
  return pen;
}

std::vector<std::pair<std::size_t, std::size_t>> penalty_violations(const CostMatrix& cost, ActiveBlock active,
                                                                    const PenaltyVectors& pen) {
  if (pen.nu.size() != cost.rows() || pen.mu.size() != cost.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "penalty vectors do not match the cost matrix");
  }
  std::vector<std::pair<std::size_t, std::size_t>> bad;
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      if (!active.contains(i, j) && !(cost(i, j) > pen.nu[i] + pen.mu[j])) bad.emplace_back(i, j);
    }
  }
  return bad;
}

DualityReport dual_feasibility_check(const TransportPlan& plan, const DualSolution& dual, const CostMatrix& cost,
                                     std::span<const double> beta, std::span<const double> alpha, Variant variant,
                                     const PenaltyVectors* pen) {
  check_dimensions(cost, beta, alpha);
  if (variant == Variant::Partial && pen == nullptr) {
    throw Error(ErrorCode::InvalidConfig, "partial check requires penalties");
  }
  const Matrix effective = variant == Variant::Partial ? reduced_cost(cost, *pen) : cost;
  const std::size_t n = beta.size();
  const std::size_t m = alpha.size();
  if (plan.pi.rows() != n || plan.pi.cols() != m || dual.p.size() != n || dual.q.size() != m) {
    throw Error(ErrorCode::DimensionMismatch, "plan or dual does not match the problem dimensions");
  }
  const bool signed_duals = variant != Variant::Balanced;
  const double t = variant == Variant::Relaxed ? dual.t : 0.0;

  DualityReport r;
  detail::CompensatedSum primal;
  std::vector<double> row_sum(n, 0.0);
  std::vector<double> col_sum(m, 0.0);
  detail::CompensatedSum mass;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double x = plan.pi(i, j);
      primal.add(x * effective(i, j));
      row_sum[i] += x;
      col_sum[j] += x;
      mass.add(x);
      r.max_primal_infeasibility = std::max(r.max_primal_infeasibility, -x);
      const double slack = effective(i, j) - dual.p[i] - dual.q[j] - t;
      r.max_dual_infeasibility = std::max(r.max_dual_infeasibility, -slack);
      r.max_slack_violation = std::max(r.max_slack_violation, std::abs(x * slack));
    }
  }

  detail::CompensatedSum dual_obj;
  for (std::size_t i = 0; i < n; ++i) {
    const double resid = beta[i] - row_sum[i];
    r.max_primal_infeasibility =
        std::max(r.max_primal_infeasibility, variant == Variant::Balanced ? std::abs(resid) : -resid);
    if (signed_duals) {
      r.max_dual_infeasibility = std::max(r.max_dual_infeasibility, dual.p[i]);
      r.max_slack_violation = std::max(r.max_slack_violation, std::abs(dual.p[i] * resid));
    }
    dual_obj.add(beta[i] * dual.p[i]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    const double resid = alpha[j] - col_sum[j];
    r.max_primal_infeasibility =
        std::max(r.max_primal_infeasibility, variant == Variant::Balanced ? std::abs(resid) : -resid);
    if (signed_duals) {
      r.max_dual_infeasibility = std::max(r.max_dual_infeasibility, dual.q[j]);
      r.max_slack_violation = std::max(r.max_slack_violation, std::abs(dual.q[j] * resid));
    }
    dual_obj.add(alpha[j] * dual.q[j]);
  }
  if (variant == Variant::Relaxed) {
    const double target = std::min(total(beta), total(alpha));
    r.max_primal_infeasibility = std::max(r.max_primal_infeasibility, std::abs(mass.value() - target));
    dual_obj.add(target * t);
  }

  r.primal_objective = primal.value();
  r.dual_objective = dual_obj.value();
  r.duality_gap = r.primal_objective - r.dual_objective;
  return r;
}

}  // namespace curveot
