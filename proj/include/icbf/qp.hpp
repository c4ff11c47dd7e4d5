#pragma once

#include <optional>
#include <vector>

#include "icbf/matrix.hpp"

namespace icbf {

// One linear inequality a' x >= b.
struct LinearIneq {
    Vec a;
    double b = 0.0;
};

struct BoxBounds {
    Vec lo;
    Vec hi;
};

// Slack-penalized allocation block: Bp * du + delta = target, with the slack
// delta charged slack_weight * ||delta||^2 in the objective.
struct AllocationSpec {
    Mat Bp;
    Vec target;
    double slack_weight = 1e6;
};

// Strictly convex min-norm program
//   min ||du - reference||^2 (+ slack_weight ||delta||^2)
//   s.t. a_i' du >= b_i, lo <= du <= hi, (Bp du + delta = target).
struct QpProblem {
    int dim = 0;
    Vec reference;                       // defaults to zero when empty
    std::vector<LinearIneq> ineq;
    std::optional<BoxBounds> box;
    std::optional<AllocationSpec> alloc;
};

// Constraint indices in QpSolution::active_set follow the unified row order:
// inequality rows first (0..k-1), then lower box bounds (k..k+m-1), then
// upper box bounds (k+m..k+2m-1).
struct QpSolution {
    Vec delta_u;
    std::optional<Vec> slack;            // allocation residual delta
    std::vector<int> active_set;
    double objective = 0.0;
    int iterations = 0;
};

// Closed-form single-constraint min-norm law for A + B'du - Theta >= -alpha_h.
// With psi = A - Theta + alpha_h: returns zero when psi >= 0, otherwise the
// boundary solution -psi B / (B'B). Throws InfeasibleError when psi < 0 and
// B = 0 (no control authority can restore the constraint).
Vec solve_min_norm_closed_form(double A, const Vec& B, double Theta, double alpha_h);

// Active-set solver for the programs above (dual iteration from the
// unconstrained minimizer; no feasible starting point required). An instance
// owns its workspace, so use one per control loop. Cholesky factors are
// rebuilt on each working-set change; ties break on lowest index.
class ActiveSetSolver {
  public:
    QpSolution solve(const QpProblem& p);

    int max_iterations = 1000;
};

QpSolution solve_active_set(const QpProblem& p);
QpSolution solve_allocation(const QpProblem& p);

}  // namespace icbf
