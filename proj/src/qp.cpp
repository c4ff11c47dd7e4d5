#include "icbf/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "icbf/errors.hpp"

namespace icbf {

Vec solve_min_norm_closed_form(double A, const Vec& B, double Theta, double alpha_h) {
    if (!std::isfinite(A) || !std::isfinite(Theta) || !std::isfinite(alpha_h) || !is_finite(B))
        throw std::invalid_argument("solve_min_norm_closed_form: non-finite input");
    const double psi = A - Theta + alpha_h;
    if (psi >= 0.0) return Vec(B.size(), 0.0);  // constraint already satisfied
    const double btb = dot(B, B);
    if (btb <= 1e-300)
        throw InfeasibleError(
            "solve_min_norm_closed_form: constraint violated with zero control authority");
    Vec du(B);
    for (double& v : du) v *= -psi / btb;
    return du;
}

namespace {

struct Row {
    Vec a;
    double b;
};

// Dual active-set iteration (Goldfarb-Idnani): start at the unconstrained
// minimizer, repeatedly pull in the lowest-index violated constraint while
// keeping the working set dually feasible. The Schur complement over the
// working set is refactored on every working-set change.
class DualActiveSet {
  public:
    DualActiveSet(const Mat& H, const std::vector<Row>& rows, int max_iterations)
        : rows_(rows), lh_(cholesky(H)), max_iterations_(max_iterations) {}

    // Returns the minimizer of 0.5 x'Hx + g'x subject to all rows.
    Vec run(const Vec& g, std::vector<int>& active_out, int& iterations_out) {
        Vec x = cholesky_solve(lh_, g);
        for (double& v : x) v = -v;

        int iters = 0;
        while (iters < max_iterations_) {
            const int p = first_violated(x);
            if (p < 0) break;
            const Vec hp = cholesky_solve(lh_, rows_[p].a);
            const double hp_norm = dot(rows_[p].a, hp);
            double up = 0.0;

            for (;;) {
                if (++iters > max_iterations_)
                    throw NumericalError("active set solver: iteration cap exceeded");

                Vec r;
                Vec z = hp;
                if (!working_.empty()) {
                    Vec rhs(working_.size());
                    for (size_t j = 0; j < working_.size(); ++j)
                        rhs[j] = dot(rows_[working_[j]].a, hp);
                    r = cholesky_solve(ls_, rhs);
                    for (size_t j = 0; j < working_.size(); ++j)
                        for (size_t i = 0; i < z.size(); ++i) z[i] -= r[j] * hinv_[j][i];
                }
                const double z_dot = dot(rows_[p].a, z);

                // dual blocking step: smallest u_j / r_j over r_j > 0
                double t1 = std::numeric_limits<double>::infinity();
                int drop_pos = -1;
                for (size_t j = 0; j < working_.size(); ++j)
                    if (!r.empty() && r[j] > 1e-14) {
                        const double tj = u_[j] / r[j];
                        if (tj < t1) {
                            t1 = tj;
                            drop_pos = static_cast<int>(j);
                        }
                    }

                if (z_dot <= 1e-10 * std::max(hp_norm, 1e-300)) {
                    // constraint is dependent on the working set
                    if (drop_pos < 0) {
                        std::vector<int> conflict(working_);
                        conflict.push_back(p);
                        std::sort(conflict.begin(), conflict.end());
                        std::ostringstream msg;
                        msg << "qp: constraints are infeasible; conflicting rows:";
                        for (int c : conflict) msg << ' ' << c;
                        throw InfeasibleError(msg.str(), conflict);
                    }
                    for (size_t j = 0; j < working_.size(); ++j) u_[j] -= t1 * r[j];
                    up += t1;
                    drop(drop_pos);
                    continue;
                }

                const double t2 = (rows_[p].b - dot(rows_[p].a, x)) / z_dot;
                const double t = std::min(t1, t2);
                for (size_t i = 0; i < x.size(); ++i) x[i] += t * z[i];
                for (size_t j = 0; j < working_.size(); ++j) u_[j] -= t * r[j];
                up += t;

                if (t2 <= t1) {
                    add(p, hp, up);
                    break;
                }
                drop(drop_pos);
            }
        }
        if (iters >= max_iterations_)
            throw NumericalError("active set solver: iteration cap exceeded");
        active_out = working_;
        iterations_out = iters;
        return x;
    }

  private:
    int first_violated(const Vec& x) const {
        for (size_t i = 0; i < rows_.size(); ++i) {
            const double resid = dot(rows_[i].a, x) - rows_[i].b;
            if (resid < -1e-11 * (1.0 + std::abs(rows_[i].b)))
                return static_cast<int>(i);
        }
        return -1;
    }

    void add(int row, const Vec& hinv_row, double multiplier) {
        working_.push_back(row);
        hinv_.push_back(hinv_row);
        u_.push_back(multiplier);
        refactor();
    }

    void drop(int pos) {
        working_.erase(working_.begin() + pos);
        hinv_.erase(hinv_.begin() + pos);
        u_.erase(u_.begin() + pos);
        refactor();
    }

    void refactor() {
        const size_t k = working_.size();
        if (k == 0) {
            ls_ = Mat();
            return;
        }
        Mat s(static_cast<int>(k), static_cast<int>(k));
        for (size_t i = 0; i < k; ++i)
            for (size_t j = 0; j < k; ++j)
                s(static_cast<int>(i), static_cast<int>(j)) =
                    dot(rows_[working_[i]].a, hinv_[j]);
        ls_ = cholesky(s);
    }

    const std::vector<Row>& rows_;
    Mat lh_;
    Mat ls_;
    std::vector<int> working_;
    std::vector<Vec> hinv_;
    Vec u_;
    int max_iterations_;
};

void validate_problem(const QpProblem& p) {
    if (p.dim <= 0) throw std::invalid_argument("QpProblem: dim must be positive");
    if (!p.reference.empty() && static_cast<int>(p.reference.size()) != p.dim)
        throw std::invalid_argument("QpProblem: reference size mismatch");
    if (!is_finite(p.reference)) throw std::invalid_argument("QpProblem: non-finite reference");
    for (const auto& c : p.ineq) {
        if (static_cast<int>(c.a.size()) != p.dim)
            throw std::invalid_argument("QpProblem: inequality row size mismatch");
        if (!is_finite(c.a) || !std::isfinite(c.b))
            throw std::invalid_argument("QpProblem: non-finite inequality");
    }
    if (p.box) {
        if (static_cast<int>(p.box->lo.size()) != p.dim ||
            static_cast<int>(p.box->hi.size()) != p.dim)
            throw std::invalid_argument("QpProblem: box size mismatch");
        for (int i = 0; i < p.dim; ++i)
            if (!(p.box->lo[i] <= p.box->hi[i]))
                throw std::invalid_argument("QpProblem: box lo > hi");
    }
    if (p.alloc) {
        if (p.alloc->Bp.cols() != p.dim)
            throw std::invalid_argument("QpProblem: allocation Bp column mismatch");
        if (p.alloc->Bp.rows() != static_cast<int>(p.alloc->target.size()))
            throw std::invalid_argument("QpProblem: allocation target size mismatch");
        if (!(p.alloc->slack_weight > 0.0))
            throw std::invalid_argument("QpProblem: slack_weight must be positive");
    }
}

// Unified row list: user inequalities, then finite lower bounds, then finite
// upper bounds. public_index maps each emitted row to the index scheme of
// QpSolution::active_set.
std::vector<Row> build_rows(const QpProblem& p, std::vector<int>& public_index) {
    std::vector<Row> rows;
    public_index.clear();
    for (size_t i = 0; i < p.ineq.size(); ++i) {
        rows.push_back({p.ineq[i].a, p.ineq[i].b});
        public_index.push_back(static_cast<int>(i));
    }
    const int k = static_cast<int>(p.ineq.size());
    if (p.box) {
        for (int j = 0; j < p.dim; ++j) {
            if (!std::isfinite(p.box->lo[j])) continue;
            Vec a(p.dim, 0.0);
            a[j] = 1.0;
            rows.push_back({a, p.box->lo[j]});
            public_index.push_back(k + j);
        }
        for (int j = 0; j < p.dim; ++j) {
            if (!std::isfinite(p.box->hi[j])) continue;
            Vec a(p.dim, 0.0);
            a[j] = -1.0;
            rows.push_back({a, -p.box->hi[j]});
            public_index.push_back(k + p.dim + j);
        }
    }
    return rows;
}

}  // namespace

QpSolution ActiveSetSolver::solve(const QpProblem& p) {
    validate_problem(p);
    const int m = p.dim;
    const Vec ref = p.reference.empty() ? Vec(m, 0.0) : p.reference;

    Mat h(m, m);
    Vec g(m, 0.0);
    for (int i = 0; i < m; ++i) {
        h(i, i) = 2.0;
        g[i] = -2.0 * ref[i];
    }
    if (p.alloc) {
        const Mat& bp = p.alloc->Bp;
        const double w = p.alloc->slack_weight;
        const Mat btb = bp.transpose() * bp;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) h(i, j) += 2.0 * w * btb(i, j);
        const Vec bt = bp.transpose() * p.alloc->target;
        for (int i = 0; i < m; ++i) g[i] -= 2.0 * w * bt[i];
    }

    std::vector<int> public_index;
    const std::vector<Row> rows = build_rows(p, public_index);

    DualActiveSet solver(h, rows, max_iterations);
    QpSolution sol;
    std::vector<int> active;
    try {
        sol.delta_u = solver.run(g, active, sol.iterations);
    } catch (InfeasibleError& e) {
        // remap internal row ids to the public numbering
        for (int& c : e.conflicting) c = public_index[c];
        throw;
    }

    for (int r : active) sol.active_set.push_back(public_index[r]);
    std::sort(sol.active_set.begin(), sol.active_set.end());

    const Vec diff = sol.delta_u - ref;
    sol.objective = dot(diff, diff);
    if (p.alloc) {
        Vec delta = p.alloc->target - p.alloc->Bp * sol.delta_u;
        sol.objective += p.alloc->slack_weight * dot(delta, delta);
        sol.slack = std::move(delta);
    }
    return sol;
}

QpSolution solve_active_set(const QpProblem& p) {
    ActiveSetSolver solver;
    return solver.solve(p);
}

QpSolution solve_allocation(const QpProblem& p) {
    if (!p.alloc) throw std::invalid_argument("solve_allocation: alloc block missing");
    ActiveSetSolver solver;
    return solver.solve(p);
}

}  // namespace icbf
