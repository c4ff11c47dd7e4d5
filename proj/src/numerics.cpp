#include "icbf/numerics.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "icbf/errors.hpp"
#include "icbf/rng.hpp"

namespace icbf {

namespace {

Vec eval_field(const VectorField& f, double t, const Vec& x, const Vec& u) {
    Vec dx = f(t, x, u);
    if (dx.size() != x.size())
        throw std::invalid_argument("rk4_step: field dimension mismatch");
    if (!is_finite(dx)) {
        std::ostringstream msg;
        msg << "rk4_step: non-finite derivative at t=" << t;
        throw IntegrationError(msg.str(), t, x);
    }
    return dx;
}

Vec axpy(const Vec& x, double a, const Vec& y) {
    Vec r(x);
    for (size_t i = 0; i < r.size(); ++i) r[i] += a * y[i];
    return r;
}

}  // namespace

OdeState rk4_step(const VectorField& f, const OdeState& s, const Vec& u, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
    const Vec k1 = eval_field(f, s.t, s.x, u);
    const Vec k2 = eval_field(f, s.t + 0.5 * dt, axpy(s.x, 0.5 * dt, k1), u);
    const Vec k3 = eval_field(f, s.t + 0.5 * dt, axpy(s.x, 0.5 * dt, k2), u);
    const Vec k4 = eval_field(f, s.t + dt, axpy(s.x, dt, k3), u);
    OdeState next;
    next.t = s.t + dt;
    next.x = s.x;
    for (size_t i = 0; i < next.x.size(); ++i)
        next.x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return next;
}

namespace {

void require_symmetric(const Mat& m, const char* name) {
    const double tol = 1e-9 * (1.0 + max_abs(m));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i + 1; j < m.cols(); ++j)
            if (std::abs(m(i, j) - m(j, i)) > tol)
                throw std::invalid_argument(std::string(name) + " must be symmetric");
}

Mat symmetrize(const Mat& m) {
    Mat s(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

// A'P + PA = -W by Kronecker vectorization, no definiteness checks.
Mat lyapunov_raw(const Mat& A, const Mat& W) {
    const int n = A.rows();
    const Mat At = A.transpose();
    const Mat L = kron(Mat::identity(n), At) + kron(At, Mat::identity(n));
    Vec rhs(static_cast<size_t>(n) * n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) rhs[static_cast<size_t>(j) * n + i] = -W(i, j);
    Vec p = solve(L, rhs);
    Mat P(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) P(i, j) = p[static_cast<size_t>(j) * n + i];
    return symmetrize(P);
}

double care_residual(const Mat& A, const Mat& B, const Mat& Q, const Mat& Rinv,
                     const Mat& P) {
    const Mat BRB = B * Rinv * B.transpose();
    return max_abs(A.transpose() * P + P * A - P * BRB * P + Q);
}

// Scalar Riccati: s p^2 - 2 a p - q = 0 with s = B R^-1 B'. Positive root.
double care_scalar(double a, double s, double q) {
    if (s <= 1e-300) {
        if (q == 0.0 && a < 0.0) return 0.0;
        if (a >= 0.0)
            throw NumericalError("care_solve: scalar problem not stabilizable (b = 0, a >= 0)");
        return -q / (2.0 * a);
    }
    const double disc = a * a + s * q;
    if (disc < 0.0) throw NumericalError("care_solve: scalar discriminant negative");
    return (a + std::sqrt(disc)) / s;
}

// Ackermann single-input pole placement: gain k (1 x n) placing the poles of
// A - b k at the given locations.
Mat ackermann(const Mat& A, const Mat& b, const Vec& poles) {
    const int n = A.rows();
    Mat C(n, n);  // controllability matrix [b, Ab, ..., A^(n-1) b]
    Vec col(n);
    for (int i = 0; i < n; ++i) col[i] = b(i, 0);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) C(i, j) = col[i];
        col = A * col;
    }
    Vec en(n, 0.0);
    en[n - 1] = 1.0;
    const Vec w = solve(C.transpose(), en);  // throws if not controllable
    Mat chi = Mat::identity(n);
    for (double p : poles) {
        Mat shift = A;
        for (int i = 0; i < n; ++i) shift(i, i) -= p;
        chi = chi * shift;
    }
    Mat k(1, n);
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += w[i] * chi(i, j);
        k(0, j) = s;
    }
    return k;
}

// Stabilizing gain for (A, B): zero if A is already Hurwitz, otherwise pole
// placement through a single-input reduction B*v over a few candidate v.
Mat stabilizing_gain(const Mat& A, const Mat& B) {
    const int n = A.rows();
    const int m = B.cols();
    if (spectral_abscissa(A) < -1e-12) return Mat(m, n);

    const double sigma = 1.0 + std::max(0.0, spectral_abscissa(A));
    Vec poles(n);
    for (int i = 0; i < n; ++i) poles[i] = -sigma * (1.0 + 0.5 * i);

    std::vector<Vec> candidates;
    for (int j = 0; j < m; ++j) {
        Vec v(m, 0.0);
        v[j] = 1.0;
        candidates.push_back(v);
    }
    SplitMix64 rng(0x1cbfu);
    for (int trial = 0; trial < 4; ++trial) {
        Vec v(m);
        for (int j = 0; j < m; ++j) v[j] = rng.uniform(-1.0, 1.0);
        candidates.push_back(v);
    }

    for (const Vec& v : candidates) {
        Mat bv(n, 1);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += B(i, j) * v[j];
            bv(i, 0) = s;
        }
        try {
            const Mat k1 = ackermann(A, bv, poles);
            Mat K(m, n);
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < n; ++j) K(i, j) = v[i] * k1(0, j);
            if (spectral_abscissa(A - B * K) < -1e-12) return K;
        } catch (const SingularityError&) {
            continue;  // this reduction is not controllable; try the next
        }
    }
    throw NumericalError("care_solve: failed to find a stabilizing initial gain");
}

}  // namespace

Mat care_solve(const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
    if (!A.is_square()) throw std::invalid_argument("care_solve: A must be square");
    const int n = A.rows();
    const int m = B.cols();
    if (B.rows() != n) throw std::invalid_argument("care_solve: B row count mismatch");
    if (Q.rows() != n || Q.cols() != n)
        throw std::invalid_argument("care_solve: Q shape mismatch");
    if (R.rows() != m || R.cols() != m)
        throw std::invalid_argument("care_solve: R shape mismatch");
    require_symmetric(Q, "care_solve: Q");
    require_symmetric(R, "care_solve: R");
    const Mat Rinv = inverse(R);

    if (n == 1) {
        double s = 0.0;  // B R^-1 B'
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) s += B(0, i) * Rinv(i, j) * B(0, j);
        Mat P(1, 1);
        P(0, 0) = care_scalar(A(0, 0), s, Q(0, 0));
        return P;
    }

    Mat K = stabilizing_gain(A, B);
    Mat P(n, n);
    constexpr int kMaxIter = 60;
    double residual = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
        const Mat Acl = A - B * K;
        const Mat W = Q + K.transpose() * R * K;
        P = lyapunov_raw(Acl, W);
        K = Rinv * B.transpose() * P;
        residual = care_residual(A, B, Q, Rinv, P);
        if (residual <= 1e-9) return symmetrize(P);
    }
    std::ostringstream msg;
    msg << "care_solve: Kleinman iteration stalled, residual " << residual;
    throw NumericalError(msg.str());
}

Mat lqr_gain(const Mat& A, const Mat& B, const Mat& Q, const Mat& R) {
    const Mat P = care_solve(A, B, Q, R);
    const Mat K = inverse(R) * B.transpose() * P;
    if (max_abs(K) > 0.0 || max_abs(Q) > 0.0) {
        // A - BK must be Hurwitz unless the problem is the degenerate all-zero
        // cost case (Q = 0, B = 0), where K = 0 and A may be anything stable.
        if (spectral_abscissa(A - B * K) >= 0.0)
            throw NumericalError("lqr_gain: closed loop is not Hurwitz");
    }
    return K;
}

Mat lyapunov_solve(const Mat& Acl, const Mat& Q) {
    if (!Acl.is_square()) throw std::invalid_argument("lyapunov_solve: Acl must be square");
    if (Q.rows() != Acl.rows() || Q.cols() != Acl.cols())
        throw std::invalid_argument("lyapunov_solve: Q shape mismatch");
    require_symmetric(Q, "lyapunov_solve: Q");
    cholesky(Q);  // positive definiteness gate
    if (spectral_abscissa(Acl) >= -1e-12)
        throw InfeasibleError("lyapunov_solve: Acl is not Hurwitz");
    const Mat P = lyapunov_raw(Acl, Q);
    const double res = max_abs(Acl.transpose() * P + P * Acl + Q);
    if (res > 1e-10 * (1.0 + max_abs(Q)))
        throw NumericalError("lyapunov_solve: residual too large");
    return P;
}

namespace {

std::pair<double, double> symmetric_eig_range(const Mat& M, const char* name) {
    require_symmetric(M, name);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues(M)) {
        lo = std::min(lo, l.real());
        hi = std::max(hi, l.real());
    }
    return {lo, hi};
}

}  // namespace

double ultimate_bound(const Mat& P, const Mat& Q, double D) {
    if (D < 0.0) throw std::domain_error("ultimate_bound: D must be non-negative");
    const auto [pmin, pmax] = symmetric_eig_range(P, "ultimate_bound: P");
    const auto [qmin, qmax] = symmetric_eig_range(Q, "ultimate_bound: Q");
    (void)qmax;
    if (pmin <= 0.0 || qmin <= 0.0)
        throw std::domain_error("ultimate_bound: P and Q must be positive definite");
    return std::sqrt(2.0 * pmax / qmin) * D;
}

bool check_hyperbolic(const Mat& A, double tol) {
    for (const auto& l : eigenvalues(A))
        if (std::abs(l.real()) <= tol) return false;
    return true;
}

Vec eig_real_parts(const Mat& A) {
    Vec out;
    for (const auto& l : eigenvalues(A)) out.push_back(l.real());
    return out;
}

}  // namespace icbf
