#pragma once

#include <functional>

#include "icbf/matrix.hpp"

namespace icbf {

struct OdeState {
    double t = 0.0;
    Vec x;
};

// Right-hand side of x' = f(t, x, u).
using VectorField = std::function<Vec(double, const Vec&, const Vec&)>;

// Classical fixed-step 4th-order Runge-Kutta step with u held constant.
// Throws IntegrationError if the field evaluates to a non-finite value.
OdeState rk4_step(const VectorField& f, const OdeState& s, const Vec& u, double dt);

// Continuous algebraic Riccati equation A'P + PA - P B R^-1 B' P + Q = 0.
// Kleinman-Newton iteration seeded by a pole-placement stabilizing gain;
// scalar problems short-circuit to the closed-form positive root.
// Residual of the accepted solution is at most 1e-9 in the max-abs norm.
Mat care_solve(const Mat& A, const Mat& B, const Mat& Q, const Mat& R);

// LQR state-feedback gain K = R^-1 B' P for u = -K x; A - B K is verified
// Hurwitz before returning.
Mat lqr_gain(const Mat& A, const Mat& B, const Mat& Q, const Mat& R);

// Continuous Lyapunov equation Acl' P + P Acl = -Q, solved by Kronecker
// vectorization. Requires Acl Hurwitz and Q symmetric positive definite.
Mat lyapunov_solve(const Mat& Acl, const Mat& Q);

// sqrt(2 lambda_max(P) / lambda_min(Q)) * D for P, Q > 0 and D >= 0.
double ultimate_bound(const Mat& P, const Mat& Q, double D);

// True iff no eigenvalue of A lies within `tol` of the imaginary axis.
bool check_hyperbolic(const Mat& A, double tol = 1e-9);

// Real parts of the eigenvalues of A, in no particular order.
Vec eig_real_parts(const Mat& A);

}  // namespace icbf
