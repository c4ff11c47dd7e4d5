#include "icbf/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "icbf/errors.hpp"

namespace icbf {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Mat::Mat(int rows, int cols, double fill)
    : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {
    require(rows >= 0 && cols >= 0, "Mat: negative dimension");
}

Mat::Mat(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = static_cast<int>(rows.size());
    cols_ = rows_ > 0 ? static_cast<int>(rows.begin()->size()) : 0;
    data_.reserve(static_cast<size_t>(rows_) * cols_);
    for (const auto& r : rows) {
        require(static_cast<int>(r.size()) == cols_, "Mat: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Mat Mat::identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Mat Mat::diag(const Vec& d) {
    Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (int i = 0; i < m.rows(); ++i) m(i, i) = d[i];
    return m;
}

Mat Mat::row(const Vec& v) {
    Mat m(1, static_cast<int>(v.size()));
    for (int j = 0; j < m.cols(); ++j) m(0, j) = v[j];
    return m;
}

Mat Mat::col(const Vec& v) {
    Mat m(static_cast<int>(v.size()), 1);
    for (int i = 0; i < m.rows(); ++i) m(i, 0) = v[i];
    return m;
}

Mat Mat::transpose() const {
    Mat t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

bool Mat::is_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Mat& Mat::operator+=(const Mat& rhs) {
    require(rows_ == rhs.rows_ && cols_ == rhs.cols_, "Mat+: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Mat& Mat::operator-=(const Mat& rhs) {
    require(rows_ == rhs.rows_ && cols_ == rhs.cols_, "Mat-: shape mismatch");
    for (size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Mat& Mat::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Mat operator+(Mat a, const Mat& b) { return a += b; }
Mat operator-(Mat a, const Mat& b) { return a -= b; }
Mat operator*(double s, Mat a) { return a *= s; }
Mat operator*(Mat a, double s) { return a *= s; }

Mat operator*(const Mat& a, const Mat& b) {
    require(a.cols() == b.rows(), "Mat*: shape mismatch");
    Mat c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vec operator*(const Mat& a, const Vec& x) {
    require(a.cols() == static_cast<int>(x.size()), "Mat*Vec: shape mismatch");
    Vec y(a.rows(), 0.0);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

Vec operator+(Vec a, const Vec& b) {
    require(a.size() == b.size(), "Vec+: size mismatch");
    for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

Vec operator-(Vec a, const Vec& b) {
    require(a.size() == b.size(), "Vec-: size mismatch");
    for (size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

Vec operator*(double s, Vec v) {
    for (double& x : v) x *= s;
    return v;
}

double dot(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "dot: size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool is_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double inf_norm(const Mat& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols(); ++j) s += std::abs(a(i, j));
        m = std::max(m, s);
    }
    return m;
}

double max_abs(const Mat& a) {
    double m = 0.0;
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

Mat kron(const Mat& a, const Mat& b) {
    Mat c(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) {
            const double aij = a(i, j);
            if (aij == 0.0) continue;
            for (int k = 0; k < b.rows(); ++k)
                for (int l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

namespace {

// LU with partial pivoting, in place. Returns permutation sign, fills perm.
double lu_factor(Mat& a, std::vector<int>& perm) {
    const int n = a.rows();
    perm.resize(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    const double tiny = 1e-13 * std::max(max_abs(a), 1.0e-30);
    double sign = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) <= tiny)
            throw SingularityError("matrix is singular to working precision");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(perm[k], perm[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const double lik = a(i, k);
            for (int j = k + 1; j < n; ++j) a(i, j) -= lik * a(k, j);
        }
    }
    return sign;
}

Vec lu_solve(const Mat& lu, const std::vector<int>& perm, const Vec& b) {
    const int n = lu.rows();
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= lu(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
        x[i] /= lu(i, i);
    }
    return x;
}

}  // namespace

Vec solve(const Mat& a, const Vec& b) {
    require(a.is_square(), "solve: matrix not square");
    require(a.rows() == static_cast<int>(b.size()), "solve: rhs size mismatch");
    Mat lu = a;
    std::vector<int> perm;
    lu_factor(lu, perm);
    return lu_solve(lu, perm, b);
}

Mat solve(const Mat& a, const Mat& b) {
    require(a.is_square() && a.rows() == b.rows(), "solve: shape mismatch");
    Mat lu = a;
    std::vector<int> perm;
    lu_factor(lu, perm);
    Mat x(a.rows(), b.cols());
    Vec col(a.rows());
    for (int j = 0; j < b.cols(); ++j) {
        for (int i = 0; i < a.rows(); ++i) col[i] = b(i, j);
        Vec xj = lu_solve(lu, perm, col);
        for (int i = 0; i < a.rows(); ++i) x(i, j) = xj[i];
    }
    return x;
}

Mat inverse(const Mat& a) { return solve(a, Mat::identity(a.rows())); }

double determinant(const Mat& a) {
    require(a.is_square(), "determinant: matrix not square");
    Mat lu = a;
    std::vector<int> perm;
    double sign;
    try {
        sign = lu_factor(lu, perm);
    } catch (const SingularityError&) {
        return 0.0;
    }
    double d = sign;
    for (int i = 0; i < a.rows(); ++i) d *= lu(i, i);
    return d;
}

Mat cholesky(const Mat& a) {
    require(a.is_square(), "cholesky: matrix not square");
    const int n = a.rows();
    Mat l(n, n);
    for (int j = 0; j < n; ++j) {
        double d = a(j, j);
        for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0 || !std::isfinite(d))
            throw NumericalError("cholesky: matrix not positive definite");
        l(j, j) = std::sqrt(d);
        for (int i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

Vec cholesky_solve(const Mat& L, const Vec& b) {
    const int n = L.rows();
    Vec x(b);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) x[i] -= L(i, j) * x[j];
        x[i] /= L(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= L(j, i) * x[j];
        x[i] /= L(i, i);
    }
    return x;
}

double condition_estimate(const Mat& a) {
    try {
        return inf_norm(a) * inf_norm(inverse(a));
    } catch (const SingularityError&) {
        return std::numeric_limits<double>::infinity();
    }
}

namespace {

// Householder vector for x: returns (v, beta) with v[0] = 1 such that
// (I - beta v v^T) x = ||x|| e1 (up to sign).
std::pair<Vec, double> house(const Vec& x) {
    const size_t n = x.size();
    double sigma = 0.0;
    for (size_t i = 1; i < n; ++i) sigma += x[i] * x[i];
    Vec v(x);
    v[0] = 1.0;
    double beta = 0.0;
    if (sigma > 0.0) {
        const double mu = std::sqrt(x[0] * x[0] + sigma);
        double v0;
        if (x[0] <= 0.0)
            v0 = x[0] - mu;
        else
            v0 = -sigma / (x[0] + mu);
        beta = 2.0 * v0 * v0 / (sigma + v0 * v0);
        for (size_t i = 1; i < n; ++i) v[i] = x[i] / v0;
    }
    return {v, beta};
}

// Householder similarity reduction to upper Hessenberg form.
Mat hessenberg(Mat h) {
    const int n = h.rows();
    for (int k = 0; k + 2 < n; ++k) {
        Vec x(n - k - 1);
        for (int i = 0; i < n - k - 1; ++i) x[i] = h(k + 1 + i, k);
        auto [v, beta] = house(x);
        if (beta == 0.0) continue;
        // left: rows k+1..n-1, columns k..n-1
        for (int j = k; j < n; ++j) {
            double s = 0.0;
            for (int i = 0; i < n - k - 1; ++i) s += v[i] * h(k + 1 + i, j);
            s *= beta;
            for (int i = 0; i < n - k - 1; ++i) h(k + 1 + i, j) -= s * v[i];
        }
        // right: all rows, columns k+1..n-1
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n - k - 1; ++j) s += h(i, k + 1 + j) * v[j];
            s *= beta;
            for (int j = 0; j < n - k - 1; ++j) h(i, k + 1 + j) -= s * v[j];
        }
        for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
    }
    return h;
}

void eig_2x2(double a, double b, double c, double d,
             std::vector<std::complex<double>>& out) {
    const double tr = a + d;
    const double det = a * d - b * c;
    const double disc = 0.25 * tr * tr - det;
    if (disc >= 0.0) {
        const double root = std::sqrt(disc);
        out.emplace_back(0.5 * tr + root, 0.0);
        out.emplace_back(0.5 * tr - root, 0.0);
    } else {
        const double im = std::sqrt(-disc);
        out.emplace_back(0.5 * tr, im);
        out.emplace_back(0.5 * tr, -im);
    }
}

constexpr double kDeflateTol = 1e-12;

// One implicit Francis double-shift sweep on an unreduced Hessenberg matrix.
void francis_sweep(Mat& h, double shift_sum, double shift_prod) {
    const int n = h.rows();
    double x = h(0, 0) * h(0, 0) + h(0, 1) * h(1, 0) - shift_sum * h(0, 0) + shift_prod;
    double y = h(1, 0) * (h(0, 0) + h(1, 1) - shift_sum);
    double z = h(2, 1) * h(1, 0);
    for (int k = 0; k <= n - 3; ++k) {
        auto [v, beta] = house({x, y, z});
        const int q = std::max(0, k - 1);
        if (beta != 0.0) {
            for (int j = q; j < n; ++j) {
                double s = v[0] * h(k, j) + v[1] * h(k + 1, j) + v[2] * h(k + 2, j);
                s *= beta;
                h(k, j) -= s * v[0];
                h(k + 1, j) -= s * v[1];
                h(k + 2, j) -= s * v[2];
            }
            const int r = std::min(k + 3, n - 1);
            for (int i = 0; i <= r; ++i) {
                double s = h(i, k) * v[0] + h(i, k + 1) * v[1] + h(i, k + 2) * v[2];
                s *= beta;
                h(i, k) -= s * v[0];
                h(i, k + 1) -= s * v[1];
                h(i, k + 2) -= s * v[2];
            }
        }
        x = h(k + 1, k);
        y = h(k + 2, k);
        if (k < n - 3) z = h(k + 3, k);
    }
    auto [v, beta] = house({x, y});
    if (beta != 0.0) {
        for (int j = n - 3; j < n; ++j) {
            double s = v[0] * h(n - 2, j) + v[1] * h(n - 1, j);
            s *= beta;
            h(n - 2, j) -= s * v[0];
            h(n - 1, j) -= s * v[1];
        }
        for (int i = 0; i < n; ++i) {
            double s = h(i, n - 2) * v[0] + h(i, n - 1) * v[1];
            s *= beta;
            h(i, n - 2) -= s * v[0];
            h(i, n - 1) -= s * v[1];
        }
    }
}

void eig_hessenberg(Mat h, std::vector<std::complex<double>>& out) {
    const int n = h.rows();
    if (n == 0) return;
    if (n == 1) {
        out.emplace_back(h(0, 0), 0.0);
        return;
    }
    if (n == 2) {
        eig_2x2(h(0, 0), h(0, 1), h(1, 0), h(1, 1), out);
        return;
    }
    const double hnorm = std::max(inf_norm(h), 1e-30);
    int iter = 0;
    const int max_iter = 30 * n;
    for (;;) {
        // Split at any negligible subdiagonal and recurse on the blocks.
        for (int l = 1; l < n; ++l) {
            const double bound =
                kDeflateTol * (std::abs(h(l - 1, l - 1)) + std::abs(h(l, l)) + hnorm * 1e-6);
            if (std::abs(h(l, l - 1)) <= bound) {
                Mat top(l, l);
                for (int i = 0; i < l; ++i)
                    for (int j = 0; j < l; ++j) top(i, j) = h(i, j);
                Mat bot(n - l, n - l);
                for (int i = 0; i < n - l; ++i)
                    for (int j = 0; j < n - l; ++j) bot(i, j) = h(l + i, l + j);
                eig_hessenberg(std::move(top), out);
                eig_hessenberg(std::move(bot), out);
                return;
            }
        }
        if (iter >= max_iter)
            throw NumericalError("eigenvalues: QR iteration did not converge");
        ++iter;
        double shift_sum, shift_prod;
        if (iter % 11 == 10) {
            // exceptional shift to break symmetric cycles
            const double s = std::abs(h(n - 1, n - 2)) + std::abs(h(n - 2, n - 3));
            shift_sum = 1.5 * s;
            shift_prod = s * s;
        } else {
            shift_sum = h(n - 2, n - 2) + h(n - 1, n - 1);
            shift_prod =
                h(n - 2, n - 2) * h(n - 1, n - 1) - h(n - 2, n - 1) * h(n - 1, n - 2);
        }
        francis_sweep(h, shift_sum, shift_prod);
    }
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const Mat& a) {
    require(a.is_square(), "eigenvalues: matrix not square");
    if (!a.is_finite()) throw NumericalError("eigenvalues: non-finite entries");
    std::vector<std::complex<double>> out;
    out.reserve(a.rows());
    eig_hessenberg(hessenberg(a), out);
    return out;
}

double spectral_abscissa(const Mat& a) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& l : eigenvalues(a)) m = std::max(m, l.real());
    return m;
}

}  // namespace icbf
