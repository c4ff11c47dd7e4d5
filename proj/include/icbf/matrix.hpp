#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace icbf {

using Vec = std::vector<double>;

// Dense row-major matrix. Sized for control work (dimensions up to ~16 per
// side); no attempt at sparse or blocked storage.
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols, double fill = 0.0);
    Mat(std::initializer_list<std::initializer_list<double>> rows);

    static Mat identity(int n);
    static Mat diag(const Vec& d);
    static Mat row(const Vec& v);     // 1 x n
    static Mat col(const Vec& v);     // n x 1

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool empty() const { return rows_ == 0 || cols_ == 0; }

    double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

    Mat transpose() const;
    bool is_finite() const;
    bool is_square() const { return rows_ == cols_; }

    Mat& operator+=(const Mat& rhs);
    Mat& operator-=(const Mat& rhs);
    Mat& operator*=(double s);

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

Mat operator+(Mat a, const Mat& b);
Mat operator-(Mat a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(double s, Mat a);
Mat operator*(Mat a, double s);
Vec operator*(const Mat& a, const Vec& x);

// Vector helpers.
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator*(double s, Vec v);
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& v);
double norm_inf(const Vec& v);
bool is_finite(const Vec& v);

double inf_norm(const Mat& a);   // max row sum
double max_abs(const Mat& a);

Mat kron(const Mat& a, const Mat& b);

// Solve A x = b by LU with partial pivoting. Throws SingularityError.
Vec solve(const Mat& a, const Vec& b);
Mat solve(const Mat& a, const Mat& b);
Mat inverse(const Mat& a);
double determinant(const Mat& a);

// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
// Throws NumericalError if the matrix is not positive definite.
Mat cholesky(const Mat& a);
// Solve A x = b given L from cholesky(A).
Vec cholesky_solve(const Mat& L, const Vec& b);

// Crude condition estimate ||A||_inf * ||A^-1||_inf.
double condition_estimate(const Mat& a);

// Eigenvalues of a real square matrix: Householder reduction to Hessenberg
// form followed by Francis double-shift QR iteration. Throws NumericalError
// if the iteration fails to converge.
std::vector<std::complex<double>> eigenvalues(const Mat& a);

double spectral_abscissa(const Mat& a);  // max real part of eigenvalues

}  // namespace icbf
