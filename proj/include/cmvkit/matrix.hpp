#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

namespace cmvkit {

using Complex = std::complex<double>;

// Unit roundoff of IEEE double precision (2^-53).
inline constexpr double unit_roundoff = 1.1102230246251565e-16;

inline bool is_finite(Complex z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Dense complex matrix, column-major storage.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}
  // Takes ownership of `data` (column-major); rejects size mismatches and
  // non-finite entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> data);

  static Matrix identity(std::size_t n);
  static Matrix column(std::vector<Complex> entries);
  static Matrix unit_column(std::size_t n, std::size_t index);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  Complex& operator()(std::size_t i, std::size_t j) {
    return data_[j * rows_ + i];
  }
  Complex operator()(std::size_t i, std::size_t j) const {
    return data_[j * rows_ + i];
  }

  const std::vector<Complex>& data() const { return data_; }
  std::vector<Complex>& data() { return data_; }

  bool finite() const;
  bool square() const { return rows_ == cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

// Dense product with a fixed accumulation order (ascending inner index), so
// results are reproducible and comparable against a naive oracle bit for bit.
Matrix mat_mul(const Matrix& a, const Matrix& b);
Matrix adjoint(const Matrix& a);

Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(Complex alpha, const Matrix& a);

// (u + u^H)/2 with the result symmetrized so it is Hermitian bit for bit.
Matrix hermitian_part(const Matrix& u);
// (u - u^H)/2, anti-Hermitian bit for bit.
Matrix anti_hermitian_part(const Matrix& u);

double frobenius_norm(const Matrix& a);
double max_abs(const Matrix& a);

// ||q^H q - I||_F
double unitarity_residual(const Matrix& q);

// Copy of a[r0:r1, c0:c1) (half-open ranges).
Matrix submatrix(const Matrix& a, std::size_t r0, std::size_t r1,
                 std::size_t c0, std::size_t c1);
void assign_submatrix(Matrix& a, std::size_t r0, std::size_t c0,
                      const Matrix& block);

// Copy of a with `delta` added to every diagonal entry.
Matrix with_shifted_diagonal(const Matrix& a, Complex delta);

}  // namespace cmvkit
