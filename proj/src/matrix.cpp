#include "cmvkit/matrix.hpp"

#include <stdexcept>
#include <utility>

namespace cmvkit {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_)
    throw std::invalid_argument("matrix data length does not match rows*cols");
  for (const Complex& z : data_)
    if (!is_finite(z))
      throw std::invalid_argument("matrix entries must be finite");
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::column(std::vector<Complex> entries) {
  const std::size_t n = entries.size();
  return Matrix(n, 1, std::move(entries));
}

Matrix Matrix::unit_column(std::size_t n, std::size_t index) {
  Matrix m(n, 1);
  m(index, 0) = 1.0;
  return m;
}

bool Matrix::finite() const {
  for (const Complex& z : data_)
    if (!is_finite(z)) return false;
  return true;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("mat_mul: inner dimensions do not match");
  Matrix c(a.rows(), b.cols());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < k; ++l) {
      const Complex blj = b(l, j);
      for (std::size_t i = 0; i < m; ++i) c(i, j) += a(i, l) * blj;
    }
  return c;
}

Matrix adjoint(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) r(j, i) = std::conj(a(i, j));
  return r;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix addition: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < c.data().size(); ++i)
    c.data()[i] = a.data()[i] + b.data()[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("matrix subtraction: shape mismatch");
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < c.data().size(); ++i)
    c.data()[i] = a.data()[i] - b.data()[i];
  return c;
}

Matrix operator*(Complex alpha, const Matrix& a) {
  Matrix c(a.rows(), a.cols());
  for (std::size_t i = 0; i < c.data().size(); ++i)
    c.data()[i] = alpha * a.data()[i];
  return c;
}

Matrix hermitian_part(const Matrix& u) {
  if (!u.square())
    throw std::invalid_argument("hermitian_part: matrix must be square");
  const std::size_t n = u.rows();
  Matrix h(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    h(j, j) = u(j, j).real();
    for (std::size_t i = 0; i < j; ++i) {
      const Complex v = 0.5 * (u(i, j) + std::conj(u(j, i)));
      h(i, j) = v;
      h(j, i) = std::conj(v);
    }
  }
  return h;
}

Matrix anti_hermitian_part(const Matrix& u) {
  if (!u.square())
    throw std::invalid_argument("anti_hermitian_part: matrix must be square");
  const std::size_t n = u.rows();
  Matrix a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    a(j, j) = Complex(0.0, u(j, j).imag());
    for (std::size_t i = 0; i < j; ++i) {
      const Complex v = 0.5 * (u(i, j) - std::conj(u(j, i)));
      a(i, j) = v;
      a(j, i) = -std::conj(v);
    }
  }
  return a;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (const Complex& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (const Complex& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

double unitarity_residual(const Matrix& q) {
  if (!q.square())
    throw std::invalid_argument("unitarity_residual: matrix must be square");
  const std::size_t n = q.rows();
  double s = 0.0;
  for (std::size_t j1 = 0; j1 < n; ++j1)
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      Complex dot = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        dot += std::conj(q(i, j1)) * q(i, j2);
      if (j1 == j2) dot -= 1.0;
      s += std::norm(dot);
    }
  return std::sqrt(s);
}

Matrix submatrix(const Matrix& a, std::size_t r0, std::size_t r1,
                 std::size_t c0, std::size_t c1) {
  if (r1 < r0 || c1 < c0 || r1 > a.rows() || c1 > a.cols())
    throw std::invalid_argument("submatrix: range out of bounds");
  Matrix b(r1 - r0, c1 - c0);
  for (std::size_t j = c0; j < c1; ++j)
    for (std::size_t i = r0; i < r1; ++i) b(i - r0, j - c0) = a(i, j);
  return b;
}

void assign_submatrix(Matrix& a, std::size_t r0, std::size_t c0,
                      const Matrix& block) {
  if (r0 + block.rows() > a.rows() || c0 + block.cols() > a.cols())
    throw std::invalid_argument("assign_submatrix: block out of bounds");
  for (std::size_t j = 0; j < block.cols(); ++j)
    for (std::size_t i = 0; i < block.rows(); ++i)
      a(r0 + i, c0 + j) = block(i, j);
}

Matrix with_shifted_diagonal(const Matrix& a, Complex delta) {
  Matrix c = a;
  const std::size_t n = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < n; ++i) c(i, i) += delta;
  return c;
}

}  // namespace cmvkit
