#include "cmvkit/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cmvkit {

namespace {

Complex unit_phase(Complex z) {
  const double a = std::abs(z);
  return a > 0.0 ? z / a : Complex(1.0);
}

}  // namespace

GivensRotation givens_from_pair(Complex a, Complex b, std::size_t i,
                                std::size_t j) {
  GivensRotation g;
  g.i = i;
  g.j = j;
  const double na = std::abs(a), nb = std::abs(b);
  if (nb == 0.0) return g;  // identity, also covers a = b = 0
  if (na == 0.0) {
    g.c = 0.0;
    g.s = std::conj(b) / nb;
    return g;
  }
  const double r = std::hypot(na, nb);
  g.c = na / r;
  g.s = (a / na) * std::conj(b) / r;
  return g;
}

void apply_givens_rows(Matrix& m, const GivensRotation& g) {
  const Complex s = g.s;
  for (std::size_t k = 0; k < m.cols(); ++k) {
    const Complex xi = m(g.i, k), xj = m(g.j, k);
    m(g.i, k) = g.c * xi + s * xj;
    m(g.j, k) = -std::conj(s) * xi + g.c * xj;
  }
}

void apply_givens_cols(Matrix& m, const GivensRotation& g) {
  const Complex s = g.s;
  for (std::size_t k = 0; k < m.rows(); ++k) {
    const Complex xi = m(k, g.i), xj = m(k, g.j);
    // cols * G^H with G^H = [[c, -s], [conj(s), c]]
    m(k, g.i) = g.c * xi + std::conj(s) * xj;
    m(k, g.j) = -s * xi + g.c * xj;
  }
}

QrFactorization qr_tall(const Matrix& a, bool full_q) {
  const std::size_t m = a.rows(), k = a.cols();
  if (m < k) throw std::invalid_argument("qr_tall: matrix must have rows >= cols");

  Matrix work = a;
  std::vector<std::vector<Complex>> vs(k);
  std::vector<double> betas(k, 0.0);

  for (std::size_t j = 0; j < k; ++j) {
    double xnorm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) xnorm2 += std::norm(work(i, j));
    const double xnorm = std::sqrt(xnorm2);
    if (xnorm == 0.0) continue;  // column already zero below and at j

    const Complex alpha = -unit_phase(work(j, j)) * xnorm;
    std::vector<Complex> v(m - j);
    for (std::size_t i = j; i < m; ++i) v[i - j] = work(i, j);
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (const Complex& z : v) vnorm2 += std::norm(z);
    if (vnorm2 == 0.0) continue;
    const double beta = 2.0 / vnorm2;

    work(j, j) = alpha;
    for (std::size_t i = j + 1; i < m; ++i) work(i, j) = 0.0;
    for (std::size_t col = j + 1; col < k; ++col) {
      Complex dot = 0.0;
      for (std::size_t i = j; i < m; ++i)
        dot += std::conj(v[i - j]) * work(i, col);
      dot *= beta;
      for (std::size_t i = j; i < m; ++i) work(i, col) -= dot * v[i - j];
    }
    vs[j] = std::move(v);
    betas[j] = beta;
  }

  const std::size_t qcols = full_q ? m : k;
  Matrix q(m, qcols);
  for (std::size_t i = 0; i < std::min(m, qcols); ++i) q(i, i) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    if (betas[jj] == 0.0) continue;
    const std::vector<Complex>& v = vs[jj];
    for (std::size_t col = 0; col < qcols; ++col) {
      Complex dot = 0.0;
      for (std::size_t i = jj; i < m; ++i)
        dot += std::conj(v[i - jj]) * q(i, col);
      dot *= betas[jj];
      for (std::size_t i = jj; i < m; ++i) q(i, col) -= dot * v[i - jj];
    }
  }

  Matrix r(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i <= j && i < k; ++i) r(i, j) = work(i, j);

  // Make the diagonal of r real and nonnegative.
  for (std::size_t j = 0; j < k; ++j) {
    const Complex d = r(j, j);
    const double ad = std::abs(d);
    if (ad == 0.0) continue;
    const Complex ph = d / ad;
    const Complex phc = std::conj(ph);
    r(j, j) = ad;
    for (std::size_t col = j + 1; col < k; ++col) r(j, col) *= phc;
    for (std::size_t i = 0; i < m; ++i) q(i, j) *= ph;
  }

  return {std::move(q), std::move(r)};
}

Svd2x2 svd2x2(Complex a, Complex b, Complex c, Complex d) {
  Svd2x2 out;
  // Gram matrix B^H B, Hermitian positive semidefinite.
  const double g11 = std::norm(a) + std::norm(c);
  const double g22 = std::norm(b) + std::norm(d);
  const Complex g12 = std::conj(a) * b + std::conj(c) * d;
  const double off = std::abs(g12);
  const double trace = g11 + g22;

  Complex v1x, v1y;
  if (off <= unit_roundoff * trace || trace == 0.0) {
    if (g11 >= g22) {
      v1x = 1.0;
      v1y = 0.0;
    } else {
      v1x = 0.0;
      v1y = 1.0;
    }
  } else {
    const double mid = 0.5 * (g11 + g22);
    const double rad = std::hypot(0.5 * (g11 - g22), off);
    const double lam1 = mid + rad;
    // Two algebraically equivalent eigenvector formulas; take the one with
    // the larger norm to avoid cancellation.
    const double na2 = off * off + (lam1 - g11) * (lam1 - g11);
    const double nb2 = (lam1 - g22) * (lam1 - g22) + off * off;
    if (na2 >= nb2) {
      const double nn = std::sqrt(na2);
      v1x = g12 / nn;
      v1y = (lam1 - g11) / nn;
    } else {
      const double nn = std::sqrt(nb2);
      v1x = (lam1 - g22) / nn;
      v1y = std::conj(g12) / nn;
    }
  }
  Complex v2x = -std::conj(v1y), v2y = std::conj(v1x);

  Complex w1x = a * v1x + b * v1y, w1y = c * v1x + d * v1y;
  Complex w2x = a * v2x + b * v2y, w2y = c * v2x + d * v2y;
  double s1 = std::hypot(std::abs(w1x), std::abs(w1y));
  double s2 = std::hypot(std::abs(w2x), std::abs(w2y));
  if (s2 > s1) {
    std::swap(v1x, v2x);
    std::swap(v1y, v2y);
    std::swap(w1x, w2x);
    std::swap(w1y, w2y);
    std::swap(s1, s2);
  }

  Complex u1x = 1.0, u1y = 0.0;
  if (s1 > 0.0) {
    u1x = w1x / s1;
    u1y = w1y / s1;
  }
  Complex u2x, u2y;
  if (s2 > 64.0 * unit_roundoff * s1) {
    u2x = w2x / s2;
    u2y = w2y / s2;
  } else {
    u2x = -std::conj(u1y);
    u2y = std::conj(u1x);
  }

  out.sigma1 = s1;
  out.sigma2 = s2;
  out.u[0][0] = u1x;
  out.u[1][0] = u1y;
  out.u[0][1] = u2x;
  out.u[1][1] = u2y;
  out.v[0][0] = v1x;
  out.v[1][0] = v1y;
  out.v[0][1] = v2x;
  out.v[1][1] = v2y;
  return out;
}

Svd2x2 svd2x2(const Matrix& b) {
  if (b.rows() > 2 || b.cols() > 2)
    throw std::invalid_argument("svd2x2: block larger than 2x2");
  auto at = [&](std::size_t i, std::size_t j) -> Complex {
    return (i < b.rows() && j < b.cols()) ? b(i, j) : Complex(0.0);
  };
  return svd2x2(at(0, 0), at(0, 1), at(1, 0), at(1, 1));
}

double spectral_norm_2x2(const Matrix& b) { return svd2x2(b).sigma1; }

RankDecision numerical_rank_2x2(const Matrix& b, double scale) {
  const Svd2x2 s = svd2x2(b);
  RankDecision d;
  const std::size_t nsv = std::min(std::max<std::size_t>(b.rows(), 1),
                                   std::max<std::size_t>(b.cols(), 1));
  d.singular_values = {s.sigma1};
  if (nsv > 1) d.singular_values.push_back(s.sigma2);
  d.threshold = scale > 0.0
                    ? scale
                    : static_cast<double>(std::max(b.rows(), b.cols())) *
                          unit_roundoff * s.sigma1;
  for (double sv : d.singular_values)
    if (sv > d.threshold) ++d.numerical_rank;
  return d;
}

SvdTwoCols svd_two_cols(const Matrix& w, double scale) {
  const std::size_t k = w.cols();
  if (k > 2) throw std::invalid_argument("svd_two_cols: more than two columns");
  if (k == 0 || w.rows() == 0)
    throw std::invalid_argument("svd_two_cols: empty input");
  if (w.rows() < k) {
    // Wide degenerate case (1x2): treat via the padded closed form.
    const Svd2x2 s = svd2x2(w);
    SvdTwoCols out;
    out.g = Matrix(1, k);
    out.g(0, 0) = s.u[0][0];
    if (k > 1) out.g(0, 1) = s.u[0][1];
    out.v = Matrix(k, k);
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t i = 0; i < k; ++i) out.v(i, j) = s.v[i][j];
    out.decision = numerical_rank_2x2(w, scale);
    return out;
  }

  QrFactorization f = qr_tall(w);
  const Svd2x2 s = svd2x2(f.r);

  Matrix u2(k, k);
  Matrix v(k, k);
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      u2(i, j) = s.u[i][j];
      v(i, j) = s.v[i][j];
    }

  SvdTwoCols out;
  out.g = mat_mul(f.q, u2);
  out.v = std::move(v);
  out.decision.singular_values = {s.sigma1};
  if (k > 1) out.decision.singular_values.push_back(s.sigma2);
  out.decision.threshold =
      scale > 0.0 ? scale
                  : static_cast<double>(std::max(w.rows(), w.cols())) *
                        unit_roundoff * s.sigma1;
  for (double sv : out.decision.singular_values)
    if (sv > out.decision.threshold) ++out.decision.numerical_rank;
  return out;
}

}  // namespace cmvkit
