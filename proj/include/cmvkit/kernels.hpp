#pragma once

#include <cstddef>
#include <vector>

#include "cmvkit/matrix.hpp"

namespace cmvkit {

// Plane rotation G = [[c, s], [-conj(s), c]] acting on index pair (i, j),
// with c real. c^2 + |s|^2 = 1 up to roundoff.
struct GivensRotation {
  double c = 1.0;
  Complex s = 0.0;
  std::size_t i = 0;
  std::size_t j = 1;
};

// Rotation such that G * (a, b)^T = (r, 0)^T with r = sqrt(|a|^2 + |b|^2)
// up to a unit-modulus factor. a = b = 0 yields the identity.
GivensRotation givens_from_pair(Complex a, Complex b, std::size_t i = 0,
                                std::size_t j = 1);

// rows (i, j) of m <- G * rows
void apply_givens_rows(Matrix& m, const GivensRotation& g);
// cols (i, j) of m <- cols * G^H.  apply_givens_rows followed by
// apply_givens_cols with the same rotation is the similarity G m G^H.
void apply_givens_cols(Matrix& m, const GivensRotation& g);

struct QrFactorization {
  Matrix q;  // rows x cols (thin) or rows x rows (full)
  Matrix r;  // cols x cols upper triangular, real nonnegative diagonal
};

// Householder QR of a tall matrix (rows >= cols). The diagonal of r is made
// real and nonnegative by construction, which pins the column phases of q.
QrFactorization qr_tall(const Matrix& a, bool full_q = false);

struct RankDecision {
  std::size_t numerical_rank = 0;
  std::vector<double> singular_values;  // descending
  double threshold = 0.0;
};

// Closed-form SVD of a matrix with at most two rows and columns.
// b = u * diag(sigma) * v^H where u and v are unitary frames of the padded
// 2x2 problem. sigma1 is accurate relatively; sigma2 to O(u * sigma1).
struct Svd2x2 {
  double sigma1 = 0.0, sigma2 = 0.0;
  Complex u[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
  Complex v[2][2] = {{1.0, 0.0}, {0.0, 1.0}};
};
Svd2x2 svd2x2(Complex a, Complex b, Complex c, Complex d);
Svd2x2 svd2x2(const Matrix& b);  // pads to 2x2 with zeros

// Spectral norm of a block with at most 2 rows and 2 columns.
double spectral_norm_2x2(const Matrix& b);

// Rank of an at-most-2x2 block decided against `scale` (callers typically
// pass the n*u*||U||_F deflation scale). scale <= 0 selects the default
// policy max(rows, cols)*u*sigma1.
RankDecision numerical_rank_2x2(const Matrix& b, double scale);

struct SvdTwoCols {
  Matrix g;  // rows x cols, orthonormal columns
  RankDecision decision;
  Matrix v;  // cols x cols unitary
};

// Thin SVD of an n x k matrix with k <= 2, via thin QR plus the closed-form
// 2x2 SVD of the triangular factor. w = g * diag(sigma) * v^H.
SvdTwoCols svd_two_cols(const Matrix& w, double scale = 0.0);

}  // namespace cmvkit
