#pragma once

#include <cstddef>
#include <vector>

#include "cmvkit/cmv.hpp"
#include "cmvkit/matrix.hpp"
#include "cmvkit/qr_iter.hpp"

namespace cmvkit {

// Monic polynomial z^n + a_{n-1} z^{n-1} + ... + a_1 z + a_0, stored as
// coefficients a_0 .. a_{n-1}.
struct MonicPolynomial {
  std::vector<Complex> coefficients;

  std::size_t degree() const { return coefficients.size(); }
  Complex evaluate(Complex z) const;
};

// Companion matrix split A = U + z w^H with U the cyclic permutation
// (ones on the subdiagonal, one in the corner) and z = e1.
struct CompanionSplit {
  Matrix u;
  Matrix z;
  Matrix w;

  Matrix assembled() const;
};

CompanionSplit companion_split(const MonicPolynomial& p);

// Reduced companion form B = t + e1 v^H with t unitary CMV-like.
struct PerturbedCMVForm {
  Matrix t;
  Matrix v;  // n x 1
  CMVProfile profile;
  Matrix q;

  Matrix assembled() const;
  RankOnePerturbedForm step_state() const;  // left = e1 exactly
};

PerturbedCMVForm reduce_companion(const MonicPolynomial& p,
                                  const ReductionOptions& options = {});

struct RootsResult {
  std::vector<Complex> roots;
  EigenReport report;
};

// All degree-many roots, via the reduced companion form and shifted QR steps
// on the rank-one perturbed unitary matrix. tol_scale feeds the deflation
// threshold tol_scale * n * u * ||B||_F.
RootsResult roots(const MonicPolynomial& p,
                  const ShiftStrategy& shift = ShiftStrategy::wilkinson(),
                  std::size_t max_steps = 0, double tol_scale = 10.0);

}  // namespace cmvkit
