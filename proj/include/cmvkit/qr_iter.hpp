#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "cmvkit/cmv.hpp"
#include "cmvkit/matrix.hpp"

namespace cmvkit {

struct ShiftStrategy {
  enum class Kind { zero, rayleigh, wilkinson, custom };
  Kind kind = Kind::wilkinson;
  Complex value = 0.0;

  static ShiftStrategy zero() { return {Kind::zero, 0.0}; }
  static ShiftStrategy rayleigh() { return {Kind::rayleigh, 0.0}; }
  static ShiftStrategy wilkinson() { return {Kind::wilkinson, 0.0}; }
  static ShiftStrategy custom(Complex v) { return {Kind::custom, v}; }
};

// Eigenvalues of a 2x2 matrix, larger magnitude first.
std::pair<Complex, Complex> eig2x2(Complex a, Complex b, Complex c, Complex d);

// Shift value for the trailing principal submatrix of t.
Complex select_shift(const Matrix& t, const ShiftStrategy& strategy);

struct QRStepResult {
  Matrix t_next;
  Matrix q_step;
  Complex shift_used = 0.0;
  double profile_violation = 0.0;  // max |entry| outside the profile, before zeroing
  bool shift_perturbed = false;
};

// One explicit shifted QR step t - gamma I = QR, t_next = RQ + gamma I.
// The off-profile magnitude of the result is recorded and those entries are
// then set to zero, keeping the iteration exactly on the profile.
QRStepResult qr_step(const Matrix& t, const CMVProfile& profile,
                     const ShiftStrategy& shift);

// Zeroes sub-threshold coupling blocks of t (and their superdiagonal partners
// when those are also below threshold) and returns the decoupled segments.
std::vector<Segment> deflate(Matrix& t, const CMVProfile& profile,
                             double threshold);

struct DeflationEvent {
  std::size_t index = 0;  // global row where the split occurred
  std::size_t step = 0;
};

struct EigenReport {
  std::size_t steps_total = 0;
  std::vector<DeflationEvent> deflations;
  double max_profile_violation = 0.0;
  bool converged = true;
};

struct EigenResult {
  std::vector<Complex> eigenvalues;
  EigenReport report;
};

// Complete shifted-QR eigensolver for a unitary matrix in CMV-like form.
EigenResult eigensolve_unitary(const Matrix& t, const CMVProfile& profile,
                               const ShiftStrategy& shift, std::size_t max_steps);

// B = t + left * right^H with t unitary. Constructed from a reduced companion
// form with left = e1 exactly; QR steps spread the correction, so the carrier
// keeps a general rank-one pair.
struct RankOnePerturbedForm {
  Matrix t;
  Matrix left;   // n x 1
  Matrix right;  // n x 1
  CMVProfile profile;

  Matrix assembled() const;
};

struct PerturbedStepReport {
  Complex shift_used = 0.0;
  bool shift_perturbed = false;
  // max |entry| below the block upper Hessenberg band of the assembled result
  double hessenberg_violation = 0.0;
  std::vector<RankDecision> subdiagonal_ranks;
  // sigma3/sigma1 of the slices B(1:2k, 2k+3:n), one per applicable boundary
  std::vector<double> upper_slice_ratios;
};

std::pair<RankOnePerturbedForm, PerturbedStepReport> qr_step_perturbed(
    const RankOnePerturbedForm& b, const ShiftStrategy& shift);

// Singular values of a general dense block, descending (one-sided Jacobi).
// Used for the aggregate rank reports; small matrices only.
std::vector<double> singular_values_dense(const Matrix& a);

}  // namespace cmvkit
