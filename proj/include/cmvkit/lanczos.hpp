#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cmvkit/kernels.hpp"
#include "cmvkit/matrix.hpp"

namespace cmvkit {

struct ReductionReport {
  double residual = 0.0;   // ||Q^H M Q - T||_F against the source matrix
  double unitarity = 0.0;  // ||Q^H Q - I||_F
  std::optional<std::size_t> breakdown_step;  // set iff a premature stop occurred
  std::vector<double> breakdown_norms;
  double deflation_threshold = 0.0;
  std::size_t steps = 0;
};

struct BlockTridiagonalForm {
  Matrix q;  // n x k accumulated basis; k = n when the reduction completed
  Matrix t;  // k x k Hermitian block tridiagonal
  std::vector<std::size_t> block_sizes;
  std::vector<std::size_t> restart_starts;  // always empty for this module
  ReductionReport report;

  bool completed() const { return !report.breakdown_step.has_value(); }
};

// Block Lanczos reduction of u_h = hermitian_part(u) started from
// D0 = [z | u z]. A premature stop is reported through
// report.breakdown_step together with the partial basis, not as an error.
BlockTridiagonalForm block_lanczos(const Matrix& u_h, const Matrix& z,
                                   const Matrix& u, double tol_scale = 10.0);

struct SimultaneousReductionCheck {
  double offband_hermitian = 0.0;
  double offband_anti_hermitian = 0.0;
  double offband_unitary = 0.0;
  double threshold = 0.0;
  bool ok = false;
};

// Measures how far Q^H U_H Q, Q^H U_AH Q and Q^H U Q are from the block
// tridiagonal profile induced by form.block_sizes.
SimultaneousReductionCheck verify_simultaneous_reduction(
    const BlockTridiagonalForm& form, const Matrix& u);

struct OffdiagRankEntry {
  std::size_t k = 0;  // coupling between blocks k and k+1 (0-based)
  RankDecision subdiagonal;
  RankDecision superdiagonal;
};

// Rank decisions for every off-diagonal block of a block tridiagonal matrix.
std::vector<OffdiagRankEntry> offdiag_rank_check(
    const Matrix& t, const std::vector<std::size_t>& block_sizes, double scale);

// Largest |entry| outside the block tridiagonal band.
double max_off_band(const Matrix& t, const std::vector<std::size_t>& block_sizes);

}  // namespace cmvkit
