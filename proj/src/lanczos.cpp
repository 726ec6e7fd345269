#include "cmvkit/lanczos.hpp"

#include <stdexcept>

namespace cmvkit {

namespace {

void check_inputs(const Matrix& u_h, const Matrix& z, const Matrix& u) {
  if (!u.square() || !u_h.square() || u.rows() != u_h.rows())
    throw std::invalid_argument("block_lanczos: square matrices of equal size required");
  if (z.cols() != 1 || z.rows() != u.rows())
    throw std::invalid_argument("block_lanczos: z must be an n x 1 column");
  if (!u.finite() || !u_h.finite() || !z.finite())
    throw std::invalid_argument("block_lanczos: inputs must be finite");
  const double n = static_cast<double>(u.rows());
  if (unitarity_residual(u) > 100.0 * n * unit_roundoff)
    throw std::invalid_argument("block_lanczos: u is not unitary to tolerance");
  if (frobenius_norm(z) == 0.0)
    throw std::invalid_argument("block_lanczos: z must be nonzero");
}

}  // namespace

BlockTridiagonalForm block_lanczos(const Matrix& u_h, const Matrix& z,
                                   const Matrix& u, double tol_scale) {
  check_inputs(u_h, z, u);
  const std::size_t n = u.rows();
  const double threshold =
      tol_scale * static_cast<double>(n) * unit_roundoff * frobenius_norm(u);

  BlockTridiagonalForm form;
  form.report.deflation_threshold = threshold;

  Matrix d0(n, 2);
  const Matrix uz = mat_mul(u, z);
  for (std::size_t i = 0; i < n; ++i) {
    d0(i, 0) = z(i, 0);
    d0(i, 1) = uz(i, 0);
  }

  SvdTwoCols init = svd_two_cols(d0, threshold);
  std::size_t s = init.decision.numerical_rank;
  if (s == 0)
    throw std::invalid_argument("block_lanczos: starting block vanished");

  Matrix q(n, n);
  Matrix t(n, n);
  assign_submatrix(q, 0, 0, submatrix(init.g, 0, n, 0, s));
  form.block_sizes.push_back(s);

  std::size_t s0 = 0, s1 = s;
  std::size_t p0 = 0, p1 = 0;
  bool has_prev = false;
  std::size_t step = 0;

  while (s1 < n) {
    ++step;
    const Matrix qcur = submatrix(q, 0, n, s0, s1);
    Matrix w = mat_mul(u_h, qcur);
    const Matrix diag_block = mat_mul(adjoint(qcur), w);
    assign_submatrix(t, s0, s0, diag_block);
    w = w - mat_mul(qcur, diag_block);
    if (has_prev)
      w = w - mat_mul(submatrix(q, 0, n, p0, p1), submatrix(t, p0, p1, s0, s1));
    // One full re-orthogonalization pass against everything built so far.
    const Matrix qall = submatrix(q, 0, n, 0, s1);
    w = w - mat_mul(qall, mat_mul(adjoint(qall), w));

    SvdTwoCols sv = svd_two_cols(w, threshold);
    const std::size_t snew = sv.decision.numerical_rank;
    if (snew == 0) {
      form.report.breakdown_step = step;
      form.report.breakdown_norms.push_back(sv.decision.singular_values[0]);
      form.q = submatrix(q, 0, n, 0, s1);
      form.t = submatrix(t, 0, s1, 0, s1);
      form.report.steps = step;
      form.report.unitarity = frobenius_norm(
          mat_mul(adjoint(form.q), form.q) - Matrix::identity(s1));
      form.report.residual = frobenius_norm(
          mat_mul(adjoint(form.q), mat_mul(u_h, form.q)) - form.t);
      return form;
    }

    // Coupling block R = diag(sigma(1:snew)) * V(:, 1:s)^H.
    Matrix coupling(snew, s);
    for (std::size_t i = 0; i < snew; ++i)
      for (std::size_t j = 0; j < s; ++j)
        coupling(i, j) =
            sv.decision.singular_values[i] * std::conj(sv.v(j, i));

    p0 = s0;
    p1 = s1;
    s0 = s1;
    s1 += snew;
    has_prev = true;
    assign_submatrix(q, 0, s0, submatrix(sv.g, 0, n, 0, snew));
    assign_submatrix(t, s0, p0, coupling);
    assign_submatrix(t, p0, s0, adjoint(coupling));
    form.block_sizes.push_back(snew);
    s = snew;
  }

  const Matrix qcur = submatrix(q, 0, n, s0, s1);
  assign_submatrix(t, s0, s0, mat_mul(adjoint(qcur), mat_mul(u_h, qcur)));

  form.q = std::move(q);
  form.t = std::move(t);
  form.report.steps = step;
  form.report.unitarity = unitarity_residual(form.q);
  form.report.residual = frobenius_norm(
      mat_mul(adjoint(form.q), mat_mul(u_h, form.q)) - form.t);
  return form;
}

namespace {

std::vector<std::size_t> block_offsets(const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> off(sizes.size() + 1, 0);
  for (std::size_t k = 0; k < sizes.size(); ++k) off[k + 1] = off[k] + sizes[k];
  return off;
}

}  // namespace

double max_off_band(const Matrix& t, const std::vector<std::size_t>& block_sizes) {
  const auto off = block_offsets(block_sizes);
  const std::size_t n = t.rows();
  if (off.back() != n)
    throw std::invalid_argument("max_off_band: block sizes do not cover the matrix");
  std::vector<std::size_t> block_of(n);
  for (std::size_t k = 0; k < block_sizes.size(); ++k)
    for (std::size_t i = off[k]; i < off[k + 1]; ++i) block_of[i] = k;
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t bi = block_of[i], bj = block_of[j];
      if (bi > bj + 1 || bj > bi + 1) m = std::max(m, std::abs(t(i, j)));
    }
  return m;
}

SimultaneousReductionCheck verify_simultaneous_reduction(
    const BlockTridiagonalForm& form, const Matrix& u) {
  if (!form.completed())
    throw std::invalid_argument(
        "verify_simultaneous_reduction: form must come from a completed reduction");
  const std::size_t n = u.rows();
  SimultaneousReductionCheck check;
  check.threshold =
      10.0 * static_cast<double>(n) * unit_roundoff * frobenius_norm(u);

  const Matrix qh = adjoint(form.q);
  const Matrix th = mat_mul(qh, mat_mul(hermitian_part(u), form.q));
  const Matrix tah = mat_mul(qh, mat_mul(anti_hermitian_part(u), form.q));
  const Matrix tu = mat_mul(qh, mat_mul(u, form.q));
  check.offband_hermitian = max_off_band(th, form.block_sizes);
  check.offband_anti_hermitian = max_off_band(tah, form.block_sizes);
  check.offband_unitary = max_off_band(tu, form.block_sizes);
  check.ok = check.offband_hermitian <= check.threshold &&
             check.offband_anti_hermitian <= check.threshold &&
             check.offband_unitary <= check.threshold;
  return check;
}

std::vector<OffdiagRankEntry> offdiag_rank_check(
    const Matrix& t, const std::vector<std::size_t>& block_sizes, double scale) {
  const auto off = block_offsets(block_sizes);
  if (off.back() != t.rows() || !t.square())
    throw std::invalid_argument("offdiag_rank_check: block sizes do not cover t");
  std::vector<OffdiagRankEntry> out;
  for (std::size_t k = 0; k + 1 < block_sizes.size(); ++k) {
    OffdiagRankEntry e;
    e.k = k;
    e.subdiagonal = numerical_rank_2x2(
        submatrix(t, off[k + 1], off[k + 2], off[k], off[k + 1]), scale);
    e.superdiagonal = numerical_rank_2x2(
        submatrix(t, off[k], off[k + 1], off[k + 1], off[k + 2]), scale);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace cmvkit
