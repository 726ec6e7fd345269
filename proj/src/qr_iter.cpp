#include "cmvkit/qr_iter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace cmvkit {

std::pair<Complex, Complex> eig2x2(Complex a, Complex b, Complex c, Complex d) {
  const Complex mid = 0.5 * (a + d);
  const Complex det = a * d - b * c;
  const Complex disc = std::sqrt(mid * mid - det);
  const Complex lam_plus = mid + disc;
  const Complex lam_minus = mid - disc;
  Complex big = std::abs(lam_plus) >= std::abs(lam_minus) ? lam_plus : lam_minus;
  Complex small = big != Complex(0.0) ? det / big : mid - (big - mid);
  return {big, small};
}

Complex select_shift(const Matrix& t, const ShiftStrategy& strategy) {
  const std::size_t n = t.rows();
  switch (strategy.kind) {
    case ShiftStrategy::Kind::zero:
      return 0.0;
    case ShiftStrategy::Kind::custom:
      return strategy.value;
    case ShiftStrategy::Kind::rayleigh:
      return t(n - 1, n - 1);
    case ShiftStrategy::Kind::wilkinson: {
      if (n == 1) return t(0, 0);
      const auto [l1, l2] = eig2x2(t(n - 2, n - 2), t(n - 2, n - 1),
                                   t(n - 1, n - 2), t(n - 1, n - 1));
      const Complex corner = t(n - 1, n - 1);
      return std::abs(l1 - corner) <= std::abs(l2 - corner) ? l1 : l2;
    }
  }
  return 0.0;
}

namespace {

// Explicit shifted QR step on a dense matrix; returns (result, q, shift,
// perturbed). If the triangular factor signals near-singularity the shift is
// nudged and the factorization redone.
struct DenseStep {
  Matrix next;
  Matrix q;
  Complex shift;
  bool perturbed = false;
};

DenseStep dense_qr_step(const Matrix& m, Complex gamma) {
  const std::size_t n = m.rows();
  const double fro = frobenius_norm(m);
  DenseStep out;
  out.shift = gamma;
  for (int attempt = 0; attempt < 3; ++attempt) {
    const QrFactorization f = qr_tall(with_shifted_diagonal(m, -out.shift));
    double rmin = f.r(0, 0).real();
    for (std::size_t i = 1; i < n; ++i)
      rmin = std::min(rmin, f.r(i, i).real());
    if (rmin <= static_cast<double>(n) * unit_roundoff * fro && attempt < 2) {
      const double bump = 10.0 * static_cast<double>(n) * unit_roundoff;
      out.shift = out.shift == Complex(0.0) ? Complex(bump * fro)
                                            : out.shift * (1.0 + bump);
      out.perturbed = true;
      continue;
    }
    out.next = with_shifted_diagonal(mat_mul(f.r, f.q), out.shift);
    out.q = f.q;
    return out;
  }
  throw std::logic_error("unreachable");
}

std::vector<std::size_t> block_offsets(const Segment& seg) {
  std::vector<std::size_t> off(seg.block_sizes.size() + 1, seg.start);
  for (std::size_t k = 0; k < seg.block_sizes.size(); ++k)
    off[k + 1] = off[k] + seg.block_sizes[k];
  return off;
}

}  // namespace

QRStepResult qr_step(const Matrix& t, const CMVProfile& profile,
                     const ShiftStrategy& shift) {
  if (!t.square() || t.rows() != profile.n())
    throw std::invalid_argument("qr_step: size mismatch");
  const std::size_t n = t.rows();
  const double fro = frobenius_norm(t);
  const double pre_tol = 100.0 * static_cast<double>(n) * unit_roundoff * fro;
  if (profile.max_off_profile(t) > pre_tol)
    throw std::invalid_argument("qr_step: input is not CMV-like to tolerance");

  DenseStep step = dense_qr_step(t, select_shift(t, shift));

  QRStepResult out;
  out.shift_used = step.shift;
  out.shift_perturbed = step.perturbed;
  out.profile_violation = profile.max_off_profile(step.next);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (!profile.allowed(i, j)) step.next(i, j) = 0.0;
  out.t_next = std::move(step.next);
  out.q_step = std::move(step.q);
  return out;
}

std::vector<Segment> deflate(Matrix& t, const CMVProfile& profile,
                             double threshold) {
  std::vector<Segment> out;
  for (const Segment& seg : profile.segments()) {
    const auto off = block_offsets(seg);
    Segment current{seg.start, {}};
    for (std::size_t k = 0; k < seg.block_sizes.size(); ++k) {
      current.block_sizes.push_back(seg.block_sizes[k]);
      if (k + 1 == seg.block_sizes.size()) break;
      const Matrix sub =
          submatrix(t, off[k + 1], off[k + 2], off[k], off[k + 1]);
      if (spectral_norm_2x2(sub) > threshold) continue;
      // split: zero the coupling (and its partner when it is also small)
      for (std::size_t j = off[k]; j < off[k + 1]; ++j)
        for (std::size_t i = off[k + 1]; i < off[k + 2]; ++i) t(i, j) = 0.0;
      const Matrix sup =
          submatrix(t, off[k], off[k + 1], off[k + 1], off[k + 2]);
      if (spectral_norm_2x2(sup) <= threshold)
        for (std::size_t j = off[k + 1]; j < off[k + 2]; ++j)
          for (std::size_t i = off[k]; i < off[k + 1]; ++i) t(i, j) = 0.0;
      out.push_back(current);
      current = Segment{off[k + 1], {}};
    }
    out.push_back(current);
  }
  return out;
}

namespace {

void extract_small_eigenvalues(const Matrix& t, const Segment& seg,
                               std::vector<Complex>& into) {
  const auto off = block_offsets(seg);
  for (std::size_t k = 0; k < seg.block_sizes.size(); ++k) {
    if (seg.block_sizes[k] == 1) {
      into.push_back(t(off[k], off[k]));
    } else {
      const auto [l1, l2] = eig2x2(t(off[k], off[k]), t(off[k], off[k] + 1),
                                   t(off[k] + 1, off[k]), t(off[k] + 1, off[k] + 1));
      into.push_back(l1);
      into.push_back(l2);
    }
  }
}

// Drops the last row/column from a block partition: a trailing 1 disappears,
// a trailing 2 becomes 1. The compressed pattern survives this reblocking.
void shrink_blocks(std::vector<std::size_t>& blocks) {
  if (blocks.back() == 1)
    blocks.pop_back();
  else
    blocks.back() = 1;
}

double trailing_row_offdiag_norm(const Matrix& t, std::size_t lo, std::size_t hi) {
  double s = 0.0;
  for (std::size_t j = lo; j + 1 < hi; ++j) s += std::norm(t(hi - 1, j));
  return std::sqrt(s);
}

constexpr std::size_t stagnation_period = 12;

// Exceptional shift, used when a window has gone stagnation_period steps
// without deflating (the wilkinson shift can cycle, e.g. on permutation
// matrices whose trailing 2x2 is nilpotent). Offsetting the corner by the
// unconverged trailing-row mass always gives a spectrum-breaking value.
Complex exceptional_shift(const Matrix& t) {
  const std::size_t n = t.rows();
  return t(n - 1, n - 1) + 0.75 * trailing_row_offdiag_norm(t, 0, n);
}

}  // namespace

EigenResult eigensolve_unitary(const Matrix& t0, const CMVProfile& profile,
                               const ShiftStrategy& shift, std::size_t max_steps) {
  Matrix t = t0;
  const std::size_t n = t.rows();
  const double threshold =
      10.0 * static_cast<double>(n) * unit_roundoff * frobenius_norm(t0);

  EigenResult result;
  struct WorkItem {
    Segment seg;
    std::size_t stagnation = 0;
  };
  std::deque<WorkItem> work;
  for (const Segment& seg : profile.segments()) work.push_back({seg, 0});

  while (!work.empty()) {
    auto [seg, stagnation] = work.front();
    work.pop_front();
    const std::size_t size = seg.size();
    if (size <= 2) {
      extract_small_eigenvalues(t, seg, result.eigenvalues);
      continue;
    }
    if (result.report.steps_total >= max_steps) {
      result.report.converged = false;
      extract_small_eigenvalues(t, seg, result.eigenvalues);
      continue;
    }

    const std::size_t lo = seg.start, hi = seg.start + size;

    // A converged trailing row deflates a single eigenvalue off the corner.
    if (trailing_row_offdiag_norm(t, lo, hi) <= threshold) {
      result.eigenvalues.push_back(t(hi - 1, hi - 1));
      result.report.deflations.push_back({hi - 1, result.report.steps_total});
      shrink_blocks(seg.block_sizes);
      work.push_front({seg, 0});
      continue;
    }

    Segment local{0, seg.block_sizes};
    const CMVProfile sub_profile =
        profile.compressed_pattern()
            ? CMVProfile::compressed(size, {local})
            : CMVProfile::banded(size, {local});

    // Mid-segment couplings below threshold split the problem in two.
    {
      Matrix view = submatrix(t, lo, hi, lo, hi);
      std::vector<Segment> pieces = deflate(view, sub_profile, threshold);
      if (pieces.size() > 1) {
        assign_submatrix(t, lo, lo, view);
        for (Segment& piece : pieces) {
          piece.start += lo;
          if (piece.start != lo)
            result.report.deflations.push_back(
                {piece.start, result.report.steps_total});
          work.push_front({piece, 0});
        }
        continue;
      }
    }

    Matrix sub = submatrix(t, lo, hi, lo, hi);
    const ShiftStrategy applied =
        stagnation % stagnation_period == stagnation_period - 1
            ? ShiftStrategy::custom(exceptional_shift(sub))
            : shift;
    QRStepResult step = qr_step(sub, sub_profile, applied);
    ++result.report.steps_total;
    result.report.max_profile_violation =
        std::max(result.report.max_profile_violation, step.profile_violation);
    assign_submatrix(t, lo, lo, step.t_next);
    work.push_front({seg, stagnation + 1});
  }
  return result;
}

Matrix RankOnePerturbedForm::assembled() const {
  Matrix b = t;
  for (std::size_t j = 0; j < t.cols(); ++j) {
    const Complex w = std::conj(right(j, 0));
    if (w == Complex(0.0)) continue;
    for (std::size_t i = 0; i < t.rows(); ++i) b(i, j) += left(i, 0) * w;
  }
  return b;
}

std::vector<double> singular_values_dense(const Matrix& a) {
  // One-sided Jacobi on the columns (adjoint taken when wide, the singular
  // values agree). Column norms of the converged matrix are the values.
  Matrix w = a.rows() >= a.cols() ? a : adjoint(a);
  const std::size_t m = w.rows(), k = w.cols();
  if (k == 0) return {};
  for (int sweep = 0; sweep < 60; ++sweep) {
    double worst = 0.0;
    for (std::size_t p = 0; p + 1 < k; ++p)
      for (std::size_t q = p + 1; q < k; ++q) {
        double alpha = 0.0, beta = 0.0;
        Complex gamma = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          alpha += std::norm(w(i, p));
          beta += std::norm(w(i, q));
          gamma += std::conj(w(i, p)) * w(i, q);
        }
        const double ag = std::abs(gamma);
        if (alpha == 0.0 || beta == 0.0 || ag == 0.0) continue;
        const double rel = ag / std::sqrt(alpha * beta);
        worst = std::max(worst, rel);
        if (rel <= 1e-15) continue;
        const Complex phase = gamma / ag;
        const double tau = (beta - alpha) / (2.0 * ag);
        const double tt = (tau >= 0.0 ? 1.0 : -1.0) /
                          (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + tt * tt);
        const double s = c * tt;
        for (std::size_t i = 0; i < m; ++i) {
          const Complex wp = w(i, p), wq = w(i, q);
          w(i, p) = c * wp - s * std::conj(phase) * wq;
          w(i, q) = s * phase * wp + c * wq;
        }
      }
    if (worst <= 1e-15) break;
  }
  std::vector<double> sv(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm2 += std::norm(w(i, j));
    sv[j] = std::sqrt(norm2);
  }
  std::sort(sv.begin(), sv.end(), std::greater<double>());
  return sv;
}

std::pair<RankOnePerturbedForm, PerturbedStepReport> qr_step_perturbed(
    const RankOnePerturbedForm& b, const ShiftStrategy& shift) {
  const std::size_t n = b.t.rows();
  if (b.left.rows() != n || b.right.rows() != n)
    throw std::invalid_argument("qr_step_perturbed: vector size mismatch");

  const Matrix assembled = b.assembled();
  DenseStep step = dense_qr_step(assembled, select_shift(assembled, shift));

  RankOnePerturbedForm next;
  next.profile = b.profile;
  const Matrix qh = adjoint(step.q);
  next.t = mat_mul(qh, mat_mul(b.t, step.q));
  next.left = mat_mul(qh, b.left);
  next.right = mat_mul(qh, b.right);

  PerturbedStepReport report;
  report.shift_used = step.shift;
  report.shift_perturbed = step.perturbed;

  const Matrix b1 = next.assembled();
  const auto blocks = b.profile.block_sizes();
  std::vector<std::size_t> off(blocks.size() + 1, 0);
  for (std::size_t k = 0; k < blocks.size(); ++k) off[k + 1] = off[k] + blocks[k];
  std::vector<std::size_t> block_of(n);
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (std::size_t i = off[k]; i < off[k + 1]; ++i) block_of[i] = k;

  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      if (block_of[i] > block_of[j] + 1)
        report.hessenberg_violation =
            std::max(report.hessenberg_violation, std::abs(b1(i, j)));

  for (std::size_t k = 0; k + 1 < blocks.size(); ++k)
    report.subdiagonal_ranks.push_back(numerical_rank_2x2(
        submatrix(b1, off[k + 1], off[k + 2], off[k], off[k + 1]), 0.0));

  for (std::size_t k = 0; k + 2 < blocks.size(); ++k) {
    const std::size_t rows_end = off[k + 1];
    const std::size_t cols_begin = off[k + 2];
    if (cols_begin >= n) break;
    const std::vector<double> sv =
        singular_values_dense(submatrix(b1, 0, rows_end, cols_begin, n));
    const double s1 = sv.empty() ? 0.0 : sv[0];
    const double s3 = sv.size() > 2 ? sv[2] : 0.0;
    report.upper_slice_ratios.push_back(s1 > 0.0 ? s3 / s1 : 0.0);
  }

  return {std::move(next), std::move(report)};
}

}  // namespace cmvkit
