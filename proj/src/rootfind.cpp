#include "cmvkit/rootfind.hpp"

#include <deque>
#include <stdexcept>

namespace cmvkit {

Complex MonicPolynomial::evaluate(Complex z) const {
  Complex acc = 1.0;  // leading coefficient
  for (std::size_t k = coefficients.size(); k-- > 0;)
    acc = acc * z + coefficients[k];
  return acc;
}

Matrix CompanionSplit::assembled() const {
  Matrix a = u;
  for (std::size_t j = 0; j < a.cols(); ++j) {
    const Complex wj = std::conj(w(j, 0));
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, j) += z(i, 0) * wj;
  }
  return a;
}

CompanionSplit companion_split(const MonicPolynomial& p) {
  const std::size_t n = p.degree();
  if (n < 2)
    throw std::invalid_argument(
        "companion_split: degree >= 2 required (degree 1 roots are -a0)");
  for (const Complex& c : p.coefficients)
    if (!is_finite(c))
      throw std::invalid_argument("companion_split: coefficients must be finite");

  CompanionSplit split;
  split.u = Matrix(n, n);
  for (std::size_t i = 0; i + 1 < n; ++i) split.u(i + 1, i) = 1.0;
  split.u(0, n - 1) = 1.0;
  split.z = Matrix::unit_column(n, 0);
  split.w = Matrix(n, 1);
  // first row of the companion is (-a_{n-1}, ..., -a_0); the unitary part
  // already places a one in the corner
  for (std::size_t j = 0; j < n; ++j) {
    Complex correction = -p.coefficients[n - 1 - j];
    if (j == n - 1) correction -= 1.0;
    split.w(j, 0) = std::conj(correction);
  }
  return split;
}

Matrix PerturbedCMVForm::assembled() const {
  Matrix b = t;
  for (std::size_t j = 0; j < t.cols(); ++j) b(0, j) += std::conj(v(j, 0));
  return b;
}

RankOnePerturbedForm PerturbedCMVForm::step_state() const {
  RankOnePerturbedForm state;
  state.t = t;
  state.left = Matrix::unit_column(t.rows(), 0);
  state.right = v;
  state.profile = profile;
  return state;
}

PerturbedCMVForm reduce_companion(const MonicPolynomial& p,
                                  const ReductionOptions& options) {
  const CompanionSplit split = companion_split(p);
  CMVLikeForm form = unitary_cmv_reduction(split.u, split.z, options);

  // The first column of q spans z = e1, so q^H z = beta e1 with |beta| = 1.
  const Matrix qhz = mat_mul(adjoint(form.q), split.z);
  const Complex beta = qhz(0, 0);
  PerturbedCMVForm out;
  out.t = std::move(form.t);
  out.v = std::conj(beta) * mat_mul(adjoint(form.q), split.w);
  out.profile = std::move(form.profile);
  out.q = std::move(form.q);
  return out;
}

namespace {

void extract_block_roots(const Matrix& b, std::size_t start,
                         const std::vector<std::size_t>& blocks,
                         std::vector<Complex>& into) {
  std::size_t off = start;
  for (std::size_t sz : blocks) {
    if (sz == 1) {
      into.push_back(b(off, off));
    } else {
      const auto [l1, l2] = eig2x2(b(off, off), b(off, off + 1),
                                   b(off + 1, off), b(off + 1, off + 1));
      into.push_back(l1);
      into.push_back(l2);
    }
    off += sz;
  }
}

}  // namespace

RootsResult roots(const MonicPolynomial& p, const ShiftStrategy& shift,
                  std::size_t max_steps, double tol_scale) {
  const std::size_t n = p.degree();
  if (n == 0) throw std::invalid_argument("roots: degree >= 1 required");
  RootsResult result;
  if (n == 1) {
    result.roots.push_back(-p.coefficients[0]);
    return result;
  }
  if (max_steps == 0) max_steps = 40 * n + 200;

  const PerturbedCMVForm reduced = reduce_companion(p);
  const double threshold = tol_scale * static_cast<double>(n) * unit_roundoff *
                           frobenius_norm(reduced.assembled());

  // Independent subproblems: one rank-one perturbed form per profile segment
  // (the correction row lives in the first segment; for the others the
  // left vector restricts to zero and the form is plainly unitary).
  struct Job {
    RankOnePerturbedForm form;
    std::size_t start;
    std::size_t stagnation = 0;
  };
  std::deque<Job> work;
  const RankOnePerturbedForm whole = reduced.step_state();
  for (const Segment& seg : reduced.profile.segments()) {
    const std::size_t lo = seg.start, hi = seg.start + seg.size();
    Job job;
    job.start = lo;
    job.form.t = submatrix(whole.t, lo, hi, lo, hi);
    job.form.left = submatrix(whole.left, lo, hi, 0, 1);
    job.form.right = submatrix(whole.right, lo, hi, 0, 1);
    job.form.profile = whole.profile.compressed_pattern()
                           ? CMVProfile::compressed(hi - lo, {Segment{0, seg.block_sizes}})
                           : CMVProfile::banded(hi - lo, {Segment{0, seg.block_sizes}});
    work.push_back(std::move(job));
  }

  while (!work.empty()) {
    Job job = std::move(work.front());
    work.pop_front();
    std::vector<std::size_t> blocks = job.form.profile.block_sizes();
    const std::size_t size = job.form.t.rows();
    if (size <= 2) {
      extract_block_roots(job.form.assembled(), 0, blocks, result.roots);
      continue;
    }
    if (result.report.steps_total >= max_steps) {
      result.report.converged = false;
      extract_block_roots(job.form.assembled(), 0, blocks, result.roots);
      continue;
    }

    const Matrix b = job.form.assembled();

    // Converged trailing row: one root pops off the corner and the window
    // shrinks by one (a trailing 2-block reblocks as 1).
    {
      double row2 = 0.0;
      for (std::size_t j = 0; j + 1 < size; ++j) row2 += std::norm(b(size - 1, j));
      if (std::sqrt(row2) <= threshold) {
        result.roots.push_back(b(size - 1, size - 1));
        result.report.deflations.push_back(
            {job.start + size - 1, result.report.steps_total});
        if (blocks.back() == 1)
          blocks.pop_back();
        else
          blocks.back() = 1;
        job.form.t = submatrix(job.form.t, 0, size - 1, 0, size - 1);
        job.form.left = submatrix(job.form.left, 0, size - 1, 0, 1);
        job.form.right = submatrix(job.form.right, 0, size - 1, 0, 1);
        job.form.profile =
            CMVProfile::compressed(size - 1, {Segment{0, std::move(blocks)}});
        job.stagnation = 0;
        work.push_front(std::move(job));
        continue;
      }
    }

    // Mid-window coupling below threshold: split into independent pieces.
    std::vector<std::size_t> off(blocks.size() + 1, 0);
    for (std::size_t k = 0; k < blocks.size(); ++k)
      off[k + 1] = off[k] + blocks[k];
    std::size_t split_at = 0;
    for (std::size_t k = 0; k + 1 < blocks.size(); ++k) {
      const Matrix sub = submatrix(b, off[k + 1], off[k + 2], off[k], off[k + 1]);
      if (spectral_norm_2x2(sub) <= threshold) {
        split_at = k + 1;  // keep the bottom-most boundary: trailing blocks converge first
      }
    }
    if (split_at != 0) {
      result.report.deflations.push_back(
          {job.start + off[split_at], result.report.steps_total});
      const std::size_t cut = off[split_at];
      auto make_piece = [&](std::size_t lo, std::size_t hi,
                            std::vector<std::size_t> piece_blocks) {
        Job piece;
        piece.start = job.start + lo;
        piece.form.t = submatrix(job.form.t, lo, hi, lo, hi);
        piece.form.left = submatrix(job.form.left, lo, hi, 0, 1);
        piece.form.right = submatrix(job.form.right, lo, hi, 0, 1);
        piece.form.profile = CMVProfile::compressed(
            hi - lo, {Segment{0, std::move(piece_blocks)}});
        return piece;
      };
      work.push_front(
          make_piece(0, cut, {blocks.begin(), blocks.begin() + split_at}));
      work.push_front(
          make_piece(cut, size, {blocks.begin() + split_at, blocks.end()}));
      continue;
    }

    // The wilkinson shift can cycle (nilpotent trailing blocks, as in the
    // companion of z^n - 1); fall back to an exceptional shift periodically.
    ShiftStrategy applied = shift;
    if (job.stagnation % 12 == 11) {
      double row2 = 0.0;
      for (std::size_t j = 0; j + 1 < size; ++j) row2 += std::norm(b(size - 1, j));
      applied = ShiftStrategy::custom(b(size - 1, size - 1) +
                                      0.75 * std::sqrt(row2));
    }
    auto [next, report] = qr_step_perturbed(job.form, applied);
    ++result.report.steps_total;
    result.report.max_profile_violation = std::max(
        result.report.max_profile_violation, report.hessenberg_violation);
    job.form = std::move(next);
    ++job.stagnation;
    work.push_front(std::move(job));
  }

  return result;
}

}  // namespace cmvkit
