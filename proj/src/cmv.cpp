#include "cmvkit/cmv.hpp"

#include <algorithm>
#include <optional>
#include <utility>

namespace cmvkit {

namespace {

std::vector<std::size_t> block_offsets(const Segment& seg) {
  std::vector<std::size_t> off(seg.block_sizes.size() + 1, seg.start);
  for (std::size_t k = 0; k < seg.block_sizes.size(); ++k)
    off[k + 1] = off[k] + seg.block_sizes[k];
  return off;
}

}  // namespace

CMVProfile::CMVProfile(std::size_t n, std::vector<Segment> segments,
                       bool compressed)
    : n_(n), segments_(std::move(segments)), compressed_(compressed) {
  std::size_t covered = 0;
  for (const Segment& seg : segments_) {
    if (seg.start != covered)
      throw std::invalid_argument("CMVProfile: segments must tile the matrix");
    for (std::size_t b : seg.block_sizes)
      if (b != 1 && b != 2)
        throw std::invalid_argument("CMVProfile: block sizes must be 1 or 2");
    covered += seg.size();
  }
  if (covered != n_)
    throw std::invalid_argument("CMVProfile: segments do not cover the matrix");

  mask_.assign(n_ * n_, 0);
  auto allow = [&](std::size_t i, std::size_t j) { mask_[j * n_ + i] = 1; };
  for (const Segment& seg : segments_) {
    const auto off = block_offsets(seg);
    const std::size_t p = seg.block_sizes.size();
    for (std::size_t k = 0; k < p; ++k)
      for (std::size_t j = off[k]; j < off[k + 1]; ++j)
        for (std::size_t i = off[k]; i < off[k + 1]; ++i) allow(i, j);
    for (std::size_t k = 0; k + 1 < p; ++k) {
      // subdiagonal block: rows of block k+1, columns of block k
      for (std::size_t i = off[k + 1]; i < off[k + 2]; ++i) {
        if (compressed_) {
          allow(i, off[k + 1] - 1);  // second (last) column only
        } else {
          for (std::size_t j = off[k]; j < off[k + 1]; ++j) allow(i, j);
        }
      }
      // superdiagonal block: rows of block k, columns of block k+1
      for (std::size_t i = off[k]; i < off[k + 1]; ++i) {
        if (compressed_) {
          allow(i, off[k + 1]);  // first column only
        } else {
          for (std::size_t j = off[k + 1]; j < off[k + 2]; ++j) allow(i, j);
        }
      }
    }
  }
}

CMVProfile CMVProfile::banded(std::size_t n, std::vector<Segment> segments) {
  return CMVProfile(n, std::move(segments), false);
}

CMVProfile CMVProfile::compressed(std::size_t n, std::vector<Segment> segments) {
  return CMVProfile(n, std::move(segments), true);
}

CMVProfile CMVProfile::banded(std::size_t n,
                              const std::vector<std::size_t>& block_sizes) {
  return banded(n, std::vector<Segment>{Segment{0, block_sizes}});
}

CMVProfile CMVProfile::compressed(std::size_t n,
                                  const std::vector<std::size_t>& block_sizes) {
  return compressed(n, std::vector<Segment>{Segment{0, block_sizes}});
}

std::vector<std::size_t> CMVProfile::block_sizes() const {
  std::vector<std::size_t> out;
  for (const Segment& seg : segments_)
    out.insert(out.end(), seg.block_sizes.begin(), seg.block_sizes.end());
  return out;
}

std::vector<std::size_t> CMVProfile::segment_starts() const {
  std::vector<std::size_t> out;
  for (const Segment& seg : segments_) out.push_back(seg.start);
  return out;
}

double CMVProfile::max_off_profile(const Matrix& t) const {
  if (t.rows() != n_ || t.cols() != n_)
    throw std::invalid_argument("max_off_profile: size mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < n_; ++j)
    for (std::size_t i = 0; i < n_; ++i)
      if (!allowed(i, j)) m = std::max(m, std::abs(t(i, j)));
  return m;
}

ProfileViolationError::ProfileViolationError(std::size_t row_, std::size_t col_,
                                             double magnitude_)
    : std::runtime_error("structural entry (" + std::to_string(row_) + ", " +
                         std::to_string(col_) + ") has magnitude " +
                         std::to_string(magnitude_) +
                         " above the zeroing threshold"),
      row(row_),
      col(col_),
      magnitude(magnitude_) {}

Matrix restart_vector(std::size_t n, std::size_t start, std::uint64_t seed,
                      unsigned attempt) {
  Matrix z(n, 1);
  if (attempt >= 4) {
    const std::size_t idx = std::min(start + (attempt - 4), n - 1);
    z(idx, 0) = 1.0;
    return z;
  }
  Rng rng(mix_seed(seed, (static_cast<std::uint64_t>(start) << 3) + attempt));
  const Matrix tail = rng.unit_vector(n - start);
  for (std::size_t i = start; i < n; ++i) z(i, 0) = tail(i - start, 0);
  return z;
}

namespace {

// rows [r0, r0+k) of a <- qs^H * rows
void apply_small_left_adjoint(Matrix& a, std::size_t r0, const Matrix& qs) {
  const std::size_t k = qs.rows();
  std::vector<Complex> tmp(k);
  for (std::size_t col = 0; col < a.cols(); ++col) {
    for (std::size_t i = 0; i < k; ++i) {
      Complex acc = 0.0;
      for (std::size_t l = 0; l < k; ++l)
        acc += std::conj(qs(l, i)) * a(r0 + l, col);
      tmp[i] = acc;
    }
    for (std::size_t i = 0; i < k; ++i) a(r0 + i, col) = tmp[i];
  }
}

// cols [c0, c0+k) of a <- cols * qs
void apply_small_right(Matrix& a, std::size_t c0, const Matrix& qs) {
  const std::size_t k = qs.cols();
  std::vector<Complex> tmp(k);
  for (std::size_t row = 0; row < a.rows(); ++row) {
    for (std::size_t j = 0; j < k; ++j) {
      Complex acc = 0.0;
      for (std::size_t l = 0; l < k; ++l) acc += a(row, c0 + l) * qs(l, j);
      tmp[j] = acc;
    }
    for (std::size_t j = 0; j < k; ++j) a(row, c0 + j) = tmp[j];
  }
}

struct SegmentOutcome {
  Segment segment;
  std::optional<double> breakdown_norm;
};

void verify_and_zero(Matrix& a, std::size_t r0, std::size_t r1, std::size_t c0,
                     std::size_t c1, double bound) {
  for (std::size_t j = c0; j < c1; ++j)
    for (std::size_t i = r0; i < r1; ++i) {
      const double mag = std::abs(a(i, j));
      if (mag > bound) throw ProfileViolationError(i, j, mag);
      a(i, j) = 0.0;
    }
}

// Runs the elementary-transformation reduction on the trailing principal
// submatrix starting at s, mutating a and q, until the segment either closes
// by deflation or exhausts the trailing space.
SegmentOutcome reduce_segment(Matrix& a, Matrix& q, std::size_t s,
                              const Matrix& zloc, double threshold,
                              std::size_t& ops) {
  const std::size_t n = a.rows();
  const std::size_t m = n - s;

  Matrix d0(m, 2);
  {
    const Matrix asub = submatrix(a, s, n, s, n);
    const Matrix az = mat_mul(asub, zloc);
    for (std::size_t i = 0; i < m; ++i) {
      d0(i, 0) = zloc(i, 0);
      d0(i, 1) = az(i, 0);
    }
  }

  const QrFactorization init = qr_tall(d0, /*full_q=*/true);
  const Svd2x2 rsv = svd2x2(init.r);
  if (rsv.sigma1 <= threshold)
    throw std::invalid_argument("reduction: starting vector vanished");

  apply_small_left_adjoint(a, s, init.q);
  apply_small_right(a, s, init.q);
  apply_small_right(q, s, init.q);
  ++ops;

  if (rsv.sigma2 <= threshold) {
    // z is an eigenvector to working accuracy: the segment is 1x1.
    double norm2 = 0.0;
    for (std::size_t i = s + 1; i < n; ++i) norm2 += std::norm(a(i, s));
    const double coupling = std::sqrt(norm2);
    verify_and_zero(a, s + 1, n, s, s + 1, 2.0 * threshold);
    verify_and_zero(a, s, s + 1, s + 1, n, 2.0 * threshold);
    return {Segment{s, {1}}, coupling};
  }

  Segment seg{s, {2}};
  for (std::size_t kk = 1; 2 * kk < m; ++kk) {
    for (std::size_t j = m; j >= 2 * kk + 3; --j) {
      const std::size_t r0 = s + j - 3;      // local rows j-2 .. j (1-based)
      const std::size_t c0 = s + 2 * kk - 2;  // local cols 2kk-1, 2kk
      Matrix us(3, 2);
      for (std::size_t rr = 0; rr < 3; ++rr)
        for (std::size_t cc = 0; cc < 2; ++cc)
          us(rr, cc) = a(r0 + rr, c0 + cc) + std::conj(a(c0 + cc, r0 + rr));
      const Matrix qs = qr_tall(us, /*full_q=*/true).q;
      apply_small_left_adjoint(a, r0, qs);
      apply_small_right(a, r0, qs);
      apply_small_right(q, r0, qs);
      ++ops;
    }

    const std::size_t b = 2 * kk;
    const std::size_t rcnt = std::min<std::size_t>(2, m - b);
    const Matrix coupling =
        submatrix(a, s + b, s + b + rcnt, s + b - 2, s + b);
    const double cnorm = spectral_norm_2x2(coupling);
    if (cnorm <= threshold) {
      verify_and_zero(a, s + b, n, s, s + b, 2.0 * threshold);
      verify_and_zero(a, s, s + b, s + b, n, 2.0 * threshold);
      return {seg, cnorm};
    }

    // Odd closure: the hermitian-part coupling drops to rank one when the
    // invariant subspace generated by z has odd dimension b + 1. Only one
    // direction of the next block still couples; rotating it first lets the
    // segment close with a trailing 1x1 block. Harmless when at most two
    // columns remain (the leftover then forms the final block as is).
    if (m - b >= 3) {
      Matrix hc(2, 2);
      for (std::size_t rr = 0; rr < 2; ++rr)
        for (std::size_t cc = 0; cc < 2; ++cc)
          hc(rr, cc) = a(s + b + rr, s + b - 2 + cc) +
                       std::conj(a(s + b - 2 + cc, s + b + rr));
      const Svd2x2 hsv = svd2x2(hc);
      if (hsv.sigma2 <= threshold) {
        Matrix frame(2, 2);
        frame(0, 0) = hsv.u[0][0];
        frame(1, 0) = hsv.u[1][0];
        frame(0, 1) = hsv.u[0][1];
        frame(1, 1) = hsv.u[1][1];
        apply_small_left_adjoint(a, s + b, frame);
        apply_small_right(a, s + b, frame);
        apply_small_right(q, s + b, frame);
        ++ops;

        seg.block_sizes.push_back(1);
        const std::size_t bb = b + 1;
        const Matrix tail = submatrix(
            a, s + bb, std::min(n, s + bb + 2), s + bb - 2, s + bb);
        const double tail_norm = spectral_norm_2x2(tail);
        verify_and_zero(a, s + bb, n, s, s + bb, 2.0 * threshold);
        verify_and_zero(a, s, s + bb, s + bb, n, 2.0 * threshold);
        return {seg, tail_norm};
      }
    }
    seg.block_sizes.push_back(rcnt);
  }
  return {seg, std::nullopt};
}

// Rotation on columns (i, j) sending the combination p*col_i + q*col_j into
// column i (used to annihilate the other combination).
GivensRotation rotation_for_first_column(Complex p, Complex q, std::size_t i,
                                         std::size_t j) {
  const double norm = std::hypot(std::abs(p), std::abs(q));
  p /= norm;
  q /= norm;
  GivensRotation g;
  g.i = i;
  g.j = j;
  const double ap = std::abs(p);
  if (ap > 0.0) {
    const Complex phase = std::conj(p) / ap;
    g.c = (p * phase).real();
    g.s = std::conj(q * phase);
  } else {
    const double aq = std::abs(q);
    g.c = 0.0;
    g.s = std::conj(q * (std::conj(q) / aq));
  }
  return g;
}

// Rotation on columns (i, j) sending the combination p*col_i + q*col_j into
// column j.
GivensRotation rotation_for_second_column(Complex p, Complex q, std::size_t i,
                                          std::size_t j) {
  const double norm = std::hypot(std::abs(p), std::abs(q));
  p /= norm;
  q /= norm;
  GivensRotation g;
  g.i = i;
  g.j = j;
  const double aq = std::abs(q);
  if (aq > 0.0) {
    const Complex phase = std::conj(q) / aq;
    g.c = (q * phase).real();
    g.s = -(p * phase);
  } else {
    const double ap = std::abs(p);
    g.c = 0.0;
    g.s = Complex(ap, 0.0);  // -p * (-conj(p)/|p|)
  }
  return g;
}

void apply_similarity(Matrix& t, const GivensRotation& g) {
  apply_givens_rows(t, g);
  apply_givens_cols(t, g);
}

}  // namespace

CompressResult compress_to_profile(const Matrix& t0,
                                   const std::vector<Segment>& segments,
                                   double threshold) {
  Matrix t = t0;
  if (!t.square())
    throw std::invalid_argument("compress_to_profile: t must be square");
  std::vector<GivensRotation> rotations;

  for (const Segment& seg : segments) {
    const auto off = block_offsets(seg);
    const std::size_t p = seg.block_sizes.size();
    for (std::size_t k = 0; k + 1 < p; ++k) {
      if (k == 0 && seg.block_sizes[0] == 2) {
        // Subdiagonal block of the leading pair; later subdiagonal blocks
        // acquire the pattern on their own once the superdiagonal above them
        // is compressed, by unitarity.
        const Matrix b = submatrix(t, off[1], off[2], off[0], off[1]);
        if (spectral_norm_2x2(b) > threshold) {
          const Svd2x2 sv = svd2x2(b);
          GivensRotation g = rotation_for_first_column(sv.v[0][1], sv.v[1][1],
                                                       off[0], off[0] + 1);
          apply_similarity(t, g);
          rotations.push_back(g);
        }
      }
      if (seg.block_sizes[k + 1] == 2) {
        // Superdiagonal block between blocks k and k+1: keep only its first
        // column.
        const Matrix b = submatrix(t, off[k], off[k + 1], off[k + 1], off[k + 2]);
        if (spectral_norm_2x2(b) > threshold) {
          const Svd2x2 sv = svd2x2(b);
          GivensRotation g = rotation_for_second_column(
              sv.v[0][1], sv.v[1][1], off[k + 1], off[k + 1] + 1);
          apply_similarity(t, g);
          rotations.push_back(g);
        }
      }
    }
  }

  CMVProfile profile = CMVProfile::compressed(t.rows(), segments);
  for (std::size_t j = 0; j < t.cols(); ++j)
    for (std::size_t i = 0; i < t.rows(); ++i) {
      if (profile.allowed(i, j)) continue;
      const double mag = std::abs(t(i, j));
      if (mag > threshold) throw ProfileViolationError(i, j, mag);
      t(i, j) = 0.0;
    }

  // Zeroing removes a little Frobenius mass and with it some unitarity;
  // Newton-Schulz polish alternated with re-zeroing restores both. The
  // off-profile entries a polish step recreates shrink geometrically.
  const double n = static_cast<double>(t.rows());
  const double target = 5.0 * n * unit_roundoff;
  for (int cycle = 0; cycle < 6; ++cycle) {
    const double defect = unitarity_residual(t);
    if (defect <= target || defect > 0.1) break;
    const Matrix correction = mat_mul(t, mat_mul(adjoint(t), t));
    for (std::size_t i = 0; i < t.data().size(); ++i)
      t.data()[i] = 1.5 * t.data()[i] - 0.5 * correction.data()[i];
    for (std::size_t j = 0; j < t.cols(); ++j)
      for (std::size_t i = 0; i < t.rows(); ++i)
        if (!profile.allowed(i, j)) t(i, j) = 0.0;
  }

  return {std::move(t), std::move(rotations), std::move(profile)};
}

CompressResult compress_to_profile(const Matrix& t,
                                   const std::vector<std::size_t>& block_sizes,
                                   double threshold) {
  return compress_to_profile(t, std::vector<Segment>{Segment{0, block_sizes}},
                             threshold);
}

namespace {

CMVLikeForm reduce_impl(const Matrix& u, const Matrix* user_z,
                        const ReductionOptions& options) {
  if (!u.square()) throw std::invalid_argument("reduction: matrix must be square");
  if (!u.finite()) throw std::invalid_argument("reduction: matrix must be finite");
  const std::size_t n = u.rows();
  if (n == 0) throw std::invalid_argument("reduction: empty matrix");
  if (unitarity_residual(u) > 100.0 * static_cast<double>(n) * unit_roundoff)
    throw std::invalid_argument("reduction: input is not unitary to tolerance");

  const double fro = frobenius_norm(u);
  const double threshold =
      options.tol_scale * static_cast<double>(n) * unit_roundoff * fro;

  Matrix a = u;
  Matrix q = Matrix::identity(n);
  std::vector<Segment> segments;
  std::vector<double> breakdown_norms;
  std::size_t ops = 0;
  std::size_t s = 0;
  bool first = true;

  while (s < n) {
    const std::size_t m = n - s;
    if (m == 1) {
      segments.push_back(Segment{s, {1}});
      break;
    }

    SegmentOutcome outcome;
    if (first && user_z != nullptr) {
      if (user_z->cols() != 1 || user_z->rows() != n)
        throw std::invalid_argument("reduction: z must be an n x 1 column");
      const double zn = frobenius_norm(*user_z);
      if (zn == 0.0) throw std::invalid_argument("reduction: z must be nonzero");
      outcome = reduce_segment(a, q, s, (Complex(1.0 / zn) * (*user_z)), threshold, ops);
    } else {
      Matrix a_snap, q_snap;
      for (unsigned attempt = 0;; ++attempt) {
        if (attempt == 0) {
          a_snap = a;
          q_snap = q;
        } else {
          a = a_snap;
          q = q_snap;
        }
        const Matrix zfull = restart_vector(n, s, options.seed, attempt);
        const Matrix zloc = submatrix(zfull, s, n, 0, 1);
        outcome = reduce_segment(a, q, s, zloc, threshold, ops);
        if (outcome.segment.size() > 2 || m <= 2 || attempt >= 4) break;
      }
    }
    first = false;
    segments.push_back(outcome.segment);
    if (outcome.breakdown_norm) breakdown_norms.push_back(*outcome.breakdown_norm);
    s += outcome.segment.size();
  }

  // The in-place sweep drifts from unitarity over O(n^2) small similarities;
  // one clean triple product from the accumulated basis removes that drift
  // (the compression pass restores the exact cross-segment zeros).
  a = mat_mul(adjoint(q), mat_mul(u, q));
  CompressResult comp = compress_to_profile(a, segments, threshold);
  for (const GivensRotation& rot : comp.rotations) apply_givens_cols(q, rot);

  CMVLikeForm form;
  form.t = std::move(comp.t);
  form.profile = std::move(comp.profile);
  form.report.deflation_threshold = threshold;
  form.report.breakdown_norms = std::move(breakdown_norms);
  form.report.steps = ops;
  form.report.unitarity = unitarity_residual(q);
  form.report.residual =
      frobenius_norm(mat_mul(adjoint(q), mat_mul(u, q)) - form.t);
  form.q = std::move(q);
  return form;
}

}  // namespace

CMVLikeForm unitary_cmv_reduction(const Matrix& u, const Matrix& z,
                                  const ReductionOptions& options) {
  return reduce_impl(u, &z, options);
}

CMVLikeForm unitary_cmv_reduction(const Matrix& u,
                                  const ReductionOptions& options) {
  return reduce_impl(u, nullptr, options);
}

VerifyResult verify_cmv_like(const Matrix& t, const CMVProfile& profile,
                             double threshold) {
  VerifyResult out;
  if (!t.square() || t.rows() != profile.n())
    throw std::invalid_argument("verify_cmv_like: size mismatch");
  const std::size_t n = t.rows();

  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      if (profile.allowed(i, j)) continue;
      const double mag = std::abs(t(i, j));
      if (mag > threshold)
        out.violations.push_back({Violation::Kind::off_profile, i, j, mag});
    }

  for (const Segment& seg : profile.segments()) {
    const auto off = block_offsets(seg);
    for (std::size_t k = 0; k + 1 < seg.block_sizes.size(); ++k) {
      const Svd2x2 sub =
          svd2x2(submatrix(t, off[k + 1], off[k + 2], off[k], off[k + 1]));
      if (sub.sigma2 > threshold)
        out.violations.push_back(
            {Violation::Kind::block_rank, off[k + 1], off[k], sub.sigma2});
      const Svd2x2 sup =
          svd2x2(submatrix(t, off[k], off[k + 1], off[k + 1], off[k + 2]));
      if (sup.sigma2 > threshold)
        out.violations.push_back(
            {Violation::Kind::block_rank, off[k], off[k + 1], sup.sigma2});
    }
  }

  const double ur = unitarity_residual(t);
  if (ur > 10.0 * static_cast<double>(n) * unit_roundoff)
    out.violations.push_back({Violation::Kind::non_unitary, 0, 0, ur});

  out.ok = out.violations.empty();
  return out;
}

RankPatternResult verify_rank_pattern(const Matrix& t, double threshold) {
  RankPatternResult out;
  if (!t.square()) throw std::invalid_argument("verify_rank_pattern: square input required");
  const std::size_t n = t.rows();
  out.ok = true;
  if (n < 6 || n % 2 != 0) return out;

  for (std::size_t k = 1; k + 2 <= n / 2; ++k) {
    RankPatternEntry e;
    e.k = k;
    // 1-based T(2k+1 : 2k+2, 2k : 2k+1)
    const Matrix hyp = submatrix(t, 2 * k, 2 * k + 2, 2 * k - 1, 2 * k);
    if (frobenius_norm(hyp) <= threshold) {
      e.skipped = true;
      out.entries.push_back(e);
      continue;
    }
    const Svd2x2 sv =
        svd2x2(submatrix(t, 2 * k, 2 * k + 2, 2 * k - 1, 2 * k + 1));
    e.sigma1 = sv.sigma1;
    e.sigma2 = sv.sigma2;
    e.ok = sv.sigma1 > threshold && sv.sigma2 <= threshold;
    if (!e.ok) out.ok = false;
    out.entries.push_back(e);
  }
  return out;
}

}  // namespace cmvkit
