#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmvkit/kernels.hpp"
#include "cmvkit/lanczos.hpp"
#include "cmvkit/matrix.hpp"
#include "cmvkit/rng.hpp"

namespace cmvkit {

// Contiguous run of blocks decoupled from the rest of the matrix.
struct Segment {
  std::size_t start = 0;
  std::vector<std::size_t> block_sizes;  // entries in {1, 2}, 1 only trailing

  std::size_t size() const {
    std::size_t s = 0;
    for (std::size_t b : block_sizes) s += b;
    return s;
  }
};

// Structural descriptor of the compressed form: which entries may be nonzero.
//
// Within a segment, the banded flavor allows full block tridiagonal coupling.
// The compressed flavor keeps, of each 2x2 subdiagonal block, only its second
// column, and of each superdiagonal block only its first column; this is the
// sparsest shape reachable by unitary similarity when all off-diagonal blocks
// have rank one. Entries across segments are never allowed.
class CMVProfile {
 public:
  CMVProfile() = default;

  static CMVProfile banded(std::size_t n, std::vector<Segment> segments);
  static CMVProfile compressed(std::size_t n, std::vector<Segment> segments);
  static CMVProfile banded(std::size_t n, const std::vector<std::size_t>& block_sizes);
  static CMVProfile compressed(std::size_t n, const std::vector<std::size_t>& block_sizes);

  std::size_t n() const { return n_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool compressed_pattern() const { return compressed_; }

  bool allowed(std::size_t i, std::size_t j) const { return mask_[j * n_ + i] != 0; }
  std::vector<std::size_t> block_sizes() const;
  std::vector<std::size_t> segment_starts() const;
  double max_off_profile(const Matrix& t) const;

 private:
  CMVProfile(std::size_t n, std::vector<Segment> segments, bool compressed);

  std::size_t n_ = 0;
  std::vector<Segment> segments_;
  bool compressed_ = false;
  std::vector<char> mask_;
};

struct CMVLikeForm {
  Matrix q;
  Matrix t;
  CMVProfile profile;
  ReductionReport report;
};

struct ReductionOptions {
  std::uint64_t seed = default_seed;
  double tol_scale = 10.0;  // deflation threshold = tol_scale * n * u * ||U||_F
};

// Thrown when an entry that the rank structure says must vanish exceeds the
// threshold; carries the offending index.
class ProfileViolationError : public std::runtime_error {
 public:
  ProfileViolationError(std::size_t row, std::size_t col, double magnitude);
  std::size_t row, col;
  double magnitude;
};

// Householder-style reduction of a unitary matrix to compressed CMV-like
// form, restarting on breakdown so the result is a direct sum of CMV-like
// segments. The supplied z seeds the first segment; restart vectors are drawn
// from the options seed.
CMVLikeForm unitary_cmv_reduction(const Matrix& u, const Matrix& z,
                                  const ReductionOptions& options = {});
CMVLikeForm unitary_cmv_reduction(const Matrix& u,
                                  const ReductionOptions& options = {});

// Restart policy: unit vector supported on coordinates start..n-1. Attempts
// 0..3 are seeded pseudorandom draws, attempt 4 and later fall back to
// coordinate vectors e_start, e_{start+1}, ...
Matrix restart_vector(std::size_t n, std::size_t start, std::uint64_t seed,
                      unsigned attempt);

struct CompressResult {
  Matrix t;
  std::vector<GivensRotation> rotations;  // applied as similarities, in order
  CMVProfile profile;
};

// Givens post-pass compressing the rank-one off-diagonal blocks of a block
// tridiagonal unitary matrix to the profile pattern. Off-pattern entries are
// checked against `threshold` and then set to exact zero; a violation throws
// ProfileViolationError.
CompressResult compress_to_profile(const Matrix& t,
                                   const std::vector<Segment>& segments,
                                   double threshold);
CompressResult compress_to_profile(const Matrix& t,
                                   const std::vector<std::size_t>& block_sizes,
                                   double threshold);

struct Violation {
  enum class Kind { off_profile, block_rank, non_unitary };
  Kind kind = Kind::off_profile;
  std::size_t i = 0, j = 0;  // entry or block-coupling index
  double magnitude = 0.0;
};

struct VerifyResult {
  bool ok = false;
  std::vector<Violation> violations;
};

// Checks off-profile magnitudes, the rank-one property of every off-diagonal
// block, and unitarity of t.
VerifyResult verify_cmv_like(const Matrix& t, const CMVProfile& profile,
                             double threshold);

struct RankPatternEntry {
  std::size_t k = 0;  // 1-based index of the straddling block
  bool skipped = false;
  bool ok = false;
  double sigma1 = 0.0, sigma2 = 0.0;
};

struct RankPatternResult {
  bool ok = false;
  std::vector<RankPatternEntry> entries;
};

// Checks rank(T(2k+1:2k+2, 2k:2k+1)) = 1 for 1 <= k <= n/2 - 2 (1-based
// ranges), skipping indices where the coupling hypothesis T(2k+1:2k+2, 2k)
// is below threshold. Expects an even-sized single-segment CMV-like matrix.
RankPatternResult verify_rank_pattern(const Matrix& t, double threshold);

}  // namespace cmvkit
