#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "cmvkit/cmv.hpp"
#include "cmvkit/matrix.hpp"
#include "cmvkit/qr_iter.hpp"
#include "cmvkit/rootfind.hpp"

namespace cmvkit {

// CMTX v1: header "cmtx <rows> <cols>", then rows*cols lines "<re> <im>" in
// column-major order, written with full round-trip precision. Readers reject
// NaN and infinity.
void write_cmtx(std::ostream& out, const Matrix& m);
void write_cmtx_file(const std::string& path, const Matrix& m);
Matrix read_cmtx(std::istream& in);
Matrix read_cmtx_file(const std::string& path);

// Polynomial text: "poly <degree>" then degree lines "<re> <im>" giving
// a0 .. a_{n-1} of a monic polynomial.
void write_polynomial(std::ostream& out, const MonicPolynomial& p);
MonicPolynomial read_polynomial(std::istream& in);
MonicPolynomial read_polynomial_file(const std::string& path);

// Inline coefficient list "c_n,...,c_0", highest degree first, leading 1
// required; real coefficients.
MonicPolynomial parse_inline_coefficients(const std::string& text);

struct SpyImage {
  std::size_t n = 0;
  double threshold = 0.0;
  std::vector<char> grid;  // row-major, 1 where |entry| > threshold

  bool nonzero(std::size_t i, std::size_t j) const { return grid[i * n + j] != 0; }
};

SpyImage make_spy(const Matrix& t, double threshold);
// One matrix row per line, 'x' for nonzero and '.' for zero.
std::string spy_text(const SpyImage& spy);
// Binary P5, one pixel per entry, 0 for nonzero and 255 for zero.
std::string spy_pgm(const SpyImage& spy);

std::string reduction_report_json(const CMVLikeForm& form);
std::string eigen_report_json(const EigenResult& result);

// Recovers the direct-sum segment structure of a matrix on file: boundaries
// where both off-diagonal cross blocks stay below the threshold, blocks of
// two (trailing one if odd) inside each segment.
std::vector<Segment> infer_segments(const Matrix& t, double threshold);

}  // namespace cmvkit
