#include "cmvkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cmvkit {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_finite_double(const std::string& token, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
  }
  if (pos != token.size())
    throw std::invalid_argument(std::string(what) + ": bad number '" + token + "'");
  if (!std::isfinite(v))
    throw std::invalid_argument(std::string(what) + ": non-finite value rejected");
  return v;
}

}  // namespace

void write_cmtx(std::ostream& out, const Matrix& m) {
  out << "cmtx " << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i)
      out << format_double(m(i, j).real()) << ' '
          << format_double(m(i, j).imag()) << '\n';
}

void write_cmtx_file(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_cmtx(out, m);
  if (!out) throw std::runtime_error("write failed: " + path);
}

Matrix read_cmtx(std::istream& in) {
  std::string tag;
  std::size_t rows = 0, cols = 0;
  if (!(in >> tag >> rows >> cols) || tag != "cmtx")
    throw std::invalid_argument("cmtx: bad header");
  Matrix m(rows, cols);
  std::string re, im;
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) {
      if (!(in >> re >> im)) throw std::invalid_argument("cmtx: truncated data");
      m(i, j) = Complex(parse_finite_double(re, "cmtx"),
                        parse_finite_double(im, "cmtx"));
    }
  return m;
}

Matrix read_cmtx_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_cmtx(in);
}

void write_polynomial(std::ostream& out, const MonicPolynomial& p) {
  out << "poly " << p.degree() << '\n';
  for (const Complex& c : p.coefficients)
    out << format_double(c.real()) << ' ' << format_double(c.imag()) << '\n';
}

MonicPolynomial read_polynomial(std::istream& in) {
  std::string tag;
  std::size_t degree = 0;
  if (!(in >> tag >> degree) || tag != "poly")
    throw std::invalid_argument("poly: bad header");
  if (degree == 0) throw std::invalid_argument("poly: degree must be >= 1");
  MonicPolynomial p;
  std::string re, im;
  for (std::size_t k = 0; k < degree; ++k) {
    if (!(in >> re >> im)) throw std::invalid_argument("poly: truncated data");
    p.coefficients.emplace_back(parse_finite_double(re, "poly"),
                                parse_finite_double(im, "poly"));
  }
  return p;
}

MonicPolynomial read_polynomial_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return read_polynomial(in);
}

MonicPolynomial parse_inline_coefficients(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ','))
    values.push_back(parse_finite_double(token, "coefficients"));
  if (values.size() < 2)
    throw std::invalid_argument("coefficients: need at least degree 1");
  if (values.front() != 1.0)
    throw std::invalid_argument("coefficients: leading coefficient must be 1");
  MonicPolynomial p;
  for (std::size_t k = values.size(); k-- > 1;)
    p.coefficients.emplace_back(values[k], 0.0);
  return p;
}

SpyImage make_spy(const Matrix& t, double threshold) {
  if (!t.square()) throw std::invalid_argument("spy: square matrix required");
  SpyImage spy;
  spy.n = t.rows();
  spy.threshold = threshold;
  spy.grid.assign(spy.n * spy.n, 0);
  for (std::size_t i = 0; i < spy.n; ++i)
    for (std::size_t j = 0; j < spy.n; ++j)
      if (std::abs(t(i, j)) > threshold) spy.grid[i * spy.n + j] = 1;
  return spy;
}

std::string spy_text(const SpyImage& spy) {
  std::string out;
  out.reserve(spy.n * (spy.n + 1));
  for (std::size_t i = 0; i < spy.n; ++i) {
    for (std::size_t j = 0; j < spy.n; ++j)
      out.push_back(spy.nonzero(i, j) ? 'x' : '.');
    out.push_back('\n');
  }
  return out;
}

std::string spy_pgm(const SpyImage& spy) {
  std::string out = "P5\n" + std::to_string(spy.n) + " " +
                    std::to_string(spy.n) + "\n255\n";
  for (std::size_t i = 0; i < spy.n; ++i)
    for (std::size_t j = 0; j < spy.n; ++j)
      out.push_back(spy.nonzero(i, j) ? '\0' : '\xff');
  return out;
}

std::string reduction_report_json(const CMVLikeForm& form) {
  nlohmann::json j;
  j["n"] = form.profile.n();
  nlohmann::json segments = nlohmann::json::array();
  for (const Segment& seg : form.profile.segments()) {
    nlohmann::json s;
    s["start"] = seg.start;
    s["size"] = seg.size();
    s["block_sizes"] = seg.block_sizes;
    segments.push_back(std::move(s));
  }
  j["segments"] = std::move(segments);
  j["breakdown_norms"] = form.report.breakdown_norms;
  j["threshold"] = form.report.deflation_threshold;
  j["residual"] = form.report.residual;
  j["unitarity"] = form.report.unitarity;
  return j.dump(2);
}

std::string eigen_report_json(const EigenResult& result) {
  nlohmann::json j;
  j["steps_total"] = result.report.steps_total;
  nlohmann::json deflations = nlohmann::json::array();
  for (const DeflationEvent& d : result.report.deflations)
    deflations.push_back({{"index", d.index}, {"step", d.step}});
  j["deflations"] = std::move(deflations);
  j["max_profile_violation"] = result.report.max_profile_violation;
  j["converged"] = result.report.converged;
  nlohmann::json eigenvalues = nlohmann::json::array();
  for (const Complex& z : result.eigenvalues)
    eigenvalues.push_back({{"re", z.real()}, {"im", z.imag()}});
  j["eigenvalues"] = std::move(eigenvalues);
  return j.dump(2);
}

std::vector<Segment> infer_segments(const Matrix& t, double threshold) {
  if (!t.square()) throw std::invalid_argument("infer_segments: square input required");
  const std::size_t n = t.rows();
  std::vector<Segment> out;
  std::size_t start = 0;
  for (std::size_t b = 1; b <= n; ++b) {
    bool split = b == n;
    if (!split) {
      split = true;
      for (std::size_t i = b; i < n && split; ++i)
        for (std::size_t j = start; j < b; ++j)
          if (std::abs(t(i, j)) > threshold || std::abs(t(j, i)) > threshold) {
            split = false;
            break;
          }
    }
    if (!split) continue;
    Segment seg{start, {}};
    std::size_t remaining = b - start;
    while (remaining >= 2) {
      seg.block_sizes.push_back(2);
      remaining -= 2;
    }
    if (remaining == 1) seg.block_sizes.push_back(1);
    out.push_back(std::move(seg));
    start = b;
  }
  return out;
}

}  // namespace cmvkit
