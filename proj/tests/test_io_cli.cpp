#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cmvkit/generators.hpp"
#include "cmvkit/io.hpp"
#include "cmvkit/rng.hpp"

using namespace cmvkit;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  const std::string out_path = "cli_out.tmp";
  const std::string cmd =
      std::string(CMVKIT_CLI_PATH) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WEXITSTATUS(status);
  r.out = slurp(out_path);
  return r;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = rng.next_complex_gaussian();
  return m;
}

}  // namespace

TEST_CASE("cmtx round trip is bit exact") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    const Matrix m = random_matrix(3 + seed, 2 + seed % 3, seed);
    std::stringstream ss;
    write_cmtx(ss, m);
    const Matrix back = read_cmtx(ss);
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    for (std::size_t i = 0; i < m.data().size(); ++i)
      CHECK(back.data()[i] == m.data()[i]);
  }
}

TEST_CASE("cmtx reader rejects malformed input") {
  {
    std::stringstream ss("cmtx 1 1\nnan 0\n");
    CHECK_THROWS_AS(read_cmtx(ss), std::invalid_argument);
  }
  {
    std::stringstream ss("cmtx 1 1\ninf 0\n");
    CHECK_THROWS_AS(read_cmtx(ss), std::invalid_argument);
  }
  {
    std::stringstream ss("matrix 2 2\n");
    CHECK_THROWS_AS(read_cmtx(ss), std::invalid_argument);
  }
  {
    std::stringstream ss("cmtx 2 2\n1 0\n");
    CHECK_THROWS_AS(read_cmtx(ss), std::invalid_argument);
  }
}

TEST_CASE("polynomial text format and inline coefficients") {
  MonicPolynomial p;
  p.coefficients = {Complex(-1.0, 0.5), Complex(2.0, 0.0), Complex(0.0, -3.0)};
  std::stringstream ss;
  write_polynomial(ss, p);
  const MonicPolynomial back = read_polynomial(ss);
  REQUIRE(back.degree() == 3);
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(back.coefficients[k] == p.coefficients[k]);

  const MonicPolynomial inline_poly = parse_inline_coefficients("1,0,-1");
  REQUIRE(inline_poly.degree() == 2);
  CHECK(inline_poly.coefficients[0] == Complex(-1.0));
  CHECK(inline_poly.coefficients[1] == Complex(0.0));
  CHECK_THROWS_AS(parse_inline_coefficients("2,0,-1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_inline_coefficients("1"), std::invalid_argument);
}

TEST_CASE("spy output") {
  Matrix t = Matrix::identity(4);
  const SpyImage spy = make_spy(t, 1e-12);
  CHECK(spy_text(spy) == "x...\n.x..\n..x.\n...x\n");
  const std::string pgm = spy_pgm(spy);
  CHECK(pgm.substr(0, 9) == "P5\n4 4\n25");
  const std::string pixels = pgm.substr(pgm.find("255\n") + 4);
  REQUIRE(pixels.size() == 16);
  CHECK(pixels[0] == '\0');
  CHECK(static_cast<unsigned char>(pixels[1]) == 255);
}

TEST_CASE("segment inference") {
  Matrix t(5, 5);
  // 2x2 block, then 3x3 block
  t(0, 1) = 1.0;
  t(1, 0) = 1.0;
  for (std::size_t i = 2; i < 5; ++i) t(i, i == 4 ? 2 : i + 1) = 1.0;
  const auto segments = infer_segments(t, 1e-13);
  REQUIRE(segments.size() == 2);
  CHECK(segments[0].start == 0);
  CHECK(segments[0].size() == 2);
  CHECK(segments[1].start == 2);
  CHECK(segments[1].block_sizes == std::vector<std::size_t>{2, 1});
}

TEST_CASE("gen command emits expected matrices") {
  const CliResult fourier2 = run_cli("gen --gen fourier:2 -o gen2.cmtx");
  REQUIRE(fourier2.exit_code == 0);
  const Matrix f2 = read_cmtx_file("gen2.cmtx");
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(f2(0, 0) - Complex(s)) <= 1e-15);
  CHECK(std::abs(f2(1, 1) - Complex(-s)) <= 1e-15);

  REQUIRE(run_cli("gen --gen circulant:4 -o gen4.cmtx").exit_code == 0);
  const Matrix c4 = read_cmtx_file("gen4.cmtx");
  const Matrix e2 = mat_mul(c4, Matrix::unit_column(4, 0));
  CHECK(e2(1, 0) == Complex(1.0));  // cyclic shift of e1

  const CliResult haar = run_cli("gen --gen haar:16:7 -o haar16.cmtx");
  REQUIRE(haar.exit_code == 0);
  const Matrix h = read_cmtx_file("haar16.cmtx");
  CHECK(unitarity_residual(h) <= 160.0 * unit_roundoff);
  REQUIRE(run_cli("gen --gen haar:16:7 -o haar16b.cmtx").exit_code == 0);
  CHECK(slurp("haar16.cmtx") == slurp("haar16b.cmtx"));
}

TEST_CASE("generator specs for composites") {
  REQUIRE(run_cli("gen --gen direct_sum:haar:4:1+haar:4:2 -o ds.cmtx").exit_code == 0);
  const Matrix m = read_cmtx_file("ds.cmtx");
  REQUIRE(m.rows() == 8);
  CHECK(unitarity_residual(m) <= 80.0 * unit_roundoff);
  for (std::size_t i = 4; i < 8; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(m(i, j) == Complex(0.0));
      CHECK(m(j, i) == Complex(0.0));
    }
  // the two blocks come from distinct seeds
  CHECK(std::abs(m(0, 0) - m(4, 4)) > 1e-3);

  REQUIRE(run_cli("gen --gen companion:1,0,-1 -o comp.cmtx").exit_code == 0);
  const Matrix c = read_cmtx_file("comp.cmtx");
  REQUIRE(c.rows() == 2);
  CHECK(c(0, 1) == Complex(1.0));
  CHECK(c(1, 0) == Complex(1.0));
}

TEST_CASE("CMV_SEED environment variable picks the default seed") {
  const std::string base = std::string(CMVKIT_CLI_PATH) +
                           " gen --gen haar:6 -o env_seed.cmtx > /dev/null 2>&1";
  REQUIRE(WEXITSTATUS(std::system(("CMV_SEED=5 " + base).c_str())) == 0);
  const std::string with_env = slurp("env_seed.cmtx");
  REQUIRE(run_cli("gen --gen haar:6 --seed 5 -o flag_seed.cmtx").exit_code == 0);
  CHECK(with_env == slurp("flag_seed.cmtx"));
  REQUIRE(WEXITSTATUS(std::system(("CMV_SEED=6 " + base).c_str())) == 0);
  CHECK(with_env != slurp("env_seed.cmtx"));
}

TEST_CASE("reduce command: fourier-32 report and identity input") {
  const CliResult r =
      run_cli("reduce --gen fourier:32 --seed 1 --report f32.json");
  REQUIRE(r.exit_code == 0);
  const std::string report = slurp("f32.json");
  CHECK(report.find("\"segments\"") != std::string::npos);
  std::size_t count = 0, pos = 0;
  while ((pos = report.find("\"start\"", pos)) != std::string::npos) {
    ++count;
    pos += 7;
  }
  CHECK(count == 8);

  write_cmtx_file("i4.cmtx", Matrix::identity(4));
  CHECK(run_cli("reduce --input i4.cmtx").exit_code == 0);

  // determinism: identical flags give byte-identical artifacts
  REQUIRE(run_cli("reduce --gen fourier:32 --seed 1 --report f32b.json").exit_code == 0);
  CHECK(slurp("f32.json") == slurp("f32b.json"));
}

TEST_CASE("reduce command: circulant spy matches the stored profile mask") {
  const CliResult r =
      run_cli("reduce --gen circulant:16 --seed 1 --spy c16.spy --out c16.cmtx");
  REQUIRE(r.exit_code == 0);
  CHECK(slurp("c16.spy") ==
        slurp(std::string(CMVKIT_TEST_DATA) + "/compressed_profile_mask_16.txt"));
}

TEST_CASE("fourier-32 spy shows eight diagonal blocks") {
  REQUIRE(run_cli("reduce --gen fourier:32 --seed 1 --spy f32.spy").exit_code == 0);
  std::ifstream in("f32.spy");
  REQUIRE(in);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 32);
  for (std::size_t i = 0; i < 32; ++i)
    for (std::size_t j = 0; j < 32; ++j)
      if (i / 4 != j / 4) CHECK(rows[i][j] == '.');
}

TEST_CASE("eig command prints unit-modulus values for circulant input") {
  const CliResult r = run_cli("eig --gen circulant:16 --seed 2");
  REQUIRE(r.exit_code == 0);
  std::stringstream ss(r.out);
  double re, im;
  std::size_t count = 0;
  while (ss >> re >> im) {
    CHECK(std::abs(std::hypot(re, im) - 1.0) <= 1e-10);
    ++count;
  }
  CHECK(count == 16);
}

TEST_CASE("roots command") {
  const CliResult r = run_cli("roots --coeffs 1,0,-1");
  REQUIRE(r.exit_code == 0);
  std::stringstream ss(r.out);
  std::vector<Complex> roots;
  double re, im;
  while (ss >> re >> im) roots.emplace_back(re, im);
  REQUIRE(roots.size() == 2);
  const bool ok = (std::abs(roots[0] - Complex(1.0)) <= 1e-10 &&
                   std::abs(roots[1] + Complex(1.0)) <= 1e-10) ||
                  (std::abs(roots[0] + Complex(1.0)) <= 1e-10 &&
                   std::abs(roots[1] - Complex(1.0)) <= 1e-10);
  CHECK(ok);
}

TEST_CASE("check command flags a corrupted entry with exit code 2") {
  REQUIRE(run_cli("reduce --gen circulant:16 --seed 1 --out good.cmtx").exit_code == 0);
  CHECK(run_cli("check --input good.cmtx").exit_code == 0);

  Matrix t = read_cmtx_file("good.cmtx");
  t(0, 5) = 1e-3;  // outside the banded profile
  write_cmtx_file("bad.cmtx", t);
  const CliResult r = run_cli("check --input bad.cmtx");
  CHECK(r.exit_code == 2);
  CHECK(r.out.find("(0, 5)") != std::string::npos);
}

TEST_CASE("error paths use exit code 1") {
  CHECK(run_cli("reduce --input does_not_exist.cmtx").exit_code == 1);
  write_cmtx_file("notunitary.cmtx", Complex(2.0) * Matrix::identity(3));
  CHECK(run_cli("reduce --input notunitary.cmtx").exit_code == 1);
  CHECK(run_cli("roots --coeffs 2,1").exit_code == 1);
}

TEST_CASE("bench command emits the CSV header and rows") {
  const CliResult r = run_cli("bench --sizes 8,12 --seed 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.rfind("n,ms_reduce,ms_eig,residual\n", 0) == 0);
  CHECK(r.out.find("\n8,") != std::string::npos);
  CHECK(r.out.find("\n12,") != std::string::npos);
}

TEST_CASE("spy command round trip through a file") {
  write_cmtx_file("spyin.cmtx", Matrix::identity(3));
  const CliResult r = run_cli("spy --input spyin.cmtx --threshold 1e-12");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out == "x..\n.x.\n..x\n");
}
