#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "cmvkit/generators.hpp"
#include "cmvkit/io.hpp"
#include "cmvkit/qr_iter.hpp"
#include "cmvkit/rootfind.hpp"

namespace {

using namespace cmvkit;

constexpr int exit_ok = 0;
constexpr int exit_input_error = 1;
constexpr int exit_verification_failure = 2;
constexpr int exit_no_convergence = 3;

std::uint64_t env_seed() {
  const char* s = std::getenv("CMV_SEED");
  if (s == nullptr) return default_seed;
  return std::strtoull(s, nullptr, 10);
}

ShiftStrategy parse_shift(const std::string& text) {
  if (text == "zero") return ShiftStrategy::zero();
  if (text == "rayleigh") return ShiftStrategy::rayleigh();
  if (text == "wilkinson") return ShiftStrategy::wilkinson();
  const std::size_t comma = text.find(',');
  if (comma == std::string::npos)
    throw std::invalid_argument("shift: expected zero|rayleigh|wilkinson|re,im");
  return ShiftStrategy::custom(Complex(std::stod(text.substr(0, comma)),
                                       std::stod(text.substr(comma + 1))));
}

Matrix load_input(const std::string& gen_spec, const std::string& input,
                  std::uint64_t seed) {
  if (!gen_spec.empty() && !input.empty())
    throw std::invalid_argument("give either --gen or --input, not both");
  if (!gen_spec.empty()) return generate(parse_generator_spec(gen_spec, seed));
  if (!input.empty()) return read_cmtx_file(input);
  throw std::invalid_argument("an input matrix is required (--gen or --input)");
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

void print_values(const std::vector<Complex>& values) {
  for (const Complex& z : values)
    std::printf("%.17g %.17g\n", z.real(), z.imag());
}

double spy_threshold(const Matrix& t, double explicit_threshold, double tol_scale) {
  if (explicit_threshold >= 0.0) return explicit_threshold;
  return tol_scale * static_cast<double>(t.rows()) * unit_roundoff *
         frobenius_norm(t);
}

struct CommonMatrixArgs {
  std::string gen_spec;
  std::string input;
  std::uint64_t seed = default_seed;

  void attach(CLI::App* cmd) {
    cmd->add_option("--gen", gen_spec,
                    "generator spec (fourier:N, circulant:N, haar:N[:SEED], "
                    "companion:c..., direct_sum:A+B)");
    cmd->add_option("--input", input, "CMTX v1 matrix file");
    cmd->add_option("--seed", seed, "seed for generators and starting vectors");
  }
};

int run_gen(const CommonMatrixArgs& args, const std::string& out_path) {
  const Matrix m = generate(parse_generator_spec(args.gen_spec, args.seed));
  if (out_path.empty()) {
    write_cmtx(std::cout, m);
  } else {
    write_cmtx_file(out_path, m);
  }
  return exit_ok;
}

int run_reduce(const CommonMatrixArgs& args, double tol_scale,
               const std::string& out_path, const std::string& report_path,
               const std::string& spy_path, const std::string& spy_format) {
  const Matrix u = load_input(args.gen_spec, args.input, args.seed);
  ReductionOptions options;
  options.seed = args.seed;
  options.tol_scale = tol_scale;
  const CMVLikeForm form = unitary_cmv_reduction(u, options);

  if (!out_path.empty()) write_cmtx_file(out_path, form.t);
  if (!report_path.empty()) write_text_file(report_path, reduction_report_json(form));
  if (!spy_path.empty()) {
    const SpyImage spy = make_spy(form.t, form.report.deflation_threshold);
    write_text_file(spy_path, spy_format == "pgm" ? spy_pgm(spy) : spy_text(spy));
  }

  const VerifyResult verdict =
      verify_cmv_like(form.t, form.profile, form.report.deflation_threshold);
  std::printf("n %zu segments %zu restarts %zu residual %.3e unitarity %.3e\n",
              form.profile.n(), form.profile.segments().size(),
              form.report.breakdown_norms.size(), form.report.residual,
              form.report.unitarity);
  if (!verdict.ok) {
    for (const Violation& v : verdict.violations)
      std::fprintf(stderr, "violation at (%zu, %zu) magnitude %.3e\n", v.i, v.j,
                   v.magnitude);
    return exit_verification_failure;
  }
  return exit_ok;
}

int run_eig(const CommonMatrixArgs& args, const std::string& shift_text,
            std::size_t max_steps, double tol_scale,
            const std::string& report_path) {
  const Matrix u = load_input(args.gen_spec, args.input, args.seed);
  ReductionOptions options;
  options.seed = args.seed;
  options.tol_scale = tol_scale;
  const CMVLikeForm form = unitary_cmv_reduction(u, options);
  if (max_steps == 0) max_steps = 40 * u.rows() + 200;
  const EigenResult result =
      eigensolve_unitary(form.t, form.profile, parse_shift(shift_text), max_steps);
  if (!report_path.empty()) write_text_file(report_path, eigen_report_json(result));
  print_values(result.eigenvalues);
  return result.report.converged ? exit_ok : exit_no_convergence;
}

int run_roots(const std::string& coeffs, const std::string& input,
              const std::string& shift_text, std::size_t max_steps,
              double tol_scale) {
  MonicPolynomial p;
  if (!coeffs.empty()) {
    p = parse_inline_coefficients(coeffs);
  } else if (!input.empty()) {
    p = read_polynomial_file(input);
  } else {
    throw std::invalid_argument("a polynomial is required (--coeffs or --input)");
  }
  const RootsResult result =
      roots(p, parse_shift(shift_text), max_steps, tol_scale);
  print_values(result.roots);
  return result.report.converged ? exit_ok : exit_no_convergence;
}

int run_check(const std::string& input, double tol_scale) {
  const Matrix t = read_cmtx_file(input);
  const double threshold = tol_scale * static_cast<double>(t.rows()) *
                           unit_roundoff * frobenius_norm(t);
  const std::vector<Segment> segments = infer_segments(t, threshold);
  const CMVProfile profile = CMVProfile::banded(t.rows(), segments);
  const VerifyResult verdict = verify_cmv_like(t, profile, threshold);

  bool rank_ok = true;
  for (const Segment& seg : segments) {
    if (seg.size() % 2 != 0 || seg.size() < 6) continue;
    const std::size_t lo = seg.start, hi = seg.start + seg.size();
    const RankPatternResult rp =
        verify_rank_pattern(submatrix(t, lo, hi, lo, hi), threshold);
    if (!rp.ok) {
      rank_ok = false;
      for (const RankPatternEntry& e : rp.entries)
        if (!e.skipped && !e.ok)
          std::fprintf(stderr,
                       "rank pattern violation at k=%zu (segment %zu): sigma1 "
                       "%.3e sigma2 %.3e\n",
                       e.k, lo, e.sigma1, e.sigma2);
    }
  }
  for (const Violation& v : verdict.violations)
    std::fprintf(stderr, "violation at (%zu, %zu) magnitude %.3e\n", v.i, v.j,
                 v.magnitude);
  std::printf("segments %zu off_profile_violations %zu rank_pattern %s\n",
              segments.size(), verdict.violations.size(),
              rank_ok ? "ok" : "violated");
  return (verdict.ok && rank_ok) ? exit_ok : exit_verification_failure;
}

int run_bench(const std::string& sizes_text, std::uint64_t seed,
              const std::string& out_path) {
  std::string csv = "n,ms_reduce,ms_eig,residual\n";
  std::stringstream ss(sizes_text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    const std::size_t n = std::stoull(token);
    const Matrix u = haar_random_unitary(n, mix_seed(seed, n));
    ReductionOptions options;
    options.seed = seed;

    const auto t0 = std::chrono::steady_clock::now();
    const CMVLikeForm form = unitary_cmv_reduction(u, options);
    const auto t1 = std::chrono::steady_clock::now();
    const EigenResult eig = eigensolve_unitary(
        form.t, form.profile, ShiftStrategy::wilkinson(), 40 * n + 200);
    const auto t2 = std::chrono::steady_clock::now();
    (void)eig;

    const double ms_reduce =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    const double ms_eig =
        std::chrono::duration<double, std::milli>(t2 - t1).count();
    char line[128];
    std::snprintf(line, sizeof(line), "%zu,%.3f,%.3f,%.3e\n", n, ms_reduce,
                  ms_eig, form.report.residual);
    csv += line;
  }
  if (out_path.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_text_file(out_path, csv);
  }
  return exit_ok;
}

int run_spy(const std::string& input, double threshold, double tol_scale,
            const std::string& format, const std::string& out_path) {
  const Matrix t = read_cmtx_file(input);
  const SpyImage spy = make_spy(t, spy_threshold(t, threshold, tol_scale));
  const std::string content = format == "pgm" ? spy_pgm(spy) : spy_text(spy);
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
  } else {
    write_text_file(out_path, content);
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMV-like compression of unitary matrices, a structured QR "
               "eigensolver, and a companion-based polynomial rootfinder"};
  app.require_subcommand(1);

  const std::uint64_t seed0 = env_seed();

  CommonMatrixArgs gen_args;
  gen_args.seed = seed0;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "generate a test matrix");
  gen_args.attach(gen);
  gen->add_option("-o,--out", gen_out, "output CMTX file (default stdout)");

  CommonMatrixArgs reduce_args;
  reduce_args.seed = seed0;
  double reduce_tol_scale = 10.0;
  std::string reduce_out, reduce_report, reduce_spy, reduce_spy_format = "text";
  CLI::App* reduce = app.add_subcommand("reduce", "reduce to CMV-like form");
  reduce_args.attach(reduce);
  reduce->add_option("--tol-scale", reduce_tol_scale,
                     "deflation threshold scale (times n*u*||U||_F)");
  reduce->add_option("--out", reduce_out, "write the reduced matrix (CMTX)");
  reduce->add_option("--report", reduce_report, "write the JSON report");
  reduce->add_option("--spy", reduce_spy, "write a spy profile of the result");
  reduce->add_option("--spy-format", reduce_spy_format, "text or pgm")
      ->check(CLI::IsMember({"text", "pgm"}));

  CommonMatrixArgs eig_args;
  eig_args.seed = seed0;
  std::string eig_shift = "wilkinson", eig_report;
  std::size_t eig_max_steps = 0;
  double eig_tol_scale = 10.0;
  CLI::App* eig = app.add_subcommand("eig", "eigenvalues of a unitary matrix");
  eig_args.attach(eig);
  eig->add_option("--shift", eig_shift, "zero|rayleigh|wilkinson|re,im");
  eig->add_option("--max-steps", eig_max_steps, "iteration cap (0 = auto)");
  eig->add_option("--tol-scale", eig_tol_scale, "deflation threshold scale");
  eig->add_option("--report", eig_report, "write the JSON iteration report");

  std::string roots_coeffs, roots_input, roots_shift = "wilkinson";
  std::size_t roots_max_steps = 0;
  double roots_tol_scale = 10.0;
  CLI::App* roots_cmd = app.add_subcommand("roots", "roots of a monic polynomial");
  roots_cmd->add_option("--coeffs", roots_coeffs,
                        "inline coefficients, highest degree first, leading 1");
  roots_cmd->add_option("--input", roots_input, "polynomial text file");
  roots_cmd->add_option("--shift", roots_shift, "zero|rayleigh|wilkinson|re,im");
  roots_cmd->add_option("--max-steps", roots_max_steps, "iteration cap (0 = auto)");
  roots_cmd->add_option("--tol-scale", roots_tol_scale, "deflation threshold scale");

  std::string check_input;
  double check_tol_scale = 10.0;
  CLI::App* check = app.add_subcommand("check", "verify a CMV-like matrix file");
  check->add_option("--input", check_input, "CMTX v1 matrix file")->required();
  check->add_option("--tol-scale", check_tol_scale, "threshold scale");

  std::string bench_sizes = "32,64,128", bench_out;
  std::uint64_t bench_seed = seed0;
  CLI::App* bench = app.add_subcommand("bench", "time reduce/eig across sizes");
  bench->add_option("--sizes", bench_sizes, "comma-separated sizes");
  bench->add_option("--seed", bench_seed, "seed");
  bench->add_option("-o,--out", bench_out, "output CSV file (default stdout)");

  std::string spy_input, spy_format = "text", spy_out;
  double spy_explicit_threshold = -1.0, spy_tol_scale = 10.0;
  CLI::App* spy = app.add_subcommand("spy", "zero/nonzero profile of a matrix");
  spy->add_option("--input", spy_input, "CMTX v1 matrix file")->required();
  spy->add_option("--threshold", spy_explicit_threshold, "absolute threshold");
  spy->add_option("--tol-scale", spy_tol_scale,
                  "threshold scale (times n*u*||T||_F) when no --threshold");
  spy->add_option("--format", spy_format, "text or pgm")
      ->check(CLI::IsMember({"text", "pgm"}));
  spy->add_option("-o,--out", spy_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return run_gen(gen_args, gen_out);
    if (reduce->parsed())
      return run_reduce(reduce_args, reduce_tol_scale, reduce_out,
                        reduce_report, reduce_spy, reduce_spy_format);
    if (eig->parsed())
      return run_eig(eig_args, eig_shift, eig_max_steps, eig_tol_scale,
                     eig_report);
    if (roots_cmd->parsed())
      return run_roots(roots_coeffs, roots_input, roots_shift,
                       roots_max_steps, roots_tol_scale);
    if (check->parsed()) return run_check(check_input, check_tol_scale);
    if (bench->parsed()) return run_bench(bench_sizes, bench_seed, bench_out);
    if (spy->parsed())
      return run_spy(spy_input, spy_explicit_threshold, spy_tol_scale,
                     spy_format, spy_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_input_error;
  }
  return exit_input_error;
}
