// Acceptance suite: one line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmvkit/generators.hpp"
#include "cmvkit/io.hpp"
#include "cmvkit/lanczos.hpp"
#include "cmvkit/qr_iter.hpp"
#include "cmvkit/rootfind.hpp"
#include "support/oracles.hpp"

using namespace cmvkit;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("%s  criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str(), detail.c_str());
  if (!pass) ++failures;
}

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- 1: Fourier-32 block structure, breakdown norms, runtime ---------------

void criterion_1() {
  const auto t0 = Clock::now();
  const CMVLikeForm form = unitary_cmv_reduction(fourier_matrix(32));
  const double elapsed = ms_since(t0);

  bool pass = form.profile.segments().size() == 8 &&
              form.report.breakdown_norms.size() == 7 && elapsed < 1000.0;
  double worst = 0.0;
  for (double norm : form.report.breakdown_norms) worst = std::max(worst, norm);
  pass = pass && worst <= 1e-12;

  // the same run through the command-line surface
  const std::string cmd = std::string(CMVKIT_CLI_PATH) +
                          " reduce --gen fourier:32 --seed 1 --report "
                          "acceptance_f32.json > /dev/null 2>&1";
  pass = pass && WEXITSTATUS(std::system(cmd.c_str())) == 0;
  const auto json = nlohmann::json::parse(slurp("acceptance_f32.json"));
  pass = pass && json.at("segments").size() == 8;

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "segments %zu, restarts %zu, max breakdown norm %.2e, %.0f ms",
                form.profile.segments().size(),
                form.report.breakdown_norms.size(), worst, elapsed);
  report(1, pass, "fourier-32 reduces to 8 CMV-like segments via 7 restarts",
         detail);
}

// --- 2: Lanczos breakdown locality on Fourier matrices ---------------------

void criterion_2() {
  bool pass = true;
  std::size_t worst_step = 0;
  for (std::size_t n : {8u, 16u, 32u}) {
    const Matrix f = fourier_matrix(n);
    const Matrix fh = hermitian_part(f);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      Rng rng(mix_seed(seed, n));
      const BlockTridiagonalForm form = block_lanczos(fh, rng.unit_vector(n), f);
      if (form.completed()) {
        pass = false;
        continue;
      }
      worst_step = std::max(worst_step, *form.report.breakdown_step);
      if (*form.report.breakdown_step > 3) pass = false;
    }
  }
  char detail[100];
  std::snprintf(detail, sizeof(detail), "60 runs, latest breakdown at step %zu",
                worst_step);
  report(2, pass, "block_lanczos on fourier breaks down within three steps",
         detail);
}

// --- 3: circulant-16 compressed profile vs the stored mask -----------------

void criterion_3() {
  Rng rng(1);
  const Matrix u = circulant_generator(16);
  const CMVLikeForm form = unitary_cmv_reduction(u, rng.unit_vector(16),
                                                 ReductionOptions{1, 10.0});
  const double bound = 10.0 * 16.0 * unit_roundoff * frobenius_norm(u);
  const Matrix raw = mat_mul(adjoint(form.q), mat_mul(u, form.q));
  const double off = form.profile.max_off_profile(raw);

  const std::string golden =
      slurp(std::string(CMVKIT_TEST_DATA) + "/compressed_profile_mask_16.txt");
  const std::string spy =
      spy_text(make_spy(form.t, form.report.deflation_threshold));

  const bool pass = spy == golden && off <= bound;
  char detail[100];
  std::snprintf(detail, sizeof(detail),
                "spy %s golden, off-profile %.2e <= %.2e",
                spy == golden ? "==" : "!=", off, bound);
  report(3, pass, "circulant-16 spy equals the stored profile mask", detail);
}

// --- 4 and 5: reduction property suite on seeded Haar unitaries ------------

void criteria_4_and_5() {
  const std::size_t sizes[] = {6, 7, 12, 16, 31, 32};
  const auto t0 = Clock::now();
  bool pass4 = true, pass5 = true;
  double worst_unitarity = 0.0, worst_residual = 0.0, worst_anti = 0.0;

  for (std::uint64_t run = 0; run < 50; ++run) {
    const std::size_t n = sizes[run % 6];
    const Matrix u = haar_random_unitary(n, mix_seed(1000, run));
    const CMVLikeForm form = unitary_cmv_reduction(u, ReductionOptions{run, 10.0});
    const double bound =
        10.0 * static_cast<double>(n) * unit_roundoff * frobenius_norm(u);

    worst_unitarity = std::max(
        worst_unitarity,
        form.report.unitarity / (10.0 * static_cast<double>(n) * unit_roundoff));
    worst_residual = std::max(worst_residual, form.report.residual / bound);
    if (form.report.unitarity > 10.0 * static_cast<double>(n) * unit_roundoff)
      pass4 = false;
    if (form.report.residual > bound) pass4 = false;
    if (!verify_cmv_like(form.t, form.profile, bound).ok) pass4 = false;

    // every off-diagonal block of the compressed form has rank at most one
    for (const Segment& seg : form.profile.segments()) {
      std::size_t off = seg.start;
      for (std::size_t k = 0; k + 1 < seg.block_sizes.size(); ++k) {
        const std::size_t next = off + seg.block_sizes[k];
        const std::size_t end = next + seg.block_sizes[k + 1];
        if (svd2x2(submatrix(form.t, next, end, off, next)).sigma2 > bound)
          pass4 = false;
        if (svd2x2(submatrix(form.t, off, next, next, end)).sigma2 > bound)
          pass4 = false;
        off = next;
      }
    }

    if (n % 2 == 0 && form.profile.segments().size() == 1) {
      if (!verify_rank_pattern(form.t, bound).ok) pass4 = false;
    }

    const Matrix tah =
        mat_mul(adjoint(form.q), mat_mul(anti_hermitian_part(u), form.q));
    const CMVProfile banded =
        CMVProfile::banded(n, form.profile.segments());
    const double anti_off = banded.max_off_profile(tah);
    worst_anti = std::max(worst_anti, anti_off / bound);
    if (anti_off > bound) pass5 = false;
  }
  const double elapsed = ms_since(t0);

  char detail4[140];
  std::snprintf(detail4, sizeof(detail4),
                "50 runs, worst unitarity %.2f and residual %.2f of budget, "
                "%.0f ms",
                worst_unitarity, worst_residual, elapsed);
  report(4, pass4 && elapsed < 30000.0,
         "reduction property suite on seeded haar unitaries", detail4);

  char detail5[100];
  std::snprintf(detail5, sizeof(detail5), "worst off-band %.2f of budget",
                worst_anti);
  report(5, pass5, "the same basis reduces the anti-hermitian part", detail5);
}

// --- 6: shape invariance across 32 shifted QR steps -------------------------

void criterion_6() {
  Rng rng(6);
  const Matrix u = circulant_generator(16);
  const CMVLikeForm form = unitary_cmv_reduction(u, rng.unit_vector(16));
  const double bound = 10.0 * 16.0 * unit_roundoff * frobenius_norm(form.t);

  Matrix t = form.t;
  const auto initial = oracles::dense_eigenvalues(t);
  bool pass = true;
  double worst = 0.0;
  for (int step = 0; step < 32; ++step) {
    const QRStepResult r = qr_step(t, form.profile, ShiftStrategy::wilkinson());
    worst = std::max(worst, r.profile_violation);
    if (r.profile_violation > bound) pass = false;
    t = r.t_next;
  }
  const bool drift_ok =
      oracles::matches_within(oracles::dense_eigenvalues(t), initial, 1e-8);
  pass = pass && drift_ok;

  char detail[120];
  std::snprintf(detail, sizeof(detail),
                "worst violation %.2e <= %.2e, drift %s 1e-8", worst, bound,
                drift_ok ? "<=" : ">");
  report(6, pass, "32 wilkinson qr steps keep the circulant-16 shape", detail);
}

// --- 7: unit-circle spectrum against brute-force oracles -------------------

void criterion_7() {
  const std::size_t sizes[] = {4, 6, 8, 12, 16, 20, 24, 28, 32, 8};
  bool pass = true;
  double worst_modulus = 0.0;
  for (std::uint64_t run = 0; run < 20; ++run) {
    const std::size_t n = sizes[run % 10];
    const Matrix u = haar_random_unitary(n, mix_seed(7000, run));
    const CMVLikeForm form = unitary_cmv_reduction(u, ReductionOptions{run, 10.0});
    const EigenResult r = eigensolve_unitary(form.t, form.profile,
                                             ShiftStrategy::wilkinson(),
                                             40 * n + 200);
    if (!r.report.converged || r.eigenvalues.size() != n) {
      pass = false;
      continue;
    }
    for (const Complex& l : r.eigenvalues) {
      worst_modulus = std::max(worst_modulus, std::abs(std::abs(l) - 1.0));
      if (std::abs(std::abs(l) - 1.0) > 1e-10) pass = false;
    }
    if (!oracles::matches_within(r.eigenvalues, oracles::dense_eigenvalues(u),
                                 1e-8))
      pass = false;
    if (n <= 8) {
      const auto poly_roots = oracles::durand_kerner(oracles::char_poly(u));
      if (!oracles::matches_within(r.eigenvalues, poly_roots, 1e-8)) pass = false;
    }
  }
  char detail[100];
  std::snprintf(detail, sizeof(detail), "20 runs, worst | |l|-1 | = %.2e",
                worst_modulus);
  report(7, pass, "eigensolve returns unit-circle spectra matching oracles",
         detail);
}

// --- 8: perturbed structure under 32 QR steps -------------------------------

void criterion_8() {
  Rng rng(88);
  std::vector<Complex> planted;
  for (int k = 0; k < 10; ++k)
    planted.push_back(std::polar(0.3 + 0.65 * rng.next_double(),
                                 2.0 * std::numbers::pi * rng.next_double()));
  MonicPolynomial p;
  p.coefficients = oracles::poly_from_roots(planted);

  RankOnePerturbedForm b = reduce_companion(p).step_state();
  const double fro = frobenius_norm(b.assembled());
  bool pass = true;
  double worst_hess = 0.0, worst_ratio = 0.0, worst_slice = 0.0;
  for (int step = 0; step < 32; ++step) {
    auto [next, rep] = qr_step_perturbed(b, ShiftStrategy::wilkinson());
    worst_hess = std::max(worst_hess, rep.hessenberg_violation / fro);
    if (rep.hessenberg_violation > 1e-10 * fro) pass = false;
    for (const RankDecision& d : rep.subdiagonal_ranks) {
      if (d.singular_values.size() < 2) continue;
      const double s1 = d.singular_values[0], s2 = d.singular_values[1];
      // rank one either at the roundoff floor or relative to the block
      if (s2 <= 100.0 * unit_roundoff * fro) continue;
      worst_ratio = std::max(worst_ratio, s2 / s1);
      if (s2 / s1 > 1e-8) pass = false;
    }
    for (double ratio : rep.upper_slice_ratios) {
      worst_slice = std::max(worst_slice, ratio);
      if (ratio > 1e-8) pass = false;
    }
    b = std::move(next);
  }
  char detail[140];
  std::snprintf(detail, sizeof(detail),
                "hessenberg %.2e rel, rank ratio %.2e, slice ratio %.2e",
                worst_hess, worst_ratio, worst_slice);
  report(8, pass, "companion-derived form keeps its rank structure", detail);
}

// --- 9: rootfinding ----------------------------------------------------------

void criterion_9() {
  const auto t0 = Clock::now();
  bool pass = true;

  std::vector<Complex> c16(16, 0.0);
  c16[0] = -1.0;
  MonicPolynomial p16;
  p16.coefficients = c16;
  std::vector<Complex> unity;
  for (int k = 0; k < 16; ++k)
    unity.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / 16.0));
  const RootsResult r16 = roots(p16);
  if (!oracles::matches_within(r16.roots, unity, 1e-10)) pass = false;

  MonicPolynomial cubic;
  cubic.coefficients = {Complex(-6.0), Complex(11.0), Complex(-6.0)};
  const RootsResult rc = roots(cubic);
  if (!oracles::matches_within(rc.roots,
                               {Complex(1.0), Complex(2.0), Complex(3.0)},
                               1e-10))
    pass = false;

  for (std::uint64_t run = 0; run < 20; ++run) {
    Rng prng(mix_seed(9000, run));
    std::vector<Complex> planted;
    for (int k = 0; k < 12; ++k)
      planted.push_back(std::polar(0.25 + 0.7 * prng.next_double(),
                                   2.0 * std::numbers::pi * prng.next_double()));
    MonicPolynomial p;
    p.coefficients = oracles::poly_from_roots(planted);
    const RootsResult r = roots(p);
    if (r.roots.size() != 12 ||
        !oracles::matches_within(r.roots, planted, 1e-6))
      pass = false;
  }
  const double elapsed = ms_since(t0);
  pass = pass && elapsed < 10000.0;
  char detail[80];
  std::snprintf(detail, sizeof(detail), "22 polynomials, %.0f ms", elapsed);
  report(9, pass, "roots of unity, the integer cubic, and 20 seeded dozens",
         detail);
}

// --- 10: smoke benchmark: growth no worse than cubic -------------------------

void criterion_10() {
  auto time_reduce = [](std::size_t n) {
    const Matrix u = haar_random_unitary(n, mix_seed(10000, n));
    double best = 1e300;
    for (int rep = 0; rep < 3; ++rep) {
      const auto t0 = Clock::now();
      const CMVLikeForm form = unitary_cmv_reduction(u, ReductionOptions{n, 10.0});
      (void)form;
      best = std::min(best, ms_since(t0));
    }
    return best;
  };
  const double t32 = time_reduce(32);
  const double t128 = time_reduce(128);
  const double base = std::max(t32, 0.5);  // timer floor
  const double limit = base * 64.0 * 4.0;  // cubic ratio with 4x slack
  const bool pass = t128 <= limit;
  char detail[100];
  std::snprintf(detail, sizeof(detail), "reduce: %.1f ms @32, %.1f ms @128 (limit %.0f)",
                t32, t128, limit);
  report(10, pass, "reduction time grows no worse than cubically", detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_and_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  if (failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criteria failed\n", failures);
  return 1;
}
