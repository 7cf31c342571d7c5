// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "jspec/classify.hpp"

using namespace jspec;

namespace {

LambdaScanResult scan_of(const CoefficientModel& m, double t0 = -4.0, double t1 = 4.0,
                         double step = 1e-3) {
  auto fam = limit_family(m);
  REQUIRE(fam);
  int offset = fam->min_offset();
  GammaEstimate g = estimate_gamma(m, offset, m.analysis_period());
  LambdaScanResult scan =
      lambda_scan([&](cplx z) { return fam->matrix(offset, z); }, {g.value, t0, t1, step});
  scan.offset = offset;
  scan.limit_constant = fam->z_independent();
  return scan;
}

bool has_claim(const ClassificationReport& rep, const std::string& statement) {
  return std::any_of(rep.claims.begin(), rep.claims.end(),
                     [&](const SpectralClaim& c) { return c.statement == statement; });
}

CoefficientModel power_model(double lambda, double mu = 0.2) {
  return CoefficientModel(PowerLawExample{PeriodicPair({1.0}, {0.0}), lambda, mu});
}

}  // namespace

TEST_CASE("free Jacobi classifies proper with interval claims") {
  CoefficientModel m(AsymptoticallyPeriodic{PeriodicPair({1.0}, {0.0}), {}, {}});
  auto rep = classify(m, 1, scan_of(m), 10000);
  CHECK(rep.verdict == ClassificationReport::Verdict::Proper);
  CHECK(has_claim(rep, "K ∩ σ_p(A) = ∅"));
  CHECK(has_claim(rep, "K ⊂ σ(A)"));
  REQUIRE(rep.lambda_intervals.size() == 1);
  CHECK(std::abs(rep.lambda_intervals[0].left + 2.0) <= 2e-3);
  CHECK(std::abs(rep.lambda_intervals[0].right - 2.0) <= 2e-3);
  CHECK(rep.carleman.any_offset_diverging());
  for (const auto& c : rep.claims) CHECK(c.evidence == "numerical");
  // evidence stays bounded inside the band
  for (const auto& ev : rep.evidence) {
    CHECK(ev.bounds.sup_over_inf() < 100.0);
    CHECK(!ev.l2_basis0.summable());
  }
}

TEST_CASE("slow power growth stays proper on the whole line") {
  auto rep_m = power_model(0.7);
  auto rep = classify(rep_m, 1, scan_of(rep_m), 10000);
  CHECK(rep.verdict == ClassificationReport::Verdict::Proper);
  CHECK(rep.line_covers_all);
  CHECK(has_claim(rep, "γℝ ∩ σ_p(A) = ∅"));
  CHECK(has_claim(rep, "γℝ ⊂ σ(A)"));
  CHECK(rep.carleman.per_offset[0].diverging());
}

TEST_CASE("fast power growth classifies improper") {
  auto rep_m = power_model(1.5);
  auto rep = classify(rep_m, 1, scan_of(rep_m), 10000);
  CHECK(rep.verdict == ClassificationReport::Verdict::Improper);
  CHECK(rep.carleman.total.summable());
  CHECK(has_claim(rep, "σ_ess(A) = ∅"));
  CHECK(has_claim(rep, "σ(A) = ℂ"));
  CHECK(has_claim(rep, "σ_p(A_max) = ℂ"));
  REQUIRE(rep.hypotheses.size() == 1);
  CHECK(rep.hypotheses[0].holds());
  // every trajectory is square-summable at each evidence point
  REQUIRE(rep.evidence.size() == 3);
  for (const auto& ev : rep.evidence) {
    CHECK(ev.l2_basis0.summable());
    CHECK(ev.l2_basis1.summable());
  }
}

TEST_CASE("the harmonic boundary decides through divergence detection") {
  auto rep_m = power_model(1.0);
  auto rep = classify(rep_m, 1, scan_of(rep_m), 20000);
  // 1/|a_n| ~ 1/(n+1): window masses are flat, detected as log divergence
  CHECK(rep.carleman.per_offset[0].diverging());
  CHECK(rep.carleman.per_offset[0].boundary);
  CHECK(rep.verdict == ClassificationReport::Verdict::Proper);
}

TEST_CASE("verdict invariants") {
  for (double lambda : {0.7, 1.5}) {
    auto m = power_model(lambda);
    auto rep = classify(m, 1, scan_of(m), 10000);
    if (rep.verdict == ClassificationReport::Verdict::Improper)
      CHECK(rep.carleman.total.summable());
    if (rep.verdict == ClassificationReport::Verdict::Proper)
      CHECK(rep.carleman.any_offset_diverging());
  }
}

TEST_CASE("blend models classify proper on their interval") {
  CoefficientModel m(Blend{PeriodicPair({1.0}, {0.0}), SeqExpr::power(1.0), {}});
  auto rep = classify(m, m.analysis_period(), scan_of(m), 4000);
  CHECK(rep.verdict == ClassificationReport::Verdict::Proper);
  CHECK(has_claim(rep, "K ∩ σ_p(A) = ∅"));
  REQUIRE(rep.lambda_intervals.size() == 1);
  CHECK(std::abs(rep.lambda_intervals[0].left + 1.0) <= 2e-3);
  CHECK(std::abs(rep.lambda_intervals[0].right - 1.0) <= 2e-3);
}

TEST_CASE("period-2 models carry one hypothesis check per offset") {
  CoefficientModel m(AsymptoticallyPeriodic{PeriodicPair({1.0, 2.0}, {0.0, 0.0}), {}, {}});
  auto rep = classify(m, 2, scan_of(m), 4000);
  CHECK(rep.verdict == ClassificationReport::Verdict::Proper);
  REQUIRE(rep.hypotheses.size() == 2);
  CHECK(rep.hypotheses[0].offset == 0);
  CHECK(rep.hypotheses[1].offset == 1);
  for (const auto& h : rep.hypotheses) {
    CHECK(h.holds());
    CHECK(std::abs(h.gamma - 1.0) <= 1e-12);
  }
  CHECK(rep.carleman.per_offset.size() == 2);
  CHECK(rep.lambda_intervals.size() == 2);
}

TEST_CASE("purely imaginary modulated entries ride the gamma = i line") {
  CoefficientModel m(PeriodicallyModulated{PeriodicPair({1.0}, {0.0}),
                                           SeqExpr::imag_unit(SeqExpr::power(0.7))});
  GammaEstimate g = estimate_gamma(m, 0, 1);
  CHECK(std::abs(g.value - cplx(0.0, 1.0)) <= 1e-12);
  CHECK(g.drift <= 1e-12);

  auto rep = classify(m, 1, scan_of(m), 10000);
  CHECK(rep.verdict == ClassificationReport::Verdict::Proper);
  CHECK(rep.line_covers_all);
  CHECK(has_claim(rep, "γℝ ∩ σ_p(A) = ∅"));
  CHECK(std::abs(rep.line_gamma - cplx(0.0, 1.0)) <= 1e-12);

  // a trace on the imaginary line converges to a positive limit
  auto tr = turan_trace(m, 0, 1, g.value, cplx(0.0, 0.5), {1.0, 0.0}, 20000);
  CHECK(!tr.non_convergent);
  CHECK(!tr.sign_change);
  CHECK(tr.sign == 1);
  CHECK(tr.max_imag_residue <= 1e-12);
}

TEST_CASE("tables without a limit family stay inconclusive") {
  CoefficientModel m(ExplicitTable{{1.0, 1.0, 1.0, 1.0}, {0.0, 0.0, 0.0, 0.0}, cplx(1.0)});
  LambdaScanResult empty_scan;
  auto rep = classify(m, 1, empty_scan, 3);
  CHECK(rep.verdict == ClassificationReport::Verdict::Inconclusive);
  CHECK(rep.claims.empty());
}
