// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jspec/eigen.hpp"
#include "jspec/transfer.hpp"
#include "jspec/turan.hpp"

namespace jspec {

// A spectral statement asserted under numerically checked hypotheses.  The
// artifact never proves these; every claim carries evidence = "numerical".
struct SpectralClaim {
  std::string statement;
  std::string hypothesis;
  std::string evidence = "numerical";
};

// Numerical stand-ins for the limit hypotheses at one offset: a stable
// unimodular limit of a_{nN+i-1}/|a_{nN+i-1}|, consecutive-block ratios
// approaching 1, a real elliptic limit matrix, and a twisted variation of
// the N-step transfer matrices that is not visibly diverging.
struct OffsetHypothesisCheck {
  int offset = 0;
  cplx gamma{1.0};
  double gamma_drift = 0.0;       // last-decade phase drift
  double gamma_drift_prev = 0.0;  // the decade before; contraction = convergence
  double block_ratio_drift = 0.0;  // |a_{nN+i-1}/a_{(n+1)N+i-1} - 1| at large n
  bool limit_real_elliptic = false;
  SeriesVerdict x_twisted_variation;

  bool gamma_stable() const { return gamma_drift <= 1e-3 || gamma_drift <= 0.5 * gamma_drift_prev; }
  bool holds() const {
    return gamma_stable() && block_ratio_drift <= 1e-2 && limit_real_elliptic &&
           !x_twisted_variation.diverging();
  }
};

struct BoundEvidence {
  cplx z;
  int offset = 0;
  BoundRatioReport bounds;
  L2TailReport l2_basis0, l2_basis1;
};

struct ClassificationReport {
  enum class Verdict { Proper, Improper, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  int period = 1;
  CarlemanReport carleman;
  std::vector<OffsetHypothesisCheck> hypotheses;
  std::vector<SpectralClaim> claims;
  std::vector<BoundEvidence> evidence;
  std::vector<LambdaInterval> lambda_intervals;
  cplx line_gamma{1.0};
  bool line_covers_all = false;  // modulated families: the whole line is elliptic

  const char* verdict_name() const {
    switch (verdict) {
      case Verdict::Proper:
        return "Proper";
      case Verdict::Improper:
        return "Improper";
      default:
        return "Inconclusive";
    }
  }
};

namespace detail {

// Interior points of an interval at the given fractions, keeping a 10%
// margin from each endpoint.
inline std::vector<double> interior_points(const LambdaInterval& iv,
                                           std::initializer_list<double> fractions) {
  double len = iv.right - iv.left;
  double lo = iv.left + 0.1 * len, hi = iv.right - 0.1 * len;
  std::vector<double> out;
  for (double f : fractions) out.push_back(lo + f * (hi - lo));
  return out;
}

}  // namespace detail

// Combines Carleman verdicts with the Lambda scan.  A diverging offset sum
// with a verified limit at that offset yields Proper with point-spectrum
// exclusion on the scanned intervals; a converging total with the hypotheses
// verified at every offset yields Improper with the empty-essential-spectrum
// statements; anything else stays Inconclusive.
inline ClassificationReport classify(const CoefficientModel& m, int N,
                                     const LambdaScanResult& scan, long n_max) {
  ClassificationReport rep;
  rep.period = N;
  rep.carleman = carleman(m, N, n_max);
  rep.lambda_intervals = scan.intervals;
  rep.line_gamma = scan.line.gamma;

  std::optional<LimitFamily> fam = limit_family(m);

  // the scanned line counts as fully covered when one interval spans the
  // whole grid (up to one step at each end)
  if (!scan.intervals.empty()) {
    const LambdaInterval& iv = scan.intervals.front();
    rep.line_covers_all = scan.intervals.size() == 1 &&
                          iv.left <= scan.line.t0 + 1.5 * scan.line.step &&
                          iv.right >= scan.line.t1 - 1.5 * scan.line.step;
  }

  // hypothesis checks per family offset
  if (fam && !scan.intervals.empty()) {
    const LambdaInterval* widest = scan.widest();
    double t_test = 0.5 * (widest->left + widest->right);
    cplx z_test = scan.line.gamma * t_test;
    long tv_n = std::min<long>(n_max, 2000);
    for (int i = fam->min_offset(); i <= fam->max_offset(); ++i) {
      OffsetHypothesisCheck h;
      h.offset = i;
      GammaEstimate ge = estimate_gamma(m, i, N);
      h.gamma = ge.value;
      h.gamma_drift = ge.drift;
      h.gamma_drift_prev = ge.drift_prev;
      long big = 100000;
      cplx r = m.eval(big * N + i - 1).a / m.eval((big + 1) * N + i - 1).a;
      h.block_ratio_drift = std::abs(r - 1.0);
      Mat2 lim = fam->matrix(i, z_test);
      cplx d = discriminant(lim);
      h.limit_real_elliptic = lim.max_abs_imag() <= scan.realness_tol &&
                              std::abs(d.imag()) <= scan.realness_tol &&
                              d.real() < -scan.realness_tol;
      h.x_twisted_variation = twisted_variation_mat(
                                  [&](long k) { return n_step(m, k, N, z_test); }, i, N, tv_n)
                                  .verdict;
      rep.hypotheses.push_back(h);
    }
  }

  auto all_hold = [&] {
    if (rep.hypotheses.empty()) return false;
    for (const auto& h : rep.hypotheses)
      if (!h.holds()) return false;
    return true;
  };
  auto diverging_offset_with_limit = [&]() -> const OffsetHypothesisCheck* {
    for (const auto& h : rep.hypotheses) {
      if (!h.holds()) continue;
      if (size_t(h.offset) < rep.carleman.per_offset.size() &&
          rep.carleman.per_offset[size_t(h.offset)].diverging())
        return &h;
    }
    return nullptr;
  };

  const OffsetHypothesisCheck* proper_offset = diverging_offset_with_limit();
  if (rep.carleman.total.summable() && all_hold()) {
    rep.verdict = ClassificationReport::Verdict::Improper;
    std::string hyp = "total Carleman sum converges; limit hypotheses verified at every offset";
    rep.claims.push_back({"σ_ess(A) = ∅", hyp});
    rep.claims.push_back({"σ(A) = ℂ", hyp});
    rep.claims.push_back({"σ_p(A_max) = ℂ", hyp});
  } else if (proper_offset && !scan.intervals.empty()) {
    rep.verdict = ClassificationReport::Verdict::Proper;
    std::string hyp = "Carleman sum diverges at offset " + std::to_string(proper_offset->offset) +
                      "; limit hypotheses verified there";
    if (rep.line_covers_all && scan.limit_constant) {
      rep.claims.push_back({"γℝ ∩ σ_p(A) = ∅", hyp});
      rep.claims.push_back({"γℝ ⊂ σ(A)", hyp});
    } else {
      rep.claims.push_back({"K ∩ σ_p(A) = ∅", hyp});
      rep.claims.push_back({"K ⊂ σ(A)", hyp});
    }
  } else {
    rep.verdict = ClassificationReport::Verdict::Inconclusive;
  }

  // evidence: bound ratios and l2 tails at interior points of the widest
  // interval; never feeds the verdict above
  if (!scan.intervals.empty()) {
    const LambdaInterval* widest = scan.widest();
    int ev_offset = proper_offset ? proper_offset->offset
                                  : (rep.hypotheses.empty() ? 0 : rep.hypotheses.front().offset);
    long ev_n = std::min<long>(n_max, 10000);
    for (double t : detail::interior_points(*widest, {0.0, 0.5, 1.0})) {
      BoundEvidence ev;
      ev.z = scan.line.gamma * t;
      ev.offset = ev_offset;
      ev.bounds = bound_ratio(m, ev_offset, N, ev.z, ev_n, 10);
      ev.l2_basis0 = l2_tail(evolve(m, ev.z, {1.0, 0.0}, ev_n * N));
      ev.l2_basis1 = l2_tail(evolve(m, ev.z, {0.0, 1.0}, ev_n * N));
      rep.evidence.push_back(ev);
    }
  }
  return rep;
}

}  // namespace jspec
