// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "jspec/sequences.hpp"
#include "jspec/series.hpp"
#include "jspec/transfer.hpp"

namespace jspec {

constexpr double kLn2 = 0.6931471805599453;

struct WalkOptions {
  // Rescale by a power of two whenever max(|u_{n-1}|, |u_n|) leaves
  // [2^-rescale_exp, 2^rescale_exp]; the ledger keeps ratios exact.
  int rescale_exp = 512;
};

// Runs the three-term recurrence u_{n+1} = ((z - b_n) u_n - a_{n-1} u_{n-1}) / a_n
// and calls visit(n, u_{n-1}, u_n, e) for n = 1..n_max, where the passed pair
// is the true pair times 2^-e.
template <class F>
void walk_recurrence(const CoefficientModel& m, cplx z, Vec2 alpha, long n_max, F&& visit,
                     WalkOptions opt = {}) {
  if (alpha.is_zero()) throw DegenerateInitial("walk_recurrence: alpha = (0, 0)");
  if (n_max < 1) throw PreconditionError("walk_recurrence: n_max must be >= 1");
  const double hi = std::ldexp(1.0, opt.rescale_exp);
  const double lo = std::ldexp(1.0, -opt.rescale_exp);
  cplx up = alpha.x, uc = alpha.y;
  long e = 0;
  visit(1L, up, uc, e);
  for (long n = 1; n < n_max; ++n) {
    Coeff c = m.at(n);
    cplx un = ((z - c.b) * uc - m.at(n - 1).a * up) / c.a;
    up = uc;
    uc = un;
    double mx = std::max(std::abs(up), std::abs(uc));
    if (mx > hi || (mx > 0.0 && mx < lo)) {
      int k = std::ilogb(mx);
      up = ldexp_c(up, -k);
      uc = ldexp_c(uc, -k);
      e += k;
    }
    visit(n + 1, up, uc, e);
  }
}

struct TrajectorySample {
  long n;            // the pair is (u_{n-1}, u_n)
  cplx u_prev, u_curr;  // stored values: true values times 2^-scale_exp
  long scale_exp;
};

// Log-scaled samples of a generalised eigenvector.
struct EigenvectorTrajectory {
  cplx z;
  Vec2 alpha;  // (u_0, u_1)
  long stride = 1;
  std::vector<TrajectorySample> samples;  // n = 1, 1+stride, ...

  const TrajectorySample& pair_at(long n) const {
    long idx = (n - 1) / stride;
    if (n < 1 || (n - 1) % stride != 0 || size_t(idx) >= samples.size())
      throw PreconditionError("trajectory does not record index n=" + std::to_string(n));
    return samples[size_t(idx)];
  }
  long last_n() const { return samples.empty() ? 0 : samples.back().n; }

  // True squared norm of the recorded pair, safe against over/underflow of
  // the plain product: returns log of |u_{n-1}|^2 + |u_n|^2.
  static double log_norm2(const TrajectorySample& s) {
    double mx = std::max(std::abs(s.u_prev), std::abs(s.u_curr));
    if (mx == 0.0) return -std::numeric_limits<double>::infinity();
    int k = std::ilogb(mx);
    double n2 = std::norm(ldexp_c(s.u_prev, -k)) + std::norm(ldexp_c(s.u_curr, -k));
    return std::log(n2) + 2.0 * double(k + s.scale_exp) * kLn2;
  }
};

inline EigenvectorTrajectory evolve(const CoefficientModel& m, cplx z, Vec2 alpha, long n_max,
                                    long stride = 1, WalkOptions opt = {}) {
  if (stride < 1) throw PreconditionError("evolve: stride must be >= 1");
  EigenvectorTrajectory tr;
  tr.z = z;
  tr.alpha = alpha;
  tr.stride = stride;
  tr.samples.reserve(size_t((n_max - 1) / stride + 1));
  walk_recurrence(
      m, z, alpha, n_max,
      [&](long n, const cplx& up, const cplx& uc, long e) {
        if ((n - 1) % stride == 0) tr.samples.push_back({n, up, uc, e});
      },
      opt);
  return tr;
}

// Initial condition making the trajectory a candidate eigenvector of the
// minimal operator: (u_0, u_1) = (u0, (z - b_0) u0 / a_0).
inline Vec2 eigen_seed(const CoefficientModel& m, cplx z, cplx u0) {
  if (u0 == 0.0) throw DegenerateInitial("eigen_seed: u0 = 0");
  return {u0, (z - m.b(0)) * u0 / m.a(0)};
}

// -- two-sided bound diagnostics ----------------------------------------------

struct BasisRatioStats {
  double log_inf = 0.0, log_sup = 0.0;            // over all recorded blocks
  double tail_log_inf = 0.0, tail_log_sup = 0.0;  // last decade
  double slope = 0.0;  // least-squares d log r / d log n over the last decade
};

struct BoundRatioReport {
  int offset = 0, period = 1;
  cplx z;
  long n_min = 1, n_max = 0;
  BasisRatioStats basis[2];  // alpha = (1,0) and (0,1)
  double log_inf = 0.0, log_sup = 0.0;  // combined over both bases

  double sup_over_inf() const { return std::exp(log_sup - log_inf); }
  double max_abs_slope() const {
    return std::max(std::abs(basis[0].slope), std::abs(basis[1].slope));
  }
};

// Tracks r_n = |a_{nN+i-1}| (|u_{nN+i-1}|^2 + |u_{nN+i}|^2) / ||alpha||^2 for
// the two basis initial conditions; rescaling exponents cancel exactly, so
// the ratios are scale-free.  Everything is kept in log space because r_n
// grows geometrically outside Lambda.
inline BoundRatioReport bound_ratio(const CoefficientModel& m, int offset, int N, cplx z,
                                    long n_max, long n_min = 1, WalkOptions opt = {}) {
  if (N < 1 || offset < 0) throw PreconditionError("bound_ratio: bad offset/period");
  if (n_max < 10) throw PreconditionError("bound_ratio: n_max must be >= 10 blocks");
  if (n_min < 1) n_min = 1;

  BoundRatioReport rep;
  rep.offset = offset;
  rep.period = N;
  rep.z = z;
  rep.n_min = n_min;
  rep.n_max = n_max;

  const Vec2 bases[2] = {{1.0, 0.0}, {0.0, 1.0}};
  long tail_from = std::max(n_min, n_max / 10);
  for (int bi = 0; bi < 2; ++bi) {
    std::vector<double> lx, ly;        // tail decade, for the slope fit
    double mn = 0.0, mx = 0.0, tmn = 0.0, tmx = 0.0;
    bool any = false, tany = false;
    walk_recurrence(
        m, z, bases[bi], n_max * N + offset,
        [&](long idx, const cplx& up, const cplx& uc, long e) {
          if (idx < 1 || (idx - offset) % N != 0) return;
          long blk = (idx - offset) / N;
          if (blk < n_min || blk > n_max) return;
          double lr = EigenvectorTrajectory::log_norm2({idx, up, uc, e}) +
                      std::log(std::abs(m.a(idx - 1)));
          if (!any || lr < mn) mn = lr;
          if (!any || lr > mx) mx = lr;
          any = true;
          if (blk >= tail_from) {
            if (!tany || lr < tmn) tmn = lr;
            if (!tany || lr > tmx) tmx = lr;
            tany = true;
            lx.push_back(std::log(double(blk)));
            ly.push_back(lr);
          }
        },
        opt);
    if (!any) throw PreconditionError("bound_ratio: no blocks recorded");
    rep.basis[bi] = {mn, mx, tmn, tmx, ls_slope(lx, ly)};
  }
  rep.log_inf = std::min(rep.basis[0].log_inf, rep.basis[1].log_inf);
  rep.log_sup = std::max(rep.basis[0].log_sup, rep.basis[1].log_sup);
  return rep;
}

// -- Carleman sums -------------------------------------------------------------

struct CarlemanReport {
  int period = 1;
  long n_max = 0;
  SeriesVerdict total;                     // sum over n >= 0 of 1/|a_n|
  std::vector<SeriesVerdict> per_offset;   // i: sum over n >= 1 of 1/|a_{nN+i-1}|

  bool any_offset_diverging() const {
    for (const auto& v : per_offset)
      if (v.diverging()) return true;
    return false;
  }
};

inline CarlemanReport carleman(const CoefficientModel& m, int N, long n_max) {
  if (N < 1 || n_max < 1) throw PreconditionError("carleman: bad arguments");
  CarlemanReport rep;
  rep.period = N;
  rep.n_max = n_max;
  rep.total = classify_series_log(
      [&](long k) { return -std::log(std::abs(m.a(k))); }, 0, n_max);
  rep.per_offset.reserve(size_t(N));
  for (int i = 0; i < N; ++i)
    rep.per_offset.push_back(classify_series_log(
        [&](long k) { return -std::log(std::abs(m.a(k * N + i - 1))); }, 1, n_max));
  return rep;
}

// -- l2 tails -------------------------------------------------------------------

struct L2TailReport {
  SeriesVerdict verdict;  // Converging = square-summable tail
  double partial_sum = 0.0;

  bool summable() const { return verdict.summable(); }
};

// Partial sums of |u_n|^2 over a stride-1 trajectory.
inline L2TailReport l2_tail(const EigenvectorTrajectory& traj) {
  if (traj.stride != 1)
    throw PreconditionError("l2_tail: trajectory must be recorded with stride 1");
  if (traj.samples.empty()) throw PreconditionError("l2_tail: empty trajectory");
  auto log_u2 = [&](long n) {
    const TrajectorySample& s = traj.pair_at(n);
    double a = std::abs(s.u_curr);
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    return 2.0 * (std::log(a) + double(s.scale_exp) * kLn2);
  };
  L2TailReport rep;
  rep.verdict = classify_series_log(log_u2, 1, traj.last_n());
  rep.partial_sum = rep.verdict.partial_sum + std::norm(traj.alpha.x);  // include |u_0|^2
  rep.verdict.partial_sum = rep.partial_sum;
  return rep;
}

}  // namespace jspec
