// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "jspec/eigen.hpp"
#include "jspec/mat2.hpp"
#include "jspec/sequences.hpp"
#include "jspec/series.hpp"
#include "jspec/transfer.hpp"

namespace jspec {

// Hermitian form matrix sym[(a_{n+N-1} / (gamma |a_{n+N-1}|)) E X_n(z)].
inline Mat2 q_form_matrix(const CoefficientModel& m, long n, int N, cplx gamma, cplx z) {
  cplx a = m.a(n + N - 1);
  cplx scale = a / (gamma * std::abs(a));
  return sym_part(scale * (kE * n_step(m, n, N, z)));
}

// The alternative form evaluated at the advanced pair: the scalar picks up
// the conjugated ratio (a_{n+N-1}/a_{n-1})* and the transfer matrix is
// entrywise conjugated.
inline Mat2 q_tilde_form_matrix(const CoefficientModel& m, long n, int N, cplx gamma, cplx z) {
  cplx a = m.a(n + N - 1);
  cplx scale = a / (gamma * std::abs(a)) * std::conj(a / m.a(n - 1));
  return sym_part(scale * (kE * n_step(m, n, N, z).conjugate()));
}

struct QValue {
  double value = 0.0;         // real part of <M v, v>
  double imag_residue = 0.0;  // |Im <M v, v>| relative to the form scale
};

namespace detail {
inline QValue hermitian_form(const Mat2& m, const Vec2& v) {
  cplx q = dot(m.apply(v), v);
  double scale = m.frobenius() * v.norm2();
  QValue out;
  out.value = q.real();
  out.imag_residue = scale > 0.0 ? std::abs(q.imag()) / scale : std::abs(q.imag());
  return out;
}
}  // namespace detail

inline QValue q_form(const CoefficientModel& m, long n, int N, cplx gamma, cplx z,
                     const Vec2& v) {
  if (n < 1) throw PreconditionError("q_form: n must be >= 1");
  return detail::hermitian_form(q_form_matrix(m, n, N, gamma, z), v);
}

inline QValue q_tilde_form(const CoefficientModel& m, long n, int N, cplx gamma, cplx z,
                           const Vec2& v) {
  if (n < 1) throw PreconditionError("q_tilde_form: n must be >= 1");
  return detail::hermitian_form(q_tilde_form_matrix(m, n, N, gamma, z), v);
}

// A real value carried as mantissa * 2^exp2, for determinants evaluated far
// outside the elliptic region where the true value leaves binary64 range.
struct ScaledReal {
  double mantissa = 0.0;
  long exp2 = 0;

  double value() const {
    if (mantissa == 0.0) return 0.0;
    long e = exp2 < -4000 ? -4000 : (exp2 > 4000 ? 4000 : exp2);
    return std::ldexp(mantissa, int(e));  // saturates to +-inf / 0 honestly
  }
  double log_abs() const {
    if (mantissa == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::abs(mantissa)) + double(exp2) * kLn2;
  }
  static ScaledReal make(double v, long e) {
    if (v == 0.0) return {};
    int k = 0;
    double mant = std::frexp(v, &k);
    return {mant, e + k};
  }
};

// relative gap between two scaled reals, in units of the larger one
inline double rel_gap(const ScaledReal& a, const ScaledReal& b) {
  if (a.mantissa == 0.0 && b.mantissa == 0.0) return 0.0;
  if (a.mantissa == 0.0 || b.mantissa == 0.0) return 1.0;
  long de = b.exp2 - a.exp2;
  if (de > 60 || de < -60) return std::numeric_limits<double>::infinity();
  double bv = std::ldexp(b.mantissa, int(de));
  return std::abs(a.mantissa - bv) / std::max(std::abs(a.mantissa), std::abs(bv));
}

namespace detail {
// |a_{n+N-1}| Q(pair) in ledger form.  Realness is enforced: the form is
// Hermitian, so an imaginary residue above 1e-6 of the form scale means
// gamma or z is off an admissible line.
inline ScaledReal turan_from_pair(const CoefficientModel& m, long n, int N, const Mat2& form,
                                  const TrajectorySample& s, double* residue_out = nullptr) {
  double mxv = std::max(std::abs(s.u_prev), std::abs(s.u_curr));
  if (mxv == 0.0) {
    if (residue_out) *residue_out = 0.0;
    return {};
  }
  int k = std::ilogb(mxv);
  Vec2 vh{ldexp_c(s.u_prev, -k), ldexp_c(s.u_curr, -k)};
  QValue q = hermitian_form(form, vh);
  if (residue_out) *residue_out = q.imag_residue;
  if (q.imag_residue > 1e-6)
    throw RealnessViolation("turan: imaginary residue " + std::to_string(q.imag_residue) +
                            " at n=" + std::to_string(n));
  return ScaledReal::make(q.value * std::abs(m.a(n + N - 1)), 2 * (k + s.scale_exp));
}
}  // namespace detail

// Shifted Turan determinant S_n = |a_{n+N-1}| Q_n((u_{n-1}, u_n)) in ledger
// form; homogeneous of degree 2 in the initial condition.
inline ScaledReal turan_scaled(const CoefficientModel& m, long n, int N, cplx gamma, cplx z,
                               const EigenvectorTrajectory& traj) {
  if (n < 1) throw PreconditionError("turan: n must be >= 1");
  return detail::turan_from_pair(m, n, N, q_form_matrix(m, n, N, gamma, z), traj.pair_at(n));
}

inline double turan(const CoefficientModel& m, long n, int N, cplx gamma, cplx z,
                    const EigenvectorTrajectory& traj) {
  return turan_scaled(m, n, N, gamma, z, traj).value();
}

// The same determinant evaluated through the alternative form at the
// advanced pair (u_{n+N-1}, u_{n+N}); agrees with turan() identically.
inline ScaledReal turan_tilde_scaled(const CoefficientModel& m, long n, int N, cplx gamma,
                                     cplx z, const EigenvectorTrajectory& traj) {
  if (n < 1) throw PreconditionError("turan_tilde: n must be >= 1");
  return detail::turan_from_pair(m, n, N, q_tilde_form_matrix(m, n, N, gamma, z),
                                 traj.pair_at(n + N));
}

inline double turan_tilde(const CoefficientModel& m, long n, int N, cplx gamma, cplx z,
                          const EigenvectorTrajectory& traj) {
  return turan_tilde_scaled(m, n, N, gamma, z, traj).value();
}

// The same quantity written directly in eigenvector coordinates:
// Re(conj(gamma) a_{n+N-1} (conj(u_n) u_{n+N-1} - conj(u_{n-1}) u_{n+N})).
inline double turan_intro(const CoefficientModel& m, long n, int N, cplx gamma,
                          const EigenvectorTrajectory& traj) {
  if (n < 1) throw PreconditionError("turan_intro: n must be >= 1");
  const TrajectorySample& s1 = traj.pair_at(n);
  const TrajectorySample& s2 = traj.pair_at(n + N);
  double m1 = std::max(std::abs(s1.u_prev), std::abs(s1.u_curr));
  double m2 = std::max(std::abs(s2.u_prev), std::abs(s2.u_curr));
  if (m1 == 0.0 || m2 == 0.0) return 0.0;
  int k1 = std::ilogb(m1), k2 = std::ilogb(m2);
  Vec2 v1{ldexp_c(s1.u_prev, -k1), ldexp_c(s1.u_curr, -k1)};
  Vec2 v2{ldexp_c(s2.u_prev, -k2), ldexp_c(s2.u_curr, -k2)};
  cplx w = std::conj(v1.y) * v2.x - std::conj(v1.x) * v2.y;
  cplx a = m.a(n + N - 1);
  double aa = std::abs(a);
  int ea = 0;
  double am = std::frexp(aa, &ea);
  double val = (std::conj(gamma) * (a / aa) * w).real();
  return std::ldexp(val * am, ea + int(k1 + s1.scale_exp + k2 + s2.scale_exp));
}

// C_n(z) = a_{n+2N-1} E X_{n+N}(z) - a_{n+N-1} (a_{n+N-1}/a_{n-1})* E conj(X_n(z)).
// Drives the increment S_{n+N} - S_n; identically zero for constant real
// coefficients at real z.
inline Mat2 c_matrix(const CoefficientModel& m, long n, int N, cplx z) {
  if (n < 1) throw PreconditionError("c_matrix: n must be >= 1");
  cplx a2 = m.a(n + 2 * N - 1), a1 = m.a(n + N - 1), a0 = m.a(n - 1);
  Mat2 lead = a2 * (kE * n_step(m, n + N, N, z));
  Mat2 lag = (a1 * std::conj(a1 / a0)) * (kE * n_step(m, n, N, z).conjugate());
  return lead - lag;
}

// -- Turan traces ----------------------------------------------------------------

struct TuranPoint {
  long block;           // S is taken at matrix index block*N + offset
  double s;             // normalized by ||alpha||^2
  double f;             // relative increment (S_next - S)/S; NaN at the end
  double imag_residue;  // relative imaginary residue of the form value
};

struct TuranTrace {
  int offset = 0, period = 1;
  cplx gamma{1.0}, z{};
  Vec2 alpha{1.0, 0.0};
  std::vector<TuranPoint> points;

  double g = 0.0;         // limit estimate: final recorded value
  double residual = 0.0;  // sum of |S_{n+1}-S_n| over the last decade
  int sign = 0;
  long burn_in = 0;          // first block from which the sign stays constant
  bool sign_change = false;  // sign flipped within the last decade
  bool degenerate_form = false;  // |S| decays against |a| ||u pair||^2
  bool non_convergent = false;   // flattening criterion failed (or degenerate)
  double flatten_tol = 1e-3;
  double max_imag_residue = 0.0;
};

// Records S_{nN+i} for n = 1..n_max along one trajectory, with convergence,
// sign and non-degeneracy diagnostics.  S values are reported normalized by
// ||alpha||^2.
inline TuranTrace turan_trace(const CoefficientModel& m, int offset, int N, cplx gamma, cplx z,
                              Vec2 alpha, long n_max, double flatten_tol = 1e-3) {
  if (N < 1 || offset < 0) throw PreconditionError("turan_trace: bad offset/period");
  if (n_max < 10) throw PreconditionError("turan_trace: n_max must be >= 10");
  TuranTrace tr;
  tr.offset = offset;
  tr.period = N;
  tr.gamma = gamma;
  tr.z = z;
  tr.alpha = alpha;
  tr.flatten_tol = flatten_tol;
  const double alpha2 = alpha.norm2();

  std::vector<double> log_rho_x, log_rho_y;  // non-degeneracy fit
  walk_recurrence(m, z, alpha, n_max * N + offset, [&](long idx, const cplx& up, const cplx& uc,
                                                       long e) {
    if (idx < 1 || (idx - offset) % N != 0) return;
    long blk = (idx - offset) / N;
    if (blk < 1 || blk > n_max) return;
    TrajectorySample s{idx, up, uc, e};
    double residue = 0.0;
    ScaledReal sv =
        detail::turan_from_pair(m, idx, N, q_form_matrix(m, idx, N, gamma, z), s, &residue);
    double val = sv.value() / alpha2;
    tr.points.push_back({blk, val, std::numeric_limits<double>::quiet_NaN(), residue});
    tr.max_imag_residue = std::max(tr.max_imag_residue, residue);
    double log_pair = EigenvectorTrajectory::log_norm2(s) + std::log(std::abs(m.a(idx + N - 1))) -
                      std::log(alpha2);
    if (val != 0.0) {
      log_rho_x.push_back(std::log(double(blk)));
      log_rho_y.push_back(std::log(std::abs(val)) - log_pair);
    }
  });

  if (tr.points.empty()) throw PreconditionError("turan_trace: no blocks recorded");
  for (size_t k = 0; k + 1 < tr.points.size(); ++k) {
    double s = tr.points[k].s;
    tr.points[k].f = s != 0.0 ? (tr.points[k + 1].s - s) / s
                              : std::numeric_limits<double>::infinity();
  }

  tr.g = tr.points.back().s;
  tr.sign = tr.g > 0.0 ? 1 : (tr.g < 0.0 ? -1 : 0);

  long tail_from = std::max<long>(1, n_max / 10);
  bool tail_zero = false;
  for (size_t k = 0; k + 1 < tr.points.size(); ++k) {
    if (tr.points[k + 1].block < tail_from) continue;
    tr.residual += std::abs(tr.points[k + 1].s - tr.points[k].s);
  }
  for (const auto& p : tr.points)
    if (p.block >= tail_from && p.s == 0.0) tail_zero = true;

  // longest suffix of constant sign
  tr.burn_in = tr.points.back().block;
  for (size_t k = tr.points.size(); k-- > 0;) {
    int sgn = tr.points[k].s > 0.0 ? 1 : (tr.points[k].s < 0.0 ? -1 : 0);
    if (sgn != tr.sign) break;
    tr.burn_in = tr.points[k].block;
  }
  tr.sign_change = tr.burn_in > tail_from || tr.sign == 0;

  double rho_slope = ls_slope(log_rho_x, log_rho_y);
  tr.degenerate_form = tail_zero || rho_slope < -0.5;
  tr.non_convergent =
      tr.degenerate_form || tr.g == 0.0 || tr.residual > flatten_tol * std::abs(tr.g);
  return tr;
}

// -- twisted total variation -------------------------------------------------------

struct TwistedVariationReport {
  int offset = 0, period = 1;
  long n_max = 0;
  double partial_sum = 0.0;
  SeriesVerdict verdict;
  std::vector<std::pair<long, double>> checkpoints;  // (n, partial sum), dyadic
};

namespace detail {
// Partial sums of ||x_{(n+1)N+i} - conj(x_{nN+i})|| for n = 1..n_max-1.
inline TwistedVariationReport twisted_variation_terms(const std::function<double(long)>& term,
                                                      int offset, int N, long n_max) {
  if (n_max < 2) throw PreconditionError("twisted_variation: n_max must be >= 2");
  TwistedVariationReport rep;
  rep.offset = offset;
  rep.period = N;
  rep.n_max = n_max;
  double sum = 0.0;
  long next_cp = 2;
  for (long n = 1; n + 1 <= n_max; ++n) {
    sum += term(n);
    if (n + 1 >= next_cp) {
      rep.checkpoints.emplace_back(n + 1, sum);
      next_cp *= 2;
    }
  }
  rep.partial_sum = sum;
  rep.verdict = classify_series(term, 1, n_max - 1);
  rep.verdict.partial_sum = sum;
  return rep;
}
}  // namespace detail

inline TwistedVariationReport twisted_variation(const std::function<cplx(long)>& x, int offset,
                                                int N, long n_max) {
  return detail::twisted_variation_terms(
      [&, offset, N](long n) {
        return std::abs(x((n + 1) * N + offset) - std::conj(x(n * N + offset)));
      },
      offset, N, n_max);
}

inline TwistedVariationReport twisted_variation_mat(const std::function<Mat2(long)>& x,
                                                    int offset, int N, long n_max) {
  return detail::twisted_variation_terms(
      [&, offset, N](long n) {
        return (x((n + 1) * N + offset) - x(n * N + offset).conjugate()).op_norm();
      },
      offset, N, n_max);
}

}  // namespace jspec
