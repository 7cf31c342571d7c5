// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "jspec/mat2.hpp"
#include "jspec/parallel.hpp"
#include "jspec/sequences.hpp"

namespace jspec {

// One-step transfer matrix B_j(z) = [[0, 1], [-a_{j-1}/a_j, (z - b_j)/a_j]].
// B_j maps (u_{j-1}, u_j) to (u_j, u_{j+1}); at j = 0 the a_{-1} convention
// of the model applies.
inline Mat2 one_step(const CoefficientModel& m, long j, cplx z) {
  if (j < 0) throw PreconditionError("one_step: j must be >= 0");
  cplx aj = m.a(j);
  return {0.0, 1.0, -m.a(j - 1) / aj, (z - m.b(j)) / aj};
}

// N-step product X_n(z) = B_{n+N-1} ... B_n, n >= 1, so
// (u_{n+N-1}, u_{n+N}) = X_n(z) (u_{n-1}, u_n).
inline Mat2 n_step(const CoefficientModel& m, long n, int N, cplx z) {
  if (n < 1) throw PreconditionError("n_step: n must be >= 1");
  if (N < 1) throw PreconditionError("n_step: N must be >= 1");
  Mat2 x = one_step(m, n, z);
  for (long j = n + 1; j < n + N; ++j) x = one_step(m, j, z) * x;
  return x;
}

inline Mat2 one_step_limit(const PeriodicPair& p, long j, cplx x) {
  cplx aj = p.alpha(j);
  return {0.0, 1.0, -p.alpha(j - 1) / aj, (x - p.beta(j)) / aj};
}

// Periodic limit matrix at offset i: the N-step product of the cyclic
// one-step factors starting at i.
inline Mat2 periodic_limit(const PeriodicPair& p, long i, cplx x) {
  Mat2 m = one_step_limit(p, i, x);
  for (long j = i + 1; j < i + p.period(); ++j) m = one_step_limit(p, j, x) * m;
  return m;
}

// Limit of the (N+2)-step blend transfer matrix at offset i in 1..N.  The
// middle factor is the limit of the three steps crossing the unbounded pair;
// its lower-left entry is +alpha_{N-1}/alpha_0, which is what the direct
// limit of the three-step product gives and what makes det = 1.
inline Mat2 blend_limit(const PeriodicPair& p, cplx delta, int i, cplx z) {
  const int n_per = p.period();
  if (i < 1 || i > n_per)
    throw OffsetOutOfRange("blend_limit: offset " + std::to_string(i) + " outside 1.." +
                           std::to_string(n_per));
  cplx a0 = p.alpha(0);
  Mat2 c{0.0, -1.0, p.alpha(n_per - 1) / a0, -(2.0 * z - p.beta(0) - delta) / a0};
  Mat2 right = Mat2::identity();
  for (long j = i; j <= n_per - 1; ++j) right = one_step_limit(p, j, z) * right;
  Mat2 left = Mat2::identity();
  for (long j = 1; j <= i - 1; ++j) left = one_step_limit(p, j, z) * left;
  return left * c * right;
}

// -- limit families -----------------------------------------------------------

// The analytically known family of limit transfer matrices of a model, used
// for Lambda scans.  Scans never operate on finite-n products: membership in
// Lambda is a property of the limit alone.
struct LimitFamily {
  enum class Kind { Periodic, Modulated, Blend };
  Kind kind;
  PeriodicPair base;
  cplx delta{0.0};        // blend only: limit of the even diagonal entries
  double delta_drift = 0.0;

  int min_offset() const { return kind == Kind::Blend ? 1 : 0; }
  int max_offset() const { return kind == Kind::Blend ? base.period() : base.period() - 1; }
  bool z_independent() const { return kind == Kind::Modulated; }

  Mat2 matrix(int i, cplx z) const {
    switch (kind) {
      case Kind::Periodic:
        return periodic_limit(base, i, z);
      case Kind::Modulated:
        return periodic_limit(base, i, 0.0);
      case Kind::Blend:
        return blend_limit(base, delta, i, z);
    }
    return Mat2::identity();
  }
};

inline std::optional<LimitFamily> limit_family(const CoefficientModel& m) {
  const ModelSpec& s = m.spec();
  if (std::holds_alternative<ExplicitTable>(s)) return std::nullopt;
  if (const auto* p = std::get_if<AdditivePerturbation>(&s)) return limit_family(*p->inner);
  if (const auto* p = std::get_if<AsymptoticallyPeriodic>(&s))
    return LimitFamily{LimitFamily::Kind::Periodic, p->base};
  if (const auto* p = std::get_if<PeriodicallyModulated>(&s))
    return LimitFamily{LimitFamily::Kind::Modulated, p->base};
  if (const auto* p = std::get_if<PowerLawExample>(&s))
    return LimitFamily{LimitFamily::Kind::Modulated, p->base};
  const auto& b = std::get<Blend>(s);
  LimitFamily f{LimitFamily::Kind::Blend, b.base};
  if (b.d_tilde) {
    cplx far = (*b.d_tilde)(2000000);
    cplx near = (*b.d_tilde)(200000);
    f.delta = far;
    f.delta_drift = std::abs(far - near);
  }
  return f;
}

// Numerical estimate of gamma = lim a_{nN+i-1}/|a_{nN+i-1}| together with its
// drift over the preceding decade and the decade before that.  A phase that
// converges slowly (say like n^-1/2) shows a finite drift that contracts
// decade over decade; a phase without a limit shows a drift that does not.
struct GammaEstimate {
  cplx value{1.0};
  double drift = 0.0;       // between n_ref/10 and n_ref
  double drift_prev = 0.0;  // between n_ref/100 and n_ref/10

  bool stable() const { return drift <= 1e-3 || drift <= 0.5 * drift_prev; }
};

inline GammaEstimate estimate_gamma(const CoefficientModel& m, int offset, int N,
                                    long n_ref = 1000000) {
  auto unit = [&](long n) {
    cplx a = m.eval(n * N + offset - 1).a;  // n >= 1, so the index is >= N-1
    return a / std::abs(a);
  };
  GammaEstimate g;
  g.value = unit(n_ref);
  cplx mid = unit(std::max<long>(n_ref / 10, 1));
  cplx old = unit(std::max<long>(n_ref / 100, 1));
  g.drift = std::abs(g.value - mid);
  g.drift_prev = std::abs(mid - old);
  // snap to exactly unit modulus
  g.value /= std::abs(g.value);
  return g;
}

// -- Lambda scans -------------------------------------------------------------

struct LambdaLine {
  cplx gamma{1.0};  // unimodular direction; samples are z = gamma * t
  double t0 = -4.0, t1 = 4.0, step = 1e-3;
};

struct LambdaSample {
  double t;
  cplx tr, det, discr;
  bool in_lambda;
};

struct LambdaInterval {
  double left, right;
  bool single_sample = false;
};

struct LambdaScanResult {
  LambdaLine line;
  double realness_tol = 1e-8;
  int offset = 0;
  bool limit_constant = false;  // modulated families: one matrix for every z
  std::vector<LambdaInterval> intervals;
  std::vector<LambdaSample> samples;

  bool empty() const { return intervals.empty(); }
  const LambdaInterval* widest() const {
    const LambdaInterval* best = nullptr;
    for (const auto& iv : intervals)
      if (!best || iv.right - iv.left > best->right - best->left) best = &iv;
    return best;
  }
};

// Samples z = gamma * t over the line and marks z in Lambda when the limit
// matrix is real, invertible and elliptic within the realness tolerance:
// max |Im entry| <= tol, |det| > tol, |Im discr| <= tol, Re discr < -tol.
// Samples with |discr| below tolerance sit at band edges and stay outside.
inline LambdaScanResult lambda_scan(const std::function<Mat2(cplx)>& limit,
                                    const LambdaLine& line, double tol = 1e-8) {
  if (!(line.step > 0.0)) throw EmptyRange("lambda_scan: step must be positive");
  if (!(line.t1 >= line.t0)) throw EmptyRange("lambda_scan: empty t range");
  long count = long(std::floor((line.t1 - line.t0) / line.step + 1e-9)) + 1;

  LambdaScanResult res;
  res.line = line;
  res.realness_tol = tol;
  res.samples.resize(size_t(count));
  parallel_for(count, [&](long k) {
    double t = line.t0 + double(k) * line.step;
    Mat2 m = limit(line.gamma * t);
    cplx d = discriminant(m);
    bool in = m.max_abs_imag() <= tol && std::abs(m.det()) > tol &&
              std::abs(d.imag()) <= tol && d.real() < -tol;
    res.samples[size_t(k)] = {t, m.trace(), m.det(), d, in};
  });

  // merge consecutive in-Lambda samples into open intervals
  size_t k = 0;
  while (k < res.samples.size()) {
    if (!res.samples[k].in_lambda) {
      ++k;
      continue;
    }
    size_t first = k;
    while (k + 1 < res.samples.size() && res.samples[k + 1].in_lambda) ++k;
    res.intervals.push_back(
        {res.samples[first].t, res.samples[k].t, first == k});
    ++k;
  }
  return res;
}

}  // namespace jspec
