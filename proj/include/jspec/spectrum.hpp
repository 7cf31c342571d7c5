// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "jspec/mat2.hpp"
#include "jspec/parallel.hpp"
#include "jspec/sequences.hpp"

namespace jspec {

// value = mantissa * 2^exp2 with |mantissa| in [1, 2) (subset of the
// documented [0.5, 2)) or mantissa = 0.
struct Scaled {
  cplx mantissa{};
  long exp2 = 0;

  static Scaled make(cplx v, long e = 0) {
    if (v == 0.0) return {cplx(0.0), 0};
    int k = std::ilogb(std::abs(v));
    return {ldexp_c(v, -k), e + k};
  }
  bool is_zero() const { return mantissa == 0.0; }
  double log2_abs() const {
    if (is_zero()) return -std::numeric_limits<double>::infinity();
    return std::log2(std::abs(mantissa)) + double(exp2);
  }
  double arg() const { return std::arg(mantissa); }
};

struct CharPolyEval {
  Scaled p, dp;
};

// det(z I - J_dim) via the three-term determinant recurrence
// p_k = (z - b_{k-1}) p_{k-1} - a_{k-2}^2 p_{k-2}, with p_0 = 1 and
// p_1 = z - b_0; valid because the matrix carries equal sub/super-diagonals.
// The shared power-of-two ledger keeps the values representable at any dim.
inline CharPolyEval charpoly_eval(const CoefficientModel& m, int dim, cplx z) {
  if (dim < 1) throw PreconditionError("charpoly: dim must be >= 1");
  cplx pm = 1.0, pc = z - m.b(0);
  cplx dpm = 0.0, dpc = 1.0;
  long e = 0;
  for (int k = 2; k <= dim; ++k) {
    cplx zb = z - m.b(k - 1);
    cplx a = m.a(k - 2);
    cplx a2 = a * a;
    cplx pn = zb * pc - a2 * pm;
    cplx dpn = pc + zb * dpc - a2 * dpm;
    pm = pc;
    pc = pn;
    dpm = dpc;
    dpc = dpn;
    double mx = std::max(std::abs(pm), std::abs(pc));
    if (mx != 0.0 && (mx > 0x1p+256 || mx < 0x1p-256)) {
      int s = std::ilogb(mx);
      pm = ldexp_c(pm, -s);
      pc = ldexp_c(pc, -s);
      dpm = ldexp_c(dpm, -s);
      dpc = ldexp_c(dpc, -s);
      e += s;
    }
  }
  return {Scaled::make(pc, e), Scaled::make(dpc, e)};
}

inline Scaled charpoly(const CoefficientModel& m, int dim, cplx z) {
  return charpoly_eval(m, dim, z).p;
}

struct Box {
  double x0, x1, y0, y1;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  cplx center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= x0 - slack && z.real() <= x1 + slack && z.imag() >= y0 - slack &&
           z.imag() <= y1 + slack;
  }
};

namespace detail {

inline constexpr double kPi = 3.14159265358979323846;

// Total argument change of the characteristic polynomial along the segment
// z0 -> z1.  Two refinement rules guard the winding against phase aliasing:
// consecutive phase jumps must stay within pi/2, and a segment may not be
// longer than half the distance-to-zero proxy |p/p'| at either endpoint.
// The proxy shrinks as probes approach a zero cluster, so bisection cascades
// exactly where the phase turns fast; persistent refinement means the
// contour passes arbitrarily close to a zero.
inline double arg_sweep(const CoefficientModel& m, int dim, cplx z0, cplx z1, long* evals) {
  const double seg_len = std::abs(z1 - z0);
  struct Probe {
    double theta;
    double reach;  // |p/p'|, +inf when p' vanishes
  };
  auto probe = [&](double t) -> Probe {
    CharPolyEval e = charpoly_eval(m, dim, z0 + t * (z1 - z0));
    if (evals) ++*evals;
    if (e.p.is_zero()) throw RootOnBoundary("charpoly vanishes on the contour");
    double reach = std::numeric_limits<double>::infinity();
    if (!e.dp.is_zero()) {
      double lg = e.p.log2_abs() - e.dp.log2_abs();
      reach = std::exp2(std::min(lg, 1000.0));
    }
    return {e.p.arg(), reach};
  };
  constexpr int kInit = 8;
  constexpr int kMaxDepth = 45;
  struct Seg {
    double t0, t1;
    Probe p0, p1;
    int depth;
  };
  std::vector<Seg> stack;
  double prev_t = 0.0;
  Probe prev = probe(0.0);
  for (int k = 1; k <= kInit; ++k) {
    double t = double(k) / kInit;
    Probe p = probe(t);
    stack.push_back({prev_t, t, prev, p, 0});
    prev_t = t;
    prev = p;
  }
  double total = 0.0;
  while (!stack.empty()) {
    Seg s = stack.back();
    stack.pop_back();
    double d = std::remainder(s.p1.theta - s.p0.theta, 2.0 * kPi);
    double len = (s.t1 - s.t0) * seg_len;
    bool too_long = len > 0.5 * std::min(s.p0.reach, s.p1.reach);
    if (std::abs(d) <= 0.5 * kPi && !too_long) {
      total += d;
      continue;
    }
    if (s.depth >= kMaxDepth)
      throw RootOnBoundary("phase refinement exhausted: zero within ~2^-45 of the contour");
    double tm = 0.5 * (s.t0 + s.t1);
    Probe pm = probe(tm);
    stack.push_back({s.t0, tm, s.p0, pm, s.depth + 1});
    stack.push_back({tm, s.t1, pm, s.p1, s.depth + 1});
  }
  return total;
}

}  // namespace detail

// Number of zeros of det(z I - J_dim) inside the box, counted with
// multiplicity, by the argument principle over the rectangle boundary.
// Throws RootOnBoundary when a zero (or near-zero) sits on the contour;
// the caller perturbs the box.
inline int winding_count(const CoefficientModel& m, int dim, const Box& box,
                         long* evals = nullptr) {
  cplx c1{box.x0, box.y0}, c2{box.x1, box.y0}, c3{box.x1, box.y1}, c4{box.x0, box.y1};
  double total = detail::arg_sweep(m, dim, c1, c2, evals) +
                 detail::arg_sweep(m, dim, c2, c3, evals) +
                 detail::arg_sweep(m, dim, c3, c4, evals) +
                 detail::arg_sweep(m, dim, c4, c1, evals);
  double w = total / (2.0 * detail::kPi);
  long count = std::lround(w);
  if (count < 0 || std::abs(w - double(count)) > 0.25)
    throw RootOnBoundary("inconsistent winding number " + std::to_string(w));
  return int(count);
}

struct Root {
  cplx value{};
  int multiplicity = 1;
  double residual = 0.0;  // |p/p'| at the reported point: a Newton-step length
};

struct SpectrumEstimate {
  int dim = 0;
  Box box{};
  std::vector<Root> roots;
  bool partial = false;     // budget ran out before every cell was resolved
  long winding_evals = 0;   // charpoly evaluations spent on contours

  int total_multiplicity() const {
    int s = 0;
    for (const auto& r : roots) s += r.multiplicity;
    return s;
  }
};

namespace detail {

inline cplx scaled_ratio(const Scaled& num, const Scaled& den) {
  if (den.is_zero()) throw Error("scaled_ratio: zero denominator");
  long sh = num.exp2 - den.exp2;
  if (sh > 2000) sh = 2000;
  if (sh < -2000) sh = -2000;
  return ldexp_c(num.mantissa / den.mantissa, int(sh));
}

// Newton iteration from the cell centre using the differentiated recurrence.
// Fails (returns false) when the iterate escapes the inflated cell or stalls;
// the caller then keeps subdividing.
inline bool newton_refine(const CoefficientModel& m, int dim, const Box& cell, double tol,
                          Root& out) {
  cplx zc = cell.center();
  double wander = std::max(cell.width(), cell.height()) + tol;
  cplx zz = zc;
  for (int it = 0; it < 60; ++it) {
    CharPolyEval e = charpoly_eval(m, dim, zz);
    if (e.p.is_zero()) {
      out = {zz, 1, 0.0};
      return cell.contains(zz, tol);
    }
    if (e.dp.is_zero()) return false;
    cplx step = scaled_ratio(e.p, e.dp);
    if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return false;
    zz -= step;
    if (!cell.contains(zz, wander)) return false;
    if (std::abs(step) <= 0.25 * tol) {
      CharPolyEval f = charpoly_eval(m, dim, zz);
      double res = f.p.is_zero() ? 0.0 : std::abs(scaled_ratio(f.p, f.dp));
      out = {zz, 1, res};
      // accept only a zero that sits in this cell; anything else means the
      // iteration drifted to a neighbour and the cell must be subdivided
      return cell.contains(zz, tol);
    }
  }
  return false;
}

}  // namespace detail

// Approximate eigenvalues of the dim x dim truncation inside the box:
// recursive quadrisection driven by winding counts isolates the zeros, then
// Newton refinement polishes simple ones.  Cells below tol holding several
// zeros are reported once with their multiplicity.  Split lines that hit a
// zero are jittered and retried.
inline SpectrumEstimate finite_section(const CoefficientModel& m, int dim, Box box, double tol,
                                       long max_evals = 40000000) {
  if (dim < 1 || dim > 2000)
    throw PreconditionError("finite_section: dim must lie in 1..2000");
  if (!(tol > 0.0)) throw PreconditionError("finite_section: tol must be positive");

  SpectrumEstimate est;
  est.dim = dim;
  est.box = box;

  struct Cell {
    Box b;
    int count;
  };
  long evals = 0;
  int top = winding_count(m, dim, box, &evals);  // RootOnBoundary goes to the caller
  std::deque<Cell> work{{box, top}};

  // deterministic jitter fractions for split lines that land on a zero
  const double jitter[6] = {0.5, 0.53137515, 0.46567712, 0.55821359, 0.42393792, 0.51234567};

  while (!work.empty()) {
    if (evals > max_evals) {
      est.partial = true;
      break;
    }
    Cell c = work.front();
    work.pop_front();
    if (c.count == 0) continue;
    if (c.count == 1) {
      Root r;
      if (detail::newton_refine(m, dim, c.b, tol, r) && box.contains(r.value, tol)) {
        est.roots.push_back(r);
        continue;
      }
      // fall through to subdivision when Newton wandered off
    }
    if (std::max(c.b.width(), c.b.height()) < tol) {
      est.roots.push_back({c.b.center(), c.count, std::max(c.b.width(), c.b.height())});
      continue;
    }
    bool split_done = false;
    for (int ja = 0; ja < 6 && !split_done; ++ja) {
      for (int jb = 0; jb < 6 && !split_done; ++jb) {
        double mx = c.b.x0 + jitter[ja] * c.b.width();
        double my = c.b.y0 + jitter[jb] * c.b.height();
        Box q[4] = {{c.b.x0, mx, c.b.y0, my},
                    {mx, c.b.x1, c.b.y0, my},
                    {c.b.x0, mx, my, c.b.y1},
                    {mx, c.b.x1, my, c.b.y1}};
        try {
          int sum = 0;
          Cell sub[4];
          for (int k = 0; k < 4; ++k) {
            sub[k] = {q[k], winding_count(m, dim, q[k], &evals)};
            sum += sub[k].count;
          }
          if (sum != c.count)
            throw RootOnBoundary("winding counts not additive across the split");
          for (int k = 0; k < 4; ++k)
            if (sub[k].count > 0) work.push_back(sub[k]);
          split_done = true;
        } catch (const RootOnBoundary&) {
          // try the next jitter pair
        }
      }
    }
    if (!split_done)
      throw RootOnBoundary("could not find a zero-free split for a cell");
  }

  est.winding_evals = evals;
  std::sort(est.roots.begin(), est.roots.end(), [](const Root& a, const Root& b) {
    if (a.value.real() != b.value.real()) return a.value.real() < b.value.real();
    return a.value.imag() < b.value.imag();
  });
  return est;
}

}  // namespace jspec
