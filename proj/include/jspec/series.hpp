// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "jspec/errors.hpp"

namespace jspec {

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  if (n < 2 || y.size() != n) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  double den = double(n) * sxx - sx * sx;
  if (den == 0.0) return 0.0;
  return (double(n) * sxy - sx * sy) / den;
}

// Finite-sample verdict on a nonnegative-term series.  Asymptotics cannot be
// decided from finitely many terms, so the verdict is a diagnostic: dyadic
// tail windows are fitted in log-log scale and anything within the margin is
// inconclusive unless the windows carry equal mass, the signature of
// logarithmic (harmonic-type) divergence.
struct SeriesVerdict {
  enum class Kind { Diverging, Converging, Inconclusive };
  Kind kind = Kind::Inconclusive;
  double window_slope = 0.0;   // d log(window sum) / d log n over tail windows
  double term_exponent = 0.0;  // window_slope - 1; terms ~ n^term_exponent
  bool boundary = false;       // decided at (or inside) the margin
  double partial_sum = 0.0;    // over the whole evaluated range; may be +inf

  bool summable() const { return kind == Kind::Converging; }
  bool diverging() const { return kind == Kind::Diverging; }
  const char* name() const {
    switch (kind) {
      case Kind::Diverging:
        return "diverging";
      case Kind::Converging:
        return "converging";
      default:
        return "inconclusive";
    }
  }
};

// log_term(k) may be -inf for zero terms.  k runs over [k0, k1].
inline SeriesVerdict classify_series_log(const std::function<double(long)>& log_term, long k0,
                                         long k1, double margin = 0.1) {
  if (k1 < k0) throw EmptyRange("classify_series: empty index range");
  const double neg_inf = -std::numeric_limits<double>::infinity();

  SeriesVerdict v;
  double sum = 0.0;
  for (long k = k0; k <= k1; ++k) sum += std::exp(log_term(k));
  v.partial_sum = sum;

  // Dyadic tail windows (lo, hi], newest first, staying within roughly the
  // last decade (down to k1/16).
  std::vector<double> xs, ys;
  int windows_formed = 0;
  bool newest_zero = false;
  long hi = k1;
  for (int j = 0; j < 6 && hi > k0 + 3; ++j) {
    long lo = std::max(k0, hi / 2);
    double mx = neg_inf;
    for (long k = lo + 1; k <= hi; ++k) mx = std::max(mx, log_term(k));
    double lw = neg_inf;
    if (mx != neg_inf) {
      double s = 0.0;
      for (long k = lo + 1; k <= hi; ++k) s += std::exp(log_term(k) - mx);
      lw = mx + std::log(s);
    }
    if (lw != neg_inf) {
      xs.push_back(0.5 * (std::log(double(lo + 1)) + std::log(double(hi))));
      ys.push_back(lw);
    } else if (windows_formed == 0) {
      newest_zero = true;
    }
    ++windows_formed;
    hi = lo;
    if (hi * 16 < k1) break;
  }

  if (windows_formed == 0) {
    v.kind = SeriesVerdict::Kind::Inconclusive;
    v.boundary = true;
    return v;
  }
  if (ys.empty() || newest_zero) {
    // Tail is identically zero: converged, with no meaningful exponent.
    v.kind = SeriesVerdict::Kind::Converging;
    v.window_slope = neg_inf;
    v.term_exponent = neg_inf;
    return v;
  }
  if (ys.size() < 3) {
    v.kind = SeriesVerdict::Kind::Inconclusive;
    v.boundary = true;
    return v;
  }

  double q = ls_slope(xs, ys);
  v.window_slope = q;
  v.term_exponent = q - 1.0;
  if (q < -margin) {
    v.kind = SeriesVerdict::Kind::Converging;
  } else if (q > margin) {
    v.kind = SeriesVerdict::Kind::Diverging;
  } else {
    // Equal window mass per doubling is how a logarithmically divergent
    // series looks at any finite scale.
    double mn = ys[0], mxv = ys[0];
    for (double y : ys) {
      mn = std::min(mn, y);
      mxv = std::max(mxv, y);
    }
    if (mxv - mn <= 0.05) {
      v.kind = SeriesVerdict::Kind::Diverging;
      v.boundary = true;
    } else {
      v.kind = SeriesVerdict::Kind::Inconclusive;
      v.boundary = true;
    }
  }
  return v;
}

inline SeriesVerdict classify_series(const std::function<double(long)>& term, long k0, long k1,
                                     double margin = 0.1) {
  return classify_series_log([&](long k) { return std::log(term(k)); }, k0, k1, margin);
}

}  // namespace jspec
