// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "jspec/errors.hpp"
#include "jspec/expr.hpp"
#include "jspec/mat2.hpp"

namespace jspec {

struct Coeff {
  cplx a{}, b{};
};

// An N-periodic pair of complex sequences, indexed cyclically over all of Z.
// Every alpha entry must be nonzero.
class PeriodicPair {
 public:
  PeriodicPair(std::vector<cplx> alpha, std::vector<cplx> beta)
      : alpha_(std::move(alpha)), beta_(std::move(beta)) {
    if (alpha_.empty() || alpha_.size() != beta_.size())
      throw PreconditionError("PeriodicPair: alpha and beta must be nonempty and equally long");
    for (const cplx& a : alpha_)
      if (a == 0.0) throw ZeroOffDiagonal("PeriodicPair: zero alpha entry");
  }

  int period() const { return int(alpha_.size()); }

  cplx alpha(long n) const { return alpha_[wrap(n)]; }
  cplx beta(long n) const { return beta_[wrap(n)]; }

  const std::vector<cplx>& alpha_values() const { return alpha_; }
  const std::vector<cplx>& beta_values() const { return beta_; }

 private:
  size_t wrap(long n) const {
    long p = long(alpha_.size());
    long r = n % p;
    if (r < 0) r += p;
    return size_t(r);
  }
  std::vector<cplx> alpha_, beta_;
};

// (-1)^{floor(n/period)} for n >= 0.
inline double epsilon_sign(long n, int period) {
  return ((n / period) % 2 != 0) ? -1.0 : 1.0;
}

class CoefficientModel;
using ModelPtr = std::shared_ptr<const CoefficientModel>;

// -- model variants ----------------------------------------------------------

struct ExplicitTable {
  std::vector<cplx> a, b;
  // a_{-1} has no natural default for a table and must be supplied when needed.
  std::optional<cplx> a_minus1;
};

// a_n = alpha_n + perturb_a(n), b_n = beta_n + perturb_b(n).
struct AsymptoticallyPeriodic {
  PeriodicPair base;
  std::optional<SeqExpr> perturb_a, perturb_b;
};

// a_n = alpha_n * modulator(n), b_n = beta_n * modulator(n).
struct PeriodicallyModulated {
  PeriodicPair base;
  SeqExpr modulator;
};

// Plain mode: (a_n + x_n, b_n + y_n).  Alternating mode twists the
// perturbation onto the imaginary axis with a block-alternating sign:
// (a_n + i eps_n x_n, b_n + i eps_n y_n), eps_n = (-1)^{floor(n/N)}.
struct AdditivePerturbation {
  ModelPtr inner;
  std::optional<SeqExpr> x, y;
  bool alternating = false;
};

// Interleaves the exactly periodic pair with two unbounded entries per block
// of length N+2: slots 0..N-1 carry (alpha_i, beta_i), slot N carries
// (c(2k), d(2k)) and slot N+1 carries (c(2k+1), d(2k+1)).
struct Blend {
  PeriodicPair base;
  SeqExpr c_tilde;
  std::optional<SeqExpr> d_tilde;
};

// a_n = alpha_n (n+1)^lambda + i (-1)^{floor(n/N)} (n+1)^mu, same for b with
// beta_n; requires 0 <= mu < lambda.
struct PowerLawExample {
  PeriodicPair base;
  double lambda;
  double mu;
};

using ModelSpec = std::variant<ExplicitTable, AsymptoticallyPeriodic, PeriodicallyModulated,
                               AdditivePerturbation, Blend, PowerLawExample>;

// One (a_{kN+i}, b_{kN+i}) slot of the interleaved blend, without building the
// whole model.  i must lie in 0..N+1.
inline std::pair<cplx, cplx> blend_coeff(const PeriodicPair& base, const SeqExpr& c_tilde,
                                         const SeqExpr* d_tilde, long k, int i) {
  const int n_per = base.period();
  if (i < 0 || i > n_per + 1)
    throw SlotOutOfRange("blend_coeff: slot " + std::to_string(i) + " outside 0.." +
                         std::to_string(n_per + 1));
  if (k < 0) throw PreconditionError("blend_coeff: negative block index");
  if (i < n_per) return {base.alpha(i), base.beta(i)};
  long m = (i == n_per) ? 2 * k : 2 * k + 1;
  cplx c = c_tilde(m);
  cplx d = d_tilde ? (*d_tilde)(m) : cplx(0.0);
  return {c, d};
}

// Additive perturbation of one coefficient pair; see AdditivePerturbation.
inline Coeff perturbed_coeff(Coeff inner, cplx x, cplx y, bool alternating, long n, int period) {
  if (alternating) {
    cplx ie(0.0, epsilon_sign(n, period));
    return {inner.a + ie * x, inner.b + ie * y};
  }
  return {inner.a + x, inner.b + y};
}

// A lazily evaluated coefficient model.  Evaluation is pure and deterministic;
// values are cached per index behind a shared mutex so trajectories, transfer
// products and traces can revisit indices cheaply and concurrently.
class CoefficientModel {
 public:
  explicit CoefficientModel(ModelSpec spec) : spec_(std::move(spec)) { validate(); }

  CoefficientModel(const CoefficientModel& o) : spec_(o.spec_) {}
  CoefficientModel& operator=(const CoefficientModel&) = delete;

  const ModelSpec& spec() const { return spec_; }

  // Uncached evaluation; throws ZeroOffDiagonal when the off-diagonal vanishes.
  Coeff eval(long n) const {
    if (n < 0) throw PreconditionError("CoefficientModel::eval: negative index");
    Coeff c = std::visit([&](const auto& s) { return eval_spec(s, n); }, spec_);
    if (c.a == 0.0)
      throw ZeroOffDiagonal("a(" + std::to_string(n) + ") = 0");
    if (!std::isfinite(c.a.real()) || !std::isfinite(c.a.imag()) ||
        !std::isfinite(c.b.real()) || !std::isfinite(c.b.imag()))
      throw Error("non-finite coefficient at n=" + std::to_string(n));
    return c;
  }

  Coeff at(long n) const {
    if (n < 0) throw PreconditionError("CoefficientModel::at: negative index");
    {
      std::shared_lock lk(mu_);
      if (size_t(n) < cache_.size()) return cache_[size_t(n)];
    }
    std::unique_lock lk(mu_);
    while (cache_.size() <= size_t(n)) cache_.push_back(eval(long(cache_.size())));
    return cache_[size_t(n)];
  }

  // a_n with the n = -1 convention: explicit tables must supply it, every
  // other variant falls back to the periodic limit value alpha_{N-1}.
  cplx a(long n) const {
    if (n == -1) return a_minus1();
    return at(n).a;
  }
  cplx b(long n) const { return at(n).b; }

  cplx a_minus1() const {
    if (const auto* t = std::get_if<ExplicitTable>(&spec_)) {
      if (!t->a_minus1) throw IndexOutOfTable("ExplicitTable: a(-1) was not supplied");
      return *t->a_minus1;
    }
    if (const auto* p = std::get_if<AdditivePerturbation>(&spec_)) return p->inner->a_minus1();
    return base_pair()->alpha(-1);
  }

  // Natural block length for offset arithmetic: the base period, or N+2 for
  // the blend; 1 for explicit tables.
  int analysis_period() const {
    return std::visit(
        [](const auto& s) -> int {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ExplicitTable>) {
            return 1;
          } else if constexpr (std::is_same_v<T, AdditivePerturbation>) {
            return s.inner->analysis_period();
          } else if constexpr (std::is_same_v<T, Blend>) {
            return s.base.period() + 2;
          } else {
            return s.base.period();
          }
        },
        spec_);
  }

  // Base periodic pair when the variant carries one (nullptr for tables).
  const PeriodicPair* base_pair() const {
    return std::visit(
        [](const auto& s) -> const PeriodicPair* {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ExplicitTable>) {
            return nullptr;
          } else if constexpr (std::is_same_v<T, AdditivePerturbation>) {
            return s.inner->base_pair();
          } else {
            return &s.base;
          }
        },
        spec_);
  }

 private:
  void validate() const {
    if (const auto* t = std::get_if<ExplicitTable>(&spec_)) {
      if (t->a.size() != t->b.size())
        throw PreconditionError("ExplicitTable: a and b must be equally long");
    }
    if (const auto* p = std::get_if<PowerLawExample>(&spec_)) {
      if (!(p->mu >= 0.0 && p->mu < p->lambda))
        throw PreconditionError("PowerLawExample: requires 0 <= mu < lambda");
    }
    if (const auto* p = std::get_if<AdditivePerturbation>(&spec_)) {
      if (!p->inner) throw PreconditionError("AdditivePerturbation: missing inner model");
    }
  }

  static Coeff eval_spec(const ExplicitTable& t, long n) {
    if (size_t(n) >= t.a.size())
      throw IndexOutOfTable("ExplicitTable: index " + std::to_string(n) + " beyond table of " +
                            std::to_string(t.a.size()));
    return {t.a[size_t(n)], t.b[size_t(n)]};
  }
  static Coeff eval_spec(const AsymptoticallyPeriodic& s, long n) {
    cplx a = s.base.alpha(n), b = s.base.beta(n);
    if (s.perturb_a) a += (*s.perturb_a)(n);
    if (s.perturb_b) b += (*s.perturb_b)(n);
    return {a, b};
  }
  static Coeff eval_spec(const PeriodicallyModulated& s, long n) {
    cplx m = s.modulator(n);
    return {s.base.alpha(n) * m, s.base.beta(n) * m};
  }
  static Coeff eval_spec(const AdditivePerturbation& s, long n) {
    Coeff inner = s.inner->at(n);
    cplx x = s.x ? (*s.x)(n) : cplx(0.0);
    cplx y = s.y ? (*s.y)(n) : cplx(0.0);
    return perturbed_coeff(inner, x, y, s.alternating, n, s.inner->analysis_period());
  }
  static Coeff eval_spec(const Blend& s, long n) {
    const int block = s.base.period() + 2;
    auto [a, b] = blend_coeff(s.base, s.c_tilde, s.d_tilde ? &*s.d_tilde : nullptr, n / block,
                              int(n % block));
    return {a, b};
  }
  static Coeff eval_spec(const PowerLawExample& s, long n) {
    const int n_per = s.base.period();
    double lead = std::pow(double(n + 1), s.lambda);
    cplx tail(0.0, epsilon_sign(n, n_per) * std::pow(double(n + 1), s.mu));
    return {s.base.alpha(n) * lead + tail, s.base.beta(n) * lead + tail};
  }

  ModelSpec spec_;
  mutable std::shared_mutex mu_;
  mutable std::vector<Coeff> cache_;
};

// Dispatch named after the operation it implements.
inline Coeff coeff(const CoefficientModel& m, long n) { return m.at(n); }

inline ModelPtr make_model(ModelSpec spec) {
  return std::make_shared<CoefficientModel>(std::move(spec));
}

}  // namespace jspec
