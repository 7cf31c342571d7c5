// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "jspec/errors.hpp"
#include "jspec/mat2.hpp"

namespace jspec {

// Closed-form scalar sequence n -> C built from a small serializable
// vocabulary: constants, powers of (n+1), the alternating signs (-1)^n and
// (-1)^{floor(n/N)}, reciprocals, multiplication by i, sums and products.
// Keeping the vocabulary closed (instead of accepting callbacks) is what
// makes model configurations file-loadable.
class SeqExpr {
 public:
  enum class Op { Const, Pow, Alt, AltBlock, Recip, Imag, Sum, Prod };

  static SeqExpr constant(cplx c) {
    SeqExpr e;
    e.op_ = Op::Const;
    e.c_ = c;
    return e;
  }
  // (n+1)^exponent
  static SeqExpr power(double exponent) {
    SeqExpr e;
    e.op_ = Op::Pow;
    e.p_ = exponent;
    return e;
  }
  // (-1)^n
  static SeqExpr alt() {
    SeqExpr e;
    e.op_ = Op::Alt;
    return e;
  }
  // (-1)^{floor(n/period)}
  static SeqExpr alt_block(int period) {
    if (period < 1) throw PreconditionError("alt_block: period must be >= 1");
    SeqExpr e;
    e.op_ = Op::AltBlock;
    e.period_ = period;
    return e;
  }
  static SeqExpr recip(SeqExpr arg) {
    SeqExpr e;
    e.op_ = Op::Recip;
    e.args_.push_back(std::move(arg));
    return e;
  }
  // i * arg
  static SeqExpr imag_unit(SeqExpr arg) {
    SeqExpr e;
    e.op_ = Op::Imag;
    e.args_.push_back(std::move(arg));
    return e;
  }
  static SeqExpr sum(std::vector<SeqExpr> args) {
    SeqExpr e;
    e.op_ = Op::Sum;
    e.args_ = std::move(args);
    return e;
  }
  static SeqExpr prod(std::vector<SeqExpr> args) {
    SeqExpr e;
    e.op_ = Op::Prod;
    e.args_ = std::move(args);
    return e;
  }

  cplx operator()(long n) const {
    if (n < 0) throw PreconditionError("SeqExpr: negative index " + std::to_string(n));
    switch (op_) {
      case Op::Const:
        return c_;
      case Op::Pow:
        return std::pow(double(n + 1), p_);
      case Op::Alt:
        return (n % 2 != 0) ? -1.0 : 1.0;
      case Op::AltBlock:
        return ((n / period_) % 2 != 0) ? -1.0 : 1.0;
      case Op::Recip: {
        cplx v = args_[0](n);
        if (v == 0.0) throw Error("SeqExpr: reciprocal of zero at n=" + std::to_string(n));
        return 1.0 / v;
      }
      case Op::Imag:
        return cplx(0.0, 1.0) * args_[0](n);
      case Op::Sum: {
        cplx s = 0.0;
        for (const auto& a : args_) s += a(n);
        return s;
      }
      case Op::Prod: {
        cplx s = 1.0;
        for (const auto& a : args_) s *= a(n);
        return s;
      }
    }
    return {};
  }

  Op op() const { return op_; }
  cplx value() const { return c_; }
  double exponent() const { return p_; }
  int block() const { return period_; }
  const std::vector<SeqExpr>& args() const { return args_; }

 private:
  SeqExpr() = default;
  Op op_ = Op::Const;
  cplx c_{};
  double p_ = 0.0;
  int period_ = 1;
  std::vector<SeqExpr> args_;
};

}  // namespace jspec
