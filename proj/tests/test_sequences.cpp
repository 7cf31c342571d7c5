// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "jspec/model_io.hpp"
#include "jspec/sequences.hpp"

using namespace jspec;

namespace {

PeriodicPair pair1(cplx a0 = 1.0, cplx b0 = 0.0) { return PeriodicPair({a0}, {b0}); }

CoefficientModel free_jacobi() { return CoefficientModel(AsymptoticallyPeriodic{pair1(), {}, {}}); }

}  // namespace

TEST_CASE("expression vocabulary evaluates") {
  CHECK(SeqExpr::constant({2.0, -1.0})(7) == cplx(2.0, -1.0));
  CHECK(SeqExpr::power(2.0)(3).real() == doctest::Approx(16.0));
  CHECK(SeqExpr::power(2.0)(3).imag() == 0.0);
  CHECK(SeqExpr::alt()(4) == cplx(1.0));
  CHECK(SeqExpr::alt()(5) == cplx(-1.0));
  CHECK(SeqExpr::alt_block(3)(2) == cplx(1.0));
  CHECK(SeqExpr::alt_block(3)(3) == cplx(-1.0));
  CHECK(SeqExpr::recip(SeqExpr::power(1.0))(4) == cplx(0.2));
  CHECK(SeqExpr::imag_unit(SeqExpr::constant(3.0))(0) == cplx(0.0, 3.0));
  auto s = SeqExpr::sum({SeqExpr::power(1.0), SeqExpr::constant(1.0)});
  CHECK(s(4) == cplx(6.0));
  auto p = SeqExpr::prod({SeqExpr::alt(), SeqExpr::recip(SeqExpr::power(1.0))});
  CHECK(p(1) == cplx(-0.5));
  CHECK_THROWS_AS(SeqExpr::recip(SeqExpr::constant(0.0))(0), Error);
  CHECK_THROWS_AS(SeqExpr::power(1.0)(-1), PreconditionError);
}

TEST_CASE("periodic pair indexes cyclically over Z") {
  PeriodicPair p({1.0, 2.0}, {0.0, 5.0});
  CHECK(p.alpha(0) == cplx(1.0));
  CHECK(p.alpha(1) == cplx(2.0));
  CHECK(p.alpha(5) == cplx(2.0));
  CHECK(p.alpha(-1) == cplx(2.0));
  CHECK(p.alpha(-2) == cplx(1.0));
  CHECK(p.beta(-1) == cplx(5.0));
  for (long n = -7; n < 7; ++n) CHECK(p.alpha(n + 2) == p.alpha(n));
  CHECK_THROWS_AS(PeriodicPair({1.0, 0.0}, {0.0, 0.0}), ZeroOffDiagonal);
  CHECK_THROWS_AS(PeriodicPair({1.0}, {0.0, 0.0}), PreconditionError);
}

TEST_CASE("power-law example substitutes the closed form") {
  // hand evaluation of a_n = alpha_n (n+1)^lambda + i(-1)^{floor(n/N)} (n+1)^mu
  CoefficientModel m(PowerLawExample{pair1(), 1.0, 0.0});
  Coeff c3 = m.at(3);
  CHECK(c3.a == cplx(4.0, -1.0));  // floor(3/1) odd
  CHECK(c3.b == cplx(0.0, -1.0));  // beta = 0 leaves only the imaginary tail
  Coeff c2 = m.at(2);
  CHECK(c2.a == cplx(3.0, 1.0));

  // with beta = (1) the diagonal matches the off-diagonal entirely
  CoefficientModel mb(PowerLawExample{pair1(1.0, 1.0), 1.0, 0.0});
  CHECK(mb.at(3).a == cplx(4.0, -1.0));
  CHECK(mb.at(3).b == cplx(4.0, -1.0));

  CHECK_THROWS_AS(CoefficientModel(PowerLawExample{pair1(), 0.5, 0.7}), PreconditionError);
}

TEST_CASE("asymptotically periodic extension and perturbations") {
  CoefficientModel m(AsymptoticallyPeriodic{PeriodicPair({1.0, 2.0}, {0.0, 0.0}), {}, {}});
  CHECK(m.at(5).a == cplx(2.0));
  CHECK(m.at(5).b == cplx(0.0));
  CHECK(m.a(-1) == cplx(2.0));  // periodic limit value alpha_{N-1}

  CoefficientModel mp(AsymptoticallyPeriodic{
      pair1(), SeqExpr::recip(SeqExpr::power(1.0)),
      SeqExpr::imag_unit(SeqExpr::prod({SeqExpr::alt(), SeqExpr::recip(SeqExpr::power(1.0))}))});
  CHECK(mp.at(0).a == cplx(2.0));
  CHECK(mp.at(1).a == cplx(1.5));
  CHECK(mp.at(1).b == cplx(0.0, -0.5));  // i(-1)^1/2
}

TEST_CASE("blend interleaving follows the block layout") {
  // N = 1, alpha = (1), beta = (0), c_n = n+1, d = 0
  CoefficientModel m(Blend{pair1(), SeqExpr::power(1.0), {}});
  CHECK(m.analysis_period() == 3);
  CHECK(m.at(0).a == cplx(1.0));  // slot 0: alpha_0
  CHECK(m.at(1).a == cplx(1.0));  // slot 1 = N: c_0 = 1
  CHECK(m.at(2).a == cplx(2.0));  // slot 2 = N+1: c_1 = 2
  CHECK(m.at(3).a == cplx(1.0));  // next block
  CHECK(m.at(4).a == cplx(3.0));  // c_2
  CHECK(m.at(5).a == cplx(4.0));  // c_3
  CHECK(m.at(4).b == cplx(0.0));

  SUBCASE("sub-stream round trip") {
    // extracting the three interleaved streams reproduces alpha and c
    for (long k = 0; k < 16; ++k) {
      CHECK(m.at(3 * k).a == cplx(1.0));
      CHECK(m.at(3 * k + 1).a == cplx(double(2 * k + 1)));
      CHECK(m.at(3 * k + 2).a == cplx(double(2 * k + 2)));
    }
  }
}

TEST_CASE("blend_coeff slot dispatch") {
  PeriodicPair base({1.0, 3.0}, {0.5, 0.25});
  SeqExpr c = SeqExpr::power(1.0);
  SeqExpr d = SeqExpr::constant(7.0);
  // i < N: the periodic entries
  auto [a1, b1] = blend_coeff(base, c, &d, 0, 1);
  CHECK(a1 == cplx(3.0));
  CHECK(b1 == cplx(0.25));
  // i = N with k = 3: c_{2k} = c_6 = 7
  auto [a6, b6] = blend_coeff(base, c, &d, 3, 2);
  CHECK(a6 == cplx(7.0));
  CHECK(b6 == cplx(7.0));
  // i = N+1 with k = 3: c_{2k+1} = c_7 = 8
  auto [a7, b7] = blend_coeff(base, c, &d, 3, 3);
  CHECK(a7 == cplx(8.0));
  CHECK_THROWS_AS(blend_coeff(base, c, &d, 0, 4), SlotOutOfRange);
  CHECK_THROWS_AS(blend_coeff(base, c, &d, 0, -1), SlotOutOfRange);
}

TEST_CASE("additive perturbations, plain and alternating") {
  auto inner = make_model(PowerLawExample{pair1(), 1.0, 0.0});
  // inner a_3 = 4 - i; alternating x adds i*eps_3*x_3 = -i
  {
    CoefficientModel m(AdditivePerturbation{inner, SeqExpr::constant(1.0), {}, true});
    CHECK(m.at(3).a == cplx(4.0, -2.0));
  }
  {
    // plain zero perturbation leaves the model untouched
    CoefficientModel m(
        AdditivePerturbation{inner, SeqExpr::constant(0.0), SeqExpr::constant(0.0), false});
    for (long n = 0; n < 20; ++n) {
      CHECK(m.at(n).a == inner->at(n).a);
      CHECK(m.at(n).b == inner->at(n).b);
    }
  }
  {
    // a real inner value cancelled by the perturbation must be rejected
    auto table = make_model(ExplicitTable{{1.0, 1.0}, {0.0, 0.0}, {}});
    CoefficientModel m(AdditivePerturbation{table, SeqExpr::constant(-1.0), {}, false});
    CHECK_THROWS_AS(m.at(0), ZeroOffDiagonal);
  }

  // hand check of the helper on its own
  Coeff c = perturbed_coeff({4.0, 0.0}, 1.0, 0.0, true, 3, 1);
  CHECK(c.a == cplx(4.0, -1.0));
}

TEST_CASE("explicit tables bound-check and supply a(-1) explicitly") {
  CoefficientModel m(ExplicitTable{{1.0, 2.0}, {0.0, 0.5}, cplx(3.0)});
  CHECK(m.at(1).a == cplx(2.0));
  CHECK(m.a(-1) == cplx(3.0));
  CHECK_THROWS_AS(m.at(2), IndexOutOfTable);

  CoefficientModel no_prev(ExplicitTable{{1.0}, {0.0}, {}});
  CHECK_THROWS_AS(no_prev.a(-1), IndexOutOfTable);
}

TEST_CASE("evaluation is pure and the cache agrees with eval") {
  CoefficientModel m(PowerLawExample{PeriodicPair({1.0, 2.0}, {0.0, 1.0}), 0.7, 0.2});
  for (long n = 0; n < 200; ++n) {
    Coeff c1 = m.at(n), c2 = m.at(n), c3 = m.eval(n);
    CHECK(c1.a == c2.a);
    CHECK(c1.b == c2.b);
    CHECK(c1.a == c3.a);
    CHECK(c1.b == c3.b);
    CHECK(c1.a != cplx(0.0));
  }
}

TEST_CASE("concurrent cache fills see one consistent value") {
  CoefficientModel m(PowerLawExample{pair1(), 0.7, 0.2});
  std::vector<std::thread> pool;
  std::vector<cplx> first(8);
  for (int t = 0; t < 8; ++t)
    pool.emplace_back([&, t] {
      cplx acc = 0.0;
      for (long n = 0; n < 2000; ++n) acc += m.at(n).a;
      first[size_t(t)] = acc;
    });
  for (auto& th : pool) th.join();
  for (int t = 1; t < 8; ++t) CHECK(first[size_t(t)] == first[0]);
}

TEST_CASE("power-law phase flattens at the documented rate") {
  // |a_n/|a_n| - 1| stays below 10 (n+1)^{mu-lambda} once the leading power
  // dominates
  CoefficientModel m(PowerLawExample{pair1(), 0.7, 0.2});
  for (long n : {1000L, 100000L, 1000000L}) {
    cplx a = m.eval(n).a;
    double dev = std::abs(a / std::abs(a) - 1.0);
    CHECK(dev <= 10.0 * std::pow(double(n + 1), 0.2 - 0.7));
  }
}

TEST_CASE("model JSON round trip") {
  auto inner = make_model(PeriodicallyModulated{pair1(), SeqExpr::power(0.7)});
  CoefficientModel m(AdditivePerturbation{inner, SeqExpr::power(0.2), SeqExpr::power(0.2), true});
  json j = model_to_json(m);
  CoefficientModel back = model_from_json(j);
  for (long n = 0; n < 64; ++n) {
    CHECK(back.at(n).a == m.at(n).a);
    CHECK(back.at(n).b == m.at(n).b);
  }

  json blend_j = {{"model",
                   {{"kind", "Blend"},
                    {"alpha", {1.0}},
                    {"beta", {0.0}},
                    {"c", {{"op", "pow"}, {"exponent", 1.0}}}}}};
  CoefficientModel blend = model_from_json(blend_j);
  CHECK(blend.at(2).a == cplx(2.0));

  CHECK_THROWS_AS(model_from_json(json{{"model", {{"kind", "Nope"}}}}), ParseError);
  CHECK_THROWS_AS(model_from_json(json{{"model", {{"kind", "Blend"}, {"alpha", {1.0}}}}}),
                  ParseError);
}
