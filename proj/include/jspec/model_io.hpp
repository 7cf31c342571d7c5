// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "jspec/expr.hpp"
#include "jspec/sequences.hpp"

namespace jspec {

using nlohmann::json;

// Complex values in configuration files: a plain number, [re, im], or
// {"re": .., "im": ..}.
inline cplx cplx_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array()) {
    if (j.size() == 1) return {j[0].get<double>(), 0.0};
    if (j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
    throw ParseError("complex value: expected [re] or [re, im]");
  }
  if (j.is_object() && j.contains("re"))
    return {j["re"].get<double>(), j.value("im", 0.0)};
  throw ParseError("complex value: expected number, [re, im] or {re, im}");
}

inline json cplx_to_json(const cplx& v) {
  if (v.imag() == 0.0) return v.real();
  return json::array({v.real(), v.imag()});
}

inline std::vector<cplx> cplx_vector_from_json(const json& j, const std::string& what) {
  if (!j.is_array()) throw ParseError(what + ": expected an array");
  std::vector<cplx> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back(cplx_from_json(e));
  return out;
}

// -- expression trees ---------------------------------------------------------

inline SeqExpr expr_from_json(const json& j) {
  if (!j.is_object() || !j.contains("op")) throw ParseError("expression node: missing \"op\"");
  std::string op = j["op"].get<std::string>();
  if (op == "const") return SeqExpr::constant(cplx_from_json(j.at("value")));
  if (op == "pow") return SeqExpr::power(j.at("exponent").get<double>());
  if (op == "alt") return SeqExpr::alt();
  if (op == "alt_block") return SeqExpr::alt_block(j.at("period").get<int>());
  if (op == "recip") return SeqExpr::recip(expr_from_json(j.at("arg")));
  if (op == "imag") return SeqExpr::imag_unit(expr_from_json(j.at("arg")));
  if (op == "sum" || op == "prod") {
    std::vector<SeqExpr> args;
    for (const auto& a : j.at("args")) args.push_back(expr_from_json(a));
    return op == "sum" ? SeqExpr::sum(std::move(args)) : SeqExpr::prod(std::move(args));
  }
  throw ParseError("expression node: unknown op \"" + op + "\"");
}

inline json expr_to_json(const SeqExpr& e) {
  switch (e.op()) {
    case SeqExpr::Op::Const:
      return {{"op", "const"}, {"value", cplx_to_json(e.value())}};
    case SeqExpr::Op::Pow:
      return {{"op", "pow"}, {"exponent", e.exponent()}};
    case SeqExpr::Op::Alt:
      return {{"op", "alt"}};
    case SeqExpr::Op::AltBlock:
      return {{"op", "alt_block"}, {"period", e.block()}};
    case SeqExpr::Op::Recip:
      return {{"op", "recip"}, {"arg", expr_to_json(e.args()[0])}};
    case SeqExpr::Op::Imag:
      return {{"op", "imag"}, {"arg", expr_to_json(e.args()[0])}};
    case SeqExpr::Op::Sum:
    case SeqExpr::Op::Prod: {
      json args = json::array();
      for (const auto& a : e.args()) args.push_back(expr_to_json(a));
      return {{"op", e.op() == SeqExpr::Op::Sum ? "sum" : "prod"}, {"args", args}};
    }
  }
  throw ParseError("expression node: unserializable op");
}

// -- models ---------------------------------------------------------------------

inline PeriodicPair pair_from_json(const json& j) {
  auto alpha = cplx_vector_from_json(j.at("alpha"), "alpha");
  auto beta = cplx_vector_from_json(j.at("beta"), "beta");
  PeriodicPair p(std::move(alpha), std::move(beta));
  if (j.contains("period") && j["period"].get<int>() != p.period())
    throw ParseError("period does not match the alpha/beta length");
  return p;
}

inline ModelSpec model_spec_from_json(const json& j);

inline CoefficientModel model_from_json(const json& j) {
  const json& body = j.contains("model") ? j.at("model") : j;
  return CoefficientModel(model_spec_from_json(body));
}

inline ModelSpec model_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ParseError("model: missing \"kind\"");
  std::string kind = j["kind"].get<std::string>();
  try {
    if (kind == "ExplicitTable") {
      ExplicitTable t;
      t.a = cplx_vector_from_json(j.at("a"), "a");
      t.b = cplx_vector_from_json(j.at("b"), "b");
      if (j.contains("a_minus1")) t.a_minus1 = cplx_from_json(j["a_minus1"]);
      return t;
    }
    if (kind == "AsymptoticallyPeriodic") {
      AsymptoticallyPeriodic s{pair_from_json(j), {}, {}};
      if (j.contains("perturb_a")) s.perturb_a = expr_from_json(j["perturb_a"]);
      if (j.contains("perturb_b")) s.perturb_b = expr_from_json(j["perturb_b"]);
      return s;
    }
    if (kind == "PeriodicallyModulated")
      return PeriodicallyModulated{pair_from_json(j), expr_from_json(j.at("modulator"))};
    if (kind == "AdditivePerturbation") {
      AdditivePerturbation s;
      s.inner = std::make_shared<CoefficientModel>(model_spec_from_json(j.at("inner")));
      if (j.contains("x")) s.x = expr_from_json(j["x"]);
      if (j.contains("y")) s.y = expr_from_json(j["y"]);
      s.alternating = j.value("alternating", false);
      return s;
    }
    if (kind == "Blend") {
      Blend s{pair_from_json(j), expr_from_json(j.at("c")), {}};
      if (j.contains("d")) s.d_tilde = expr_from_json(j["d"]);
      return s;
    }
    if (kind == "PowerLawExample")
      return PowerLawExample{pair_from_json(j), j.at("lambda").get<double>(),
                             j.at("mu").get<double>()};
  } catch (const json::exception& e) {
    throw ParseError(std::string("model ") + kind + ": " + e.what());
  }
  throw ParseError("model: unknown kind \"" + kind + "\"");
}

inline json pair_to_json(const PeriodicPair& p) {
  json alpha = json::array(), beta = json::array();
  for (const auto& v : p.alpha_values()) alpha.push_back(cplx_to_json(v));
  for (const auto& v : p.beta_values()) beta.push_back(cplx_to_json(v));
  return {{"period", p.period()}, {"alpha", alpha}, {"beta", beta}};
}

inline json model_spec_to_json(const ModelSpec& spec) {
  json j;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ExplicitTable>) {
          j["kind"] = "ExplicitTable";
          json a = json::array(), b = json::array();
          for (const auto& v : s.a) a.push_back(cplx_to_json(v));
          for (const auto& v : s.b) b.push_back(cplx_to_json(v));
          j["a"] = a;
          j["b"] = b;
          if (s.a_minus1) j["a_minus1"] = cplx_to_json(*s.a_minus1);
        } else if constexpr (std::is_same_v<T, AsymptoticallyPeriodic>) {
          j = pair_to_json(s.base);
          j["kind"] = "AsymptoticallyPeriodic";
          if (s.perturb_a) j["perturb_a"] = expr_to_json(*s.perturb_a);
          if (s.perturb_b) j["perturb_b"] = expr_to_json(*s.perturb_b);
        } else if constexpr (std::is_same_v<T, PeriodicallyModulated>) {
          j = pair_to_json(s.base);
          j["kind"] = "PeriodicallyModulated";
          j["modulator"] = expr_to_json(s.modulator);
        } else if constexpr (std::is_same_v<T, AdditivePerturbation>) {
          j["kind"] = "AdditivePerturbation";
          j["inner"] = model_spec_to_json(s.inner->spec());
          if (s.x) j["x"] = expr_to_json(*s.x);
          if (s.y) j["y"] = expr_to_json(*s.y);
          j["alternating"] = s.alternating;
        } else if constexpr (std::is_same_v<T, Blend>) {
          j = pair_to_json(s.base);
          j["kind"] = "Blend";
          j["c"] = expr_to_json(s.c_tilde);
          if (s.d_tilde) j["d"] = expr_to_json(*s.d_tilde);
        } else {
          j = pair_to_json(s.base);
          j["kind"] = "PowerLawExample";
          j["lambda"] = s.lambda;
          j["mu"] = s.mu;
        }
      },
      spec);
  return j;
}

inline json model_to_json(const CoefficientModel& m) {
  return {{"model", model_spec_to_json(m.spec())}};
}

inline CoefficientModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model file ") + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace jspec
