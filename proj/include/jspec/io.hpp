// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "jspec/classify.hpp"
#include "jspec/model_io.hpp"
#include "jspec/spectrum.hpp"
#include "jspec/transfer.hpp"
#include "jspec/turan.hpp"

namespace jspec {

// 17 significant digits: enough to round-trip binary64 exactly.
inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string iso_timestamp_utc() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

// Writes rows of 17-digit floats with an optional timestamp comment line.
// Reruns are byte-identical apart from that line.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, bool no_header) : os_(os) {
    if (!no_header) os_ << "# generated " << iso_timestamp_utc() << "\n";
  }
  void columns(const std::vector<std::string>& names) {
    for (size_t k = 0; k < names.size(); ++k) os_ << (k ? "," : "") << names[k];
    os_ << "\n";
  }
  void row(const std::vector<double>& vals) {
    for (size_t k = 0; k < vals.size(); ++k) os_ << (k ? "," : "") << g17(vals[k]);
    os_ << "\n";
  }
  void comment(const std::string& text) { os_ << "# " << text << "\n"; }
  std::ostream& stream() { return os_; }

 private:
  std::ostream& os_;
};

// Resolves "-" to stdout, anything else to a file stream.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw ParseError("cannot open output file: " + path);
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

// -- serializers ------------------------------------------------------------------

inline json to_json(const SeriesVerdict& v) {
  return {{"verdict", v.name()},
          {"window_slope", v.window_slope},
          {"term_exponent", v.term_exponent},
          {"boundary", v.boundary},
          {"partial_sum", v.partial_sum}};
}

inline json to_json(const LambdaScanResult& r) {
  json intervals = json::array();
  for (const auto& iv : r.intervals)
    intervals.push_back(
        {{"left", iv.left}, {"right", iv.right}, {"single_sample", iv.single_sample}});
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"t", s.t},
                       {"tr_re", s.tr.real()},
                       {"tr_im", s.tr.imag()},
                       {"det_re", s.det.real()},
                       {"det_im", s.det.imag()},
                       {"discr_re", s.discr.real()},
                       {"in_lambda", s.in_lambda}});
  return {{"gamma", cplx_to_json(r.line.gamma)},
          {"t0", r.line.t0},
          {"t1", r.line.t1},
          {"step", r.line.step},
          {"realness_tol", r.realness_tol},
          {"offset", r.offset},
          {"limit_constant", r.limit_constant},
          {"intervals", intervals},
          {"samples", samples}};
}

inline void write_csv(const LambdaScanResult& r, std::ostream& os, bool no_header) {
  CsvWriter w(os, no_header);
  for (const auto& iv : r.intervals)
    w.comment("interval (" + g17(iv.left) + "," + g17(iv.right) + ")" +
              (iv.single_sample ? " single-sample" : ""));
  w.columns({"t", "tr_re", "tr_im", "det_re", "det_im", "discr_re", "in_lambda"});
  for (const auto& s : r.samples)
    w.row({s.t, s.tr.real(), s.tr.imag(), s.det.real(), s.det.imag(), s.discr.real(),
           double(s.in_lambda)});
}

inline void write_csv(const EigenvectorTrajectory& t, std::ostream& os, bool no_header) {
  CsvWriter w(os, no_header);
  w.columns({"n", "re_u", "im_u", "scale_exp"});
  if (!t.samples.empty() && t.samples.front().n == 1) {
    const TrajectorySample& s0 = t.samples.front();
    w.row({0.0, s0.u_prev.real(), s0.u_prev.imag(), double(s0.scale_exp)});
  }
  for (const auto& s : t.samples)
    w.row({double(s.n), s.u_curr.real(), s.u_curr.imag(), double(s.scale_exp)});
}

inline json summary_json(const TuranTrace& t) {
  return {{"offset", t.offset},
          {"period", t.period},
          {"gamma", cplx_to_json(t.gamma)},
          {"z", cplx_to_json(t.z)},
          {"g", t.g},
          {"sign", t.sign},
          {"residual", t.residual},
          {"burn_in", t.burn_in},
          {"sign_change", t.sign_change},
          {"degenerate_form", t.degenerate_form},
          {"non_convergent", t.non_convergent},
          {"flatten_tol", t.flatten_tol},
          {"max_imag_residue", t.max_imag_residue}};
}

inline json to_json(const TuranTrace& t) {
  json pts = json::array();
  for (const auto& p : t.points)
    pts.push_back({{"n", p.block},
                   {"S", p.s},
                   {"F", std::isnan(p.f) ? json() : json(p.f)},
                   {"imag_residue", p.imag_residue}});
  json j = summary_json(t);
  j["points"] = pts;
  return j;
}

inline void write_csv(const TuranTrace& t, std::ostream& os, bool no_header) {
  CsvWriter w(os, no_header);
  w.columns({"n", "S", "F", "imag_residue"});
  for (const auto& p : t.points)
    w.row({double(p.block), p.s, p.f, p.imag_residue});
}

inline json to_json(const BoundRatioReport& r) {
  json basis = json::array();
  for (int k = 0; k < 2; ++k)
    basis.push_back({{"log_inf", r.basis[k].log_inf},
                     {"log_sup", r.basis[k].log_sup},
                     {"tail_log_inf", r.basis[k].tail_log_inf},
                     {"tail_log_sup", r.basis[k].tail_log_sup},
                     {"slope", r.basis[k].slope}});
  return {{"offset", r.offset},
          {"period", r.period},
          {"z", cplx_to_json(r.z)},
          {"n_min", r.n_min},
          {"n_max", r.n_max},
          {"log_inf", r.log_inf},
          {"log_sup", r.log_sup},
          {"sup_over_inf", r.sup_over_inf()},
          {"basis", basis}};
}

inline json to_json(const CarlemanReport& c) {
  json per = json::array();
  for (const auto& v : c.per_offset) per.push_back(to_json(v));
  return {{"period", c.period}, {"n_max", c.n_max}, {"total", to_json(c.total)},
          {"per_offset", per}};
}

inline json to_json(const ClassificationReport& r) {
  json claims = json::array();
  for (const auto& c : r.claims)
    claims.push_back(
        {{"statement", c.statement}, {"hypothesis", c.hypothesis}, {"evidence", c.evidence}});
  json hyp = json::array();
  for (const auto& h : r.hypotheses)
    hyp.push_back({{"offset", h.offset},
                   {"gamma", cplx_to_json(h.gamma)},
                   {"gamma_drift", h.gamma_drift},
                   {"gamma_drift_prev", h.gamma_drift_prev},
                   {"block_ratio_drift", h.block_ratio_drift},
                   {"limit_real_elliptic", h.limit_real_elliptic},
                   {"x_twisted_variation", to_json(h.x_twisted_variation)},
                   {"holds", h.holds()}});
  json intervals = json::array();
  for (const auto& iv : r.lambda_intervals)
    intervals.push_back({{"left", iv.left}, {"right", iv.right}});
  json evidence = json::array();
  for (const auto& e : r.evidence)
    evidence.push_back({{"z", cplx_to_json(e.z)},
                        {"offset", e.offset},
                        {"bound_ratio", to_json(e.bounds)},
                        {"l2_basis0", to_json(e.l2_basis0.verdict)},
                        {"l2_basis1", to_json(e.l2_basis1.verdict)}});
  return {{"verdict", r.verdict_name()},
          {"period", r.period},
          {"carleman", to_json(r.carleman)},
          {"hypotheses", hyp},
          {"claims", claims},
          {"lambda_intervals", intervals},
          {"line_gamma", cplx_to_json(r.line_gamma)},
          {"line_covers_all", r.line_covers_all},
          {"evidence", evidence}};
}

inline json to_json(const SpectrumEstimate& e) {
  json roots = json::array();
  for (const auto& r : e.roots)
    roots.push_back({{"re", r.value.real()},
                     {"im", r.value.imag()},
                     {"multiplicity", r.multiplicity},
                     {"residual", r.residual}});
  return {{"dim", e.dim},
          {"box", {{"x0", e.box.x0}, {"x1", e.box.x1}, {"y0", e.box.y0}, {"y1", e.box.y1}}},
          {"partial", e.partial},
          {"winding_evals", e.winding_evals},
          {"roots", roots}};
}

inline void write_csv(const SpectrumEstimate& e, std::ostream& os, bool no_header) {
  CsvWriter w(os, no_header);
  w.columns({"re", "im", "multiplicity", "residual"});
  for (const auto& r : e.roots)
    w.row({r.value.real(), r.value.imag(), double(r.multiplicity), r.residual});
}

inline json to_json(const TwistedVariationReport& r) {
  json cps = json::array();
  for (const auto& [n, s] : r.checkpoints) cps.push_back({{"n", n}, {"partial_sum", s}});
  return {{"offset", r.offset},
          {"period", r.period},
          {"n_max", r.n_max},
          {"partial_sum", r.partial_sum},
          {"verdict", to_json(r.verdict)},
          {"checkpoints", cps}};
}

}  // namespace jspec
