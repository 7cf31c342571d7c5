// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "jspec/classify.hpp"
#include "jspec/eigen.hpp"
#include "jspec/io.hpp"
#include "jspec/model_io.hpp"
#include "jspec/spectrum.hpp"
#include "jspec/transfer.hpp"
#include "jspec/turan.hpp"

namespace jspec {

// Exit codes: 0 success, 1 I/O or parse error, 2 precondition violation,
// 3 strict-mode diagnostic failure.
enum ExitCode { kOk = 0, kIoError = 1, kPrecondition = 2, kStrictDiagnostic = 3 };

struct RunConfig {
  std::string model_path;
  std::string out = "-";
  std::string format = "csv";  // csv | json
  long nmax = 10000;
  long nmin = 10;
  double tol = 1e-8;
  double flatten_tol = 1e-3;
  std::optional<cplx> z;
  std::optional<cplx> gamma;
  std::optional<int> offset;
  double grid_t0 = -4.0, grid_t1 = 4.0, grid_step = 1e-3;
  bool strict = false, partial = false, no_header = false;
  int dim = 100;
  Box box{-3.0, 3.0, -1.0, 1.0};
  std::string selector;
  std::string scan_path;  // prior lambda scan (json) to draw z from
  Vec2 alpha{1.0, 0.0};
  int zcount = 9;
  long fs_budget = 40000000;

  void validate() const {
    if (!(tol > 0.0) || !(flatten_tol > 0.0))
      throw PreconditionError("tolerances must be positive");
    if (nmax < 1) throw PreconditionError("nmax must be >= 1");
  }
};

namespace cli_detail {

inline CoefficientModel load_model_checked(const RunConfig& cfg) {
  if (cfg.model_path.empty()) throw ParseError("no model file given (--model)");
  return load_model(cfg.model_path);
}

inline int checked_offset(const RunConfig& cfg, const LimitFamily& fam) {
  int i = cfg.offset.value_or(fam.min_offset());
  if (i < fam.min_offset() || i > fam.max_offset())
    throw OffsetOutOfRange("offset " + std::to_string(i) + " outside " +
                           std::to_string(fam.min_offset()) + ".." +
                           std::to_string(fam.max_offset()));
  return i;
}

inline cplx line_gamma(const RunConfig& cfg, const CoefficientModel& m, int offset, int N) {
  if (cfg.gamma) return *cfg.gamma / std::abs(*cfg.gamma);
  return estimate_gamma(m, offset, N).value;
}

inline LambdaScanResult scan_for(const CoefficientModel& m, const LimitFamily& fam, int offset,
                                 const RunConfig& cfg) {
  LambdaLine line;
  line.gamma = line_gamma(cfg, m, offset, m.analysis_period());
  line.t0 = cfg.grid_t0;
  line.t1 = cfg.grid_t1;
  line.step = cfg.grid_step;
  LambdaScanResult scan =
      lambda_scan([&](cplx z) { return fam.matrix(offset, z); }, line, cfg.tol);
  scan.offset = offset;
  scan.limit_constant = fam.z_independent();
  return scan;
}

inline LambdaScanResult load_scan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scan file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scan file ") + path + ": " + e.what());
  }
  LambdaScanResult scan;
  try {
    scan.line.gamma = cplx_from_json(j.at("gamma"));
    scan.line.t0 = j.at("t0").get<double>();
    scan.line.t1 = j.at("t1").get<double>();
    scan.line.step = j.at("step").get<double>();
    scan.realness_tol = j.value("realness_tol", 1e-8);
    scan.offset = j.value("offset", 0);
    scan.limit_constant = j.value("limit_constant", false);
    for (const auto& iv : j.at("intervals"))
      scan.intervals.push_back({iv.at("left").get<double>(), iv.at("right").get<double>(),
                                iv.value("single_sample", false)});
  } catch (const json::exception& e) {
    throw ParseError(std::string("scan file ") + path + ": " + e.what());
  }
  return scan;
}

// z's on the interior of each interval, 10% margin from the endpoints.
inline std::vector<double> interval_grid(const LambdaInterval& iv, int count) {
  std::vector<double> out;
  double len = iv.right - iv.left;
  double lo = iv.left + 0.1 * len, hi = iv.right - 0.1 * len;
  if (count <= 1) {
    out.push_back(0.5 * (lo + hi));
    return out;
  }
  for (int k = 0; k < count; ++k) out.push_back(lo + (hi - lo) * double(k) / double(count - 1));
  return out;
}

inline void write_json_doc(const json& j, const RunConfig& cfg) {
  OutputTarget target(cfg.out);
  target.stream() << j.dump(2) << "\n";
}

}  // namespace cli_detail

// -- commands ------------------------------------------------------------------------

inline int cmd_lambda(const RunConfig& cfg) {
  cfg.validate();
  CoefficientModel m = cli_detail::load_model_checked(cfg);
  auto fam = limit_family(m);
  if (!fam) {
    std::cerr << "lambda: model has no limit family (explicit tables cannot be scanned)\n";
    return kPrecondition;
  }
  int offset = cli_detail::checked_offset(cfg, *fam);
  LambdaScanResult scan = cli_detail::scan_for(m, *fam, offset, cfg);
  OutputTarget target(cfg.out);
  if (cfg.format == "json")
    target.stream() << to_json(scan).dump(2) << "\n";
  else
    write_csv(scan, target.stream(), cfg.no_header);
  return kOk;
}

inline int cmd_turan(const RunConfig& cfg) {
  cfg.validate();
  CoefficientModel m = cli_detail::load_model_checked(cfg);
  int N = m.analysis_period();
  auto fam = limit_family(m);
  int offset;
  if (fam) {
    offset = cli_detail::checked_offset(cfg, *fam);
  } else {
    offset = cfg.offset.value_or(0);
    if (offset < 0 || offset >= N)
      throw OffsetOutOfRange("offset " + std::to_string(offset) + " outside 0.." +
                             std::to_string(N - 1));
  }

  cplx z;
  if (cfg.z) {
    z = *cfg.z;
  } else if (!cfg.scan_path.empty()) {
    LambdaScanResult scan = cli_detail::load_scan(cfg.scan_path);
    const LambdaInterval* iv = scan.widest();
    if (!iv) throw PreconditionError("scan file holds no Lambda intervals");
    z = scan.line.gamma * (0.5 * (iv->left + iv->right));
  } else {
    throw PreconditionError("turan: provide --z or --scan");
  }

  cplx gamma = cli_detail::line_gamma(cfg, m, offset, N);
  TuranTrace trace =
      turan_trace(m, offset, N, gamma, z, cfg.alpha, cfg.nmax, cfg.flatten_tol);

  if (cfg.format == "json") {
    cli_detail::write_json_doc(to_json(trace), cfg);
  } else {
    OutputTarget target(cfg.out);
    write_csv(trace, target.stream(), cfg.no_header);
    if (cfg.out == "-" || cfg.out.empty()) {
      target.stream() << "# summary " << summary_json(trace).dump() << "\n";
    } else {
      std::ofstream side(cfg.out + ".summary.json");
      side << summary_json(trace).dump(2) << "\n";
    }
  }
  if (cfg.strict && (trace.sign_change || trace.non_convergent)) return kStrictDiagnostic;
  return kOk;
}

inline int cmd_bounds(const RunConfig& cfg) {
  cfg.validate();
  CoefficientModel m = cli_detail::load_model_checked(cfg);
  int N = m.analysis_period();
  auto fam = limit_family(m);
  if (!fam) {
    std::cerr << "bounds: model has no limit family\n";
    return kPrecondition;
  }
  LambdaScanResult scan = cfg.scan_path.empty()
                              ? cli_detail::scan_for(m, *fam, cli_detail::checked_offset(cfg, *fam), cfg)
                              : cli_detail::load_scan(cfg.scan_path);
  if (scan.intervals.empty()) {
    std::cerr << "bounds: empty Lambda set, nothing to sample\n";
    return kPrecondition;
  }

  std::vector<int> offsets;
  if (cfg.offset)
    offsets.push_back(cli_detail::checked_offset(cfg, *fam));
  else
    for (int i = fam->min_offset(); i <= fam->max_offset(); ++i) offsets.push_back(i);

  struct RowData {
    int offset;
    double t;
    cplx z;
    bool manual;
    BoundRatioReport rep;
  };
  std::vector<RowData> rows;
  for (int i : offsets) {
    for (const auto& iv : scan.intervals) {
      if (iv.single_sample) continue;
      for (double t : cli_detail::interval_grid(iv, cfg.zcount))
        rows.push_back({i, t, scan.line.gamma * t, false, {}});
    }
    if (cfg.z) rows.push_back({i, 0.0, *cfg.z, true, {}});
  }
  parallel_for(long(rows.size()), [&](long k) {
    rows[size_t(k)].rep =
        bound_ratio(m, rows[size_t(k)].offset, N, rows[size_t(k)].z, cfg.nmax, cfg.nmin);
  });

  auto flag_of = [](const BoundRatioReport& r) {
    double s0 = r.basis[0].slope, s1 = r.basis[1].slope;
    double worst = std::abs(s0) > std::abs(s1) ? s0 : s1;
    if (worst > 0.1) return 1.0;    // growing
    if (worst < -0.1) return -1.0;  // shrinking
    return 0.0;
  };

  if (cfg.format == "json") {
    json out = json::array();
    for (const auto& r : rows) {
      json jr = to_json(r.rep);
      jr["manual_z"] = r.manual;
      jr["flag"] = flag_of(r.rep) > 0 ? "growing" : (flag_of(r.rep) < 0 ? "shrinking" : "ok");
      out.push_back(jr);
    }
    cli_detail::write_json_doc(out, cfg);
  } else {
    OutputTarget target(cfg.out);
    CsvWriter w(target.stream(), cfg.no_header);
    w.columns({"offset", "z_re", "z_im", "log_inf", "log_sup", "sup_over_inf", "slope_basis0",
               "slope_basis1", "flag", "manual_z"});
    for (const auto& r : rows)
      w.row({double(r.offset), r.z.real(), r.z.imag(), r.rep.log_inf, r.rep.log_sup,
             r.rep.sup_over_inf(), r.rep.basis[0].slope, r.rep.basis[1].slope, flag_of(r.rep),
             double(r.manual)});
  }
  return kOk;
}

inline int cmd_classify(const RunConfig& cfg) {
  cfg.validate();
  CoefficientModel m = cli_detail::load_model_checked(cfg);
  int N = m.analysis_period();
  auto fam = limit_family(m);
  LambdaScanResult scan;
  if (fam) {
    scan = cli_detail::scan_for(m, *fam, cli_detail::checked_offset(cfg, *fam), cfg);
  } else {
    scan.line.t0 = cfg.grid_t0;
    scan.line.t1 = cfg.grid_t1;
    scan.line.step = cfg.grid_step;
  }
  ClassificationReport rep = classify(m, N, scan, cfg.nmax);
  cli_detail::write_json_doc(to_json(rep), cfg);  // a report is a JSON document
  return kOk;
}

inline int cmd_fs(const RunConfig& cfg) {
  cfg.validate();
  CoefficientModel m = cli_detail::load_model_checked(cfg);
  if (cfg.dim < 1 || cfg.dim > 2000) {
    std::cerr << "fs: dim must lie in 1..2000\n";
    return kPrecondition;
  }
  SpectrumEstimate est = finite_section(m, cfg.dim, cfg.box, cfg.tol, cfg.fs_budget);
  if (cfg.format == "json") {
    cli_detail::write_json_doc(to_json(est), cfg);
  } else {
    OutputTarget target(cfg.out);
    write_csv(est, target.stream(), cfg.no_header);
  }
  if (est.partial && !cfg.partial) {
    std::cerr << "fs: evaluation budget exhausted; rerun with --partial to accept\n";
    return kPrecondition;
  }
  return kOk;
}

inline int cmd_tv(const RunConfig& cfg) {
  cfg.validate();
  CoefficientModel m = cli_detail::load_model_checked(cfg);
  int N = m.analysis_period();
  cplx z = cfg.z.value_or(cplx(0.0));
  cplx gamma = cli_detail::line_gamma(cfg, m, 0, N);

  std::function<TwistedVariationReport(int)> run;
  const std::string& sel = cfg.selector;
  if (sel == "a") {
    run = [&](int i) {
      return twisted_variation([&](long n) { return m.a(n); }, i, N, cfg.nmax);
    };
  } else if (sel == "b") {
    run = [&](int i) {
      return twisted_variation([&](long n) { return m.b(n); }, i, N, cfg.nmax);
    };
  } else if (sel == "1/a" || sel == "inv_a") {
    run = [&](int i) {
      return twisted_variation([&](long n) { return 1.0 / m.a(n); }, i, N, cfg.nmax);
    };
  } else if (sel == "b/a") {
    run = [&](int i) {
      return twisted_variation([&](long n) { return m.b(n) / m.a(n); }, i, N, cfg.nmax);
    };
  } else if (sel == "a_prev/a" || sel == "a_ratio") {
    run = [&](int i) {
      return twisted_variation([&](long n) { return m.a(n - 1) / m.a(n); }, i, N, cfg.nmax);
    };
  } else if (sel == "gamma/a") {
    run = [&](int i) {
      return twisted_variation([&](long n) { return gamma / m.a(n); }, i, N, cfg.nmax);
    };
  } else if (sel == "B") {
    run = [&](int i) {
      return twisted_variation_mat([&](long n) { return one_step(m, n, z); }, i, N, cfg.nmax);
    };
  } else if (sel == "X") {
    run = [&](int i) {
      return twisted_variation_mat([&](long n) { return n_step(m, n, N, z); }, i, N, cfg.nmax);
    };
  } else if (sel == "Xw") {
    // ratio-weighted form: (a_{(n+1)N+i-1}/a_{nN+i-1}) X_{nN+i}
    run = [&](int i) {
      return twisted_variation_mat(
          [&](long n) { return (m.a(n + N - 1) / m.a(n - 1)) * n_step(m, n, N, z); }, i, N,
          cfg.nmax);
    };
  } else {
    std::cerr << "tv: unknown selector \"" << sel
              << "\" (a, b, 1/a, b/a, a_prev/a, gamma/a, B, X, Xw)\n";
    return kPrecondition;
  }

  std::vector<int> offsets;
  if (cfg.offset) {
    if (*cfg.offset < 0 || *cfg.offset >= N)
      throw OffsetOutOfRange("tv: offset outside 0.." + std::to_string(N - 1));
    offsets.push_back(*cfg.offset);
  } else {
    for (int i = 0; i < N; ++i) offsets.push_back(i);
  }

  std::vector<TwistedVariationReport> reports(offsets.size());
  for (size_t k = 0; k < offsets.size(); ++k) reports[k] = run(offsets[k]);

  if (cfg.format == "json") {
    json out = json::array();
    for (const auto& r : reports) out.push_back(to_json(r));
    cli_detail::write_json_doc(out, cfg);
  } else {
    OutputTarget target(cfg.out);
    CsvWriter w(target.stream(), cfg.no_header);
    w.columns({"offset", "n", "partial_sum"});
    for (const auto& r : reports)
      for (const auto& [n, s] : r.checkpoints) w.row({double(r.offset), double(n), s});
    for (const auto& r : reports)
      w.comment("offset " + std::to_string(r.offset) + ": " + r.verdict.name() +
                " (partial_sum " + g17(r.partial_sum) + ")");
  }
  return kOk;
}

}  // namespace jspec
