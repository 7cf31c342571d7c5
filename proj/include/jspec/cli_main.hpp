// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "jspec/cli.hpp"

namespace jspec {

namespace cli_detail {

inline std::vector<double> split_floats(const std::string& s, char sep) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, sep)) {
    try {
      out.push_back(std::stod(tok));
    } catch (...) {
      throw ParseError("expected a number, got \"" + tok + "\"");
    }
  }
  return out;
}

inline cplx parse_cplx(const std::string& s) {
  auto v = split_floats(s, ',');
  if (v.size() == 1) return {v[0], 0.0};
  if (v.size() == 2) return {v[0], v[1]};
  throw ParseError("complex flag: expected re or re,im");
}

inline void parse_grid(const std::string& s, RunConfig& cfg) {
  auto v = split_floats(s, ':');
  if (v.size() != 3) throw ParseError("grid: expected t0:t1:step");
  cfg.grid_t0 = v[0];
  cfg.grid_t1 = v[1];
  cfg.grid_step = v[2];
}

inline void parse_box(const std::string& s, RunConfig& cfg) {
  auto v = split_floats(s, ':');
  if (v.size() != 4) throw ParseError("box: expected x0:x1:y0:y1");
  cfg.box = {v[0], v[1], v[2], v[3]};
}

inline void parse_alpha(const std::string& s, RunConfig& cfg) {
  auto v = split_floats(s, ',');
  if (v.size() == 2)
    cfg.alpha = {cplx(v[0], 0.0), cplx(v[1], 0.0)};
  else if (v.size() == 4)
    cfg.alpha = {cplx(v[0], v[1]), cplx(v[2], v[3])};
  else
    throw ParseError("alpha: expected u0,u1 or u0re,u0im,u1re,u1im");
}

struct OptionSet {
  CLI::App* sub = nullptr;
  CLI::Option* model = nullptr;
  CLI::Option* nmax = nullptr;
  CLI::Option* nmin = nullptr;
  CLI::Option* z = nullptr;
  CLI::Option* grid = nullptr;
  CLI::Option* offset = nullptr;
  CLI::Option* gamma = nullptr;
  CLI::Option* tol = nullptr;
  CLI::Option* flatten_tol = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* format = nullptr;
  CLI::Option* strict = nullptr;
  CLI::Option* partial = nullptr;
  CLI::Option* no_header = nullptr;
  CLI::Option* dim = nullptr;
  CLI::Option* box = nullptr;
  CLI::Option* selector = nullptr;
  CLI::Option* scan = nullptr;
  CLI::Option* alpha = nullptr;
  CLI::Option* zcount = nullptr;
  CLI::Option* budget = nullptr;
  CLI::Option* config = nullptr;

  std::string model_v, z_v, grid_v, gamma_v, out_v = "-", format_v = "csv";
  std::string box_v, selector_v, scan_v, alpha_v, config_v;
  long nmax_v = 10000, nmin_v = 10, budget_v = 40000000;
  double tol_v = 1e-8, flatten_v = 1e-3;
  int offset_v = 0, dim_v = 100, zcount_v = 9;
  bool strict_v = false, partial_v = false, no_header_v = false;
};

inline void add_options(CLI::App* sub, OptionSet& o) {
  o.sub = sub;
  o.model = sub->add_option("--model", o.model_v, "model configuration (JSON)");
  o.nmax = sub->add_option("--nmax", o.nmax_v, "number of blocks / terms");
  o.nmin = sub->add_option("--nmin", o.nmin_v, "first block for bound ratios");
  o.z = sub->add_option("--z", o.z_v, "spectral parameter re[,im]");
  o.grid = sub->add_option("--grid", o.grid_v, "scan grid t0:t1:step");
  o.offset = sub->add_option("--offset", o.offset_v, "offset i within the period");
  o.gamma = sub->add_option("--gamma", o.gamma_v, "unimodular gamma re[,im]");
  o.tol = sub->add_option("--tol", o.tol_v, "realness / refinement tolerance");
  o.flatten_tol = sub->add_option("--flatten-tol", o.flatten_v, "trace flattening threshold");
  o.out = sub->add_option("--out", o.out_v, "output path, - for stdout");
  o.format = sub->add_option("--format", o.format_v, "csv or json")
                 ->check(CLI::IsMember({"csv", "json"}));
  o.strict = sub->add_flag("--strict", o.strict_v, "fail on diagnostic flags");
  o.partial = sub->add_flag("--partial", o.partial_v, "accept partial results");
  o.no_header = sub->add_flag("--no-header", o.no_header_v, "suppress the timestamp line");
  o.dim = sub->add_option("--dim", o.dim_v, "truncation dimension");
  o.box = sub->add_option("--box", o.box_v, "search box x0:x1:y0:y1");
  o.selector = sub->add_option("--selector", o.selector_v, "sequence selector for tv");
  o.scan = sub->add_option("--scan", o.scan_v, "prior lambda scan (JSON)");
  o.alpha = sub->add_option("--alpha", o.alpha_v, "initial pair u0,u1");
  o.zcount = sub->add_option("--zcount", o.zcount_v, "z samples per interval");
  o.budget = sub->add_option("--budget", o.budget_v, "contour evaluation budget for fs");
  o.config = sub->add_option("--config", o.config_v, "config file (JSON); flags win");
}

// Fills cfg from a JSON config file, then overlays every flag the user
// actually passed.
inline RunConfig assemble(const OptionSet& o) {
  RunConfig cfg;
  if (o.config->count() > 0) {
    std::ifstream in(o.config_v);
    if (!in) throw ParseError("cannot open config file: " + o.config_v);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ParseError(std::string("config file: ") + e.what());
    }
    if (j.contains("model")) cfg.model_path = j["model"].get<std::string>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("nmax")) cfg.nmax = j["nmax"].get<long>();
    if (j.contains("nmin")) cfg.nmin = j["nmin"].get<long>();
    if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
    if (j.contains("flatten_tol")) cfg.flatten_tol = j["flatten_tol"].get<double>();
    if (j.contains("z")) cfg.z = cplx_from_json(j["z"]);
    if (j.contains("gamma")) cfg.gamma = cplx_from_json(j["gamma"]);
    if (j.contains("offset")) cfg.offset = j["offset"].get<int>();
    if (j.contains("grid")) {
      if (j["grid"].is_string())
        parse_grid(j["grid"].get<std::string>(), cfg);
      else {
        cfg.grid_t0 = j["grid"].at("t0").get<double>();
        cfg.grid_t1 = j["grid"].at("t1").get<double>();
        cfg.grid_step = j["grid"].at("step").get<double>();
      }
    }
    if (j.contains("strict")) cfg.strict = j["strict"].get<bool>();
    if (j.contains("partial")) cfg.partial = j["partial"].get<bool>();
    if (j.contains("no_header")) cfg.no_header = j["no_header"].get<bool>();
    if (j.contains("dim")) cfg.dim = j["dim"].get<int>();
    if (j.contains("box")) parse_box(j["box"].get<std::string>(), cfg);
    if (j.contains("selector")) cfg.selector = j["selector"].get<std::string>();
    if (j.contains("scan")) cfg.scan_path = j["scan"].get<std::string>();
    if (j.contains("alpha")) parse_alpha(j["alpha"].get<std::string>(), cfg);
    if (j.contains("zcount")) cfg.zcount = j["zcount"].get<int>();
    if (j.contains("budget")) cfg.fs_budget = j["budget"].get<long>();
  }
  if (o.model->count()) cfg.model_path = o.model_v;
  if (o.nmax->count()) cfg.nmax = o.nmax_v;
  if (o.nmin->count()) cfg.nmin = o.nmin_v;
  if (o.z->count()) cfg.z = parse_cplx(o.z_v);
  if (o.grid->count()) parse_grid(o.grid_v, cfg);
  if (o.offset->count()) cfg.offset = o.offset_v;
  if (o.gamma->count()) cfg.gamma = parse_cplx(o.gamma_v);
  if (o.tol->count()) cfg.tol = o.tol_v;
  if (o.flatten_tol->count()) cfg.flatten_tol = o.flatten_v;
  if (o.out->count()) cfg.out = o.out_v;
  if (o.format->count()) cfg.format = o.format_v;
  if (o.strict->count()) cfg.strict = o.strict_v;
  if (o.partial->count()) cfg.partial = o.partial_v;
  if (o.no_header->count()) cfg.no_header = o.no_header_v;
  if (o.dim->count()) cfg.dim = o.dim_v;
  if (o.box->count()) parse_box(o.box_v, cfg);
  if (o.selector->count()) cfg.selector = o.selector_v;
  if (o.scan->count()) cfg.scan_path = o.scan_v;
  if (o.alpha->count()) parse_alpha(o.alpha_v, cfg);
  if (o.zcount->count()) cfg.zcount = o.zcount_v;
  if (o.budget->count()) cfg.fs_budget = o.budget_v;
  return cfg;
}

}  // namespace cli_detail

// Full command-line entry point; args excludes the program name.
// Returns the process exit code.
inline int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"spectral diagnostics for complex Jacobi matrices"};
  app.require_subcommand(1);

  struct Cmd {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&);
  };
  const Cmd cmds[] = {
      {"lambda", "scan a line for the elliptic set of the limit transfer matrices", cmd_lambda},
      {"turan", "trace shifted Turan determinants along a trajectory", cmd_turan},
      {"bounds", "two-sided eigenvector bound ratios on scanned intervals", cmd_bounds},
      {"classify", "proper/improper classification with spectral claims", cmd_classify},
      {"fs", "finite-section eigenvalues by winding counts", cmd_fs},
      {"tv", "twisted total variation of coefficient-derived sequences", cmd_tv},
  };

  std::vector<cli_detail::OptionSet> sets(std::size(cmds));
  for (size_t k = 0; k < std::size(cmds); ++k) {
    CLI::App* sub = app.add_subcommand(cmds[k].name, cmds[k].help);
    cli_detail::add_options(sub, sets[k]);
  }

  std::vector<const char*> argv;
  argv.push_back("jspec");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kIoError;
  }

  for (size_t k = 0; k < std::size(cmds); ++k) {
    if (!sets[k].sub->parsed()) continue;
    try {
      RunConfig cfg = cli_detail::assemble(sets[k]);
      return cmds[k].fn(cfg);
    } catch (const ParseError& e) {
      std::cerr << cmds[k].name << ": " << e.what() << "\n";
      return kIoError;
    } catch (const Error& e) {
      std::cerr << cmds[k].name << ": " << e.what() << "\n";
      return kPrecondition;
    } catch (const json::exception& e) {
      std::cerr << cmds[k].name << ": " << e.what() << "\n";
      return kIoError;
    }
  }
  return kIoError;
}

}  // namespace jspec
