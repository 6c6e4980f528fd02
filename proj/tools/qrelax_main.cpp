// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrelax/qrelax.h"

#ifndef QRELAX_DEFAULT_FIXTURES
#define QRELAX_DEFAULT_FIXTURES "fixtures"
#endif

namespace {

// 0 ok, 1 check failed, 2 bad input, 3 solver failure.
enum Exit { kOk = 0, kCheckFailed = 1, kInvalid = 2, kSolver = 3 };

struct Common {
  std::optional<double> featol, gaptol, timeLimit;
  std::optional<int> maxIter;
  int jobs = -1;
  int verbosity = 0;
  std::string format;
  std::string out;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--featol", c.featol, "Feasibility tolerance")->check(CLI::Range(1e-14, 1e-2));
  sub->add_option("--gaptol", c.gaptol, "Relative gap tolerance")->check(CLI::Range(1e-14, 1e-2));
  sub->add_option("--time-limit", c.timeLimit, "Seconds per solve, 0 = none")->check(CLI::NonNegativeNumber);
  sub->add_option("--max-iter", c.maxIter, "Interior point iteration cap")->check(CLI::PositiveNumber);
  sub->add_option("--jobs", c.jobs, "Worker threads, 0 = all cores")->check(CLI::NonNegativeNumber);
  sub->add_flag_function(
      "-v,--verbose", [&c](std::int64_t n) { c.verbosity = static_cast<int>(n); }, "Solver trace on stderr");
  sub->add_option("--format", c.format, "table, csv or structured")
      ->check(CLI::IsMember({"table", "csv", "structured"}));
  sub->add_option("--out", c.out, "Write machine-readable output here; a table still goes to stdout");
}

int report_error(qrelax_status s) {
  std::fprintf(stderr, "error [%s]: %s\n", qrelax_status_name(s), qrelax_last_error());
  if (s == QRELAX_ERR_SOLVER_FAILED || s == QRELAX_ERR_INTERNAL || s == QRELAX_ERR_NO_FEASIBLE_POINT)
    return kSolver;
  return kInvalid;
}

struct CString {
  char* p = nullptr;
  ~CString() { qrelax_string_free(p); }
};

struct ReportHandle {
  qrelax_report* p = nullptr;
  ~ReportHandle() { qrelax_report_free(p); }
};

struct InstanceHandle {
  qrelax_instance* p = nullptr;
  ~InstanceHandle() { qrelax_instance_free(p); }
};

qrelax_status make_options(const Common& c, qrelax_options& o) {
  qrelax_options_init(&o);
  qrelax_status s = qrelax_options_from_env(&o);
  if (s != QRELAX_OK) return s;
  if (c.featol) o.featol = *c.featol;
  if (c.gaptol) o.gaptol = *c.gaptol;
  if (c.timeLimit) o.time_limit = *c.timeLimit;
  if (c.maxIter) o.max_iter = *c.maxIter;
  if (c.jobs >= 0) o.jobs = c.jobs;
  o.verbosity = c.verbosity;
  return QRELAX_OK;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::fprintf(stderr, "error [Io]: cannot write %s\n", path.c_str());
    return false;
  }
  f << text;
  return static_cast<bool>(f);
}

// The requested format to --out when given (structured by default) plus a
// table on stdout, else the requested format (table by default) on stdout.
template <class Render>
int emit_with(const Common& c, Render&& render) {
  if (!c.out.empty()) {
    CString file;
    qrelax_status s = render(c.format.empty() ? "structured" : c.format.c_str(), &file.p);
    if (s != QRELAX_OK) return report_error(s);
    if (!write_file(c.out, file.p)) return kInvalid;
    CString table;
    s = render("table", &table.p);
    if (s != QRELAX_OK) return report_error(s);
    std::fputs(table.p, stdout);
    return kOk;
  }
  CString text;
  qrelax_status s = render(c.format.empty() ? "table" : c.format.c_str(), &text.p);
  if (s != QRELAX_OK) return report_error(s);
  std::fputs(text.p, stdout);
  return kOk;
}

int emit(const Common& c, const qrelax_report* rep, const std::string& command) {
  return emit_with(c, [&](const char* fmt, char** out) {
    return qrelax_report_render(rep, fmt, command.c_str(), out);
  });
}

std::string join_args(int argc, char** argv) {
  std::string s = "qrelax";
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    bool quote = a.find_first_of(" ;\"'") != std::string::npos || a.empty();
    s += " " + (quote ? "\"" + a + "\"" : a);
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex relaxations and bounds for quadratically constrained quadratic programs"};
  app.set_version_flag("--version", std::string("qrelax ") + qrelax_version());
  app.require_subcommand(1);
  const std::string command = join_args(argc, argv);

  Common common;
  std::string instancePath, relaxation = "gsrt-b", relaxations = "sdp,rlt,soc-rlt,gsrt-a,gsrt-b", alpha;
  std::string check = "all";
  std::string fixtures = QRELAX_DEFAULT_FIXTURES;
  bool withOracle = false;

  auto* solve = app.add_subcommand("solve", "Solve one relaxation");
  solve->add_option("--instance", instancePath, "Instance file or fixture stem")->required();
  solve->add_option("--relaxation", relaxation, "Relaxation name, e.g. gsrt-b or gsrt-a+sst")
      ->capture_default_str();
  solve->add_option("--alpha", alpha, "u=<list>[;alpha=<value>]");
  add_common(solve, common);

  auto* cmp = app.add_subcommand("compare", "Solve a list of relaxations and audit their ordering");
  cmp->add_option("--instance", instancePath, "Instance file or fixture stem")->required();
  cmp->add_option("--relaxations", relaxations, "Comma separated relaxation names")->capture_default_str();
  cmp->add_option("--alpha", alpha, "u=<list>[;alpha=<value>]; adds the +alpha column");
  cmp->add_flag("--oracle", withOracle, "Attach the grid oracle (n <= 4)");
  add_common(cmp, common);

  qrelax_gen_spec gen{};
  gen.n = 4;
  gen.l = 2;
  gen.k = 1;
  gen.m = 2;
  gen.seed = 1;
  bool figures = false, nonneg = false;
  auto* g = app.add_subcommand("gen", "Generate a random instance");
  g->add_option("--n", gen.n, "Variables")->capture_default_str()->check(CLI::PositiveNumber);
  g->add_option("--l", gen.l, "Quadratic constraints")->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("--k", gen.k, "Convex quadratic constraints")->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("--m", gen.m, "Linear constraints")->capture_default_str()->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  g->add_option("--phi", gen.phi, "Negative eigenvalues per nonconvex constraint");
  g->add_flag("--figures", figures, "Objective I - sum Q_i");
  g->add_flag("--nonneg", nonneg, "Append x >= 0 rows");
  std::string genOut;
  g->add_option("--out", genOut, "Output path; stdout when absent");

  auto* ver = app.add_subcommand("verify", "Evaluate dominated constraints at the dominating optimum");
  ver->add_option("--instance", instancePath, "Instance file or fixture stem")->required();
  ver->add_option("--check", check,
                  "all, alpha-lmi, hsoc, hsoc-gsoc, sst-convex, ksoc-hsoc or ksoc-gsoc")
      ->capture_default_str();
  ver->add_option("--alpha", alpha, "u=<list>[;alpha=<value>]; default u = 1, alpha computed");
  add_common(ver, common);

  qrelax_sweep_spec sw;
  qrelax_sweep_spec_init(&sw);
  std::vector<int> phis(sw.phis, sw.phis + sw.num_phis);
  auto* swp = app.add_subcommand("sweep", "Improvement ratio sweep over the number of linear rows");
  swp->add_option("--n", sw.n)->capture_default_str()->check(CLI::PositiveNumber);
  swp->add_option("--l", sw.l)->capture_default_str()->check(CLI::NonNegativeNumber);
  swp->add_option("--k", sw.k)->capture_default_str()->check(CLI::NonNegativeNumber);
  swp->add_option("--phi", phis, "Negative eigenvalue counts")->delimiter(',')->capture_default_str();
  swp->add_option("--m-min", sw.m_min)->capture_default_str()->check(CLI::NonNegativeNumber);
  swp->add_option("--m-max", sw.m_max)->capture_default_str()->check(CLI::NonNegativeNumber);
  swp->add_option("--reps", sw.reps)->capture_default_str()->check(CLI::PositiveNumber);
  swp->add_option("--seed", sw.base_seed, "Base seed")->capture_default_str();
  add_common(swp, common);

  auto* ex = app.add_subcommand("examples", "Check the bundled fixtures against reference bounds");
  ex->alias("paper-examples");
  ex->add_option("--fixtures", fixtures, "Fixture directory")->capture_default_str();
  add_common(ex, common);

  auto* orc = app.add_subcommand("oracle", "Global minimum by grid search and local refinement (n <= 4)");
  orc->add_option("--instance", instancePath, "Instance file or fixture stem")->required();
  add_common(orc, common);

  auto* exp = app.add_subcommand("export", "Write the conic program of a relaxation as CBF");
  exp->add_option("--instance", instancePath, "Instance file or fixture stem")->required();
  exp->add_option("--relaxation", relaxation)->capture_default_str();
  exp->add_option("--alpha", alpha, "u=<list>[;alpha=<value>]");
  add_common(exp, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  qrelax_options opts;
  if (qrelax_status s = make_options(common, opts); s != QRELAX_OK) return report_error(s);
  const char* alphaArg = alpha.empty() ? nullptr : alpha.c_str();

  auto load = [&](InstanceHandle& h) -> qrelax_status {
    qrelax_status s = qrelax_instance_load(instancePath.c_str(), &h.p);
    if (s == QRELAX_ERR_FIXTURE_NOT_FOUND) {
      std::string alt = std::string(QRELAX_DEFAULT_FIXTURES) + "/" + instancePath;
      if (qrelax_instance_load(alt.c_str(), &h.p) == QRELAX_OK) return QRELAX_OK;
    }
    return s;
  };

  if (*g) {
    gen.figures_mode = figures;
    gen.nonneg = nonneg;
    InstanceHandle h;
    if (qrelax_status s = qrelax_instance_generate(&gen, &h.p); s != QRELAX_OK) return report_error(s);
    if (!genOut.empty()) {
      if (qrelax_status s = qrelax_instance_save(h.p, genOut.c_str()); s != QRELAX_OK) return report_error(s);
      std::printf("# qrelax %s\n# command: %s\n# seeds: %llu\nwrote %s (%s)\n", qrelax_version(), command.c_str(),
                  static_cast<unsigned long long>(gen.seed), genOut.c_str(), qrelax_instance_name(h.p));
      return kOk;
    }
    CString text;
    if (qrelax_status s = qrelax_instance_serialize(h.p, &text.p); s != QRELAX_OK) return report_error(s);
    std::fputs(text.p, stdout);
    return kOk;
  }

  if (*swp) {
    sw.phis = phis.data();
    sw.num_phis = static_cast<int>(phis.size());
    ReportHandle rep;
    if (qrelax_status s = qrelax_sweep(&sw, &opts, &rep.p); s != QRELAX_OK) return report_error(s);
    return emit(common, rep.p, command);
  }

  if (*ex) {
    ReportHandle rep;
    if (qrelax_status s = qrelax_reference_examples(fixtures.c_str(), &opts, &rep.p); s != QRELAX_OK)
      return report_error(s);
    if (int rc = emit(common, rep.p, command); rc != kOk) return rc;
    return qrelax_report_violations(rep.p) ? kCheckFailed : kOk;
  }

  InstanceHandle inst;
  if (qrelax_status s = load(inst); s != QRELAX_OK) return report_error(s);

  if (*solve) {
    qrelax_result* raw = nullptr;
    if (qrelax_status s = qrelax_solve(inst.p, relaxation.c_str(), alphaArg, &opts, &raw); s != QRELAX_OK)
      return report_error(s);
    std::unique_ptr<qrelax_result, void (*)(qrelax_result*)> res(raw, qrelax_result_free);
    int rc = emit_with(common, [&](const char* fmt, char** out) {
      return qrelax_result_report(res.get(), fmt, command.c_str(), out);
    });
    if (rc != kOk) return rc;
    int st = qrelax_result_status(res.get());
    return (st == QRELAX_SOLVE_FAILED || st == QRELAX_SOLVE_TIMED_OUT) ? kSolver : kOk;
  }

  if (*cmp) {
    ReportHandle rep;
    if (qrelax_status s = qrelax_compare(inst.p, relaxations.c_str(), alphaArg, withOracle, &opts, &rep.p);
        s != QRELAX_OK)
      return report_error(s);
    if (int rc = emit(common, rep.p, command); rc != kOk) return rc;
    if (qrelax_report_failures(rep.p)) return kSolver;
    return qrelax_report_violations(rep.p) ? kCheckFailed : kOk;
  }

  if (*ver) {
    ReportHandle rep;
    if (qrelax_status s = qrelax_verify(inst.p, check.c_str(), alphaArg, &opts, &rep.p); s != QRELAX_OK)
      return report_error(s);
    if (int rc = emit(common, rep.p, command); rc != kOk) return rc;
    return qrelax_report_violations(rep.p) ? kCheckFailed : kOk;
  }

  if (*orc) {
    ReportHandle rep;
    if (qrelax_status s = qrelax_oracle(inst.p, &opts, &rep.p); s != QRELAX_OK) return report_error(s);
    return emit(common, rep.p, command);
  }

  if (*exp) {
    CString text;
    if (qrelax_status s = qrelax_export_cbf(inst.p, relaxation.c_str(), alphaArg, &opts, &text.p); s != QRELAX_OK)
      return report_error(s);
    if (!common.out.empty()) return write_file(common.out, text.p) ? kOk : kInvalid;
    std::fputs(text.p, stdout);
    return kOk;
  }
  return kInvalid;
}
