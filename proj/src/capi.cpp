// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "qrelax/qrelax.h"

#include <cstdlib>
#include <cstring>
#include <functional>
#include <limits>
#include <new>
#include <sstream>
#include <string>

#include "bench.hpp"
#include "error.hpp"
#include "reference.hpp"

struct qrelax_instance {
  qrelax::QcqpInstance inst;
};

struct qrelax_result {
  qrelax::SolveReport report;
  qrelax::QcqpInstance inst;
  qrelax::conic::SolverConfig cfg;
};

struct qrelax_report {
  std::function<std::string(qrelax::Format, const qrelax::RunMeta&)> render;
  qrelax::conic::SolverConfig cfg;
  std::vector<uint64_t> seeds;
  int failures = 0;
  int violations = 0;
  double value = std::numeric_limits<double>::quiet_NaN();
};

namespace {

thread_local std::string g_last_error;

qrelax_status fail(qrelax_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
qrelax_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return QRELAX_OK;
  } catch (const qrelax::Error& e) {
    return fail(static_cast<qrelax_status>(static_cast<int>(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(QRELAX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QRELAX_ERR_INTERNAL, e.what());
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw qrelax::Error(qrelax::ErrorCode::InvalidArgument, std::string("null argument: ") + what);
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

qrelax::conic::SolverConfig config_of(const qrelax_options* o) {
  qrelax::conic::SolverConfig c;
  if (o) {
    c.featol = o->featol;
    c.gaptol = o->gaptol;
    c.timeLimit = o->time_limit;
    c.maxIter = o->max_iter;
    c.verbosity = o->verbosity;
  }
  c.validate();
  return c;
}

int jobs_of(const qrelax_options* o) { return o ? o->jobs : 0; }

qrelax::Format format_of(const char* f) { return qrelax::parse_format(f ? f : "table"); }

qrelax::RunMeta meta_of(const char* command, const qrelax::conic::SolverConfig& cfg) {
  qrelax::RunMeta m;
  m.command = command ? command : "";
  m.config = cfg;
  return m;
}

std::optional<qrelax::AlphaSpec> alpha_of(const char* spec, int n) {
  if (!spec || !*spec) return std::nullopt;
  return qrelax::parse_alpha_spec(spec, n);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto b = tok.find_first_not_of(" \t");
    auto e = tok.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(tok.substr(b, e - b + 1));
  }
  return out;
}

qrelax::RelaxationSpec spec_with_alpha(const qrelax::QcqpInstance& inst, const char* relaxation,
                                       const char* alpha, const qrelax::conic::SolverConfig& cfg) {
  qrelax::RelaxationSpec spec = qrelax::parse_relaxation(relaxation);
  if (auto a = alpha_of(alpha, inst.n)) spec.alpha = qrelax::resolve_alpha(inst, *a, cfg);
  return spec;
}

}  // namespace

extern "C" {

const char* qrelax_version(void) { return QRELAX_VERSION; }

const char* qrelax_status_name(int status) {
  if (status == QRELAX_OK) return "Ok";
  if (status == QRELAX_ERR_INTERNAL) return "Internal";
  if (status >= QRELAX_ERR_INVALID_ARGUMENT && status <= QRELAX_ERR_IO)
    return qrelax::error_code_name(static_cast<qrelax::ErrorCode>(status));
  return "Unknown";
}

const char* qrelax_last_error(void) { return g_last_error.c_str(); }

void qrelax_string_free(char* s) { std::free(s); }

void qrelax_options_init(qrelax_options* opts) {
  if (!opts) return;
  qrelax::conic::SolverConfig c;
  opts->featol = c.featol;
  opts->gaptol = c.gaptol;
  opts->time_limit = c.timeLimit;
  opts->max_iter = c.maxIter;
  opts->verbosity = c.verbosity;
  opts->jobs = 0;
}

qrelax_status qrelax_options_from_env(qrelax_options* opts) {
  return guard([&] {
    require(opts, "opts");
    qrelax::conic::SolverConfig c = qrelax::conic::SolverConfig::from_env(config_of(opts));
    opts->featol = c.featol;
    opts->gaptol = c.gaptol;
    opts->time_limit = c.timeLimit;
    if (const char* j = std::getenv("QRELAX_JOBS")) {
      char* end = nullptr;
      long v = std::strtol(j, &end, 10);
      if (end == j || *end || v < 0)
        throw qrelax::Error(qrelax::ErrorCode::InvalidArgument, "QRELAX_JOBS must be a nonnegative integer");
      opts->jobs = static_cast<int>(v);
    }
  });
}

qrelax_status qrelax_instance_load(const char* path, qrelax_instance** out) {
  return guard([&] {
    require(path && out, "path/out");
    *out = nullptr;
    auto* h = new qrelax_instance{qrelax::load_instance(path)};
    *out = h;
  });
}

qrelax_status qrelax_instance_parse(const char* text, qrelax_instance** out) {
  return guard([&] {
    require(text && out, "text/out");
    *out = nullptr;
    *out = new qrelax_instance{qrelax::parse_instance(text)};
  });
}

qrelax_status qrelax_instance_generate(const qrelax_gen_spec* spec, qrelax_instance** out) {
  return guard([&] {
    require(spec && out, "spec/out");
    *out = nullptr;
    qrelax::GenSpec g;
    g.n = spec->n;
    g.l = spec->l;
    g.k = spec->k;
    g.m = spec->m;
    g.seed = spec->seed;
    if (spec->phi > 0) g.phi = spec->phi;
    g.figuresMode = spec->figures_mode != 0;
    g.nonneg = spec->nonneg != 0;
    *out = new qrelax_instance{qrelax::generate(g)};
  });
}

qrelax_status qrelax_instance_serialize(const qrelax_instance* inst, char** out) {
  return guard([&] {
    require(inst && out, "inst/out");
    *out = dup(qrelax::serialize_instance(inst->inst));
  });
}

qrelax_status qrelax_instance_save(const qrelax_instance* inst, const char* path) {
  return guard([&] {
    require(inst && path, "inst/path");
    qrelax::save_instance(inst->inst, path);
  });
}

qrelax_status qrelax_instance_info(const qrelax_instance* inst, int* n, int* l, int* k, int* m) {
  return guard([&] {
    require(inst, "inst");
    if (n) *n = inst->inst.n;
    if (l) *l = inst->inst.l();
    if (k) *k = qrelax::classify(inst->inst).k;
    if (m) *m = inst->inst.m();
  });
}

const char* qrelax_instance_name(const qrelax_instance* inst) { return inst ? inst->inst.name.c_str() : ""; }

void qrelax_instance_free(qrelax_instance* inst) { delete inst; }

qrelax_status qrelax_relaxation_names(char** out) {
  return guard([&] {
    require(out, "out");
    std::string s;
    for (const auto& n : qrelax::relaxation_names()) s += (s.empty() ? "" : ",") + n;
    *out = dup(s);
  });
}

qrelax_status qrelax_solve(const qrelax_instance* inst, const char* relaxation, const char* alpha_spec,
                           const qrelax_options* opts, qrelax_result** out) {
  return guard([&] {
    require(inst && relaxation && out, "inst/relaxation/out");
    *out = nullptr;
    auto cfg = config_of(opts);
    auto spec = spec_with_alpha(inst->inst, relaxation, alpha_spec, cfg);
    auto* r = new qrelax_result{qrelax::solve_relaxation(inst->inst, spec, cfg), inst->inst, cfg};
    *out = r;
  });
}

int qrelax_result_status(const qrelax_result* r) {
  return r ? static_cast<int>(r->report.status) : QRELAX_SOLVE_FAILED;
}

double qrelax_result_bound(const qrelax_result* r) { return r ? r->report.bound : 0.0; }

int qrelax_result_x(const qrelax_result* r, double* buf, int cap) {
  if (!r) return 0;
  const auto& x = r->report.solution.x;
  for (int i = 0; buf && i < cap && i < x.size(); ++i) buf[i] = x(i);
  return static_cast<int>(x.size());
}

qrelax_status qrelax_result_report(const qrelax_result* r, const char* format, const char* command,
                                   char** out) {
  return guard([&] {
    require(r && out, "result/out");
    *out = dup(qrelax::format_solve(r->report, r->inst, format_of(format), meta_of(command, r->cfg)));
  });
}

void qrelax_result_free(qrelax_result* r) { delete r; }

qrelax_status qrelax_compare(const qrelax_instance* inst, const char* relaxations, const char* alpha_spec,
                             int with_oracle, const qrelax_options* opts, qrelax_report** out) {
  return guard([&] {
    require(inst && relaxations && out, "inst/relaxations/out");
    *out = nullptr;
    auto cfg = config_of(opts);
    auto rep = qrelax::compare(inst->inst, split_list(relaxations), alpha_of(alpha_spec, inst->inst.n), cfg,
                               jobs_of(opts), with_oracle != 0);
    auto* r = new qrelax_report;
    r->cfg = cfg;
    r->failures = rep.solverFailures();
    r->violations = static_cast<int>(rep.violations.size() + rep.oracleViolations.size());
    if (rep.oracle) r->value = rep.oracle->bestVal;
    r->render = [rep](qrelax::Format f, const qrelax::RunMeta& m) { return qrelax::format_compare(rep, f, m); };
    *out = r;
  });
}

qrelax_status qrelax_verify(const qrelax_instance* inst, const char* check, const char* alpha_spec,
                            const qrelax_options* opts, qrelax_report** out) {
  return guard([&] {
    require(inst && check && out, "inst/check/out");
    *out = nullptr;
    auto cfg = config_of(opts);
    const bool all = std::string(check) == "all";
    std::vector<qrelax::Check> checks;
    if (all) checks = qrelax::all_checks();
    else
      for (const auto& c : split_list(check)) checks.push_back(qrelax::parse_check(c));
    auto alpha = alpha_of(alpha_spec, inst->inst.n);
    std::vector<qrelax::DominanceReport> reps;
    for (auto c : checks) {
      try {
        reps.push_back(qrelax::verify_dominance(inst->inst, c, alpha, cfg));
      } catch (const qrelax::Error& e) {
        // under "all", checks whose setting does not hold are listed as n/a
        if (!all || e.code() != qrelax::ErrorCode::SettingViolated) throw;
        qrelax::DominanceReport d;
        d.check = c;
        d.applicable = false;
        d.passed = true;
        d.detail = e.what();
        reps.push_back(d);
      }
    }
    auto* r = new qrelax_report;
    r->cfg = cfg;
    for (const auto& d : reps) r->violations += (d.applicable && !d.passed);
    std::string name = inst->inst.name;
    r->render = [reps, name](qrelax::Format f, const qrelax::RunMeta& m) {
      return qrelax::format_dominance(reps, name, f, m);
    };
    *out = r;
  });
}

qrelax_status qrelax_oracle(const qrelax_instance* inst, const qrelax_options* opts, qrelax_report** out) {
  return guard([&] {
    require(inst && out, "inst/out");
    *out = nullptr;
    auto cfg = config_of(opts);
    qrelax::OracleOptions oo;
    oo.threads = jobs_of(opts);
    auto res = qrelax::global_min(inst->inst, std::nullopt, oo);
    auto* r = new qrelax_report;
    r->cfg = cfg;
    r->value = res.bestVal;
    qrelax::QcqpInstance copy = inst->inst;
    r->render = [res, copy](qrelax::Format f, const qrelax::RunMeta& m) {
      return qrelax::format_oracle(res, copy, f, m);
    };
    *out = r;
  });
}

void qrelax_sweep_spec_init(qrelax_sweep_spec* spec) {
  if (!spec) return;
  static const int phis[] = {2, 5, 8};
  qrelax::SweepSpec d;
  spec->n = d.n;
  spec->l = d.l;
  spec->k = d.k;
  spec->phis = phis;
  spec->num_phis = 3;
  spec->m_min = d.mMin;
  spec->m_max = d.mMax;
  spec->reps = d.reps;
  spec->base_seed = d.baseSeed;
}

qrelax_status qrelax_sweep(const qrelax_sweep_spec* spec, const qrelax_options* opts, qrelax_report** out) {
  return guard([&] {
    require(spec && out, "spec/out");
    require(spec->num_phis == 0 || spec->phis, "phis");
    *out = nullptr;
    auto cfg = config_of(opts);
    qrelax::SweepSpec s;
    s.n = spec->n;
    s.l = spec->l;
    s.k = spec->k;
    s.phis.assign(spec->phis, spec->phis + spec->num_phis);
    s.mMin = spec->m_min;
    s.mMax = spec->m_max;
    s.reps = spec->reps;
    s.baseSeed = spec->base_seed;
    auto res = qrelax::figures_sweep(s, cfg, jobs_of(opts));
    auto* r = new qrelax_report;
    r->cfg = cfg;
    r->seeds.push_back(s.baseSeed);
    r->value = res.minRatio;
    for (const auto& row : res.rows) r->failures += row.skipped;
    r->render = [res](qrelax::Format f, const qrelax::RunMeta& m) { return qrelax::format_sweep(res, f, m); };
    *out = r;
  });
}

qrelax_status qrelax_reference_examples(const char* fixture_dir, const qrelax_options* opts,
                                        qrelax_report** out) {
  return guard([&] {
    require(fixture_dir && out, "fixture_dir/out");
    *out = nullptr;
    auto cfg = config_of(opts);
    auto res = qrelax::run_reference_examples(fixture_dir, cfg, jobs_of(opts));
    auto* r = new qrelax_report;
    r->cfg = cfg;
    for (const auto& o : res) r->violations += !o.pass;
    r->render = [res](qrelax::Format f, const qrelax::RunMeta& m) { return qrelax::format_reference(res, f, m); };
    *out = r;
  });
}

qrelax_status qrelax_report_render(const qrelax_report* r, const char* format, const char* command, char** out) {
  return guard([&] {
    require(r && out, "report/out");
    qrelax::RunMeta meta = meta_of(command, r->cfg);
    meta.seeds = r->seeds;
    *out = dup(r->render(format_of(format), meta));
  });
}

int qrelax_report_failures(const qrelax_report* r) { return r ? r->failures : 0; }
int qrelax_report_violations(const qrelax_report* r) { return r ? r->violations : 0; }
double qrelax_report_value(const qrelax_report* r) {
  return r ? r->value : std::numeric_limits<double>::quiet_NaN();
}
void qrelax_report_free(qrelax_report* r) { delete r; }

qrelax_status qrelax_export_cbf(const qrelax_instance* inst, const char* relaxation, const char* alpha_spec,
                                const qrelax_options* opts, char** out) {
  return guard([&] {
    require(inst && relaxation && out, "inst/relaxation/out");
    auto cfg = config_of(opts);
    auto spec = spec_with_alpha(inst->inst, relaxation, alpha_spec, cfg);
    auto ctx = qrelax::make_context(inst->inst, spec);
    auto prog = qrelax::build_relaxation(ctx, spec);
    std::ostringstream os;
    qrelax::write_cbf(qrelax::lower(prog), os,
                      std::string("instance ") + inst->inst.name + "\nrelaxation " + relaxation);
    *out = dup(os.str());
  });
}

}  // extern "C"
