// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "json.hpp"

#ifndef QRELAX_VERSION
#define QRELAX_VERSION "0.0.0"
#endif

namespace qrelax {

using ojson = nlohmann::ordered_json;

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double Rng::uniform(double a, double b) {
  double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  return a + (b - a) * u;
}

double round_half_away(double v) { return std::round(v); }

void GenSpec::validate() const {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "gen: n must be positive");
  if (l < 0 || k < 0 || k > l) throw Error(ErrorCode::InvalidArgument, "gen: need 0 <= k <= l");
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "gen: m must be nonnegative");
  if (phi && (*phi < 1 || *phi > n - 1))
    throw Error(ErrorCode::InvalidArgument, "gen: phi must lie in [1, n-1]");
}

std::string GenSpec::name() const {
  std::ostringstream os;
  os << "set-" << n << "-" << l << "-" << k << "-" << m << "-s" << seed;
  if (phi) os << "-phi" << *phi;
  if (figuresMode) os << "-fig";
  if (nonneg) os << "-nn";
  return os.str();
}

namespace {

Mat householder_product(Rng& rng, int n) {
  Mat P = Mat::Identity(n, n);
  for (int t = 0; t < 3; ++t) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w(i) = rng.uniform(-1.0, 1.0);
    double nw = w.squaredNorm();
    Mat U = Mat::Identity(n, n);
    if (nw > 0) U -= 2.0 * w * w.transpose() / nw;
    P = P * U;
  }
  return P;
}

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

QcqpInstance generate(const GenSpec& spec) {
  spec.validate();
  const int n = spec.n;
  Rng rng(spec.seed);
  QcqpInstance inst;
  inst.name = spec.name();
  inst.n = n;

  Mat P0 = householder_product(rng, n);
  Vec T0(n);
  for (int t = 0; t < n; ++t) T0(t) = rng.uniform(-50.0, 50.0);
  Mat Q0 = sym(P0 * T0.asDiagonal() * P0.transpose()).unaryExpr([](double v) { return round_half_away(v); });
  inst.c0.resize(n);
  for (int t = 0; t < n; ++t) inst.c0(t) = rng.uniform(-50.0, 50.0);

  const int negCount = spec.phi ? *spec.phi : n / 2;
  Mat sumQ = Mat::Zero(n, n);
  for (int i = 0; i < spec.l; ++i) {
    const bool convex = i < spec.k;
    Mat P = householder_product(rng, n);
    Vec T(n);
    for (int t = 0; t < n; ++t) {
      if (convex || t >= negCount) T(t) = rng.uniform(0.0, 50.0);
      else T(t) = rng.uniform(-50.0, 0.0);
    }
    Mat Q = sym(P * T.asDiagonal() * P.transpose());
    Vec c(n);
    for (int t = 0; t < n; ++t) c(t) = convex ? rng.uniform(-100.0, 0.0) : rng.uniform(0.0, 100.0);
    const double theta = -Q(0, 0) - c(0);
    const double d = convex ? rng.uniform(-100.0 + theta, theta) : rng.uniform(-10.0 + theta, theta);
    inst.quad.push_back({SymMatrix(Q), c, d});
    sumQ += Q;
  }
  inst.Q0 = spec.figuresMode ? SymMatrix(Mat(Mat::Identity(n, n) - sumQ)) : SymMatrix(Q0);

  for (int j = 0; j < spec.m; ++j) {
    Vec a(n);
    double vt = 0.0;
    for (int t = 0; t < n; ++t) {
      a(t) = round_half_away(rng.uniform(-50.0, 50.0));
      vt += std::max(0.0, a(t));
    }
    vt *= 0.5;
    double th = rng.uniform(-10.0 - vt, -vt);
    inst.lin.push_back({a, round_half_away(th)});
  }
  if (spec.nonneg)
    for (int i = 0; i < n; ++i) {
      Vec a = Vec::Zero(n);
      a(i) = -1.0;
      inst.lin.push_back({a, 0.0});
    }
  inst.validate();
  return inst;
}

AlphaSpec parse_alpha_spec(const std::string& text, int n) {
  AlphaSpec out;
  std::stringstream ss(text);
  std::string part;
  bool haveU = false;
  while (std::getline(ss, part, ';')) {
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "alpha: expected key=value, got '" + part + "'");
    std::string key = part.substr(0, eq), val = part.substr(eq + 1);
    try {
      if (key == "u") {
        std::vector<double> vals;
        std::stringstream vs(val);
        std::string tok;
        while (std::getline(vs, tok, ',')) vals.push_back(std::stod(tok));
        out.u = Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
        haveU = true;
      } else if (key == "alpha") {
        out.alpha = std::stod(val);
      } else {
        throw Error(ErrorCode::InvalidArgument, "alpha: unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw Error(ErrorCode::InvalidArgument, "alpha: cannot parse '" + val + "'");
    } catch (const std::out_of_range&) {
      throw Error(ErrorCode::InvalidArgument, "alpha: value out of range '" + val + "'");
    }
  }
  if (!haveU) throw Error(ErrorCode::InvalidArgument, "alpha: missing u=<list>");
  if (out.u.size() != n)
    throw Error(ErrorCode::DimError, "alpha: u has " + std::to_string(out.u.size()) +
                                         " entries, instance has n = " + std::to_string(n));
  return out;
}

AlphaAug resolve_alpha(const QcqpInstance& inst, const AlphaSpec& a, const conic::SolverConfig& cfg) {
  if (a.alpha) {
    if (!(*a.alpha > 0)) throw Error(ErrorCode::AlphaInvalid, "alpha: alpha_u must be positive");
    AlphaAug out;
    out.u = a.u;
    out.alphaU = *a.alpha;
    out.source = AlphaAug::Source::UserSupplied;
    return out;
  }
  return compute_alpha(inst, a.u, cfg);
}

std::vector<std::string> expand_relaxations(const std::vector<std::string>& names, bool withAlpha) {
  std::vector<std::string> out = names;
  if (!withAlpha) return out;
  for (const auto& nm : names) {
    RelaxationSpec s = parse_relaxation(nm);
    if (s.alphaRow || s.alphaDiag || s.hsoc) continue;
    if (nm == "sdp") continue;
    out.push_back(nm + "+alpha");
  }
  return out;
}

bool contained_in(const RelaxationSpec& a, const RelaxationSpec& b) {
  if (a.boundProducts != b.boundProducts || a.epigraph != b.epigraph) return false;
  if (a.alphaRow && !b.alphaRow) return false;
  const bool aSoc = a.socRlt || a.socRltB, bSoc = b.socRlt || b.socRltB;
  if (aSoc && !bSoc) return false;
  const bool aUsesForms = aSoc || a.sst || a.ksocSub || a.ksocFull;
  if (aUsesForms && a.socRltB != b.socRltB) return false;
  if (a.rlt && !b.rlt) return false;
  const bool aG = a.gsrtA || a.gsrtB, bG = b.gsrtA || b.gsrtB;
  if (aG && (!bG || a.gsrtB != b.gsrtB)) return false;
  if ((a.sst || a.ksocSub || a.ksocFull) && a.gsrtB != b.gsrtB) return false;
  if (a.sst && !b.sst) return false;
  if (a.ksocSub && !b.ksocSub) return false;
  if (a.ksocFull && !b.ksocFull) return false;
  if (a.sstIncludeConvexPairs && !b.sstIncludeConvexPairs) return false;
  if (a.alphaDiag && !b.alphaDiag) return false;
  if (a.hsoc && !b.hsoc) return false;
  return true;
}

int CompareReport::solverFailures() const {
  int f = 0;
  for (const auto& c : cells)
    if (!c.ok || c.report.status == conic::Status::Failed || c.report.status == conic::Status::TimedOut)
      ++f;
  return f;
}

std::optional<double> improvement_ratio(double vRlt, double vGsrt) {
  if (!std::isfinite(vRlt) || !std::isfinite(vGsrt) || vRlt == 0.0) return std::nullopt;
  return (vGsrt - vRlt) / std::abs(vRlt);
}

namespace {

void run_pool(int count, int jobs, const std::function<void(int)>& work) {
  unsigned nt = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, std::max(1, count));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) work(i);
  };
  if (nt <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

bool optimal(const CompareCell& c) { return c.ok && c.report.status == conic::Status::Optimal; }

}  // namespace

CompareReport compare(const QcqpInstance& inst, const std::vector<std::string>& relaxations,
                      const std::optional<AlphaSpec>& alpha, const conic::SolverConfig& cfg, int jobs,
                      bool withOracle) {
  if (relaxations.empty()) throw Error(ErrorCode::InvalidArgument, "compare: empty relaxation list");
  inst.validate();
  CompareReport rep;
  rep.instance = inst.name;
  Classification cls = classify(inst);
  rep.n = inst.n;
  rep.l = inst.l();
  rep.k = cls.k;
  rep.m = inst.m();
  std::vector<std::string> names = expand_relaxations(relaxations, alpha.has_value());
  std::vector<RelaxationSpec> specs;
  for (const auto& nm : names) specs.push_back(parse_relaxation(nm));
  if (alpha) rep.alpha = resolve_alpha(inst, *alpha, cfg);
  for (auto& s : specs)
    if (rep.alpha) s.alpha = rep.alpha;

  rep.cells.resize(names.size());
  run_pool(static_cast<int>(names.size()), jobs, [&](int i) {
    CompareCell& c = rep.cells[i];
    c.relaxation = names[i];
    try {
      c.report = solve_relaxation(inst, specs[i], cfg);
      c.ok = true;
    } catch (const Error& e) {
      c.error = std::string(error_code_name(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  });

  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = 0; j < names.size(); ++j) {
      if (i == j || !optimal(rep.cells[i]) || !optimal(rep.cells[j])) continue;
      if (!contained_in(specs[i], specs[j])) continue;
      double bi = rep.cells[i].report.bound, bj = rep.cells[j].report.bound;
      if (bi > bj + kMonotoneTol * std::max(1.0, std::abs(bj)))
        rep.violations.push_back({names[i], names[j], bi, bj});
    }

  auto find = [&](const std::string& nm) -> const CompareCell* {
    for (const auto& c : rep.cells)
      if (c.relaxation == nm) return &c;
    return nullptr;
  };
  const CompareCell* ga = find("gsrt-a");
  const CompareCell* gb = find("gsrt-b");
  if (ga && gb && optimal(*ga) && optimal(*gb) &&
      gb->report.bound < ga->report.bound - kMonotoneTol * std::max(1.0, std::abs(ga->report.bound)))
    rep.findings.push_back("gsrt-b bound is below gsrt-a bound");
  const CompareCell* rl = find("rlt");
  const CompareCell* g = (gb && optimal(*gb)) ? gb : ga;
  if (rl && g && optimal(*rl) && optimal(*g)) {
    rep.improvementRatio = improvement_ratio(rl->report.bound, g->report.bound);
    rep.ratioFamily = g->relaxation;
  }
  for (const auto& c : rep.cells)
    for (const auto& note : c.report.notes) rep.findings.push_back(c.relaxation + ": " + note);

  if (withOracle) {
    if (inst.n > 4) {
      rep.findings.push_back("oracle skipped: n > 4");
    } else {
      try {
        rep.oracle = global_min(inst);
        for (const auto& c : rep.cells)
          if (optimal(c) && c.report.bound > rep.oracle->bestVal + kOracleTol)
            rep.oracleViolations.push_back(c.relaxation);
      } catch (const Error& e) {
        rep.findings.push_back(std::string("oracle: ") + e.what());
      }
    }
  }
  return rep;
}

const char* check_name(Check c) {
  switch (c) {
    case Check::AlphaLmi: return "alpha-lmi";
    case Check::Hsoc: return "hsoc";
    case Check::HsocGsoc: return "hsoc-gsoc";
    case Check::SstConvex: return "sst-convex";
    case Check::KsocHsoc: return "ksoc-hsoc";
    case Check::KsocGsoc: return "ksoc-gsoc";
  }
  return "?";
}

const std::vector<Check>& all_checks() {
  static const std::vector<Check> v = {Check::AlphaLmi, Check::Hsoc,     Check::HsocGsoc,
                                       Check::SstConvex, Check::KsocHsoc, Check::KsocGsoc};
  return v;
}

Check parse_check(const std::string& s) {
  for (Check c : all_checks())
    if (s == check_name(c)) return c;
  std::string valid;
  for (Check c : all_checks()) valid += std::string(valid.empty() ? "" : ", ") + check_name(c);
  throw Error(ErrorCode::InvalidArgument, "unknown check '" + s + "'; valid: " + valid);
}

namespace {

Mat eval_matrix(const std::vector<std::vector<LinExpr>>& K, const Vec& v) {
  const int d = static_cast<int>(K.size());
  Mat M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = K[i][j].eval(v);
  return 0.5 * (M + M.transpose());
}

// [[diag(u) diag(x), diag(u) x], [x^T diag(u), alpha]]
std::vector<std::vector<AffXZ>> alpha_matrix(const AlphaAug& a, int n, int nz) {
  AffXZ zero = AffXZ::constant(n, nz, 0.0);
  std::vector<std::vector<AffXZ>> P(n + 1, std::vector<AffXZ>(n + 1, zero));
  for (int j = 0; j < n; ++j) {
    Vec e = Vec::Zero(n);
    e(j) = a.u(j);
    P[j][j] = AffXZ::of_x(e, nz);
    P[j][n] = P[j][j];
    P[n][j] = P[j][j];
  }
  P[n][n] = AffXZ::constant(n, nz, a.alphaU);
  return P;
}

std::string dominating_name(Check c) {
  switch (c) {
    case Check::AlphaLmi: return "rlt+alpha";
    case Check::Hsoc:
    case Check::KsocHsoc: return "soc-rlt+alpha";
    case Check::HsocGsoc:
    case Check::KsocGsoc: return "gsrt-a+alpha";
    case Check::SstConvex: return "sdp";
  }
  return "sdp";
}

void finish(DominanceReport& r) {
  r.passed = true;
  r.worst = std::numeric_limits<double>::infinity();
  for (const auto& it : r.items) {
    r.passed = r.passed && it.pass;
    r.worst = std::min(r.worst, it.value);
  }
  if (r.items.empty()) r.worst = 0.0;
}

DominanceReport verify_sst_convex(const QcqpInstance& inst, const conic::SolverConfig& cfg) {
  DominanceReport r;
  r.check = Check::SstConvex;
  r.dominating = "sdp";
  RelaxationSpec spec;
  spec.socRltB = true;
  BuildContext ctx = make_context(inst, spec);
  std::vector<int> forms;
  for (size_t s = 0; s < ctx.gsocs.size(); ++s)
    if (ctx.gsocs[s].fromConvex && ctx.gsocs[s].typeB) forms.push_back(static_cast<int>(s));
  if (forms.size() < 2)
    throw Error(ErrorCode::SettingViolated, "sst-convex needs two type-B convex constraints");
  std::vector<std::pair<int, int>> pairs;
  for (size_t a = 0; a < forms.size(); ++a)
    for (size_t b = a + 1; b < forms.size(); ++b) pairs.push_back({forms[a], forms[b]});
  ConicProgram base = build_sdp(ctx, 0, spec.boundProducts);
  ConicProgram with = base;
  add_sst(with, ctx, pairs);
  SolveReport r0 = solve_program(base, cfg), r1 = solve_program(with, cfg);
  r.status = r0.status;
  r.bound = r0.bound;
  if (r0.status != conic::Status::Optimal || r1.status != conic::Status::Optimal) {
    r.detail = std::string("solver status ") + conic::status_name(r0.status) + " / " +
               conic::status_name(r1.status);
    r.passed = false;
    return r;
  }
  double rel = std::abs(r1.bound - r0.bound) / std::max(1.0, std::abs(r0.bound));
  r.items.push_back({"bound change (relative)", rel, rel < kResidualTol});
  std::ostringstream os;
  os << std::setprecision(10) << "without " << r0.bound << ", with " << r1.bound;
  r.detail = os.str();
  r.passed = rel < kResidualTol;
  r.worst = rel;
  return r;
}

}  // namespace

DominanceReport verify_dominance(const QcqpInstance& inst, Check check,
                                 const std::optional<AlphaSpec>& alpha,
                                 const conic::SolverConfig& cfg) {
  if (check == Check::SstConvex) return verify_sst_convex(inst, cfg);
  DominanceReport r;
  r.check = check;
  r.dominating = dominating_name(check);
  AlphaSpec as = alpha ? *alpha : AlphaSpec{Vec::Ones(inst.n), std::nullopt};
  AlphaAug aug = resolve_alpha(inst, as, cfg);
  RelaxationSpec spec = parse_relaxation(r.dominating);
  spec.alpha = aug;
  BuildContext ctx = make_context(inst, spec);
  check_nonneg_setting(ctx, aug);
  ConicProgram prog = build_relaxation(ctx, spec);
  SolveReport sol = solve_program(prog, cfg);
  r.status = sol.status;
  r.bound = sol.bound;
  if (sol.status != conic::Status::Optimal && sol.status != conic::Status::Inaccurate) {
    r.detail = std::string("dominating relaxation ended with status ") + conic::status_name(sol.status);
    r.passed = false;
    return r;
  }
  const Vec& v = sol.solution.raw;
  const LiftedSpace& sp = prog.space;
  const int n = sp.n(), nz = sp.nz();
  auto addItem = [&](const std::string& name, double value) {
    r.items.push_back({name, value, value >= -kResidualTol});
  };

  switch (check) {
    case Check::AlphaLmi: {
      ConicProgram scratch(sp);
      add_alpha_diag(scratch, ctx, aug);
      addItem("alpha-lmi", min_eig(scratch.psdBlocks[0].eval(v)));
      break;
    }
    case Check::Hsoc: {
      ConicProgram scratch(sp);
      add_hsoc(scratch, ctx, aug);
      for (const auto& b : scratch.psdBlocks) addItem(b.name, min_eig(b.eval(v)));
      break;
    }
    case Check::HsocGsoc: {
      std::vector<std::string> skipped;
      for (size_t s = 0; s < ctx.gsocs.size(); ++s) {
        const auto& f = ctx.gsocs[s];
        if (f.p() > n) {
          skipped.push_back(std::to_string(s));
          continue;
        }
        auto A = gsoc_arrow(f, n, nz);
        const int p = f.p();
        PsdBlock b(n + 1, sp.size(), "hsoc-gsoc:" + std::to_string(s));
        for (int j = 0; j < n; ++j) {
          Vec e = Vec::Zero(n);
          e(j) = aug.u(j);
          AffXZ ux = AffXZ::of_x(e, nz);
          b.at(j, j) = linearize_product(sp, A[p][p], ux);
          if (j < p) b.at(n, j) = linearize_product(sp, A[j][p], ux);
        }
        b.at(n, n) = aug.alphaU * embed(sp, A[p][p]);
        addItem(b.name, min_eig(b.eval(v)));
      }
      if (!skipped.empty()) {
        std::string list;
        for (const auto& s : skipped) list += (list.empty() ? "" : ",#") + s;
        r.detail = "skipped forms with more than n rows: #" + list;
      }
      break;
    }
    case Check::KsocHsoc: {
      auto Phi = alpha_matrix(aug, n, nz);
      for (int i : ctx.cls.convexIdx) {
        const auto& q = ctx.inst.quad[i];
        Mat B = psd_factor_ascending(q.Q);
        AffXZ zero = AffXZ::constant(n, nz, 0.0);
        std::vector<std::vector<AffXZ>> A(n + 1, std::vector<AffXZ>(n + 1, zero));
        for (int a = 0; a < n; ++a) {
          A[a][a] = AffXZ::constant(n, nz, -1.0);
          A[a][n] = AffXZ::of_x(B.row(a).transpose(), nz);
          A[n][a] = A[a][n];
        }
        A[n][n] = AffXZ::of_x(q.c, nz, q.d);
        Mat T = eval_matrix(linearize_kron(sp, A, Phi), v);
        addItem("ksoc-hsoc:" + std::to_string(i), -max_eig(T));
      }
      break;
    }
    case Check::KsocGsoc: {
      auto Phi = alpha_matrix(aug, n, nz);
      for (size_t s = 0; s < ctx.gsocs.size(); ++s) {
        Mat T = eval_matrix(linearize_kron(sp, gsoc_arrow(ctx.gsocs[s], n, nz), Phi), v);
        addItem("ksoc-gsoc:" + std::to_string(s), min_eig(T));
      }
      break;
    }
    case Check::SstConvex: break;
  }
  finish(r);
  if (r.items.empty()) {
    r.applicable = false;
    if (r.detail.empty()) r.detail = "no constraint of the required kind";
  }
  return r;
}

uint64_t sweep_seed(uint64_t base, int phi, int m, int rep) {
  uint64_t key = splitmix64(static_cast<uint64_t>(phi) * 0x9E3779B97F4A7C15ULL) ^
                 splitmix64(static_cast<uint64_t>(m) * 0xBF58476D1CE4E5B9ULL + static_cast<uint64_t>(rep));
  return splitmix64(base ^ key);
}

SweepReport figures_sweep(const SweepSpec& spec, const conic::SolverConfig& cfg, int jobs) {
  if (spec.reps < 1 || spec.mMin < 0 || spec.mMax < spec.mMin)
    throw Error(ErrorCode::InvalidArgument, "sweep: invalid m range or repetitions");
  struct Job {
    int phi, m, rep;
    uint64_t seed;
    std::optional<double> ra, rb;
    bool inexact = false;
  };
  std::vector<Job> work;
  for (int phi : spec.phis)
    for (int m = spec.mMin; m <= spec.mMax; ++m)
      for (int rep = 0; rep < spec.reps; ++rep)
        work.push_back({phi, m, rep, sweep_seed(spec.baseSeed, phi, m, rep), {}, {}, false});
  run_pool(static_cast<int>(work.size()), jobs, [&](int i) {
    Job& j = work[i];
    GenSpec g;
    g.n = spec.n;
    g.l = spec.l;
    g.k = spec.k;
    g.m = j.m;
    g.seed = j.seed;
    g.phi = j.phi;
    g.figuresMode = true;
    QcqpInstance inst = generate(g);
    auto bound = [&](const char* nm) -> std::optional<double> {
      try {
        SolveReport r = solve_relaxation(inst, parse_relaxation(nm), cfg);
        if (r.status == conic::Status::Optimal) return r.bound;
        // A stalled run whose dual is feasible to within a small multiple of
        // the tolerance still certifies its dual objective.
        const double loose = kNearOptimalFactor * cfg.featol;
        if (r.status == conic::Status::Inaccurate && r.boundIsDual && r.solution.dres <= loose &&
            r.solution.pres <= loose) {
          j.inexact = true;
          return r.bound;
        }
      } catch (const Error&) {
      }
      return std::nullopt;
    };
    auto rl = bound("rlt");
    if (!rl) return;
    auto a = bound("gsrt-a");
    auto b = bound("gsrt-b");
    if (a) j.ra = improvement_ratio(*rl, *a);
    if (b) j.rb = improvement_ratio(*rl, *b);
  });
  SweepReport out;
  out.spec = spec;
  out.minRatio = std::numeric_limits<double>::infinity();
  for (int phi : spec.phis)
    for (int m = spec.mMin; m <= spec.mMax; ++m) {
      SweepRow row;
      row.phi = phi;
      row.m = m;
      double sa = 0, sb = 0;
      row.maxA = row.maxB = -std::numeric_limits<double>::infinity();
      for (const auto& j : work) {
        if (j.phi != phi || j.m != m) continue;
        if (!j.ra || !j.rb) {
          ++row.skipped;
          continue;
        }
        ++row.count;
        row.inexact += j.inexact;
        sa += *j.ra;
        sb += *j.rb;
        row.maxA = std::max(row.maxA, *j.ra);
        row.maxB = std::max(row.maxB, *j.rb);
        out.minRatio = std::min({out.minRatio, *j.ra, *j.rb});
      }
      if (row.count) {
        row.meanA = sa / row.count;
        row.meanB = sb / row.count;
      } else {
        row.maxA = row.maxB = std::numeric_limits<double>::quiet_NaN();
        row.meanA = row.meanB = std::numeric_limits<double>::quiet_NaN();
      }
      out.rows.push_back(row);
    }
  if (!std::isfinite(out.minRatio)) out.minRatio = std::numeric_limits<double>::quiet_NaN();
  return out;
}

Format parse_format(const std::string& s) {
  if (s == "table") return Format::Table;
  if (s == "csv") return Format::Csv;
  if (s == "structured" || s == "json") return Format::Structured;
  throw Error(ErrorCode::InvalidArgument, "unknown format '" + s + "'; valid: table, csv, structured");
}

namespace {

std::string num(double v, int prec = 10) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

ojson jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

ojson meta_json(const RunMeta& m) {
  ojson j;
  j["tool"] = "qrelax";
  j["version"] = QRELAX_VERSION;
  j["command"] = m.command;
  j["seeds"] = m.seeds;
  j["solver"] = {{"backend", "qrelax-ipm"},
                 {"featol", m.config.featol},
                 {"gaptol", m.config.gaptol},
                 {"max_iter", m.config.maxIter},
                 {"time_limit", m.config.timeLimit}};
  return j;
}

std::string pad(const std::string& s, size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<size_t> w;
  for (const auto& r : rows)
    for (size_t i = 0; i < r.size(); ++i) {
      if (w.size() <= i) w.push_back(0);
      w[i] = std::max(w[i], r[i].size());
    }
  std::ostringstream os;
  for (size_t k = 0; k < rows.size(); ++k) {
    for (size_t i = 0; i < rows[k].size(); ++i) os << (i ? "  " : "") << pad(rows[k][i], w[i]);
    os << "\n";
    if (k == 0) {
      size_t total = 0;
      for (size_t i = 0; i < w.size(); ++i) total += w[i] + (i ? 2 : 0);
      os << std::string(total, '-') << "\n";
    }
  }
  return os.str();
}

std::string status_of(const CompareCell& c) {
  return c.ok ? conic::status_name(c.report.status) : "Error";
}

ojson cell_json(const CompareCell& c) {
  ojson j;
  j["relaxation"] = c.relaxation;
  j["status"] = status_of(c);
  if (!c.ok) {
    j["error"] = c.error;
    return j;
  }
  j["bound"] = jnum(c.report.bound);
  j["bound_is_dual"] = c.report.boundIsDual;
  j["time_s"] = c.report.seconds;
  j["build_s"] = c.report.buildSeconds;
  j["iterations"] = c.report.iterations;
  j["n_lin"] = c.report.nLin;
  j["n_soc"] = c.report.nSoc;
  j["n_psd"] = c.report.nPsd;
  j["x"] = std::vector<double>(c.report.solution.x.data(),
                               c.report.solution.x.data() + c.report.solution.x.size());
  if (!c.report.diagnostic.empty()) j["diagnostic"] = c.report.diagnostic;
  return j;
}

}  // namespace

std::string header_lines(const RunMeta& meta) {
  std::ostringstream os;
  os << "# qrelax " << QRELAX_VERSION << "\n";
  if (!meta.command.empty()) os << "# command: " << meta.command << "\n";
  os << "# seeds:";
  if (meta.seeds.empty()) os << " none";
  for (auto s : meta.seeds) os << " " << s;
  os << "\n# solver: qrelax-ipm featol=" << num(meta.config.featol)
     << " gaptol=" << num(meta.config.gaptol) << " max_iter=" << meta.config.maxIter
     << " time_limit=" << num(meta.config.timeLimit) << "\n";
  return os.str();
}

std::string format_compare(const CompareReport& r, Format f, const RunMeta& meta) {
  if (f == Format::Structured) {
    ojson j;
    j["meta"] = meta_json(meta);
    j["instance"] = {{"name", r.instance}, {"n", r.n}, {"l", r.l}, {"k", r.k}, {"m", r.m}};
    if (r.alpha) {
      j["alpha"] = {{"u", std::vector<double>(r.alpha->u.data(), r.alpha->u.data() + r.alpha->u.size())},
                    {"alpha_u", r.alpha->alphaU},
                    {"source", r.alpha->source == AlphaAug::Source::UserSupplied ? "user" : "computed"}};
    }
    j["results"] = ojson::array();
    for (const auto& c : r.cells) j["results"].push_back(cell_json(c));
    j["improvement_ratio"] = r.improvementRatio ? ojson(*r.improvementRatio) : ojson(nullptr);
    j["ratio_family"] = r.ratioFamily;
    j["dominance_violations"] = ojson::array();
    for (const auto& v : r.violations)
      j["dominance_violations"].push_back({{"weaker", v.weaker},
                                           {"stronger", v.stronger},
                                           {"weaker_bound", v.weakerBound},
                                           {"stronger_bound", v.strongerBound}});
    j["findings"] = r.findings;
    if (r.oracle) {
      j["oracle"] = {{"value", r.oracle->bestVal},
                     {"x", std::vector<double>(r.oracle->bestX.data(),
                                               r.oracle->bestX.data() + r.oracle->bestX.size())},
                     {"resolution", r.oracle->gridResolution},
                     {"violations", r.oracleViolations}};
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << header_lines(meta);
  os << "# instance: " << r.instance << " n=" << r.n << " l=" << r.l << " k=" << r.k << " m=" << r.m << "\n";
  if (r.alpha)
    os << "# alpha: u=" << [&] {
      std::string s;
      for (int i = 0; i < r.alpha->u.size(); ++i) s += (i ? "," : "") + num(r.alpha->u(i));
      return s;
    }() << " alpha_u=" << num(r.alpha->alphaU)
       << (r.alpha->source == AlphaAug::Source::UserSupplied ? " (user)" : " (computed)") << "\n";
  if (f == Format::Csv) {
    os << "name,family,bound,status,time_s,n_soc,n_psd,n_lin\n";
    for (const auto& c : r.cells) {
      os << r.instance << "," << c.relaxation << "," << (c.ok ? num(c.report.bound) : "nan") << ","
         << status_of(c) << "," << (c.ok ? num(c.report.seconds, 6) : "0") << ","
         << c.report.nSoc << "," << c.report.nPsd << "," << c.report.nLin << "\n";
    }
  } else {
    std::vector<std::vector<std::string>> rows;
    const bool alphaCols = r.alpha.has_value();
    std::vector<std::string> head = {"relaxation", "bound", "status", "time_s", "n_lin", "n_soc", "n_psd"};
    if (alphaCols) {
      head.push_back("alpha bound");
      head.push_back("alpha status");
    }
    rows.push_back(head);
    for (const auto& c : r.cells) {
      if (alphaCols && c.relaxation.size() > 6 &&
          c.relaxation.compare(c.relaxation.size() - 6, 6, "+alpha") == 0)
        continue;
      std::vector<std::string> row = {c.relaxation,
                                      c.ok ? num(c.report.bound, 8) : "-",
                                      status_of(c),
                                      c.ok ? num(c.report.seconds, 3) : "-",
                                      std::to_string(c.report.nLin),
                                      std::to_string(c.report.nSoc),
                                      std::to_string(c.report.nPsd)};
      if (alphaCols) {
        const CompareCell* a = nullptr;
        for (const auto& d : r.cells)
          if (d.relaxation == c.relaxation + "+alpha") a = &d;
        row.push_back(a ? (a->ok ? num(a->report.bound, 8) : "-") : "---");
        row.push_back(a ? status_of(*a) : "---");
      }
      rows.push_back(row);
    }
    os << render_table(rows);
    for (const auto& c : r.cells)
      if (!c.ok) os << "error " << c.relaxation << ": " << c.error << "\n";
  }
  if (r.improvementRatio)
    os << "# improvement ratio (" << r.ratioFamily << " vs rlt): " << num(*r.improvementRatio) << "\n";
  os << "# dominance violations: " << r.violations.size() << "\n";
  for (const auto& v : r.violations)
    os << "#   " << v.weaker << " (" << num(v.weakerBound) << ") > " << v.stronger << " ("
       << num(v.strongerBound) << ")\n";
  for (const auto& s : r.findings) os << "# note: " << s << "\n";
  if (r.oracle) {
    os << "# oracle: value=" << num(r.oracle->bestVal) << " x=";
    for (int i = 0; i < r.oracle->bestX.size(); ++i) os << (i ? "," : "") << num(r.oracle->bestX(i), 8);
    os << " resolution=" << r.oracle->gridResolution << "\n";
    os << "# bounds above oracle: " << r.oracleViolations.size() << "\n";
    for (const auto& v : r.oracleViolations) os << "#   " << v << "\n";
  }
  return os.str();
}

std::string format_solve(const SolveReport& r, const QcqpInstance& inst, Format f, const RunMeta& meta) {
  CompareReport c;
  c.instance = inst.name;
  c.n = inst.n;
  c.l = inst.l();
  c.k = classify(inst).k;
  c.m = inst.m();
  CompareCell cell;
  cell.relaxation = r.relaxation;
  cell.ok = true;
  cell.report = r;
  c.cells.push_back(cell);
  c.findings = r.notes;
  if (f == Format::Structured) return format_compare(c, f, meta);
  std::ostringstream os;
  os << format_compare(c, f, meta);
  if (f == Format::Table) {
    os << "x =";
    for (int i = 0; i < r.solution.x.size(); ++i) os << " " << num(r.solution.x(i), 8);
    os << "\n";
    if (!r.diagnostic.empty()) os << "diagnostic: " << r.diagnostic << "\n";
  }
  return os.str();
}

std::string format_dominance(const std::vector<DominanceReport>& reps, const std::string& instance,
                             Format f, const RunMeta& meta) {
  if (f == Format::Structured) {
    ojson j;
    j["meta"] = meta_json(meta);
    j["instance"] = instance;
    j["checks"] = ojson::array();
    for (const auto& r : reps) {
      ojson c;
      c["check"] = check_name(r.check);
      c["dominating"] = r.dominating;
      c["status"] = conic::status_name(r.status);
      c["bound"] = jnum(r.bound);
      c["applicable"] = r.applicable;
      c["passed"] = r.passed;
      c["worst"] = jnum(r.worst);
      c["detail"] = r.detail;
      c["items"] = ojson::array();
      for (const auto& it : r.items) c["items"].push_back({{"name", it.name}, {"value", jnum(it.value)}, {"pass", it.pass}});
      j["checks"].push_back(c);
    }
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << header_lines(meta) << "# instance: " << instance << "\n";
  if (f == Format::Csv) {
    os << "instance,check,item,value,pass\n";
    for (const auto& r : reps)
      for (const auto& it : r.items)
        os << instance << "," << check_name(r.check) << "," << it.name << "," << num(it.value) << ","
           << (it.pass ? "true" : "false") << "\n";
    return os.str();
  }
  std::vector<std::vector<std::string>> rows = {{"check", "dominating", "status", "bound", "worst", "result"}};
  for (const auto& r : reps)
    if (!r.applicable && r.items.empty())
      rows.push_back({check_name(r.check), r.dominating.empty() ? "-" : r.dominating, "-", "-", "-", "n/a"});
    else
      rows.push_back({check_name(r.check), r.dominating, conic::status_name(r.status), num(r.bound, 8),
                      num(r.worst, 4), !r.applicable ? "n/a" : (r.passed ? "pass" : "FAIL")});
  os << render_table(rows);
  for (const auto& r : reps)
    if (!r.detail.empty()) os << "# " << check_name(r.check) << ": " << r.detail << "\n";
  return os.str();
}

std::string format_sweep(const SweepReport& r, Format f, const RunMeta& meta) {
  if (f == Format::Structured) {
    ojson j;
    j["meta"] = meta_json(meta);
    j["spec"] = {{"n", r.spec.n}, {"l", r.spec.l}, {"k", r.spec.k}, {"phis", r.spec.phis},
                 {"m_min", r.spec.mMin}, {"m_max", r.spec.mMax}, {"reps", r.spec.reps},
                 {"base_seed", r.spec.baseSeed}};
    j["rows"] = ojson::array();
    for (const auto& w : r.rows)
      j["rows"].push_back({{"phi", w.phi}, {"m", w.m}, {"count", w.count}, {"skipped", w.skipped},
                           {"inexact", w.inexact},
                           {"mean_ratio_a", jnum(w.meanA)}, {"max_ratio_a", jnum(w.maxA)},
                           {"mean_ratio_b", jnum(w.meanB)}, {"max_ratio_b", jnum(w.maxB)}});
    j["min_ratio"] = jnum(r.minRatio);
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << header_lines(meta);
  os << "# sweep: n=" << r.spec.n << " l=" << r.spec.l << " k=" << r.spec.k << " m=" << r.spec.mMin
     << ".." << r.spec.mMax << " reps=" << r.spec.reps << " base_seed=" << r.spec.baseSeed << "\n";
  if (f == Format::Csv) {
    os << "phi,m,count,skipped,inexact,mean_ratio_a,max_ratio_a,mean_ratio_b,max_ratio_b\n";
    for (const auto& w : r.rows)
      os << w.phi << "," << w.m << "," << w.count << "," << w.skipped << "," << w.inexact << ","
         << num(w.meanA) << ","
         << num(w.maxA) << "," << num(w.meanB) << "," << num(w.maxB) << "\n";
  } else {
    std::vector<std::vector<std::string>> rows = {
        {"phi", "m", "count", "skipped", "inexact", "mean(A)", "max(A)", "mean(B)", "max(B)"}};
    for (const auto& w : r.rows)
      rows.push_back({std::to_string(w.phi), std::to_string(w.m), std::to_string(w.count),
                      std::to_string(w.skipped), std::to_string(w.inexact), num(w.meanA, 4),
                      num(w.maxA, 4), num(w.meanB, 4), num(w.maxB, 4)});
    os << render_table(rows);
  }
  os << "# min ratio: " << num(r.minRatio) << "\n";
  return os.str();
}

std::string format_oracle(const OracleResult& r, const QcqpInstance& inst, Format f, const RunMeta& meta) {
  if (f == Format::Structured) {
    ojson j;
    j["meta"] = meta_json(meta);
    j["instance"] = inst.name;
    j["value"] = r.bestVal;
    j["x"] = std::vector<double>(r.bestX.data(), r.bestX.data() + r.bestX.size());
    j["box_lo"] = std::vector<double>(r.box.lo.data(), r.box.lo.data() + r.box.lo.size());
    j["box_hi"] = std::vector<double>(r.box.hi.data(), r.box.hi.data() + r.box.hi.size());
    j["resolution"] = r.gridResolution;
    j["refined"] = r.refined;
    j["max_violation"] = inst.max_violation(r.bestX);
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << header_lines(meta) << "# instance: " << inst.name << "\n";
  if (f == Format::Csv) {
    os << "name,value,resolution,refined";
    for (int i = 0; i < r.bestX.size(); ++i) os << ",x" << i + 1;
    os << "\n" << inst.name << "," << num(r.bestVal, 12) << "," << r.gridResolution << ","
       << (r.refined ? "true" : "false");
    for (int i = 0; i < r.bestX.size(); ++i) os << "," << num(r.bestX(i), 12);
    os << "\n";
  } else {
    os << "value " << num(r.bestVal, 12) << "\nx    ";
    for (int i = 0; i < r.bestX.size(); ++i) os << " " << num(r.bestX(i), 10);
    os << "\ngrid " << r.gridResolution << " per axis, refined " << (r.refined ? "yes" : "no")
       << ", max violation " << num(inst.max_violation(r.bestX), 3) << "\n";
  }
  return os.str();
}

}  // namespace qrelax
