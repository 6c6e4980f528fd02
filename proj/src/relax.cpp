// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "relax.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "error.hpp"

namespace qrelax {

namespace {

std::string join_name(const std::string& fam, std::initializer_list<int> ids) {
  std::string s = fam;
  for (int i : ids) s += ":" + std::to_string(i);
  return s;
}

AffXZ form_l(const GsocForm& f, int n, int nz) {
  AffXZ a = AffXZ::of_x(f.zeta, nz, f.theta);
  if (f.eta.size() == nz) {
    a.az = f.eta;
  } else if (f.eta.size() && f.eta.cwiseAbs().maxCoeff() > 0) {
    throw Error(ErrorCode::InvalidArgument, "GSOC form needs auxiliary variables");
  }
  (void)n;
  return a;
}

std::vector<AffXZ> form_h(const GsocForm& f, int nz) {
  std::vector<AffXZ> rows;
  for (int k = 0; k < f.p(); ++k) rows.push_back(AffXZ::of_x(f.C.row(k).transpose(), nz, f.xi(k)));
  return rows;
}

AffXZ lin_slack(const LinConstraint& r, int nz) { return AffXZ::of_x(-r.a, nz, r.b); }

LinExpr quad_form(const LiftedSpace& sp, const Mat& Q) {
  LinExpr e(sp.size());
  for (int i = 0; i < sp.n(); ++i)
    for (int j = 0; j < sp.n(); ++j) e.add(sp.X(i, j), Q(i, j));
  return e;
}

// ||lin(h g)|| <= lin(l g), or the plain SOC when g is the constant 1.
void add_product_soc(ConicProgram& prog, const GsocForm& f, const AffXZ& g, const std::string& name) {
  const auto& sp = prog.space;
  SocBlock b;
  b.name = name;
  b.head = linearize_product(sp, form_l(f, sp.n(), sp.nz()), g);
  for (const auto& h : form_h(f, sp.nz())) b.tail.push_back(linearize_product(sp, h, g));
  prog.socBlocks.push_back(std::move(b));
}

}  // namespace

const std::vector<std::string>& relaxation_names() {
  static const std::vector<std::string> names = {"sdp",    "rlt", "soc-rlt", "soc-rlt-b",
                                                 "gsrt-a", "gsrt-b", "sst", "ksoc-sub",
                                                 "ksoc-full", "alpha-diag", "hsoc"};
  return names;
}

RelaxationSpec parse_relaxation(const std::string& name) {
  RelaxationSpec s;
  s.name = name;
  std::stringstream ss(name);
  std::string tok;
  bool any = false;
  while (std::getline(ss, tok, '+')) {
    any = true;
    if (tok == "sdp") {
    } else if (tok == "rlt") {
      s.rlt = true;
    } else if (tok == "soc-rlt") {
      s.rlt = s.socRlt = true;
    } else if (tok == "soc-rlt-b") {
      s.rlt = s.socRlt = s.socRltB = true;
    } else if (tok == "gsrt-a") {
      s.rlt = s.socRlt = s.gsrtA = true;
    } else if (tok == "gsrt-b") {
      s.rlt = s.socRlt = s.gsrtB = true;
    } else if (tok == "sst") {
      s.rlt = s.socRlt = s.gsrtA = s.sst = true;
    } else if (tok == "ksoc-sub") {
      s.rlt = s.socRlt = s.gsrtA = s.sst = s.ksocSub = true;
    } else if (tok == "ksoc-full") {
      s.rlt = s.socRlt = s.gsrtA = s.ksocFull = true;
    } else if (tok == "alpha-diag") {
      s.rlt = s.socRlt = s.alphaDiag = true;
    } else if (tok == "hsoc") {
      s.rlt = s.socRlt = s.hsoc = true;
    } else if (tok == "alpha") {
      s.alphaRow = true;
    } else if (tok == "convex-pairs") {
      s.sstIncludeConvexPairs = true;
    } else if (tok == "epigraph") {
      s.epigraph = true;
    } else if (tok == "no-box") {
      s.boundProducts = false;
    } else {
      std::string valid;
      for (const auto& n : relaxation_names()) valid += (valid.empty() ? "" : ", ") + n;
      throw Error(ErrorCode::UnknownRelaxation,
                  "unknown relaxation '" + tok + "'; valid names: " + valid +
                      " (modifiers: alpha, convex-pairs, epigraph, no-box)");
    }
  }
  if (!any) throw Error(ErrorCode::UnknownRelaxation, "empty relaxation name");
  if (s.gsrtB) s.gsrtA = false;
  return s;
}

BuildContext make_context(const QcqpInstance& inst, const RelaxationSpec& spec) {
  BuildContext ctx;
  ctx.inst = spec.epigraph ? epigraph_reformulate(inst) : inst;
  ctx.cls = classify(ctx.inst);
  ctx.decomps = decompose_all(ctx.inst, ctx.cls, spec.socRltB, spec.gsrtB, &ctx.notes);
  ctx.gsocs = gsoc_catalogue(ctx.inst, ctx.cls, ctx.decomps);
  ctx.lin = ctx.inst.lin;
  if (spec.alphaRow) {
    if (!spec.alpha)
      throw Error(ErrorCode::InvalidArgument, "alpha row requested without an alpha specification");
    if (spec.alpha->u.size() != ctx.inst.n)
      throw Error(ErrorCode::DimError, "alpha: u has wrong length");
    ctx.lin.push_back({spec.alpha->u, spec.alpha->alphaU});
  }
  return ctx;
}

ConicProgram build_sdp(const BuildContext& ctx, int nz, bool boundProducts) {
  const auto& inst = ctx.inst;
  const int n = inst.n;
  ConicProgram prog(LiftedSpace(n, nz));
  const auto& sp = prog.space;
  prog.objective = quad_form(sp, inst.Q0.mat()) + embed(sp, AffXZ::of_x(inst.c0, nz));
  for (int i = 0; i < inst.l(); ++i) {
    const auto& q = inst.quad[i];
    prog.add_row(quad_form(sp, q.Q.mat()) + embed(sp, AffXZ::of_x(q.c, nz, q.d)), RowSense::LessEq,
                 join_name("sdp", {i}));
  }
  for (size_t j = 0; j < ctx.lin.size(); ++j)
    prog.add_row(embed(sp, AffXZ::of_x(ctx.lin[j].a, nz, -ctx.lin[j].b)), RowSense::LessEq,
                 join_name("lin", {static_cast<int>(j)}));
  if (boundProducts) {
    // Tightest explicit single-variable bounds l_i <= x_i <= u_i.
    const double inf = std::numeric_limits<double>::infinity();
    Vec lo = Vec::Constant(n, -inf), hi = Vec::Constant(n, inf);
    for (const auto& r : ctx.lin) {
      int nnz = 0, idx = -1;
      for (int i = 0; i < n; ++i)
        if (r.a(i) != 0.0) {
          ++nnz;
          idx = i;
        }
      if (nnz != 1) continue;
      double v = r.b / r.a(idx);
      if (r.a(idx) > 0) hi(idx) = std::min(hi(idx), v);
      else lo(idx) = std::max(lo(idx), v);
    }
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(lo(i)) || !std::isfinite(hi(i))) continue;
      Vec ei = Vec::Zero(n);
      ei(i) = 1.0;
      AffXZ up = AffXZ::of_x(-ei, nz, hi(i)), down = AffXZ::of_x(ei, nz, -lo(i));
      prog.add_row(linearize_product(sp, up, down), RowSense::GreaterEq, join_name("box", {i}));
    }
  }
  prog.psdBlocks.push_back(moment_lmi(sp));
  return prog;
}

void add_rlt(ConicProgram& prog, const BuildContext& ctx) {
  const auto& sp = prog.space;
  const int m = static_cast<int>(ctx.lin.size());
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      prog.add_row(linearize_product(sp, lin_slack(ctx.lin[i], sp.nz()), lin_slack(ctx.lin[j], sp.nz())),
                   RowSense::GreaterEq, join_name("rlt", {i, j}));
}

void add_soc_rlt(ConicProgram& prog, const BuildContext& ctx) {
  const auto& sp = prog.space;
  for (const auto& f : ctx.gsocs) {
    if (!f.fromConvex) continue;
    const char* fam = f.typeB ? "soc-rlt-b" : "soc-rlt";
    for (size_t j = 0; j < ctx.lin.size(); ++j)
      add_product_soc(prog, f, lin_slack(ctx.lin[j], sp.nz()),
                      join_name(fam, {f.origin, static_cast<int>(j)}));
  }
}

void add_gsrt(ConicProgram& prog, const BuildContext& ctx) {
  const auto& sp = prog.space;
  if (sp.nz() != ctx.cls.nz())
    throw Error(ErrorCode::InvalidArgument, "GSRT requires one auxiliary variable per nonconvex constraint");
  const AffXZ one = AffXZ::constant(sp.n(), sp.nz(), 1.0);
  for (const auto& f : ctx.gsocs) {
    if (f.fromConvex) continue;
    const bool typeB = ctx.decomps[f.origin].is_type_b();
    const std::string fam = std::string(typeB ? "gsrt-b" : "gsrt-a") + ":" + std::to_string(f.origin) +
                            (f.side == GsocSide::LSide ? ":L" : ":M");
    add_product_soc(prog, f, one, fam);
    for (size_t j = 0; j < ctx.lin.size(); ++j)
      add_product_soc(prog, f, lin_slack(ctx.lin[j], sp.nz()), fam + ":" + std::to_string(j));
    if (f.side == GsocSide::MSide) {
      // Z_tt equals the linearized squared norm of the M side.
      const int t = ctx.cls.z_index(f.origin);
      LinExpr e(sp.size());
      for (const auto& h : form_h(f, sp.nz())) e += linearize_product(sp, h, h);
      e.add(sp.Z(t, t), -1.0);
      prog.add_row(e, RowSense::Equal, std::string(typeB ? "gsrt-b" : "gsrt-a") + ":" +
                                           std::to_string(f.origin) + ":eq");
    }
  }
}

std::vector<std::pair<int, int>> gsoc_pairs(const std::vector<GsocForm>& forms,
                                            bool includeConvexPairs) {
  std::vector<std::pair<int, int>> out;
  for (size_t s = 0; s < forms.size(); ++s)
    for (size_t t = s + 1; t < forms.size(); ++t) {
      if (!includeConvexPairs && forms[s].fromConvex && forms[t].fromConvex) continue;
      out.push_back({static_cast<int>(s), static_cast<int>(t)});
    }
  return out;
}

void add_sst(ConicProgram& prog, const BuildContext& ctx, const std::vector<std::pair<int, int>>& pairs) {
  const auto& sp = prog.space;
  for (auto [s, t] : pairs) {
    const auto& fs = ctx.gsocs[s];
    const auto& ft = ctx.gsocs[t];
    FrobBlock b;
    b.name = join_name("sst", {s, t});
    b.rows = fs.p();
    b.cols = ft.p();
    auto hs = form_h(fs, sp.nz()), ht = form_h(ft, sp.nz());
    for (const auto& a : hs)
      for (const auto& c : ht) b.entries.push_back(linearize_product(sp, a, c));
    b.bound = linearize_product(sp, form_l(fs, sp.n(), sp.nz()), form_l(ft, sp.n(), sp.nz()));
    prog.frobBlocks.push_back(std::move(b));
  }
}

void add_ksoc_sub(ConicProgram& prog, const BuildContext& ctx,
                  const std::vector<std::pair<int, int>>& pairs) {
  const auto& sp = prog.space;
  for (auto [s, t] : pairs) {
    const auto& fs = ctx.gsocs[s];
    const auto& ft = ctx.gsocs[t];
    const int p = fs.p(), q = ft.p();
    AffXZ ls = form_l(fs, sp.n(), sp.nz()), lt = form_l(ft, sp.n(), sp.nz());
    auto hs = form_h(fs, sp.nz()), ht = form_h(ft, sp.nz());
    LinExpr beta = linearize_product(sp, ls, lt);
    PsdBlock b(p + q + 1, sp.size(), join_name("ksoc-sub", {s, t}));
    for (int a = 0; a < p; ++a) b.at(a, a) = beta;
    for (int c = 0; c < q; ++c) b.at(p + c, p + c) = beta;
    b.at(p + q, p + q) = beta;
    for (int a = 0; a < p; ++a) {
      for (int c = 0; c < q; ++c) b.at(p + c, a) = linearize_product(sp, hs[a], ht[c]);
      b.at(p + q, a) = linearize_product(sp, lt, hs[a]);
    }
    for (int c = 0; c < q; ++c) b.at(p + q, p + c) = linearize_product(sp, ls, ht[c]);
    prog.psdBlocks.push_back(std::move(b));
  }
}

std::vector<std::vector<AffXZ>> gsoc_arrow(const GsocForm& f, int n, int nz) {
  const int p = f.p();
  AffXZ l = form_l(f, n, nz);
  AffXZ zero = AffXZ::constant(n, nz, 0.0);
  std::vector<std::vector<AffXZ>> A(p + 1, std::vector<AffXZ>(p + 1, zero));
  auto h = form_h(f, nz);
  for (int a = 0; a < p; ++a) {
    A[a][a] = l;
    A[a][p] = h[a];
    A[p][a] = h[a];
  }
  A[p][p] = l;
  return A;
}

namespace {

bool is_zero(const AffXZ& f) {
  return f.c == 0.0 && (f.ax.size() == 0 || f.ax.cwiseAbs().maxCoeff() == 0.0) &&
         (f.az.size() == 0 || f.az.cwiseAbs().maxCoeff() == 0.0);
}

}  // namespace

std::vector<std::vector<LinExpr>> linearize_kron(const LiftedSpace& sp,
                                                 const std::vector<std::vector<AffXZ>>& A,
                                                 const std::vector<std::vector<AffXZ>>& B) {
  const int ra = static_cast<int>(A.size()), rb = static_cast<int>(B.size());
  const int dim = ra * rb;
  std::vector<std::vector<LinExpr>> K(dim, std::vector<LinExpr>(dim, LinExpr(sp.size())));
  for (int a = 0; a < ra; ++a)
    for (int a2 = 0; a2 < ra; ++a2) {
      if (is_zero(A[a][a2])) continue;
      for (int b = 0; b < rb; ++b)
        for (int b2 = 0; b2 < rb; ++b2) {
          if (is_zero(B[b][b2])) continue;
          K[a * rb + b][a2 * rb + b2] = linearize_product(sp, A[a][a2], B[b][b2]);
        }
    }
  return K;
}

PsdBlock ksoc_full_block(const LiftedSpace& sp, const GsocForm& s, const GsocForm& t,
                         const std::string& name) {
  const int p = s.p(), q = t.p();
  auto A = gsoc_arrow(s, sp.n(), sp.nz());
  auto B = gsoc_arrow(t, sp.n(), sp.nz());
  auto K = linearize_kron(sp, A, B);
  // Tracy-Singh order: (A11, B11), (A11, B22), (A22, B11), (A22, B22).
  std::vector<int> order;
  for (int a = 0; a < p; ++a)
    for (int b = 0; b < q; ++b) order.push_back(a * (q + 1) + b);
  for (int a = 0; a < p; ++a) order.push_back(a * (q + 1) + q);
  for (int b = 0; b < q; ++b) order.push_back(p * (q + 1) + b);
  order.push_back(p * (q + 1) + q);
  const int dim = static_cast<int>(order.size());
  PsdBlock blk(dim, sp.size(), name);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) blk.at(i, j) = K[order[i]][order[j]];
  return blk;
}

void add_ksoc_full(ConicProgram& prog, const BuildContext& ctx,
                   const std::vector<std::pair<int, int>>& pairs, int sizeCap) {
  for (auto [s, t] : pairs) {
    const int p = ctx.gsocs[s].p(), q = ctx.gsocs[t].p();
    const int size = p * q + p + q + 1;
    if (size > sizeCap)
      throw Error(ErrorCode::SizeCapExceeded, "KSOC block of size " + std::to_string(size) +
                                                  " exceeds cap " + std::to_string(sizeCap));
    prog.psdBlocks.push_back(ksoc_full_block(prog.space, ctx.gsocs[s], ctx.gsocs[t],
                                             join_name("ksoc-full", {s, t})));
  }
}

void check_nonneg_setting(const BuildContext& ctx, const AlphaAug& alpha) {
  const int n = ctx.inst.n;
  if (alpha.u.size() != n) throw Error(ErrorCode::DimError, "alpha: u has wrong length");
  if (alpha.u.minCoeff() <= 0) throw Error(ErrorCode::SettingViolated, "alpha: u must be positive");
  if (!(alpha.alphaU > 0)) throw Error(ErrorCode::SettingViolated, "alpha: alpha_u must be positive");
  for (int i = 0; i < n; ++i) {
    bool found = false;
    for (const auto& r : ctx.inst.lin) {
      if (r.a(i) >= 0 || r.b > 0) continue;
      Vec rest = r.a;
      rest(i) = 0.0;
      if (rest.cwiseAbs().maxCoeff() == 0.0) found = true;
    }
    if (!found)
      throw Error(ErrorCode::SettingViolated,
                  "nonnegativity row for x_" + std::to_string(i) + " is missing");
  }
}

void add_alpha_diag(ConicProgram& prog, const BuildContext& ctx, const AlphaAug& alpha) {
  check_nonneg_setting(ctx, alpha);
  const auto& sp = prog.space;
  const int n = sp.n();
  PsdBlock b(n, sp.size(), "alpha-diag");
  for (int i = 0; i < n; ++i) {
    b.at(i, i).add(sp.x(i), alpha.alphaU / alpha.u(i));
    for (int j = 0; j <= i; ++j) b.at(i, j).add(sp.X(i, j), -1.0);
  }
  prog.psdBlocks.push_back(std::move(b));
}

void add_hsoc(ConicProgram& prog, const BuildContext& ctx, const AlphaAug& alpha) {
  check_nonneg_setting(ctx, alpha);
  const auto& sp = prog.space;
  const int n = sp.n(), nz = sp.nz();
  for (int i : ctx.cls.convexIdx) {
    const auto& q = ctx.inst.quad[i];
    Mat B = psd_factor_ascending(q.Q);
    PsdBlock b(n + 1, sp.size(), join_name("hsoc", {i}));
    for (int j = 0; j < n; ++j) {
      b.at(j, j).add(sp.x(j), alpha.u(j));
      Vec ej = Vec::Zero(n);
      ej(j) = 1.0;
      b.at(n, j) = -alpha.u(j) * linearize_product(sp, AffXZ::of_x(B.row(j).transpose(), nz),
                                                    AffXZ::of_x(ej, nz));
    }
    b.at(n, n) = -alpha.alphaU * embed(sp, AffXZ::of_x(q.c, nz, q.d));
    prog.psdBlocks.push_back(std::move(b));
  }
}

ConicProgram build_relaxation(const BuildContext& ctx, const RelaxationSpec& spec) {
  RelaxationSpec s = spec;
  if ((s.sst || s.ksocSub || s.ksocFull) && !s.gsrtA && !s.gsrtB) s.gsrtA = true;
  const int nz = s.needs_z() ? ctx.cls.nz() : 0;
  ConicProgram prog = build_sdp(ctx, nz, s.boundProducts);
  prog.notes = ctx.notes;
  if (s.rlt) add_rlt(prog, ctx);
  if (s.socRlt || s.socRltB) add_soc_rlt(prog, ctx);
  if (s.gsrtA || s.gsrtB) add_gsrt(prog, ctx);
  if (s.sst || s.ksocSub || s.ksocFull) {
    auto pairs = gsoc_pairs(ctx.gsocs, s.sstIncludeConvexPairs);
    if (s.sst) add_sst(prog, ctx, pairs);
    if (s.ksocSub) add_ksoc_sub(prog, ctx, pairs);
    if (s.ksocFull) add_ksoc_full(prog, ctx, pairs, s.ksocSizeCap);
  }
  if (s.alphaDiag || s.hsoc) {
    if (!s.alpha) throw Error(ErrorCode::SettingViolated, "alpha-diag/hsoc need an alpha specification");
    if (s.alphaDiag) add_alpha_diag(prog, ctx, *s.alpha);
    if (s.hsoc) add_hsoc(prog, ctx, *s.alpha);
  }
  return prog;
}

SolveReport solve_program(const ConicProgram& prog, const conic::SolverConfig& config) {
  SolveReport rep;
  Lowered low = lower(prog);
  rep.nLin = low.numLin;
  rep.nSoc = low.numSoc;
  rep.nPsd = low.numPsd;
  rep.notes = prog.notes;
  conic::RawSolution raw = conic::solve(low.form, config);
  rep.seconds = raw.seconds;
  rep.iterations = raw.iterations;
  rep.diagnostic = raw.diagnostic;
  rep.status = raw.status;
  rep.solution = recover(prog.space, raw);
  if (raw.status == conic::Status::Optimal) {
    rep.bound = raw.primalObj;
  } else if (raw.status == conic::Status::Inaccurate) {
    rep.bound = raw.dualObj;
    rep.boundIsDual = true;
  } else if (raw.status == conic::Status::Unbounded) {
    rep.bound = -std::numeric_limits<double>::infinity();
  } else if (raw.status == conic::Status::Infeasible) {
    rep.bound = std::numeric_limits<double>::infinity();
  } else {
    rep.bound = std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

SolveReport solve_relaxation(const QcqpInstance& inst, const RelaxationSpec& spec,
                             const conic::SolverConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  BuildContext ctx = make_context(inst, spec);
  ConicProgram prog = build_relaxation(ctx, spec);
  double build = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  SolveReport rep = solve_program(prog, config);
  rep.relaxation = spec.name;
  rep.buildSeconds = build;
  return rep;
}

AlphaAug compute_alpha(const QcqpInstance& inst, const Vec& u, const conic::SolverConfig& config) {
  if (u.size() != inst.n) throw Error(ErrorCode::DimError, "alpha: u has wrong length");
  RelaxationSpec spec;
  BuildContext ctx = make_context(inst, spec);
  ConicProgram prog = build_sdp(ctx, 0, spec.boundProducts);
  prog.objective = embed(prog.space, AffXZ::of_x(-u, 0));
  SolveReport rep = solve_program(prog, config);
  if (rep.status != conic::Status::Optimal && rep.status != conic::Status::Inaccurate)
    throw Error(ErrorCode::AlphaInvalid,
                std::string("alpha: SDP maximization of u^T x ended with status ") +
                    conic::status_name(rep.status));
  AlphaAug a;
  a.u = u;
  a.alphaU = -rep.bound;
  a.source = AlphaAug::Source::ComputedByRelaxation;
  if (!(a.alphaU > 0)) throw Error(ErrorCode::AlphaInvalid, "alpha: computed alpha_u is not positive");
  return a;
}

}  // namespace qrelax
