// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "decompose.hpp"

#include <cmath>

#include "error.hpp"

namespace qrelax {

const char* decomp_kind_name(DecompKind k) {
  switch (k) {
    case DecompKind::ConvexA: return "ConvexA";
    case DecompKind::ConvexB: return "ConvexB";
    case DecompKind::NonconvexA: return "NonconvexA";
    case DecompKind::NonconvexB1: return "NonconvexB1";
    case DecompKind::NonconvexB2: return "NonconvexB2";
  }
  return "?";
}

ConstraintDecomposition decompose_constraint(const QuadConstraint& qc, DecompKind request,
                                             double tol) {
  ConstraintDecomposition d;
  d.kind = request;
  SymMatrix qdag = pinv(qc.Q, tol);
  d.gamma = 0.25 * qc.c.dot(qdag.mat() * qc.c) - qc.d;
  const bool wantB = request != DecompKind::ConvexA && request != DecompKind::NonconvexA;
  if (wantB) {
    if (!in_range(qc.Q, qc.c))
      throw Error(ErrorCode::RangeConditionViolated, "c is not in Range(Q)");
    d.Qdag = qdag;
    d.x0 = 0.5 * (qdag.mat() * qc.c);
  }
  EigenSplit sp = split_signed(qc.Q, tol);
  switch (request) {
    case DecompKind::ConvexA:
      d.B = sp.L;
      break;
    case DecompKind::ConvexB:
      if (d.gamma < 0)
        throw Error(ErrorCode::EmptyInterior, "convex constraint has negative gamma (empty set)");
      d.B = sp.L;
      d.delta = std::sqrt(d.gamma);
      break;
    case DecompKind::NonconvexA:
      d.split = sp;
      break;
    case DecompKind::NonconvexB1:
    case DecompKind::NonconvexB2:
      d.split = sp;
      d.kind = d.gamma > 0 ? DecompKind::NonconvexB1 : DecompKind::NonconvexB2;
      d.delta = std::sqrt(std::abs(d.gamma));
      break;
  }
  return d;
}

std::vector<ConstraintDecomposition> decompose_all(const QcqpInstance& inst,
                                                   const Classification& cls, bool convexB,
                                                   bool nonconvexB,
                                                   std::vector<std::string>* notes) {
  std::vector<ConstraintDecomposition> out;
  for (int i = 0; i < inst.l(); ++i) {
    const bool convex = cls.is_convex(i);
    const bool wantB = convex ? convexB : nonconvexB;
    DecompKind kind = convex ? DecompKind::ConvexA : DecompKind::NonconvexA;
    if (wantB) {
      if (cls.type_b(i)) {
        kind = convex ? DecompKind::ConvexB : DecompKind::NonconvexB1;
      } else if (notes) {
        notes->push_back("constraint " + std::to_string(i) +
                         ": not type-B eligible, using type-A form");
      }
    }
    if (kind == DecompKind::ConvexB) {
      // Empty-interior convex constraints keep the type-A form.
      ConstraintDecomposition probe = decompose_constraint(inst.quad[i], DecompKind::ConvexA);
      if (probe.gamma < 0) {
        if (notes) notes->push_back("constraint " + std::to_string(i) + ": gamma < 0, using type-A form");
        out.push_back(probe);
        continue;
      }
    }
    out.push_back(decompose_constraint(inst.quad[i], kind));
  }
  return out;
}

double GsocForm::lhs(const Vec& x) const { return (C * x + xi).norm(); }

double GsocForm::rhs(const Vec& x, const Vec& z) const {
  double v = zeta.dot(x) + theta;
  if (eta.size()) v += eta.dot(z);
  return v;
}

namespace {

Mat stack_row(const Mat& top, const Vec& row) {
  Mat r(top.rows() + 1, row.size());
  r.topRows(top.rows()) = top;
  r.row(top.rows()) = row.transpose();
  return r;
}

Vec stack_val(const Vec& top, double v) {
  Vec r(top.size() + 1);
  r.head(top.size()) = top;
  r(top.size()) = v;
  return r;
}

}  // namespace

std::vector<GsocForm> gsoc_catalogue(const QcqpInstance& inst, const Classification& cls,
                                     const std::vector<ConstraintDecomposition>& decomps) {
  const int n = inst.n;
  const int nz = cls.nz();
  std::vector<GsocForm> out;
  for (int i = 0; i < inst.l(); ++i) {
    const auto& qc = inst.quad[i];
    const auto& d = decomps[i];
    GsocForm f;
    f.origin = i;
    f.zeta = Vec::Zero(n);
    f.eta = Vec::Zero(nz);
    f.typeB = d.is_type_b();
    if (d.is_convex()) {
      f.side = GsocSide::Convex;
      f.fromConvex = true;
      const Mat& B = *d.B;
      if (d.kind == DecompKind::ConvexA) {
        f.C = stack_row(B, -0.5 * qc.c);
        f.xi = stack_val(Vec::Zero(B.rows()), 0.5 * (-qc.d - 1.0));
        f.zeta = -0.5 * qc.c;
        f.theta = 0.5 * (1.0 - qc.d);
      } else {
        f.C = B;
        f.xi = B * *d.x0;
        f.theta = *d.delta;
      }
      out.push_back(std::move(f));
      continue;
    }
    const int t = cls.z_index(i);
    f.eta(t) = 1.0;
    const Mat& L = d.split->L;
    const Mat& M = d.split->M;
    GsocForm g = f;
    f.side = GsocSide::LSide;
    g.side = GsocSide::MSide;
    switch (d.kind) {
      case DecompKind::NonconvexA:
        f.C = stack_row(L, 0.5 * qc.c);
        f.xi = stack_val(Vec::Zero(L.rows()), 0.5 * (qc.d + 1.0));
        g.C = stack_row(M, 0.5 * qc.c);
        g.xi = stack_val(Vec::Zero(M.rows()), 0.5 * (qc.d - 1.0));
        break;
      case DecompKind::NonconvexB1:
        f.C = L;
        f.xi = L * *d.x0;
        g.C = stack_row(M, Vec::Zero(n));
        g.xi = stack_val(M * *d.x0, *d.delta);
        break;
      case DecompKind::NonconvexB2:
        f.C = stack_row(L, Vec::Zero(n));
        f.xi = stack_val(L * *d.x0, *d.delta);
        g.C = M;
        g.xi = M * *d.x0;
        break;
      default:
        break;
    }
    out.push_back(std::move(f));
    out.push_back(std::move(g));
  }
  return out;
}

Vec lift_z(const std::vector<GsocForm>& forms, const Vec& x, int nz) {
  Vec z = Vec::Zero(nz);
  for (const auto& f : forms) {
    if (f.side != GsocSide::MSide) continue;
    for (int t = 0; t < nz; ++t)
      if (f.eta(t) == 1.0) z(t) = f.lhs(x);
  }
  return z;
}

}  // namespace qrelax
