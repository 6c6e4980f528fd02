// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_DECOMPOSE_HPP
#define QRELAX_DECOMPOSE_HPP

#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "model.hpp"

namespace qrelax {

enum class DecompKind { ConvexA, ConvexB, NonconvexA, NonconvexB1, NonconvexB2 };

const char* decomp_kind_name(DecompKind k);

struct ConstraintDecomposition {
  DecompKind kind = DecompKind::ConvexA;
  std::optional<Mat> B;            // convex: Q = B^T B
  std::optional<EigenSplit> split;  // nonconvex: Q = L^T L - M^T M
  std::optional<SymMatrix> Qdag;
  std::optional<Vec> x0;           // Q^+ c / 2
  std::optional<double> delta;
  double gamma = 0.0;              // c^T Q^+ c / 4 - d

  bool is_convex() const { return kind == DecompKind::ConvexA || kind == DecompKind::ConvexB; }
  bool is_type_b() const { return kind != DecompKind::ConvexA && kind != DecompKind::NonconvexA; }
};

// Requesting NonconvexB1 or NonconvexB2 selects the case by the sign of
// gamma (gamma == 0 goes to B2).
ConstraintDecomposition decompose_constraint(const QuadConstraint& qc, DecompKind request,
                                             double tol = -1.0);

// Convex constraints use ConvexB when `convexB` and eligible, nonconvex ones
// use B1/B2 when `nonconvexB` and eligible; otherwise type A. Fallbacks are
// appended to `notes`.
std::vector<ConstraintDecomposition> decompose_all(const QcqpInstance& inst,
                                                   const Classification& cls, bool convexB,
                                                   bool nonconvexB,
                                                   std::vector<std::string>* notes = nullptr);

enum class GsocSide { Convex, LSide, MSide };

// ||C x + xi|| <= zeta^T x + eta^T z + theta
struct GsocForm {
  Mat C;
  Vec xi;
  Vec zeta;
  Vec eta;
  double theta = 0.0;
  int origin = 0;  // quadratic constraint index
  GsocSide side = GsocSide::Convex;
  bool fromConvex = false;
  bool typeB = false;

  int p() const { return static_cast<int>(C.rows()); }
  double lhs(const Vec& x) const;
  double rhs(const Vec& x, const Vec& z) const;
};

// Two forms per nonconvex constraint (L side then M side), one per convex
// constraint, in constraint order. Count is 2l - k.
std::vector<GsocForm> gsoc_catalogue(const QcqpInstance& inst, const Classification& cls,
                                     const std::vector<ConstraintDecomposition>& decomps);

// z_t = ||C x + xi|| of the M-side form of the t-th nonconvex constraint.
Vec lift_z(const std::vector<GsocForm>& forms, const Vec& x, int nz);

}  // namespace qrelax

#endif
