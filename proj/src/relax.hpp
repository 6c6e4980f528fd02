// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_RELAX_HPP
#define QRELAX_RELAX_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "conic.hpp"
#include "decompose.hpp"
#include "lift.hpp"
#include "model.hpp"

namespace qrelax {

struct AlphaAug {
  enum class Source { UserSupplied, ComputedByRelaxation };
  Vec u;
  double alphaU = 0.0;
  Source source = Source::UserSupplied;
};

struct RelaxationSpec {
  bool rlt = false;
  bool socRlt = false;
  bool socRltB = false;
  bool gsrtA = false;
  bool gsrtB = false;
  bool sst = false;
  bool sstIncludeConvexPairs = false;
  bool ksocSub = false;
  bool ksocFull = false;
  bool hsoc = false;    // HSOC LMIs from the convex constraints
  bool alphaDiag = false;  // X <= alpha diag(u)^{-1} diag(x)
  bool epigraph = false;
  bool boundProducts = true;  // X_ii <= (l+u) x_i - l u for two-sided bound rows
  bool alphaRow = false;      // append u^T x <= alpha to the linear rows
  std::optional<AlphaAug> alpha;
  int ksocSizeCap = 200;
  std::string name = "sdp";

  bool needs_z() const { return gsrtA || gsrtB || sst || ksocSub || ksocFull; }
};

// Ladder names: sdp, rlt, soc-rlt, soc-rlt-b, gsrt-a, gsrt-b, sst, ksoc-sub,
// ksoc-full, alpha-diag, hsoc. Names and the modifiers `alpha`, `convex-pairs`,
// `epigraph`, `no-box` compose with '+', e.g. "gsrt-b+sst".
RelaxationSpec parse_relaxation(const std::string& name);
const std::vector<std::string>& relaxation_names();

// Everything the builders consume, derived once from the instance and spec.
struct BuildContext {
  QcqpInstance inst;
  Classification cls;
  std::vector<ConstraintDecomposition> decomps;
  std::vector<GsocForm> gsocs;
  std::vector<LinConstraint> lin;  // instance rows plus the alpha row
  std::vector<std::string> notes;
};

BuildContext make_context(const QcqpInstance& inst, const RelaxationSpec& spec);

ConicProgram build_sdp(const BuildContext& ctx, int nz, bool boundProducts = true);
void add_rlt(ConicProgram& prog, const BuildContext& ctx);
void add_soc_rlt(ConicProgram& prog, const BuildContext& ctx);  // A or B per decomposition
void add_gsrt(ConicProgram& prog, const BuildContext& ctx);     // A or B per decomposition
void add_sst(ConicProgram& prog, const BuildContext& ctx, const std::vector<std::pair<int, int>>& pairs);
void add_ksoc_sub(ConicProgram& prog, const BuildContext& ctx,
                  const std::vector<std::pair<int, int>>& pairs);
void add_ksoc_full(ConicProgram& prog, const BuildContext& ctx,
                   const std::vector<std::pair<int, int>>& pairs, int sizeCap = 200);
void add_alpha_diag(ConicProgram& prog, const BuildContext& ctx, const AlphaAug& alpha);
void add_hsoc(ConicProgram& prog, const BuildContext& ctx, const AlphaAug& alpha);

// GSOC pairs s < t, skipping convex-convex pairs unless requested.
std::vector<std::pair<int, int>> gsoc_pairs(const std::vector<GsocForm>& forms,
                                            bool includeConvexPairs);

// The affine matrix [[l I_p, h], [h^T, l]] of a GSOC form.
std::vector<std::vector<AffXZ>> gsoc_arrow(const GsocForm& f, int n, int nz);
// Linearized Tracy-Singh product of two arrow matrices.
PsdBlock ksoc_full_block(const LiftedSpace& sp, const GsocForm& s, const GsocForm& t,
                         const std::string& name);
// Linearized Kronecker product of two affine symmetric matrices.
std::vector<std::vector<LinExpr>> linearize_kron(const LiftedSpace& sp,
                                                 const std::vector<std::vector<AffXZ>>& A,
                                                 const std::vector<std::vector<AffXZ>>& B);

// Throws SettingViolated unless every x_i >= 0 appears as a row and u > 0.
void check_nonneg_setting(const BuildContext& ctx, const AlphaAug& alpha);

ConicProgram build_relaxation(const BuildContext& ctx, const RelaxationSpec& spec);

struct SolveReport {
  std::string relaxation;
  conic::Status status = conic::Status::Failed;
  double bound = 0.0;        // NaN unless Optimal or Inaccurate
  bool boundIsDual = false;  // Inaccurate: dual objective reported
  LiftedSolution solution;
  double seconds = 0.0;
  double buildSeconds = 0.0;
  int nLin = 0, nSoc = 0, nPsd = 0;
  int iterations = 0;
  std::vector<std::string> notes;
  std::string diagnostic;
};

SolveReport solve_program(const ConicProgram& prog, const conic::SolverConfig& config);
SolveReport solve_relaxation(const QcqpInstance& inst, const RelaxationSpec& spec,
                             const conic::SolverConfig& config);

// Maximizes u^T x over the basic SDP relaxation.
AlphaAug compute_alpha(const QcqpInstance& inst, const Vec& u, const conic::SolverConfig& config);

}  // namespace qrelax

#endif
