// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Dense primal-dual interior-point solver for
//
//   minimize    c^T x + c0
//   subject to  A x = b,  G x + s = h,  s in K
//
// where K is a product of the nonnegative orthant, second-order cones
// {(t, u): ||u|| <= t} and PSD cones. PSD blocks are stored as svec: the
// lower triangle, column by column, with off-diagonals scaled by sqrt(2).
// Homogeneous self-dual embedding, Nesterov-Todd scaling, Mehrotra
// predictor-corrector.

#ifndef QRELAX_CONIC_HPP
#define QRELAX_CONIC_HPP

#include <string>
#include <vector>

#include "linalg.hpp"

namespace qrelax::conic {

struct ConeDims {
  int nonneg = 0;
  std::vector<int> soc;  // cone dimensions (1 + tail length)
  std::vector<int> psd;  // matrix orders
  int total() const;
};

struct StandardForm {
  Vec c;
  double c0 = 0.0;
  Mat A;  // meq x nv
  Vec b;
  Mat G;  // dims.total() x nv
  Vec h;
  ConeDims dims;

  int num_vars() const { return static_cast<int>(c.size()); }
};

enum class Status { Optimal, Infeasible, Unbounded, Inaccurate, Failed, TimedOut };

const char* status_name(Status s);

struct SolverConfig {
  double featol = 1e-8;
  double gaptol = 1e-8;
  int maxIter = 120;
  double timeLimit = 0.0;  // seconds, 0 = none
  int verbosity = 0;

  // Throws InvalidArgument when tolerances are outside (0, 1e-2).
  void validate() const;
  // Applies QRELAX_FEATOL, QRELAX_GAPTOL, QRELAX_TIME_LIMIT when set.
  static SolverConfig from_env(SolverConfig base);
};

struct RawSolution {
  Status status = Status::Failed;
  Vec x, y, s, z;
  double primalObj = 0.0;
  double dualObj = 0.0;
  double pres = 0.0;
  double dres = 0.0;
  double gap = 0.0;
  double relgap = 0.0;
  int iterations = 0;
  double seconds = 0.0;
  std::string diagnostic;
};

RawSolution solve(const StandardForm& prob, const SolverConfig& config);

// Nesterov-Todd scaling at an interior pair (s, z); returns W z and W^{-T} s,
// which coincide. False when either point is not interior.
bool nt_scaled_point(const ConeDims& dims, const Vec& s, const Vec& z, Vec& wz, Vec& winvTs);

// svec helpers shared with the lowering code.
int svec_size(int p);
int svec_index(int p, int i, int j);  // i >= j
Vec svec(const Mat& x);
Mat smat(const Vec& v, int p);

}  // namespace qrelax::conic

#endif
