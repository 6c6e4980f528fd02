// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_ORACLE_HPP
#define QRELAX_ORACLE_HPP

#include <optional>

#include "model.hpp"

namespace qrelax {

struct Box {
  Vec lo, hi;
};

struct OracleOptions {
  int resolution = 0;          // points per axis; 0 picks about 4e6 points in total
  double defaultRadius = 10.0;
  int polishStarts = 10;
  double polishTol = 1e-10;    // final pattern step
  double feasTol = 0.0;        // accepted constraint value
  int threads = 0;             // 0 = hardware concurrency
};

struct OracleResult {
  Vec bestX;
  double bestVal = 0.0;
  Box box;
  int gridResolution = 0;
  bool refined = false;
  long long feasibleGridPoints = 0;
};

// [-r, r]^n tightened by interval propagation over the linear rows.
Box derive_box(const QcqpInstance& inst, double radius);

// Grid scan plus feasible pattern-search polish. n <= 4.
OracleResult global_min(const QcqpInstance& inst, const std::optional<Box>& box = std::nullopt,
                        const OracleOptions& opt = OracleOptions());

// Feasible pattern search from a feasible x0 with initial steps h0.
Vec polish(const QcqpInstance& inst, const Vec& x0, const Vec& h0, double tol, double feasTol);

}  // namespace qrelax

#endif
