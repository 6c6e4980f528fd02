// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_MODEL_HPP
#define QRELAX_MODEL_HPP

#include <string>
#include <vector>

#include "linalg.hpp"

namespace qrelax {

// x^T Q x + c^T x + d <= 0
struct QuadConstraint {
  SymMatrix Q;
  Vec c;
  double d = 0.0;
};

// a^T x <= b
struct LinConstraint {
  Vec a;
  double b = 0.0;
};

struct QcqpInstance {
  std::string name;
  int n = 0;
  SymMatrix Q0;
  Vec c0;
  std::vector<QuadConstraint> quad;
  std::vector<LinConstraint> lin;
  std::vector<std::string> warnings;  // produced while loading

  int l() const { return static_cast<int>(quad.size()); }
  int m() const { return static_cast<int>(lin.size()); }

  // Throws DimError / InvalidConstraint.
  void validate() const;

  double objective(const Vec& x) const;
  // Largest constraint value (<= 0 means feasible).
  double max_violation(const Vec& x) const;
};

struct Classification {
  std::vector<int> convexIdx;
  std::vector<int> nonconvexIdx;
  std::vector<int> typeBEligible;  // indices over all of 1..l with c in Range(Q)
  int k = 0;

  bool is_convex(int i) const;
  bool type_b(int i) const;
  // Position of i within sorted nonconvexIdx, or -1.
  int z_index(int i) const;
  int nz() const { return static_cast<int>(nonconvexIdx.size()); }
};

QcqpInstance parse_instance(const std::string& text);
std::string serialize_instance(const QcqpInstance& inst);

// Resolves `path`, then `path.qcqp`, then `path.json`; FixtureNotFound otherwise.
std::string resolve_instance_path(const std::string& path);
QcqpInstance load_instance(const std::string& path);
void save_instance(const QcqpInstance& inst, const std::string& path);

Classification classify(const QcqpInstance& inst, double tol = 1e-8);

// min tau s.t. x^T Q0 x + c0^T x - tau <= 0, original constraints.
QcqpInstance epigraph_reformulate(const QcqpInstance& inst);

}  // namespace qrelax

#endif
