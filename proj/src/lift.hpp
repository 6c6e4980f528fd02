// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_LIFT_HPP
#define QRELAX_LIFT_HPP

#include <Eigen/SparseCore>
#include <ostream>
#include <string>
#include <vector>

#include "conic.hpp"
#include "linalg.hpp"

namespace qrelax {

// Lifted variables (x, z, X, S, Z) laid out as
//   x (n), z (nz), svec(X), vec(S), svec(Z)
// where svec lists pairs (i, j), i <= j, row by row and vec(S) is row-major
// over (i, t). Entries are stored unscaled.
class LiftedSpace {
 public:
  LiftedSpace() = default;
  LiftedSpace(int n, int nz);

  int n() const { return n_; }
  int nz() const { return nz_; }
  int size() const { return size_; }

  int x(int i) const { return i; }
  int z(int t) const { return n_ + t; }
  int X(int i, int j) const;
  int S(int i, int t) const { return offS_ + i * nz_ + t; }
  int Z(int s, int t) const;

 private:
  static int tri(int n, int i, int j);
  int n_ = 0, nz_ = 0, size_ = 0;
  int offX_ = 0, offS_ = 0, offZ_ = 0;
};

// Affine function of the lifted variables.
struct LinExpr {
  Eigen::SparseVector<double> coef;
  double constant = 0.0;

  LinExpr() = default;
  explicit LinExpr(int size, double c = 0.0) : coef(size), constant(c) {}

  LinExpr& add(int var, double v);
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double a);
  double eval(const Vec& v) const;
};

LinExpr operator+(LinExpr a, const LinExpr& b);
LinExpr operator-(LinExpr a, const LinExpr& b);
LinExpr operator*(double s, LinExpr a);

// Affine function of the base variables: ax^T x + az^T z + c.
struct AffXZ {
  Vec ax;
  Vec az;
  double c = 0.0;

  static AffXZ constant(int n, int nz, double c);
  static AffXZ of_x(const Vec& a, int nz, double c = 0.0);
  static AffXZ var_z(int n, int nz, int t);
  AffXZ operator+(const AffXZ& o) const;
  AffXZ operator-(const AffXZ& o) const;
  AffXZ operator*(double s) const;
  double eval(const Vec& x, const Vec& z) const;
};

// Embeds f as a lifted linear expression.
LinExpr embed(const LiftedSpace& sp, const AffXZ& f);
// Linearization of the product f * g: xx^T -> X, xz^T -> S, zz^T -> Z.
LinExpr linearize_product(const LiftedSpace& sp, const AffXZ& f, const AffXZ& g);

enum class RowSense { LessEq, Equal, GreaterEq };

struct LinRow {
  LinExpr expr;  // expr (sense) 0
  RowSense sense = RowSense::LessEq;
  std::string name;
};

// ||tail|| <= head
struct SocBlock {
  LinExpr head;
  std::vector<LinExpr> tail;
  std::string name;
};

// ||A||_F <= bound, entries row-major.
struct FrobBlock {
  int rows = 0, cols = 0;
  std::vector<LinExpr> entries;
  LinExpr bound;
  std::string name;
};

// Symmetric affine matrix >= 0; lower triangle stored.
struct PsdBlock {
  int dim = 0;
  std::vector<LinExpr> lower;
  std::string name;

  PsdBlock() = default;
  PsdBlock(int d, int nvars, std::string nm);
  LinExpr& at(int i, int j);
  const LinExpr& at(int i, int j) const;
  Mat eval(const Vec& v) const;
};

struct ConicProgram {
  LiftedSpace space;
  LinExpr objective;
  std::vector<LinRow> linRows;
  std::vector<SocBlock> socBlocks;
  std::vector<FrobBlock> frobBlocks;
  std::vector<PsdBlock> psdBlocks;
  std::vector<std::string> notes;

  explicit ConicProgram(const LiftedSpace& sp = LiftedSpace());
  int num_vars() const { return space.size(); }
  void add_row(LinExpr e, RowSense sense, std::string name);
};

// (1 x^T z^T; x X S; z S^T Z)
PsdBlock moment_lmi(const LiftedSpace& sp);

struct ConstraintSlack {
  std::string name;
  double slack;  // >= 0 when satisfied
};

// Slack of every constraint at the lifted point v.
std::vector<ConstraintSlack> evaluate_slacks(const ConicProgram& prog, const Vec& v);

// Rank-one lifted point X = xx^T, S = xz^T, Z = zz^T.
Vec lift_point(const LiftedSpace& sp, const Vec& x, const Vec& z);

struct Lowered {
  conic::StandardForm form;
  std::vector<std::string> rowNames;  // one per cone block / equality row
  int numLin = 0, numSoc = 0, numPsd = 0;
};

// Frobenius blocks become SOC blocks. The standard-form variable vector is
// the lifted vector itself.
Lowered lower(const ConicProgram& prog);

struct LiftedSolution {
  Vec x, z;
  Mat X, S, Z;
  double objective = 0.0;
  double dualObjective = 0.0;
  conic::Status status = conic::Status::Failed;
  double pres = 0.0, dres = 0.0, gap = 0.0;
  double momentMinEig = 0.0;
  Vec raw;
};

LiftedSolution recover(const LiftedSpace& sp, const conic::RawSolution& raw);

// Conic Benchmark Format (CBF) version 3 text export.
void write_cbf(const Lowered& low, std::ostream& out, const std::string& comment = "");

}  // namespace qrelax

#endif
