// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_LINALG_HPP
#define QRELAX_LINALG_HPP

#include <Eigen/Dense>

namespace qrelax {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Dense symmetric matrix. Symmetrized as (A + A^T)/2 on construction.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Mat& a);
  static SymMatrix identity(int n);
  static SymMatrix zero(int n);

  int n() const { return static_cast<int>(a_.rows()); }
  const Mat& mat() const { return a_; }
  double operator()(int i, int j) const { return a_(i, j); }
  double frobenius() const { return a_.norm(); }

 private:
  Mat a_;
};

struct EigenDecomp {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns, A = V diag(values) V^T
};

// Q = L^T L - M^T M; rows ordered by descending |lambda|.
struct EigenSplit {
  Mat L;
  Mat M;
  int posCount = 0;
  int negCount = 0;
  double zeroTolerance = 0.0;
};

// 1e-8 * max(1, |lambda|_max).
double default_zero_tol(const Vec& eigenvalues);

EigenDecomp eig_sym(const SymMatrix& a);
EigenSplit split_signed(const SymMatrix& a, double tol = -1.0);
SymMatrix pinv(const SymMatrix& a, double tol = -1.0);
SymMatrix psd_sqrt(const SymMatrix& a);
bool in_range(const SymMatrix& q, const Vec& c, double tol = 1e-8);

// B = D^{1/2} V^T with eigenpairs in ascending order, zero rows kept, so
// that B^T B = A for PSD A. Requires A PSD within tolerance.
Mat psd_factor_ascending(const SymMatrix& a);

double min_eig(const Mat& a);
double max_eig(const Mat& a);

}  // namespace qrelax

#endif
