// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "error.hpp"

namespace qrelax {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidMatrix: return "InvalidMatrix";
    case ErrorCode::NotPsd: return "NotPsd";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DimError: return "DimError";
    case ErrorCode::InvalidConstraint: return "InvalidConstraint";
    case ErrorCode::RangeConditionViolated: return "RangeConditionViolated";
    case ErrorCode::EmptyInterior: return "EmptyInterior";
    case ErrorCode::SettingViolated: return "SettingViolated";
    case ErrorCode::AlphaInvalid: return "AlphaInvalid";
    case ErrorCode::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorCode::NoFeasiblePointFound: return "NoFeasiblePointFound";
    case ErrorCode::FixtureNotFound: return "FixtureNotFound";
    case ErrorCode::UnknownRelaxation: return "UnknownRelaxation";
    case ErrorCode::SolverFailed: return "SolverFailed";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

SymMatrix::SymMatrix(const Mat& a) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::DimError, "matrix is not square");
  a_ = 0.5 * (a + a.transpose());
}

SymMatrix SymMatrix::identity(int n) { return SymMatrix(Mat::Identity(n, n)); }
SymMatrix SymMatrix::zero(int n) { return SymMatrix(Mat::Zero(n, n)); }

double default_zero_tol(const Vec& eigenvalues) {
  double m = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return 1e-8 * std::max(1.0, m);
}

EigenDecomp eig_sym(const SymMatrix& a) {
  if (!a.mat().allFinite())
    throw Error(ErrorCode::InvalidMatrix, "matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Mat> es(a.mat());
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::InvalidMatrix, "eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

EigenSplit split_signed(const SymMatrix& a, double tol) {
  EigenDecomp ed = eig_sym(a);
  if (tol < 0) tol = default_zero_tol(ed.values);
  const int n = a.n();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
    return std::abs(ed.values(i)) > std::abs(ed.values(j));
  });
  std::vector<int> pos, neg;
  for (int i : order) {
    if (ed.values(i) > tol) pos.push_back(i);
    else if (ed.values(i) < -tol) neg.push_back(i);
  }
  EigenSplit s;
  s.zeroTolerance = tol;
  s.posCount = static_cast<int>(pos.size());
  s.negCount = static_cast<int>(neg.size());
  s.L.resize(s.posCount, n);
  s.M.resize(s.negCount, n);
  for (int r = 0; r < s.posCount; ++r)
    s.L.row(r) = std::sqrt(ed.values(pos[r])) * ed.vectors.col(pos[r]).transpose();
  for (int r = 0; r < s.negCount; ++r)
    s.M.row(r) = std::sqrt(-ed.values(neg[r])) * ed.vectors.col(neg[r]).transpose();
  return s;
}

SymMatrix pinv(const SymMatrix& a, double tol) {
  EigenDecomp ed = eig_sym(a);
  if (tol < 0) tol = default_zero_tol(ed.values);
  Vec inv = ed.values.unaryExpr([tol](double v) { return std::abs(v) > tol ? 1.0 / v : 0.0; });
  return SymMatrix(ed.vectors * inv.asDiagonal() * ed.vectors.transpose());
}

SymMatrix psd_sqrt(const SymMatrix& a) {
  EigenDecomp ed = eig_sym(a);
  const double scale = std::max(1.0, a.frobenius());
  if (ed.values.size() && ed.values.minCoeff() < -1e-6 * scale)
    throw Error(ErrorCode::NotPsd, "matrix is not positive semidefinite");
  Vec r = ed.values.cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(ed.vectors * r.asDiagonal() * ed.vectors.transpose());
}

bool in_range(const SymMatrix& q, const Vec& c, double tol) {
  if (c.size() != q.n()) throw Error(ErrorCode::DimError, "in_range: dimension mismatch");
  Vec r = q.mat() * (pinv(q).mat() * c) - c;
  return r.norm() <= tol * std::max(1.0, c.norm());
}

Mat psd_factor_ascending(const SymMatrix& a) {
  EigenDecomp ed = eig_sym(a);
  const double scale = std::max(1.0, a.frobenius());
  if (ed.values.size() && ed.values.minCoeff() < -1e-6 * scale)
    throw Error(ErrorCode::NotPsd, "matrix is not positive semidefinite");
  Vec r = ed.values.cwiseMax(0.0).cwiseSqrt();
  return r.asDiagonal() * ed.vectors.transpose();
}

double min_eig(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

}  // namespace qrelax
