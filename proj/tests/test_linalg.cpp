// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <random>

#include "error.hpp"
#include "linalg.hpp"
#include "test_util.hpp"

using namespace qrelax;

namespace {

Mat diag3(double a, double b, double c) {
  Vec d(3);
  d << a, b, c;
  return d.asDiagonal();
}

}  // namespace

TEST(Linalg, EigIdentity) {
  auto e = eig_sym(SymMatrix::identity(3));
  EXPECT_TRUE(e.values.isApprox(Vec::Ones(3)));
}

TEST(Linalg, EigDiagonalSortedAscending) {
  auto e = eig_sym(SymMatrix(diag3(5, -2, 0)));
  EXPECT_NEAR(e.values(0), -2, 1e-14);
  EXPECT_NEAR(e.values(1), 0, 1e-14);
  EXPECT_NEAR(e.values(2), 5, 1e-14);
  // eigenvectors of a diagonal matrix are signed axes
  EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.vectors(0, 2)), 1.0, 1e-14);
}

TEST(Linalg, EigSaddle) {
  auto e = eig_sym(SymMatrix(diag3(1, 1, -1)));
  EXPECT_NEAR(e.values(0), -1, 1e-14);
  EXPECT_NEAR(e.values(2), 1, 1e-14);
}

TEST(Linalg, ConstructionSymmetrizes) {
  Mat a = Mat::Zero(2, 2);
  a(0, 1) = 1.0;
  SymMatrix s(a);
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_EQ(s(0, 1), 0.5);
  EXPECT_THROW(SymMatrix(Mat::Zero(2, 3)), Error);
}

TEST(Linalg, NonFiniteRejected) {
  Mat a = Mat::Identity(2, 2);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  try {
    eig_sym(SymMatrix(a));
    FAIL() << "expected InvalidMatrix";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidMatrix);
  }
}

TEST(Linalg, EigReconstruction) {
  std::mt19937_64 g(1);
  for (int rep = 0; rep < 20; ++rep) {
    Mat a = test::random_sym(g, 6);
    auto e = eig_sym(SymMatrix(a));
    Mat r = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    EXPECT_LE((r - a).norm(), 1e-10 * std::max(1.0, a.norm()));
  }
}

TEST(Linalg, SplitSaddle) {
  auto s = split_signed(SymMatrix(diag3(1, 1, -1)));
  ASSERT_EQ(s.posCount, 2);
  ASSERT_EQ(s.negCount, 1);
  EXPECT_EQ(s.L.rows(), 2);
  EXPECT_EQ(s.M.rows(), 1);
  EXPECT_TRUE((s.L.transpose() * s.L).isApprox(diag3(1, 1, 0)));
  EXPECT_TRUE((s.M.transpose() * s.M).isApprox(diag3(0, 0, 1)));
}

TEST(Linalg, SplitPsdHasEmptyM) {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 4;
  a(1, 1) = 9;
  auto s = split_signed(SymMatrix(a));
  EXPECT_EQ(s.negCount, 0);
  EXPECT_EQ(s.M.rows(), 0);
  EXPECT_LE((s.L.transpose() * s.L - a).norm(), 1e-12);
  // rows are 2 e1 and 3 e2 up to order and sign
  Vec rowNorms = s.L.rowwise().norm();
  std::sort(rowNorms.data(), rowNorms.data() + rowNorms.size());
  EXPECT_NEAR(rowNorms(0), 2, 1e-12);
  EXPECT_NEAR(rowNorms(1), 3, 1e-12);
}

TEST(Linalg, SplitReconstructsRandomIndefinite) {
  std::mt19937_64 g(7);
  for (int rep = 0; rep < 50; ++rep) {
    Mat a = test::random_sym(g, 4);
    auto s = split_signed(SymMatrix(a));
    EXPECT_LE((s.L.transpose() * s.L - s.M.transpose() * s.M - a).norm(), 1e-8);
  }
}

TEST(Linalg, PinvDiagonal) {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 2;
  auto p = pinv(SymMatrix(a));
  EXPECT_NEAR(p(0, 0), 0.5, 1e-14);
  EXPECT_NEAR(p(1, 1), 0.0, 1e-14);
  EXPECT_TRUE(pinv(SymMatrix::identity(3)).mat().isApprox(Mat::Identity(3, 3)));
}

TEST(Linalg, PinvInvolutionFullRank) {
  std::mt19937_64 g(3);
  Mat a = test::random_psd(g, 5, 5) + 0.1 * Mat::Identity(5, 5);
  Mat pp = pinv(pinv(SymMatrix(a))).mat();
  EXPECT_LE((pp - a).norm(), 1e-8 * a.norm());
}

TEST(Linalg, PinvPenroseConditions) {
  std::mt19937_64 g(3);
  for (int rep = 0; rep < 20; ++rep) {
    Mat f = test::random_mat(g, 5, 3);
    Mat a = f * Mat(test::random_sym(g, 3)) * f.transpose();  // rank <= 3, indefinite
    a = 0.5 * (a + a.transpose());
    Mat p = pinv(SymMatrix(a)).mat();
    EXPECT_LE((a * p * a - a).norm(), 1e-9 * std::max(1.0, a.norm()));
    EXPECT_LE((p * a * p - p).norm(), 1e-9 * std::max(1.0, p.norm()));
  }
}

TEST(Linalg, PsdSqrt) {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 4;
  a(1, 1) = 9;
  auto r = psd_sqrt(SymMatrix(a));
  EXPECT_NEAR(r(0, 0), 2, 1e-12);
  EXPECT_NEAR(r(1, 1), 3, 1e-12);
  EXPECT_TRUE(psd_sqrt(SymMatrix::identity(3)).mat().isApprox(Mat::Identity(3, 3)));

  std::mt19937_64 g(11);
  Mat b = test::random_psd(g, 5, 5);
  Mat s = psd_sqrt(SymMatrix(b)).mat();
  EXPECT_LE((s * s - b).norm(), 1e-9 * b.norm());
}

TEST(Linalg, PsdSqrtRejectsIndefinite) {
  EXPECT_THROW(psd_sqrt(SymMatrix(diag3(1, 1, -1))), Error);
}

TEST(Linalg, RangeMembership) {
  Mat q = Mat::Zero(2, 2);
  q(0, 0) = 1;
  Vec c(2);
  c << 0, 1;
  EXPECT_FALSE(in_range(SymMatrix(q), c));
  c << 3, 0;
  EXPECT_TRUE(in_range(SymMatrix(q), c));
  std::mt19937_64 g(5);
  Mat nonsing = test::random_psd(g, 3, 3) + Mat::Identity(3, 3);
  EXPECT_TRUE(in_range(SymMatrix(nonsing), test::random_mat(g, 3, 1)));
}

// tr(AB) <= tr(A) tr(B) for PSD A, B.
TEST(Linalg, TraceProductInequality) {
  std::mt19937_64 g(2024);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int rep = 0; rep < 1000; ++rep) {
    int n = dim(g);
    Mat a = test::random_psd(g, n, 1 + rep % n);
    Mat b = test::random_psd(g, n, 1 + (rep / 7) % n);
    double lhs = (a * b).trace();
    EXPECT_GE(lhs, -1e-12);
    EXPECT_LE(lhs, a.trace() * b.trace() + 1e-12);
  }
}

TEST(Linalg, MinMaxEig) {
  EXPECT_NEAR(min_eig(diag3(3, -1, 2)), -1, 1e-14);
  EXPECT_NEAR(max_eig(diag3(3, -1, 2)), 3, 1e-14);
}
