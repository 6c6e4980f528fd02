// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <random>

#include "conic.hpp"
#include "error.hpp"
#include "test_util.hpp"

using namespace qrelax;
using namespace qrelax::conic;

namespace {

StandardForm empty_form(int nv) {
  StandardForm f;
  f.c = Vec::Zero(nv);
  f.A = Mat::Zero(0, nv);
  f.b = Vec::Zero(0);
  f.G = Mat::Zero(0, nv);
  f.h = Vec::Zero(0);
  return f;
}

// min x  s.t.  x >= lo
StandardForm lp_lower(double lo) {
  StandardForm f = empty_form(1);
  f.c(0) = 1.0;
  f.G = Mat::Constant(1, 1, -1.0);
  f.h = Vec::Constant(1, -lo);
  f.dims.nonneg = 1;
  return f;
}

}  // namespace

TEST(Conic, LinearProgram) {
  auto r = solve(lp_lower(1.0), SolverConfig{});
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.primalObj, 1.0, 1e-8);
  EXPECT_NEAR(r.x(0), 1.0, 1e-8);
}

TEST(Conic, FixedSecondOrderCone) {
  // min t  s.t.  ||(3, 4)|| <= t
  StandardForm f = empty_form(1);
  f.c(0) = 1.0;
  f.G = Mat::Zero(3, 1);
  f.G(0, 0) = -1.0;
  f.h = Vec::Zero(3);
  f.h << 0.0, 3.0, 4.0;
  f.dims.soc = {3};
  auto r = solve(f, SolverConfig{});
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.primalObj, 5.0, 1e-7);
}

TEST(Conic, FixedPsdCone) {
  // min tr X  s.t.  X - I >= 0, 2x2, X as svec
  StandardForm f = empty_form(3);
  Vec trace = svec(Mat::Identity(2, 2));
  f.c = trace;
  f.G = -Mat::Identity(3, 3);
  f.h = -trace;
  f.dims.psd = {2};
  auto r = solve(f, SolverConfig{});
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.primalObj, 2.0, 1e-7);
}

TEST(Conic, EqualityRows) {
  // min x1 + x2  s.t.  x1 - x2 = 0.5, x >= 1
  StandardForm f = empty_form(2);
  f.c << 1.0, 1.0;
  f.A = Mat(1, 2);
  f.A << 1.0, -1.0;
  f.b = Vec::Constant(1, 0.5);
  f.G = -Mat::Identity(2, 2);
  f.h = -Vec::Ones(2);
  f.dims.nonneg = 2;
  auto r = solve(f, SolverConfig{});
  ASSERT_EQ(r.status, Status::Optimal);
  EXPECT_NEAR(r.primalObj, 2.5, 1e-7);
}

TEST(Conic, Infeasible) {
  // x >= 1 and x <= 0
  StandardForm f = empty_form(1);
  f.c(0) = 1.0;
  f.G = Mat(2, 1);
  f.G << -1.0, 1.0;
  f.h = Vec(2);
  f.h << -1.0, 0.0;
  f.dims.nonneg = 2;
  EXPECT_EQ(solve(f, SolverConfig{}).status, Status::Infeasible);
}

TEST(Conic, Unbounded) {
  // min x  s.t.  x <= 0
  StandardForm f = empty_form(1);
  f.c(0) = 1.0;
  f.G = Mat::Constant(1, 1, 1.0);
  f.h = Vec::Zero(1);
  f.dims.nonneg = 1;
  EXPECT_EQ(solve(f, SolverConfig{}).status, Status::Unbounded);
}

TEST(Conic, TimeLimit) {
  SolverConfig cfg;
  cfg.timeLimit = 1e-12;
  auto r = solve(lp_lower(1.0), cfg);
  EXPECT_EQ(r.status, Status::TimedOut);
}

TEST(Conic, ConfigValidation) {
  SolverConfig cfg;
  cfg.featol = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.featol = 0.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.featol = 1e-8;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Conic, Deterministic) {
  StandardForm f = empty_form(3);
  Vec trace = svec(Mat::Identity(2, 2));
  f.c = trace + Vec::Constant(3, 0.1);
  f.G = -Mat::Identity(3, 3);
  f.h = -trace;
  f.dims.psd = {2};
  auto a = solve(f, SolverConfig{});
  auto b = solve(f, SolverConfig{});
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.primalObj, b.primalObj);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Conic, SvecPreservesInnerProducts) {
  std::mt19937_64 g(9);
  for (int p = 1; p <= 5; ++p) {
    Mat a = test::random_sym(g, p), b = test::random_sym(g, p);
    EXPECT_NEAR(svec(a).dot(svec(b)), (a * b).trace(), 1e-12);
    EXPECT_LE((smat(svec(a), p) - a).norm(), 1e-14);
    EXPECT_EQ(svec(a).size(), svec_size(p));
  }
  EXPECT_EQ(svec_index(3, 0, 0), 0);
  EXPECT_EQ(svec_index(3, 1, 0), 1);
  EXPECT_EQ(svec_index(3, 2, 0), 2);
  EXPECT_EQ(svec_index(3, 1, 1), 3);
}

// W z and W^{-T} s coincide at the Nesterov-Todd scaling point.
TEST(Conic, NtScalingIdentity) {
  std::mt19937_64 g(31);
  ConeDims dims;
  dims.nonneg = 3;
  dims.soc = {3, 4};
  dims.psd = {2, 3};
  for (int rep = 0; rep < 50; ++rep) {
    auto interior = [&] {
      Vec v(dims.total());
      int o = 0;
      for (int i = 0; i < dims.nonneg; ++i) v(o++) = 0.1 + std::abs(test::random_mat(g, 1, 1)(0, 0));
      for (int m : dims.soc) {
        Vec t = test::random_mat(g, m - 1, 1);
        v(o) = t.norm() + 0.1 + std::abs(test::random_mat(g, 1, 1)(0, 0));
        v.segment(o + 1, m - 1) = t;
        o += m;
      }
      for (int p : dims.psd) {
        Mat a = test::random_psd(g, p, p) + 0.1 * Mat::Identity(p, p);
        v.segment(o, svec_size(p)) = svec(a);
        o += svec_size(p);
      }
      return v;
    };
    Vec s = interior(), z = interior();
    Vec wz, ws;
    ASSERT_TRUE(nt_scaled_point(dims, s, z, wz, ws));
    EXPECT_LE((wz - ws).norm(), 1e-9 * std::max(1.0, wz.norm()));
    EXPECT_NEAR(wz.dot(ws), s.dot(z), 1e-9 * std::max(1.0, s.dot(z)));
  }
  // a boundary point is rejected
  Vec s = Vec::Ones(dims.total()), z = Vec::Ones(dims.total());
  s(0) = 0.0;
  Vec wz, ws;
  EXPECT_FALSE(nt_scaled_point(dims, s, z, wz, ws));
}

TEST(Conic, EnvironmentOverrides) {
  setenv("QRELAX_FEATOL", "1e-7", 1);
  setenv("QRELAX_TIME_LIMIT", "12", 1);
  auto c = SolverConfig::from_env(SolverConfig{});
  unsetenv("QRELAX_FEATOL");
  unsetenv("QRELAX_TIME_LIMIT");
  EXPECT_DOUBLE_EQ(c.featol, 1e-7);
  EXPECT_DOUBLE_EQ(c.timeLimit, 12.0);
  EXPECT_DOUBLE_EQ(c.gaptol, 1e-8);
}
