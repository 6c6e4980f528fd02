// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "error.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace qrelax;

namespace {

void expect_consistent(const QcqpInstance& inst, const OracleResult& r) {
  EXPECT_LE(inst.max_violation(r.bestX), 1e-6);
  EXPECT_EQ(r.bestVal, inst.objective(r.bestX));
  for (int i = 0; i < inst.n; ++i) {
    EXPECT_GE(r.bestX(i), r.box.lo(i));
    EXPECT_LE(r.bestX(i), r.box.hi(i));
  }
}

}  // namespace

TEST(Oracle, Example1) {
  auto inst = test::load_fixture("example1");
  auto r = global_min(inst);
  expect_consistent(inst, r);
  EXPECT_NEAR(r.bestVal, -1.21788, 1e-3);
  Vec want(3);
  want << 0.05256, 1.00646, -0.125414;
  EXPECT_LE((r.bestX - want).norm(), 1e-2);
}

TEST(Oracle, Example3) {
  auto inst = test::load_fixture("example3");
  auto r = global_min(inst);
  expect_consistent(inst, r);
  EXPECT_NEAR(r.bestVal, -3.327, 1e-3);
  EXPECT_NEAR(r.bestX(0), 0.427, 2e-3);
  EXPECT_NEAR(r.bestX(1), 0.588, 2e-3);
}

TEST(Oracle, Example4) {
  auto inst = test::load_fixture("example4");
  auto r = global_min(inst);
  expect_consistent(inst, r);
  EXPECT_NEAR(r.bestVal, -6.4444, 1e-3);
  EXPECT_NEAR(r.bestX(0), 0.0, 1e-3);
  EXPECT_NEAR(r.bestX(1), 0.6667, 1e-3);
}

// A concave objective over a disc attains its minimum on the boundary.
TEST(Oracle, ClosedFormDisc) {
  auto inst = parse_instance(R"({"n": 2, "objective": {"Q": [[-1, 0], [0, -2]], "c": [0, 0]},
    "quadratic": [{"Q": [[1, 0], [0, 1]], "c": [0, 0], "d": -1}], "linear": []})");
  auto r = global_min(inst);
  expect_consistent(inst, r);
  EXPECT_NEAR(r.bestVal, -2.0, 1e-6);
  EXPECT_NEAR(std::abs(r.bestX(1)), 1.0, 1e-4);
}

TEST(Oracle, ResolutionMonotone) {
  auto inst = test::load_fixture("example2");
  OracleOptions coarse, fine;
  coarse.resolution = 25;
  fine.resolution = 50;
  auto a = global_min(inst, std::nullopt, coarse);
  auto b = global_min(inst, std::nullopt, fine);
  EXPECT_LE(b.bestVal, a.bestVal + 1e-8);
}

TEST(Oracle, DerivedBoxUsesLinearRows) {
  auto inst = parse_instance(R"({"n": 2, "objective": {"Q": [[1, 0], [0, 1]], "c": [0, 0]},
    "quadratic": [], "linear": [{"a": [1, 0], "b": 2}, {"a": [-1, 0], "b": 1}]})");
  Box b = derive_box(inst, 10.0);
  EXPECT_DOUBLE_EQ(b.lo(0), -1.0);
  EXPECT_DOUBLE_EQ(b.hi(0), 2.0);
  EXPECT_DOUBLE_EQ(b.lo(1), -10.0);
  EXPECT_DOUBLE_EQ(b.hi(1), 10.0);
}

TEST(Oracle, NoFeasiblePoint) {
  auto inst = parse_instance(R"({"n": 2, "objective": {"Q": [[1, 0], [0, 1]], "c": [0, 0]},
    "quadratic": [{"Q": [[1, 0], [0, 1]], "c": [0, 0], "d": 1}], "linear": []})");
  try {
    global_min(inst);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoFeasiblePointFound);
  }
}

TEST(Oracle, RejectsLargeDimension) {
  QcqpInstance inst;
  inst.n = 5;
  inst.Q0 = SymMatrix::identity(5);
  inst.c0 = Vec::Zero(5);
  EXPECT_THROW(global_min(inst), Error);
}

TEST(Oracle, PolishStaysFeasible) {
  auto inst = test::load_fixture("example3");
  OracleOptions coarse;
  coarse.resolution = 10;
  coarse.polishStarts = 0;
  Vec x0 = global_min(inst, std::nullopt, coarse).bestX;
  ASSERT_LE(inst.max_violation(x0), 0.0);
  Vec x = polish(inst, x0, Vec::Constant(2, 0.1), 1e-10, 0.0);
  EXPECT_LE(inst.max_violation(x), 0.0);
  EXPECT_LE(inst.objective(x), inst.objective(x0));
}
