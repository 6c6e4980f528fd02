// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include "error.hpp"
#include "model.hpp"
#include "oracle.hpp"
#include "test_util.hpp"

using namespace qrelax;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::Io;
}

}  // namespace

TEST(Model, LoadsFixture) {
  auto inst = test::load_fixture("example1");
  EXPECT_EQ(inst.n, 3);
  EXPECT_EQ(inst.l(), 1);
  EXPECT_EQ(inst.m(), 1);
  EXPECT_EQ(inst.name, "example1");
  EXPECT_DOUBLE_EQ(inst.Q0(1, 1), -2.0);
  EXPECT_DOUBLE_EQ(inst.lin[0].b, -0.5);
}

TEST(Model, UnconstrainedInstance) {
  auto inst = parse_instance(R"({"n": 2, "objective": {"Q": [[1,0],[0,1]], "c": [0,0]},
                                 "quadratic": [], "linear": []})");
  EXPECT_EQ(inst.n, 2);
  EXPECT_EQ(inst.l(), 0);
  EXPECT_EQ(inst.m(), 0);
}

TEST(Model, DimensionMismatch) {
  EXPECT_EQ(code_of([] {
              parse_instance(R"({"n": 3, "objective": {"Q": [[1,0,0],[0,1,0],[0,0,1]], "c": [0,0,0]},
                                 "quadratic": [{"Q": [[1,0,0],[0,1,0],[0,0,1]], "c": [0,0], "d": -1}],
                                 "linear": []})");
            }),
            ErrorCode::DimError);
}

TEST(Model, ZeroQuadraticRejected) {
  EXPECT_EQ(code_of([] {
              parse_instance(R"({"n": 2, "objective": {"Q": [[1,0],[0,1]], "c": [0,0]},
                                 "quadratic": [{"Q": [[0,0],[0,0]], "c": [1,0], "d": -1}],
                                 "linear": []})");
            }),
            ErrorCode::InvalidConstraint);
}

TEST(Model, MalformedDocument) {
  EXPECT_EQ(code_of([] { parse_instance("{not json"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { parse_instance(R"({"n": 2})"); }), ErrorCode::ParseError);
}

TEST(Model, MissingFile) {
  EXPECT_EQ(code_of([] { load_instance("/nonexistent/none.qcqp"); }), ErrorCode::FixtureNotFound);
}

TEST(Model, AsymmetricInputSymmetrizedWithWarning) {
  auto inst = parse_instance(R"({"n": 2, "objective": {"Q": [[1,2],[0,1]], "c": [0,0]},
                                 "quadratic": [], "linear": []})");
  EXPECT_DOUBLE_EQ(inst.Q0(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(inst.Q0(1, 0), 1.0);
  EXPECT_FALSE(inst.warnings.empty());
}

TEST(Model, RoundTrip) {
  for (const char* stem : {"example1", "example2", "example3", "example4", "example5", "example6"}) {
    auto a = test::load_fixture(stem);
    std::string text = serialize_instance(a);
    auto b = parse_instance(text);
    EXPECT_EQ(serialize_instance(b), text) << stem;
    EXPECT_EQ(a.Q0.mat(), b.Q0.mat()) << stem;
  }
}

TEST(Model, ClassifyExamples) {
  auto c1 = classify(test::load_fixture("example1"));
  EXPECT_TRUE(c1.convexIdx.empty());
  EXPECT_EQ(c1.nonconvexIdx, std::vector<int>{0});
  EXPECT_TRUE(c1.type_b(0));
  EXPECT_EQ(c1.k, 0);

  auto c3 = classify(test::load_fixture("example3"));
  EXPECT_EQ(c3.convexIdx, std::vector<int>{0});
  EXPECT_EQ(c3.nonconvexIdx, std::vector<int>{1});
  EXPECT_EQ(c3.k, 1);
  EXPECT_EQ(c3.z_index(1), 0);
  EXPECT_EQ(c3.z_index(0), -1);
}

TEST(Model, ClassifyAllConvex) {
  auto inst = parse_instance(R"({"n": 2, "objective": {"Q": [[1,0],[0,-1]], "c": [0,0]},
                                 "quadratic": [{"Q": [[1,0],[0,1]], "c": [0,0], "d": -1},
                                               {"Q": [[2,1],[1,2]], "c": [1,0], "d": -3}],
                                 "linear": []})");
  auto c = classify(inst);
  EXPECT_EQ(c.k, 2);
  EXPECT_TRUE(c.nonconvexIdx.empty());
}

TEST(Model, ClassifyStableUnderTinyPerturbation) {
  auto inst = test::load_fixture("example3");
  auto before = classify(inst);
  Mat q = inst.quad[0].Q.mat();
  q(0, 1) += 1e-13;
  q(1, 0) += 1e-13;
  inst.quad[0].Q = SymMatrix(q);
  auto after = classify(inst);
  EXPECT_EQ(before.convexIdx, after.convexIdx);
  EXPECT_EQ(before.nonconvexIdx, after.nonconvexIdx);
}

TEST(Model, EpigraphShape) {
  auto e = epigraph_reformulate(test::load_fixture("example1"));
  EXPECT_EQ(e.n, 4);
  EXPECT_EQ(e.l(), 2);
  EXPECT_EQ(e.m(), 1);
  Vec want = Vec::Zero(4);
  want(3) = 1.0;
  EXPECT_EQ(e.c0, want);
  EXPECT_EQ(e.Q0.mat(), Mat::Zero(4, 4));
}

TEST(Model, EpigraphClassification) {
  // convex objective: new constraint is convex
  auto convex = parse_instance(R"({"n": 2, "objective": {"Q": [[1,0],[0,2]], "c": [0,0]},
                                   "quadratic": [{"Q": [[1,0],[0,-1]], "c": [0,0], "d": -1}],
                                   "linear": []})");
  auto ce = epigraph_reformulate(convex);
  auto cc = classify(ce);
  EXPECT_TRUE(cc.is_convex(ce.l() - 1));

  auto e5 = epigraph_reformulate(test::load_fixture("example5"));
  auto c5 = classify(e5);
  EXPECT_FALSE(c5.is_convex(e5.l() - 1));
}

TEST(Model, EpigraphPreservesValue) {
  auto inst = test::load_fixture("example2");
  auto e = epigraph_reformulate(inst);
  OracleOptions o;
  o.resolution = 40;
  auto a = global_min(inst);
  // tau lives in [oracle - 5, oracle + 5]
  Box box = derive_box(e, 10.0);
  box.lo(e.n - 1) = a.bestVal - 5.0;
  box.hi(e.n - 1) = a.bestVal + 5.0;
  auto b = global_min(e, box, o);
  EXPECT_NEAR(a.bestVal, b.bestVal, 1e-4);
}

TEST(Model, ViolationAndObjective) {
  auto inst = test::load_fixture("example1");
  Vec x = Vec::Zero(3);
  EXPECT_DOUBLE_EQ(inst.objective(x), 0.0);
  // quadratic: -1 ; linear: 0 - (-0.5) = 0.5
  EXPECT_DOUBLE_EQ(inst.max_violation(x), 0.5);
}
