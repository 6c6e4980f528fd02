// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "lift.hpp"
#include "relax.hpp"
#include "test_util.hpp"

using namespace qrelax;

namespace {

// s = h - G v must lie in the cone product.
double cone_margin(const conic::StandardForm& f, const Vec& v) {
  Vec s = f.h - f.G * v;
  double worst = std::numeric_limits<double>::infinity();
  int o = 0;
  for (int i = 0; i < f.dims.nonneg; ++i) worst = std::min(worst, s(o++));
  for (int m : f.dims.soc) {
    worst = std::min(worst, s(o) - s.segment(o + 1, m - 1).norm());
    o += m;
  }
  for (int p : f.dims.psd) {
    int len = conic::svec_size(p);
    worst = std::min(worst, min_eig(conic::smat(s.segment(o, len), p)));
    o += len;
  }
  return worst;
}

}  // namespace

TEST(Lift, SpaceSizes) {
  EXPECT_EQ(LiftedSpace(3, 0).size(), 9);
  EXPECT_EQ(LiftedSpace(3, 1).size(), 14);
  EXPECT_EQ(LiftedSpace(2, 2).size(), 14);
}

TEST(Lift, IndexLayoutIsABijection) {
  LiftedSpace sp(3, 2);
  std::vector<int> seen(sp.size(), 0);
  for (int i = 0; i < 3; ++i) ++seen[sp.x(i)];
  for (int t = 0; t < 2; ++t) ++seen[sp.z(t)];
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      ++seen[sp.X(i, j)];
      EXPECT_EQ(sp.X(i, j), sp.X(j, i));
    }
  for (int i = 0; i < 3; ++i)
    for (int t = 0; t < 2; ++t) ++seen[sp.S(i, t)];
  for (int s = 0; s < 2; ++s)
    for (int t = s; t < 2; ++t) {
      ++seen[sp.Z(s, t)];
      EXPECT_EQ(sp.Z(s, t), sp.Z(t, s));
    }
  for (int c : seen) EXPECT_EQ(c, 1);
}

TEST(Lift, MomentBlockShape) {
  LiftedSpace a(1, 0);
  PsdBlock b = moment_lmi(a);
  EXPECT_EQ(b.dim, 2);
  Vec v(a.size());
  v(a.x(0)) = 2.0;
  v(a.X(0, 0)) = 5.0;
  Mat m = b.eval(v);
  EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m(1, 0), 2.0);
  EXPECT_DOUBLE_EQ(m(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(m(1, 1), 5.0);
  EXPECT_EQ(moment_lmi(LiftedSpace(1, 1)).dim, 3);
}

TEST(Lift, MomentBlockRankOne) {
  std::mt19937_64 g(4);
  LiftedSpace sp(3, 2);
  for (int rep = 0; rep < 50; ++rep) {
    Vec x = test::random_mat(g, 3, 1) * 5.0, z = test::random_mat(g, 2, 1) * 5.0;
    Mat m = moment_lmi(sp).eval(lift_point(sp, x, z));
    Vec w(6);
    w << 1.0, x, z;
    EXPECT_LE((m - w * w.transpose()).norm(), 1e-12);
    EXPECT_GE(min_eig(m), -1e-10);
  }
}

TEST(Lift, ProductLinearizationMatchesRankOne) {
  std::mt19937_64 g(8);
  LiftedSpace sp(3, 2);
  for (int rep = 0; rep < 50; ++rep) {
    AffXZ f{test::random_mat(g, 3, 1), test::random_mat(g, 2, 1), 0.3};
    AffXZ h{test::random_mat(g, 3, 1), test::random_mat(g, 2, 1), -1.1};
    Vec x = test::random_mat(g, 3, 1), z = test::random_mat(g, 2, 1);
    Vec v = lift_point(sp, x, z);
    EXPECT_NEAR(linearize_product(sp, f, h).eval(v), f.eval(x, z) * h.eval(x, z), 1e-12);
    EXPECT_NEAR(embed(sp, f).eval(v), f.eval(x, z), 1e-12);
  }
}

TEST(Lift, FrobeniusLowersToSoc) {
  LiftedSpace sp(2, 0);
  ConicProgram prog(sp);
  FrobBlock fb;
  fb.rows = 2;
  fb.cols = 3;
  for (int i = 0; i < 6; ++i) fb.entries.emplace_back(sp.size(), 1.0);
  fb.bound = LinExpr(sp.size(), 10.0);
  fb.name = "frob";
  prog.frobBlocks.push_back(fb);
  Lowered low = lower(prog);
  ASSERT_EQ(low.form.dims.soc.size(), 1u);
  EXPECT_EQ(low.form.dims.soc[0], 7);
  EXPECT_EQ(low.numSoc, 1);
}

TEST(Lift, MomentPlusBox) {
  const int n = 3;
  LiftedSpace sp(n, 0);
  ConicProgram prog(sp);
  prog.psdBlocks.push_back(moment_lmi(sp));
  for (int i = 0; i < n; ++i) {
    LinExpr lo(sp.size());
    lo.add(sp.x(i), -1.0);
    prog.add_row(lo, RowSense::LessEq, "lo");
    LinExpr hi(sp.size(), -1.0);
    hi.add(sp.x(i), 1.0);
    prog.add_row(hi, RowSense::LessEq, "hi");
  }
  Lowered low = lower(prog);
  EXPECT_EQ(low.numPsd, 1);
  EXPECT_EQ(low.numLin, 2 * n);
  EXPECT_EQ(low.form.dims.nonneg, 2 * n);
  ASSERT_EQ(low.form.dims.psd.size(), 1u);
  EXPECT_EQ(low.form.dims.psd[0], n + 1);
}

// Slacks reported by the IR and cone membership of the lowered form agree,
// and the objective is carried over exactly.
TEST(Lift, LoweringIsLossless) {
  std::mt19937_64 g(12);
  for (const char* stem : {"example1", "example3", "example5"}) {
    auto inst = test::load_fixture(stem);
    auto spec = parse_relaxation("gsrt-a+sst");
    auto ctx = make_context(inst, spec);
    auto prog = build_relaxation(ctx, spec);
    auto low = lower(prog);
    for (int rep = 0; rep < 20; ++rep) {
      Vec v = test::random_mat(g, prog.num_vars(), 1);
      EXPECT_NEAR(prog.objective.eval(v), low.form.c.dot(v) + low.form.c0, 1e-9);
      // rank-one lifted points of random x: cone margin sign matches slacks
      Vec x = 3.0 * test::random_mat(g, inst.n, 1);
      Vec z = lift_z(ctx.gsocs, x, prog.space.nz());
      Vec w = lift_point(prog.space, x, z);
      double minSlack = std::numeric_limits<double>::infinity();
      for (const auto& s : evaluate_slacks(prog, w)) minSlack = std::min(minSlack, s.slack);
      double margin = cone_margin(low.form, w);
      if (std::abs(minSlack) > 1e-6) EXPECT_EQ(minSlack > 0, margin > 0) << stem;
    }
  }
}

TEST(Lift, RecoverRoundTrip) {
  std::mt19937_64 g(21);
  LiftedSpace sp(3, 2);
  conic::RawSolution raw;
  raw.status = conic::Status::Optimal;
  raw.x = test::random_mat(g, sp.size(), 1);
  auto sol = recover(sp, raw);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(sol.x(i), raw.x(sp.x(i)));
    for (int j = 0; j < 3; ++j) EXPECT_EQ(sol.X(i, j), raw.x(sp.X(i, j)));
    for (int t = 0; t < 2; ++t) EXPECT_EQ(sol.S(i, t), raw.x(sp.S(i, t)));
  }
  for (int s = 0; s < 2; ++s) {
    EXPECT_EQ(sol.z(s), raw.x(sp.z(s)));
    for (int t = 0; t < 2; ++t) EXPECT_EQ(sol.Z(s, t), raw.x(sp.Z(s, t)));
  }
  EXPECT_EQ(sol.X, sol.X.transpose());
  EXPECT_EQ(sol.Z, sol.Z.transpose());
}

TEST(Lift, CbfExportHeader) {
  auto inst = test::load_fixture("example3");
  auto spec = parse_relaxation("soc-rlt");
  auto prog = build_relaxation(make_context(inst, spec), spec);
  std::ostringstream os;
  write_cbf(lower(prog), os, "example3 soc-rlt");
  std::string text = os.str();
  EXPECT_NE(text.find("VER\n3"), std::string::npos);
  EXPECT_NE(text.find("OBJSENSE\nMIN"), std::string::npos);
  EXPECT_NE(text.find("PSDCON"), std::string::npos);
  EXPECT_NE(text.find("L+"), std::string::npos);
}
