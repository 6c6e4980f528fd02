// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

// Exercises the C interface only; no C++ library headers here.

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "qrelax/qrelax.h"

namespace {

std::string fixture(const char* stem) { return std::string(QRELAX_TEST_FIXTURES) + "/" + stem + ".qcqp"; }

std::string take(char* s) {
  std::string out = s ? s : "";
  qrelax_string_free(s);
  return out;
}

qrelax_options quiet() {
  qrelax_options o;
  qrelax_options_init(&o);
  o.jobs = 1;
  return o;
}

}  // namespace

TEST(CApi, LoadSolveReport) {
  qrelax_instance* inst = nullptr;
  ASSERT_EQ(qrelax_instance_load(fixture("example3").c_str(), &inst), QRELAX_OK);
  int n, l, k, m;
  ASSERT_EQ(qrelax_instance_info(inst, &n, &l, &k, &m), QRELAX_OK);
  EXPECT_EQ(n, 2);
  EXPECT_EQ(l, 2);
  auto opts = quiet();
  qrelax_result* res = nullptr;
  ASSERT_EQ(qrelax_solve(inst, "gsrt-b", nullptr, &opts, &res), QRELAX_OK);
  EXPECT_EQ(qrelax_result_status(res), QRELAX_SOLVE_OPTIMAL);
  EXPECT_NEAR(qrelax_result_bound(res), -3.331, 1e-2);
  double x[4];
  EXPECT_EQ(qrelax_result_x(res, x, 4), 2);
  char* text = nullptr;
  ASSERT_EQ(qrelax_result_report(res, "csv", "test", &text), QRELAX_OK);
  EXPECT_NE(take(text).find("gsrt-b"), std::string::npos);
  qrelax_result_free(res);
  qrelax_instance_free(inst);
}

TEST(CApi, ErrorsCarryMessages) {
  qrelax_instance* inst = nullptr;
  EXPECT_EQ(qrelax_instance_load("/nonexistent/file.qcqp", &inst), QRELAX_ERR_FIXTURE_NOT_FOUND);
  EXPECT_EQ(inst, nullptr);
  EXPECT_STRNE(qrelax_last_error(), "");
  EXPECT_EQ(qrelax_instance_parse("{\"n\": 2, \"objective\": {\"Q\": [[1]]}}", &inst), QRELAX_ERR_DIM);
  EXPECT_EQ(qrelax_instance_parse("not json", &inst), QRELAX_ERR_PARSE);
  EXPECT_EQ(qrelax_instance_load(nullptr, &inst), QRELAX_ERR_INVALID_ARGUMENT);

  ASSERT_EQ(qrelax_instance_load(fixture("example1").c_str(), &inst), QRELAX_OK);
  auto opts = quiet();
  qrelax_result* res = nullptr;
  EXPECT_EQ(qrelax_solve(inst, "gsrt-z", nullptr, &opts, &res), QRELAX_ERR_UNKNOWN_RELAXATION);
  qrelax_report* rep = nullptr;
  EXPECT_EQ(qrelax_verify(inst, "alpha-lmi", "u=1,1,1;alpha=2", &opts, &rep), QRELAX_ERR_SETTING_VIOLATED);
  EXPECT_STREQ(qrelax_status_name(QRELAX_ERR_SETTING_VIOLATED), "SettingViolated");
  qrelax_instance_free(inst);
  qrelax_instance_free(nullptr);
  qrelax_result_free(nullptr);
  qrelax_report_free(nullptr);
}

TEST(CApi, GenerateSerializeParse) {
  qrelax_gen_spec g{};
  g.n = 4;
  g.l = 2;
  g.k = 1;
  g.m = 2;
  g.seed = 1;
  qrelax_instance* a = nullptr;
  ASSERT_EQ(qrelax_instance_generate(&g, &a), QRELAX_OK);
  EXPECT_STREQ(qrelax_instance_name(a), "set-4-2-1-2-s1");
  char* s = nullptr;
  ASSERT_EQ(qrelax_instance_serialize(a, &s), QRELAX_OK);
  std::string text = take(s);
  qrelax_instance* b = nullptr;
  ASSERT_EQ(qrelax_instance_parse(text.c_str(), &b), QRELAX_OK);
  ASSERT_EQ(qrelax_instance_serialize(b, &s), QRELAX_OK);
  EXPECT_EQ(take(s), text);
  g.k = 5;
  qrelax_instance* c = nullptr;
  EXPECT_EQ(qrelax_instance_generate(&g, &c), QRELAX_ERR_INVALID_ARGUMENT);
  qrelax_instance_free(a);
  qrelax_instance_free(b);
}

TEST(CApi, CompareVerifyOracle) {
  qrelax_instance* inst = nullptr;
  ASSERT_EQ(qrelax_instance_load(fixture("example4").c_str(), &inst), QRELAX_OK);
  auto opts = quiet();
  qrelax_report* rep = nullptr;
  ASSERT_EQ(qrelax_compare(inst, "sdp,rlt,soc-rlt,gsrt-a,gsrt-b", "u=1,1;alpha=0.6667", 1, &opts, &rep), QRELAX_OK);
  EXPECT_EQ(qrelax_report_failures(rep), 0);
  EXPECT_EQ(qrelax_report_violations(rep), 0);
  EXPECT_NEAR(qrelax_report_value(rep), -6.4444, 1e-3);
  char* s = nullptr;
  ASSERT_EQ(qrelax_report_render(rep, "structured", "cmd", &s), QRELAX_OK);
  EXPECT_NE(take(s).find("\"command\""), std::string::npos);
  EXPECT_EQ(qrelax_report_render(rep, "xml", nullptr, &s), QRELAX_ERR_INVALID_ARGUMENT);
  qrelax_report_free(rep);

  ASSERT_EQ(qrelax_verify(inst, "all", "u=1,1", &opts, &rep), QRELAX_OK);
  EXPECT_EQ(qrelax_report_violations(rep), 0);
  qrelax_report_free(rep);

  ASSERT_EQ(qrelax_oracle(inst, &opts, &rep), QRELAX_OK);
  EXPECT_NEAR(qrelax_report_value(rep), -6.4444, 1e-3);
  qrelax_report_free(rep);

  ASSERT_EQ(qrelax_export_cbf(inst, "gsrt-a", nullptr, &opts, &s), QRELAX_OK);
  EXPECT_NE(take(s).find("\nVER\n3\n"), std::string::npos);
  qrelax_instance_free(inst);
}

TEST(CApi, ReferenceAndNames) {
  char* s = nullptr;
  ASSERT_EQ(qrelax_relaxation_names(&s), QRELAX_OK);
  EXPECT_NE(take(s).find("gsrt-b"), std::string::npos);
  EXPECT_STRNE(qrelax_version(), "");
  auto opts = quiet();
  qrelax_report* rep = nullptr;
  EXPECT_EQ(qrelax_reference_examples("/nonexistent", &opts, &rep), QRELAX_ERR_FIXTURE_NOT_FOUND);
}

TEST(CApi, OptionsFromEnv) {
  qrelax_options o;
  qrelax_options_init(&o);
  setenv("QRELAX_FEATOL", "1e-7", 1);
  EXPECT_EQ(qrelax_options_from_env(&o), QRELAX_OK);
  EXPECT_DOUBLE_EQ(o.featol, 1e-7);
  setenv("QRELAX_FEATOL", "abc", 1);
  EXPECT_EQ(qrelax_options_from_env(&o), QRELAX_ERR_INVALID_ARGUMENT);
  unsetenv("QRELAX_FEATOL");
}
