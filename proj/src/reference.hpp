// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_REFERENCE_HPP
#define QRELAX_REFERENCE_HPP

#include <string>
#include <vector>

#include "bench.hpp"

namespace qrelax {

// One published number. `target` is a relaxation name, "oracle", or "x<i>"
// for a coordinate of the minimizer of `relaxation`.
struct ReferenceValue {
  std::string target;
  std::string relaxation;
  double expected = 0.0;
  double tol = 1e-3;
};

struct ReferenceCase {
  std::string fixture;  // file stem under the fixture directory
  std::string alpha;    // alpha spec text, empty when unused
  std::vector<ReferenceValue> values;
};

const std::vector<ReferenceCase>& reference_examples();

struct ReferenceOutcome {
  std::string fixture;
  std::string target;
  double expected = 0.0;
  double actual = 0.0;
  double tol = 0.0;
  bool pass = false;
  std::string status;
};

// Runs every case found under fixtureDir. Missing fixtures throw FixtureNotFound.
std::vector<ReferenceOutcome> run_reference_examples(const std::string& fixtureDir,
                                                     const conic::SolverConfig& cfg, int jobs = 0);

std::string format_reference(const std::vector<ReferenceOutcome>& r, Format f, const RunMeta& meta);

}  // namespace qrelax

#endif
