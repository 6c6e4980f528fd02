// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#ifndef QRELAX_BENCH_HPP
#define QRELAX_BENCH_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "relax.hpp"

namespace qrelax {

uint64_t splitmix64(uint64_t x);

// Uniform doubles from mt19937_64 as (next >> 11) * 2^-53.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  double uniform(double a, double b);

 private:
  std::mt19937_64 eng_;
};

// Round half away from zero.
double round_half_away(double v);

struct GenSpec {
  int n = 4, l = 2, k = 1, m = 2;
  uint64_t seed = 1;
  std::optional<int> phi;   // negative eigenvalues per nonconvex constraint
  bool figuresMode = false; // Q0 = I - sum Q_i
  bool nonneg = false;      // append x >= 0 rows

  void validate() const;
  std::string name() const;  // set-n-l-k-m-s<seed>
};

QcqpInstance generate(const GenSpec& spec);

// "u=1,2" or "u=1,2;alpha=1.8029". Alpha stays unset when not pinned.
struct AlphaSpec {
  Vec u;
  std::optional<double> alpha;
};
AlphaSpec parse_alpha_spec(const std::string& text, int n);
// Pinned or computed over the basic SDP relaxation.
AlphaAug resolve_alpha(const QcqpInstance& inst, const AlphaSpec& a, const conic::SolverConfig& cfg);

// Relaxation names in a compare run; with alpha every family except sdp,
// alpha-diag and hsoc is also run with the extra row.
std::vector<std::string> expand_relaxations(const std::vector<std::string>& names, bool withAlpha);

// True when every constraint of `a` is also emitted by `b`.
bool contained_in(const RelaxationSpec& a, const RelaxationSpec& b);

struct CompareCell {
  std::string relaxation;
  bool ok = false;  // false when building or solving threw
  std::string error;
  SolveReport report;
};

struct DominanceViolation {
  std::string weaker, stronger;
  double weakerBound = 0.0, strongerBound = 0.0;
};

struct CompareReport {
  std::string instance;
  int n = 0, l = 0, k = 0, m = 0;
  std::vector<CompareCell> cells;
  std::optional<AlphaAug> alpha;
  std::optional<double> improvementRatio;
  std::string ratioFamily;
  std::vector<DominanceViolation> violations;
  std::vector<std::string> findings;
  std::optional<OracleResult> oracle;
  std::vector<std::string> oracleViolations;  // bounds above the oracle value
  int solverFailures() const;
};

constexpr double kMonotoneTol = 1e-5;
constexpr double kOracleTol = 1e-4;
// The sweep accepts a stalled solve whose residuals are within this multiple
// of the feasibility tolerance; its dual objective is used as the bound.
constexpr double kNearOptimalFactor = 100.0;

// Solves each relaxation on a pool of `jobs` workers (0 = hardware).
CompareReport compare(const QcqpInstance& inst, const std::vector<std::string>& relaxations,
                      const std::optional<AlphaSpec>& alpha, const conic::SolverConfig& cfg,
                      int jobs = 0, bool withOracle = false);

// (v(gsrt) - v(rlt)) / |v(rlt)|
std::optional<double> improvement_ratio(double vRlt, double vGsrt);

enum class Check { AlphaLmi, Hsoc, HsocGsoc, SstConvex, KsocHsoc, KsocGsoc };
const char* check_name(Check c);
Check parse_check(const std::string& s);
const std::vector<Check>& all_checks();

struct ResidualItem {
  std::string name;
  double value = 0.0;  // min eigenvalue, slack or difference
  bool pass = false;
};

struct DominanceReport {
  Check check = Check::AlphaLmi;
  std::string dominating;
  conic::Status status = conic::Status::Failed;
  double bound = 0.0;
  std::vector<ResidualItem> items;
  double worst = 0.0;
  bool applicable = true;
  bool passed = false;
  std::string detail;
};

constexpr double kResidualTol = 1e-6;

// Solves the dominating relaxation and evaluates the dominated constraint at
// its optimum. `alpha` is required except for SstConvex; when absent, u = 1
// and alpha_u is computed.
DominanceReport verify_dominance(const QcqpInstance& inst, Check check,
                                 const std::optional<AlphaSpec>& alpha,
                                 const conic::SolverConfig& cfg);

struct SweepSpec {
  int n = 10, l = 3, k = 0;
  std::vector<int> phis = {2, 5, 8};
  int mMin = 1, mMax = 10;
  int reps = 5;
  uint64_t baseSeed = 2024;
};

uint64_t sweep_seed(uint64_t base, int phi, int m, int rep);

struct SweepRow {
  int phi = 0, m = 0;
  int count = 0;  // instances with all three bounds usable
  double meanA = 0.0, maxA = 0.0, meanB = 0.0, maxB = 0.0;
  int skipped = 0;
  int inexact = 0;  // counted instances where some bound came from a near-optimal dual
};

struct SweepReport {
  SweepSpec spec;
  std::vector<SweepRow> rows;
  double minRatio = 0.0;
};

SweepReport figures_sweep(const SweepSpec& spec, const conic::SolverConfig& cfg, int jobs = 0);

// Output formatting. Every document starts with a reproducibility header.
enum class Format { Table, Csv, Structured };
Format parse_format(const std::string& s);

struct RunMeta {
  std::string command;
  std::vector<uint64_t> seeds;
  conic::SolverConfig config;
};

std::string header_lines(const RunMeta& meta);
std::string format_compare(const CompareReport& r, Format f, const RunMeta& meta);
std::string format_solve(const SolveReport& r, const QcqpInstance& inst, Format f, const RunMeta& meta);
std::string format_dominance(const std::vector<DominanceReport>& r, const std::string& instance,
                             Format f, const RunMeta& meta);
std::string format_sweep(const SweepReport& r, Format f, const RunMeta& meta);
std::string format_oracle(const OracleResult& r, const QcqpInstance& inst, Format f, const RunMeta& meta);

}  // namespace qrelax

#endif
