// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "reference.hpp"

#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "error.hpp"
#include "json.hpp"

#ifndef QRELAX_VERSION
#define QRELAX_VERSION "0.0.0"
#endif

namespace qrelax {

const std::vector<ReferenceCase>& reference_examples() {
  static const std::vector<ReferenceCase> cases = {
      {"example1", "",
       {{"sdp", "sdp", -1.9900, 1e-3},
        {"gsrt-a", "gsrt-a", -1.2249, 1e-3},
        {"oracle", "", -1.21788, 1e-3}}},
      {"example2", "",
       {{"rlt", "rlt", -1.9252, 1e-3},
        {"gsrt-a", "gsrt-a", -0.7449, 1e-3},
        {"oracle", "", -0.7449, 1e-3}}},
      {"example3", "u=1,2;alpha=1.8029",
       {{"sdp", "sdp", -20.28, 1e-2},
        {"rlt", "rlt", -16.23, 1e-2},
        {"soc-rlt", "soc-rlt", -13.99, 1e-2},
        {"alpha-diag", "alpha-diag", -10.86, 1e-2},
        {"gsrt-a", "gsrt-a", -6.011, 1e-2},
        {"gsrt-b", "gsrt-b", -3.331, 1e-2},
        {"rlt+alpha", "rlt+alpha", -11.66, 1e-2},
        {"soc-rlt+alpha", "soc-rlt+alpha", -8.445, 1e-2},
        {"gsrt-a+alpha", "gsrt-a+alpha", -4.887, 1e-2},
        {"gsrt-b+alpha", "gsrt-b+alpha", -3.327, 1e-2},
        {"oracle", "", -3.327, 1e-3}}},
      {"example4", "u=1,1;alpha=0.6667",
       {{"sdp", "sdp", -103.43, 1e-2},
        {"rlt", "rlt", -26.67, 1e-2},
        {"soc-rlt", "soc-rlt", -24.63, 1e-2},
        {"hsoc", "hsoc", -19.61, 1e-2},
        {"gsrt-a", "gsrt-a", -24.08, 1e-2},
        {"gsrt-b", "gsrt-b", -6.4444, 1e-2},
        {"rlt+alpha", "rlt+alpha", -6.4447, 1e-2},
        {"soc-rlt+alpha", "soc-rlt+alpha", -6.4447, 1e-2},
        {"gsrt-a+alpha", "gsrt-a+alpha", -6.4445, 1e-2},
        {"gsrt-b+alpha", "gsrt-b+alpha", -6.4444, 1e-2},
        {"x1", "gsrt-b", 0.0, 1e-3},
        {"x2", "gsrt-b", 0.6667, 1e-3},
        {"oracle", "", -6.4444, 1e-3}}},
      {"example5", "",
       {{"gsrt-a", "gsrt-a", -21.3379, 1e-2}, {"sst", "sst", -21.3151, 1e-2}}},
      {"example6", "",
       {{"gsrt-a", "gsrt-a", -5.51378, 1e-2}, {"sst", "sst", -5.3560, 1e-2}}},
  };
  return cases;
}

std::vector<ReferenceOutcome> run_reference_examples(const std::string& fixtureDir,
                                                     const conic::SolverConfig& cfg, int jobs) {
  struct Task {
    size_t caseIdx;
    std::string relaxation;  // empty = oracle
    SolveReport report;
    OracleResult oracle;
    std::string error;
  };
  const auto& cases = reference_examples();
  std::vector<QcqpInstance> insts;
  std::vector<std::optional<AlphaAug>> alphas;
  for (const auto& c : cases) {
    insts.push_back(load_instance((std::filesystem::path(fixtureDir) / c.fixture).string()));
    if (c.alpha.empty()) {
      alphas.push_back(std::nullopt);
    } else {
      alphas.push_back(resolve_alpha(insts.back(), parse_alpha_spec(c.alpha, insts.back().n), cfg));
    }
  }
  std::vector<Task> tasks;
  std::map<std::pair<size_t, std::string>, size_t> index;
  for (size_t ci = 0; ci < cases.size(); ++ci)
    for (const auto& v : cases[ci].values) {
      auto key = std::make_pair(ci, v.relaxation);
      if (index.count(key)) continue;
      index[key] = tasks.size();
      tasks.push_back({ci, v.relaxation, {}, {}, {}});
    }

  unsigned nt = jobs > 0 ? static_cast<unsigned>(jobs) : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < tasks.size(); i = next++) {
      Task& t = tasks[i];
      try {
        if (t.relaxation.empty()) {
          t.oracle = global_min(insts[t.caseIdx]);
        } else {
          RelaxationSpec spec = parse_relaxation(t.relaxation);
          spec.alpha = alphas[t.caseIdx];
          t.report = solve_relaxation(insts[t.caseIdx], spec, cfg);
        }
      } catch (const std::exception& e) {
        t.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < std::min<size_t>(nt, tasks.size()); ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::vector<ReferenceOutcome> out;
  for (size_t ci = 0; ci < cases.size(); ++ci)
    for (const auto& v : cases[ci].values) {
      const Task& t = tasks[index.at({ci, v.relaxation})];
      ReferenceOutcome o;
      o.fixture = cases[ci].fixture;
      o.target = v.target;
      o.expected = v.expected;
      o.tol = v.tol;
      o.actual = std::numeric_limits<double>::quiet_NaN();
      if (!t.error.empty()) {
        o.status = "error: " + t.error;
      } else if (t.relaxation.empty()) {
        o.actual = t.oracle.bestVal;
        o.status = "oracle";
      } else {
        o.status = conic::status_name(t.report.status);
        if (v.target.size() > 1 && v.target[0] == 'x' && std::isdigit(static_cast<unsigned char>(v.target[1]))) {
          int i = std::stoi(v.target.substr(1)) - 1;
          if (i >= 0 && i < t.report.solution.x.size()) o.actual = t.report.solution.x(i);
        } else {
          o.actual = t.report.bound;
        }
      }
      o.pass = std::isfinite(o.actual) && std::abs(o.actual - o.expected) <= o.tol;
      out.push_back(o);
    }
  return out;
}

std::string format_reference(const std::vector<ReferenceOutcome>& r, Format f, const RunMeta& meta) {
  int failed = 0;
  for (const auto& o : r) failed += !o.pass;
  if (f == Format::Structured) {
    nlohmann::ordered_json j;
    j["meta"] = {{"tool", "qrelax"},
                 {"version", QRELAX_VERSION},
                 {"command", meta.command},
                 {"solver",
                  {{"backend", "qrelax-ipm"},
                   {"featol", meta.config.featol},
                   {"gaptol", meta.config.gaptol},
                   {"max_iter", meta.config.maxIter},
                   {"time_limit", meta.config.timeLimit}}}};
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& o : r)
      j["checks"].push_back({{"fixture", o.fixture},
                             {"target", o.target},
                             {"expected", o.expected},
                             {"actual", std::isfinite(o.actual) ? nlohmann::ordered_json(o.actual)
                                                                : nlohmann::ordered_json(nullptr)},
                             {"tol", o.tol},
                             {"status", o.status},
                             {"pass", o.pass}});
    j["failed"] = failed;
    return j.dump(2) + "\n";
  }
  std::ostringstream os;
  os << header_lines(meta);
  auto num = [](double v, int p) {
    std::ostringstream s;
    s << std::setprecision(p) << v;
    return s.str();
  };
  if (f == Format::Csv) {
    os << "fixture,target,expected,actual,tol,status,pass\n";
    for (const auto& o : r)
      os << o.fixture << "," << o.target << "," << num(o.expected, 10) << "," << num(o.actual, 10) << ","
         << o.tol << "," << o.status << "," << (o.pass ? "true" : "false") << "\n";
  } else {
    os << std::left << std::setw(10) << "fixture" << std::setw(16) << "target" << std::setw(12) << "expected"
       << std::setw(14) << "actual" << std::setw(8) << "tol" << std::setw(12) << "status" << "result\n";
    os << std::string(78, '-') << "\n";
    for (const auto& o : r)
      os << std::setw(10) << o.fixture << std::setw(16) << o.target << std::setw(12) << num(o.expected, 6)
         << std::setw(14) << num(o.actual, 8) << std::setw(8) << num(o.tol, 2) << std::setw(12) << o.status
         << (o.pass ? "pass" : "FAIL") << "\n";
  }
  os << "# " << r.size() - failed << "/" << r.size() << " reference values matched\n";
  return os.str();
}

}  // namespace qrelax
