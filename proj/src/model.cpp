// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "error.hpp"
#include "json.hpp"

namespace qrelax {

using json = nlohmann::ordered_json;

namespace {

double read_number(const json& j, const std::string& path) {
  if (!j.is_number())
    throw Error(ErrorCode::ParseError, path + ": expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, path + ": non-finite number");
  return v;
}

Vec read_vector(const json& j, const std::string& path, int n) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, path + ": expected an array");
  if (static_cast<int>(j.size()) != n)
    throw Error(ErrorCode::DimError, path + ": expected length " + std::to_string(n) +
                                         ", got " + std::to_string(j.size()));
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = read_number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

SymMatrix read_matrix(const json& j, const std::string& path, int n,
                      std::vector<std::string>& warnings) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, path + ": expected an array of rows");
  if (static_cast<int>(j.size()) != n)
    throw Error(ErrorCode::DimError, path + ": expected " + std::to_string(n) + " rows");
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    a.row(i) = read_vector(j[i], path + "[" + std::to_string(i) + "]", n).transpose();
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 0.0)
    warnings.push_back(path + ": asymmetric matrix symmetrized");
  return SymMatrix(a);
}

const json& field(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::ParseError, path + ": missing field '" + key + "'");
  return *it;
}

json to_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const SymMatrix& s) {
  json rows = json::array();
  for (int i = 0; i < s.n(); ++i) rows.push_back(to_json(Vec(s.mat().row(i).transpose())));
  return rows;
}

}  // namespace

void QcqpInstance::validate() const {
  if (n < 1) throw Error(ErrorCode::DimError, "n must be >= 1");
  if (Q0.n() != n || c0.size() != n)
    throw Error(ErrorCode::DimError, "objective dimensions do not match n");
  for (size_t i = 0; i < quad.size(); ++i) {
    const auto& q = quad[i];
    if (q.Q.n() != n || q.c.size() != n)
      throw Error(ErrorCode::DimError, "quadratic[" + std::to_string(i) + "]: dimension mismatch");
    if (q.Q.mat().cwiseAbs().maxCoeff() == 0.0)
      throw Error(ErrorCode::InvalidConstraint,
                  "quadratic[" + std::to_string(i) + "]: Q is the zero matrix");
  }
  for (size_t j = 0; j < lin.size(); ++j)
    if (lin[j].a.size() != n)
      throw Error(ErrorCode::DimError, "linear[" + std::to_string(j) + "]: dimension mismatch");
}

double QcqpInstance::objective(const Vec& x) const {
  return x.dot(Q0.mat() * x) + c0.dot(x);
}

double QcqpInstance::max_violation(const Vec& x) const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& q : quad) v = std::max(v, x.dot(q.Q.mat() * x) + q.c.dot(x) + q.d);
  for (const auto& r : lin) v = std::max(v, r.a.dot(x) - r.b);
  return v;
}

bool Classification::is_convex(int i) const {
  return std::binary_search(convexIdx.begin(), convexIdx.end(), i);
}

bool Classification::type_b(int i) const {
  return std::binary_search(typeBEligible.begin(), typeBEligible.end(), i);
}

int Classification::z_index(int i) const {
  auto it = std::lower_bound(nonconvexIdx.begin(), nonconvexIdx.end(), i);
  if (it == nonconvexIdx.end() || *it != i) return -1;
  return static_cast<int>(it - nonconvexIdx.begin());
}

QcqpInstance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("document: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "document: expected an object");
  QcqpInstance inst;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw Error(ErrorCode::ParseError, "name: expected a string");
    inst.name = it->get<std::string>();
  }
  const json& jn = field(doc, "n", "document");
  if (!jn.is_number_integer() || jn.get<long long>() < 1)
    throw Error(ErrorCode::ParseError, "n: expected a positive integer");
  inst.n = jn.get<int>();
  const json& obj = field(doc, "objective", "document");
  inst.Q0 = read_matrix(field(obj, "Q", "objective"), "objective.Q", inst.n, inst.warnings);
  inst.c0 = read_vector(field(obj, "c", "objective"), "objective.c", inst.n);
  if (auto it = doc.find("quadratic"); it != doc.end()) {
    if (!it->is_array()) throw Error(ErrorCode::ParseError, "quadratic: expected an array");
    for (size_t i = 0; i < it->size(); ++i) {
      std::string p = "quadratic[" + std::to_string(i) + "]";
      const json& q = (*it)[i];
      QuadConstraint qc;
      qc.Q = read_matrix(field(q, "Q", p), p + ".Q", inst.n, inst.warnings);
      qc.c = read_vector(field(q, "c", p), p + ".c", inst.n);
      qc.d = read_number(field(q, "d", p), p + ".d");
      inst.quad.push_back(std::move(qc));
    }
  }
  if (auto it = doc.find("linear"); it != doc.end()) {
    if (!it->is_array()) throw Error(ErrorCode::ParseError, "linear: expected an array");
    for (size_t j = 0; j < it->size(); ++j) {
      std::string p = "linear[" + std::to_string(j) + "]";
      const json& r = (*it)[j];
      inst.lin.push_back({read_vector(field(r, "a", p), p + ".a", inst.n),
                          read_number(field(r, "b", p), p + ".b")});
    }
  }
  inst.validate();
  return inst;
}

std::string serialize_instance(const QcqpInstance& inst) {
  json doc;
  doc["name"] = inst.name;
  doc["n"] = inst.n;
  doc["objective"] = {{"Q", to_json(inst.Q0)}, {"c", to_json(inst.c0)}};
  json quad = json::array();
  for (const auto& q : inst.quad)
    quad.push_back({{"Q", to_json(q.Q)}, {"c", to_json(q.c)}, {"d", q.d}});
  doc["quadratic"] = quad;
  json lin = json::array();
  for (const auto& r : inst.lin) lin.push_back({{"a", to_json(r.a)}, {"b", r.b}});
  doc["linear"] = lin;
  return doc.dump(1) + "\n";
}

std::string resolve_instance_path(const std::string& path) {
  namespace fs = std::filesystem;
  for (const std::string& p : {path, path + ".qcqp", path + ".json"})
    if (fs::is_regular_file(p)) return p;
  throw Error(ErrorCode::FixtureNotFound, "instance not found: " + path);
}

QcqpInstance load_instance(const std::string& path) {
  std::string resolved = resolve_instance_path(path);
  std::ifstream in(resolved, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + resolved);
  std::stringstream ss;
  ss << in.rdbuf();
  QcqpInstance inst = parse_instance(ss.str());
  if (inst.name.empty()) inst.name = std::filesystem::path(resolved).stem().string();
  return inst;
}

void save_instance(const QcqpInstance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << serialize_instance(inst);
}

Classification classify(const QcqpInstance& inst, double tol) {
  Classification cls;
  for (int i = 0; i < inst.l(); ++i) {
    const auto& q = inst.quad[i];
    EigenDecomp ed = eig_sym(q.Q);
    double scale = std::max(1.0, ed.values.cwiseAbs().maxCoeff());
    if (ed.values(0) >= -tol * scale) cls.convexIdx.push_back(i);
    else cls.nonconvexIdx.push_back(i);
    if (in_range(q.Q, q.c)) cls.typeBEligible.push_back(i);
  }
  cls.k = static_cast<int>(cls.convexIdx.size());
  return cls;
}

QcqpInstance epigraph_reformulate(const QcqpInstance& inst) {
  const int n = inst.n;
  auto pad_vec = [n](const Vec& v) {
    Vec r = Vec::Zero(n + 1);
    r.head(n) = v;
    return r;
  };
  auto pad_mat = [n](const SymMatrix& s) {
    Mat r = Mat::Zero(n + 1, n + 1);
    r.topLeftCorner(n, n) = s.mat();
    return SymMatrix(r);
  };
  QcqpInstance out;
  out.name = inst.name + "-epigraph";
  out.n = n + 1;
  out.Q0 = SymMatrix::zero(n + 1);
  out.c0 = Vec::Zero(n + 1);
  out.c0(n) = 1.0;
  for (const auto& q : inst.quad) out.quad.push_back({pad_mat(q.Q), pad_vec(q.c), q.d});
  for (const auto& r : inst.lin) out.lin.push_back({pad_vec(r.a), r.b});
  Vec ct = pad_vec(inst.c0);
  ct(n) = -1.0;
  if (inst.Q0.mat().cwiseAbs().maxCoeff() > 0.0)
    out.quad.push_back({pad_mat(inst.Q0), ct, 0.0});
  else
    out.lin.push_back({ct, 0.0});
  return out;
}

}  // namespace qrelax
