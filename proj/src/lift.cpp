// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "lift.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "error.hpp"

namespace qrelax {

LiftedSpace::LiftedSpace(int n, int nz) : n_(n), nz_(nz) {
  if (n < 1 || nz < 0) throw Error(ErrorCode::InvalidArgument, "invalid lifted space size");
  offX_ = n + nz;
  offS_ = offX_ + n * (n + 1) / 2;
  offZ_ = offS_ + n * nz;
  size_ = offZ_ + nz * (nz + 1) / 2;
}

int LiftedSpace::tri(int n, int i, int j) {
  if (i > j) std::swap(i, j);
  return i * n - i * (i - 1) / 2 + (j - i);
}

int LiftedSpace::X(int i, int j) const { return offX_ + tri(n_, i, j); }
int LiftedSpace::Z(int s, int t) const { return offZ_ + tri(nz_, s, t); }

LinExpr& LinExpr::add(int var, double v) {
  if (v != 0.0) coef.coeffRef(var) += v;
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  coef += o.coef;
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  coef -= o.coef;
  constant -= o.constant;
  return *this;
}

LinExpr& LinExpr::operator*=(double a) {
  coef *= a;
  constant *= a;
  return *this;
}

double LinExpr::eval(const Vec& v) const {
  double r = constant;
  for (Eigen::SparseVector<double>::InnerIterator it(coef); it; ++it) r += it.value() * v(it.index());
  return r;
}

LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
LinExpr operator*(double s, LinExpr a) { return a *= s; }

AffXZ AffXZ::constant(int n, int nz, double c) { return {Vec::Zero(n), Vec::Zero(nz), c}; }

AffXZ AffXZ::of_x(const Vec& a, int nz, double c) { return {a, Vec::Zero(nz), c}; }

AffXZ AffXZ::var_z(int n, int nz, int t) {
  AffXZ f = constant(n, nz, 0.0);
  f.az(t) = 1.0;
  return f;
}

AffXZ AffXZ::operator+(const AffXZ& o) const { return {ax + o.ax, az + o.az, c + o.c}; }
AffXZ AffXZ::operator-(const AffXZ& o) const { return {ax - o.ax, az - o.az, c - o.c}; }
AffXZ AffXZ::operator*(double s) const { return {ax * s, az * s, c * s}; }

double AffXZ::eval(const Vec& x, const Vec& z) const {
  double v = ax.dot(x) + c;
  if (az.size()) v += az.dot(z);
  return v;
}

LinExpr embed(const LiftedSpace& sp, const AffXZ& f) {
  LinExpr e(sp.size(), f.c);
  for (int i = 0; i < sp.n(); ++i) e.add(sp.x(i), f.ax(i));
  for (int t = 0; t < sp.nz() && t < f.az.size(); ++t) e.add(sp.z(t), f.az(t));
  return e;
}

LinExpr linearize_product(const LiftedSpace& sp, const AffXZ& f, const AffXZ& g) {
  const int n = sp.n(), nz = sp.nz();
  LinExpr e(sp.size(), f.c * g.c);
  for (int i = 0; i < n; ++i) e.add(sp.x(i), f.c * g.ax(i) + g.c * f.ax(i));
  for (int t = 0; t < nz; ++t) e.add(sp.z(t), f.c * g.az(t) + g.c * f.az(t));
  for (int i = 0; i < n; ++i) {
    if (f.ax(i) == 0.0 && g.ax(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) e.add(sp.X(i, j), f.ax(i) * g.ax(j));
  }
  for (int i = 0; i < n; ++i)
    for (int t = 0; t < nz; ++t) e.add(sp.S(i, t), f.ax(i) * g.az(t) + g.ax(i) * f.az(t));
  for (int s = 0; s < nz; ++s)
    for (int t = 0; t < nz; ++t) e.add(sp.Z(s, t), f.az(s) * g.az(t));
  return e;
}

PsdBlock::PsdBlock(int d, int nvars, std::string nm)
    : dim(d), lower(static_cast<size_t>(d * (d + 1) / 2), LinExpr(nvars)), name(std::move(nm)) {}

LinExpr& PsdBlock::at(int i, int j) {
  if (i < j) std::swap(i, j);
  return lower[static_cast<size_t>(conic::svec_index(dim, i, j))];
}

const LinExpr& PsdBlock::at(int i, int j) const {
  if (i < j) std::swap(i, j);
  return lower[static_cast<size_t>(conic::svec_index(dim, i, j))];
}

Mat PsdBlock::eval(const Vec& v) const {
  Mat m(dim, dim);
  for (int j = 0; j < dim; ++j)
    for (int i = j; i < dim; ++i) m(i, j) = m(j, i) = at(i, j).eval(v);
  return m;
}

ConicProgram::ConicProgram(const LiftedSpace& sp) : space(sp), objective(sp.size()) {}

void ConicProgram::add_row(LinExpr e, RowSense sense, std::string name) {
  linRows.push_back({std::move(e), sense, std::move(name)});
}

PsdBlock moment_lmi(const LiftedSpace& sp) {
  const int n = sp.n(), nz = sp.nz();
  PsdBlock b(1 + n + nz, sp.size(), "moment");
  b.at(0, 0).constant = 1.0;
  for (int i = 0; i < n; ++i) {
    b.at(1 + i, 0).add(sp.x(i), 1.0);
    for (int j = 0; j <= i; ++j) b.at(1 + i, 1 + j).add(sp.X(i, j), 1.0);
  }
  for (int t = 0; t < nz; ++t) {
    b.at(1 + n + t, 0).add(sp.z(t), 1.0);
    for (int i = 0; i < n; ++i) b.at(1 + n + t, 1 + i).add(sp.S(i, t), 1.0);
    for (int s = 0; s <= t; ++s) b.at(1 + n + t, 1 + n + s).add(sp.Z(s, t), 1.0);
  }
  return b;
}

std::vector<ConstraintSlack> evaluate_slacks(const ConicProgram& prog, const Vec& v) {
  std::vector<ConstraintSlack> out;
  for (const auto& r : prog.linRows) {
    double e = r.expr.eval(v);
    double s = r.sense == RowSense::LessEq ? -e : r.sense == RowSense::GreaterEq ? e : -std::abs(e);
    out.push_back({r.name, s});
  }
  for (const auto& b : prog.socBlocks) {
    Vec t(b.tail.size());
    for (size_t i = 0; i < b.tail.size(); ++i) t(i) = b.tail[i].eval(v);
    out.push_back({b.name, b.head.eval(v) - t.norm()});
  }
  for (const auto& b : prog.frobBlocks) {
    Vec t(b.entries.size());
    for (size_t i = 0; i < b.entries.size(); ++i) t(i) = b.entries[i].eval(v);
    out.push_back({b.name, b.bound.eval(v) - t.norm()});
  }
  for (const auto& b : prog.psdBlocks) out.push_back({b.name, min_eig(b.eval(v))});
  return out;
}

Vec lift_point(const LiftedSpace& sp, const Vec& x, const Vec& z) {
  Vec v = Vec::Zero(sp.size());
  for (int i = 0; i < sp.n(); ++i) {
    v(sp.x(i)) = x(i);
    for (int j = i; j < sp.n(); ++j) v(sp.X(i, j)) = x(i) * x(j);
    for (int t = 0; t < sp.nz(); ++t) v(sp.S(i, t)) = x(i) * z(t);
  }
  for (int s = 0; s < sp.nz(); ++s) {
    v(sp.z(s)) = z(s);
    for (int t = s; t < sp.nz(); ++t) v(sp.Z(s, t)) = z(s) * z(t);
  }
  return v;
}

namespace {

void put_row(Mat& G, Vec& h, int row, const LinExpr& e, double scale) {
  for (Eigen::SparseVector<double>::InnerIterator it(e.coef); it; ++it)
    G(row, it.index()) = -scale * it.value();
  h(row) = scale * e.constant;
}

}  // namespace

Lowered lower(const ConicProgram& prog) {
  const int nv = prog.num_vars();
  Lowered low;
  auto& f = low.form;
  f.c = Vec::Zero(nv);
  for (Eigen::SparseVector<double>::InnerIterator it(prog.objective.coef); it; ++it)
    f.c(it.index()) = it.value();
  f.c0 = prog.objective.constant;

  std::vector<const LinRow*> ineq, eq;
  for (const auto& r : prog.linRows) (r.sense == RowSense::Equal ? eq : ineq).push_back(&r);
  f.dims.nonneg = static_cast<int>(ineq.size());
  for (const auto& b : prog.socBlocks) f.dims.soc.push_back(1 + static_cast<int>(b.tail.size()));
  for (const auto& b : prog.frobBlocks) f.dims.soc.push_back(1 + static_cast<int>(b.entries.size()));
  for (const auto& b : prog.psdBlocks) f.dims.psd.push_back(b.dim);

  const int N = f.dims.total();
  f.G = Mat::Zero(N, nv);
  f.h = Vec::Zero(N);
  int row = 0;
  for (const LinRow* r : ineq) {
    // s = -expr for <=, s = expr for >=
    put_row(f.G, f.h, row++, r->expr, r->sense == RowSense::LessEq ? -1.0 : 1.0);
    low.rowNames.push_back(r->name);
  }
  for (const auto& b : prog.socBlocks) {
    put_row(f.G, f.h, row++, b.head, 1.0);
    for (const auto& t : b.tail) put_row(f.G, f.h, row++, t, 1.0);
    low.rowNames.push_back(b.name);
  }
  for (const auto& b : prog.frobBlocks) {
    put_row(f.G, f.h, row++, b.bound, 1.0);
    for (const auto& t : b.entries) put_row(f.G, f.h, row++, t, 1.0);
    low.rowNames.push_back(b.name);
  }
  const double r2 = std::sqrt(2.0);
  for (const auto& b : prog.psdBlocks) {
    for (int j = 0; j < b.dim; ++j)
      for (int i = j; i < b.dim; ++i) put_row(f.G, f.h, row++, b.at(i, j), i == j ? 1.0 : r2);
    low.rowNames.push_back(b.name);
  }
  f.A = Mat::Zero(static_cast<int>(eq.size()), nv);
  f.b = Vec::Zero(static_cast<int>(eq.size()));
  for (size_t k = 0; k < eq.size(); ++k) {
    for (Eigen::SparseVector<double>::InnerIterator it(eq[k]->expr.coef); it; ++it)
      f.A(static_cast<int>(k), it.index()) = it.value();
    f.b(static_cast<int>(k)) = -eq[k]->expr.constant;
    low.rowNames.push_back(eq[k]->name);
  }
  low.numLin = static_cast<int>(prog.linRows.size());
  low.numSoc = static_cast<int>(prog.socBlocks.size() + prog.frobBlocks.size());
  low.numPsd = static_cast<int>(prog.psdBlocks.size());
  return low;
}

LiftedSolution recover(const LiftedSpace& sp, const conic::RawSolution& raw) {
  LiftedSolution sol;
  const int n = sp.n(), nz = sp.nz();
  sol.status = raw.status;
  sol.objective = raw.primalObj;
  sol.dualObjective = raw.dualObj;
  sol.pres = raw.pres;
  sol.dres = raw.dres;
  sol.gap = raw.gap;
  sol.raw = raw.x;
  sol.x = Vec::Zero(n);
  sol.z = Vec::Zero(nz);
  sol.X = Mat::Zero(n, n);
  sol.S = Mat::Zero(n, nz);
  sol.Z = Mat::Zero(nz, nz);
  if (raw.x.size() != sp.size()) return sol;
  const Vec& v = raw.x;
  for (int i = 0; i < n; ++i) {
    sol.x(i) = v(sp.x(i));
    for (int j = 0; j < n; ++j) sol.X(i, j) = v(sp.X(i, j));
    for (int t = 0; t < nz; ++t) sol.S(i, t) = v(sp.S(i, t));
  }
  for (int s = 0; s < nz; ++s) {
    sol.z(s) = v(sp.z(s));
    for (int t = 0; t < nz; ++t) sol.Z(s, t) = v(sp.Z(s, t));
  }
  sol.momentMinEig = min_eig(moment_lmi(sp).eval(v));
  return sol;
}

void write_cbf(const Lowered& low, std::ostream& out, const std::string& comment) {
  const auto& f = low.form;
  const int nv = f.num_vars();
  const int meq = static_cast<int>(f.A.rows());
  out << std::setprecision(17);
  out << "# qrelax conic export, CBF version 3\n";
  if (!comment.empty()) {
    std::istringstream in(comment);
    std::string line;
    while (std::getline(in, line)) out << "# " << line << "\n";
  }
  out << "VER\n3\n\nOBJSENSE\nMIN\n\nVAR\n" << nv << " 1\nF " << nv << "\n\n";

  // Scalar cone rows: equalities, then orthant, then SOC; CBF form A v + b in K.
  const int nlp = f.dims.nonneg;
  int nsoc = 0;
  for (int d : f.dims.soc) nsoc += d;
  int nblocks = (meq > 0) + (nlp > 0) + static_cast<int>(f.dims.soc.size());
  out << "CON\n" << meq + nlp + nsoc << " " << nblocks << "\n";
  if (meq) out << "L= " << meq << "\n";
  if (nlp) out << "L+ " << nlp << "\n";
  for (int d : f.dims.soc) out << "Q " << d << "\n";
  out << "\n";

  int npsd = static_cast<int>(f.dims.psd.size());
  if (npsd) {
    out << "PSDCON\n" << npsd << "\n";
    for (int p : f.dims.psd) out << p << "\n";
    out << "\n";
  }

  std::vector<std::pair<int, double>> objA;
  for (int j = 0; j < nv; ++j)
    if (f.c(j) != 0.0) objA.push_back({j, f.c(j)});
  out << "OBJACOORD\n" << objA.size() << "\n";
  for (auto& [j, v] : objA) out << j << " " << v << "\n";
  out << "\nOBJBCOORD\n" << f.c0 << "\n\n";

  std::ostringstream acoord, bcoord;
  acoord << std::setprecision(17);
  bcoord << std::setprecision(17);
  long na = 0, nb = 0;
  int crow = 0;
  for (int i = 0; i < meq; ++i, ++crow) {
    for (int j = 0; j < nv; ++j)
      if (f.A(i, j) != 0.0) {
        acoord << crow << " " << j << " " << f.A(i, j) << "\n";
        ++na;
      }
    if (f.b(i) != 0.0) {
      bcoord << crow << " " << -f.b(i) << "\n";
      ++nb;
    }
  }
  const int nscalar = nlp + nsoc;
  for (int i = 0; i < nscalar; ++i, ++crow) {
    for (int j = 0; j < nv; ++j)
      if (f.G(i, j) != 0.0) {
        acoord << crow << " " << j << " " << -f.G(i, j) << "\n";
        ++na;
      }
    if (f.h(i) != 0.0) {
      bcoord << crow << " " << f.h(i) << "\n";
      ++nb;
    }
  }
  out << "ACOORD\n" << na << "\n" << acoord.str() << "\nBCOORD\n" << nb << "\n" << bcoord.str() << "\n";

  if (npsd) {
    std::ostringstream hc, dc;
    hc << std::setprecision(17);
    dc << std::setprecision(17);
    long nh = 0, nd = 0;
    int row = nscalar;
    const double r2 = std::sqrt(2.0);
    for (int k = 0; k < npsd; ++k) {
      const int p = f.dims.psd[k];
      for (int j = 0; j < p; ++j)
        for (int i = j; i < p; ++i, ++row) {
          double sc = i == j ? 1.0 : r2;
          for (int v = 0; v < nv; ++v)
            if (f.G(row, v) != 0.0) {
              hc << k << " " << v << " " << i << " " << j << " " << -f.G(row, v) / sc << "\n";
              ++nh;
            }
          if (f.h(row) != 0.0) {
            dc << k << " " << i << " " << j << " " << f.h(row) / sc << "\n";
            ++nd;
          }
        }
    }
    out << "HCOORD\n" << nh << "\n" << hc.str() << "\nDCOORD\n" << nd << "\n" << dc.str();
  }
}

}  // namespace qrelax
