// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include "error.hpp"

namespace qrelax {

Box derive_box(const QcqpInstance& inst, double radius) {
  const int n = inst.n;
  Box b{Vec::Constant(n, -radius), Vec::Constant(n, radius)};
  for (int pass = 0; pass < 20; ++pass) {
    bool changed = false;
    for (const auto& r : inst.lin) {
      for (int i = 0; i < n; ++i) {
        if (r.a(i) == 0.0) continue;
        double rest = 0.0;
        for (int k = 0; k < n; ++k)
          if (k != i) rest += std::min(r.a(k) * b.lo(k), r.a(k) * b.hi(k));
        double v = (r.b - rest) / r.a(i);
        if (r.a(i) > 0 && v < b.hi(i) - 1e-15) {
          b.hi(i) = v;
          changed = true;
        } else if (r.a(i) < 0 && v > b.lo(i) + 1e-15) {
          b.lo(i) = v;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return b;
}

Vec polish(const QcqpInstance& inst, const Vec& x0, const Vec& h0, double tol, double feasTol) {
  const int n = inst.n;
  std::vector<Vec> dirs;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Vec d(n);
    int c = code;
    for (int i = 0; i < n; ++i) {
      d(i) = (c % 3) - 1.0;
      c /= 3;
    }
    if (d.cwiseAbs().maxCoeff() > 0) dirs.push_back(d);
  }
  Vec x = x0, h = h0;
  double fx = inst.objective(x);
  for (int iter = 0; iter < 2000000 && h.maxCoeff() >= tol; ++iter) {
    Vec best = x;
    double fbest = fx;
    auto consider = [&](const Vec& y) {
      if (inst.max_violation(y) > feasTol) return;
      double fy = inst.objective(y);
      if (fy < fbest) {
        fbest = fy;
        best = y;
      }
    };
    for (const auto& d : dirs) consider(x + h.cwiseProduct(d));
    Vec g = 2.0 * inst.Q0.mat() * x + inst.c0;
    if (g.norm() > 0) consider(x - h.norm() * g / g.norm());
    if (fbest < fx) {
      x = best;
      fx = fbest;
      h = (1.5 * h).cwiseMin(h0);
    } else {
      h *= 0.5;
    }
  }
  return x;
}

namespace {

// Constraint values g_i(x) (<= 0 feasible) with gradients and Hessians.
struct ConstraintSet {
  std::vector<Mat> H;
  std::vector<Vec> c;
  std::vector<double> d;

  explicit ConstraintSet(const QcqpInstance& inst) {
    for (const auto& q : inst.quad) {
      H.push_back(2.0 * q.Q.mat());
      c.push_back(q.c);
      d.push_back(q.d);
    }
    for (const auto& r : inst.lin) {
      H.push_back(Mat::Zero(inst.n, inst.n));
      c.push_back(r.a);
      d.push_back(-r.b);
    }
  }
  int size() const { return static_cast<int>(c.size()); }
  double value(int i, const Vec& x) const { return 0.5 * x.dot(H[i] * x) + c[i].dot(x) + d[i]; }
  Vec grad(int i, const Vec& x) const { return H[i] * x + c[i]; }
};

// Log-barrier path following with a modified Newton step from a strictly
// feasible point. Returns x0 when x0 is not strictly feasible.
Vec barrier_descent(const QcqpInstance& inst, const Vec& x0) {
  const int n = inst.n;
  ConstraintSet cs(inst);
  const Mat H0 = 2.0 * inst.Q0.mat();
  for (int i = 0; i < cs.size(); ++i)
    if (!(cs.value(i, x0) < 0)) return x0;
  auto phi = [&](const Vec& x, double mu, bool& ok) {
    double v = inst.objective(x);
    for (int i = 0; i < cs.size(); ++i) {
      double s = -cs.value(i, x);
      if (!(s > 0)) {
        ok = false;
        return 0.0;
      }
      v -= mu * std::log(s);
    }
    ok = true;
    return v;
  };
  Vec x = x0;
  double mu = 1e-2 * std::max(1.0, std::abs(inst.objective(x0)));
  while (mu > 1e-13) {
    for (int it = 0; it < 100; ++it) {
      Vec g = H0 * x + inst.c0;
      Mat H = H0;
      for (int i = 0; i < cs.size(); ++i) {
        double s = -cs.value(i, x);
        Vec gi = cs.grad(i, x);
        g += mu * gi / s;
        H += mu * (cs.H[i] / s + gi * gi.transpose() / (s * s));
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(H);
      Vec lam = es.eigenvalues().cwiseAbs();
      double floor = 1e-10 * std::max(1.0, lam.maxCoeff());
      lam = lam.cwiseMax(floor);
      Vec d = -es.eigenvectors() * (es.eigenvectors().transpose() * g).cwiseQuotient(lam);
      double dec = -g.dot(d);
      if (!(dec > 1e-18 * std::max(1.0, std::abs(inst.objective(x))))) break;
      bool ok = false;
      double f0 = phi(x, mu, ok);
      double t = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
        Vec y = x + t * d;
        double f1 = phi(y, mu, ok);
        if (ok && f1 <= f0 - 1e-4 * t * dec) {
          x = y;
          moved = true;
          break;
        }
      }
      if (!moved) break;
    }
    mu *= 0.1;
  }
  (void)n;
  return x;
}

}  // namespace

OracleResult global_min(const QcqpInstance& inst, const std::optional<Box>& box,
                        const OracleOptions& opt) {
  const int n = inst.n;
  if (n < 1 || n > 4) throw Error(ErrorCode::InvalidArgument, "oracle supports 1 <= n <= 4");
  OracleResult res;
  res.box = box ? *box : derive_box(inst, opt.defaultRadius);
  if (res.box.lo.size() != n || res.box.hi.size() != n)
    throw Error(ErrorCode::DimError, "oracle box has wrong dimension");
  int R = opt.resolution;
  if (R <= 0) R = std::max(2, static_cast<int>(std::floor(std::pow(4.0e6, 1.0 / n))));
  if (R < 2) throw Error(ErrorCode::InvalidArgument, "oracle resolution must be at least 2");
  res.gridResolution = R;
  const Box& B = res.box;
  for (int i = 0; i < n; ++i)
    if (!(B.lo(i) <= B.hi(i)))
      throw Error(ErrorCode::NoFeasiblePointFound, "linear rows imply an empty box");

  long long N = 1;
  for (int i = 0; i < n; ++i) N *= R;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> val(static_cast<size_t>(N), nan);
  Vec step = (B.hi - B.lo) / (R - 1);

  auto point = [&](long long idx) {
    Vec x(n);
    for (int i = n - 1; i >= 0; --i) {
      x(i) = B.lo(i) + step(i) * static_cast<double>(idx % R);
      idx /= R;
    }
    return x;
  };
  // Slabs along the first axis.
  const long long slab = N / R;
  unsigned nt = opt.threads > 0 ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  nt = std::min<unsigned>(nt, R);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (long long s = t; s < R; s += nt)
        for (long long idx = s * slab; idx < (s + 1) * slab; ++idx) {
          Vec x = point(idx);
          if (inst.max_violation(x) <= opt.feasTol) val[idx] = inst.objective(x);
        }
    });
  }
  for (auto& th : pool) th.join();

  // Discrete local minima over axis neighbours, ordered by (value, index).
  std::vector<long long> stride(n, 1);
  for (int i = n - 2; i >= 0; --i) stride[i] = stride[i + 1] * R;
  std::vector<std::pair<double, long long>> minima;
  long long feasible = 0;
  for (long long idx = 0; idx < N; ++idx) {
    double v = val[idx];
    if (std::isnan(v)) continue;
    ++feasible;
    bool isMin = true;
    for (int i = 0; i < n && isMin; ++i) {
      long long coord = (idx / stride[i]) % R;
      for (int sgn : {-1, 1}) {
        long long c2 = coord + sgn;
        if (c2 < 0 || c2 >= R) continue;
        long long j = idx + sgn * stride[i];
        double w = val[j];
        if (std::isnan(w)) continue;
        if (w < v || (w == v && j < idx)) {
          isMin = false;
          break;
        }
      }
    }
    if (isMin) minima.push_back({v, idx});
  }
  res.feasibleGridPoints = feasible;
  if (minima.empty())
    throw Error(ErrorCode::NoFeasiblePointFound,
                "no feasible grid point (resolution " + std::to_string(R) + ")");
  std::sort(minima.begin(), minima.end());
  res.bestX = point(minima.front().second);
  res.bestVal = minima.front().first;
  const double gridBest = res.bestVal;
  const int starts = std::min<int>(opt.polishStarts, static_cast<int>(minima.size()));
  for (int k = 0; k < starts; ++k) {
    Vec h0 = step.cwiseMax(1e-12);
    Vec x = barrier_descent(inst, point(minima[k].second));
    if (inst.max_violation(x) > opt.feasTol) x = point(minima[k].second);
    x = polish(inst, x, h0, opt.polishTol, opt.feasTol);
    double f = inst.objective(x);
    if (f < res.bestVal) {
      res.bestVal = f;
      res.bestX = x;
    }
  }
  res.refined = res.bestVal < gridBest;
  res.bestVal = inst.objective(res.bestX);
  return res;
}

}  // namespace qrelax
