// Copyright 2026 The qrelax Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0

#include "conic.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

#include "error.hpp"

namespace qrelax::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::sqrt(2.0);

}  // namespace

int ConeDims::total() const {
  int t = nonneg;
  for (int d : soc) t += d;
  for (int p : psd) t += svec_size(p);
  return t;
}

const char* status_name(Status s) {
  switch (s) {
    case Status::Optimal: return "Optimal";
    case Status::Infeasible: return "Infeasible";
    case Status::Unbounded: return "Unbounded";
    case Status::Inaccurate: return "Inaccurate";
    case Status::Failed: return "Failed";
    case Status::TimedOut: return "TimedOut";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (!(featol > 0 && featol < 1e-2))
    throw Error(ErrorCode::InvalidArgument, "featol must lie in (0, 1e-2)");
  if (!(gaptol > 0 && gaptol < 1e-2))
    throw Error(ErrorCode::InvalidArgument, "gaptol must lie in (0, 1e-2)");
  if (maxIter < 1) throw Error(ErrorCode::InvalidArgument, "maxIter must be positive");
  if (timeLimit < 0) throw Error(ErrorCode::InvalidArgument, "timeLimit must be >= 0");
}

SolverConfig SolverConfig::from_env(SolverConfig base) {
  auto read = [](const char* name, double& dst) {
    if (const char* v = std::getenv(name)) {
      char* end = nullptr;
      double d = std::strtod(v, &end);
      if (end == v || *end != '\0')
        throw Error(ErrorCode::InvalidArgument, std::string("cannot parse ") + name);
      dst = d;
    }
  };
  read("QRELAX_FEATOL", base.featol);
  read("QRELAX_GAPTOL", base.gaptol);
  read("QRELAX_TIME_LIMIT", base.timeLimit);
  return base;
}

int svec_size(int p) { return p * (p + 1) / 2; }

int svec_index(int p, int i, int j) { return j * p - j * (j - 1) / 2 + (i - j); }

Vec svec(const Mat& x) {
  const int p = static_cast<int>(x.rows());
  Vec v(svec_size(p));
  int k = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) v(k++) = (i == j) ? x(i, j) : kSqrt2 * 0.5 * (x(i, j) + x(j, i));
  return v;
}

Mat smat(const Vec& v, int p) {
  Mat x(p, p);
  int k = 0;
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) {
      double e = v(k++);
      if (i == j) {
        x(i, i) = e;
      } else {
        x(i, j) = e / kSqrt2;
        x(j, i) = e / kSqrt2;
      }
    }
  return x;
}

namespace {

struct Layout {
  int lp = 0;
  std::vector<int> socOff, socDim, psdOff, psdDim;
  int N = 0;
  int degree = 0;  // lp + #soc + sum(p)

  explicit Layout(const ConeDims& d) {
    lp = d.nonneg;
    int off = lp;
    degree = lp;
    for (int k : d.soc) {
      socOff.push_back(off);
      socDim.push_back(k);
      off += k;
      degree += 1;
    }
    for (int p : d.psd) {
      psdOff.push_back(off);
      psdDim.push_back(p);
      off += svec_size(p);
      degree += p;
    }
    N = off;
  }
};

// Nesterov-Todd scaling W and the scaled point lambda = W z = W^{-T} s.
struct Scaling {
  Vec d;                       // orthant: sqrt(s / z)
  std::vector<double> eta;     // SOC
  std::vector<Vec> wbar;       // SOC, w^T J w = 1
  std::vector<Mat> r, rti;     // PSD, W(U) = r^T U r, rti = r^{-T}
  std::vector<Vec> lamPsd;     // PSD eigenvalues of the scaled point
  Vec lambda;                  // full scaled point (PSD part is svec of diag)
};

double jdot(const Vec& u, const Vec& v) {
  return u(0) * v(0) - u.tail(u.size() - 1).dot(v.tail(v.size() - 1));
}

// sqrt(u^T J u) computed as sqrt((u0 - |u1|)(u0 + |u1|)).
double jnorm(const Vec& u) {
  double a = u.tail(u.size() - 1).norm();
  double v = (u(0) - a) * (u(0) + a);
  return std::sqrt(std::max(v, 0.0));
}

// Lorentz boost for a point w with w^T J w = 1.
Vec boost_apply(const Vec& w, const Vec& v) {
  const int k = static_cast<int>(w.size());
  Vec out(k);
  double w0 = w(0);
  auto w1 = w.tail(k - 1);
  auto v1 = v.tail(k - 1);
  double w1v1 = w1.dot(v1);
  out(0) = w0 * v(0) + w1v1;
  out.tail(k - 1) = v1 + (v(0) + w1v1 / (1.0 + w0)) * w1;
  return out;
}

Vec jflip(Vec v) {
  v.tail(v.size() - 1) *= -1.0;
  return v;
}

// W v
Vec apply_W(const Layout& L, const Scaling& W, const Vec& v) {
  Vec out(v.size());
  out.head(L.lp) = W.d.cwiseProduct(v.head(L.lp));
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    out.segment(o, m) = W.eta[k] * boost_apply(W.wbar[k], v.segment(o, m));
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Mat U = smat(v.segment(o, svec_size(p)), p);
    out.segment(o, svec_size(p)) = svec(W.r[k].transpose() * U * W.r[k]);
  }
  return out;
}

// W^T v
Vec apply_WT(const Layout& L, const Scaling& W, const Vec& v) {
  Vec out(v.size());
  out.head(L.lp) = W.d.cwiseProduct(v.head(L.lp));
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    out.segment(o, m) = W.eta[k] * boost_apply(W.wbar[k], v.segment(o, m));
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Mat U = smat(v.segment(o, svec_size(p)), p);
    out.segment(o, svec_size(p)) = svec(W.r[k] * U * W.r[k].transpose());
  }
  return out;
}

// W^{-1} v
Vec apply_Winv(const Layout& L, const Scaling& W, const Vec& v) {
  Vec out(v.size());
  out.head(L.lp) = v.head(L.lp).cwiseQuotient(W.d);
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    out.segment(o, m) = jflip(boost_apply(W.wbar[k], jflip(v.segment(o, m)))) / W.eta[k];
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Mat U = smat(v.segment(o, svec_size(p)), p);
    out.segment(o, svec_size(p)) = svec(W.rti[k] * U * W.rti[k].transpose());
  }
  return out;
}

// W^{-T} v
Vec apply_WinvT(const Layout& L, const Scaling& W, const Vec& v) {
  Vec out(v.size());
  out.head(L.lp) = v.head(L.lp).cwiseQuotient(W.d);
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    out.segment(o, m) = jflip(boost_apply(W.wbar[k], jflip(v.segment(o, m)))) / W.eta[k];
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Mat U = smat(v.segment(o, svec_size(p)), p);
    out.segment(o, svec_size(p)) = svec(W.rti[k].transpose() * U * W.rti[k]);
  }
  return out;
}

Vec identity_e(const Layout& L) {
  Vec e = Vec::Zero(L.N);
  e.head(L.lp).setOnes();
  for (size_t k = 0; k < L.socOff.size(); ++k) e(L.socOff[k]) = 1.0;
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int p = L.psdDim[k];
    for (int i = 0; i < p; ++i) e(L.psdOff[k] + svec_index(p, i, i)) = 1.0;
  }
  return e;
}

// Jordan product u o v.
Vec jordan(const Layout& L, const Vec& u, const Vec& v) {
  Vec out(u.size());
  out.head(L.lp) = u.head(L.lp).cwiseProduct(v.head(L.lp));
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    out(o) = u.segment(o, m).dot(v.segment(o, m));
    out.segment(o + 1, m - 1) = u(o) * v.segment(o + 1, m - 1) + v(o) * u.segment(o + 1, m - 1);
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Mat U = smat(u.segment(o, svec_size(p)), p);
    Mat V = smat(v.segment(o, svec_size(p)), p);
    out.segment(o, svec_size(p)) = svec(0.5 * (U * V + V * U));
  }
  return out;
}

// Solves lambda o x = v for the scaled point lambda.
Vec jordan_div(const Layout& L, const Scaling& W, const Vec& v) {
  const Vec& u = W.lambda;
  Vec out(v.size());
  out.head(L.lp) = v.head(L.lp).cwiseQuotient(u.head(L.lp));
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    Vec uk = u.segment(o, m), vk = v.segment(o, m);
    double det = jdot(uk, uk);
    double x0 = (uk(0) * vk(0) - uk.tail(m - 1).dot(vk.tail(m - 1))) / det;
    out(o) = x0;
    out.segment(o + 1, m - 1) = (vk.tail(m - 1) - x0 * uk.tail(m - 1)) / uk(0);
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    const Vec& lam = W.lamPsd[k];
    for (int j = 0; j < p; ++j)
      for (int i = j; i < p; ++i) {
        int idx = o + svec_index(p, i, j);
        out(idx) = 2.0 * v(idx) / (lam(i) + lam(j));
      }
  }
  return out;
}

// Smallest t such that v + t e is on the boundary, i.e. -min eigenvalue.
double max_violation(const Layout& L, const Vec& v) {
  double t = -kInf;
  if (L.lp) t = std::max(t, -v.head(L.lp).minCoeff());
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    t = std::max(t, v.segment(o + 1, m - 1).norm() - v(o));
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    t = std::max(t, -min_eig(smat(v.segment(o, svec_size(p)), p)));
  }
  return t;
}

// Largest alpha with lambda + alpha * dir in K (lambda is the scaled point).
double max_step(const Layout& L, const Scaling& W, const Vec& dir) {
  double amax = kInf;
  const Vec& lam = W.lambda;
  for (int i = 0; i < L.lp; ++i)
    if (dir(i) < 0) amax = std::min(amax, -lam(i) / dir(i));
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    Vec lk = lam.segment(o, m);
    double nl = jnorm(lk);
    Vec t = lk / nl;
    // Boost mapping e to t; its inverse is J B J.
    Vec dh = jflip(boost_apply(t, jflip(dir.segment(o, m)))) / nl;
    double worst = dh.tail(m - 1).norm() - dh(0);
    if (worst > 0) amax = std::min(amax, 1.0 / worst);
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Vec is = W.lamPsd[k].cwiseSqrt().cwiseInverse();
    Mat D = smat(dir.segment(o, svec_size(p)), p);
    Mat Mm = is.asDiagonal() * D * is.asDiagonal();
    double e = min_eig(Mm);
    if (e < 0) amax = std::min(amax, -1.0 / e);
  }
  return amax;
}

// sn, zn are the J-norms of s and z; sz = s^T z.
void soc_scaling(const Vec& s, const Vec& z, double sn, double zn, double sz, double& eta,
                 Vec& wbar) {
  Vec sb = s / sn, zb = z / zn;
  double gamma = std::sqrt(std::max(0.5 * (1.0 + sz / (sn * zn)), 0.0));
  wbar = (sb + jflip(zb)) / (2.0 * gamma);
  // Renormalize to w^T J w = 1 against rounding.
  double a = wbar.tail(wbar.size() - 1).norm();
  wbar(0) = std::sqrt(1.0 + a * a);
  eta = std::sqrt(sn / zn);
}

bool psd_factor(const Mat& s, Mat& Ls) {
  Eigen::LLT<Mat> llt(s);
  if (llt.info() != Eigen::Success) return false;
  Ls = llt.matrixL();
  return Ls.allFinite();
}

// Computes r, rti, lambda for a PSD block from s and z (or their scaled
// counterparts; `r0`, `rti0` are then the previous scaling factors).
bool psd_scaling(const Mat& s, const Mat& z, const Mat& r0, const Mat& rti0, Mat& r, Mat& rti,
                 Vec& lam) {
  Mat Ls, Lz;
  if (!psd_factor(s, Ls) || !psd_factor(z, Lz)) return false;
  Eigen::JacobiSVD<Mat> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  lam = svd.singularValues();
  if (lam.minCoeff() <= 0 || !lam.allFinite()) return false;
  Vec is = lam.cwiseSqrt().cwiseInverse();
  r = r0 * Ls * svd.matrixV() * is.asDiagonal();
  rti = rti0 * Lz * svd.matrixU() * is.asDiagonal();
  return true;
}

bool compute_scaling(const Layout& L, const Vec& s, const Vec& z, Scaling& W) {
  W.lambda.resize(L.N);
  W.d = (s.head(L.lp).cwiseQuotient(z.head(L.lp))).cwiseSqrt();
  W.lambda.head(L.lp) = s.head(L.lp).cwiseProduct(z.head(L.lp)).cwiseSqrt();
  W.eta.assign(L.socOff.size(), 1.0);
  W.wbar.assign(L.socOff.size(), Vec());
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    Vec sk = s.segment(o, m), zk = z.segment(o, m);
    if (sk(0) <= sk.tail(m - 1).norm() || zk(0) <= zk.tail(m - 1).norm()) return false;
    soc_scaling(sk, zk, jnorm(sk), jnorm(zk), sk.dot(zk), W.eta[k], W.wbar[k]);
    W.lambda.segment(o, m) = W.eta[k] * boost_apply(W.wbar[k], zk);
  }
  W.r.assign(L.psdOff.size(), Mat());
  W.rti.assign(L.psdOff.size(), Mat());
  W.lamPsd.assign(L.psdOff.size(), Vec());
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Mat I = Mat::Identity(p, p);
    if (!psd_scaling(smat(s.segment(o, svec_size(p)), p), smat(z.segment(o, svec_size(p)), p), I,
                     I, W.r[k], W.rti[k], W.lamPsd[k]))
      return false;
    W.lambda.segment(o, svec_size(p)) = svec(Mat(W.lamPsd[k].asDiagonal()));
  }
  return W.d.allFinite() && W.lambda.allFinite();
}

// Moves to new scaled iterates st = lambda + a*ds, zt = lambda + a*dz and
// refreshes s, z to be consistent with the new scaling.
bool update_scaling(const Layout& L, Scaling& W, const Vec& st, const Vec& zt, Vec& s, Vec& z) {
  // Orthant and SOC: unscale then recompute. SOC invariants come from the
  // scaled point, where they are well conditioned.
  Vec snew = apply_WT(L, W, st);
  Vec znew = apply_Winv(L, W, zt);
  W.d = (snew.head(L.lp).cwiseQuotient(znew.head(L.lp))).cwiseSqrt();
  W.lambda.head(L.lp) = snew.head(L.lp).cwiseProduct(znew.head(L.lp)).cwiseSqrt();
  for (size_t k = 0; k < L.socOff.size(); ++k) {
    const int o = L.socOff[k], m = L.socDim[k];
    Vec sk = snew.segment(o, m), zk = znew.segment(o, m);
    Vec stk = st.segment(o, m), ztk = zt.segment(o, m);
    double sn = jnorm(stk) * W.eta[k], zn = jnorm(ztk) / W.eta[k];
    if (!(sn > 0) || !(zn > 0)) return false;
    soc_scaling(sk, zk, sn, zn, stk.dot(ztk), W.eta[k], W.wbar[k]);
    W.lambda.segment(o, m) = W.eta[k] * boost_apply(W.wbar[k], zk);
  }
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    const int o = L.psdOff[k], p = L.psdDim[k];
    Mat r, rti;
    Vec lam;
    if (!psd_scaling(smat(st.segment(o, svec_size(p)), p), smat(zt.segment(o, svec_size(p)), p),
                     W.r[k], W.rti[k], r, rti, lam))
      return false;
    W.r[k] = r;
    W.rti[k] = rti;
    W.lamPsd[k] = lam;
    W.lambda.segment(o, svec_size(p)) = svec(Mat(lam.asDiagonal()));
  }
  s = apply_WT(L, W, W.lambda);
  z = apply_Winv(L, W, W.lambda);
  return W.lambda.allFinite() && s.allFinite() && z.allFinite();
}

// Reduced KKT system
//   [ G^T H^{-1} G   A^T ] [dx]
//   [ A              0   ] [dy]
// with H = W^T W, factored once per iteration.
class KktSolver {
 public:
  KktSolver(const StandardForm& P, const Layout& L) : P_(P), L_(L) {
    nv_ = P.num_vars();
    meq_ = static_cast<int>(P.A.rows());
    // Column support per cone block.
    auto support = [&](int off, int len) {
      std::vector<int> cols;
      for (int j = 0; j < nv_; ++j)
        if (P.G.block(off, j, len, 1).cwiseAbs().maxCoeff() > 0) cols.push_back(j);
      return cols;
    };
    for (size_t k = 0; k < L.socOff.size(); ++k) socCols_.push_back(support(L.socOff[k], L.socDim[k]));
    for (size_t k = 0; k < L.psdOff.size(); ++k)
      psdCols_.push_back(support(L.psdOff[k], svec_size(L.psdDim[k])));
  }

  bool factor(const Scaling* W) {
    W_ = W;
    Mat M = Mat::Zero(nv_, nv_);
    if (W == nullptr) {
      M = P_.G.transpose() * P_.G;
    } else {
      if (L_.lp) {
        auto Glp = P_.G.topRows(L_.lp);
        Vec inv = W->d.cwiseInverse().cwiseAbs2();
        M.noalias() += Glp.transpose() * inv.asDiagonal() * Glp;
      }
      for (size_t k = 0; k < L_.socOff.size(); ++k) {
        const int o = L_.socOff[k], m = L_.socDim[k];
        const auto& cols = socCols_[k];
        Mat Y(m, cols.size());
        for (size_t c = 0; c < cols.size(); ++c) {
          Vec g = P_.G.block(o, cols[c], m, 1);
          Y.col(c) = jflip(boost_apply(W->wbar[k], jflip(g))) / W->eta[k];
        }
        scatter(M, cols, Y.transpose() * Y);
      }
      for (size_t k = 0; k < L_.psdOff.size(); ++k) {
        const int o = L_.psdOff[k], p = L_.psdDim[k];
        const auto& cols = psdCols_[k];
        Mat Y(svec_size(p), cols.size());
        const Mat& rti = W->rti[k];
        for (size_t c = 0; c < cols.size(); ++c) {
          Mat F = smat(P_.G.block(o, cols[c], svec_size(p), 1), p);
          Y.col(c) = svec(rti.transpose() * F * rti);
        }
        scatter(M, cols, Y.transpose() * Y);
      }
    }
    const int dim = nv_ + meq_;
    K_ = Mat::Zero(dim, dim);
    K_.topLeftCorner(nv_, nv_) = M;
    if (meq_) {
      K_.topRightCorner(nv_, meq_) = P_.A.transpose();
      K_.bottomLeftCorner(meq_, nv_) = P_.A;
    }
    // Symmetric diagonal scaling before a lightly regularized LU.
    D_ = Vec::Ones(dim);
    for (int i = 0; i < nv_; ++i) {
      double m = M(i, i);
      D_(i) = m > 1e-300 ? 1.0 / std::sqrt(m) : 1.0;
    }
    for (int j = 0; j < meq_; ++j) {
      double m = (P_.A.row(j).transpose().cwiseProduct(D_.head(nv_))).cwiseAbs().maxCoeff();
      D_(nv_ + j) = m > 0 ? 1.0 / m : 1.0;
    }
    Mat Kreg = D_.asDiagonal() * K_ * D_.asDiagonal();
    const double delta = 1e-12;
    for (int i = 0; i < nv_; ++i) Kreg(i, i) += delta;
    for (int i = nv_; i < dim; ++i) Kreg(i, i) -= delta;
    lu_.compute(Kreg);
    return Kreg.allFinite();
  }

  // Solves
  //   [ 0  A^T  G^T ] [dx]   [r1]
  //   [ A  0    0   ] [dy] = [r2]
  //   [ G  0   -H   ] [dz]   [r3]
  // through the reduced system, refined against the full one. Returns dx,
  // dy, dz and W dz.
  void solve(const Vec& r1, const Vec& r2, const Vec& r3, Vec& dx, Vec& dy, Vec& dz,
             Vec& wdz) const {
    solve_reduced(r1, r2, r3, dx, dy, dz, wdz);
    if (!W_) return;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 6; ++it) {
      Vec e1 = r1 - P_.A.transpose() * dy - P_.G.transpose() * dz;
      Vec e2 = r2 - P_.A * dx;
      Vec e3 = r3 - P_.G * dx + apply_WT(L_, *W_, wdz);
      if (!e1.allFinite() || !e2.allFinite() || !e3.allFinite()) break;
      // Stop once refinement no longer pays off.
      double err = std::max({e1.lpNorm<Eigen::Infinity>(), e2.size() ? e2.lpNorm<Eigen::Infinity>() : 0.0,
                             e3.lpNorm<Eigen::Infinity>()});
      if (err == 0.0 || err > 0.5 * prev) break;
      prev = err;
      Vec cx, cy, cz, cw;
      solve_reduced(e1, e2, e3, cx, cy, cz, cw);
      dx += cx;
      dy += cy;
      dz += cz;
      wdz += cw;
    }
  }

  void solve_reduced(const Vec& r1, const Vec& r2, const Vec& r3, Vec& dx, Vec& dy, Vec& dz,
                     Vec& wdz) const {
    Vec t, rhs1;
    if (W_) {
      t = apply_WinvT(L_, *W_, r3);
      rhs1 = r1 + P_.G.transpose() * apply_Winv(L_, *W_, t);
    } else {
      rhs1 = r1 + P_.G.transpose() * r3;
    }
    Vec rhs(nv_ + meq_);
    rhs.head(nv_) = rhs1;
    rhs.tail(meq_) = r2;
    Vec sol = D_.cwiseProduct(lu_.solve(D_.cwiseProduct(rhs)));
    for (int it = 0; it < 3; ++it) {
      Vec res = rhs - K_ * sol;
      if (!res.allFinite()) break;
      sol += D_.cwiseProduct(lu_.solve(D_.cwiseProduct(res)));
    }
    dx = sol.head(nv_);
    dy = sol.tail(meq_);
    Vec gdx = P_.G * dx - r3;
    if (W_) {
      wdz = apply_WinvT(L_, *W_, gdx);
      dz = apply_Winv(L_, *W_, wdz);
    } else {
      dz = gdx;
      wdz = gdx;
    }
  }

 private:
  static void scatter(Mat& M, const std::vector<int>& cols, const Mat& B) {
    for (size_t a = 0; a < cols.size(); ++a)
      for (size_t b = 0; b < cols.size(); ++b) M(cols[a], cols[b]) += B(a, b);
  }

  const StandardForm& P_;
  const Layout& L_;
  const Scaling* W_ = nullptr;
  int nv_ = 0, meq_ = 0;
  std::vector<std::vector<int>> socCols_, psdCols_;
  Mat K_;
  Vec D_;
  Eigen::PartialPivLU<Mat> lu_;
};

// Row equilibration: each orthant/equality row and each SOC/PSD block is
// divided by its largest absolute coefficient; the objective by max(1, |c|_inf).
struct Equilibration {
  Vec rowG;  // per G row scale factor
  Vec rowA;
  double objScale = 1.0;
};

Equilibration equilibrate(const StandardForm& in, const Layout& L, StandardForm& out) {
  out = in;
  Equilibration e;
  e.rowG = Vec::Ones(L.N);
  e.rowA = Vec::Ones(in.A.rows());
  auto blockScale = [&](int off, int len) {
    double m = 0.0;
    for (int i = off; i < off + len; ++i) m = std::max(m, in.G.row(i).cwiseAbs().maxCoeff());
    return m > 0 ? 1.0 / m : 1.0;
  };
  for (int i = 0; i < L.lp; ++i) e.rowG(i) = blockScale(i, 1);
  for (size_t k = 0; k < L.socOff.size(); ++k)
    e.rowG.segment(L.socOff[k], L.socDim[k]).setConstant(blockScale(L.socOff[k], L.socDim[k]));
  for (size_t k = 0; k < L.psdOff.size(); ++k) {
    int len = svec_size(L.psdDim[k]);
    e.rowG.segment(L.psdOff[k], len).setConstant(blockScale(L.psdOff[k], len));
  }
  for (int i = 0; i < in.A.rows(); ++i) {
    double m = in.A.row(i).cwiseAbs().maxCoeff();
    e.rowA(i) = m > 0 ? 1.0 / m : 1.0;
  }
  out.G = e.rowG.asDiagonal() * in.G;
  out.h = e.rowG.cwiseProduct(in.h);
  out.A = e.rowA.asDiagonal() * in.A;
  out.b = e.rowA.cwiseProduct(in.b);
  double cm = in.c.size() ? in.c.cwiseAbs().maxCoeff() : 0.0;
  e.objScale = 1.0 / std::max(1.0, cm);
  out.c = in.c * e.objScale;
  return e;
}

}  // namespace

bool nt_scaled_point(const ConeDims& dims, const Vec& s, const Vec& z, Vec& wz, Vec& winvTs) {
  Layout L(dims);
  if (s.size() != L.N || z.size() != L.N)
    throw Error(ErrorCode::DimError, "scaling point does not match the cone dimensions");
  Scaling W;
  if (!compute_scaling(L, s, z, W)) return false;
  wz = apply_W(L, W, z);
  winvTs = apply_WinvT(L, W, s);
  return true;
}

RawSolution solve(const StandardForm& prob, const SolverConfig& config) {
  config.validate();
  auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  RawSolution out;
  const Layout L(prob.dims);
  const int nv = prob.num_vars();
  const int meq = static_cast<int>(prob.A.rows());
  if (prob.G.rows() != L.N || prob.G.cols() != nv || prob.h.size() != L.N ||
      (meq > 0 && prob.A.cols() != nv) || prob.b.size() != meq)
    throw Error(ErrorCode::DimError, "standard form dimensions are inconsistent");

  StandardForm P;
  Equilibration eq = equilibrate(prob, L, P);
  if (meq == 0) {
    P.A.resize(0, nv);
    P.b.resize(0);
  }

  const double resx0 = std::max(1.0, P.c.norm());
  const double resy0 = std::max(1.0, P.b.norm());
  const double resz0 = std::max(1.0, P.h.norm());

  KktSolver kkt(P, L);
  Vec x(nv), y(meq), z(L.N), s(L.N);
  Vec dx, dy, dz, wdz;
  // Initial primal and dual points from least-squares problems (H = I).
  if (!kkt.factor(nullptr)) {
    out.status = Status::Failed;
    out.diagnostic = "initial factorization failed";
    return out;
  }
  kkt.solve(Vec::Zero(nv), P.b, P.h, x, y, dz, wdz);
  s = -dz;
  {
    Vec xx;
    kkt.solve(-P.c, Vec::Zero(meq), Vec::Zero(L.N), xx, y, z, wdz);
  }
  const Vec e = identity_e(L);
  {
    double ts = max_violation(L, s), tz = max_violation(L, z);
    double nrms = s.norm(), nrmz = z.norm();
    if (ts >= -1e-8 * std::max(nrms, 1.0)) s += (1.0 + ts) * e;
    if (tz >= -1e-8 * std::max(nrmz, 1.0)) z += (1.0 + tz) * e;
  }
  double tau = 1.0, kappa = 1.0;

  Scaling W;
  if (!compute_scaling(L, s, z, W)) {
    out.status = Status::Failed;
    out.diagnostic = "initial scaling failed";
    return out;
  }

  Vec bestX = x, bestY = y, bestZ = z, bestS = s;
  double bestTau = tau;
  double bestMerit = kInf;
  double pres = kInf, dres = kInf, gap = kInf, relgap = kInf, pcost = 0, dcost = 0;
  Status status = Status::Failed;
  int iter = 0;
  int stalls = 0;
  std::string diag;

  for (iter = 0; iter <= config.maxIter; ++iter) {
    Vec rx = P.A.transpose() * y + P.G.transpose() * z + P.c * tau;
    Vec ry = P.A * x - P.b * tau;
    Vec rz = P.G * x + s - P.h * tau;
    double cx = P.c.dot(x), by = P.b.dot(y), hz = P.h.dot(z);
    double rt = kappa + cx + by + hz;
    double sz = s.dot(z);
    double mu = (sz + tau * kappa) / (L.degree + 1);

    pcost = cx / tau;
    dcost = -(by + hz) / tau;
    pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
    dres = rx.norm() / resx0 / tau;
    gap = sz / (tau * tau);
    double denom = std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    relgap = gap / denom;

    if (config.verbosity > 0)
      std::fprintf(stderr, "%3d  % .8e  % .8e  %.2e  %.2e  %.2e  %.2e\n", iter, pcost, dcost, pres,
                   dres, gap, tau / kappa);

    double merit = std::max({pres / config.featol, dres / config.featol, relgap / config.gaptol});
    if (merit < bestMerit && std::isfinite(merit)) {
      bestMerit = merit;
      bestX = x;
      bestY = y;
      bestZ = z;
      bestS = s;
      bestTau = tau;
    }

    if (pres <= config.featol && dres <= config.featol && gap >= 0.0 &&
        (gap <= config.gaptol || relgap <= config.gaptol)) {
      status = Status::Optimal;
      break;
    }
    if (hz + by < 0) {
      double pinf = (P.A.transpose() * y + P.G.transpose() * z).norm() / resx0 / (-(hz + by));
      if (pinf <= config.featol && tau < kappa) {
        status = Status::Infeasible;
        break;
      }
    }
    if (cx < 0) {
      double dinf = std::max((P.A * x).norm() / resy0, (P.G * x + s).norm() / resz0) / (-cx);
      if (dinf <= config.featol && tau < kappa) {
        status = Status::Unbounded;
        break;
      }
    }
    if (iter == config.maxIter) {
      diag = "iteration limit reached";
      break;
    }
    if (config.timeLimit > 0 && elapsed() > config.timeLimit) {
      status = Status::TimedOut;
      diag = "time limit reached";
      break;
    }

    if (!kkt.factor(&W)) {
      diag = "KKT factorization failed";
      break;
    }
    // Direction for the dtau column.
    Vec x2, y2, z2, wz2;
    kkt.solve(P.c, -P.b, -P.h, x2, y2, z2, wz2);
    const double pu2 = P.c.dot(x2) + P.b.dot(y2) + P.h.dot(z2);

    auto direction = [&](double etaR, const Vec& rc, double rk, Vec& ddx, Vec& ddy, Vec& ddz,
                         Vec& dsTil, Vec& dzTil, double& dtau, double& dkap) {
      Vec lrc = jordan_div(L, W, rc);
      Vec r3 = -etaR * rz - apply_WT(L, W, lrc);
      Vec x1, y1, z1, wz1;
      kkt.solve(-etaR * rx, -etaR * ry, r3, x1, y1, z1, wz1);
      double r4 = -etaR * rt - rk / tau;
      double pu1 = P.c.dot(x1) + P.b.dot(y1) + P.h.dot(z1);
      dtau = (pu1 - r4) / (pu2 + kappa / tau);
      ddx = x1 - dtau * x2;
      ddy = y1 - dtau * y2;
      ddz = z1 - dtau * z2;
      dzTil = wz1 - dtau * wz2;
      // W^{-T} ds = lambda \ rc - W dz
      dsTil = lrc - dzTil;
      dkap = (rk - kappa * dtau) / tau;
    };

    auto step_to = [&](const Vec& dsT, const Vec& dzT, double dtau, double dkap) {
      double a = std::min(max_step(L, W, dsT), max_step(L, W, dzT));
      if (dtau < 0) a = std::min(a, -tau / dtau);
      if (dkap < 0) a = std::min(a, -kappa / dkap);
      return a;
    };

    // Predictor.
    Vec adx, ady, adz, adsT, adzT;
    double adtau, adkap;
    Vec rcA = -jordan(L, W.lambda, W.lambda);
    direction(1.0, rcA, -tau * kappa, adx, ady, adz, adsT, adzT, adtau, adkap);
    double alphaA = std::min(1.0, step_to(adsT, adzT, adtau, adkap));
    double sigma = std::pow(1.0 - alphaA, 3);

    // Corrector.
    Vec rcC = rcA - jordan(L, adsT, adzT) + sigma * mu * e;
    double rkC = -tau * kappa - adtau * adkap + sigma * mu;
    Vec cdx, cdy, cdz, cdsT, cdzT;
    double cdtau, cdkap;
    direction(1.0 - sigma, rcC, rkC, cdx, cdy, cdz, cdsT, cdzT, cdtau, cdkap);
    double amax = step_to(cdsT, cdzT, cdtau, cdkap);
    double alpha = std::min(1.0, 0.99 * amax);
    if (!std::isfinite(alpha) || !cdx.allFinite() || !cdzT.allFinite()) {
      diag = "non-finite search direction";
      break;
    }
    if (alpha < 1e-10) {
      if (++stalls >= 3) {
        diag = "step length stalled";
        break;
      }
    } else {
      stalls = 0;
    }

    // Near the boundary the refreshed scaling can break down; shorten the
    // step until it does not.
    Scaling W0 = W;
    Vec sOld = s, zOld = z;
    bool updated = false;
    Vec sLin, zLin;
    for (int back = 0; back < 8 && !updated; ++back, alpha *= 0.5) {
      W = W0;
      Vec st = W.lambda + alpha * cdsT;
      Vec zt = W.lambda + alpha * cdzT;
      sLin = sOld + alpha * apply_WT(L, W, cdsT);
      zLin = zOld + alpha * cdz;
      updated = update_scaling(L, W, st, zt, s, z);
      if (updated) {
        x += alpha * cdx;
        y += alpha * cdy;
        tau += alpha * cdtau;
        kappa += alpha * cdkap;
      }
    }
    if (!updated) {
      W = W0;
      s = sOld;
      z = zOld;
      diag = "scaling update failed";
      break;
    }
    // Prefer the linear pair (keeps residuals consistent) with a scaling
    // computed afresh; fall back to the NT pair if it left the cones.
    if (max_violation(L, sLin) < 0 && max_violation(L, zLin) < 0) {
      Scaling Wl;
      if (compute_scaling(L, sLin, zLin, Wl)) {
        s = sLin;
        z = zLin;
        W = std::move(Wl);
      }
    }
  }

  if (status != Status::Optimal && status != Status::Infeasible && status != Status::Unbounded) {
    // Fall back to the best iterate seen; classify honestly.
    x = bestX;
    y = bestY;
    z = bestZ;
    s = bestS;
    tau = bestTau;
    Vec rx = P.A.transpose() * y + P.G.transpose() * z + P.c * tau;
    Vec ry = P.A * x - P.b * tau;
    Vec rz = P.G * x + s - P.h * tau;
    pcost = P.c.dot(x) / tau;
    dcost = -(P.b.dot(y) + P.h.dot(z)) / tau;
    pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
    dres = rx.norm() / resx0 / tau;
    gap = s.dot(z) / (tau * tau);
    relgap = gap / std::max(1.0, std::min(std::abs(pcost), std::abs(dcost)));
    if (status != Status::TimedOut) {
      const double near = 1e3;
      if (pres <= near * config.featol && dres <= near * config.featol &&
          relgap <= near * config.gaptol)
        status = Status::Inaccurate;
      else
        status = Status::Failed;
    }
  }

  out.status = status;
  out.iterations = iter;
  out.diagnostic = diag;
  out.pres = pres;
  out.dres = dres;
  out.gap = gap / eq.objScale;
  out.relgap = relgap;
  if (status == Status::Infeasible || status == Status::Unbounded) {
    // Certificates are returned unnormalized.
    out.x = x;
    out.y = eq.rowA.cwiseProduct(y) / eq.objScale;
    out.z = eq.rowG.cwiseProduct(z) / eq.objScale;
    out.s = s.cwiseQuotient(eq.rowG);
    out.primalObj = status == Status::Unbounded ? -kInf : kInf;
    out.dualObj = out.primalObj;
  } else {
    out.x = x / tau;
    out.y = eq.rowA.cwiseProduct(y) / tau / eq.objScale;
    out.z = eq.rowG.cwiseProduct(z) / tau / eq.objScale;
    out.s = s.cwiseQuotient(eq.rowG) / tau;
    out.primalObj = prob.c.dot(out.x) + prob.c0;
    out.dualObj = -(prob.b.dot(out.y) + prob.h.dot(out.z)) + prob.c0;
  }
  out.seconds = elapsed();
  return out;
}

}  // namespace qrelax::conic
