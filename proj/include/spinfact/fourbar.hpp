#pragma once

// Spherical four-bar demonstration.  A quartic motion curve, cut out of
// projective quaternion space by two quadratic circle constraints, meets the
// null quadric in eight points.  Those points pair up along the two ruling
// families of the quadric, partners on a common ruling share an annihilating
// point on one side, and the wedge of each shared annihilator with its
// complex conjugate yields a revolute axis: the fixed axes come from the
// left annihilators, the moving axes from the right ones.

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "annihilator.hpp"
#include "linalg.hpp"
#include "random.hpp"

namespace spinfact {

using CVec4 = Eigen::Vector4cd;
using CMat4 = Eigen::Matrix4cd;

// Homogeneous quadratic form in x0..x3 with a real symmetric matrix,
// evaluated bilinearly (no conjugation) so it stays holomorphic in complex
// arguments -- Newton corrections below rely on complex differentiability.
struct QuadraticForm {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();

  // Coefficients of the monomials x0^2, x0x1, x0x2, x0x3, x1^2, x1x2, x1x3,
  // x2^2, x2x3, x3^2; the cross coefficients split evenly across the two
  // symmetric matrix entries.
  static QuadraticForm from_monomials(const std::array<double, 10>& c) {
    QuadraticForm f;
    int k = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        if (i == j)
          f.m(i, i) = c[k];
        else
          f.m(i, j) = f.m(j, i) = c[k] / 2.0;
        ++k;
      }
    return f;
  }

  Scalar operator()(const CVec4& x, const CVec4& y) const {
    Scalar s{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) s += m(i, j) * x(i) * y(j);
    return s;
  }
  Scalar operator()(const CVec4& x) const { return (*this)(x, x); }

  CVec4 gradient(const CVec4& x) const {
    CVec4 g = CVec4::Zero();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i) += 2.0 * m(i, j) * x(j);
    return g;
  }
};

// Two curve generators plus the quaternion norm form.  Their common
// projective zeros are the null points of the motion curve.
struct QuadricSystem {
  QuadraticForm g1, g2, norm;
};

// The built-in demonstration system.  norm is x0^2+x1^2+x2^2+x3^2; the two
// circle constraints span, together with norm, the full space of quadrics
// through the eight null points of the demonstration curve.
inline QuadricSystem fourbar_system() {
  QuadricSystem sys;
  sys.norm = QuadraticForm::from_monomials({1, 0, 0, 0, 1, 0, 0, 1, 0, 1});
  sys.g1 = QuadraticForm::from_monomials({1, 0, -4, 0, 1, 0, 4, 1, 0, 1});
  sys.g2 = QuadraticForm::from_monomials({13, 16, -12, 12, -3, 12, 12, 13, 16, -3});
  return sys;
}

// One verified intersection point of the three quadrics.  The quaternion is
// a unit-coordinate-norm projective representative with canonical phase
// (largest-modulus coordinate rotated to the positive real axis).  Partners
// are indices into the solved point list: the left partner lies on the same
// ruling and shares the left annihilator, likewise on the right.
struct NullPointRecord {
  Quaternion n;
  CgaVector left_ann;
  CgaVector right_ann;
  int left_partner = -1;
  int right_partner = -1;
};

// The two perfect matchings induced by the ruling families.  Partners
// sharing the left annihilator lie on rulings of one kind, partners sharing
// the right annihilator on rulings of the other kind.
struct RulingGraph {
  std::vector<std::pair<int, int>> left_shared;
  std::vector<std::pair<int, int>> right_shared;
};

// Unit revolute axis directions, sign-canonicalized (first component above
// noise is positive).  fixed comes from left annihilators, moving from
// right ones.
struct AxisSet {
  std::array<std::array<double, 3>, 2> fixed{};
  std::array<std::array<double, 3>, 2> moving{};
};

struct FourBarReport {
  std::vector<NullPointRecord> points;
  RulingGraph graph;
  AxisSet axes;
  int attempts = 1;  // homotopy restarts consumed
};

namespace detail {

inline double cnorm4(const CVec4& x) { return x.norm(); }

// Scale to unit coordinate norm and rotate the largest-modulus coordinate
// onto the positive real axis, so equal projective points get (nearly)
// equal representatives.
inline CVec4 canonical_rep(CVec4 x) {
  x /= x.norm();
  int k = 0;
  for (int i = 1; i < 4; ++i)
    if (std::abs(x(i)) > std::abs(x(k))) k = i;
  x *= std::conj(x(k)) / std::abs(x(k));
  return x;
}

inline double projective_distance(const CVec4& x, const CVec4& y) {
  return 1.0 - std::abs(x.dot(y)) / (x.norm() * y.norm());
}

inline double system_residual(const QuadricSystem& sys, const CVec4& x) {
  return std::max({std::abs(sys.g1(x)), std::abs(sys.g2(x)), std::abs(sys.norm(x))});
}

// Track one total-degree homotopy path from a start solution of
//   G(x) = (x0^2-1, x1^2-1, x2^2-1, x3-1)
// to the target
//   F(x) = (g1(x,x), g2(x,x), norm(x,x), chart.x-1)
// along H = gamma (1-tau) G + tau F, with an Euler predictor, Newton
// corrector, adaptive step length and a final Newton endgame on F itself.
// Returns false when the step length collapses or the path diverges.
inline bool track_path(const QuadricSystem& sys, const CVec4& chart, Scalar gamma, CVec4& x) {
  // chart is real, so Eigen's conjugating dot agrees with the bilinear form
  // and the chart equation stays holomorphic.
  auto F = [&](const CVec4& p) -> CVec4 {
    return CVec4(sys.g1(p), sys.g2(p), sys.norm(p), chart.dot(p) - 1.0);
  };
  auto G = [](const CVec4& p) -> CVec4 {
    return CVec4(p(0) * p(0) - 1.0, p(1) * p(1) - 1.0, p(2) * p(2) - 1.0, p(3) - 1.0);
  };
  auto JF = [&](const CVec4& p) -> CMat4 {
    CMat4 j;
    j.row(0) = sys.g1.gradient(p).transpose();
    j.row(1) = sys.g2.gradient(p).transpose();
    j.row(2) = sys.norm.gradient(p).transpose();
    j.row(3) = chart.transpose();
    return j;
  };
  auto JG = [](const CVec4& p) -> CMat4 {
    CMat4 j = CMat4::Zero();
    j(0, 0) = 2.0 * p(0);
    j(1, 1) = 2.0 * p(1);
    j(2, 2) = 2.0 * p(2);
    j(3, 3) = 1.0;
    return j;
  };
  auto JH = [&](const CVec4& p, double tau) -> CMat4 {
    return gamma * (1.0 - tau) * JG(p) + Scalar(tau) * JF(p);
  };
  auto H = [&](const CVec4& p, double tau) -> CVec4 {
    return gamma * (1.0 - tau) * G(p) + Scalar(tau) * F(p);
  };

  double tau = 0.0, dt = 0.05;
  while (tau < 1.0) {
    double step = std::min(dt, 1.0 - tau);
    CVec4 saved = x;
    // Euler predictor: dx/dtau solves J_H dx = -(F - gamma G).
    CVec4 rhs = -(F(x) - gamma * G(x));
    CVec4 dx = JH(x, tau).partialPivLu().solve(rhs);
    x += step * dx;
    // Newton corrector at the advanced parameter value.
    double t1 = tau + step;
    bool ok = false;
    for (int it = 0; it < 3; ++it) {
      CVec4 delta = JH(x, t1).partialPivLu().solve(-H(x, t1));
      x += delta;
      if (delta.norm() <= 1e-9 * (1.0 + x.norm())) {
        ok = true;
        break;
      }
    }
    if (!ok || !x.allFinite() || x.norm() > 1e8) {
      x = saved;
      dt *= 0.5;
      if (dt < 1e-7) return false;
      continue;
    }
    tau = t1;
    dt = std::min(dt * 1.3, 0.1);
  }
  // Endgame: sharpen on the target system directly.
  for (int it = 0; it < 30; ++it) {
    CVec4 delta = JF(x).partialPivLu().solve(-F(x));
    x += delta;
    if (delta.norm() <= 1e-13 * (1.0 + x.norm())) break;
  }
  return x.allFinite() && x.norm() <= 1e8;
}

// Largest principal-angle cosine between two annihilator spaces spanned by
// orthonormal bases: 1 means the spaces share a direction, so the two
// points lie on a common ruling of the corresponding kind.
inline double shared_direction(const std::vector<CgaVector>& A, const std::vector<CgaVector>& B) {
  auto col = [](const CgaVector& v) -> CVec {
    CVec c(5);
    c << v.o, v.x1, v.x2, v.x3, v.inf;
    return c;
  };
  CMat MA(5, static_cast<int>(A.size())), MB(5, static_cast<int>(B.size()));
  for (size_t i = 0; i < A.size(); ++i) MA.col(static_cast<int>(i)) = col(A[i]);
  for (size_t i = 0; i < B.size(); ++i) MB.col(static_cast<int>(i)) = col(B[i]);
  Eigen::JacobiSVD<CMat> svd(MA.adjoint() * MB);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

}  // namespace detail

// Embed a projective quaternion point into the even sub-algebra.
inline EvenElement embed_quaternion(const Quaternion& n) {
  return EvenElement::from_four_quat({n, Quaternion{}, Quaternion{}, Quaternion{}});
}

// The revolute axis carried by an annihilating point: a ^ conj(a) is an
// anti-real Euclidean bivector, i.e. a purely imaginary multiple of a real
// rotation axis.  Throws NonRealAxis when scalar, epsilon or real residue
// survives above tol, which happens exactly when a is not a genuinely
// complex Euclidean direction.
inline std::array<double, 3> axis_from_annihilator(const CgaVector& a, double tol = 1e-8) {
  Multivector w = wedge(a, a.conjugated());
  FourQuat q = EvenElement::unchecked(w).four_quat();
  auto qmag = [](const Quaternion& p) {
    return std::abs(p.w) + std::abs(p.x) + std::abs(p.y) + std::abs(p.z);
  };
  std::array<double, 3> axis = {q.q0.x.imag(), q.q0.y.imag(), q.q0.z.imag()};
  double scale = std::abs(axis[0]) + std::abs(axis[1]) + std::abs(axis[2]);
  double residue = std::abs(q.q0.w) + qmag(q.q1) + qmag(q.q2) + qmag(q.q3) +
                   std::abs(q.q0.x.real()) + std::abs(q.q0.y.real()) + std::abs(q.q0.z.real());
  if (scale <= tol || residue > tol * scale)
    throw Error(Errc::NonRealAxis, "annihilator wedge is not an imaginary Euclidean bivector");
  double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  for (double& c : axis) c /= len;
  for (double c : axis) {
    if (std::abs(c) <= 1e-9) continue;
    if (c < 0.0)
      for (double& d : axis) d = -d;
    break;
  }
  return axis;
}

// Intersect the three quadrics by straight-line homotopy continuation in a
// random affine chart.  Eight total-degree paths start at the solutions of
// (x0^2-1, x1^2-1, x2^2-1, x3-1); a seeded complex gamma keeps the paths
// clear of the discriminant.  Path failures and wrong counts trigger a
// fresh chart and gamma, up to max_attempts tries.
struct FourBarOptions {
  uint64_t seed = 2024;
  double tol = 1e-8;
  int max_attempts = 5;
};

inline std::vector<NullPointRecord> intersect_curve_null(const QuadricSystem& sys,
                                                         const FourBarOptions& opts = {},
                                                         int* attempts_out = nullptr) {
  Rng rng(opts.seed);
  bool paths_failed = false;
  for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    CVec4 chart;
    for (int i = 0; i < 4; ++i) chart(i) = Scalar(rng.uniform());
    if (chart.norm() < 1e-3) continue;
    chart /= chart.norm();
    double theta = rng.uniform(0.0, 2.0 * M_PI);
    Scalar gamma(std::cos(theta), std::sin(theta));

    paths_failed = false;
    std::vector<CVec4> found;
    for (int s = 0; s < 8; ++s) {
      CVec4 x(s & 1 ? -1.0 : 1.0, s & 2 ? -1.0 : 1.0, s & 4 ? -1.0 : 1.0, 1.0);
      if (!detail::track_path(sys, chart, gamma, x)) {
        paths_failed = true;
        break;
      }
      x = detail::canonical_rep(x);
      if (detail::system_residual(sys, x) > opts.tol) {
        paths_failed = true;
        break;
      }
      bool dup = false;
      for (const CVec4& y : found)
        if (detail::projective_distance(x, y) <= 1e-6) dup = true;
      if (!dup) found.push_back(x);
    }
    if (paths_failed || found.size() != 8) continue;

    // Canonical order: lexicographic by rounded coordinates.
    auto key = [](const CVec4& x) {
      std::array<long long, 8> k{};
      for (int i = 0; i < 4; ++i) {
        k[2 * i] = std::llround(x(i).real() * 1e9);
        k[2 * i + 1] = std::llround(x(i).imag() * 1e9);
      }
      return k;
    };
    std::sort(found.begin(), found.end(),
              [&](const CVec4& a, const CVec4& b) { return key(a) < key(b); });

    std::vector<NullPointRecord> records;
    for (const CVec4& x : found) {
      NullPointRecord r;
      r.n = Quaternion{x(0), x(1), x(2), x(3)};
      EvenElement ne = embed_quaternion(r.n);
      r.left_ann = annihilator_nullspace(ne, Side::Left).basis.front();
      r.right_ann = annihilator_nullspace(ne, Side::Right).basis.front();
      records.push_back(r);
    }
    if (attempts_out) *attempts_out = attempt;
    return records;
  }
  if (paths_failed)
    throw Error(Errc::PathFailure, "homotopy paths kept failing after max_attempts charts");
  throw Error(Errc::WrongCount, "did not find 8 distinct intersection points");
}

// Classify every polar pair (vanishing polarized norm <=> common ruling) by
// which annihilator the two endpoints share, fill in the partner indices
// and return the two matchings.  A consistent doubly-ruled picture has
// exactly one partner of each kind per point; anything else throws.
inline RulingGraph pair_by_rulings(std::vector<NullPointRecord>& points, double tol = 1e-6) {
  const int n = static_cast<int>(points.size());
  if (n < 2) throw Error(Errc::BadInput, "need at least two points to pair");
  std::vector<EvenElement> embedded;
  std::vector<std::vector<CgaVector>> lbasis, rbasis;
  for (const NullPointRecord& p : points) {
    EvenElement ne = embed_quaternion(p.n);
    embedded.push_back(ne);
    lbasis.push_back(annihilator_nullspace(ne, Side::Left).basis);
    rbasis.push_back(annihilator_nullspace(ne, Side::Right).basis);
  }
  auto qnorm = [](const Quaternion& q) {
    return std::sqrt(std::norm(q.w) + std::norm(q.x) + std::norm(q.y) + std::norm(q.z));
  };
  RulingGraph graph;
  for (int i = 0; i < n; ++i) points[i].left_partner = points[i].right_partner = -1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double polar = std::abs(S(points[i].n, points[j].n));
      if (polar > tol * qnorm(points[i].n) * qnorm(points[j].n)) continue;
      bool left = detail::shared_direction(lbasis[i], lbasis[j]) >= 1.0 - 1e-7;
      bool right = detail::shared_direction(rbasis[i], rbasis[j]) >= 1.0 - 1e-7;
      if (left == right)
        throw Error(Errc::InconsistentRulingGraph,
                    "polar pair shares neither or both annihilators");
      int NullPointRecord::*slot =
          left ? &NullPointRecord::left_partner : &NullPointRecord::right_partner;
      if (points[i].*slot != -1 || points[j].*slot != -1)
        throw Error(Errc::InconsistentRulingGraph, "point lies on three rulings of one kind");
      points[i].*slot = j;
      points[j].*slot = i;
      (left ? graph.left_shared : graph.right_shared).emplace_back(i, j);
    }
  for (const NullPointRecord& p : points)
    if (p.left_partner < 0 || p.right_partner < 0)
      throw Error(Errc::InconsistentRulingGraph, "point is missing a ruling partner");
  return graph;
}

// One axis per ruling class: fixed axes from the left annihilators of the
// left-shared pairs, moving axes from the right annihilators of the
// right-shared pairs.  Conjugate ruling classes carry the same axis, so
// four pairs collapse to two directions per side.
inline AxisSet axes_from_annihilators(const std::vector<NullPointRecord>& points,
                                      const RulingGraph& graph, double tol = 1e-8) {
  auto collect = [&](const std::vector<std::pair<int, int>>& pairs, bool left_side) {
    std::vector<std::array<double, 3>> axes;
    for (const auto& [i, j] : pairs) {
      const CgaVector& a = left_side ? points[i].left_ann : points[i].right_ann;
      std::array<double, 3> axis = axis_from_annihilator(a, tol);
      bool dup = false;
      for (const auto& b : axes) {
        double dot = std::abs(axis[0] * b[0] + axis[1] * b[1] + axis[2] * b[2]);
        if (dot >= 1.0 - 1e-6) dup = true;
      }
      if (!dup) axes.push_back(axis);
    }
    if (axes.size() != 2)
      throw Error(Errc::DegenerateData, "expected exactly two distinct axes per frame");
    // Lexicographic order with a noise floor, so solver jitter in a
    // component that is really zero cannot flip the ordering.
    std::sort(axes.begin(), axes.end(), [](const auto& a, const auto& b) {
      for (int i = 0; i < 3; ++i)
        if (std::abs(a[i] - b[i]) > 1e-7) return a[i] < b[i];
      return false;
    });
    return std::array<std::array<double, 3>, 2>{axes[0], axes[1]};
  };
  AxisSet out;
  out.fixed = collect(graph.left_shared, true);
  out.moving = collect(graph.right_shared, false);
  return out;
}

// Full pipeline on a quadric system: solve, pair, extract axes.
inline FourBarReport fourbar_demo(const QuadricSystem& sys, const FourBarOptions& opts = {}) {
  FourBarReport report;
  report.points = intersect_curve_null(sys, opts, &report.attempts);
  report.graph = pair_by_rulings(report.points);
  report.axes = axes_from_annihilators(report.points, report.graph, opts.tol);
  return report;
}

// Same pipeline with the solver bypassed: the caller supplies the
// intersection points (projective representatives, any scale), which are
// canonicalized and verified against the system before pairing.
inline FourBarReport fourbar_from_points(const QuadricSystem& sys,
                                         const std::vector<Quaternion>& given,
                                         const FourBarOptions& opts = {}) {
  FourBarReport report;
  for (const Quaternion& q : given) {
    CVec4 x(q.w, q.x, q.y, q.z);
    if (x.norm() == 0.0) throw Error(Errc::BadInput, "zero quaternion is not projective");
    x = detail::canonical_rep(x);
    if (detail::system_residual(sys, x) > opts.tol)
      throw Error(Errc::BadInput, "supplied point does not lie on the system");
    NullPointRecord r;
    r.n = Quaternion{x(0), x(1), x(2), x(3)};
    EvenElement ne = embed_quaternion(r.n);
    r.left_ann = annihilator_nullspace(ne, Side::Left).basis.front();
    r.right_ann = annihilator_nullspace(ne, Side::Right).basis.front();
    report.points.push_back(r);
  }
  report.attempts = 0;
  report.graph = pair_by_rulings(report.points);
  report.axes = axes_from_annihilators(report.points, report.graph, opts.tol);
  return report;
}

}  // namespace spinfact
