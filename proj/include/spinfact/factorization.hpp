// Decomposition of spinor polynomials into linear factors t - h.
//
// Three complementary constructions are provided, each tied to one monic real
// quadratic M = t^2 + b t + c dividing the norm polynomial:
//
//  * geometric_factor: evaluates the polynomial at the two roots z1, z2 of M,
//    producing null displacements n1, n2; annihilating points a1, a2 of those
//    displacements combine into
//        h = z1 - (z1 - z2) / (2 a1.a2) * a1 a2,
//    which satisfies (h - z1) n2 = 0, (h - z2) n1 = 0 and M(h) = 0.
//  * algebraic_factor: reduces the one-sided evaluation map modulo M
//    (powers of h collapse through h^2 = -b h - c), solves the resulting
//    linear system for h, and polishes the quadratic side condition M(h) = 0
//    with Gauss-Newton.  Detects positive-dimensional solution families.
//  * double_root_factor: handles M = (t - z)^2 with z real.  A factor with
//    norm (t - z)^2 exists iff reverse(C'(z)) C(z) != 0; the construction
//    conjugates the annihilating point of C(z) onto infinity and reads the
//    factor off a quaternion division.
//
// factorize_all drives the full decomposition: it deflates central scalar
// factors, walks the distinct quadratic divisors of the norm polynomial
// recursively, and verifies every complete factor chain by re-expansion.
#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spinfact/annihilator.hpp"
#include "spinfact/cga.hpp"
#include "spinfact/linalg.hpp"
#include "spinfact/polynomial.hpp"
#include "spinfact/random.hpp"
#include "spinfact/roots.hpp"

namespace spinfact {

enum class FactorOutcome {
  Found,
  OrthogonalAnnihilators,
  NullEvaluationDegenerate,
  NotVerified,
  NoCommonZero,
  CriterionFailed,
  DegenerateData,
};

inline const char* factor_outcome_name(FactorOutcome o) {
  switch (o) {
    case FactorOutcome::Found: return "found";
    case FactorOutcome::OrthogonalAnnihilators: return "orthogonal_annihilators";
    case FactorOutcome::NullEvaluationDegenerate: return "null_evaluation_degenerate";
    case FactorOutcome::NotVerified: return "not_verified";
    case FactorOutcome::NoCommonZero: return "no_common_zero";
    case FactorOutcome::CriterionFailed: return "criterion_failed";
    case FactorOutcome::DegenerateData: return "degenerate_data";
  }
  return "unknown";
}

// The factor element built from two annihilating points and the two roots
// they belong to.  Shared by the left construction and its right mirror.
inline EvenElement geometric_h(Scalar z1, Scalar z2, const CgaVector& a1, const CgaVector& a2) {
  Scalar s = dot(a1, a2);
  if (std::abs(s) == 0.0) throw Error(Errc::BadInput, "geometric_h: orthogonal points");
  Multivector prod = a1.mv() * a2.mv();
  Multivector h = z1 * Multivector::scalar(1.0) - ((z1 - z2) / (2.0 * s)) * prod;
  return EvenElement::unchecked(h);
}

struct GeometricFactor {
  FactorOutcome outcome = FactorOutcome::NotVerified;
  EvenElement h;         // the factor is t - h (valid when outcome == Found)
  EvenElement n1, n2;    // evaluations of the polynomial at z1, z2
  CgaVector a1, a2;      // annihilating points actually used
};

namespace detail {

// Candidate annihilating points of one displacement: the kernel basis plus
// normalized sums/differences (kernels of special displacements are
// two-dimensional and any isotropic combination may be the usable one).
inline std::vector<CgaVector> annihilator_candidates(const EvenElement& n, Side side,
                                                     bool want_real, double tol) {
  std::vector<CgaVector> cands;
  if (want_real) {
    cands = real_annihilators(n, side, tol);
  } else {
    auto nb = annihilator_nullspace(n, side, tol);
    cands = nb.basis;
  }
  const std::size_t m = cands.size();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      CgaVector sum = cands[i] + cands[j];
      CgaVector dif = cands[i] - cands[j];
      if (sum.norm() > tol) cands.push_back((1.0 / sum.norm()) * sum);
      if (dif.norm() > tol) cands.push_back((1.0 / dif.norm()) * dif);
    }
  }
  return cands;
}

inline bool even_is_real(const EvenElement& q, double tol) {
  auto w = q.wire();
  double im = 0;
  for (const auto& c : w) im += std::abs(c.imag());
  return im <= tol * (1.0 + frob(q));
}

}  // namespace detail

// Left factor t - h of C for the quadratic M (side == Left), or right factor
// via the coefficient-reversal mirror (side == Right).
inline GeometricFactor geometric_factor(const EvenPolynomial& C, const QuadraticFactor& M,
                                        Side side, double tol = 1e-8) {
  if (side == Side::Right) {
    GeometricFactor g = geometric_factor(reverse_coeffs(C), M, Side::Left, tol);
    g.h = reverse(g.h);
    g.n1 = reverse(g.n1);
    g.n2 = reverse(g.n2);
    return g;
  }
  GeometricFactor out;
  const double cscale = std::max(C.max_coeff_norm(), 1e-300);
  out.n1 = C(M.z1);
  out.n2 = C(M.z2);
  if (frob(out.n1) <= tol * cscale || frob(out.n2) <= tol * cscale) {
    out.outcome = FactorOutcome::NullEvaluationDegenerate;
    return out;
  }
  const bool creal = is_real(C, 1e-9);
  std::vector<CgaVector> c1, c2;
  try {
    if (M.conjugate_pair()) {
      c1 = detail::annihilator_candidates(out.n1, Side::Left, false, tol);
      // The displacement at the conjugate root is the conjugate displacement,
      // so conjugated points annihilate it; this pairing keeps h real.
      for (const auto& a : c1) c2.push_back(a.conjugated());
      if (!creal) {
        auto extra = detail::annihilator_candidates(out.n2, Side::Left, false, tol);
        c2.insert(c2.end(), extra.begin(), extra.end());
      }
    } else {
      c1 = detail::annihilator_candidates(out.n1, Side::Left, creal, tol);
      c2 = detail::annihilator_candidates(out.n2, Side::Left, creal, tol);
    }
  } catch (const Error&) {
    out.outcome = FactorOutcome::DegenerateData;
    return out;
  }
  bool saw_nonorthogonal = false;
  for (std::size_t i = 0; i < c1.size(); ++i) {
    // Diagonal pairs first: for conjugate roots they give real h directly.
    std::vector<std::size_t> order;
    if (i < c2.size()) order.push_back(i);
    for (std::size_t j = 0; j < c2.size(); ++j)
      if (j != i) order.push_back(j);
    for (std::size_t j : order) {
      const CgaVector& a1 = c1[i];
      const CgaVector& a2 = c2[j];
      Scalar s = dot(a1, a2);
      if (std::abs(s) <= 1e-9 * a1.norm() * a2.norm()) continue;
      saw_nonorthogonal = true;
      EvenElement h = geometric_h(M.z1, M.z2, a1, a2);
      if (creal && !detail::even_is_real(h, 1e-8)) continue;
      EvenElement rem = left_evaluate(C, h);
      double hs = 1.0 + frob(h);
      double scale = cscale * std::max(1.0, hs * hs);
      if (frob(rem) <= tol * scale) {
        out.outcome = FactorOutcome::Found;
        out.h = h;
        out.a1 = a1;
        out.a2 = a2;
        return out;
      }
    }
  }
  out.outcome = saw_nonorthogonal ? FactorOutcome::NotVerified
                                  : FactorOutcome::OrthogonalAnnihilators;
  return out;
}

struct AlgebraicFactor {
  FactorOutcome outcome = FactorOutcome::NoCommonZero;
  std::vector<EvenElement> solutions;      // verified factors (may sample a family)
  int family_dim = 0;                      // > 0: solutions form a variety
};

// Solves h A + B = 0 (left evaluation collapsed modulo M) together with the
// side condition M(h) = 0, over real coefficients.
inline AlgebraicFactor algebraic_factor(const EvenPolynomial& C, const RealPolynomial& M,
                                        Side side, uint64_t seed = 2024, double tol = 1e-8,
                                        int max_solutions = 4) {
  if (M.degree() != 2 || std::abs(M.c.back() - 1.0) > 1e-12)
    throw Error(Errc::BadInput, "algebraic_factor: M must be a monic quadratic");
  if (side == Side::Right) {
    AlgebraicFactor a = algebraic_factor(reverse_coeffs(C), M, Side::Left, seed, tol, max_solutions);
    for (auto& h : a.solutions) h = reverse(h);
    return a;
  }
  AlgebraicFactor out;
  if (!is_real(C, 1e-9)) {
    out.outcome = FactorOutcome::DegenerateData;
    return out;
  }
  const double b = M.c[1], c = M.c[0];
  const double cscale = std::max(C.max_coeff_norm(), 1e-300);

  // Collapse powers: h^i = alpha_i h + beta_i under h^2 = -b h - c.
  std::size_t nterms = C.size();
  std::vector<double> alpha(nterms, 0.0), beta(nterms, 0.0);
  if (nterms > 0) beta[0] = 1.0;
  if (nterms > 1) alpha[1] = 1.0;
  for (std::size_t i = 2; i < nterms; ++i) {
    alpha[i] = beta[i - 1] - b * alpha[i - 1];
    beta[i] = -c * alpha[i - 1];
  }
  EvenElement A = EvenElement(Scalar(0)), B = EvenElement(Scalar(0));
  for (std::size_t i = 0; i < nterms; ++i) {
    A = A + Scalar(alpha[i]) * C[i];
    B = B + Scalar(beta[i]) * C[i];
  }

  // Linear (not quadratic) normalization in |h|: a genuine solution of
  // M(h) = 0 has |h| bounded by the quadratic's coefficients, so an enormous
  // |h| with a moderate absolute defect must be rejected.
  auto m_residual = [&](const EvenElement& h) {
    EvenElement r = h * h + Scalar(b) * h + EvenElement(Scalar(c));
    return frob(r) / (1.0 + std::abs(b) + std::abs(c) + frob(h));
  };
  auto eval_residual = [&](const EvenElement& h) {
    double hs = 1.0 + frob(h);
    return frob(left_evaluate(C, h)) / (cscale * std::max(1.0, hs * hs));
  };
  auto accept = [&](const EvenElement& h) {
    return m_residual(h) <= tol && eval_residual(h) <= tol &&
           detail::even_is_real(h, 1e-7) && is_finite(h);
  };

  // Fast path: invertible A pins h down uniquely.
  EvenElement Ainv;
  if (try_inverse(A, Ainv)) {
    EvenElement h = Scalar(-1) * (B * Ainv);
    if (accept(h)) {
      out.outcome = FactorOutcome::Found;
      out.solutions.push_back(h);
    }
    return out;
  }

  // Singular A: solve the real-linear system  wire(h A) = -wire(B).
  CMat L(16, 16);
  for (int k = 0; k < 16; ++k) {
    std::array<Scalar, 16> w{};
    w[static_cast<std::size_t>(k)] = Scalar(1);
    EvenElement Ek = EvenElement::from_wire(w);
    auto col = (Ek * A).wire();
    for (int r = 0; r < 16; ++r) L(r, k) = col[static_cast<std::size_t>(r)];
  }
  auto bw = B.wire();
  RMat Lr(32, 16);
  RVec rhs(32);
  for (int r = 0; r < 16; ++r) {
    for (int k = 0; k < 16; ++k) {
      Lr(r, k) = L(r, k).real();
      Lr(16 + r, k) = L(r, k).imag();
    }
    rhs(r) = -bw[static_cast<std::size_t>(r)].real();
    rhs(16 + r) = -bw[static_cast<std::size_t>(r)].imag();
  }
  RVec up = lstsq(Lr, rhs);
  double lin_res = (Lr * up - rhs).norm();
  double lin_scale = std::max(1.0, rhs.norm()) + Lr.norm();
  if (lin_res > 1e-8 * lin_scale) {
    out.outcome = FactorOutcome::NoCommonZero;
    return out;
  }
  RMat K = kernel_basis_real(Lr);
  auto h_of = [&](const RVec& u) {
    std::array<Scalar, 16> w{};
    for (int r = 0; r < 16; ++r) w[static_cast<std::size_t>(r)] = Scalar(u(r));
    return EvenElement::from_wire(w);
  };
  const int kdim = static_cast<int>(K.cols());
  if (kdim == 0) {
    EvenElement h = h_of(up);
    if (accept(h)) {
      out.outcome = FactorOutcome::Found;
      out.solutions.push_back(h);
    }
    return out;
  }

  // Residual of the quadratic side condition as a real 32-vector.
  auto phi = [&](const RVec& lam) {
    EvenElement h = h_of(up + K * lam);
    EvenElement r = h * h + Scalar(b) * h + EvenElement(Scalar(c));
    auto w = r.wire();
    RVec v(32);
    for (int i = 0; i < 16; ++i) {
      v(i) = w[static_cast<std::size_t>(i)].real();
      v(16 + i) = w[static_cast<std::size_t>(i)].imag();
    }
    return v;
  };

  Rng rng(seed);
  auto push_solution = [&](const EvenElement& h) {
    for (const auto& s : out.solutions)
      if (dist(s, h) <= 1e-6 * (1.0 + frob(h))) return;
    out.solutions.push_back(h);
  };

  // Identical-vanishing probe: the quadratic condition may hold on the whole
  // affine family, in which case every member is a factor.
  bool vanishes_everywhere = true;
  for (int trial = 0; trial < 6 && vanishes_everywhere; ++trial) {
    RVec lam(kdim);
    for (int i = 0; i < kdim; ++i) lam(i) = rng.uniform(-2.0, 2.0);
    EvenElement h = h_of(up + K * lam);
    if (m_residual(h) > tol) vanishes_everywhere = false;
  }
  if (vanishes_everywhere) {
    out.outcome = FactorOutcome::Found;
    out.family_dim = kdim;
    for (int trial = 0; trial < max_solutions; ++trial) {
      RVec lam(kdim);
      for (int i = 0; i < kdim; ++i) lam(i) = (trial == 0) ? 0.0 : rng.uniform(-1.0, 1.0);
      EvenElement h = h_of(up + K * lam);
      if (accept(h)) push_solution(h);
    }
    if (out.solutions.empty()) out.outcome = FactorOutcome::NoCommonZero;
    return out;
  }

  // Gauss-Newton polish of M(h(lambda)) = 0 from several starts.
  const int starts = 12;
  for (int s = 0; s < starts && static_cast<int>(out.solutions.size()) < max_solutions; ++s) {
    RVec lam(kdim);
    for (int i = 0; i < kdim; ++i) lam(i) = (s == 0) ? 0.0 : rng.uniform(-2.0, 2.0);
    bool ok = false;
    for (int it = 0; it < 60; ++it) {
      RVec f = phi(lam);
      EvenElement h = h_of(up + K * lam);
      double hs = 1.0 + frob(h);
      if (f.norm() <= 1e-12 * hs * hs) {
        ok = true;
        break;
      }
      // J(:, j) = wire(K_j h + h K_j + b K_j), realified.
      RMat J(32, kdim);
      for (int j = 0; j < kdim; ++j) {
        EvenElement Kj = h_of(RVec(K.col(j)));
        auto w = (Kj * h + h * Kj + Scalar(b) * Kj).wire();
        for (int r = 0; r < 16; ++r) {
          J(r, j) = w[static_cast<std::size_t>(r)].real();
          J(16 + r, j) = w[static_cast<std::size_t>(r)].imag();
        }
      }
      RVec step = lstsq(J, RVec(-f));
      if (!step.allFinite() || step.norm() > 1e6) break;
      lam += step;
      if (step.norm() <= 1e-14 * (1.0 + lam.norm())) {
        ok = phi(lam).norm() <= 1e-10 * hs * hs;
        break;
      }
    }
    if (!ok) continue;
    EvenElement h = h_of(up + K * lam);
    if (accept(h)) push_solution(h);
  }
  if (out.solutions.empty()) {
    out.outcome = FactorOutcome::NoCommonZero;
    return out;
  }
  out.outcome = FactorOutcome::Found;

  // Tangent dimension of {linear system} ∩ {M(h)=0} at the first solution:
  // a positive value flags a continuous family of factors.
  {
    const EvenElement& h = out.solutions.front();
    RMat Jfull(64, 16);
    Jfull.topRows(32) = Lr;
    for (int k = 0; k < 16; ++k) {
      std::array<Scalar, 16> w{};
      w[static_cast<std::size_t>(k)] = Scalar(1);
      EvenElement Ek = EvenElement::from_wire(w);
      auto col = (Ek * h + h * Ek + Scalar(b) * Ek).wire();
      for (int r = 0; r < 16; ++r) {
        Jfull(32 + r, k) = col[static_cast<std::size_t>(r)].real();
        Jfull(48 + r, k) = col[static_cast<std::size_t>(r)].imag();
      }
    }
    RMat tang = kernel_basis_real(Jfull, 1e-7);
    out.family_dim = static_cast<int>(tang.cols());
  }
  return out;
}

struct DoubleRootFactor {
  FactorOutcome outcome = FactorOutcome::NotVerified;
  EvenElement h;   // valid when outcome == Found; norm of t - h is (t - z)^2
  bool trivial = false;  // C(z) = 0 held, so h = z itself
};

// Factor with norm (t - z)^2 at a real double root z of the norm polynomial.
inline DoubleRootFactor double_root_factor(const EvenPolynomial& C, double z, Side side,
                                           double tol = 1e-8) {
  if (side == Side::Right) {
    DoubleRootFactor d = double_root_factor(reverse_coeffs(C), z, Side::Left, tol);
    d.h = reverse(d.h);
    return d;
  }
  DoubleRootFactor out;
  const double cscale = std::max(C.max_coeff_norm(), 1e-300);
  EvenElement cz = C(Scalar(z));
  if (frob(cz) <= tol * cscale) {
    // (t - z) is itself a (central) factor.
    out.outcome = FactorOutcome::Found;
    out.h = EvenElement(Scalar(z));
    out.trivial = true;
    return out;
  }
  if (!is_real(C, 1e-9)) {
    out.outcome = FactorOutcome::DegenerateData;
    return out;
  }
  EvenElement cpz = C.derivative()(Scalar(z));
  if (frob(reverse(cpz) * cz) <= tol * cscale * cscale) {
    out.outcome = FactorOutcome::CriterionFailed;
    return out;
  }

  EvenPolynomial Ct = C.shifted(z);  // now the double root sits at 0
  EvenElement c0 = Ct(Scalar(0));
  std::vector<CgaVector> anns;
  try {
    anns = real_annihilators(c0, Side::Left, tol);
  } catch (const Error&) {
    out.outcome = FactorOutcome::DegenerateData;
    return out;
  }
  for (const CgaVector& a_raw : anns) {
    // Conjugate the annihilating point onto e_inf when it is a finite point.
    CgaVector a = a_raw;
    bool at_infinity = std::abs(a.o) <= 1e-10 * a.norm();
    Multivector v;
    Scalar v2(1);
    EvenPolynomial D = Ct;
    if (!at_infinity) {
      a = (1.0 / a.o) * a;
      v = a.mv() + e_inf;
      v2 = Scalar(-2);  // v^2 = 2 a.e_inf = -2 a_o = -2
      std::vector<EvenElement> dc;
      dc.reserve(Ct.size());
      for (std::size_t i = 0; i < Ct.size(); ++i)
        dc.push_back(EvenElement::unchecked(v * Ct[i].mv() * v));
      D = EvenPolynomial(dc);
    }
    FourQuat d0 = D(Scalar(0)).four_quat();
    double d0s = frob(D(Scalar(0)));
    // e_inf-annihilated displacement:  eps1 (q1 + eps2 q2), i.e. (-q2, q1, 0, q2).
    if (d0.q2.abs() > 1e-7 * d0s || (d0.q0 + d0.q3).abs() > 1e-7 * d0s) continue;
    Quaternion q1 = d0.q1, q2 = d0.q3;
    if (D.size() < 2) continue;
    FourQuat c1 = D[1].four_quat();
    Quaternion rho = c1.q0 + c1.q3;
    Quaternion Bq;
    double rs = std::max({c1.q0.abs(), c1.q2.abs(), c1.q3.abs(), 1e-300});
    if (rho.abs() > 1e-9 * rs) {
      Scalar nr = qnorm(rho);
      if (std::abs(nr) < 1e-18) continue;
      Bq = q1 * (Scalar(1) / nr * qconj(rho));
    } else if (c1.q2.abs() > 1e-9 * rs) {
      Scalar nr = qnorm(c1.q2);
      if (std::abs(nr) < 1e-18) continue;
      Bq = q2 * (Scalar(1) / nr * qconj(c1.q2));
    } else {
      continue;
    }
    double bscale = std::max(Bq.abs(), 1e-300);
    if ((Bq * rho - q1).abs() > 1e-6 * bscale * std::max(1.0, rs)) continue;
    if ((Bq * c1.q2 - q2).abs() > 1e-6 * bscale * std::max(1.0, rs)) continue;
    if (std::abs(Bq.w) > 1e-7 * bscale) continue;  // must be vectorial
    // h' = e_inf (b1 e1 + b2 e2 + b3 e3): a null plane element.
    Multivector bvec = Bq.x * e1 + Bq.y * e2 + Bq.z * e3;
    Multivector hp = e_inf * bvec;
    Multivector hm = hp;
    if (!at_infinity) hm = (Scalar(1) / v2) * (v * hp * v);
    EvenElement h = EvenElement::unchecked(hm) + EvenElement(Scalar(z));
    double hs = 1.0 + frob(h);
    if (frob(left_evaluate(C, h)) <= std::max(tol, 1e-7) * cscale * std::max(1.0, hs * hs)) {
      out.outcome = FactorOutcome::Found;
      out.h = h;
      return out;
    }
  }
  out.outcome = FactorOutcome::NotVerified;
  return out;
}

enum class PeelMethod { Geometric, Algebraic, DoubleRoot, Central, Direct };

inline const char* peel_method_name(PeelMethod m) {
  switch (m) {
    case PeelMethod::Geometric: return "geometric";
    case PeelMethod::Algebraic: return "algebraic";
    case PeelMethod::DoubleRoot: return "double_root";
    case PeelMethod::Central: return "central";
    case PeelMethod::Direct: return "direct";
  }
  return "unknown";
}

struct LinearFactorStep {
  EvenElement h;
  PeelMethod method;
};

struct Factorization {
  std::vector<LinearFactorStep> steps;  // product in left-to-right order
  EvenElement unit;                     // invertible constant; on the left for
                                        // Side::Left, on the right for Side::Right
  double residual = 0.0;                // re-expansion distance, relative
};

enum class FactorizeStatus { Factored, NoFactorization, InfiniteFamily };

inline const char* factorize_status_name(FactorizeStatus s) {
  switch (s) {
    case FactorizeStatus::Factored: return "factored";
    case FactorizeStatus::NoFactorization: return "no_factorization";
    case FactorizeStatus::InfiniteFamily: return "infinite_family";
  }
  return "unknown";
}

struct FactorizeOptions {
  Side side = Side::Left;
  bool explore_all = false;   // walk every quadratic choice instead of the first hit
  double tol = 1e-8;
  uint64_t seed = 2024;
  int max_factorizations = 8;
  int max_attempts = 256;     // global budget on peel attempts
  bool polish = true;         // Gauss-Newton refinement of accepted chains
};

struct FactorizeResult {
  FactorizeStatus status = FactorizeStatus::NoFactorization;
  Side side = Side::Left;
  std::vector<Factorization> list;
  int family_dim = 0;                        // largest family dimension seen
  std::vector<EvenElement> family_samples;   // factor samples from that family
  std::vector<std::string> diagnostics;      // per-quadratic failure notes
};

// Rebuilds unit * (t-h1)...(t-hd) (Side::Left) or (t-h1)...(t-hd) * unit
// (Side::Right) for verification and reporting.
inline EvenPolynomial expand_factorization(const Factorization& f, Side side) {
  EvenPolynomial p = EvenPolynomial::constant(EvenElement(Scalar(1)));
  for (const auto& s : f.steps) p = p * EvenPolynomial::linear(s.h);
  if (side == Side::Left) return f.unit * p;
  return p * f.unit;
}

namespace detail {

inline std::string quadratic_label(const QuadraticFactor& q) {
  std::ostringstream os;
  os << "t^2";
  if (std::abs(q.b) > 1e-14) os << (q.b > 0 ? "+" : "") << q.b << "t";
  if (std::abs(q.c) > 1e-14) os << (q.c > 0 ? "+" : "") << q.c;
  return os.str();
}

struct FactorSearch {
  FactorizeOptions opts;
  int attempts = 0;
  bool family_seen = false;
  int family_dim = 0;
  std::vector<EvenElement> family_samples;
  std::vector<std::string> diagnostics;

  bool budget() { return attempts++ < opts.max_attempts; }

  // Norm coefficients that are pure arithmetic noise (products of exactly
  // cancelling terms) mislead the root finder into splitting multiple roots;
  // snap them to zero before rooting.
  static RealPolynomial cleaned_norm(const EvenPolynomial& C) {
    RealPolynomial N = norm_poly(C);
    double scale = N.max_abs();
    for (auto& x : N.c)
      if (std::abs(x) <= 1e-11 * scale) x = 0.0;
    return N;
  }

  // Peels central scalar factors (roots z of the norm where the polynomial
  // itself vanishes), then branches over the distinct quadratic divisors.
  // Returns complete factor chains of the monic polynomial C.
  std::vector<std::vector<LinearFactorStep>> run(const EvenPolynomial& C_in) {
    std::vector<std::vector<LinearFactorStep>> results;
    EvenPolynomial C = C_in;
    C.trim();
    std::vector<LinearFactorStep> prefix;
    const double tol = opts.tol;

    // Central deflation: C(z) = 0 at a norm root makes t - z (or the real
    // quadratic through a conjugate pair) a two-sided factor.
    bool deflated = true;
    while (deflated && C.degree() > 0) {
      deflated = false;
      RealPolynomial N;
      try {
        N = cleaned_norm(C);
      } catch (const Error& e) {
        diagnostics.push_back(std::string("norm: ") + e.what());
        return results;
      }
      RootSet rs;
      try {
        rs = find_roots(N);
      } catch (const Error& e) {
        diagnostics.push_back(std::string("roots: ") + e.what());
        return results;
      }
      const double cscale = std::max(C.max_coeff_norm(), 1e-300);
      for (const auto& r : rs.roots) {
        if (frob(C(r.z)) > tol * cscale) continue;
        if (r.real) {
          EvenElement h = EvenElement(r.z);
          auto d = divide(C, EvenPolynomial::linear(h), DivisorSide::Left);
          prefix.push_back({h, PeelMethod::Central});
          C = d.quotient;
          C.trim();
        } else {
          // Conjugate pair: peel (t-h)(t-rev h) with h = x + y e12.
          double x = r.z.real(), y = r.z.imag();
          EvenElement h = EvenElement::unchecked(Multivector::scalar(x) + Scalar(y) * (e1 * e2));
          auto d1 = divide(C, EvenPolynomial::linear(h), DivisorSide::Left);
          auto d2 = divide(d1.quotient, EvenPolynomial::linear(reverse(h)), DivisorSide::Left);
          prefix.push_back({h, PeelMethod::Central});
          prefix.push_back({reverse(h), PeelMethod::Central});
          C = d2.quotient;
          C.trim();
        }
        deflated = true;
        break;
      }
    }

    if (C.degree() == 0) {
      // The monic chain must close on the constant 1.
      if (dist(C[0], EvenElement(Scalar(1))) <= 1e-6 * (1.0 + frob(C[0]))) {
        results.push_back(prefix);
      } else {
        diagnostics.push_back("residual constant is not the identity");
      }
      return results;
    }

    if (C.degree() == 1) {
      // Monic linear remainder: t - h directly.
      std::vector<LinearFactorStep> chain = prefix;
      chain.push_back({Scalar(-1) * C[0], PeelMethod::Direct});
      results.push_back(std::move(chain));
      return results;
    }

    std::vector<QuadraticFactor> quads;
    try {
      quads = quadratic_factors(cleaned_norm(C));
    } catch (const Error& e) {
      diagnostics.push_back(std::string("pairing: ") + e.what());
      return results;
    }

    for (const auto& M : quads) {
      if (!budget()) break;
      auto peeled = peel_one(C, M);
      if (!peeled) continue;
      auto d = divide(C, EvenPolynomial::linear(peeled->h), DivisorSide::Left);
      auto tails = run(d.quotient);
      for (auto& tail : tails) {
        std::vector<LinearFactorStep> chain = prefix;
        chain.push_back(*peeled);
        chain.insert(chain.end(), tail.begin(), tail.end());
        results.push_back(std::move(chain));
        if (!opts.explore_all) return results;
        if (static_cast<int>(results.size()) >= opts.max_factorizations) return results;
      }
      if (!opts.explore_all && !results.empty()) return results;
    }
    return results;
  }

  std::optional<LinearFactorStep> peel_one(const EvenPolynomial& C, const QuadraticFactor& M) {
    const double tol = opts.tol;
    // Any genuine monic factor obeys a coefficient-growth bound.  A huge h
    // (typically built from a nearly-orthogonal annihilator pair) signals a
    // spurious candidate whose defects would later hide behind cancellation
    // in the magnitude-normalized re-expansion check, so it is refused here
    // and the remaining methods get their turn.
    const double h_bound = 64.0 * (1.0 + C.max_coeff_norm());
    auto admit = [&](const EvenElement& h, PeelMethod m) -> std::optional<LinearFactorStep> {
      if (frob(h) > h_bound) {
        diagnostics.push_back(quadratic_label(M) + ": " + peel_method_name(m) +
                              "=factor_out_of_bounds");
        return std::nullopt;
      }
      return LinearFactorStep{h, m};
    };

    const bool repeated_real = !M.conjugate_pair() && std::abs(M.z1 - M.z2) <=
                                   1e-5 * (1.0 + std::abs(M.z1));
    if (repeated_real) {
      auto dr = double_root_factor(C, M.z1.real(), Side::Left, tol);
      if (dr.outcome == FactorOutcome::Found) {
        if (auto step = admit(dr.h, dr.trivial ? PeelMethod::Central : PeelMethod::DoubleRoot))
          return step;
      } else {
        diagnostics.push_back(quadratic_label(M) + ": double_root=" +
                              factor_outcome_name(dr.outcome));
        // The criterion is an exact obstruction; other failures fall through
        // to the algebraic search below.
        if (dr.outcome == FactorOutcome::CriterionFailed) return std::nullopt;
      }
    } else {
      auto g = geometric_factor(C, M, Side::Left, tol);
      if (g.outcome == FactorOutcome::Found) {
        if (auto step = admit(g.h, PeelMethod::Geometric)) return step;
      } else {
        diagnostics.push_back(quadratic_label(M) + ": geometric=" +
                              factor_outcome_name(g.outcome));
      }
    }
    auto alg = algebraic_factor(C, M.poly(), Side::Left, opts.seed, tol);
    if (alg.outcome == FactorOutcome::Found) {
      if (auto step = admit(alg.solutions.front(), PeelMethod::Algebraic)) {
        if (alg.family_dim > 0) {
          family_seen = true;
          if (alg.family_dim > family_dim) {
            family_dim = alg.family_dim;
            family_samples = alg.solutions;
          }
        }
        return step;
      }
      return std::nullopt;
    }
    diagnostics.push_back(quadratic_label(M) + ": algebraic=" +
                          factor_outcome_name(alg.outcome));
    return std::nullopt;
  }
};

}  // namespace detail

// Re-expansion check of a reported factorization against the input.
inline double verify_factorization(const EvenPolynomial& C, const Factorization& f, Side side);

// Gauss-Newton polish of a factorization chain: minimizes the re-expansion
// distance to C over the step elements (the unit is held fixed).  The
// products involved are tiny, so a few iterations cost next to nothing; on
// ill-conditioned inputs (clustered norm roots) they buy several orders of
// magnitude of accuracy.  Returns the final relative residual.
inline double refine_factorization(const EvenPolynomial& C, Factorization& f, Side side,
                                   int max_iter = 4) {
  const int k = static_cast<int>(f.steps.size());
  if (k == 0) return verify_factorization(C, f, side);
  const double cscale = std::max(C.max_coeff_norm(), 1e-300);
  const int m = static_cast<int>(std::max(C.size(), f.steps.size() + 1));

  auto residual_vec = [&](const Factorization& g) {
    EvenPolynomial diff = expand_factorization(g, side) - C;
    RVec r = RVec::Zero(32 * m);
    for (int i = 0; i < static_cast<int>(diff.size()) && i < m; ++i) {
      auto w = diff[i].wire();
      for (int j = 0; j < 16; ++j) {
        r(32 * i + 2 * j) = w[j].real();
        r(32 * i + 2 * j + 1) = w[j].imag();
      }
    }
    return r;
  };

  RVec r = residual_vec(f);
  double best = r.norm();
  for (int iter = 0; iter < max_iter && best > 1e-14 * cscale; ++iter) {
    RMat J(32 * m, 32 * k);
    for (int s = 0; s < k; ++s) {
      const double eps = 1e-7 * (1.0 + frob(f.steps[s].h));
      auto w = f.steps[s].h.wire();
      for (int j = 0; j < 32; ++j) {
        auto wp = w;
        wp[j / 2] += (j % 2 == 0) ? Scalar(eps) : Scalar(0, eps);
        Factorization g = f;
        g.steps[s].h = EvenElement::from_wire(wp);
        J.col(32 * s + j) = (residual_vec(g) - r) / eps;
      }
    }
    RVec dx = lstsq(J, -r);
    double scale = 1.0;
    bool improved = false;
    for (int half = 0; half < 4 && !improved; ++half, scale *= 0.5) {
      Factorization g = f;
      for (int s = 0; s < k; ++s) {
        auto w = f.steps[s].h.wire();
        for (int j = 0; j < 16; ++j)
          w[j] += scale * Scalar(dx(32 * s + 2 * j), dx(32 * s + 2 * j + 1));
        g.steps[s].h = EvenElement::from_wire(w);
      }
      RVec rn = residual_vec(g);
      if (rn.norm() < best) {
        f = std::move(g);
        r = std::move(rn);
        best = r.norm();
        improved = true;
      }
    }
    if (!improved) break;
  }
  return verify_factorization(C, f, side);
}

inline FactorizeResult factorize_all(const EvenPolynomial& C_in, FactorizeOptions opts = {}) {
  if (opts.side == Side::Right) {
    FactorizeOptions mirrored = opts;
    mirrored.side = Side::Left;
    FactorizeResult res = factorize_all(reverse_coeffs(C_in), mirrored);
    res.side = Side::Right;
    for (auto& f : res.list) {
      std::reverse(f.steps.begin(), f.steps.end());
      for (auto& s : f.steps) s.h = reverse(s.h);
      f.unit = reverse(f.unit);
    }
    for (auto& h : res.family_samples) h = reverse(h);
    return res;
  }

  EvenPolynomial C = C_in;
  C.trim();
  if (C.degree() < 0 || (C.degree() == 0 && frob(C[0]) == 0.0))
    throw Error(Errc::BadInput, "factorize_all: zero polynomial");
  (void)norm_poly(C);  // throws NotSpinor early on bad input

  FactorizeResult res;
  res.side = Side::Left;
  EvenElement lead = C[C.degree()];
  EvenElement lead_inv;
  if (!try_inverse(lead, lead_inv))
    throw Error(Errc::NonInvertibleLeadingCoefficient,
                "factorize_all: leading coefficient is not invertible");
  EvenPolynomial Cm = lead_inv * C;

  detail::FactorSearch search;
  search.opts = opts;
  auto chains = search.run(Cm);
  res.diagnostics = std::move(search.diagnostics);

  const double cscale = std::max(C.max_coeff_norm(), 1e-300);
  for (auto& chain : chains) {
    Factorization f;
    f.steps = std::move(chain);
    f.unit = lead;
    if (opts.polish) {
      f.residual = refine_factorization(C, f, Side::Left);
    } else {
      EvenPolynomial back = expand_factorization(f, Side::Left);
      double r = 0;
      for (std::size_t i = 0; i < std::max(back.size(), C.size()); ++i) {
        EvenElement bi = i < back.size() ? back[i] : EvenElement(Scalar(0));
        EvenElement ci = i < C.size() ? C[i] : EvenElement(Scalar(0));
        r = std::max(r, dist(bi, ci));
      }
      f.residual = r / cscale;
    }
    if (f.residual > std::max(opts.tol, 1e-7)) continue;
    bool dup = false;
    for (const auto& g : res.list) {
      if (g.steps.size() != f.steps.size()) continue;
      bool same = true;
      for (std::size_t i = 0; i < f.steps.size() && same; ++i)
        same = dist(g.steps[i].h, f.steps[i].h) <= 1e-7 * (1.0 + frob(f.steps[i].h));
      if (same) {
        dup = true;
        break;
      }
    }
    if (!dup) res.list.push_back(std::move(f));
  }

  res.family_dim = search.family_dim;
  res.family_samples = search.family_samples;
  if (!res.list.empty())
    res.status = FactorizeStatus::Factored;
  else if (search.family_seen)
    res.status = FactorizeStatus::InfiniteFamily;
  else
    res.status = FactorizeStatus::NoFactorization;
  return res;
}

// Re-expansion check of a reported factorization against the input.
inline double verify_factorization(const EvenPolynomial& C, const Factorization& f, Side side) {
  EvenPolynomial back = expand_factorization(f, side);
  double r = 0;
  for (std::size_t i = 0; i < std::max(back.size(), C.size()); ++i) {
    EvenElement bi = i < back.size() ? back[i] : EvenElement(Scalar(0));
    EvenElement ci = i < C.size() ? C[i] : EvenElement(Scalar(0));
    r = std::max(r, dist(bi, ci));
  }
  return r / std::max(C.max_coeff_norm(), 1e-300);
}

}  // namespace spinfact
