#pragma once

// Annihilating points of null displacements. A displacement is an even
// element n on the Study variety (n n-bar = n-bar n scalar) that also lies
// on the null quadric (scalar part of n n-bar is zero). For such n the set
// of grade-1 vectors x with x n = 0 (left) or n x = 0 (right) is nonzero;
// its elements are null vectors ("annihilating points").
//
// Three methods are provided:
//   * nullspace: SVD kernel of the linear map x -> x n (ground truth),
//   * sandwich:  x = n p reverse(n) for a random grade-1 probe p (fast, but
//                identically zero for some special displacements),
//   * cases:     closed-form stratification in the four-quaternion
//                representation n = q0 + eps1 q1 + eps2 q2 + eps3 q3,
//                with small dense solves on the strata that require them.
//
// Writing x = x_o e_o + X e123 + x_inf e_inf with X a vectorial quaternion,
// x n = 0 is equivalent to the quaternion system
//   (i)   x_o (q0 - q3) - X q2 = 0
//   (ii)  x_inf (q0 + q3) - X q1 = 0
//   (iii) X (q0 - q3) + 2 x_inf q2 = 0
//   (iv)  X (q0 + q3) + 2 x_o  q1 = 0.

#include <optional>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "polynomial.hpp"
#include "random.hpp"

namespace spinfact {

enum class Side { Left, Right };
enum class DisplacementClass { Generic, Special };

inline bool validate_null_displacement(const EvenElement& n, double tol = 1e-8) {
  return frob(n) > tol && is_study(n, tol) && is_null(n, tol);
}

namespace detail {

inline const std::array<unsigned, 16>& odd_masks() {
  static const std::array<unsigned, 16> masks = [] {
    std::array<unsigned, 16> m{};
    int k = 0;
    for (unsigned i = 0; i < kBlades; ++i)
      if (std::popcount(i) % 2 == 1) m[k++] = i;
    return m;
  }();
  return masks;
}

inline CgaVector cga_from_kernel_col(const CVec& v) {
  return {v(0), v(1), v(2), v(3), v(4)};
}

// 16x5 matrix of the map x -> x * n on grade-1 x (odd-mask coordinates).
inline CMat annihilation_matrix(const EvenElement& n) {
  const Multivector basis[5] = {e_o, e1, e2, e3, e_inf};
  CMat A(16, 5);
  for (int col = 0; col < 5; ++col) {
    Multivector prod = basis[col] * n.mv();
    for (int row = 0; row < 16; ++row) A(row, col) = prod[odd_masks()[row]];
  }
  return A;
}

inline double annihilation_residual(const CgaVector& x, const EvenElement& n) {
  return frob(x.mv() * n.mv());
}

}  // namespace detail

// ---- nullspace method ----

struct AnnihilatorBasis {
  std::vector<CgaVector> basis;  // unit Frobenius norm, pairwise orthogonal
  DisplacementClass cls = DisplacementClass::Generic;
};

inline AnnihilatorBasis annihilator_nullspace(const EvenElement& n_in, Side side,
                                              double tol = 1e-8) {
  if (!validate_null_displacement(n_in, tol))
    throw Error(Errc::BadInput, "element is not a null displacement");
  EvenElement n = Scalar(1.0 / frob(n_in)) * n_in;
  if (side == Side::Right) n = reverse(n);
  CMat K = kernel_basis(detail::annihilation_matrix(n), tol);
  if (K.cols() == 0) throw Error(Errc::EmptyKernel, "no annihilating point found");
  if (K.cols() > 2)
    throw Error(Errc::KernelTooLarge, "annihilator space has dimension > 2");
  AnnihilatorBasis out;
  for (int j = 0; j < K.cols(); ++j)
    out.basis.push_back(detail::cga_from_kernel_col(K.col(j)));
  out.cls = (K.cols() == 2) ? DisplacementClass::Special : DisplacementClass::Generic;
  return out;
}

inline DisplacementClass classify(const EvenElement& n, double tol = 1e-8) {
  return annihilator_nullspace(n, Side::Left, tol).cls;
}

// ---- sandwich method ----

struct SandwichAnnihilator {
  bool defined = false;  // false: every probe was annihilated by the sandwich
  CgaVector x;
  int probes_used = 0;
};

inline SandwichAnnihilator annihilator_sandwich(const EvenElement& n_in, Side side,
                                                uint64_t seed = 0, int max_probes = 8,
                                                double tol = 1e-8) {
  if (!validate_null_displacement(n_in, tol))
    throw Error(Errc::BadInput, "element is not a null displacement");
  EvenElement n = Scalar(1.0 / frob(n_in)) * n_in;
  if (side == Side::Right) n = reverse(n);
  Rng rng(seed);
  SandwichAnnihilator out;
  for (int k = 0; k < max_probes; ++k) {
    CgaVector p = rng.vector(false);
    Multivector full = n.mv() * p.mv() * reverse(n.mv());
    Multivector g1 = grade_part(full, 1);
    out.probes_used = k + 1;
    if (frob(g1) <= 1e-10 * p.norm()) continue;  // this probe was annihilated
    if (dist(full, g1) > tol * frob(full)) continue;  // not acting as a versor here
    CgaVector x = CgaVector::from_mv(g1, 1e-6);
    double nx = x.norm();
    x = Scalar(1.0 / nx) * x;
    if (detail::annihilation_residual(x, n) > tol) continue;
    if (side == Side::Right) {
      // x annihilates reverse(n) from the left, hence n from the right.
      if (frob(n_in.mv() * x.mv()) > tol * frob(n_in)) continue;
    }
    out.defined = true;
    out.x = x;
    return out;
  }
  return out;  // defined == false: nowhere defined (or unlucky probes)
}

// ---- case stratification ----

struct CaseAnnihilator {
  CgaVector x;
  std::string case_label;
};

namespace detail {

struct Triple {
  Scalar x_o{};
  Quaternion X{};
  Scalar x_inf{};
};

// Column of the quaternion system (i)-(iv) generated by one unknown triple.
inline void system_column(const Triple& t, const Quaternion& q1, const Quaternion& q2,
                          const Quaternion& s, const Quaternion& d, CMat& A, int col) {
  Quaternion r1 = t.x_o * d - t.X * q2;
  Quaternion r2 = t.x_inf * s - t.X * q1;
  Quaternion r3 = t.X * d + (2.0 * t.x_inf) * q2;
  Quaternion r4 = t.X * s + (2.0 * t.x_o) * q1;
  const Quaternion* rows[4] = {&r1, &r2, &r3, &r4};
  for (int b = 0; b < 4; ++b) {
    A(4 * b + 0, col) = rows[b]->w;
    A(4 * b + 1, col) = rows[b]->x;
    A(4 * b + 2, col) = rows[b]->y;
    A(4 * b + 3, col) = rows[b]->z;
  }
}

inline CgaVector triple_to_vector(const Triple& t) {
  // X e123 maps x1 i + x2 j + x3 k to x1 e1 + x2 e2 + x3 e3.
  return {t.x_o, t.X.x, t.X.y, t.X.z, t.x_inf};
}

}  // namespace detail

// Closed-form / stratified computation of one left annihilating point.
// The returned label names the stratum that produced the verified point; on
// numerically degenerate inputs the method falls back to the SVD nullspace
// (label "fallback").
inline CaseAnnihilator annihilator_cases(const EvenElement& n_in, Side side,
                                         uint64_t seed = 0, double tol = 1e-8) {
  if (!validate_null_displacement(n_in, tol))
    throw Error(Errc::BadInput, "element is not a null displacement");
  EvenElement n = Scalar(1.0 / frob(n_in)) * n_in;
  if (side == Side::Right) n = reverse(n);

  FourQuat f = n.four_quat();
  const Quaternion q1 = f.q1, q2 = f.q2;
  const Quaternion s = f.q0 + f.q3, d = f.q0 - f.q3;
  Rng rng(seed);

  const double ztol = 1e-9;   // zero tests on unit-norm input
  const double vtol = tol;    // verification tolerance for |x n|

  auto try_triple = [&](Scalar x_o, const Quaternion& X, Scalar x_inf,
                        const char* label) -> std::optional<CaseAnnihilator> {
    // The euclidean part must be vectorial; a scalar residue marks a stratum
    // mismatch and the candidate is rejected.
    double mag = std::max({std::abs(x_o), X.abs(), std::abs(x_inf)});
    if (mag < ztol) return std::nullopt;
    if (std::abs(X.w) > 1e-7 * std::max(1.0, X.abs())) return std::nullopt;
    CgaVector x = detail::triple_to_vector({x_o, X, x_inf});
    x = Scalar(1.0 / x.norm()) * x;
    if (detail::annihilation_residual(x, n) > vtol) return std::nullopt;
    return CaseAnnihilator{x, label};
  };

  // Candidates from the kernel of the quaternion system restricted to the
  // span of the given unknown triples.
  auto try_system = [&](const std::vector<detail::Triple>& basis,
                        const char* label) -> std::optional<CaseAnnihilator> {
    CMat A(16, static_cast<int>(basis.size()));
    for (size_t j = 0; j < basis.size(); ++j)
      detail::system_column(basis[j], q1, q2, s, d, A, static_cast<int>(j));
    CMat K = kernel_basis(A, 1e-10);
    std::vector<CVec> cands;
    for (int j = 0; j < K.cols(); ++j) cands.push_back(K.col(j));
    if (K.cols() >= 2)
      for (int extra = 0; extra < 2; ++extra) {
        CVec c = CVec::Zero(K.cols());
        for (int j = 0; j < K.cols(); ++j) c(j) = Scalar(rng.uniform(), rng.uniform());
        cands.push_back(K * c);
      }
    for (const auto& c : cands) {
      detail::Triple t;
      for (size_t j = 0; j < basis.size(); ++j) {
        t.x_o += c(static_cast<int>(j)) * basis[j].x_o;
        t.X = t.X + c(static_cast<int>(j)) * basis[j].X;
        t.x_inf += c(static_cast<int>(j)) * basis[j].x_inf;
      }
      if (auto r = try_triple(t.x_o, t.X, t.x_inf, label)) return r;
    }
    return std::nullopt;
  };

  // --- Case 1: direct parcels on the generic strata ---
  // 1.1: X = q2 conj(d), x_o = -N(q2), x_inf = -N(d)/2.
  if (auto r = try_triple(-qnorm(q2), q2 * qconj(d), -0.5 * qnorm(d), "1.1")) return *r;
  // 1.2: X = q1 conj(s), x_o = -N(s)/2, x_inf = -N(q1).
  if (auto r = try_triple(-0.5 * qnorm(s), q1 * qconj(s), -qnorm(q1), "1.2")) return *r;

  {
    // --- Case 2: the parcels above vanished with nonzero ingredients ---
    // 2.1: X = q2 conj(s), x_o = 0, x_inf = -2 N(q0).
    if (auto r = try_triple(Scalar(0), q2 * qconj(s), -2.0 * qnorm(f.q0), "2.1")) return *r;
    // 2.2: X = q1 conj(d), x_o = -2 N(q0), x_inf = 0.
    if (auto r = try_triple(-2.0 * qnorm(f.q0), q1 * qconj(d), Scalar(0), "2.2")) return *r;

    const bool z1 = q1.abs() <= ztol, z2 = q2.abs() <= ztol;
    const bool zs = s.abs() <= ztol, zd = d.abs() <= ztol;

    if (z1 || z2 || zs || zd) {
      // --- Case 4: one or more of the four quaternions vanish ---
      // 4.4/4.5: constant solutions.
      if (z1 && zd)
        if (auto r = try_triple(Scalar(1), {}, Scalar(0), "4.4")) return *r;
      if (z2 && zs)
        if (auto r = try_triple(Scalar(0), {}, Scalar(1), "4.5")) return *r;

      for (int attempt = 0; attempt < 8; ++attempt) {
        Quaternion r = rng.quat(false);
        Quaternion U1 = q1 * r * qconj(q1), U2 = q2 * r * qconj(q2);
        Quaternion U3 = s * r * qconj(s), U4 = d * r * qconj(d);
        if (z1 && zs) {
          // 4.2: X = U2 + U4, x_o = -S(d, q2 conj(r)), x_inf = S(q2, d conj(r))/2.
          if (auto rr = try_triple(-S(d, q2 * qconj(r)), U2 + U4,
                                   0.5 * S(q2, d * qconj(r)), "4.2"))
            return *rr;
        }
        // Single-vanishing strata: one sandwich parametrizes X.
        if (z1 && !z2 && !zs && !zd)
          if (auto rr = try_triple(-S(d, q2 * qconj(r)), U4, Scalar(0), "4.1"))
            return *rr;
        if (z2 && !z1 && !zs && !zd)
          if (auto rr = try_triple(Scalar(0), U3, -S(s, q1 * qconj(r)), "4.1"))
            return *rr;
        if (zs && !z1 && !z2 && !zd)
          if (auto rr = try_triple(Scalar(0), U2, 0.5 * S(q2, d * qconj(r)), "4.1"))
            return *rr;
        if (zd && !z1 && !z2 && !zs)
          if (auto rr = try_triple(0.5 * S(q1, s * qconj(r)), U1, Scalar(0), "4.1"))
            return *rr;
      }

      // Remaining strata solve their reduced linear system directly:
      // 4.3 (q2 = d = 0), 4.6 (q1 = q2 = 0), 4.7 (s = d = 0), and any
      // stratum whose sandwich parametrization degenerated above.
      const char* label = (z2 && zd)   ? "4.3"
                          : (z1 && z2) ? "4.6"
                          : (zs && zd) ? "4.7"
                                       : "4.x";
      std::vector<detail::Triple> full = {{Scalar(1), {}, Scalar(0)},
                                          {Scalar(0), {Scalar(0), 1, 0, 0}, Scalar(0)},
                                          {Scalar(0), {Scalar(0), 0, 1, 0}, Scalar(0)},
                                          {Scalar(0), {Scalar(0), 0, 0, 1}, Scalar(0)},
                                          {Scalar(0), {}, Scalar(1)}};
      if (auto r = try_system(full, label)) return *r;
    } else {
      // --- Case 3: all four nonzero but isotropic (common right ruling) ---
      auto parallel = [&](const Quaternion& a, const Quaternion& b) {
        // complex cross product of the vectorial parts
        Scalar cx = a.y * b.z - a.z * b.y;
        Scalar cy = a.z * b.x - a.x * b.z;
        Scalar cz = a.x * b.y - a.y * b.x;
        double cn = std::sqrt(std::norm(cx) + std::norm(cy) + std::norm(cz));
        return cn <= 1e-8 * std::max(1e-300, a.abs() * b.abs());
      };
      for (int attempt = 0; attempt < 8; ++attempt) {
        Quaternion r = rng.quat(false);
        Quaternion U1 = q1 * r * qconj(q1), U2 = q2 * r * qconj(q2);
        Quaternion U3 = s * r * qconj(s), U4 = d * r * qconj(d);
        if (std::min({U1.abs(), U2.abs(), U3.abs(), U4.abs()}) < 1e-8) continue;
        bool p12 = parallel(U1, U2), p34 = parallel(U3, U4);
        bool cross = parallel(U1, U3) || parallel(U1, U4) || parallel(U2, U3) ||
                     parallel(U2, U4);
        if (!p12 && !p34 && !cross) {
          // 3.1: lambda from the 3x4 kernel of l1 U1 - l2 U2 + l3 U3 - l4 U4.
          CMat A(3, 4);
          const Quaternion* us[4] = {&U1, &U2, &U3, &U4};
          const double sgn[4] = {1, -1, 1, -1};
          for (int cidx = 0; cidx < 4; ++cidx) {
            A(0, cidx) = sgn[cidx] * us[cidx]->x;
            A(1, cidx) = sgn[cidx] * us[cidx]->y;
            A(2, cidx) = sgn[cidx] * us[cidx]->z;
          }
          CMat K = kernel_basis(A, 1e-10);
          for (int j = 0; j < K.cols(); ++j) {
            Scalar l1 = K(0, j), l2 = K(1, j), l3 = K(2, j), l4 = K(3, j);
            Quaternion X = l1 * U1 + l3 * U3;
            Scalar x_o = -l4 * S(d, q2 * qconj(r));
            Scalar x_inf = -l3 * S(s, q1 * qconj(r));
            if (auto rr = try_triple(x_o, X, x_inf, "3.1")) return *rr;
            // Equivalent closed forms on this stratum; use them if the
            // first pair was spoiled by cancellation.
            x_o = 0.5 * l1 * S(q1, s * qconj(r));
            x_inf = 0.5 * l2 * S(q2, d * qconj(r));
            if (auto rr = try_triple(x_o, X, x_inf, "3.1")) return *rr;
          }
        } else if (p12 || p34) {
          // 3.2: X in span{U1, U3}; solve for the mixing and x_o, x_inf.
          std::vector<detail::Triple> basis = {{Scalar(0), U1, Scalar(0)},
                                               {Scalar(0), U3, Scalar(0)},
                                               {Scalar(1), {}, Scalar(0)},
                                               {Scalar(0), {}, Scalar(1)}};
          if (auto rr = try_system(basis, "3.2")) return *rr;
        } else {
          // 3.3: a cross pair is parallel; use the other diagonal span.
          bool use24 = parallel(U1, U3) || parallel(U1, U4) || parallel(U2, U3);
          std::vector<detail::Triple> basis = {
              {Scalar(0), use24 ? U2 : U1, Scalar(0)},
              {Scalar(0), use24 ? U4 : U3, Scalar(0)},
              {Scalar(1), {}, Scalar(0)},
              {Scalar(0), {}, Scalar(1)}};
          if (auto rr = try_system(basis, "3.3")) return *rr;
        }
      }
    }
  }

  // --- documented fallback: SVD nullspace ---
  try {
    AnnihilatorBasis nb = annihilator_nullspace(n, Side::Left, tol);
    for (const auto& x : nb.basis)
      if (detail::annihilation_residual(x, n) <= tol) return {x, "fallback"};
  } catch (const Error&) {
  }
  throw Error(Errc::InternalCaseFailure, "no stratum produced a verified annihilator");
}

// ---- real annihilating points (for real displacements) ----

// Real vectors in the annihilator space of a (real) null displacement.
inline std::vector<CgaVector> real_annihilators(const EvenElement& n_in, Side side,
                                                double tol = 1e-8) {
  if (!validate_null_displacement(n_in, tol))
    throw Error(Errc::BadInput, "element is not a null displacement");
  EvenElement n = Scalar(1.0 / frob(n_in)) * n_in;
  if (side == Side::Right) n = reverse(n);
  CMat K = kernel_basis(detail::annihilation_matrix(n), tol);
  std::vector<CgaVector> out;
  for (const auto& v : real_span_vectors(K, 1e-8))
    out.push_back(detail::cga_from_kernel_col(v));
  return out;
}

}  // namespace spinfact
