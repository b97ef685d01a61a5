#pragma once

// The multiplication technique.  A spinor polynomial P without linear factors
// can be repaired by multiplying with a generic linear spinor cofactor
// H = t - e^f built from two real vectors: the product P H admits verified
// left and right factorizations.  Multiplying further by the reverse cofactor
// gives a *real* cofactor R = H H-bar with P R factoring completely into
// linear spinor polynomials.

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "factorization.hpp"
#include "random.hpp"

namespace spinfact {

// t - e^f.  For real e, f the coefficient is a real bivector, whose reverse
// is its negative, so the norm polynomial t^2 - (e^f)^2 is real: every such
// H is a monic linear spinor polynomial.
inline EvenPolynomial cofactor_from_vectors(const CgaVector& e, const CgaVector& f) {
  return EvenPolynomial::linear(EvenElement::unchecked(wedge(e, f)));
}

namespace detail {

inline double coordinate_norm(const CgaVector& v) {
  return std::sqrt(std::norm(v.o) + std::norm(v.x1) + std::norm(v.x2) + std::norm(v.x3) +
                   std::norm(v.inf));
}

}  // namespace detail

// Genericity filter for a sampled vector pair: e.f must be bounded away from
// zero (relative to the coordinate norms), and the roots of the cofactor norm
// t^2 - (e^f)^2 must stay clear of every root of the input's norm polynomial.
// Pairs failing this land on the exceptional algebraic sets where the
// multiplication technique may break down.  (The two cofactor roots may
// coincide with each other: that case is well-defined and handled.)
inline bool generic_cofactor_pair(const CgaVector& e, const CgaVector& f,
                                  const RootSet& input_norm_roots, double sep = 1e-6) {
  double scale = detail::coordinate_norm(e) * detail::coordinate_norm(f);
  if (std::abs(dot(e, f)) <= sep * scale) return false;
  RootSet hr = find_roots(norm_poly(cofactor_from_vectors(e, f)));
  for (const auto& rh : hr.roots)
    for (const auto& rp : input_norm_roots.roots)
      if (std::abs(rh.z - rp.z) <= sep) return false;
  return true;
}

struct CofactorResult {
  EvenPolynomial cofactor;  // H = t - e^f, monic linear spinor
  CgaVector e, f;           // the generating vectors
  EvenPolynomial product;   // P H
  Factorization left;       // P H = unit (t-g1)...(t-gm)
  Factorization right;      // P H = (t-g1)...(t-gm) unit
  int attempts = 0;         // samples consumed, accepted one included
};

struct CofactorOptions {
  uint64_t seed = 2024;
  int max_attempts = 20;
  double tol = 1e-8;
};

// The certified outermost factors: P H = (t - g) Q and P H = Q' (t - g').
// The invertible unit is folded into the adjacent linear factor.
inline EvenElement left_factor(const CofactorResult& r) {
  EvenElement u = r.left.unit;
  return u * r.left.steps.front().h * inverse(u);
}

inline EvenElement right_factor(const CofactorResult& r) {
  EvenElement u = r.right.unit;
  return inverse(u) * r.right.steps.back().h * u;
}

// Samples real vector pairs until the product P H factors on both sides.
// Degenerate pairs (see generic_cofactor_pair) are rejected before the
// factorization is attempted; a failed factorization rejects the sample too,
// which covers the remaining genericity conditions (non-orthogonality of the
// transported annihilator pairs) by direct verification.
inline CofactorResult find_cofactor(const EvenPolynomial& P, const CofactorOptions& opts = {}) {
  if (P.degree() < 1) throw Error(Errc::BadInput, "find_cofactor: input must have degree >= 1");
  if (!is_spinor_poly(P))
    throw Error(Errc::NotSpinor, "find_cofactor: input is not a spinor polynomial");

  const RootSet input_roots = find_roots(detail::FactorSearch::cleaned_norm(P));
  Rng rng(opts.seed);
  std::string note;
  for (int attempt = 1; attempt <= opts.max_attempts; ++attempt) {
    CgaVector e = rng.vector(), f = rng.vector();
    if (!generic_cofactor_pair(e, f, input_roots)) {
      note = "degenerate sample";
      continue;
    }
    EvenPolynomial H = cofactor_from_vectors(e, f);
    EvenPolynomial prod = P * H;

    // Both sides must factor AND re-expand tightly; a sloppy chain means the
    // sample sits too close to an exceptional set, so it is discarded.
    const double residual_gate = std::min(opts.tol, 1e-9);
    FactorizeOptions fo;
    fo.tol = opts.tol;
    fo.seed = rng.sub_seed();
    FactorizeResult lres = factorize_all(prod, fo);
    if (lres.status != FactorizeStatus::Factored) {
      note = "left factorization: " + std::string(factorize_status_name(lres.status));
      continue;
    }
    if (lres.list.front().residual > residual_gate) {
      note = "left residual above gate";
      continue;
    }
    fo.side = Side::Right;
    fo.seed = rng.sub_seed();
    FactorizeResult rres = factorize_all(prod, fo);
    if (rres.status != FactorizeStatus::Factored) {
      note = "right factorization: " + std::string(factorize_status_name(rres.status));
      continue;
    }
    if (rres.list.front().residual > residual_gate) {
      note = "right residual above gate";
      continue;
    }
    return {std::move(H), e,
            f,            std::move(prod),
            std::move(lres.list.front()), std::move(rres.list.front()),
            attempt};
  }
  std::ostringstream os;
  os << "find_cofactor: no generic cofactor in " << opts.max_attempts << " attempts";
  if (!note.empty()) os << " (last: " << note << ")";
  throw Error(Errc::ExhaustedAttempts, os.str());
}

struct RealCofactorResult {
  RealPolynomial real_cofactor;        // R with P R factoring completely
  Factorization factorization;         // P R = unit (t-h1)...(t-hk), verified
  std::vector<CofactorResult> stages;  // the linear cofactors used (empty if R = 1)
};

// Real cofactor by the induction on multiplications: if P itself factors,
// R = 1.  Otherwise one generic linear cofactor H suffices: P H factors
// completely, and appending the reverse factor H-bar = t + e^f extends the
// chain to P (H H-bar) = P R.  The loop retries with a fresh seed stream in
// the unlikely event the assembled chain fails its re-expansion check.
inline RealCofactorResult real_cofactor(const EvenPolynomial& P, const CofactorOptions& opts = {}) {
  FactorizeOptions fo;
  fo.tol = opts.tol;
  fo.seed = opts.seed;
  FactorizeResult direct = factorize_all(P, fo);
  if (direct.status == FactorizeStatus::Factored)
    return {RealPolynomial{{1.0}}, std::move(direct.list.front()), {}};

  Rng rng(opts.seed);
  std::string note;
  for (int round = 0; round < 3; ++round) {
    CofactorOptions sub = opts;
    sub.seed = rng.sub_seed();
    CofactorResult cof = find_cofactor(P, sub);
    RealPolynomial R = norm_poly(cof.cofactor);

    Factorization chain = cof.left;
    // H-bar = t + e^f = t - (-reverse(-e^f)): one more directly known factor.
    chain.steps.push_back({-reverse(cof.cofactor[0]), PeelMethod::Direct});
    EvenPolynomial target = P * EvenPolynomial::from_real(R);
    chain.residual = verify_factorization(target, chain, Side::Left);
    if (chain.residual <= std::max(opts.tol, 1e-7))
      return {std::move(R), std::move(chain), {std::move(cof)}};
    std::ostringstream os;
    os << "re-expansion residual " << chain.residual;
    note = os.str();
  }
  throw Error(Errc::ExhaustedAttempts, "real_cofactor: " + note);
}

}  // namespace spinfact
