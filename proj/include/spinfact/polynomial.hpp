#pragma once

// Polynomials with coefficients in the even sub-algebra Cl+(4,1), in the
// central indeterminate t. Both one-sided evaluations and both one-sided
// Euclidean divisions are provided; the norm polynomial of a spinor
// polynomial is extracted as a real polynomial.

#include <utility>
#include <vector>

#include "cga.hpp"

namespace spinfact {

// ---- real polynomials (for norm polynomials) ----

struct RealPolynomial {
  std::vector<double> c;  // ascending powers

  int degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
      if (c[i] != 0.0) return i;
    return -1;
  }

  void trim(double tol = 0.0) {
    while (!c.empty() && std::abs(c.back()) <= tol) c.pop_back();
  }

  Scalar operator()(Scalar z) const {
    Scalar r = 0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) r = r * z + c[i];
    return r;
  }

  RealPolynomial derivative() const {
    RealPolynomial d;
    for (size_t i = 1; i < c.size(); ++i) d.c.push_back(static_cast<double>(i) * c[i]);
    return d;
  }

  friend RealPolynomial operator*(const RealPolynomial& a, const RealPolynomial& b) {
    if (a.c.empty() || b.c.empty()) return {};
    RealPolynomial p;
    p.c.assign(a.c.size() + b.c.size() - 1, 0.0);
    for (size_t i = 0; i < a.c.size(); ++i)
      for (size_t j = 0; j < b.c.size(); ++j) p.c[i + j] += a.c[i] * b.c[j];
    return p;
  }

  friend RealPolynomial operator+(const RealPolynomial& a, const RealPolynomial& b) {
    RealPolynomial p;
    p.c.assign(std::max(a.c.size(), b.c.size()), 0.0);
    for (size_t i = 0; i < a.c.size(); ++i) p.c[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) p.c[i] += b.c[i];
    return p;
  }

  double max_abs() const {
    double m = 0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
  }
};

// t^2 + b t + c (used for quadratic norm factors).
inline RealPolynomial quadratic(double b, double c) { return RealPolynomial{{c, b, 1.0}}; }

// ---- even-coefficient polynomials ----

class EvenPolynomial {
 public:
  EvenPolynomial() = default;
  explicit EvenPolynomial(std::vector<EvenElement> coeffs) : c_(std::move(coeffs)) {}
  static EvenPolynomial constant(EvenElement e) { return EvenPolynomial({std::move(e)}); }
  static EvenPolynomial from_real(const RealPolynomial& r) {
    std::vector<EvenElement> c;
    c.reserve(r.c.size());
    for (double x : r.c) c.emplace_back(Scalar(x));
    return EvenPolynomial(std::move(c));
  }
  // t - h
  static EvenPolynomial linear(const EvenElement& h) {
    return EvenPolynomial({-h, EvenElement(Scalar(1))});
  }

  const std::vector<EvenElement>& coeffs() const { return c_; }
  std::vector<EvenElement>& coeffs() { return c_; }

  int degree() const {
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
      if (frob(c_[i]) != 0.0) return i;
    return -1;
  }

  const EvenElement& operator[](size_t i) const { return c_[i]; }
  EvenElement& operator[](size_t i) { return c_[i]; }
  size_t size() const { return c_.size(); }

  void trim(double tol = 0.0) {
    double scale = std::max(1e-300, max_coeff_norm());
    while (!c_.empty() && frob(c_.back()) <= tol * scale) c_.pop_back();
  }

  double max_coeff_norm() const {
    double m = 0;
    for (const auto& e : c_) m = std::max(m, frob(e));
    return m;
  }

  friend EvenPolynomial operator+(const EvenPolynomial& a, const EvenPolynomial& b) {
    EvenPolynomial p;
    p.c_.assign(std::max(a.c_.size(), b.c_.size()), EvenElement());
    for (size_t i = 0; i < a.c_.size(); ++i) p.c_[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) p.c_[i] += b.c_[i];
    return p;
  }
  friend EvenPolynomial operator-(const EvenPolynomial& a, const EvenPolynomial& b) {
    EvenPolynomial p;
    p.c_.assign(std::max(a.c_.size(), b.c_.size()), EvenElement());
    for (size_t i = 0; i < a.c_.size(); ++i) p.c_[i] += a.c_[i];
    for (size_t i = 0; i < b.c_.size(); ++i) p.c_[i] -= b.c_[i];
    return p;
  }
  friend EvenPolynomial operator*(const EvenPolynomial& a, const EvenPolynomial& b) {
    if (a.c_.empty() || b.c_.empty()) return {};
    EvenPolynomial p;
    p.c_.assign(a.c_.size() + b.c_.size() - 1, EvenElement());
    for (size_t i = 0; i < a.c_.size(); ++i) {
      if (frob(a.c_[i]) == 0.0) continue;
      for (size_t j = 0; j < b.c_.size(); ++j) p.c_[i + j] += a.c_[i] * b.c_[j];
    }
    return p;
  }
  friend EvenPolynomial operator*(const EvenPolynomial& a, const EvenElement& e) {
    EvenPolynomial p = a;
    for (auto& x : p.c_) x = x * e;
    return p;
  }
  friend EvenPolynomial operator*(const EvenElement& e, const EvenPolynomial& a) {
    EvenPolynomial p = a;
    for (auto& x : p.c_) x = e * x;
    return p;
  }
  friend EvenPolynomial operator*(Scalar s, const EvenPolynomial& a) {
    EvenPolynomial p = a;
    for (auto& x : p.c_) x = s * x;
    return p;
  }

  EvenPolynomial derivative() const {
    EvenPolynomial d;
    for (size_t i = 1; i < c_.size(); ++i) d.c_.push_back(Scalar(static_cast<double>(i)) * c_[i]);
    return d;
  }

  // P(t + a) for real a.
  EvenPolynomial shifted(double a) const {
    EvenPolynomial out;
    out.c_.assign(c_.size(), EvenElement());
    // Horner from the top: out = out * (t + a) + c_k.
    for (int k = static_cast<int>(c_.size()) - 1; k >= 0; --k) {
      // multiply by (t + a): shift up and add a * out
      for (int i = static_cast<int>(out.c_.size()) - 1; i >= 1; --i)
        out.c_[i] = out.c_[i - 1] + Scalar(a) * out.c_[i];
      if (!out.c_.empty()) out.c_[0] = Scalar(a) * out.c_[0];
      out.c_[0] += c_[k];
    }
    return out;
  }

  // Evaluation at a central (complex) scalar.
  EvenElement operator()(Scalar z) const {
    EvenElement r;
    for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) r = z * r + c_[i];
    return r;
  }

 private:
  std::vector<EvenElement> c_;
};

// Left evaluation sum_i h^i c_i: the root test for left factors,
// C = (t - h) Q  iff  left_evaluate(C, h) = 0.
inline EvenElement left_evaluate(const EvenPolynomial& p, const EvenElement& h) {
  EvenElement r;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) r = h * r + p[i];
  return r;
}

// Right evaluation sum_i c_i h^i: the root test for right factors,
// C = Q (t - h)  iff  right_evaluate(C, h) = 0.
inline EvenElement right_evaluate(const EvenPolynomial& p, const EvenElement& h) {
  EvenElement r;
  for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i) r = r * h + p[i];
  return r;
}

// Coefficient-wise reversion: the reverse polynomial C-bar.
inline EvenPolynomial reverse_coeffs(const EvenPolynomial& p) {
  std::vector<EvenElement> c;
  c.reserve(p.size());
  for (size_t i = 0; i < p.size(); ++i) c.push_back(reverse(p[i]));
  return EvenPolynomial(std::move(c));
}

inline EvenPolynomial conj_coeffs(const EvenPolynomial& p) {
  std::vector<EvenElement> c;
  c.reserve(p.size());
  for (size_t i = 0; i < p.size(); ++i) c.push_back(conj(p[i]));
  return EvenPolynomial(std::move(c));
}

enum class DivisorSide { Left, Right };

struct DivisionResult {
  EvenPolynomial quotient;
  EvenPolynomial remainder;
};

// Euclidean division by P. With side == Right: C = Q P + R; with
// side == Left: C = P Q + R. deg R < deg P. Requires the leading
// coefficient of P to be invertible.
inline DivisionResult divide(const EvenPolynomial& C, const EvenPolynomial& P,
                             DivisorSide side) {
  int n = P.degree();
  if (n < 0) throw Error(Errc::BadInput, "division by the zero polynomial");
  EvenElement lead_inv;
  if (!try_inverse(P[n], lead_inv))
    throw Error(Errc::NonInvertibleLeadingCoefficient,
                "leading coefficient of the divisor is not invertible");

  std::vector<EvenElement> rem(C.coeffs());
  int m = C.degree();
  if (m < n) return {EvenPolynomial{}, C};
  std::vector<EvenElement> quot(m - n + 1, EvenElement());
  for (int k = m - n; k >= 0; --k) {
    EvenElement q = (side == DivisorSide::Right) ? rem[k + n] * lead_inv
                                                 : lead_inv * rem[k + n];
    quot[k] = q;
    for (int j = 0; j <= n; ++j) {
      EvenElement sub = (side == DivisorSide::Right) ? q * P[j] : P[j] * q;
      rem[k + j] -= sub;
    }
  }
  rem.resize(std::max(n, 0));
  return {EvenPolynomial(std::move(quot)), EvenPolynomial(std::move(rem))};
}

// Division with the divisor acting from the right: C = Q P + R.
inline DivisionResult divide_left(const EvenPolynomial& C, const EvenPolynomial& P) {
  return divide(C, P, DivisorSide::Right);
}

// The norm polynomial C * reverse(C). Throws NotSpinor unless every
// coefficient of the product is a real scalar (within tol, relative to the
// squared coefficient scale of C) and reverse(C) * C agrees with it: both
// orders must coincide for the norm to be central.
inline RealPolynomial norm_poly(const EvenPolynomial& C, double tol = 1e-9) {
  EvenPolynomial rev = reverse_coeffs(C);
  EvenPolynomial N = C * rev;
  EvenPolynomial M = rev * C;
  double scale = std::max(1e-300, C.max_coeff_norm());
  scale = scale * scale * std::max<double>(1, C.size());
  RealPolynomial out;
  out.c.reserve(N.size());
  for (size_t i = 0; i < N.size(); ++i) {
    Scalar s0 = scalar_part(N[i]);
    double resid = frob(N[i] - EvenElement(Scalar(s0.real())));
    if (i < M.size()) resid = std::max(resid, frob(N[i] - M[i]));
    if (resid > tol * scale)
      throw Error(Errc::NotSpinor, "norm polynomial has non-real-scalar coefficients");
    out.c.push_back(s0.real());
  }
  out.trim(tol * scale);
  return out;
}

// True iff C * reverse(C) has real scalar coefficients.
inline bool is_real(const EvenPolynomial& p, double tol = kDefaultTol) {
  double im = 0, scale = 1e-300;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (const auto& w : p[i].wire()) {
      im = std::max(im, std::abs(w.imag()));
      scale = std::max(scale, std::abs(w));
    }
  }
  return im <= tol * (1.0 + scale);
}

inline bool is_spinor_poly(const EvenPolynomial& C, double tol = 1e-9) {
  try {
    norm_poly(C, tol);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace spinfact
