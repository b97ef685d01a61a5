// Polynomial layer tests: one-sided division, evaluation/remainder
// identities, the central-multiplier evaluation rule, norm polynomials.

#include "spinfact/polynomial.hpp"

#include <gtest/gtest.h>

#include "spinfact/random.hpp"

using namespace spinfact;

namespace {

EvenPolynomial random_even_poly(Rng& rng, int deg) {
  std::vector<EvenElement> c;
  for (int i = 0; i <= deg; ++i) c.push_back(rng.even());
  return EvenPolynomial(std::move(c));
}

// Monic polynomial that factors by construction: product of t - u_i v_i with
// real vectors u_i, v_i. Its norm is automatically a real polynomial.
EvenPolynomial random_spinor_poly(Rng& rng, int deg) {
  EvenPolynomial p = EvenPolynomial::constant(EvenElement(Scalar(1)));
  for (int i = 0; i < deg; ++i) p = p * EvenPolynomial::linear(rng.spinor());
  return p;
}

double poly_dist(const EvenPolynomial& a, const EvenPolynomial& b) {
  EvenPolynomial d = a - b;
  double s = 0;
  for (size_t i = 0; i < d.size(); ++i) s = std::max(s, frob(d[i]));
  return s;
}

}  // namespace

TEST(Division, RightDivisorReconstructs) {
  Rng rng(101);
  for (int t = 0; t < 100; ++t) {
    EvenPolynomial C = random_even_poly(rng, 4);
    EvenPolynomial P = random_spinor_poly(rng, 2);
    auto [Q, R] = divide(C, P, DivisorSide::Right);
    EXPECT_LT(R.degree(), P.degree());
    double scale = std::max(1.0, C.max_coeff_norm());
    EXPECT_LE(poly_dist(Q * P + R, C), 1e-10 * scale);
  }
}

TEST(Division, LeftDivisorReconstructs) {
  Rng rng(103);
  for (int t = 0; t < 100; ++t) {
    EvenPolynomial C = random_even_poly(rng, 4);
    EvenPolynomial P = random_spinor_poly(rng, 2);
    auto [Q, R] = divide(C, P, DivisorSide::Left);
    EXPECT_LT(R.degree(), P.degree());
    double scale = std::max(1.0, C.max_coeff_norm());
    EXPECT_LE(poly_dist(P * Q + R, C), 1e-10 * scale);
  }
}

TEST(Division, RemainderIsOneSidedEvaluation) {
  Rng rng(107);
  for (int t = 0; t < 50; ++t) {
    EvenPolynomial C = random_even_poly(rng, 3);
    EvenElement h = rng.spinor();
    EvenPolynomial lin = EvenPolynomial::linear(h);
    auto right = divide(C, lin, DivisorSide::Right);  // C = Q (t-h) + R
    auto left = divide(C, lin, DivisorSide::Left);    // C = (t-h) Q + R
    ASSERT_EQ(right.remainder.degree(), 0);
    ASSERT_EQ(left.remainder.degree(), 0);
    EXPECT_LT(frob(right.remainder[0] - right_evaluate(C, h)), 1e-9);
    EXPECT_LT(frob(left.remainder[0] - left_evaluate(C, h)), 1e-9);
  }
}

TEST(Division, DegreeEdgeCases) {
  Rng rng(109);
  EvenPolynomial C = random_even_poly(rng, 1);
  EvenPolynomial P = random_spinor_poly(rng, 3);
  auto [Q, R] = divide(C, P, DivisorSide::Right);
  EXPECT_EQ(Q.degree(), -1);
  EXPECT_LE(poly_dist(R, C), 0.0);
  EXPECT_THROW(divide(C, EvenPolynomial{}, DivisorSide::Right), Error);
}

TEST(Division, NonInvertibleLeadThrows) {
  Rng rng(113);
  EvenPolynomial C = random_even_poly(rng, 3);
  // eps1 is nilpotent, so t*eps1 + 1 has a non-invertible leading coefficient.
  EvenPolynomial P({EvenElement(Scalar(1)), EvenElement::unchecked(eps1)});
  try {
    divide(C, P, DivisorSide::Right);
    FAIL() << "expected NonInvertibleLeadingCoefficient";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NonInvertibleLeadingCoefficient);
  }
}

TEST(Evaluation, CentralMultiplierRule) {
  // For a real polynomial M (central coefficients):
  //   left_evaluate(Q M, h)  = M(h) * left_evaluate(Q, h)
  //   right_evaluate(Q M, h) = right_evaluate(Q, h) * M(h).
  Rng rng(127);
  for (int t = 0; t < 50; ++t) {
    EvenPolynomial Q = random_even_poly(rng, 3);
    RealPolynomial M{{rng.uniform(), rng.uniform(), 1.0}};
    EvenPolynomial QM = Q * EvenPolynomial::from_real(M);
    EvenElement h = rng.even();
    EvenElement Mh = EvenPolynomial::from_real(M)(Scalar(0));  // placeholder
    // Evaluate M at h: sum m_j h^j.
    EvenElement acc;
    for (int j = static_cast<int>(M.c.size()) - 1; j >= 0; --j)
      acc = h * acc + EvenElement(Scalar(M.c[j]));
    Mh = acc;
    double scale = std::max(1.0, Q.max_coeff_norm() * frob(Mh));
    EXPECT_LE(frob(left_evaluate(QM, h) - Mh * left_evaluate(Q, h)), 1e-9 * scale);
    EXPECT_LE(frob(right_evaluate(QM, h) - right_evaluate(Q, h) * Mh), 1e-9 * scale);
  }
}

TEST(Evaluation, ShiftMatchesScalarEvaluation) {
  Rng rng(131);
  for (int t = 0; t < 25; ++t) {
    EvenPolynomial P = random_even_poly(rng, 4);
    double a = rng.uniform(-2, 2);
    EvenPolynomial Ps = P.shifted(a);
    Scalar z = rng.complex_uniform();
    EXPECT_LT(dist(Ps(z), P(z + a)), 1e-10 * std::max(1.0, P.max_coeff_norm()));
  }
}

TEST(NormPoly, SpinorPolynomialsHaveRealNorm) {
  Rng rng(137);
  for (int t = 0; t < 25; ++t) {
    EvenPolynomial C = random_spinor_poly(rng, 3);
    RealPolynomial N = norm_poly(C);
    EXPECT_EQ(N.degree(), 6);
    EXPECT_NEAR(N.c.back(), 1.0, 1e-9);  // monic factors give a monic norm
  }
}

TEST(NormPoly, Multiplicativity) {
  Rng rng(139);
  for (int t = 0; t < 25; ++t) {
    EvenPolynomial A = random_spinor_poly(rng, 2);
    EvenPolynomial B = random_spinor_poly(rng, 2);
    RealPolynomial nab = norm_poly(A * B);
    RealPolynomial prod = norm_poly(A) * norm_poly(B);
    ASSERT_EQ(nab.degree(), prod.degree());
    double scale = std::max(1.0, std::max(nab.max_abs(), prod.max_abs()));
    for (size_t i = 0; i < nab.c.size(); ++i)
      EXPECT_LE(std::abs(nab.c[i] - prod.c[i]), 1e-9 * scale);
  }
}

TEST(NormPoly, GenericPolynomialIsRejected) {
  Rng rng(149);
  EvenPolynomial C = random_even_poly(rng, 2);
  try {
    norm_poly(C);
    FAIL() << "expected NotSpinor";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::NotSpinor);
  }
}

// Frozen oracle: C = t^2 + 1 + eps1 (b t i + a j) has norm (t^2+1)^2
// independent of a and b (the eps1 terms square to zero).
TEST(NormPoly, RotorTranslationExample) {
  const double a = 2.0, b = 3.0;
  EvenElement c0 = EvenElement::unchecked(Multivector::scalar(1.0) + a * (eps1 * qunit_j));
  EvenElement c1 = EvenElement::unchecked(b * (eps1 * qunit_i));
  EvenElement c2(Scalar(1));
  EvenPolynomial C({c0, c1, c2});
  RealPolynomial N = norm_poly(C, 1e-12);
  ASSERT_EQ(N.degree(), 4);
  const double want[5] = {1, 0, 2, 0, 1};
  for (int i = 0; i <= 4; ++i) EXPECT_NEAR(N.c[i], want[i], 1e-12);
}

// Frozen oracle: C = t^2 + eps3 has norm t^4 - 1, and neither real quadratic
// factor of the norm divides C (remainders eps3 -+ 1).
TEST(NormPoly, NonFactorizableQuadraticExample) {
  EvenPolynomial C({EvenElement::unchecked(eps3), EvenElement(), EvenElement(Scalar(1))});
  RealPolynomial N = norm_poly(C, 1e-12);
  ASSERT_EQ(N.degree(), 4);
  const double want[5] = {-1, 0, 0, 0, 1};
  for (int i = 0; i <= 4; ++i) EXPECT_NEAR(N.c[i], want[i], 1e-12);

  auto rp = divide(C, EvenPolynomial::from_real(quadratic(0.0, 1.0)), DivisorSide::Right);
  EXPECT_LT(frob(rp.remainder[0] -
                 EvenElement::unchecked(eps3 - Multivector::scalar(1.0))),
            1e-13);
  auto rm = divide(C, EvenPolynomial::from_real(quadratic(0.0, -1.0)), DivisorSide::Right);
  EXPECT_LT(frob(rm.remainder[0] -
                 EvenElement::unchecked(eps3 + Multivector::scalar(1.0))),
            1e-13);
}
