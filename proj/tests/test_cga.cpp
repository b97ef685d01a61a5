// Core algebra tests: generator metric, null basis identities, the
// eps-multiplication table, the four-quaternion representation, wire format
// round trips, Study/null predicates, versor sandwiches and inverses.

#include "spinfact/cga.hpp"

#include <gtest/gtest.h>

#include "spinfact/random.hpp"

using namespace spinfact;

namespace {

const Scalar I(0, 1);

Multivector mv(const EvenElement& e) { return e.mv(); }

void expect_near_mv(const Multivector& a, const Multivector& b, double tol = 1e-13) {
  EXPECT_LE(dist(a, b), tol) << "multivectors differ";
}

}  // namespace

TEST(Blades, GeneratorSquaresAndAnticommutation) {
  const Multivector gens[5] = {e1, e2, e3, e_plus, e_minus};
  const double sq[5] = {1, 1, 1, 1, -1};
  for (int i = 0; i < 5; ++i) {
    expect_near_mv(gens[i] * gens[i], Multivector::scalar(sq[i]));
    for (int j = i + 1; j < 5; ++j)
      expect_near_mv(gens[i] * gens[j] + gens[j] * gens[i], Multivector{});
  }
}

TEST(Blades, AssociativityFuzz) {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    Multivector a = rng.multivector(), b = rng.multivector(), c = rng.multivector();
    double scale = frob(a) * frob(b) * frob(c);
    EXPECT_LE(dist((a * b) * c, a * (b * c)), 1e-10 * scale);
  }
}

TEST(Blades, ReverseAntiAutomorphism) {
  Rng rng(11);
  for (int t = 0; t < 50; ++t) {
    Multivector a = rng.multivector(), b = rng.multivector();
    double scale = frob(a) * frob(b);
    EXPECT_LE(dist(reverse(a * b), reverse(b) * reverse(a)), 1e-11 * scale);
    expect_near_mv(reverse(reverse(a)), a);
  }
}

TEST(NullBasis, DefiningRelations) {
  expect_near_mv(e_o * e_o, Multivector{});
  expect_near_mv(e_inf * e_inf, Multivector{});
  // e_o . e_inf = -1: symmetric part of the product is scalar -1.
  expect_near_mv(0.5 * (e_o * e_inf + e_inf * e_o), Multivector::scalar(-1.0));
  expect_near_mv(e_o * e_inf, Multivector::scalar(-1.0) - e_plus * e_minus);
  expect_near_mv(e_inf * e_o, Multivector::scalar(-1.0) + e_plus * e_minus);
  // Recover the orthonormal pair from the null pair.
  expect_near_mv(e_o + 0.5 * e_inf, e_minus);
  expect_near_mv(0.5 * e_inf - e_o, e_plus);
  // eps3 = e_inf e_o + 1 = e+ e-, pure grade 2.
  expect_near_mv(eps3, e_inf * e_o + Multivector::scalar(1.0));
  expect_near_mv(eps3, grade_part(eps3, 2));
}

TEST(Quaternions, EmbeddingIsIsomorphic) {
  expect_near_mv(qunit_i * qunit_i, Multivector::scalar(-1.0));
  expect_near_mv(qunit_j * qunit_j, Multivector::scalar(-1.0));
  expect_near_mv(qunit_k * qunit_k, Multivector::scalar(-1.0));
  expect_near_mv(qunit_i * qunit_j, qunit_k);
  expect_near_mv(qunit_j * qunit_k, qunit_i);
  expect_near_mv(qunit_k * qunit_i, qunit_j);
  expect_near_mv(qunit_j * qunit_i, -qunit_k);

  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    Quaternion a = rng.quat(), b = rng.quat();
    expect_near_mv(quat_mv(a * b), quat_mv(a) * quat_mv(b), 1e-12);
    expect_near_mv(quat_mv(qconj(a)), reverse(quat_mv(a)), 1e-13);
    EXPECT_LT(std::abs(qnorm(a) - scalar_part(quat_mv(a) * reverse(quat_mv(a)))), 1e-12);
    EXPECT_LT(std::abs(S(a, b) - (qnorm(a + b) - qnorm(a) - qnorm(b))), 1e-12);
  }
}

TEST(Quaternions, VectorialMapToEuclideanVectors) {
  // (x1 i + x2 j + x3 k) * e123 = x1 e1 + x2 e2 + x3 e3, and back.
  expect_near_mv(qunit_i * e123, e1);
  expect_near_mv(qunit_j * e123, e2);
  expect_near_mv(qunit_k * e123, e3);
  expect_near_mv(e123 * e1, -qunit_i);
  expect_near_mv(e123 * e2, -qunit_j);
  expect_near_mv(e123 * e3, -qunit_k);
}

TEST(EpsTable, Products) {
  const Multivector one = Multivector::scalar(1.0);
  expect_near_mv(eps1 * eps1, Multivector{});
  expect_near_mv(eps2 * eps2, Multivector{});
  expect_near_mv(eps3 * eps3, one);
  expect_near_mv(eps1 * eps2, eps3 - one);
  expect_near_mv(eps2 * eps1, -eps3 - one);
  expect_near_mv(eps1 * eps3, eps1);
  expect_near_mv(eps3 * eps1, -eps1);
  expect_near_mv(eps2 * eps3, -eps2);
  expect_near_mv(eps3 * eps2, eps2);
}

TEST(EpsTable, EpsCommuteWithQuaternionUnits) {
  const Multivector epss[3] = {eps1, eps2, eps3};
  const Multivector units[3] = {qunit_i, qunit_j, qunit_k};
  for (const auto& e : epss)
    for (const auto& u : units) expect_near_mv(e * u, u * e);
}

TEST(EpsTable, ActionOnOddGenerators) {
  // E5 denotes the geometric product e_o e1 e2 e3 e_inf (mixed grade 3+5).
  const Multivector E5 = e_o * e123 * e_inf;
  expect_near_mv(e_o * eps1, E5);
  expect_near_mv(e_o * eps2, Multivector{});
  expect_near_mv(e_o * eps3, -e_o);
  expect_near_mv(e123 * eps1, -e_inf);
  expect_near_mv(e123 * eps2, -e_o);
  expect_near_mv(e123 * eps3, E5 - e123);
  expect_near_mv(e_inf * eps1, Multivector{});
  expect_near_mv(e_inf * eps2, 2.0 * e123 - E5);
  expect_near_mv(e_inf * eps3, e_inf);
}

TEST(FourQuat, RoundTrip) {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    FourQuat f = {rng.quat(), rng.quat(), rng.quat(), rng.quat()};
    EvenElement e = EvenElement::from_four_quat(f);
    // Definition check: e == q0 + eps1 q1 + eps2 q2 + eps3 q3.
    Multivector direct = quat_mv(f.q0) + eps1 * quat_mv(f.q1) + eps2 * quat_mv(f.q2) +
                         eps3 * quat_mv(f.q3);
    expect_near_mv(mv(e), direct, 1e-12);
    FourQuat g = e.four_quat();
    EXPECT_LT((g.q0 - f.q0).abs() + (g.q1 - f.q1).abs() + (g.q2 - f.q2).abs() +
                  (g.q3 - f.q3).abs(),
              1e-12);
  }
}

TEST(FourQuat, ReversionRule) {
  // reverse(q0 + eps1 q1 + eps2 q2 + eps3 q3)
  //   = conj(q0) + eps1 conj(q1) + eps2 conj(q2) - eps3 conj(q3).
  Rng rng(19);
  for (int t = 0; t < 25; ++t) {
    FourQuat f = {rng.quat(), rng.quat(), rng.quat(), rng.quat()};
    FourQuat r = reverse(EvenElement::from_four_quat(f)).four_quat();
    EXPECT_LT((r.q0 - qconj(f.q0)).abs(), 1e-12);
    EXPECT_LT((r.q1 - qconj(f.q1)).abs(), 1e-12);
    EXPECT_LT((r.q2 - qconj(f.q2)).abs(), 1e-12);
    EXPECT_LT((r.q3 + qconj(f.q3)).abs(), 1e-12);
  }
}

TEST(FourQuat, NormExpansion) {
  // q qbar = [N(q0) - N(q3) - S(q1,q2)]
  //        + eps1 S(q1, q0-q3) + eps2 S(q2, q0+q3)
  //        + 2 eps3 (Vect(q1 conj(q2)) - Vect(q0 conj(q3))).
  Rng rng(23);
  for (int t = 0; t < 50; ++t) {
    FourQuat f = {rng.quat(), rng.quat(), rng.quat(), rng.quat()};
    EvenElement q = EvenElement::from_four_quat(f);
    Multivector lhs = mv(q * reverse(q));
    Scalar g0 = qnorm(f.q0) - qnorm(f.q3) - S(f.q1, f.q2);
    Quaternion v = vect(f.q1 * qconj(f.q2)) - vect(f.q0 * qconj(f.q3));
    Multivector rhs = Multivector::scalar(g0) +
                      S(f.q1, f.q0 - f.q3) * eps1 +
                      S(f.q2, f.q0 + f.q3) * eps2 +
                      2.0 * (eps3 * quat_mv(v));
    expect_near_mv(lhs, rhs, 1e-11);
  }
}

TEST(Wire, BladesArePureGradeAndRoundTrip) {
  for (int k = 0; k < 16; ++k) {
    std::array<Scalar, 16> w{};
    w[k] = 1.0;
    EvenElement e = EvenElement::from_wire(w);
    // Pure grade: exactly one grade contributes.
    int grades = 0;
    for (int g = 0; g <= 5; ++g)
      if (frob(grade_part(mv(e), g)) > 1e-13) ++grades;
    EXPECT_EQ(grades, 1) << "wire slot " << k;
    auto back = e.wire();
    for (int j = 0; j < 16; ++j)
      EXPECT_LT(std::abs(back[j] - w[j]), 1e-13) << "slot " << k << " -> " << j;
  }
  Rng rng(29);
  for (int t = 0; t < 50; ++t) {
    EvenElement e = rng.even();
    EvenElement f = EvenElement::from_wire(e.wire());
    EXPECT_LT(dist(e, f), 1e-12);
  }
}

TEST(Wire, DistinguishedSlots) {
  // Slot 10 is e_o ^ e_inf = -e+ e-; eps3 therefore serializes as -1 there.
  EvenElement t3 = EvenElement::unchecked(eps3);
  auto w = t3.wire();
  for (int j = 0; j < 16; ++j) {
    if (j == 10)
      EXPECT_LT(std::abs(w[j] + 1.0), 1e-13);
    else
      EXPECT_LT(std::abs(w[j]), 1e-13);
  }
}

TEST(EvenElement, CheckedConstructionRejectsOddContent) {
  EXPECT_THROW((void)EvenElement(e1), Error);
  EXPECT_NO_THROW((void)EvenElement(eps1 + Multivector::scalar(2.0)));
}

TEST(CgaVector, RoundTripAndDot) {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    CgaVector a = rng.vector(true), b = rng.vector(true);
    CgaVector a2 = CgaVector::from_mv(a.mv());
    EXPECT_LT((a - a2).norm(), 1e-13);
    // dot matches the grade-0 part of the geometric product.
    EXPECT_LT(std::abs(dot(a, b) - scalar_part(a.mv() * b.mv())), 1e-12);
    // wedge matches the antisymmetrized product and is grade 2.
    Multivector w = wedge(a, b);
    expect_near_mv(w, grade_part(w, 2), 1e-12);
  }
  // Conformal point embedding is null.
  for (int t = 0; t < 20; ++t) {
    CgaVector p = rng.point(5.0);
    EXPECT_TRUE(is_point(p, 1e-12));
  }
  CgaVector vo{1, 0, 0, 0, 0}, vi{0, 0, 0, 0, 1};
  EXPECT_LT(std::abs(dot(vo, vi) + 1.0), 1e-15);
  EXPECT_LT(std::abs(dot(vo, vo)), 1e-15);
}

TEST(Predicates, StudyAndNull) {
  // 1 + eps1 i: rotor-like (q qbar = 1), not null.
  EvenElement a = EvenElement::unchecked(Multivector::scalar(1.0) + eps1 * qunit_i);
  EXPECT_TRUE(is_study(a));
  EXPECT_FALSE(is_null(a));
  // eps2: Study and null (eps2^2 = 0) although N(q2) = 1.
  EvenElement b = EvenElement::unchecked(eps2);
  EXPECT_TRUE(is_study(b));
  EXPECT_TRUE(is_null(b));
  // Product of two real vectors: Study, generically not null.
  Rng rng(37);
  for (int t = 0; t < 25; ++t) {
    EvenElement q = rng.spinor();
    EXPECT_TRUE(is_study(q, 1e-9));
    EXPECT_FALSE(is_null(q, 1e-9));
  }
  // Generic even elements are not Study.
  EXPECT_FALSE(is_study(rng.even()));
}

TEST(Sandwich, TranslatorMovesPoints) {
  // T = 1 - (1/2) t e_inf with t = e1 translates by e1.
  Multivector T = Multivector::scalar(1.0) - 0.5 * (e1 * e_inf);
  EvenElement q = EvenElement::unchecked(T);
  CgaVector o{1, 0, 0, 0, 0};  // e_o, the origin
  CgaVector img = sandwich(q, o);
  CgaVector want{1, 1, 0, 0, 0.5};  // point at (1,0,0)
  EXPECT_LT((img - want).norm(), 1e-13);
}

TEST(Sandwich, RotorRotates) {
  // R = cos(a/2) - sin(a/2) e12 rotates e1 by angle a in the e1e2 plane.
  double ang = 0.7;
  Multivector R = Multivector::scalar(std::cos(ang / 2)) - std::sin(ang / 2) * (e1 * e2);
  EvenElement q = EvenElement::unchecked(R);
  CgaVector x{0, 1, 0, 0, 0};
  CgaVector img = sandwich(q, x);
  CgaVector want{0, std::cos(ang), std::sin(ang), 0, 0};
  EXPECT_LT((img - want).norm(), 1e-13);
}

TEST(Sandwich, RejectsNonVersorAction) {
  Rng rng(41);
  EvenElement q = rng.even();  // generic even element: sandwich leaves grade residue
  CgaVector x = rng.point();
  EXPECT_THROW(sandwich(q, x), Error);
}

TEST(Inverse, SpinorFastPathAndDensePath) {
  Rng rng(43);
  for (int t = 0; t < 25; ++t) {
    EvenElement q = rng.spinor();
    EvenElement qi = inverse(q);
    EXPECT_LT(frob(q * qi - EvenElement(Scalar(1))), 1e-10);
    EXPECT_LT(frob(qi * q - EvenElement(Scalar(1))), 1e-10);
  }
  for (int t = 0; t < 25; ++t) {
    EvenElement q = rng.even();  // generically invertible but not Study
    EvenElement qi;
    ASSERT_TRUE(try_inverse(q, qi));
    EXPECT_LT(frob(q * qi - EvenElement(Scalar(1))), 1e-8 * std::max(1.0, frob(q) * frob(qi)));
    EXPECT_LT(frob(qi * q - EvenElement(Scalar(1))), 1e-8 * std::max(1.0, frob(q) * frob(qi)));
  }
  // eps1 is nilpotent, hence singular.
  EvenElement sing = EvenElement::unchecked(eps1);
  EvenElement out;
  EXPECT_FALSE(try_inverse(sing, out));
  EXPECT_THROW(inverse(sing), Error);
}

TEST(Inverse, VectorInverse) {
  Rng rng(47);
  for (int t = 0; t < 20; ++t) {
    CgaVector v = rng.vector(false);
    if (std::abs(dot(v, v)) < 0.05) continue;
    CgaVector vi = inverse(v);
    expect_near_mv(v.mv() * vi.mv(), Multivector::scalar(1.0), 1e-12);
  }
  CgaVector null_vec{1, 0, 0, 0, 0};  // e_o
  EXPECT_THROW(inverse(null_vec), Error);
}

TEST(GradePart, MetricGrading) {
  // eps3 = e+ e- is pure grade 2 under the metric grading; eps1, eps2 carry
  // grades 2 and 4 (they mix e123 with a null vector).
  expect_near_mv(grade_part(eps3, 0), Multivector{});
  expect_near_mv(grade_part(eps3, 2), eps3);
  EXPECT_GT(frob(grade_part(eps1, 4)), 0.9);
  EXPECT_LT(frob(grade_part(eps1, 0)), 1e-15);
}
