// A guided tour of the library: factor a motion polynomial, repair one that
// has no linear factors, and read off the axes of an algebraic four-bar
// linkage.  Every number printed here is computed, not hard-coded.
#include <iostream>

#include "spinfact/cofactor.hpp"
#include "spinfact/fourbar.hpp"
#include "spinfact/json_io.hpp"

using namespace spinfact;

namespace {

void banner(const char* title) {
  std::cout << "\n== " << title << " ==\n";
}

}  // namespace

int main() {
  // ---- 1. A polynomial that factors directly -------------------------------
  // (t - h1)(t - h2) expanded back out; the factorizer recovers a chain.
  banner("factoring a generic quadratic");
  Rng rng(42);
  EvenElement h1 = rng.spinor();
  EvenElement h2 = rng.spinor();
  EvenPolynomial C = EvenPolynomial::linear(h1) * EvenPolynomial::linear(h2);
  std::cout << "C(t) = " << io::pretty(C) << "\n";

  FactorizeResult direct = factorize_all(C);
  std::cout << io::pretty(direct);

  // ---- 2. A polynomial with no linear factor at all ------------------------
  // t^2 + eps3: its norm polynomial (t^2-1)(t^2+1) has simple real roots, yet
  // both the geometric and the algebraic construction refuse every root pair.
  banner("a polynomial with no linear factors");
  EvenPolynomial V({EvenElement::from_four_quat({{}, {}, {}, {Scalar(1)}}),
                    EvenElement(Scalar(0)), EvenElement(Scalar(1))});
  std::cout << "V(t) = " << io::pretty(V) << "\n";
  std::cout << "norm(V) = " << io::pretty(norm_poly(V)) << "\n";
  std::cout << io::pretty(factorize_all(V));

  // ---- 3. Repair by multiplication ------------------------------------------
  // A real cofactor R(t) (the norm of a generic linear spinor H = t - e^f)
  // makes V R factor completely.  The extra roots are spurious: they come from
  // R, not from the motion V represents.
  banner("repairing it with a real cofactor");
  RealCofactorResult fix = real_cofactor(V, {.seed = 7});
  std::cout << "R(t) = " << io::pretty(fix.real_cofactor) << "\n";
  std::cout << "V R = " << io::pretty(fix.factorization, Side::Left);

  EvenPolynomial target = V * EvenPolynomial::from_real(fix.real_cofactor);
  std::cout << "re-expansion residual: "
            << verify_factorization(target, fix.factorization, Side::Left) << "\n";

  // ---- 4. The algebraic four-bar ---------------------------------------------
  // Two quadrics and the null quadric meet in eight points; annihilator
  // sharing splits them into the two ruling families, and the wedges of the
  // annihilators are the four revolute axes of the linkage.
  banner("axes of the built-in four-bar");
  FourBarReport fb = fourbar_demo(fourbar_system());
  std::cout << io::pretty(fb);

  return 0;
}
