#pragma once

// Seeded random generators for algebra elements. Every stochastic routine in
// the library takes an explicit seed so runs are reproducible; sub_seed()
// derives independent streams (splitmix64 step) for nested components.

#include <cstdint>
#include <random>

#include "cga.hpp"

namespace spinfact {

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed), eng_(derive()) {}

  // Independent seed stream for nested components.
  uint64_t sub_seed() { return splitmix64(state_); }

  double uniform(double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }

  Scalar complex_uniform() { return {uniform(), uniform()}; }

  Quaternion quat(bool complexified = true) {
    auto g = [&]() -> Scalar { return complexified ? complex_uniform() : Scalar(uniform()); };
    return {g(), g(), g(), g()};
  }

  CgaVector vector(bool complexified = false) {
    auto g = [&]() -> Scalar { return complexified ? complex_uniform() : Scalar(uniform()); };
    return {g(), g(), g(), g(), g()};
  }

  // Conformal embedding of a random finite point: e_o + x + (x.x/2) e_inf.
  CgaVector point(double box = 1.0) {
    double x1 = uniform(-box, box), x2 = uniform(-box, box), x3 = uniform(-box, box);
    return {Scalar(1), Scalar(x1), Scalar(x2), Scalar(x3),
            Scalar(0.5 * (x1 * x1 + x2 * x2 + x3 * x3))};
  }

  Multivector multivector(bool complexified = true) {
    Multivector m;
    for (unsigned i = 0; i < 32; ++i)
      m[i] = complexified ? complex_uniform() : Scalar(uniform());
    return m;
  }

  EvenElement even(bool complexified = true) {
    return EvenElement::unchecked(even_part(multivector(complexified)));
  }

  // Random invertible rotor-like element: the product of two real grade-1
  // vectors (always satisfies the spinor conditions; q q-bar = u^2 v^2).
  EvenElement spinor() {
    for (int tries = 0; tries < 64; ++tries) {
      CgaVector u = vector(false), v = vector(false);
      EvenElement q = EvenElement::unchecked(u.mv() * v.mv());
      Scalar n = scalar_part(q * reverse(q));
      if (std::abs(n) > 0.05 && frob(q) > 0.1) return q;
    }
    throw Error(Errc::InternalCaseFailure, "failed to sample an invertible rotor");
  }

 private:
  uint64_t derive() { return splitmix64(state_); }
  uint64_t state_;
  std::mt19937_64 eng_;
};

}  // namespace spinfact
