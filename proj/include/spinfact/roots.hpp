#pragma once

// Roots of real polynomials (Aberth-Ehrlich, simultaneous iteration), with
// clustering into multiple roots, conjugate-pair symmetrization, and the
// enumeration of quadratic factorizations of an even-degree real polynomial
// into monic quadratics with conjugate or paired-real roots.

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include "polynomial.hpp"

namespace spinfact {

struct Root {
  Scalar z;
  int multiplicity = 1;
  bool real = false;
};

struct RootSet {
  std::vector<Root> roots;  // conjugate-closed; sorted by (Re, Im)
  int total() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
  }
};

struct RootOptions {
  int max_iter = 200;
  double step_tol = 1e-14;
  double cluster_rel = 1e-6;  // cluster radius relative to root scale
};

namespace detail {

inline Scalar horner(const std::vector<Scalar>& c, Scalar z) {
  Scalar r = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) r = r * z + c[i];
  return r;
}

inline std::vector<Scalar> derive(const std::vector<Scalar>& c) {
  std::vector<Scalar> d;
  for (size_t i = 1; i < c.size(); ++i) d.push_back(static_cast<double>(i) * c[i]);
  return d;
}

}  // namespace detail

inline RootSet find_roots(const RealPolynomial& p_in, const RootOptions& opt = {}) {
  RealPolynomial p = p_in;
  p.trim(1e-12 * std::max(1.0, p.max_abs()));
  int n = p.degree();
  RootSet out;
  if (n <= 0) return out;

  // Monic complex coefficients.
  std::vector<Scalar> c(n + 1);
  for (int i = 0; i <= n; ++i) c[i] = p.c[i] / p.c[n];

  std::vector<Scalar> z(n);
  if (n == 1) {
    z[0] = -c[0];
  } else {
    // Aberth-Ehrlich from a staggered circle of radius 1 + max |c_i|.
    double radius = 0;
    for (int i = 0; i < n; ++i) radius = std::max(radius, std::abs(c[i]));
    radius = 1.0 + radius;
    for (int k = 0; k < n; ++k) {
      double ang = 2 * M_PI * k / n + 0.39;
      z[k] = radius * Scalar(std::cos(ang), std::sin(ang));
    }
    std::vector<Scalar> dc = detail::derive(c);
    // Noise floor of Horner evaluation at |z|: roots where |p(z)| falls below
    // it are as converged as double precision allows (multiple roots stall
    // the step criterion long before the step tolerance is reached).
    auto eval_noise = [&](double az) {
      double b = 0;
      for (int i = n; i >= 0; --i) b = b * az + std::abs(c[i]);
      return 40 * std::numeric_limits<double>::epsilon() * b;
    };
    bool converged = false;
    for (int it = 0; it < opt.max_iter && !converged; ++it) {
      converged = true;
      for (int k = 0; k < n; ++k) {
        Scalar pv = detail::horner(c, z[k]);
        if (std::abs(pv) <= eval_noise(std::abs(z[k]))) continue;
        Scalar dv = detail::horner(dc, z[k]);
        if (std::abs(dv) < 1e-300) {
          z[k] += Scalar(1e-6, 1e-6);
          converged = false;
          continue;
        }
        Scalar w = pv / dv;
        Scalar sum = 0;
        for (int j = 0; j < n; ++j) {
          if (j == k) continue;
          Scalar d = z[k] - z[j];
          if (std::abs(d) < 1e-300) d = Scalar(1e-300, 0);
          sum += Scalar(1) / d;
        }
        Scalar denom = Scalar(1) - w * sum;
        Scalar step = (std::abs(denom) < 1e-300) ? w : w / denom;
        z[k] -= step;
        if (std::abs(step) > opt.step_tol * (1.0 + std::abs(z[k]))) converged = false;
      }
    }
    if (!converged) throw Error(Errc::NoConvergence, "root iteration did not converge");
  }

  // Scale for clustering decisions.
  double scale = 1.0;
  for (const auto& zi : z) scale = std::max(scale, std::abs(zi));
  double cscale = 1.0;
  for (const auto& x : c) cscale = std::max(cscale, std::abs(x));

  // A root of multiplicity m scatters the iterates over a disc of radius
  // about eps^(1/m), so the right cluster radius is not known in advance:
  // try increasing radii until the clustered multiset reproduces the
  // coefficients under monic reconstruction.
  auto attempt = [&](double crad) -> std::vector<Root> {
    // Cluster; centroids cancel the symmetric splitting of a multiple root,
    // so they are much more accurate than the members.
    std::vector<bool> used(n, false);
    std::vector<Root> roots;
    for (int k = 0; k < n; ++k) {
      if (used[k]) continue;
      Scalar sum = z[k];
      int m = 1;
      used[k] = true;
      for (int j = k + 1; j < n; ++j) {
        if (!used[j] && std::abs(z[j] - z[k]) <= crad) {
          used[j] = true;
          sum += z[j];
          ++m;
        }
      }
      Scalar zc = sum / static_cast<double>(m);
      // Polish: Newton on the (m-1)-th derivative, which has a simple root.
      std::vector<Scalar> g = c;
      for (int d = 0; d < m - 1; ++d) g = detail::derive(g);
      std::vector<Scalar> dg = detail::derive(g);
      for (int it = 0; it < 3; ++it) {
        Scalar gv = detail::horner(g, zc), dgv = detail::horner(dg, zc);
        if (std::abs(dgv) < 1e-300) break;
        Scalar step = gv / dgv;
        if (std::abs(step) > 0.5 * (1 + std::abs(zc))) break;
        zc -= step;
      }
      roots.push_back({zc, m, false});
    }

    // Real coefficients: force tiny imaginary parts to zero and symmetrize
    // conjugate pairs.
    for (auto& r : roots) {
      if (std::abs(r.z.imag()) <= 100 * crad) {
        r.z = Scalar(r.z.real(), 0.0);
        r.real = true;
      }
    }
    for (size_t i = 0; i < roots.size(); ++i) {
      if (roots[i].real || roots[i].z.imag() < 0) continue;
      bool paired = false;
      for (size_t j = 0; j < roots.size(); ++j) {
        if (i == j || roots[j].real || roots[j].z.imag() > 0) continue;
        if (std::abs(std::conj(roots[j].z) - roots[i].z) <= 1e4 * crad &&
            roots[j].multiplicity == roots[i].multiplicity) {
          Scalar avg = 0.5 * (roots[i].z + std::conj(roots[j].z));
          roots[i].z = avg;
          roots[j].z = std::conj(avg);
          paired = true;
          break;
        }
      }
      if (!paired) throw Error(Errc::NoConvergence, "conjugate pairing failed");
    }

    std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) {
      if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
      return a.z.imag() < b.z.imag();
    });

    // Verify by monic reconstruction.
    std::vector<Scalar> rec = {Scalar(1)};
    for (const auto& r : roots)
      for (int m = 0; m < r.multiplicity; ++m) {
        std::vector<Scalar> nxt(rec.size() + 1, Scalar(0));
        for (size_t i = 0; i < rec.size(); ++i) {
          nxt[i + 1] += rec[i];
          nxt[i] -= r.z * rec[i];
        }
        rec = std::move(nxt);
      }
    for (int i = 0; i <= n; ++i)
      if (std::abs(rec[i] - c[i]) > 1e-6 * cscale * (1 + scale))
        throw Error(Errc::NoConvergence, "root verification failed");
    return roots;
  };

  Error last(Errc::NoConvergence, "unreachable");
  for (double crad = opt.cluster_rel * scale; crad <= 2e-3 * scale; crad *= 10) {
    try {
      out.roots = attempt(crad);
      return out;
    } catch (const Error& e) {
      last = e;
    }
  }
  throw last;
}

// ---- quadratic pairing ----

struct QuadraticFactor {
  double b = 0, c = 0;  // t^2 + b t + c
  Scalar z1, z2;        // z1 is the positive-imaginary member of a conjugate pair

  RealPolynomial poly() const { return quadratic(b, c); }
  bool conjugate_pair() const { return z1.imag() > 0; }
};

inline QuadraticFactor make_quadratic(Scalar z1, Scalar z2) {
  QuadraticFactor q;
  if (z1.imag() < z2.imag()) std::swap(z1, z2);
  q.z1 = z1;
  q.z2 = z2;
  q.b = -(z1 + z2).real();
  q.c = (z1 * z2).real();
  return q;
}

using PairingScheme = std::vector<QuadraticFactor>;

namespace detail {

inline void pair_real_roots(std::vector<int>& ids, const std::vector<Scalar>& vals,
                            PairingScheme& acc,
                            const PairingScheme& forced,
                            std::vector<PairingScheme>& out) {
  if (ids.empty()) {
    PairingScheme s = forced;
    s.insert(s.end(), acc.begin(), acc.end());
    std::sort(s.begin(), s.end(), [](const QuadraticFactor& a, const QuadraticFactor& b) {
      if (a.b != b.b) return a.b < b.b;
      return a.c < b.c;
    });
    out.push_back(std::move(s));
    return;
  }
  int first = ids[0];
  // Pair the first id with each distinct partner id; this enumerates every
  // perfect matching of the multiset exactly once.
  std::vector<int> tried;
  for (size_t j = 1; j < ids.size(); ++j) {
    int cand = ids[j];
    bool seen = false;
    for (int t : tried) seen = seen || (t == cand);
    if (seen) continue;
    tried.push_back(cand);
    std::vector<int> rest;
    bool skipped = false;
    for (size_t k = 1; k < ids.size(); ++k) {
      if (!skipped && ids[k] == cand && k == j) {
        skipped = true;
        continue;
      }
      rest.push_back(ids[k]);
    }
    acc.push_back(make_quadratic(vals[first], vals[cand]));
    pair_real_roots(rest, vals, acc, forced, out);
    acc.pop_back();
  }
}

}  // namespace detail

// All partitions of the roots into quadratics: conjugate roots must pair
// with their conjugates; real roots pair freely among themselves (a value
// may pair with itself when its multiplicity allows). Throws OddDegree when
// there is no pairing because the real-root count is odd.
inline std::vector<PairingScheme> enumerate_pairings(const RootSet& rs) {
  PairingScheme forced;
  std::vector<int> real_ids;
  std::vector<Scalar> vals;
  for (const auto& r : rs.roots) {
    if (r.real) {
      int id = static_cast<int>(vals.size());
      vals.push_back(r.z);
      for (int m = 0; m < r.multiplicity; ++m) real_ids.push_back(id);
    } else if (r.z.imag() > 0) {
      for (int m = 0; m < r.multiplicity; ++m)
        forced.push_back(make_quadratic(r.z, std::conj(r.z)));
    }
  }
  if (real_ids.size() % 2 != 0)
    throw Error(Errc::OddDegree, "odd number of real roots cannot pair into quadratics");
  std::vector<PairingScheme> out;
  PairingScheme acc;
  detail::pair_real_roots(real_ids, vals, acc, forced, out);
  return out;
}

// Distinct monic quadratic factors that can occur in any pairing scheme.
inline std::vector<QuadraticFactor> quadratic_factors(const RealPolynomial& p,
                                                      const RootOptions& opt = {}) {
  RootSet rs = find_roots(p, opt);
  auto schemes = enumerate_pairings(rs);
  std::vector<QuadraticFactor> out;
  double scale = 1.0;
  for (const auto& r : rs.roots) scale = std::max(scale, std::abs(r.z));
  auto seen = [&](const QuadraticFactor& q) {
    for (const auto& o : out)
      if (std::abs(o.b - q.b) <= 1e-8 * scale && std::abs(o.c - q.c) <= 1e-8 * scale * scale)
        return true;
    return false;
  };
  for (const auto& s : schemes)
    for (const auto& q : s)
      if (!seen(q)) out.push_back(q);
  return out;
}

}  // namespace spinfact
