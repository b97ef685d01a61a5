#pragma once

// Arithmetic for the conformal geometric algebra Cl(4,1) over complex scalars.
//
// Internal representation: bitmask-indexed blades over the orthonormal basis
// {e1, e2, e3, e+, e-} with e1^2 = e2^2 = e3^2 = e+^2 = +1 and e-^2 = -1.
// Bit i of a blade index says whether the i-th generator is present; ascending
// bit order is the canonical (positive) generator order.
//
// The null basis vectors
//     e_o = (e- - e+)/2,   e_inf = e- + e+
// satisfy e_o^2 = e_inf^2 = 0 and e_o . e_inf = -1 and are exposed as an I/O
// view: even elements serialize as 16 coefficients over pure-grade null-basis
// blades (see EvenElement::wire), and convert to/from the four-quaternion
// representation q0 + eps1*q1 + eps2*q2 + eps3*q3 with
//     eps1 = e123 e_inf,  eps2 = e123 e_o,  eps3 = e_inf e_o + 1 = e+ e-,
// where quaternion units embed as i = -e23, j = e13, k = -e12.

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace spinfact {

using Scalar = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;

// ======== errors ========

enum class Errc {
  ZeroElement,
  NotAVersorAction,
  OddResidue,
  NotSpinor,
  NonInvertibleLeadingCoefficient,
  NoConvergence,
  OddDegree,
  EmptyKernel,
  KernelTooLarge,
  ProbeAnnihilated,
  NowhereDefined,
  InternalCaseFailure,
  NullEvaluationDegenerate,
  DegenerateData,
  ExhaustedAttempts,
  PathFailure,
  WrongCount,
  InconsistentRulingGraph,
  NonRealAxis,
  BadInput,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ZeroElement: return "ZeroElement";
    case Errc::NotAVersorAction: return "NotAVersorAction";
    case Errc::OddResidue: return "OddResidue";
    case Errc::NotSpinor: return "NotSpinor";
    case Errc::NonInvertibleLeadingCoefficient: return "NonInvertibleLeadingCoefficient";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::OddDegree: return "OddDegree";
    case Errc::EmptyKernel: return "EmptyKernel";
    case Errc::KernelTooLarge: return "KernelTooLarge";
    case Errc::ProbeAnnihilated: return "ProbeAnnihilated";
    case Errc::NowhereDefined: return "NowhereDefined";
    case Errc::InternalCaseFailure: return "InternalCaseFailure";
    case Errc::NullEvaluationDegenerate: return "NullEvaluationDegenerate";
    case Errc::DegenerateData: return "DegenerateData";
    case Errc::ExhaustedAttempts: return "ExhaustedAttempts";
    case Errc::PathFailure: return "PathFailure";
    case Errc::WrongCount: return "WrongCount";
    case Errc::InconsistentRulingGraph: return "InconsistentRulingGraph";
    case Errc::NonRealAxis: return "NonRealAxis";
    case Errc::BadInput: return "BadInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// ======== blade product over the orthonormal basis ========

namespace detail {

inline constexpr int kGenerators = 5;
inline constexpr unsigned kBlades = 32;

// Metric square of generator i: e1,e2,e3,e+ -> +1, e- -> -1.
inline constexpr double generator_metric(int i) { return i == 4 ? -1.0 : 1.0; }

// Sign produced by sorting the concatenation of two ascending blades.
inline constexpr int reorder_sign(unsigned a, unsigned b) {
  a >>= 1;
  int swaps = 0;
  while (a != 0) {
    swaps += std::popcount(a & b);
    a >>= 1;
  }
  return (swaps & 1) ? -1 : 1;
}

struct BladeProduct {
  unsigned mask;
  double sign;
};

// basis_a * basis_b = sign * basis_(a XOR b), sign from reordering plus the
// metric of annihilated common generators.
inline constexpr BladeProduct blade_product(unsigned a, unsigned b) {
  double s = static_cast<double>(reorder_sign(a, b));
  unsigned common = a & b;
  for (int i = 0; i < kGenerators; ++i)
    if (common & (1u << i)) s *= generator_metric(i);
  return {a ^ b, s};
}

// Reversion sign on grade k: (-1)^(k(k-1)/2).
inline constexpr double reverse_sign(int k) { return ((k * (k - 1) / 2) % 2) ? -1.0 : 1.0; }

}  // namespace detail

// ======== multivector ========

class Multivector {
 public:
  Multivector() = default;

  static Multivector scalar(Scalar s) {
    Multivector m;
    m.c_[0] = s;
    return m;
  }
  static Multivector basis(unsigned mask, Scalar coeff = 1.0) {
    Multivector m;
    m.c_.at(mask) = coeff;
    return m;
  }

  Scalar& operator[](unsigned mask) { return c_[mask]; }
  const Scalar& operator[](unsigned mask) const { return c_[mask]; }

  Multivector& operator+=(const Multivector& o) {
    for (unsigned i = 0; i < detail::kBlades; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Multivector& operator-=(const Multivector& o) {
    for (unsigned i = 0; i < detail::kBlades; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Multivector& operator*=(Scalar s) {
    for (auto& x : c_) x *= s;
    return *this;
  }

  friend Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
  friend Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
  friend Multivector operator-(Multivector a) {
    for (auto& x : a.c_) x = -x;
    return a;
  }
  friend Multivector operator*(Multivector a, Scalar s) { return a *= s; }
  friend Multivector operator*(Scalar s, Multivector a) { return a *= s; }
  friend Multivector operator*(Multivector a, double s) { return a *= Scalar(s); }
  friend Multivector operator*(double s, Multivector a) { return a *= Scalar(s); }

  friend Multivector operator*(const Multivector& a, const Multivector& b) {
    Multivector out;
    for (unsigned i = 0; i < detail::kBlades; ++i) {
      if (a.c_[i] == Scalar(0)) continue;
      for (unsigned j = 0; j < detail::kBlades; ++j) {
        if (b.c_[j] == Scalar(0)) continue;
        auto p = detail::blade_product(i, j);
        out.c_[p.mask] += p.sign * a.c_[i] * b.c_[j];
      }
    }
    return out;
  }

  const std::array<Scalar, 32>& coeffs() const { return c_; }

 private:
  std::array<Scalar, 32> c_{};
};

inline Multivector reverse(const Multivector& m) {
  Multivector out;
  for (unsigned i = 0; i < detail::kBlades; ++i)
    out[i] = detail::reverse_sign(std::popcount(i)) * m[i];
  return out;
}

inline Multivector grade_part(const Multivector& m, int k) {
  Multivector out;
  for (unsigned i = 0; i < detail::kBlades; ++i)
    if (std::popcount(i) == k) out[i] = m[i];
  return out;
}

inline Multivector even_part(const Multivector& m) {
  Multivector out;
  for (unsigned i = 0; i < detail::kBlades; ++i)
    if (std::popcount(i) % 2 == 0) out[i] = m[i];
  return out;
}

inline Multivector odd_part(const Multivector& m) {
  Multivector out;
  for (unsigned i = 0; i < detail::kBlades; ++i)
    if (std::popcount(i) % 2 == 1) out[i] = m[i];
  return out;
}

inline Scalar scalar_part(const Multivector& m) { return m[0]; }

inline Multivector conj(const Multivector& m) {
  Multivector out;
  for (unsigned i = 0; i < detail::kBlades; ++i) out[i] = std::conj(m[i]);
  return out;
}

inline double frob(const Multivector& m) {
  double s = 0;
  for (unsigned i = 0; i < detail::kBlades; ++i) s += std::norm(m[i]);
  return std::sqrt(s);
}

inline bool is_finite(const Multivector& m) {
  for (unsigned i = 0; i < detail::kBlades; ++i)
    if (!std::isfinite(m[i].real()) || !std::isfinite(m[i].imag())) return false;
  return true;
}

// Maximum absolute component deviation between two multivectors.
inline double dist(const Multivector& a, const Multivector& b) { return frob(a - b); }

// ======== distinguished elements ========

inline constexpr unsigned kMaskE1 = 1u << 0;
inline constexpr unsigned kMaskE2 = 1u << 1;
inline constexpr unsigned kMaskE3 = 1u << 2;
inline constexpr unsigned kMaskEPlus = 1u << 3;
inline constexpr unsigned kMaskEMinus = 1u << 4;

inline const Multivector e1 = Multivector::basis(kMaskE1);
inline const Multivector e2 = Multivector::basis(kMaskE2);
inline const Multivector e3 = Multivector::basis(kMaskE3);
inline const Multivector e_plus = Multivector::basis(kMaskEPlus);
inline const Multivector e_minus = Multivector::basis(kMaskEMinus);
inline const Multivector e_o = 0.5 * (e_minus - e_plus);
inline const Multivector e_inf = e_minus + e_plus;
inline const Multivector e123 = e1 * e2 * e3;

// Quaternion unit embedding: i = -e23, j = e13, k = -e12.
inline const Multivector qunit_i = -Multivector::basis(kMaskE2 | kMaskE3);
inline const Multivector qunit_j = Multivector::basis(kMaskE1 | kMaskE3);
inline const Multivector qunit_k = -Multivector::basis(kMaskE1 | kMaskE2);

inline const Multivector eps1 = e123 * e_inf;
inline const Multivector eps2 = e123 * e_o;
inline const Multivector eps3 = e_plus * e_minus;  // equals e_inf*e_o + 1

// ======== grade-1 elements (points / spheres / planes) ========

struct CgaVector {
  Scalar o{}, x1{}, x2{}, x3{}, inf{};  // a = o*e_o + x1*e1 + x2*e2 + x3*e3 + inf*e_inf

  Multivector mv() const {
    return o * e_o + x1 * e1 + x2 * e2 + x3 * e3 + inf * e_inf;
  }

  static CgaVector from_mv(const Multivector& m, double tol = kDefaultTol) {
    Multivector g1 = grade_part(m, 1);
    if (dist(g1, m) > tol * std::max(1.0, frob(m)))
      throw Error(Errc::BadInput, "element is not grade 1");
    // e1..e3 coordinates are direct; solve the 2x2 null-basis change for o/inf:
    //   c(e+) = -o/2 + inf,  c(e-) = o/2 + inf.
    CgaVector v;
    v.x1 = m[kMaskE1];
    v.x2 = m[kMaskE2];
    v.x3 = m[kMaskE3];
    Scalar cp = m[kMaskEPlus], cm = m[kMaskEMinus];
    v.o = cm - cp;
    v.inf = 0.5 * (cm + cp);
    return v;
  }

  CgaVector conjugated() const {
    return {std::conj(o), std::conj(x1), std::conj(x2), std::conj(x3), std::conj(inf)};
  }

  friend CgaVector operator+(const CgaVector& a, const CgaVector& b) {
    return {a.o + b.o, a.x1 + b.x1, a.x2 + b.x2, a.x3 + b.x3, a.inf + b.inf};
  }
  friend CgaVector operator-(const CgaVector& a, const CgaVector& b) {
    return {a.o - b.o, a.x1 - b.x1, a.x2 - b.x2, a.x3 - b.x3, a.inf - b.inf};
  }
  friend CgaVector operator*(Scalar s, const CgaVector& a) {
    return {s * a.o, s * a.x1, s * a.x2, s * a.x3, s * a.inf};
  }

  double norm() const {
    return std::sqrt(std::norm(o) + std::norm(x1) + std::norm(x2) + std::norm(x3) +
                     std::norm(inf));
  }
};

// Symmetric bilinear form of two grade-1 elements (grade-0 part of the product).
inline Scalar dot(const CgaVector& a, const CgaVector& b) {
  // e_i.e_j = delta_ij, e_o.e_o = e_inf.e_inf = 0, e_o.e_inf = -1.
  return a.x1 * b.x1 + a.x2 * b.x2 + a.x3 * b.x3 - a.o * b.inf - a.inf * b.o;
}

// Antisymmetrized product (grade-2 part) of two grade-1 elements.
inline Multivector wedge(const CgaVector& a, const CgaVector& b) {
  Multivector pa = a.mv(), pb = b.mv();
  return 0.5 * (pa * pb - pb * pa);
}

inline bool is_point(const CgaVector& a, double tol = kDefaultTol) {
  double n = a.norm();
  return std::abs(dot(a, a)) <= tol * std::max(1.0, n * n);
}

// ======== complexified quaternions ========

struct Quaternion {
  Scalar w{}, x{}, y{}, z{};

  friend Quaternion operator+(const Quaternion& a, const Quaternion& b) {
    return {a.w + b.w, a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Quaternion operator-(const Quaternion& a, const Quaternion& b) {
    return {a.w - b.w, a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Quaternion operator-(const Quaternion& a) { return {-a.w, -a.x, -a.y, -a.z}; }
  friend Quaternion operator*(Scalar s, const Quaternion& a) {
    return {s * a.w, s * a.x, s * a.y, s * a.z};
  }
  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
  }

  double abs() const {
    return std::sqrt(std::norm(w) + std::norm(x) + std::norm(y) + std::norm(z));
  }
};

// Quaternion conjugation x -> x-bar (reversion restricted to quaternions).
inline Quaternion qconj(const Quaternion& q) { return {q.w, -q.x, -q.y, -q.z}; }

// Norm x*x-bar; a complex scalar for complexified quaternions.
inline Scalar qnorm(const Quaternion& q) {
  return q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
}

// Symmetric bilinear form S(x,y) = x*conj(y) + y*conj(x) (always scalar).
inline Scalar S(const Quaternion& a, const Quaternion& b) {
  return 2.0 * (a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z);
}

inline Quaternion vect(const Quaternion& q) { return {Scalar(0), q.x, q.y, q.z}; }

inline Multivector quat_mv(const Quaternion& q) {
  return Multivector::scalar(q.w) + q.x * qunit_i + q.y * qunit_j + q.z * qunit_k;
}

struct FourQuat {
  Quaternion q0, q1, q2, q3;  // element = q0 + eps1*q1 + eps2*q2 + eps3*q3
};

// ======== even sub-algebra ========

namespace detail {

// Even blades by ascending mask value.
inline const std::array<unsigned, 16>& even_masks() {
  static const std::array<unsigned, 16> masks = [] {
    std::array<unsigned, 16> m{};
    int k = 0;
    for (unsigned i = 0; i < kBlades; ++i)
      if (std::popcount(i) % 2 == 0) m[k++] = i;
    return m;
  }();
  return masks;
}

inline int even_slot_of_mask(unsigned mask) {
  const auto& m = even_masks();
  for (int i = 0; i < 16; ++i)
    if (m[i] == mask) return i;
  return -1;
}

struct Mat16 {
  std::array<std::array<double, 16>, 16> a{};
};

// Gauss-Jordan inverse; entries of our change-of-basis matrices are powers of
// two, so this is numerically exact.
inline Mat16 invert(Mat16 m) {
  Mat16 inv;
  for (int i = 0; i < 16; ++i) inv.a[i][i] = 1.0;
  for (int col = 0; col < 16; ++col) {
    int piv = col;
    for (int r = col + 1; r < 16; ++r)
      if (std::abs(m.a[r][col]) > std::abs(m.a[piv][col])) piv = r;
    if (std::abs(m.a[piv][col]) < 1e-12)
      throw Error(Errc::BadInput, "singular basis-change matrix");
    std::swap(m.a[piv], m.a[col]);
    std::swap(inv.a[piv], inv.a[col]);
    double d = m.a[col][col];
    for (int j = 0; j < 16; ++j) {
      m.a[col][j] /= d;
      inv.a[col][j] /= d;
    }
    for (int r = 0; r < 16; ++r) {
      if (r == col) continue;
      double f = m.a[r][col];
      if (f == 0.0) continue;
      for (int j = 0; j < 16; ++j) {
        m.a[r][j] -= f * m.a[col][j];
        inv.a[r][j] -= f * inv.a[col][j];
      }
    }
  }
  return inv;
}

struct EvenTables {
  std::array<Multivector, 16> wire_blades;
  std::array<Multivector, 16> fq_basis;
  Mat16 wire_to_mask, mask_to_wire;  // coords over even_masks()
  Mat16 fq_to_mask, mask_to_fq;
};

inline const EvenTables& even_tables() {
  static const EvenTables t = [] {
    EvenTables tb;
    auto wedge2 = [](const Multivector& a, const Multivector& b) {
      return 0.5 * (a * b - b * a);
    };
    const Multivector eoi = wedge2(e_o, e_inf);  // pure grade 2
    // Wire slot order (the serialized format):
    //   1, e12, e13, e23, e1o, e2o, e3o, e1i, e2i, e3i, eoi,
    //   e123o, e123i, e12oi, e13oi, e23oi
    tb.wire_blades = {Multivector::scalar(1.0),
                      e1 * e2,
                      e1 * e3,
                      e2 * e3,
                      e1 * e_o,
                      e2 * e_o,
                      e3 * e_o,
                      e1 * e_inf,
                      e2 * e_inf,
                      e3 * e_inf,
                      eoi,
                      e123 * e_o,
                      e123 * e_inf,
                      e1 * e2 * eoi,
                      e1 * e3 * eoi,
                      e2 * e3 * eoi};
    // Four-quaternion basis: [1,i,j,k] x [1, eps1, eps2, eps3].
    const Multivector units[4] = {Multivector::scalar(1.0), qunit_i, qunit_j, qunit_k};
    const Multivector epss[4] = {Multivector::scalar(1.0), eps1, eps2, eps3};
    for (int s = 0; s < 4; ++s)
      for (int u = 0; u < 4; ++u) tb.fq_basis[4 * s + u] = epss[s] * units[u];

    auto fill = [](const std::array<Multivector, 16>& basis, Mat16& fwd) {
      for (int col = 0; col < 16; ++col) {
        for (int row = 0; row < 16; ++row) {
          Scalar c = basis[col][even_masks()[row]];
          fwd.a[row][col] = c.real();  // all change-of-basis entries are real
        }
      }
    };
    fill(tb.wire_blades, tb.wire_to_mask);
    fill(tb.fq_basis, tb.fq_to_mask);
    tb.mask_to_wire = invert(tb.wire_to_mask);
    tb.mask_to_fq = invert(tb.fq_to_mask);
    return tb;
  }();
  return t;
}

inline std::array<Scalar, 16> apply16(const Mat16& m, const std::array<Scalar, 16>& v) {
  std::array<Scalar, 16> out{};
  for (int r = 0; r < 16; ++r) {
    Scalar acc = 0;
    for (int c = 0; c < 16; ++c)
      if (m.a[r][c] != 0.0) acc += m.a[r][c] * v[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace detail

// An element of the even sub-algebra Cl+(4,1). Internally a bitmask
// multivector; serialization uses 16 null-basis coefficients in the fixed
// slot order documented in detail::even_tables().
class EvenElement {
 public:
  EvenElement() : m_(Multivector{}) {}
  EvenElement(Scalar s) : m_(Multivector::scalar(s)) {}          // NOLINT(implicit)
  EvenElement(double s) : m_(Multivector::scalar(Scalar(s))) {}  // NOLINT(implicit)

  // Checked construction: odd-grade content above tolerance is an error.
  explicit EvenElement(const Multivector& m, double tol = kDefaultTol) : m_(even_part(m)) {
    double resid = frob(odd_part(m));
    if (resid > tol * std::max(1.0, frob(m)))
      throw Error(Errc::OddResidue, "multivector has odd-grade content");
  }

  static EvenElement unchecked(const Multivector& m) {
    EvenElement e;
    e.m_ = m;
    return e;
  }

  const Multivector& mv() const { return m_; }

  // -- null-basis wire format --
  std::array<Scalar, 16> wire() const {
    std::array<Scalar, 16> mask_coords{};
    for (int i = 0; i < 16; ++i) mask_coords[i] = m_[detail::even_masks()[i]];
    return detail::apply16(detail::even_tables().mask_to_wire, mask_coords);
  }
  static EvenElement from_wire(const std::array<Scalar, 16>& w) {
    auto mask_coords = detail::apply16(detail::even_tables().wire_to_mask, w);
    Multivector m;
    for (int i = 0; i < 16; ++i) m[detail::even_masks()[i]] = mask_coords[i];
    return unchecked(m);
  }

  // -- four-quaternion representation --
  FourQuat four_quat() const {
    std::array<Scalar, 16> mask_coords{};
    for (int i = 0; i < 16; ++i) mask_coords[i] = m_[detail::even_masks()[i]];
    auto f = detail::apply16(detail::even_tables().mask_to_fq, mask_coords);
    FourQuat q;
    q.q0 = {f[0], f[1], f[2], f[3]};
    q.q1 = {f[4], f[5], f[6], f[7]};
    q.q2 = {f[8], f[9], f[10], f[11]};
    q.q3 = {f[12], f[13], f[14], f[15]};
    return q;
  }
  static EvenElement from_four_quat(const FourQuat& q) {
    std::array<Scalar, 16> f = {q.q0.w, q.q0.x, q.q0.y, q.q0.z, q.q1.w, q.q1.x,
                                q.q1.y, q.q1.z, q.q2.w, q.q2.x, q.q2.y, q.q2.z,
                                q.q3.w, q.q3.x, q.q3.y, q.q3.z};
    auto mask_coords = detail::apply16(detail::even_tables().fq_to_mask, f);
    Multivector m;
    for (int i = 0; i < 16; ++i) m[detail::even_masks()[i]] = mask_coords[i];
    return unchecked(m);
  }

  // -- arithmetic (closed on the even sub-algebra) --
  friend EvenElement operator+(const EvenElement& a, const EvenElement& b) {
    return unchecked(a.m_ + b.m_);
  }
  friend EvenElement operator-(const EvenElement& a, const EvenElement& b) {
    return unchecked(a.m_ - b.m_);
  }
  friend EvenElement operator-(const EvenElement& a) { return unchecked(-a.m_); }
  friend EvenElement operator*(const EvenElement& a, const EvenElement& b) {
    return unchecked(a.m_ * b.m_);
  }
  friend EvenElement operator*(Scalar s, const EvenElement& a) { return unchecked(s * a.m_); }
  friend EvenElement operator*(const EvenElement& a, Scalar s) { return unchecked(s * a.m_); }
  EvenElement& operator+=(const EvenElement& o) {
    m_ += o.m_;
    return *this;
  }
  EvenElement& operator-=(const EvenElement& o) {
    m_ -= o.m_;
    return *this;
  }

  double norm() const { return frob(m_); }

 private:
  Multivector m_;
};

inline EvenElement reverse(const EvenElement& a) {
  return EvenElement::unchecked(reverse(a.mv()));
}
inline EvenElement conj(const EvenElement& a) { return EvenElement::unchecked(conj(a.mv())); }
inline EvenElement grade_part(const EvenElement& a, int k) {
  return EvenElement::unchecked(grade_part(a.mv(), k));
}
inline Scalar scalar_part(const EvenElement& a) { return a.mv()[0]; }
inline double frob(const EvenElement& a) { return frob(a.mv()); }
inline double dist(const EvenElement& a, const EvenElement& b) { return frob(a - b); }
inline bool is_finite(const EvenElement& a) { return is_finite(a.mv()); }

// True iff the element is a real multiple of a blade-real element, i.e. all
// imaginary parts are below tolerance.
inline bool is_real(const EvenElement& a, double tol = kDefaultTol) {
  double im = 0;
  for (unsigned i = 0; i < detail::kBlades; ++i) im += std::norm(Scalar(0, a.mv()[i].imag()));
  return std::sqrt(im) <= tol * std::max(1.0, frob(a));
}

// ======== Study variety / null quadric predicates ========

// q q-bar = q-bar q in the scalars (complexified Study condition).
inline bool is_study(const EvenElement& q, double tol = kDefaultTol) {
  double n2 = std::max(1e-300, frob(q) * frob(q));
  EvenElement a = q * reverse(q);
  EvenElement b = reverse(q) * q;
  if (dist(a, b) > tol * n2) return false;
  return frob(a - EvenElement(scalar_part(a))) <= tol * n2;
}

// Grade-0 part of q q-bar vanishes (the null quadric).
inline bool is_null(const EvenElement& q, double tol = kDefaultTol) {
  double n2 = std::max(1e-300, frob(q) * frob(q));
  return std::abs(scalar_part(q * reverse(q))) <= tol * n2;
}

// ======== versor action on points ========

// Grade-1 part of q x reverse(q); throws if the result has higher-grade
// residue beyond tolerance (q does not act as a versor on x).
inline CgaVector sandwich(const EvenElement& q, const CgaVector& x, double tol = kDefaultTol) {
  Multivector full = q.mv() * x.mv() * reverse(q.mv());
  Multivector g1 = grade_part(full, 1);
  double scale = std::max(1.0, frob(q) * frob(q) * x.norm());
  if (dist(full, g1) > tol * scale)
    throw Error(Errc::NotAVersorAction, "sandwich result is not grade 1");
  return CgaVector::from_mv(g1, tol * 100);
}

// ======== inverses ========

// General inverse on the even sub-algebra via a dense 16x16 solve of
// q * x = 1. Returns false (and leaves out untouched) if q is singular.
inline bool try_inverse(const EvenElement& q, EvenElement& out, double tol = 1e-12) {
  // Fast path: q q-bar a nonzero scalar gives q^{-1} = q-bar / (q q-bar).
  EvenElement nq = q * reverse(q);
  Scalar n0 = scalar_part(nq);
  double scale = std::max(1e-300, frob(q) * frob(q));
  if (frob(nq - EvenElement(n0)) <= 1e-13 * scale && std::abs(n0) > tol * scale) {
    out = reverse(q) * (Scalar(1.0) / n0);
    return true;
  }

  // Dense path: columns are q * basis_blade over the even masks.
  const auto& masks = detail::even_masks();
  std::array<std::array<Scalar, 17>, 16> m{};  // augmented [A | e_scalar]
  for (int col = 0; col < 16; ++col) {
    Multivector prod = q.mv() * Multivector::basis(masks[col]);
    for (int row = 0; row < 16; ++row) m[row][col] = prod[masks[row]];
  }
  for (int row = 0; row < 16; ++row) m[row][16] = (masks[row] == 0) ? Scalar(1) : Scalar(0);

  double norm_a = 0;
  for (int r = 0; r < 16; ++r)
    for (int c = 0; c < 16; ++c) norm_a = std::max(norm_a, std::abs(m[r][c]));
  if (norm_a == 0.0) return false;

  for (int col = 0; col < 16; ++col) {
    int piv = col;
    for (int r = col + 1; r < 16; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) < 1e-10 * norm_a) return false;
    std::swap(m[piv], m[col]);
    Scalar d = m[col][col];
    for (int j = col; j <= 16; ++j) m[col][j] /= d;
    for (int r = 0; r < 16; ++r) {
      if (r == col) continue;
      Scalar f = m[r][col];
      if (f == Scalar(0)) continue;
      for (int j = col; j <= 16; ++j) m[r][j] -= f * m[col][j];
    }
  }
  Multivector inv;
  for (int i = 0; i < 16; ++i) inv[masks[i]] = m[i][16];
  EvenElement cand = EvenElement::unchecked(inv);
  if (frob(cand * q - EvenElement(Scalar(1))) > 1e-8 * std::max(1.0, frob(cand) * frob(q)))
    return false;
  out = cand;
  return true;
}

inline EvenElement inverse(const EvenElement& q) {
  EvenElement out;
  if (!try_inverse(q, out)) throw Error(Errc::ZeroElement, "element is not invertible");
  return out;
}

// Inverse of a grade-1 vector with v^2 != 0: v^{-1} = v / v^2.
inline CgaVector inverse(const CgaVector& v) {
  Scalar v2 = dot(v, v);
  if (std::abs(v2) < 1e-14 * std::max(1.0, v.norm() * v.norm()))
    throw Error(Errc::ZeroElement, "null vector has no inverse");
  return (Scalar(1) / v2) * v;
}

}  // namespace spinfact
