#pragma once

// JSON interchange for every public value the command line handles, plus the
// human-readable pretty printers.  JSON is the faithful format (full double
// precision, fixed field order); pretty mode renders even elements in
// four-quaternion notation for reading, not for round trips.
//
// Scalars serialize as [re, im].  Even elements serialize as 16 scalars in
// the wire order documented next to EvenElement::wire(); vectors as the five
// scalars (o, x1, x2, x3, inf); quaternions as (w, x, y, z); polynomials as
// coefficient arrays in ascending degree.

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "annihilator.hpp"
#include "cofactor.hpp"
#include "factorization.hpp"
#include "fourbar.hpp"

namespace spinfact {
namespace io {

using json = nlohmann::json;

// ---- scalars and small aggregates ----

inline json scalar_to_json(const Scalar& s) { return json::array({s.real(), s.imag()}); }

inline Scalar scalar_from_json(const json& j) {
  if (j.is_number()) return Scalar(j.get<double>());  // bare reals are welcome
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(Errc::BadInput, "scalar must be a number or [re, im]");
  return Scalar(j[0].get<double>(), j[1].get<double>());
}

inline json even_to_json(const EvenElement& e) {
  json out = json::array();
  for (const Scalar& s : e.wire()) out.push_back(scalar_to_json(s));
  return out;
}

inline EvenElement even_from_json(const json& j) {
  if (!j.is_array() || j.size() != 16)
    throw Error(Errc::BadInput, "even element must be an array of 16 scalars (wire order)");
  std::array<Scalar, 16> w;
  for (int i = 0; i < 16; ++i) w[i] = scalar_from_json(j[i]);
  return EvenElement::from_wire(w);
}

inline json vector_to_json(const CgaVector& v) {
  return json::array({scalar_to_json(v.o), scalar_to_json(v.x1), scalar_to_json(v.x2),
                      scalar_to_json(v.x3), scalar_to_json(v.inf)});
}

inline CgaVector vector_from_json(const json& j) {
  if (!j.is_array() || j.size() != 5)
    throw Error(Errc::BadInput, "vector must be an array of 5 scalars (o, x1, x2, x3, inf)");
  return CgaVector{scalar_from_json(j[0]), scalar_from_json(j[1]), scalar_from_json(j[2]),
                   scalar_from_json(j[3]), scalar_from_json(j[4])};
}

inline json quat_to_json(const Quaternion& q) {
  return json::array(
      {scalar_to_json(q.w), scalar_to_json(q.x), scalar_to_json(q.y), scalar_to_json(q.z)});
}

inline Quaternion quat_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw Error(Errc::BadInput, "quaternion must be an array of 4 scalars (w, x, y, z)");
  return Quaternion{scalar_from_json(j[0]), scalar_from_json(j[1]), scalar_from_json(j[2]),
                    scalar_from_json(j[3])};
}

// ---- polynomials ----

inline json poly_to_json(const EvenPolynomial& p) {
  json out = json::array();
  for (size_t i = 0; i < p.size(); ++i) out.push_back(even_to_json(p[i]));
  return out;
}

inline EvenPolynomial poly_from_json(const json& j) {
  if (!j.is_array() || j.empty())
    throw Error(Errc::BadInput, "polynomial must be a non-empty coefficient array");
  std::vector<EvenElement> c;
  for (const json& cj : j) c.push_back(even_from_json(cj));
  return EvenPolynomial(c);
}

inline json real_poly_to_json(const RealPolynomial& p) { return json(p.c); }

// ---- factorizations ----

inline const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

inline Side side_from_json(const json& j) {
  std::string s = j.get<std::string>();
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  throw Error(Errc::BadInput, "side must be \"left\" or \"right\"");
}

inline json factorization_to_json(const Factorization& f) {
  json steps = json::array();
  for (const LinearFactorStep& s : f.steps)
    steps.push_back({{"h", even_to_json(s.h)}, {"method", peel_method_name(s.method)}});
  return {{"steps", steps}, {"unit", even_to_json(f.unit)}, {"residual", f.residual}};
}

inline Factorization factorization_from_json(const json& j) {
  Factorization f;
  for (const json& sj : j.at("steps")) {
    LinearFactorStep step;
    step.h = even_from_json(sj.at("h"));
    step.method = PeelMethod::Direct;  // method tags are informational
    f.steps.push_back(step);
  }
  f.unit = j.contains("unit") ? even_from_json(j.at("unit")) : EvenElement(Scalar(1));
  f.residual = j.value("residual", 0.0);
  return f;
}

inline json factor_report_to_json(const FactorizeResult& r) {
  json list = json::array();
  for (const Factorization& f : r.list) list.push_back(factorization_to_json(f));
  json samples = json::array();
  for (const EvenElement& h : r.family_samples) samples.push_back(even_to_json(h));
  return {{"status", factorize_status_name(r.status)},
          {"side", side_name(r.side)},
          {"factorizations", list},
          {"family_dim", r.family_dim},
          {"family_samples", samples},
          {"diagnostics", r.diagnostics}};
}

// ---- multiplication technique ----

inline json cofactor_to_json(const CofactorResult& r) {
  return {{"cofactor", poly_to_json(r.cofactor)},
          {"e", vector_to_json(r.e)},
          {"f", vector_to_json(r.f)},
          {"product", poly_to_json(r.product)},
          {"left", factorization_to_json(r.left)},
          {"right", factorization_to_json(r.right)},
          {"attempts", r.attempts}};
}

inline json real_cofactor_to_json(const RealCofactorResult& r) {
  json stages = json::array();
  for (const CofactorResult& s : r.stages) stages.push_back(cofactor_to_json(s));
  return {{"real_cofactor", real_poly_to_json(r.real_cofactor)},
          {"factorization", factorization_to_json(r.factorization)},
          {"stages", stages}};
}

// ---- four-bar ----

inline json axis_to_json(const std::array<double, 3>& a) { return json::array({a[0], a[1], a[2]}); }

inline json fourbar_to_json(const FourBarReport& r) {
  json points = json::array();
  for (const NullPointRecord& p : r.points)
    points.push_back({{"n", quat_to_json(p.n)},
                      {"left_ann", vector_to_json(p.left_ann)},
                      {"right_ann", vector_to_json(p.right_ann)},
                      {"left_partner", p.left_partner},
                      {"right_partner", p.right_partner}});
  json left = json::array(), right = json::array();
  for (auto [i, j] : r.graph.left_shared) left.push_back(json::array({i, j}));
  for (auto [i, j] : r.graph.right_shared) right.push_back(json::array({i, j}));
  return {{"points", points},
          {"ruling_graph", {{"left_shared", left}, {"right_shared", right}}},
          {"axes",
           {{"fixed", json::array({axis_to_json(r.axes.fixed[0]), axis_to_json(r.axes.fixed[1])})},
            {"moving",
             json::array({axis_to_json(r.axes.moving[0]), axis_to_json(r.axes.moving[1])})}}},
          {"attempts", r.attempts}};
}

inline QuadraticForm quadratic_form_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4)
    throw Error(Errc::BadInput, "quadratic form must be a 4x4 matrix");
  QuadraticForm f;
  for (int r = 0; r < 4; ++r) {
    if (!j[r].is_array() || j[r].size() != 4)
      throw Error(Errc::BadInput, "quadratic form must be a 4x4 matrix");
    for (int c = 0; c < 4; ++c) f.m(r, c) = j[r][c].get<double>();
  }
  if ((f.m - f.m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw Error(Errc::BadInput, "quadratic form matrix must be symmetric");
  return f;
}

inline QuadricSystem system_from_json(const json& j) {
  QuadricSystem sys;
  sys.g1 = quadratic_form_from_json(j.at("g1"));
  sys.g2 = quadratic_form_from_json(j.at("g2"));
  if (j.contains("norm"))
    sys.norm = quadratic_form_from_json(j.at("norm"));
  else
    sys.norm = QuadraticForm::from_monomials({1, 0, 0, 0, 1, 0, 0, 1, 0, 1});
  return sys;
}

inline std::vector<Quaternion> points_from_json(const json& j) {
  const json& arr = j.is_object() ? j.at("points") : j;
  if (!arr.is_array()) throw Error(Errc::BadInput, "points must be an array of quaternions");
  std::vector<Quaternion> out;
  for (const json& q : arr) out.push_back(quat_from_json(q));
  return out;
}

// ---- pretty printing (display only) ----

namespace detail {

inline std::string fmt_real(double v) {
  if (std::abs(v) <= 1e-12) v = 0.0;  // display-only: drop "-0" and e-16 dust
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline bool visible(double v) { return std::abs(v) > 1e-12; }

inline std::string fmt_scalar(const Scalar& s) {
  if (!visible(s.imag())) return fmt_real(s.real());
  if (!visible(s.real())) return fmt_real(s.imag()) + "I";
  return "(" + fmt_real(s.real()) + (s.imag() >= 0 ? "+" : "") + fmt_real(s.imag()) + "I)";
}

inline std::string fmt_quat(const Quaternion& q) {
  static const char* units[4] = {"", "i", "j", "k"};
  const Scalar comps[4] = {q.w, q.x, q.y, q.z};
  std::string out;
  for (int u = 0; u < 4; ++u) {
    const Scalar& c = comps[u];
    if (!visible(c.real()) && !visible(c.imag())) continue;
    if (!out.empty()) out += " + ";
    out += fmt_scalar(c);
    out += units[u];
  }
  return out.empty() ? "0" : out;
}

}  // namespace detail

inline std::string pretty(const EvenElement& e) {
  FourQuat q = e.four_quat();
  const Quaternion* slots[4] = {&q.q0, &q.q1, &q.q2, &q.q3};
  static const char* tags[4] = {"", "eps1", "eps2", "eps3"};
  std::string out;
  auto nonzero = [](const Quaternion& p) {
    auto vis = [](const Scalar& s) {
      return detail::visible(s.real()) || detail::visible(s.imag());
    };
    return vis(p.w) || vis(p.x) || vis(p.y) || vis(p.z);
  };
  for (int s = 0; s < 4; ++s) {
    if (!nonzero(*slots[s])) continue;
    if (!out.empty()) out += " + ";
    if (s == 0)
      out += detail::fmt_quat(*slots[s]);
    else
      out += std::string(tags[s]) + "(" + detail::fmt_quat(*slots[s]) + ")";
  }
  return out.empty() ? "0" : out;
}

inline std::string pretty(const CgaVector& v) {
  static const char* names[5] = {"eo", "e1", "e2", "e3", "einf"};
  const Scalar comps[5] = {v.o, v.x1, v.x2, v.x3, v.inf};
  std::string out;
  for (int i = 0; i < 5; ++i) {
    if (!detail::visible(comps[i].real()) && !detail::visible(comps[i].imag())) continue;
    if (!out.empty()) out += " + ";
    out += detail::fmt_scalar(comps[i]) + " " + names[i];
  }
  return out.empty() ? "0" : out;
}

inline std::string pretty(const RealPolynomial& p) {
  std::string out;
  for (size_t i = 0; i < p.c.size(); ++i) {
    if (!detail::visible(p.c[i]) && p.c.size() > 1) continue;
    if (!out.empty()) out += " + ";
    out += detail::fmt_real(p.c[i]);
    if (i > 0) out += " t" + (i > 1 ? "^" + std::to_string(i) : std::string());
  }
  return out.empty() ? "0" : out;
}

inline std::string pretty(const EvenPolynomial& p) {
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    std::string c = pretty(p[i]);
    if (c == "0" && p.size() > 1) continue;
    if (!out.empty()) out += " + ";
    if (i == 0)
      out += "(" + c + ")";
    else
      out += "(" + c + ") t" + (i > 1 ? "^" + std::to_string(i) : "");
  }
  return out.empty() ? "0" : out;
}

inline std::string pretty(const Factorization& f, Side side) {
  std::ostringstream os;
  os << "residual " << f.residual << "\n";
  if (side == Side::Left) os << "  unit: " << pretty(f.unit) << "\n";
  for (const LinearFactorStep& s : f.steps)
    os << "  t - (" << pretty(s.h) << ")   [" << peel_method_name(s.method) << "]\n";
  if (side == Side::Right) os << "  unit: " << pretty(f.unit) << "\n";
  return os.str();
}

inline std::string pretty(const FactorizeResult& r) {
  std::ostringstream os;
  os << "status: " << factorize_status_name(r.status) << "  (side: " << side_name(r.side)
     << ")\n";
  for (size_t i = 0; i < r.list.size(); ++i)
    os << "factorization " << (i + 1) << ": " << pretty(r.list[i], r.side);
  if (r.status == FactorizeStatus::InfiniteFamily) {
    os << "factor family dimension: " << r.family_dim << "\n";
    for (const EvenElement& h : r.family_samples) os << "  sample factor: t - (" << pretty(h)
                                                     << ")\n";
  }
  if (r.status == FactorizeStatus::NoFactorization)
    for (const std::string& d : r.diagnostics) os << "  " << d << "\n";
  return os.str();
}

inline std::string pretty(const FourBarReport& r) {
  std::ostringstream os;
  os << "intersection points (" << r.points.size() << "):\n";
  for (size_t i = 0; i < r.points.size(); ++i) {
    const NullPointRecord& p = r.points[i];
    os << "  [" << i << "] n = " << detail::fmt_quat(p.n) << "\n";
    os << "      left partner " << p.left_partner << ", right partner " << p.right_partner
       << "\n";
  }
  auto axis = [](const std::array<double, 3>& a) {
    return "(" + detail::fmt_real(a[0]) + ", " + detail::fmt_real(a[1]) + ", " +
           detail::fmt_real(a[2]) + ")";
  };
  os << "fixed axes:  " << axis(r.axes.fixed[0]) << "  " << axis(r.axes.fixed[1]) << "\n";
  os << "moving axes: " << axis(r.axes.moving[0]) << "  " << axis(r.axes.moving[1]) << "\n";
  return os.str();
}

}  // namespace io
}  // namespace spinfact
