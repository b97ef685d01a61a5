// Batch front end: factor | verify | cofactor | annihilate | fourbar.
// Reads JSON from a path argument or stdin, writes JSON (or pretty text) to
// stdout.  Exit codes: 0 success, 2 the operation ran but the mathematical
// answer is negative (no factorization, no cofactor, failed verification,
// solver count mismatch), 1 malformed or out-of-domain input.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "spinfact/json_io.hpp"

namespace {

using spinfact::Errc;
using spinfact::Error;
using spinfact::Side;
using json = spinfact::io::json;

// Inputs the caller got wrong (shape, domain of definition) versus honest
// negative answers from a well-posed computation.
bool is_input_error(Errc c) {
  switch (c) {
    case Errc::BadInput:
    case Errc::NotSpinor:
    case Errc::OddResidue:
    case Errc::OddDegree:
    case Errc::NonInvertibleLeadingCoefficient:
    case Errc::NotAVersorAction:
    case Errc::ZeroElement:
      return true;
    default:
      return false;
  }
}

json read_input(const std::string& path) {
  if (path.empty()) return json::parse(std::cin);
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadInput, "cannot open input file: " + path);
  return json::parse(in);
}

void emit(const json& j, const std::string& format, const std::string& pretty_text) {
  if (format == "pretty")
    std::cout << pretty_text;
  else
    std::cout << j.dump(2) << "\n";
}

struct CommonOpts {
  std::string input;
  std::string format = "json";
  double tol = 1e-10;
  uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_seed = true) {
  cmd->add_option("input", o.input, "input JSON path (stdin when omitted)");
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"json", "pretty"}))
      ->capture_default_str();
  cmd->add_option("--tol", o.tol, "acceptance tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (with_seed) cmd->add_option("--seed", o.seed, "random seed")->capture_default_str();
}

int run_factor(const CommonOpts& o, const std::string& side, bool all) {
  json in = read_input(o.input);
  spinfact::EvenPolynomial P =
      spinfact::io::poly_from_json(in.is_object() ? in.at("poly") : in);
  spinfact::FactorizeOptions fo;
  fo.side = side == "right" ? Side::Right : Side::Left;
  fo.explore_all = all;
  fo.tol = o.tol;
  fo.seed = o.seed;
  spinfact::FactorizeResult r = spinfact::factorize_all(P, fo);
  emit(spinfact::io::factor_report_to_json(r), o.format, spinfact::io::pretty(r));
  return r.status == spinfact::FactorizeStatus::NoFactorization ? 2 : 0;
}

int run_verify(const CommonOpts& o) {
  json in = read_input(o.input);
  spinfact::EvenPolynomial P = spinfact::io::poly_from_json(in.at("poly"));
  spinfact::Factorization f = spinfact::io::factorization_from_json(in.at("factorization"));
  Side side = in.contains("side") ? spinfact::io::side_from_json(in.at("side")) : Side::Left;
  double resid = spinfact::verify_factorization(P, f, side);
  bool ok = resid <= o.tol;
  std::ostringstream pretty;
  pretty << "residual: " << resid << (ok ? "  (ok)" : "  (too large)") << "\n";
  emit(json{{"residual", resid}, {"ok", ok}}, o.format, pretty.str());
  return ok ? 0 : 2;
}

int run_cofactor(const CommonOpts& o, int max_attempts) {
  json in = read_input(o.input);
  spinfact::EvenPolynomial P =
      spinfact::io::poly_from_json(in.is_object() ? in.at("poly") : in);
  spinfact::CofactorOptions co;
  co.seed = o.seed;
  co.max_attempts = max_attempts;
  co.tol = o.tol;
  spinfact::RealCofactorResult r = spinfact::real_cofactor(P, co);
  std::ostringstream pretty;
  pretty << "real cofactor: " << spinfact::io::pretty(r.real_cofactor) << "\n";
  for (const auto& s : r.stages)
    pretty << "linear cofactor: " << spinfact::io::pretty(s.cofactor) << "  (attempts "
           << s.attempts << ")\n";
  pretty << "factorization of P*R: " << spinfact::io::pretty(r.factorization, Side::Left);
  emit(spinfact::io::real_cofactor_to_json(r), o.format, pretty.str());
  return 0;
}

int run_annihilate(const CommonOpts& o) {
  json in = read_input(o.input);
  spinfact::EvenElement n =
      spinfact::io::even_from_json(in.is_object() ? in.at("element") : in);
  auto left = spinfact::annihilator_nullspace(n, Side::Left, o.tol);
  auto right = spinfact::annihilator_nullspace(n, Side::Right, o.tol);
  json lj = json::array(), rj = json::array();
  std::ostringstream pretty;
  for (const auto& v : left.basis) {
    lj.push_back(spinfact::io::vector_to_json(v));
    pretty << "left:  " << spinfact::io::pretty(v) << "\n";
  }
  for (const auto& v : right.basis) {
    rj.push_back(spinfact::io::vector_to_json(v));
    pretty << "right: " << spinfact::io::pretty(v) << "\n";
  }
  const char* cls =
      left.cls == spinfact::DisplacementClass::Generic ? "generic" : "special";
  pretty << "class: " << cls << "\n";
  emit(json{{"left", lj}, {"right", rj}, {"class", cls}}, o.format, pretty.str());
  return 0;
}

int run_fourbar(const CommonOpts& o, const std::string& system_path,
                const std::string& points_path) {
  spinfact::QuadricSystem sys = system_path.empty()
                                    ? spinfact::fourbar_system()
                                    : spinfact::io::system_from_json(read_input(system_path));
  spinfact::FourBarOptions fo;
  fo.seed = o.seed;
  fo.tol = o.tol;
  spinfact::FourBarReport r =
      points_path.empty()
          ? spinfact::fourbar_demo(sys, fo)
          : spinfact::fourbar_from_points(sys, spinfact::io::points_from_json(
                                                   read_input(points_path)),
                                          fo);
  emit(spinfact::io::fourbar_to_json(r), o.format, spinfact::io::pretty(r));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cl(4,1) spinor polynomial factorization toolkit"};
  app.require_subcommand(1);

  CommonOpts factor_opts, verify_opts, cofactor_opts, annihilate_opts, fourbar_opts;
  std::string side = "left";
  bool all = false;
  int max_attempts = 20;
  std::string system_path, points_path;

  CLI::App* factor = app.add_subcommand("factor", "factor a spinor polynomial");
  add_common(factor, factor_opts);
  factor->add_option("--side", side, "peel factors on this side")
      ->check(CLI::IsMember({"left", "right"}))
      ->capture_default_str();
  factor->add_flag("--all", all, "explore every quadratic ordering");

  CLI::App* verify = app.add_subcommand("verify", "re-expand a factorization against a polynomial");
  add_common(verify, verify_opts, false);

  CLI::App* cofactor = app.add_subcommand("cofactor", "find a real cofactor R with P*R factorable");
  add_common(cofactor, cofactor_opts);
  cofactor->add_option("--max-attempts", max_attempts, "vector pair samples per stage")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* annihilate = app.add_subcommand("annihilate", "annihilating points of a null displacement");
  add_common(annihilate, annihilate_opts, false);

  CLI::App* fourbar = app.add_subcommand("fourbar", "four-bar demonstration pipeline");
  add_common(fourbar, fourbar_opts);
  fourbar->add_option("--system", system_path, "three 4x4 symmetric matrices (g1, g2[, norm])");
  fourbar->add_option("--points", points_path, "precomputed intersection points (skip solver)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (factor->parsed()) return run_factor(factor_opts, side, all);
    if (verify->parsed()) return run_verify(verify_opts);
    if (cofactor->parsed()) return run_cofactor(cofactor_opts, max_attempts);
    if (annihilate->parsed()) return run_annihilate(annihilate_opts);
    if (fourbar->parsed()) return run_fourbar(fourbar_opts, system_path, points_path);
  } catch (const Error& e) {
    std::cout << json{{"error", {{"kind", errc_name(e.code())}, {"detail", e.what()}}}}.dump(2)
              << "\n";
    return is_input_error(e.code()) ? 1 : 2;
  } catch (const json::exception& e) {
    std::cout << json{{"error", {{"kind", "Json"}, {"detail", e.what()}}}}.dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << json{{"error", {{"kind", "Internal"}, {"detail", e.what()}}}}.dump(2) << "\n";
    return 1;
  }
  return 1;
}
