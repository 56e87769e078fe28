#pragma once

// Catalog of built-in metrics, integrals, and implicit hodograph systems.
// Every entry is executable data: expressions are parsed on hydration, so
// get_example always returns a self-contained, ready-to-evaluate bundle.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geoflow/expr.hpp"
#include "geoflow/geometry.hpp"
#include "geoflow/hodograph.hpp"

namespace geoflow {

class RegistryError : public std::runtime_error {
 public:
  explicit RegistryError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExampleKind { ExplicitMetric, ImplicitHodograph, Family };

inline std::string kind_name(ExampleKind k) {
  switch (k) {
    case ExampleKind::ExplicitMetric: return "explicit-metric";
    case ExampleKind::ImplicitHodograph: return "implicit-hodograph";
    case ExampleKind::Family: return "family";
  }
  return "unknown";
}

inline ExampleKind kind_from_name(const std::string& s) {
  if (s == "explicit-metric") return ExampleKind::ExplicitMetric;
  if (s == "implicit-hodograph") return ExampleKind::ImplicitHodograph;
  if (s == "family") return ExampleKind::Family;
  throw RegistryError("unknown example kind '" + s +
                      "'; expected explicit-metric, implicit-hodograph, or family");
}

// Axis-aligned sampling region in the metric's coordinates. The note records
// which singular locus the bounds stay away from.
struct SamplingBox {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  std::string note;
};

struct ExplicitPayload {
  Metric2D metric;
  MomentumPoly integral;
  Expr curvature;  // closed-form Gauss curvature; null when none is known
  SamplingBox box;
  std::vector<Expr> singular_loci;  // level sets the geodesic guard respects
};

struct ImplicitPayload {
  ImplicitSystem system;         // equations over a_k, t, x plus named constants
  std::vector<Expr> generators;  // commuting-flow components in a_k and constants
  double anchor_t = 0.0;
  double anchor_x = 0.0;
  std::vector<double> anchor_a;  // solves the hydrated system at the anchor
  GridSpec grid;                 // default continuation patch around the anchor

  // Generators with the system's constants substituted in.
  std::vector<Expr> hydrated_generators() const {
    std::map<std::string, Expr> repl;
    for (const auto& [name, value] : system.constants)
      repl[name] = constant(value);
    std::vector<Expr> out;
    out.reserve(generators.size());
    for (const Expr& g : generators) out.push_back(substitute(g, repl));
    return out;
  }
};

struct ExampleEntry {
  std::string id;
  ExampleKind kind = ExampleKind::ExplicitMetric;
  int degree = 0;  // momentum degree of the first integral
  std::string description;
  std::map<std::string, std::string> parameters;  // family parameters in effect
  std::vector<std::string> presets;               // names accepted via {"preset": ...}
  std::optional<ExplicitPayload> explicit_payload;
  std::optional<ImplicitPayload> implicit_payload;
};

struct ExampleInfo {
  std::string id;
  ExampleKind kind;
  int degree;
  std::string description;
};

namespace detail {

inline MomentumPoly momentum_sum(const MomentumPoly& f, const MomentumPoly& h) {
  MomentumPoly out;
  out.u1 = f.u1;
  out.u2 = f.u2;
  out.coeff = poly_add(f.coeff, h.coeff);
  return out;
}

inline MomentumPoly momentum_power(const MomentumPoly& f, int n) {
  MomentumPoly out = f;
  for (int i = 1; i < n; ++i) out = momentum_product(out, f);
  return out;
}

inline ExampleEntry build_ex0(int n) {
  if (n != 3 && n != 4 && n != 5)
    throw RegistryError("ex0-family parameter n must be 3, 4, or 5 (got " +
                        std::to_string(n) + ")");
  const double nd = n;
  ExampleEntry e;
  e.id = "ex0-family";
  e.kind = ExampleKind::Family;
  e.degree = n + 1;
  e.description =
      "Family of metrics whose integral is a product of powers of two linear "
      "momentum forms; parameter n in {3,4,5} gives degree n+1.";
  e.parameters["n"] = std::to_string(n);

  // Metric components share the conformal prefactor exp(4(n+1)x/n).
  const Expr pre = exp_e(mul(constant(4.0 * (nd + 1.0) / nd), variable("x")));
  const Expr cy = mul(constant(nd + 1.0), variable("y"));    // (n+1) y
  const Expr c2y = mul(constant(2.0 * (nd + 1.0)), variable("y"));
  Metric2D m;
  m.g11 = mul(pre, sum({mul(constant(2.0 * nd * nd), pow_int(sin_e(cy), 2)),
                        mul(constant(8.0), pow_int(cos_e(cy), 2))}));
  m.g12 = mul(pre, mul(constant(nd * (nd + 1.0) * (nd - 2.0)), sin_e(c2y)));
  m.g22 = mul(pre, mul(constant(nd * nd),
                       sum({constant(nd * nd - 2.0 * nd + 2.0),
                            mul(constant(nd * (nd - 2.0)), cos_e(c2y))})));

  // F = scalar * L1^n * L2 with L1, L2 linear in momenta.
  MomentumPoly l1;
  l1.coeff = {mul(constant(nd), sin_e(cy)), mul(constant(2.0), cos_e(cy))};
  MomentumPoly l2;
  l2.coeff = {mul(constant((nd - 2.0) * nd), sin_e(c2y)),
              sub(mul(constant(nd - 2.0), cos_e(c2y)), constant(nd + 2.0))};
  const Expr scalar = mul(
      exp_e(mul(constant(-(nd * nd + 3.0 * nd + 2.0) / nd), variable("x"))),
      pow_int(sum({constant(3.0 * nd - 2.0),
                   mul(constant(nd - 2.0), cos_e(c2y))}),
              -1 - n));
  e.explicit_payload = ExplicitPayload{
      m, momentum_scale(momentum_product(momentum_power(l1, n), l2), scalar),
      Expr{},
      SamplingBox{-0.5, 0.5, -0.5, 0.5,
                  "scalar prefactor 3n-2+(n-2)cos(2(n+1)y) never vanishes"}};
  return e;
}

inline ExampleEntry build_ex1() {
  ExampleEntry e;
  e.id = "ex1-implicit";
  e.kind = ExampleKind::ImplicitHodograph;
  e.degree = 3;
  e.description =
      "Cubic-integral metric in semi-geodesic form; the fields solve a "
      "three-equation transcendental system from a linear generator seed.";
  ImplicitPayload p;
  p.system.equations = {parse("2*a0 + a2"),
                        parse("k*(a1 + 3*log(a2)) - t"),
                        parse("2*x + k*(2*a1^2 + 3*a2^2)")};
  p.system.unknowns = {"a0", "a1", "a2"};
  p.system.constants = {{"k", 1.0}};
  p.generators = {
      parse("k*(2*a0 + a2)"),
      parse("k*(a1 + 3*log(a2))"),
      parse("3*a2^2*k/2 - a0*(2*a0 + a2)*k + (3 - a1)*a1*k"
            " + (9 - 6*a1)*k*log(a2)")};
  p.anchor_t = 0.0;
  p.anchor_x = -1.5;
  p.anchor_a = {-0.5, 0.0, 1.0};
  // Solvability fold sits near x = -1.31 at t = 0; the patch keeps clear.
  p.grid = GridSpec{-0.1, 0.1, -1.9, -1.7, 21, 21};
  e.implicit_payload = std::move(p);
  return e;
}

inline ExampleEntry build_ex2() {
  ExampleEntry e;
  e.id = "ex2-explicit";
  e.kind = ExampleKind::ExplicitMetric;
  e.degree = 3;
  e.description =
      "Explicit metric with a cubic integral, the hodograph image of the "
      "k=1 member of the cubic family.";
  Metric2D m;
  m.g11 = parse("4*x^2 + y^2");
  m.g12 = parse("3*y*(1 + 2*x)");
  m.g22 = parse("9*(1 + y^2)");
  MomentumPoly f;
  const Expr alpha = parse("(y^2 - 2*x)^(-3)");
  f.coeff = {mul(alpha, parse("27*(y^4 - 2*y^2*(1 + x) - 2)")),
             mul(alpha, parse("18*y*(4*x^2 - 2*y^2*(x - 1) + 2*x + 3)")),
             mul(alpha, parse("-6*(y^4 + 4*x^3 - y^2*(2*x^2 - 4*x - 3))")),
             mul(alpha, parse("2*y^3*(2*x + 1)"))};
  e.explicit_payload = ExplicitPayload{
      m, f, parse("(y^2 + 2*x + 6) / (9*(y^2 - 2*x)^3)"),
      SamplingBox{0.0, 1.0, 1.8, 3.0,
                  "keeps y^2 - 2x >= 1.24, clear of the singular locus"},
      {parse("y^2 - 2*x")}};
  return e;
}

inline ExampleEntry build_ex3() {
  ExampleEntry e;
  e.id = "ex3-implicit";
  e.kind = ExampleKind::ImplicitHodograph;
  e.degree = 3;
  e.description =
      "Cubic-integral metric from a quadratic generator seed; constants "
      "k1..k5 with presets A (k2=1) and B (k1=1).";
  e.presets = {"A", "B"};
  ImplicitPayload p;
  p.system.equations = {
      parse("k1*(5*a0^2 + a1^2 + a2^2 + 2*a0*a2) + k2*(2*a0 + a2)"
            " + 2*k1*a1 + k3"),
      parse("2*k1*a1*(a0 + a2) + 2*k1*(a0 + 5*a2) + k2*a1 + k4"
            " + 3*k2*log(a2) - t"),
      parse("k1*(-10*a0^3 + 5*a2^3 - 3*a0^2*a2 + 6*a0*a1^2 + 9*a1^2*a2)"
            " - 6*k2*a0^2 + 3*k2*a1^2 + (9/2)*k2*a2^2 - 18*k1*a0*a1"
            " - 3*k2*a0*a2 + 12*k1*a1*a2 - 6*(3*k1 + k3)*a0 + 3*k3*a2"
            " - 9*k4 + 3*k5 + 3*x")};
  p.system.unknowns = {"a0", "a1", "a2"};
  p.system.constants = {{"k1", 0.0}, {"k2", 1.0}, {"k3", 0.0},
                        {"k4", 0.0}, {"k5", 0.0}};
  p.anchor_t = 0.0;
  p.anchor_x = -1.5;
  p.anchor_a = {-0.5, 0.0, 1.0};
  p.grid = GridSpec{-0.1, 0.1, -1.9, -1.7, 21, 21};
  e.implicit_payload = std::move(p);
  return e;
}

inline void apply_ex3_preset(ExampleEntry& e, const std::string& name) {
  ImplicitPayload& p = *e.implicit_payload;
  if (name == "A") return;  // the stored defaults
  if (name == "B") {
    p.system.constants = {{"k1", 1.0}, {"k2", 0.0}, {"k3", 0.0},
                          {"k4", 0.0}, {"k5", 0.0}};
    p.anchor_t = 5.76;
    p.anchor_x = 0.048;
    p.anchor_a = {0.0, -0.2, 0.6};
    p.grid = GridSpec{5.71, 5.81, 0.0, 0.1, 11, 11};
    return;
  }
  throw RegistryError("unknown preset '" + name + "' for " + e.id +
                      "; available: A, B");
}

inline ExampleEntry build_ex4() {
  ExampleEntry e;
  e.id = "ex4-implicit";
  e.kind = ExampleKind::ImplicitHodograph;
  e.degree = 3;
  e.description =
      "Cubic-integral metric from a separable generator seed; constants "
      "k1..k6.";
  ImplicitPayload p;
  const Expr P = parse("k1*(k2*(a1 - 3/2)/a2^3 - k4/a2 + k3)");
  const Expr R = parse(
      "k5 + (4*k1*k4*(2*a1 - 3)*a2^2"
      " + k1*k2*(8*a0*a2 - 8*a2^2 - 3*(3 - 2*a1)^2)) / (8*a2^4)");
  const Expr S = parse(
      "k1*k4*log(a2) - 2*k5*a1 + k1*k3*(a2 - 2*a0) + k6"
      " + (k1/(8*a2^4)) * (k2*(2*a2^2*(16*a1 - 27)"
      " + 20*a0*a2*(3 - 2*a1) + 3*(2*a1 - 3)^3)"
      " + 4*k4*a2^2*(6*a0*a2 - 4*a1*(a1 - 3) - 9))");
  p.generators = {P, R, S};
  p.system.equations = {P, sub(R, variable("t")),
                        sub(S, parse("(3 - 2*a1)*t - x"))};
  p.system.unknowns = {"a0", "a1", "a2"};
  p.system.constants = {{"k1", 1.0}, {"k2", 1.0}, {"k3", 0.0},
                        {"k4", 0.0}, {"k5", 0.0}, {"k6", 0.0}};
  p.anchor_t = 0.0;
  p.anchor_x = 0.75;
  p.anchor_a = {1.0, 1.5, 1.0};
  p.grid = GridSpec{-0.05, 0.05, 0.70, 0.80, 11, 11};
  e.implicit_payload = std::move(p);
  return e;
}

// Shared by ex5 and ex6: the quartic-family generators P, R, S, T written
// over a0..a3 with the six constants n1..n6 left symbolic.
inline std::vector<Expr> quartic_family_generators() {
  const Expr P = parse(
      "((64*a0^2 + 8*a1^2 + 4*a2^2 + 5*a3^2 + 16*a0*a2 + 8*a1*a3)*n6"
      " - 32*a0*n6 + 5*(4*a0 + a2)*n2 + 5*n5) / 5");
  const Expr R = parse(
      "((8/5)*(2*a0 + a2)*n6 + n2)*a1"
      " + (((8/5)*a0 + 2*a2 + 4)*n6 + (3/2)*n2)*a3 + n1/a3");
  const Expr S = parse(
      "(4/5)*(2*a0^2 + a1^2 + (5/4)*a2^2 + (35/8)*a3^2 + 2*a0*a2"
      " + (5/2)*a1*a3)*n6 + a0*n2 + 4*a2*n6 + (3/2)*a2*n2"
      " + (6*n2 + n5 + 16*n6)*log(a3) + ((2 - a2)/a3^2)*n1 + n3");
  const Expr gamma = parse(
      "60*n4 - 64*a0*(8*a0^2 + 3*a1^2 - 6*a0)*n6 - 40*a2^3*n6"
      " - 6*a2^2*(15*n2 + 8*(2*a0 + 5)*n6)"
      " - 24*a2*((8*a0^2 + 4*a1^2 + 5*a1*a3 - 40)*n6 + 5*(a0 - 3)*n2 + 5*n3)"
      " + 60*a2*n5 - 60*a1^2*n2 - 6*a1*a3*(15*n2 + 8*(2*a0 + 5)*n6)"
      " - 15*(16*a0^2*n2 - 3*a3^2*(5*n2 + 32*n6) + 8*a0*n5)");
  const Expr T = sum(
      {parse("((2*(a2 - 2)^2 - 3*a1*a3)/a3^2)*n1"),
       neg(mul(parse("n1 + 2*(a2 - 2)*(6*n2 + n5 + 16*n6)"),
               log_e(variable("a3")))),
       quotient(gamma, constant(60.0))});
  return {P, R, S, T};
}

inline ExampleEntry build_ex5() {
  ExampleEntry e;
  e.id = "ex5-implicit";
  e.kind = ExampleKind::ImplicitHodograph;
  e.degree = 4;
  e.description =
      "Quartic-integral metric from a quadratic generator seed; constants "
      "n1..n6.";
  ImplicitPayload p;
  p.generators = quartic_family_generators();
  p.system.equations = {p.generators[0], p.generators[1],
                        sub(p.generators[2], variable("t")),
                        sub(p.generators[3], parse("(4 - 2*a2)*t - x"))};
  p.system.unknowns = {"a0", "a1", "a2", "a3"};
  p.system.constants = {{"n1", 0.0}, {"n2", 1.0}, {"n3", 0.0},
                        {"n4", 0.0}, {"n5", -6.0}, {"n6", 0.0}};
  p.anchor_t = 0.0;
  p.anchor_x = -14.55;
  p.anchor_a = {1.8, -1.5, -1.2, 1.0};
  p.grid = GridSpec{-0.05, 0.05, -14.60, -14.50, 11, 11};
  e.implicit_payload = std::move(p);
  return e;
}

inline ExampleEntry build_ex6() {
  ExampleEntry e;
  e.id = "ex6-implicit";
  e.kind = ExampleKind::ImplicitHodograph;
  e.degree = 4;
  e.description =
      "Quartic-integral metric whose conformal factor solves a single "
      "transcendental equation; the other fields are algebraic in it.";
  ImplicitPayload p;
  p.system.equations = {
      parse("5*k*a0 - 6*k*log(a3) + t"),
      parse("2*a1 + 3*a3"),
      parse("a2 + 4*a0"),
      parse("75*k^2*a3^2 + 96*k*(6*k*log(a3) - 2*t - k)*log(a3)"
            " + 16*t^2 + 16*k*t + 20*k*x")};
  p.system.unknowns = {"a0", "a1", "a2", "a3"};
  p.system.constants = {{"k", 1.0}};
  // Same commuting flow as the quartic family at n2 = k, other n_i = 0.
  std::map<std::string, Expr> pick = {
      {"n1", constant(0.0)}, {"n2", variable("k")}, {"n3", constant(0.0)},
      {"n4", constant(0.0)}, {"n5", constant(0.0)}, {"n6", constant(0.0)}};
  for (const Expr& g : quartic_family_generators())
    p.generators.push_back(substitute(g, pick));
  p.anchor_t = 0.0;
  p.anchor_x = -3.75;
  p.anchor_a = {0.0, -1.5, 0.0, 1.0};
  // Fold near x = -3.70 at t = 0; the patch stays on the a3 = 1 side.
  p.grid = GridSpec{-0.05, 0.0, -3.80, -3.75, 11, 11};
  e.implicit_payload = std::move(p);
  return e;
}

inline ExampleEntry build_ex7() {
  ExampleEntry e;
  e.id = "ex7-explicit";
  e.kind = ExampleKind::ExplicitMetric;
  e.degree = 4;
  e.description =
      "Explicit metric with a quartic integral, the hodograph image of the "
      "quartic family.";
  Metric2D m;
  m.g11 = parse("64*(10*x - 1)^2 + 100*y^2");
  m.g12 = parse("240*y*(5*x - 1)");
  m.g22 = parse("9*(25*y^2 + 16)");
  const Expr alpha = parse("(25*y^2 + 160*x - 16)^(-4)");
  MomentumPoly f;
  f.coeff = {
      mul(alpha, parse("81*(125*(5*x - 6)*y^4 - 320*(5*x - 1)*y^2 + 256)")),
      mul(alpha, parse("-27*y*(1875*y^4 + 400*(100*x^2 - 80*x + 3)*y^2"
                       " - 1024*(50*x^2 - 10*x + 3))")),
      mul(alpha, parse("72*(125*(80*x - 3)*y^4"
                       " + 80*(1500*x^3 - 800*x^2 + 95*x + 12)*y^2"
                       " - 512*(10*x - 1)^2*x)")),
      mul(alpha, parse("24*y*(625*y^4 - 200*(700*x^2 - 100*x - 7)*y^2"
                       " - 128*(10*x - 1)^2*(100*x^2 - 20*x + 3))")),
      mul(alpha, parse("4096*(10*x - 1)^4*x"
                       " + 2560*(10*x - 1)^2*(20*x - 3)*y^2"
                       " - 2000*(40*x - 9)*y^4"))};
  e.explicit_payload = ExplicitPayload{
      m, f,
      parse("25*(25*y^2 - 160*x + 208) / (9*(25*y^2 + 160*x - 16)^3)"),
      SamplingBox{-1.0, -0.3, -0.5, 0.5,
                  "keeps 25y^2 + 160x - 16 <= -57.75, clear of the "
                  "singular locus"},
      {parse("25*y^2 + 160*x - 16")}};
  return e;
}

inline ExampleEntry build_ex8() {
  ExampleEntry e;
  e.id = "ex8-implicit";
  e.kind = ExampleKind::ImplicitHodograph;
  e.degree = 5;
  e.description =
      "Quintic-integral metric; the fields solve a five-equation system "
      "with three linear relations.";
  ImplicitPayload p;
  p.system.equations = {
      parse("24*a0 + 4*a2 + 3*a4"),
      parse("8*a1 + 6*a3 + 15"),
      parse("8*a0 + 6*a2 + 15*a4"),
      parse("6*a1 + 15*a3 + 105*log(a4) - 8*t/k"),
      parse("96*a0^2 + 16*a1^2 + 12*a2^2 - 30*a3^2 - 105*a4^2"
            " + 32*a0*a2 + 12*a0*a4 + 30*a2*a4 + 120*a1 - 60*a3 - 16*x/k")};
  p.system.unknowns = {"a0", "a1", "a2", "a3", "a4"};
  p.system.constants = {{"k", 1.0}};
  p.anchor_t = 0.0;
  p.anchor_x = -40215.0 / 1568.0;
  p.anchor_a = {3.0 / 8.0, -75.0 / 28.0, -3.0, 15.0 / 14.0, 1.0};
  p.grid = GridSpec{-0.05, 0.05, -25.75, -25.55, 11, 11};
  e.implicit_payload = std::move(p);
  return e;
}

inline ExampleEntry build_ex9() {
  ExampleEntry e;
  e.id = "ex9-explicit";
  e.kind = ExampleKind::ExplicitMetric;
  e.degree = 5;
  e.description =
      "Explicit metric with a quintic integral assembled from two linear "
      "momentum forms.";
  Metric2D m;
  m.g11 = parse("(2*x + 5)^2 + y^2");
  m.g12 = parse("20*y*(x + 3)");
  m.g22 = parse("100*(y^2 + 1)");

  MomentumPoly a;  // 10y p1 - (2x+5) p2
  a.coeff = {parse("10*y"), parse("-(2*x + 5)")};
  MomentumPoly b;  // 10 p1 - y p2
  b.coeff = {constant(10.0), parse("-y")};
  const MomentumPoly a2 = momentum_product(a, a);
  const MomentumPoly a3 = momentum_product(a2, a);
  const MomentumPoly b2 = momentum_product(b, b);
  const MomentumPoly b3 = momentum_product(b2, b);
  MomentumPoly f = momentum_scale(momentum_product(a3, a2), parse("3*y"));
  f = momentum_sum(f, momentum_scale(momentum_product(momentum_product(a3, a), b),
                                     parse("-3*(2*x + 5)")));
  f = momentum_sum(f, momentum_scale(momentum_product(a3, b2), parse("-24*y")));
  f = momentum_sum(f, momentum_scale(momentum_product(a2, b3), parse("8*x")));
  f = momentum_sum(f, momentum_scale(momentum_product(a, momentum_product(b3, b)),
                                     parse("8*y")));
  f = momentum_sum(f, momentum_scale(momentum_product(b3, b2), constant(8.0)));
  f = momentum_scale(f, parse("(y^2 - 2*x - 5)^(-5)"));

  e.explicit_payload = ExplicitPayload{
      m, f, parse("(y^2 + 2*x + 25) / (100*(y^2 - 2*x - 5)^3)"),
      SamplingBox{-0.5, 0.5, -0.5, 0.5,
                  "keeps y^2 - 2x - 5 <= -3.75, clear of the singular "
                  "locus"},
      {parse("y^2 - 2*x - 5")}};
  return e;
}

inline ExampleEntry build_n1(const std::string& profile) {
  Expr f = parse(profile);
  for (const std::string& v : variables(f))
    if (v != "s")
      throw RegistryError("n1-family profile must use the single variable s"
                          " (got '" + v + "')");
  ExampleEntry e;
  e.id = "n1-family";
  e.kind = ExampleKind::Family;
  e.degree = 1;
  e.description =
      "Traveling-profile metric with a linear integral; the profile f(s) "
      "rides on s = t - x.";
  e.parameters["f"] = to_string(f);
  const Expr g = substitute(f, {{"s", parse("t - x")}});
  auto [metric, integral] =
      semi_geodesic_assembly(g, {g, constant(1.0)}, 1, "t", "x");
  e.explicit_payload = ExplicitPayload{
      metric, integral, Expr{},
      SamplingBox{-1.0, 1.0, -1.0, 1.0, "profile must stay positive here"}};
  return e;
}

inline ExampleEntry build_liouville(const std::string& fs,
                                    const std::string& gs) {
  Expr f = parse(fs), g = parse(gs);
  for (const std::string& v : variables(f))
    if (v != "x")
      throw RegistryError("liouville-n2 profile f must use only x (got '" +
                          v + "')");
  for (const std::string& v : variables(g))
    if (v != "y")
      throw RegistryError("liouville-n2 profile g must use only y (got '" +
                          v + "')");
  ExampleEntry e;
  e.id = "liouville-n2";
  e.kind = ExampleKind::Family;
  e.degree = 2;
  e.description =
      "Conformal metric with separated profiles f(x) + g(y) and the "
      "classical quadratic integral.";
  e.parameters["f"] = to_string(f);
  e.parameters["g"] = to_string(g);
  const Expr lam = add(f, g);
  Metric2D m;
  m.g11 = lam;
  m.g12 = constant(0.0);
  m.g22 = lam;
  MomentumPoly integral;
  integral.coeff = {quotient(g, lam), constant(0.0), neg(quotient(f, lam))};
  e.explicit_payload = ExplicitPayload{
      m, integral, Expr{},
      SamplingBox{-1.0, 1.0, -1.0, 1.0, "f + g must stay positive here"}};
  return e;
}

inline const std::vector<std::string>& example_order() {
  static const std::vector<std::string> ids = {
      "ex0-family",   "ex1-implicit", "ex2-explicit", "ex3-implicit",
      "ex4-implicit", "ex5-implicit", "ex6-implicit", "ex7-explicit",
      "ex8-implicit", "ex9-explicit", "n1-family",    "liouville-n2"};
  return ids;
}

inline ExampleEntry build_defaults(const std::string& id) {
  if (id == "ex0-family") return build_ex0(3);
  if (id == "ex1-implicit") return build_ex1();
  if (id == "ex2-explicit") return build_ex2();
  if (id == "ex3-implicit") return build_ex3();
  if (id == "ex4-implicit") return build_ex4();
  if (id == "ex5-implicit") return build_ex5();
  if (id == "ex6-implicit") return build_ex6();
  if (id == "ex7-explicit") return build_ex7();
  if (id == "ex8-implicit") return build_ex8();
  if (id == "ex9-explicit") return build_ex9();
  if (id == "n1-family") return build_n1("2 + sin(s)");
  if (id == "liouville-n2") return build_liouville("exp(x)", "y^2 + 1");
  std::string msg = "unknown example id '" + id + "'; available:";
  for (const std::string& known : example_order()) msg += " " + known;
  throw RegistryError(msg);
}

inline double parse_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    throw RegistryError("override " + key + "=" + value +
                        " is not a number");
  return out;
}

}  // namespace detail

inline ExampleEntry get_example(
    const std::string& id,
    const std::map<std::string, std::string>& overrides) {
  // Family parameters regenerate the payload, so collect them first.
  std::map<std::string, std::string> params;
  std::string preset;
  std::map<std::string, std::string> consts;
  ExampleEntry base = detail::build_defaults(id);
  for (const auto& [key, value] : overrides) {
    if (key == "preset") {
      preset = value;
    } else if (base.parameters.count(key)) {
      params[key] = value;
    } else if (base.implicit_payload &&
               base.implicit_payload->system.constants.count(key)) {
      consts[key] = value;
    } else {
      std::string msg = "unknown override '" + key + "' for " + id +
                        "; accepted:";
      for (const auto& [p, unused] : base.parameters) msg += " " + p;
      if (base.implicit_payload)
        for (const auto& [c, unused] :
             base.implicit_payload->system.constants)
          msg += " " + c;
      if (!base.presets.empty()) msg += " preset";
      throw RegistryError(msg);
    }
  }

  ExampleEntry e = std::move(base);
  if (!params.empty()) {
    if (id == "ex0-family") {
      const double nd = detail::parse_number("n", params.at("n"));
      const int n = static_cast<int>(nd);
      if (static_cast<double>(n) != nd)
        throw RegistryError("ex0-family parameter n must be an integer");
      e = detail::build_ex0(n);
    } else if (id == "n1-family") {
      e = detail::build_n1(params.at("f"));
    } else if (id == "liouville-n2") {
      std::string f = params.count("f") ? params.at("f")
                                        : e.parameters.at("f");
      std::string g = params.count("g") ? params.at("g")
                                        : e.parameters.at("g");
      e = detail::build_liouville(f, g);
    }
  }
  if (!preset.empty()) {
    if (e.id != "ex3-implicit")
      throw RegistryError("example " + id + " has no presets");
    detail::apply_ex3_preset(e, preset);
  }
  for (const auto& [key, value] : consts)
    e.implicit_payload->system.constants[key] =
        detail::parse_number(key, value);
  return e;
}

inline ExampleEntry get_example(const std::string& id) {
  return get_example(id, {});
}

inline std::vector<ExampleInfo> list_examples() {
  std::vector<ExampleInfo> out;
  for (const std::string& id : detail::example_order()) {
    ExampleEntry e = detail::build_defaults(id);
    out.push_back({e.id, e.kind, e.degree, e.description});
  }
  return out;
}

// Config-file schema: the same JSON shape users write to define their own
// metrics or implicit systems. Expressions travel as strings and round-trip
// through the parser.
inline nlohmann::ordered_json to_config_json(const ExampleEntry& e) {
  nlohmann::ordered_json j;
  j["id"] = e.id;
  j["kind"] = kind_name(e.kind);
  j["degree"] = e.degree;
  j["description"] = e.description;
  if (!e.parameters.empty()) {
    nlohmann::ordered_json p;
    for (const auto& [k, v] : e.parameters) p[k] = v;
    j["parameters"] = p;
  }
  if (!e.presets.empty()) j["presets"] = e.presets;
  if (e.explicit_payload) {
    const ExplicitPayload& x = *e.explicit_payload;
    j["metric"] = {{"coords", {x.metric.u1, x.metric.u2}},
                   {"g11", to_string(x.metric.g11)},
                   {"g12", to_string(x.metric.g12)},
                   {"g22", to_string(x.metric.g22)}};
    std::vector<std::string> coeffs;
    for (const Expr& c : x.integral.coeff) coeffs.push_back(to_string(c));
    j["integral"] = {{"coefficients", coeffs}};
    if (x.curvature) j["curvature"] = to_string(x.curvature);
    j["box"] = {{"x0", x.box.x0}, {"x1", x.box.x1}, {"y0", x.box.y0},
                {"y1", x.box.y1}, {"note", x.box.note}};
    if (!x.singular_loci.empty()) {
      std::vector<std::string> loci;
      for (const Expr& phi : x.singular_loci) loci.push_back(to_string(phi));
      j["singular_loci"] = loci;
    }
  }
  if (e.implicit_payload) {
    const ImplicitPayload& p = *e.implicit_payload;
    std::vector<std::string> eqs;
    for (const Expr& q : p.system.equations) eqs.push_back(to_string(q));
    j["system"] = {{"unknowns", p.system.unknowns}, {"equations", eqs}};
    if (!p.system.constants.empty()) {
      nlohmann::ordered_json c;
      for (const auto& [k, v] : p.system.constants) c[k] = v;
      j["constants"] = c;
    }
    if (!p.generators.empty()) {
      std::vector<std::string> gens;
      for (const Expr& g : p.generators) gens.push_back(to_string(g));
      j["generators"] = gens;
    }
    j["anchor"] = {{"t", p.anchor_t}, {"x", p.anchor_x}, {"a", p.anchor_a}};
    j["grid"] = {{"t0", p.grid.t0}, {"t1", p.grid.t1}, {"x0", p.grid.x0},
                 {"x1", p.grid.x1}, {"nt", p.grid.nt}, {"nx", p.grid.nx}};
  }
  return j;
}

inline ExampleEntry entry_from_config_json(const nlohmann::ordered_json& j) {
  ExampleEntry e;
  try {
    e.id = j.at("id").get<std::string>();
    e.kind = kind_from_name(j.at("kind").get<std::string>());
    e.degree = j.at("degree").get<int>();
    e.description = j.value("description", std::string{});
    if (j.contains("parameters"))
      for (const auto& [k, v] : j.at("parameters").items())
        e.parameters[k] = v.get<std::string>();
    if (j.contains("presets"))
      e.presets = j.at("presets").get<std::vector<std::string>>();
    if (j.contains("metric")) {
      ExplicitPayload x;
      const auto& m = j.at("metric");
      const auto coords = m.at("coords").get<std::vector<std::string>>();
      if (coords.size() != 2)
        throw RegistryError("metric.coords must list two names");
      x.metric.u1 = coords[0];
      x.metric.u2 = coords[1];
      x.metric.g11 = parse(m.at("g11").get<std::string>());
      x.metric.g12 = parse(m.at("g12").get<std::string>());
      x.metric.g22 = parse(m.at("g22").get<std::string>());
      x.integral.u1 = coords[0];
      x.integral.u2 = coords[1];
      for (const auto& c :
           j.at("integral").at("coefficients").get<std::vector<std::string>>())
        x.integral.coeff.push_back(parse(c));
      if (j.contains("curvature"))
        x.curvature = parse(j.at("curvature").get<std::string>());
      if (j.contains("box")) {
        const auto& b = j.at("box");
        x.box = SamplingBox{b.at("x0").get<double>(), b.at("x1").get<double>(),
                            b.at("y0").get<double>(), b.at("y1").get<double>(),
                            b.value("note", std::string{})};
      }
      if (j.contains("singular_loci"))
        for (const auto& phi :
             j.at("singular_loci").get<std::vector<std::string>>())
          x.singular_loci.push_back(parse(phi));
      e.explicit_payload = std::move(x);
    }
    if (j.contains("system")) {
      ImplicitPayload p;
      const auto& s = j.at("system");
      p.system.unknowns = s.at("unknowns").get<std::vector<std::string>>();
      for (const auto& q :
           s.at("equations").get<std::vector<std::string>>())
        p.system.equations.push_back(parse(q));
      if (j.contains("constants"))
        for (const auto& [k, v] : j.at("constants").items())
          p.system.constants[k] = v.get<double>();
      if (j.contains("generators"))
        for (const auto& g :
             j.at("generators").get<std::vector<std::string>>())
          p.generators.push_back(parse(g));
      const auto& a = j.at("anchor");
      p.anchor_t = a.at("t").get<double>();
      p.anchor_x = a.at("x").get<double>();
      p.anchor_a = a.at("a").get<std::vector<double>>();
      const auto& g = j.at("grid");
      p.grid = GridSpec{g.at("t0").get<double>(), g.at("t1").get<double>(),
                        g.at("x0").get<double>(), g.at("x1").get<double>(),
                        g.at("nt").get<int>(),    g.at("nx").get<int>()};
      e.implicit_payload = std::move(p);
    }
  } catch (const nlohmann::json::exception& err) {
    throw RegistryError(std::string("malformed example config: ") +
                        err.what());
  }
  if (!e.explicit_payload && !e.implicit_payload)
    throw RegistryError(
        "example config needs a metric+integral or an implicit system");
  return e;
}

}  // namespace geoflow
