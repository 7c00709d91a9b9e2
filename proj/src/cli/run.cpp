#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

#include "detail.hpp"
#include "iew/estimation.hpp"
#include "iew/fredholm2.hpp"
#include "iew/illposed.hpp"
#include "iew/nonlinear.hpp"
#include "iew/singular.hpp"
#include "iew/volterra.hpp"
#include "iew/wiener_hopf.hpp"

namespace iew::cli {

namespace detail {

quad::QuadRule parse_rule(Fields f) {
  const std::string type = f.string("type", "gauss_legendre");
  quad::IntervalKind kind;
  if (type == "gauss_legendre") kind = quad::IntervalKind::gauss_legendre;
  else if (type == "trapezoid") kind = quad::IntervalKind::trapezoid;
  else throw ConfigError(f.where("type") + ": unknown rule '" + type + "' (gauss_legendre, trapezoid)");
  const int n = f.integer("n");
  const double a = f.number("a", -1.0), b = f.number("b", 1.0);
  f.finish();
  if (n < 2) throw ConfigError(f.where("n") + ": need at least 2 nodes");
  if (!(b > a)) throw ConfigError(f.where("b") + ": interval must satisfy b > a");
  return quad::build_interval_rule(kind, n, a, b);
}

quad::Kernel parse_kernel(Fields f) {
  const std::string name = f.string("name");
  std::map<std::string, double> params;
  if (name == "const") {
    params["c"] = f.number("c", 1.0);
    params["c_im"] = f.number("c_im", 0.0);
  } else if (name == "sin_diff" || name == "exp_abs") {
  } else if (name == "helmholtz_g" || name == "laplace_g") {
    throw ConfigError(f.where("name") + ": '" + name + "' is weakly singular and only used by the scattering kinds");
  } else {
    throw ConfigError(f.where("name") + ": unknown kernel '" + name + "' (const, sin_diff, exp_abs)");
  }
  f.finish();
  return quad::Kernel::from_catalog(name, params);
}

scattering::IncidentWave parse_wave(Fields f) {
  const double k = f.number("k", 1.0);
  const Vec3 alpha = f.vec3("alpha", Vec3::UnitZ());
  f.finish();
  if (!(k > 0.0)) throw ConfigError(f.where("k") + ": wavenumber must be positive");
  if (std::abs(alpha.norm() - 1.0) > 1e-12) throw ConfigError(f.where("alpha") + ": direction must be a unit vector");
  return scattering::IncidentWave(k, alpha);
}

scattering::Medium parse_medium(Fields f, double k) {
  scattering::Medium m;
  m.omega.lo = f.vec3("lo", Vec3::Zero());
  m.omega.hi = f.vec3("hi", Vec3::Ones());
  const double n = f.number("N", 1.0);
  const cplx h = f.complex("h", 0.0);
  m.c = f.number("c", 4.0 * pi);
  f.finish();
  if (n < 0.0) throw ConfigError(f.where("N") + ": density must be non-negative");
  if (h.imag() > 0.0) throw ConfigError(f.where("h") + ": Im h must be <= 0");
  if ((m.omega.hi - m.omega.lo).minCoeff() <= 0.0) throw ConfigError(f.where("hi") + ": box must have positive extent");
  m.N = [n](const Vec3&) { return n; };
  m.h = [h](const Vec3&) { return h; };
  m.k = k;
  return m;
}

ParticleSettings parse_particles(Fields& f) {
  ParticleSettings s;
  s.kappa = f.number("kappa", 0.0);
  s.placement.b = f.number("b", 0.25);
  s.placement.jitter = f.number("jitter", 0.3);
  s.placement.seed = static_cast<std::uint64_t>(f.integer("seed", 1));
  return s;
}

bool decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace detail

namespace {

using namespace detail;

void add_samples(Table& t, const RealVector& x, const Vector& u) {
  t.header = {"x", "u_re", "u_im"};
  for (Eigen::Index i = 0; i < x.size(); ++i) t.add_row({x[i], u[i].real(), u[i].imag()});
}

Vector sample_spec(const quad::QuadRule& rule, const FunctionSpec& f) { return quad::sample(rule, f.function()); }

Outcome run_fredholm2(Fields& f) {
  const quad::QuadRule rule = parse_rule(f.object("rule"));
  const quad::Kernel kernel = parse_kernel(f.object("kernel"));
  fredholm::SolveSpec spec;
  spec.mu = f.complex("mu", 1.0);
  spec.lambda = f.complex("lambda", 1.0);
  const FunctionSpec rhs = FunctionSpec::parse(f.raw("rhs"), f.where("rhs"));
  const std::string method = f.string("method", "direct");
  Outcome out;

  if (method == "direct") {
    f.finish();
    const auto op = quad::assemble_nystrom(kernel, rule);
    spec.rhs = sample_spec(rule, rhs);
    const auto [rep, alt] = fredholm::solve_second_kind(op, spec);
    add_samples(out.table, rule.nodes(), rep.solution);
    out.diagnostics["residual"] = rep.residual;
    out.diagnostics["solvable"] = rep.solvable;
    out.diagnostics["null_dim"] = alt.null_dim;
    out.diagnostics["adjoint_null_dim"] = alt.adjoint_null_dim;
    if (!rep.solvable) {
      out.failed = true;
      out.message = "unsolvable: right-hand side is not orthogonal to the adjoint null space";
    }
  } else if (method == "iterative") {
    fredholm::IterativeOptions opt;
    const auto variant = fredholm::parse_variant(f.string("variant", "symmetrized"));
    opt.max_iter = f.integer("max_iter", opt.max_iter);
    opt.tol = f.number("tol", opt.tol);
    f.finish();
    const auto op = quad::assemble_nystrom(kernel, rule);
    spec.rhs = sample_spec(rule, rhs);
    const auto rep = fredholm::solve_iterative(op, spec, variant, opt);
    add_samples(out.table, rule.nodes(), rep.solution);
    out.diagnostics["variant"] = fredholm::to_string(rep.variant);
    out.diagnostics["iterations"] = rep.iterations;
    out.diagnostics["rho_estimate"] = rep.rho_estimate;
    out.diagnostics["final_residual"] = rep.residual_history.empty() ? 0.0 : rep.residual_history.back();
    out.diagnostics["converged"] = rep.converged;
    if (!rep.converged) {
      out.failed = true;
      out.message = rep.diverged ? "iteration diverged" : "iteration did not converge within max_iter";
    }
  } else if (method == "spectral") {
    f.finish();
    if (spec.lambda != cplx(1.0)) throw ConfigError(f.where("lambda") + ": the spectral method needs lambda = 1");
    const auto op = quad::assemble_nystrom(kernel, rule);
    spec.rhs = sample_spec(rule, rhs);
    const auto decomp = fredholm::eig_decompose(op);
    const Vector u = fredholm::solve_selfadjoint_spectral(decomp, spec.rhs, spec.mu);
    add_samples(out.table, rule.nodes(), u);
    Json cv = Json::array();
    const RealVector chars = decomp.characteristic_values();
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(chars.size(), 8); ++i) cv.push_back(chars[i]);
    out.diagnostics["leading_characteristic_values"] = cv;
  } else if (method == "projection") {
    const std::string basis = f.string("basis", "legendre");
    fredholm::BasisFamily family;
    if (basis == "legendre") family = fredholm::BasisFamily::legendre;
    else if (basis == "fourier") family = fredholm::BasisFamily::fourier;
    else throw ConfigError(f.where("basis") + ": unknown basis '" + basis + "' (legendre, fourier)");
    std::vector<int> ns;
    for (double v : f.numbers("projection_n")) {
      if (v != std::floor(v) || v < 1) throw ConfigError(f.where("projection_n") + ": entries must be positive integers");
      ns.push_back(static_cast<int>(v));
    }
    f.finish();
    if (ns.empty()) throw ConfigError(f.where("projection_n") + ": needs at least one entry");
    const auto op = quad::assemble_nystrom(kernel, rule);
    spec.rhs = sample_spec(rule, rhs);
    const auto rep = fredholm::solve_projection(op, spec, family, ns);
    out.table.header = {"n", "error"};
    std::vector<double> errs;
    for (const auto& s : rep.steps) {
      out.table.add_row({static_cast<double>(s.n), s.error_vs_finest});
      errs.push_back(s.error_vs_finest);
    }
    out.diagnostics["monotone"] = decreasing(errs);
    out.diagnostics["tail_decreasing"] = rep.tail_decreasing;
  } else {
    throw ConfigError(f.where("method") + ": unknown method '" + method + "' (direct, iterative, spectral, projection)");
  }
  return out;
}

Outcome run_volterra(Fields& f) {
  volterra::VolterraProblem p;
  if (f.has("kernel")) p.kernel = parse_kernel(f.object("kernel"));
  p.mu = f.complex("mu", 1.0);
  p.f = FunctionSpec::parse(f.raw("rhs"), f.where("rhs")).function();
  p.a = f.number("a", 0.0);
  p.b = f.number("b", 1.0);
  p.n = f.integer("n", 201);
  const std::string method = f.string("method", "direct");
  f.finish();
  if (!(p.b > p.a)) throw ConfigError(f.where("b") + ": interval must satisfy b > a");
  Outcome out;
  if (method == "direct") {
    const auto sol = volterra::solve_direct(p);
    add_samples(out.table, sol.nodes, sol.u);
    out.diagnostics["n_used"] = sol.n_used;
  } else if (method == "picard") {
    const auto rep = volterra::solve_picard(p);
    add_samples(out.table, volterra::nodes(p), rep.solution);
    out.diagnostics["iterations"] = rep.iterations;
    out.diagnostics["converged"] = rep.converged;
    if (!rep.converged) {
      out.failed = true;
      out.message = "Picard iteration did not converge";
    }
  } else {
    throw ConfigError(f.where("method") + ": unknown method '" + method + "' (direct, picard)");
  }
  return out;
}

Outcome run_firstkind(Fields& f, std::optional<std::uint64_t> seed) {
  const quad::QuadRule rule = parse_rule(f.object("rule"));
  const quad::Kernel kernel = parse_kernel(f.object("kernel"));
  const FunctionSpec exact = FunctionSpec::parse(f.raw("solution"), f.where("solution"));
  const double delta = f.number("delta");
  const auto from_config = static_cast<std::uint64_t>(f.integer("seed", 1));
  const std::uint64_t s = seed ? *seed : from_config;
  const auto method = illposed::parse_method(f.string("method", "tikhonov"));
  illposed::FirstKindOptions opt;
  if (f.has("truncation")) opt.truncation = f.integer("truncation");
  opt.tsvd_discrepancy = f.boolean("discrepancy", false);
  f.finish();
  if (delta < 0.0) throw ConfigError(f.where("delta") + ": noise level must be non-negative");

  const auto op = quad::assemble_nystrom(kernel, rule);
  const Vector u_true = sample_spec(rule, exact);
  illposed::NoisyData data;
  data.delta = delta;
  data.f_delta = op.apply(u_true) + illposed::make_noise(rule.weights(), delta, s);
  const auto sol = illposed::solve_first_kind(op, data, method, opt);

  Outcome out;
  out.table.header = {"x", "u_re", "u_im", "exact_re", "exact_im"};
  for (Eigen::Index i = 0; i < u_true.size(); ++i)
    out.table.add_row({rule.nodes()[i], sol.u_delta[i].real(), sol.u_delta[i].imag(), u_true[i].real(), u_true[i].imag()});
  const double err = op.norm(sol.u_delta - u_true) / std::max(op.norm(u_true), 1e-300);
  out.diagnostics["method"] = illposed::to_string(method);
  out.diagnostics["parameter"] = sol.parameter;
  out.diagnostics["discrepancy"] = sol.discrepancy;
  out.diagnostics["discrepancy_principle"] = sol.discrepancy_principle;
  out.diagnostics["discrepancy_met"] = sol.discrepancy_met;
  out.diagnostics["noise_dominates"] = sol.noise_dominates;
  out.diagnostics["relative_error"] = err;
  out.diagnostics["seed"] = s;
  return out;
}

singular::CircleFunction parse_circle(const Json& j, const std::string& path, int size) {
  if (j.is_number()) return singular::CircleFunction::constant(j.get<double>(), size);
  if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a number or a non-empty array of modes");
  std::map<int, cplx> modes;
  for (std::size_t i = 0; i < j.size(); ++i) {
    Fields m(j[i], path + "[" + std::to_string(i) + "]");
    const int n = m.integer("n");
    const cplx c(m.number("re", 0.0), m.number("im", 0.0));
    m.finish();
    if (2 * std::abs(n) >= size) throw ConfigError(m.where("n") + ": mode not resolved by the node count");
    modes[n] += c;
  }
  return singular::CircleFunction::from_modes(modes, size);
}

Outcome run_riemann(Fields& f) {
  const int size = f.integer("modes", 128);
  if (size < 8 || size % 2) throw ConfigError(f.where("modes") + ": must be even and at least 8");
  singular::RiemannProblem p;
  p.G = parse_circle(f.raw("G"), f.where("G"), size);
  p.g = f.has("g") ? parse_circle(f.raw("g"), f.where("g"), size) : singular::CircleFunction::constant(0.0, size);
  f.finish();
  const auto sol = singular::solve_riemann(p);
  Outcome out;
  out.table.header = {"theta", "phi_plus_re", "phi_plus_im", "phi_minus_re", "phi_minus_im"};
  for (int j = 0; j < size; ++j)
    out.table.add_row({2.0 * pi * j / size, sol.phi_plus.samples()[j].real(), sol.phi_plus.samples()[j].imag(),
                       sol.phi_minus.samples()[j].real(), sol.phi_minus.samples()[j].imag()});
  out.diagnostics["kappa"] = sol.kappa;
  out.diagnostics["boundary_residual"] = sol.boundary_residual;
  out.diagnostics["homogeneous_dimension"] = sol.homogeneous.size();
  Json cond = Json::array();
  for (const cplx& c : sol.solvability_conditions) cond.push_back({c.real(), c.imag()});
  out.diagnostics["solvability_conditions"] = cond;
  out.diagnostics["solvable"] = sol.solvable;
  if (!sol.solvable) {
    out.failed = true;
    out.message = "unsolvable: solvability conditions violated (kappa = " + std::to_string(sol.kappa) + ")";
  }
  return out;
}

Outcome run_wiener_hopf(Fields& f) {
  Fields sym = f.object("symbol");
  const std::string name = sym.string("name");
  const ComplexFunction rhs = FunctionSpec::parse(f.raw("f"), f.where("f")).function();
  singular::WienerHopfProblem p;
  if (name == "exp_abs") p = singular::WienerHopfProblem::exp_abs(sym.number("lambda"), rhs);
  else if (name == "causal_exp") p = singular::WienerHopfProblem::causal_exp(sym.number("c"), rhs);
  else throw ConfigError(sym.where("name") + ": unknown symbol '" + name + "' (exp_abs, causal_exp)");
  sym.finish();
  p.T = f.number("T", p.T);
  p.modes = f.integer("modes", p.modes);
  p.sigma = f.number("sigma", p.sigma);
  p.output_points = f.integer("output_points", p.output_points);
  f.finish();

  Outcome out;
  out.table.header = {"t", "u_re", "u_im"};
  const int kappa = singular::wiener_hopf_index(p);
  out.diagnostics["kappa"] = kappa;
  if (kappa != 0) {
    out.failed = true;
    out.message = "index nonzero: kappa = " + std::to_string(kappa);
    return out;
  }
  const auto sol = singular::solve_wiener_hopf(p);
  for (Eigen::Index i = 0; i < sol.t.size(); ++i) out.table.add_row({sol.t[i], sol.u[i].real(), sol.u[i].imag()});
  out.diagnostics["residual"] = sol.residual;
  out.diagnostics["tail_mode"] = sol.tail_mode;
  return out;
}

Outcome run_estimation(Fields& f) {
  const FunctionSpec spec = FunctionSpec::parse(f.raw("f"), f.where("f"));
  const int n = f.integer("n", 64);
  f.finish();
  if (!spec.real_valued()) throw ConfigError(f.where("f") + ": must be real valued");
  if (n < 4) throw ConfigError(f.where("n") + ": need at least 4 points");
  const auto sol = estimation::solve_exp_kernel({spec.real_part(0), spec.real_part(1), spec.real_part(2)});
  const auto rule = quad::build_interval_rule(quad::IntervalKind::gauss_legendre, n, -1.0, 1.0);
  Outcome out;
  out.table.header = {"x", "h_regular", "f", "Rh"};
  double worst = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes().size(); ++i) {
    const double x = rule.nodes()[i];
    const double fx = spec(x).real(), rh = estimation::apply_R(sol, x, rule);
    worst = std::max(worst, std::abs(fx - rh));
    out.table.add_row({x, sol.regular(x), fx, rh});
  }
  out.diagnostics["atom_right"] = sol.atom_right;
  out.diagnostics["atom_left"] = sol.atom_left;
  out.diagnostics["ordsing"] = sol.ordsing;
  out.diagnostics["roundtrip_error"] = worst;
  return out;
}

Outcome run_nonlinear(Fields& f) {
  const quad::QuadRule rule = parse_rule(f.object("rule"));
  Fields kf = f.object("kernel");
  const std::string name = kf.string("name");
  const double c = kf.number("c", 1.0);
  const std::string weight = kf.string("weight", "constant");
  kf.finish();
  std::function<double(double)> g;
  if (name == "sin") g = [](double u) { return std::sin(u); };
  else if (name == "linear") g = [](double u) { return u; };
  else if (name == "square") g = [](double u) { return u * u; };
  else if (name == "cube") g = [](double u) { return u * u * u; };
  else if (name == "arctan") g = [](double u) { return std::atan(u); };
  else throw ConfigError(kf.where("name") + ": unknown nonlinearity '" + name + "' (sin, linear, square, cube, arctan)");
  std::function<double(double, double)> wfun;
  if (weight == "constant") wfun = [](double, double) { return 1.0; };
  else if (weight == "exp_abs") wfun = [](double x, double t) { return std::exp(-std::abs(x - t)); };
  else throw ConfigError(kf.where("weight") + ": unknown weight '" + weight + "' (constant, exp_abs)");
  const nonlinear::UrysohnKernel kernel = [c, g, wfun](double x, double t, double u) { return c * wfun(x, t) * g(u); };

  const double mu = f.number("mu", 1.0);
  const FunctionSpec rhs = FunctionSpec::parse(f.raw("f"), f.where("f"));
  if (!rhs.real_valued()) throw ConfigError(f.where("f") + ": must be real valued");
  const std::string method = f.string("method", "contraction");
  std::optional<double> q;
  if (f.has("q")) q = f.number("q");
  const int max_iter = f.integer("max_iter", 500);
  const double tol = f.number("tol", 1e-12);
  std::optional<std::pair<double, double>> bracket;
  if (f.has("bracket")) {
    Fields b = f.object("bracket");
    bracket = std::make_pair(b.number("v"), b.number("w"));
    b.finish();
  }
  const int steps = f.integer("steps", 10);
  const double start = f.number("initial", 0.0);
  f.finish();

  const nonlinear::UrysohnOperator op(kernel, mu, rhs.real_part(), rule, q);
  const auto n = static_cast<Eigen::Index>(rule.size());
  const RealVector u0 = RealVector::Constant(n, start);
  Outcome out;
  RealVector u;
  if (method == "contraction") {
    nonlinear::ContractionOptions opt;
    opt.max_iter = max_iter;
    opt.tol = tol;
    opt.q = q;
    const auto rep = nonlinear::solve_contraction(op, u0, opt);
    u = rep.solution;
    out.diagnostics["iterations"] = rep.iterations;
    out.diagnostics["q"] = rep.q;
    out.diagnostics["converged"] = rep.converged;
    if (!rep.converged) {
      out.failed = true;
      out.message = "contraction iteration did not converge";
    }
  } else if (method == "monotone") {
    if (!bracket) throw ConfigError(f.where("bracket") + ": monotone method needs a bracket {v, w}");
    const auto br = nonlinear::make_bracket(op.as_map(), RealVector::Constant(n, bracket->first),
                                            RealVector::Constant(n, bracket->second));
    nonlinear::MonotoneOptions opt;
    opt.max_iter = max_iter;
    opt.tol = tol;
    const auto rep = nonlinear::solve_monotone(op.as_map(), br, opt);
    u = rep.solution;
    out.diagnostics["iterations"] = rep.iterations;
    out.diagnostics["final_gap"] = rep.gaps.empty() ? 0.0 : rep.gaps.back();
    out.diagnostics["converged"] = rep.converged;
    if (!rep.converged) {
      out.failed = true;
      out.message = "monotone iteration did not close the bracket";
    }
  } else if (method == "continuation") {
    if (steps < 1) throw ConfigError(f.where("steps") + ": must be positive");
    const RealVector fs = op.f_samples();
    const nonlinear::ParametricMap family = [op, fs](const RealVector& v, double lambda) -> RealVector {
      return lambda * (op(v) - fs) + fs;
    };
    nonlinear::ContinuationOptions opt;
    opt.contraction.max_iter = max_iter;
    opt.contraction.tol = tol;
    opt.contraction.q = q;
    const auto rep = nonlinear::solve_continuation(family, u0, steps, opt);
    u = rep.solution;
    out.diagnostics["steps"] = steps;
    out.diagnostics["residual"] = rep.residual;
  } else {
    throw ConfigError(f.where("method") + ": unknown method '" + method + "' (contraction, monotone, continuation)");
  }
  out.table.header = {"x", "u"};
  for (Eigen::Index i = 0; i < n; ++i) out.table.add_row({rule.nodes()[i], u[i]});
  out.diagnostics["fixed_point_residual"] = nonlinear::sup_norm(op(u) - u);
  return out;
}

Outcome run_scatter_single(Fields& f) {
  using namespace scattering;
  Fields bf = f.object("body");
  const std::string bc = bf.string("bc");
  const double a = bf.number("radius");
  const Vec3 center = bf.vec3("center", Vec3::Zero());
  const cplx zeta = bf.complex("zeta", 0.0);
  bf.finish();
  const IncidentWave wave = parse_wave(f.object("wave"));
  const int n_theta = f.integer("n_theta", 16);
  const int directions = f.integer("directions", 13);
  f.finish();
  if (directions < 2) throw ConfigError(f.where("directions") + ": need at least 2");
  if (n_theta < 4) throw ConfigError(f.where("n_theta") + ": need at least 4");

  Body body;
  if (bc == "impedance") body = Body::impedance(center, a, zeta);
  else if (bc == "dirichlet") body = Body::dirichlet(center, a);
  else if (bc == "neumann") body = Body::neumann(center, a);
  else throw ConfigError(bf.where("bc") + ": unknown boundary condition '" + bc + "' (impedance, dirichlet, neumann)");

  Outcome out;
  out.diagnostics["ka"] = wave.k * a;
  const auto rule = quad::build_sphere_rule(n_theta, 2 * n_theta, a, center);
  std::optional<Mat3> tensor;
  if (body.bc == Boundary::neumann) {
    tensor = polarizability_tensor(body, rule);
    Json t = Json::array();
    for (int i = 0; i < 3; ++i) t.push_back({(*tensor)(i, 0), (*tensor)(i, 1), (*tensor)(i, 2)});
    out.diagnostics["polarizability"] = t;
  } else {
    const cplx q_asym = single_body_charge(body, wave);
    const cplx q_exact = solve_boundary_integral(body, wave, rule).Q;
    out.diagnostics["Q_asymptotic"] = {q_asym.real(), q_asym.imag()};
    out.diagnostics["Q_boundary_integral"] = {q_exact.real(), q_exact.imag()};
    out.diagnostics["relative_difference"] = std::abs(q_asym - q_exact) / std::abs(q_exact);
  }
  out.table.header = {"theta", "A_re", "A_im"};
  // beta sweeps the plane spanned by alpha and a perpendicular direction
  const Vec3 alpha = wave.alpha;
  const Vec3 perp = (std::abs(alpha[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(alpha).normalized();
  for (int i = 0; i < directions; ++i) {
    const double theta = pi * i / (directions - 1);
    const Vec3 beta = std::cos(theta) * alpha + std::sin(theta) * perp;
    const cplx A = amplitude(body, wave, beta, tensor);
    out.table.add_row({theta, A.real(), A.imag()});
  }
  return out;
}

Outcome run_scatter_many(Fields& f, std::optional<std::uint64_t> seed) {
  using namespace scattering;
  const IncidentWave wave = parse_wave(f.object("wave"));
  const Medium medium = parse_medium(f.object("medium"), wave.k);
  const double a = f.number("a");
  ParticleSettings ps = parse_particles(f);
  if (seed) ps.placement.seed = *seed;
  const bool reduce = f.boolean("reduce", true);
  f.finish();

  const ParticleCloud cloud = place_particles(medium, a, ps.kappa, ps.placement);
  Outcome out;
  out.diagnostics["particles"] = cloud.size();
  out.diagnostics["min_spacing"] = cloud.d;
  out.diagnostics["separation_ordering"] = cloud.separation_ordering;
  out.diagnostics["seed"] = ps.placement.seed;
  out.table.header = {"x", "y", "z", "u_re", "u_im", "Q_re", "Q_im"};
  if (cloud.size() == 0) return out;
  const ManyBodyResult las = many_body_solve(cloud, wave);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    const Vec3& p = cloud.points[i];
    out.table.add_row({p[0], p[1], p[2], las.u[e].real(), las.u[e].imag(), las.Q[e].real(), las.Q[e].imag()});
  }
  out.diagnostics["dense"] = las.dense;
  out.diagnostics["iterations"] = las.iterations;
  out.diagnostics["residual"] = las.residual;
  if (reduce) {
    const CubeReduction red = reduce_to_cubes(cloud, medium, wave, &las);
    out.diagnostics["cube_reduction_max_relative_deviation"] = red.max_relative_deviation;
  }
  return out;
}

Outcome run_effective_medium(Fields& f) {
  using namespace scattering;
  const IncidentWave wave = parse_wave(f.object("wave"));
  const Medium medium = parse_medium(f.object("medium"), wave.k);
  const int grid_n = f.integer("grid_n", 16);
  if (f.has("particles")) f.raw("particles");  // consumed by study
  f.finish();
  if (grid_n < 1 || grid_n > 32) throw ConfigError(f.where("grid_n") + ": must lie in [1, 32]");
  const EffectiveMediumResult em = effective_medium_solve(medium, wave, grid_n);
  Outcome out;
  out.table.header = {"x", "y", "z", "u_re", "u_im", "n2_re", "n2_im"};
  for (std::size_t i = 0; i < em.points.size(); ++i) {
    const auto e = static_cast<Eigen::Index>(i);
    const Vec3& p = em.points[i];
    out.table.add_row({p[0], p[1], p[2], em.u[e].real(), em.u[e].imag(), em.n2[e].real(), em.n2[e].imag()});
  }
  out.diagnostics["cells"] = em.points.size();
  out.diagnostics["iterations"] = em.iterations;
  return out;
}

}  // namespace

Outcome run_problem(const ProblemConfig& config, std::optional<std::uint64_t> seed) {
  Fields f(config.document, "");
  f.string("kind");
  f.string("description", "");
  if (f.has("study")) f.raw("study");
  const std::string& k = config.kind;
  if (k == "fredholm2") return run_fredholm2(f);
  if (k == "volterra") return run_volterra(f);
  if (k == "firstkind") return run_firstkind(f, seed);
  if (k == "riemann") return run_riemann(f);
  if (k == "wiener_hopf") return run_wiener_hopf(f);
  if (k == "estimation") return run_estimation(f);
  if (k == "nonlinear") return run_nonlinear(f);
  if (k == "scatter_single") return run_scatter_single(f);
  if (k == "scatter_many") return run_scatter_many(f, seed);
  return run_effective_medium(f);
}

// ---------------------------------------------------------------------------

namespace {

bool is_config_error(const std::exception& e) {
  return dynamic_cast<const ConfigurationError*>(&e) || dynamic_cast<const ArgumentError*>(&e) ||
         dynamic_cast<const DomainError*>(&e) || dynamic_cast<const InputError*>(&e) ||
         dynamic_cast<const RangeError*>(&e);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

int execute(const std::string& command, const std::filesystem::path& config_path, const std::filesystem::path& out_dir,
            const std::function<Outcome(const ProblemConfig&)>& body, std::optional<std::uint64_t> seed) {
  const auto start = std::chrono::steady_clock::now();
  ProblemConfig config;
  try {
    config = load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  Outcome outcome;
  int code = 0;
  try {
    outcome = body(config);
    code = outcome.failed ? 2 : 0;
  } catch (const std::exception& e) {
    if (is_config_error(e)) {
      std::cerr << "config error: " << e.what() << "\n";
      return 1;
    }
    outcome.failed = true;
    outcome.message = e.what();
    if (const auto* s = dynamic_cast<const SingularSystemError*>(&e))
      outcome.diagnostics["condition_estimate"] = s->condition_estimate();
    if (const auto* s = dynamic_cast<const NonzeroIndexError*>(&e)) outcome.diagnostics["kappa"] = s->kappa();
    if (const auto* s = dynamic_cast<const PathFailureError*>(&e)) outcome.diagnostics["failed_lambda"] = s->lambda();
    code = 2;
  }
  if (outcome.failed) std::cerr << "solver failure: " << outcome.message << "\n";

  Json report;
  report["software"] = "iew";
  report["version"] = version;
  report["command"] = command;
  report["kind"] = config.kind;
  if (seed) report["seed"] = *seed;
  report["status"] = outcome.failed ? "failed" : "ok";
  report["exit_code"] = code;
  if (!outcome.message.empty()) report["message"] = outcome.message;
  report["diagnostics"] = outcome.diagnostics;
  report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report["config"] = config.document;
  try {
    std::filesystem::create_directories(out_dir);
    write_file(out_dir / "report.json", report.dump(2) + "\n");
    write_file(out_dir / "result.csv", outcome.table.to_csv());
  } catch (const std::exception& e) {
    std::cerr << "output error: " << e.what() << "\n";
    return 1;
  }
  return code;
}

}  // namespace

int run_command(const std::filesystem::path& config, const std::filesystem::path& out,
                std::optional<std::uint64_t> seed) {
  return execute("run", config, out, [seed](const ProblemConfig& c) { return run_problem(c, seed); }, seed);
}

int study_command(const std::filesystem::path& config, const std::filesystem::path& out) {
  return execute("study", config, out, [](const ProblemConfig& c) { return run_study(c); }, std::nullopt);
}

}  // namespace iew::cli
