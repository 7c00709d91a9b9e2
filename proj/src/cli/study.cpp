#include <cmath>

#include "detail.hpp"

namespace iew::cli {

namespace {

using namespace detail;

Outcome projection_ladder(const ProblemConfig& config, const std::vector<double>& values) {
  ProblemConfig copy = config;
  Json ns = Json::array();
  for (double v : values) {
    if (v != std::floor(v) || v < 1) throw ConfigError("study.values: n rungs must be positive integers");
    ns.push_back(static_cast<int>(v));
  }
  copy.document["method"] = "projection";
  copy.document["projection_n"] = ns;
  return run_problem(copy, std::nullopt);
}

Outcome delta_ladder(const ProblemConfig& config, const std::vector<double>& values) {
  Outcome out;
  out.table.header = {"delta", "parameter", "discrepancy", "error"};
  std::vector<double> errs;
  for (double delta : values) {
    ProblemConfig copy = config;
    copy.document["delta"] = delta;
    const Outcome rung = run_problem(copy, std::nullopt);
    const double err = rung.diagnostics["relative_error"].get<double>();
    out.table.add_row({delta, rung.diagnostics["parameter"].get<double>(),
                       rung.diagnostics["discrepancy"].get<double>(), err});
    errs.push_back(err);
  }
  out.diagnostics["monotone"] = decreasing(errs);
  return out;
}

Outcome radius_ladder(const ProblemConfig& config, const std::vector<double>& values) {
  using namespace scattering;
  Fields f(config.document, "");
  f.string("kind");
  f.string("description", "");
  f.raw("study");
  const IncidentWave wave = parse_wave(f.object("wave"));
  const Medium medium = parse_medium(f.object("medium"), wave.k);
  const int grid_n = f.integer("grid_n", 16);
  ParticleSettings ps;
  if (f.has("particles")) {
    Fields pf = f.object("particles");
    ps = parse_particles(pf);
    pf.finish();
  }
  f.finish();
  if (grid_n < 1 || grid_n > 32) throw ConfigError("grid_n: must lie in [1, 32]");

  const EffectiveMediumResult em = effective_medium_solve(medium, wave, grid_n);
  Outcome out;
  out.table.header = {"a", "particles", "discrepancy"};
  std::vector<double> disc;
  for (double a : values) {
    const ParticleCloud cloud = place_particles(medium, a, ps.kappa, ps.placement);
    const ManyBodyResult las = many_body_solve(cloud, wave);
    const double d = las_continuum_discrepancy(cloud, las, em);
    out.table.add_row({a, static_cast<double>(cloud.size()), d});
    disc.push_back(d);
  }
  out.diagnostics["monotone"] = decreasing(disc);
  return out;
}

}  // namespace

Outcome run_study(const ProblemConfig& config) {
  Fields root(config.document, "");
  if (!root.has("study")) throw ConfigError("study: required field missing");
  Fields s = root.object("study");
  const std::string parameter = s.string("parameter");
  const std::vector<double> values = s.numbers("values");
  s.finish();
  if (values.size() < 2) throw ConfigError("study.values: ladder needs at least 2 rungs");

  Outcome out;
  if (parameter == "n" && config.kind == "fredholm2") out = projection_ladder(config, values);
  else if (parameter == "delta" && config.kind == "firstkind") out = delta_ladder(config, values);
  else if (parameter == "a" && config.kind == "effective_medium") out = radius_ladder(config, values);
  else
    throw ConfigError("study.parameter: '" + parameter + "' ladders are not available for kind '" + config.kind +
                      "' (n: fredholm2, delta: firstkind, a: effective_medium)");
  out.diagnostics["parameter"] = parameter;
  out.diagnostics["rungs"] = values.size();
  return out;
}

}  // namespace iew::cli
