#pragma once

// Parsing helpers shared by run and study.

#include "iew/cli.hpp"
#include "iew/grid_quad.hpp"
#include "iew/many_body.hpp"
#include "iew/scattering.hpp"

namespace iew::cli::detail {

quad::QuadRule parse_rule(Fields f);
quad::Kernel parse_kernel(Fields f);
scattering::IncidentWave parse_wave(Fields f);
scattering::Medium parse_medium(Fields f, double k);

struct ParticleSettings {
  double kappa = 0.0;
  scattering::PlacementOptions placement;
};
ParticleSettings parse_particles(Fields& f);

/// Strictly decreasing sequence.
bool decreasing(const std::vector<double>& v);

}  // namespace iew::cli::detail
