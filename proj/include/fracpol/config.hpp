#pragma once

// JSON experiment configuration with dotted-path overrides.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracpol/eigensolver.hpp"
#include "fracpol/geometry.hpp"
#include "fracpol/harness.hpp"

namespace fracpol {

struct SweepSection {
  ShapeSpec outer;
  ShapeSpec hole;
  std::vector<double> samples;
  int seeds = 3;
  Point rotationPoint{};
  Point rotationAxis{1.0, 0.0, 0.0};
};

struct PropsSection {
  std::uint64_t seed = 1;
  int cases = 200;
  int polarizers = 10;
  int gridSize = 32;
  int functionCases = 100;
  int functionGridSize = 24;
};

struct ExperimentConfig {
  Grid grid;
  SolverParams solver;
  double padFactor = 2.0;
  std::optional<ShapeSpec> domain;
  std::optional<Polarizer> polarizer;
  std::optional<SweepSection> sweep;
  PropsSection props;

  SweepConfig sweep_config(bool rotation) const;
};

/// Parses the JSON text, applies `key=value` overrides (value parsed as JSON,
/// falling back to a string), then validates. Throws ParseError for malformed
/// input or missing fields and ValidationError for out-of-range values.
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides = {});

}  // namespace fracpol
