#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fracpol/geometry.hpp"
#include "fracpol/nonlocal.hpp"
#include "fracpol/rearrange.hpp"

namespace fracpol {

enum class InitKind { DistanceBump, Constant, Custom };

struct SolverParams {
  FracParams fp;
  double tolRel = 1e-9;
  int maxIter = 5000;
  double armijoBeta = 0.5;
  double armijoC = 1e-4;
  InitKind initKind = InitKind::DistanceBump;
  /// 0 leaves the initial guess unperturbed.
  std::uint64_t rngSeed = 0;
  /// Grid-sized start vector for InitKind::Custom.
  std::vector<double> customInit;
  /// Number of curvature pairs kept for the quasi-Newton direction.
  int memory = 8;

  void validate() const;
};

struct EigenResult {
  double lambda = 0.0;
  GridFunction u;
  int iterations = 0;
  double gradNorm = 0.0;
  bool converged = false;
  std::vector<double> history;
  /// Smallest eigenfunction value over the domain (positivity diagnostic).
  double minInterior = 0.0;
  /// Set by the derivative-free path used for p < 2.
  bool experimental = false;
  std::uint64_t seed = 0;
};

/// Threshold separating strict inequalities from solver noise.
double eps_strict(double lambda, double tolRel);

/// Minimizes the Rayleigh quotient over nonnegative functions supported in
/// `m`. Returns the best iterate with `converged = false` when the
/// iteration budget runs out.
EigenResult solve(const DomainMask& m, const KernelTable& K, const SolverParams& sp);

/// Best of `starts` runs with seeds rngSeed, rngSeed+1, ...
EigenResult solve_best_of(const DomainMask& m, const KernelTable& K, const SolverParams& sp,
                          int starts);
/// Start count used by the experiment drivers: `seeds` when q != p, else 1.
int starts_for(const FracParams& fp, int seeds);

struct LinearOracleResult {
  double lambda = 0.0;
  GridFunction v;  // unit L^2 norm, nonnegative
  int iterations = 0;
};

/// Smallest eigenvalue of the p = q = 2 stiffness matrix by inverse power
/// iteration, assembled directly from the kernel table.
LinearOracleResult linear_oracle_p2(const DomainMask& m, const KernelTable& K);

/// JSON document {lambda, iterations, gradNorm, converged, paramsEcho, functionFile}.
std::string eigen_result_json(const EigenResult& r, const SolverParams& sp, double padFactor,
                              const std::string& functionFile);

}  // namespace fracpol
