#include <cmath>
#include <json.hpp>

#include "fracpol/eigensolver.hpp"

namespace fracpol {

std::string eigen_result_json(const EigenResult& r, const SolverParams& sp, double padFactor,
                              const std::string& functionFile) {
  nlohmann::ordered_json j;
  j["lambda"] = r.lambda;
  j["iterations"] = r.iterations;
  if (std::isfinite(r.gradNorm)) {
    j["gradNorm"] = r.gradNorm;
  } else {
    j["gradNorm"] = nullptr;
  }
  j["converged"] = r.converged;
  j["paramsEcho"] = {{"s", sp.fp.s},
                     {"p", sp.fp.p},
                     {"q", sp.fp.q},
                     {"dim", sp.fp.dim},
                     {"padFactor", padFactor},
                     {"tolRel", sp.tolRel},
                     {"maxIter", sp.maxIter},
                     {"rngSeed", r.seed},
                     {"experimental", r.experimental}};
  j["functionFile"] = functionFile;
  return j.dump(2) + "\n";
}

}  // namespace fracpol
