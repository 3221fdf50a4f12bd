#include "fracpol/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <stdexcept>

#include "fracpol/error.hpp"
#include "fracpol/reduce.hpp"

namespace fracpol {

void SolverParams::validate() const {
  if (!(tolRel > 0.0)) throw Error(ErrorKind::InvalidParams, "tolRel must be positive");
  if (maxIter < 1) throw Error(ErrorKind::InvalidParams, "maxIter must be >= 1");
  if (!(armijoBeta > 0.0 && armijoBeta < 1.0)) {
    throw Error(ErrorKind::InvalidParams, "armijoBeta must lie in (0,1)");
  }
  if (!(armijoC > 0.0 && armijoC < 1.0)) {
    throw Error(ErrorKind::InvalidParams, "armijoC must lie in (0,1)");
  }
  if (memory < 0) throw Error(ErrorKind::InvalidParams, "memory must be >= 0");
}

double eps_strict(double lambda, double tolRel) {
  return std::max(1e-6 * lambda, 10.0 * tolRel * lambda);
}

int starts_for(const FracParams& fp, int seeds) { return fp.q != fp.p ? std::max(1, seeds) : 1; }

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  std::vector<double> t(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) t[i] = a[i] * b[i];
  return tree_sum(t);
}

double dual_q(double u, double q) {
  if (u == 0.0) return 0.0;
  if (q == 2.0) return u;
  if (q == 1.0) return u > 0.0 ? 1.0 : -1.0;
  return std::pow(std::fabs(u), q - 2.0) * u;
}

// Uniform [0,1) from the raw engine output; std distributions are not
// reproducible across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> initial_guess(const DomainOperator& op, const SolverParams& sp) {
  const DomainMask& m = op.mask();
  const Grid& g = m.grid;
  const std::size_t n = op.size();
  std::vector<double> u(n, 1.0);
  switch (sp.initKind) {
    case InitKind::Constant: break;
    case InitKind::Custom: {
      if (sp.customInit.size() != g.cell_count()) {
        throw Error(ErrorKind::InvalidParams, "custom initial guess must be grid-sized");
      }
      for (std::size_t a = 0; a < n; ++a) u[a] = std::fabs(sp.customInit[op.cells()[a]]);
      break;
    }
    case InitKind::DistanceBump: {
      std::vector<Point> outside;
      for (std::size_t i = 0; i < g.cell_count(); ++i) {
        if (!m.inside[i]) outside.push_back(g.center(i));
      }
      const Point lo = g.box_lo(), hi = g.box_hi();
      parallel_for(n, [&](std::size_t a) {
        const Point x = g.center(op.cells()[a]);
        double best = std::numeric_limits<double>::infinity();
        // Virtual exterior cells just beyond the box.
        for (int k = 0; k < g.dim; ++k) {
          best = std::min({best, x[k] - lo[k] + 0.5 * g.spacing, hi[k] - x[k] + 0.5 * g.spacing});
        }
        for (const Point& y : outside) {
          const double d = std::sqrt((x[0] - y[0]) * (x[0] - y[0]) +
                                     (x[1] - y[1]) * (x[1] - y[1]) +
                                     (x[2] - y[2]) * (x[2] - y[2]));
          best = std::min(best, d);
        }
        u[a] = best;
      });
      break;
    }
  }
  if (sp.rngSeed != 0) {
    std::mt19937_64 rng(sp.rngSeed);
    for (double& v : u) v *= 0.5 + uniform01(rng);
  }
  return u;
}

struct State {
  std::vector<double> u;
  std::vector<double> grad;
  double energy = 0.0;
  double R = 0.0;
  double gradNorm = 0.0;
};

class RayleighModel {
 public:
  RayleighModel(const DomainOperator& op, double p, double q) : op_(op), p_(p), q_(q) {}

  // Returns false when `u` vanishes identically.
  bool normalize(std::vector<double>& u) const {
    const double nq = norm_q(u, op_.cell_volume(), q_);
    if (!(nq > 0.0) || !std::isfinite(nq)) return false;
    for (double& v : u) v /= nq;
    return true;
  }

  State evaluate(std::vector<double> u) const {
    const double dv = op_.cell_volume();
    const auto ev = op_.evaluate(u);
    const double nq = norm_q(u, dv, q_);
    const double N = std::pow(nq, p_);
    const double nqq = std::pow(nq, q_);
    State s;
    s.energy = ev.energy;
    s.R = ev.energy / N;
    s.grad.resize(u.size());
    for (std::size_t a = 0; a < u.size(); ++a) {
      s.grad[a] = (2.0 * p_ / N) * ev.flux[a] * dv - (p_ * s.R) * dual_q(u[a], q_) * dv / nqq;
    }
    s.gradNorm = std::sqrt(dot(s.grad, s.grad) / dv);
    s.u = std::move(u);
    return s;
  }

  double rayleigh(std::span<const double> u) const {
    const auto ev = op_.evaluate(u);
    return ev.energy / std::pow(norm_q(u, op_.cell_volume(), q_), p_);
  }

 private:
  const DomainOperator& op_;
  double p_, q_;
};

// Curvature bound 4p(p-1) dV max_i(row sum) range^{p-2} of the energy Hessian.
double lipschitz_estimate(const DomainOperator& op, std::span<const double> u, double p) {
  double range = 0.0;
  for (double v : u) range = std::max(range, std::fabs(v));
  const double rp = p == 2.0 ? 1.0 : std::pow(std::max(range, 1e-300), p - 2.0);
  return 4.0 * p * (p - 1.0) * op.cell_volume() * op.max_row_sum() * rp;
}

struct CurvaturePair {
  std::vector<double> s, y;
  double rho;
};

std::vector<double> two_loop(const std::deque<CurvaturePair>& mem, std::span<const double> grad) {
  std::vector<double> d(grad.begin(), grad.end());
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * dot(mem[k].s, d);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= alpha[k] * mem[k].y[i];
  }
  const auto& last = mem.back();
  const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
  for (double& v : d) v *= gamma;
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * dot(mem[k].y, d);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += (alpha[k] - beta) * mem[k].s[i];
  }
  for (double& v : d) v = -v;
  return d;
}

void check_domain(const DomainMask& m, const KernelTable& K, const SolverParams& sp) {
  sp.validate();
  if (!(m.grid == K.grid())) throw Error(ErrorKind::GridMismatch, "mask grid differs from kernel");
  if (!m.any()) throw Error(ErrorKind::EmptyDomain, "domain mask has no cells");
  const FracParams& kp = K.params();
  if (sp.fp.s != kp.s || sp.fp.p != kp.p || sp.fp.dim != kp.dim) {
    throw Error(ErrorKind::InvalidParams, "solver parameters differ from the kernel's (s, p, d)");
  }
  (void)FracParams::make(sp.fp.s, sp.fp.p, sp.fp.q, sp.fp.dim);
}

EigenResult finish(const DomainOperator& op, const State& st, EigenResult r) {
  r.lambda = st.R;
  r.u = op.scatter(st.u);
  r.gradNorm = st.gradNorm;
  r.minInterior = *std::min_element(st.u.begin(), st.u.end());
  return r;
}

// Derivative-free compass search for p in (1, 2), where the pair kernel
// G(t) = |t|^{p-2} t has an unbounded derivative at ties.
EigenResult solve_compass(const DomainOperator& op, const SolverParams& sp,
                          std::vector<double> u) {
  const double p = sp.fp.p, q = sp.fp.q, dv = op.cell_volume();
  const RayleighModel model(op, p, q);
  const std::size_t n = op.size();
  auto absPow = [](double t, double e) { return std::pow(std::fabs(t), e); };
  double energy = op.evaluate(u).energy;
  std::vector<double> qterms(n);
  for (std::size_t a = 0; a < n; ++a) qterms[a] = absPow(u[a], q);
  double mass = tree_sum(qterms) * dv;
  double R = energy / std::pow(mass, p / q);

  EigenResult res;
  res.experimental = true;
  res.seed = sp.rngSeed;
  res.history.push_back(R);
  double step = 0.25 * *std::max_element(u.begin(), u.end());
  const double minStep = sp.tolRel * *std::max_element(u.begin(), u.end());
  int it = 0;
  for (; it < sp.maxIter && step > minStep; ++it) {
    bool improved = false;
    for (std::size_t a = 0; a < n; ++a) {
      const auto row = op.row(a);
      for (double dir : {1.0, -1.0}) {
        const double trial = std::max(0.0, u[a] + dir * step);
        if (trial == u[a]) continue;
        std::vector<double> delta(n);
        for (std::size_t b = 0; b < n; ++b) {
          delta[b] = row[b] * (absPow(trial - u[b], p) - absPow(u[a] - u[b], p));
        }
        const double dE =
            2.0 * dv * (tree_sum(delta) + op.kappa(a) * (absPow(trial, p) - absPow(u[a], p)));
        const double newMass = mass + dv * (absPow(trial, q) - absPow(u[a], q));
        if (!(newMass > 0.0)) continue;
        const double newR = (energy + dE) / std::pow(newMass, p / q);
        if (newR < R) {
          u[a] = trial;
          energy += dE;
          mass = newMass;
          R = newR;
          improved = true;
          break;
        }
      }
    }
    if (!improved) step *= 0.5;
    res.history.push_back(R);
  }
  model.normalize(u);
  State st = model.evaluate(u);
  st.gradNorm = std::numeric_limits<double>::quiet_NaN();
  res.iterations = it;
  res.converged = step <= minStep;
  res.history.back() = std::min(res.history.back(), st.R);
  return finish(op, st, std::move(res));
}

}  // namespace

EigenResult solve(const DomainMask& m, const KernelTable& K, const SolverParams& sp) {
  check_domain(m, K, sp);
  const DomainOperator op(K, m);
  const double p = sp.fp.p, q = sp.fp.q;
  const RayleighModel model(op, p, q);

  std::vector<double> u0 = initial_guess(op, sp);
  if (!model.normalize(u0)) throw Error(ErrorKind::ZeroFunction, "initial guess vanishes");
  if (p < 2.0) return solve_compass(op, sp, std::move(u0));

  State st = model.evaluate(std::move(u0));
  EigenResult res;
  res.seed = sp.rngSeed;
  res.history.push_back(st.R);

  std::deque<CurvaturePair> mem;
  double lipschitz = lipschitz_estimate(op, st.u, p);
  const double gradTol = 100.0 * sp.tolRel;
  int it = 0;
  bool converged = false;
  std::vector<double> trial(st.u.size());
  for (; it < sp.maxIter; ++it) {
    if (st.gradNorm <= gradTol * st.R) {
      converged = true;
      break;
    }
    if (it % 50 == 0) lipschitz = lipschitz_estimate(op, st.u, p);

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool quasiNewton = attempt == 0 && !mem.empty();
      std::vector<double> d;
      if (quasiNewton) {
        d = two_loop(mem, st.grad);
      } else {
        d.resize(st.grad.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = -st.grad[i];
      }
      const double slope = dot(st.grad, d);
      if (!(slope < 0.0)) {
        mem.clear();
        continue;
      }
      double alpha = quasiNewton ? 1.0 : 1.0 / lipschitz;
      for (int bt = 0; bt < 60; ++bt, alpha *= sp.armijoBeta) {
        bool negative = false;
        for (std::size_t i = 0; i < trial.size(); ++i) {
          trial[i] = st.u[i] + alpha * d[i];
          negative = negative || trial[i] < 0.0;
        }
        double rawR = 0.0;
        if (negative) rawR = model.rayleigh(trial);
        std::vector<double> cand(trial.size());
        for (std::size_t i = 0; i < cand.size(); ++i) cand[i] = std::fabs(trial[i]);
        if (!model.normalize(cand)) continue;
        State next = model.evaluate(std::move(cand));
        if (negative && next.R > rawR * (1.0 + 1e-12)) {
          throw std::logic_error("nonnegativity projection increased the Rayleigh quotient");
        }
        if (next.R <= st.R + sp.armijoC * alpha * slope) {
          CurvaturePair cp;
          cp.s.resize(st.u.size());
          cp.y.resize(st.u.size());
          for (std::size_t i = 0; i < cp.s.size(); ++i) {
            cp.s[i] = next.u[i] - st.u[i];
            cp.y[i] = next.grad[i] - st.grad[i];
          }
          const double sy = dot(cp.s, cp.y);
          if (sp.memory > 0 && sy > 0.0 && std::isfinite(sy)) {
            cp.rho = 1.0 / sy;
            mem.push_back(std::move(cp));
            while (static_cast<int>(mem.size()) > sp.memory) mem.pop_front();
          }
          if (next.R > st.R) throw std::logic_error("accepted step increased the Rayleigh quotient");
          st = std::move(next);
          accepted = true;
          break;
        }
      }
      if (!accepted) mem.clear();
    }
    if (!accepted) break;  // no descent possible at working precision
    res.history.push_back(st.R);
  }
  if (!converged && st.gradNorm <= gradTol * st.R) converged = true;
  res.iterations = it;
  res.converged = converged;
  return finish(op, st, std::move(res));
}

EigenResult solve_best_of(const DomainMask& m, const KernelTable& K, const SolverParams& sp,
                          int starts) {
  EigenResult best;
  for (int k = 0; k < std::max(1, starts); ++k) {
    SolverParams run = sp;
    run.rngSeed = sp.rngSeed + static_cast<std::uint64_t>(k);
    EigenResult r = solve(m, K, run);
    if (k == 0 || r.lambda < best.lambda) best = std::move(r);
  }
  return best;
}

}  // namespace fracpol
