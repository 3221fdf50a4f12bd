#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>

#include "fracpol/eigensolver.hpp"
#include "fracpol/error.hpp"
#include "fracpol/reduce.hpp"

namespace fracpol {

LinearOracleResult linear_oracle_p2(const DomainMask& m, const KernelTable& K) {
  const FracParams& fp = K.params();
  if (fp.p != 2.0 || fp.q != 2.0) {
    throw Error(ErrorKind::InvalidParams, "linear oracle needs p = q = 2");
  }
  if (!(m.grid == K.grid())) throw Error(ErrorKind::GridMismatch, "mask grid differs from kernel");
  if (!m.any()) throw Error(ErrorKind::EmptyDomain, "domain mask has no cells");

  const Grid& g = K.grid();
  const double dv = g.cell_volume();
  std::vector<std::size_t> cells;
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    if (m.inside[i]) cells.push_back(i);
  }
  const Eigen::Index n = static_cast<Eigen::Index>(cells.size());

  // Stiffness of E(u) = u^T A u: off-diagonal -2 w_ij, diagonal 2 times the
  // full padded-box row sum plus the tail. Mass M = dV I.
  Eigen::MatrixXd A(n, n);
  std::vector<double> gridRow(g.cell_count());
  for (Eigen::Index a = 0; a < n; ++a) {
    const std::size_t i = cells[a];
    for (std::size_t j = 0; j < g.cell_count(); ++j) gridRow[j] = j == i ? 0.0 : K.weight(i, j);
    const double total = tree_sum(gridRow) + K.padding_sum(i);
    for (Eigen::Index b = 0; b < n; ++b) A(a, b) = a == b ? 0.0 : -2.0 * gridRow[cells[b]];
    A(a, a) = 2.0 * total + 2.0 * dv * K.tail(i);
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidParams, "stiffness matrix is not positive definite");
  }
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  x.normalize();
  double lambda = (x.dot(A * x)) / (dv * x.squaredNorm());
  int it = 0;
  for (; it < 1000; ++it) {
    Eigen::VectorXd y = llt.solve(dv * x);
    x = y.normalized();
    const double next = (x.dot(A * x)) / (dv * x.squaredNorm());
    const bool done = std::abs(next - lambda) <= 1e-10 * std::abs(next);
    lambda = next;
    if (done && it > 0) break;
  }
  if (x.sum() < 0.0) x = -x;

  LinearOracleResult r;
  r.lambda = lambda;
  r.iterations = it + 1;
  r.v = GridFunction::zeros(m);
  const double scale = 1.0 / std::sqrt(dv);  // unit L^2 norm
  for (Eigen::Index a = 0; a < n; ++a) r.v.values[cells[a]] = x[a] * scale;
  return r;
}

}  // namespace fracpol
