#include "fracpol/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fracpol/error.hpp"

namespace fracpol {

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::StrictlyMonotone: return "StrictlyMonotone";
    case VerdictKind::Violated: return "Violated";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

bool SweepReport::all_converged() const {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.converged; });
}

SweepReport classify(std::string mode, std::vector<SweepRow> rows, bool increasing,
                     double tolRel) {
  std::sort(rows.begin(), rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.param < b.param; });
  SweepReport rep;
  rep.mode = std::move(mode);
  bool violated = false, inconclusive = false;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const double a = rows[k].lambda, b = rows[k + 1].lambda;
    const double step = increasing ? b - a : a - b;
    const double eps = eps_strict(std::max(a, b), tolRel);
    rep.margin = std::min(rep.margin, step);
    if (step <= -eps) {
      if (!violated) rep.verdict = {VerdictKind::Violated, k};
      violated = true;
    } else if (step <= eps && !violated && !inconclusive) {
      rep.verdict = {VerdictKind::Inconclusive, k};
      inconclusive = true;
    }
  }
  rep.rows = std::move(rows);
  return rep;
}

// ------------------------------------------------------------- geometry

DomainMask hole_domain_mask(const ShapeSpec& outer, const ShapeSpec& hole, const Grid& g) {
  const DomainMask outerMask = rasterize(outer, g);
  DomainMask holeMask;
  try {
    holeMask = rasterize_closed(hole, g);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ShapeOutsideGrid) {
      throw Error(ErrorKind::HoleEscapesDomain, "hole leaves the grid box");
    }
    throw;
  }
  if (!is_subset(dilate(holeMask), outerMask)) {
    throw Error(ErrorKind::HoleEscapesDomain,
                "hole is not compactly contained in the outer domain (one-cell gap required)");
  }
  return difference(outerMask, holeMask);
}

bool is_steiner_symmetric_e1(const DomainMask& m) {
  const Grid& g = m.grid;
  const Polarizer zero{{1.0, 0.0, 0.0}, 0.0};
  if (!grid_compatible(zero, g)) return false;
  const long planes = 2L * g.counts[0];
  for (long k = 0; k <= planes; ++k) {
    const double a = g.origin[0] + 0.5 * g.spacing * static_cast<double>(k);
    const double tol = 1e-9 * g.spacing;
    if (a >= -tol && !is_polarization_invariant(m, Polarizer{{1.0, 0.0, 0.0}, a})) return false;
    // P^a(M) = M is invariance under the opposite halfspace {x1 > a}.
    if (a <= tol && !is_polarization_invariant(m, Polarizer{{-1.0, 0.0, 0.0}, -a})) return false;
  }
  return true;
}

bool is_foliated_schwarz_symmetric(const ShapeSpec& s, const DomainMask& m, const Point& a,
                                   const Point& eta, bool closedShape) {
  const Grid& g = m.grid;
  if (g.dim != 2) throw Error(ErrorKind::InvalidArgument, "rotation sweeps are planar");
  auto member = [&](const Point& x) {
    return closedShape ? contains_closed(s, x, 2) : contains_open(s, x, 2);
  };
  auto fan_member = [&](double phi) {
    // -eta rotated by phi: h . eta = -cos(phi) < 0 keeps the ray inside H.
    const double cs = std::cos(phi), sn = std::sin(phi);
    const Point h{-(cs * eta[0] - sn * eta[1]), -(sn * eta[0] + cs * eta[1]), 0.0};
    return Polarizer{h, dot(h, a)};
  };
  std::vector<Polarizer> fan;
  for (int k = 0; k < 8; ++k) fan.push_back(fan_member((k - 3.5) * std::numbers::pi / 8.0));
  fan.push_back(fan_member(0.0));
  for (Polarizer H : fan) {
    const double len = norm(H.h);
    for (double& c : H.h) c /= len;
    H.a = dot(H.h, a);
    if (grid_compatible(H, g)) {
      if (!is_polarization_invariant(m, H)) return false;
      continue;
    }
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      const Point x = g.center(i);
      if (!(dot(x, H.h) < H.a - 1e-12)) continue;
      if (member(reflect_point(x, H)) && !member(x)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- sweeps

namespace {

SweepRow solve_row(double param, const DomainMask& mask, const KernelTable& K,
                   const SweepConfig& cfg) {
  const EigenResult r = solve_best_of(mask, K, cfg.solver, starts_for(cfg.solver.fp, cfg.seeds));
  return {param, r.lambda, r.iterations, r.gradNorm, r.converged};
}

void require_symmetric(bool ok, const char* what) {
  if (!ok) throw Error(ErrorKind::AsymmetricInput, what);
}

}  // namespace

SweepReport sweep_translation(const SweepConfig& cfg) {
  if (!std::holds_alternative<TranslateE1>(cfg.mode)) {
    throw Error(ErrorKind::InvalidArgument, "translation sweep needs mode TranslateE1");
  }
  std::vector<double> samples = cfg.samples;
  std::sort(samples.begin(), samples.end());
  for (double t : samples) {
    if (t < 0.0) throw Error(ErrorKind::HoleEscapesDomain, "translation samples must be >= 0");
  }
  require_symmetric(is_steiner_symmetric_e1(rasterize(cfg.outer, cfg.grid)),
                    "outer domain is not Steiner symmetric about {x1 = 0}");
  require_symmetric(is_steiner_symmetric_e1(rasterize_closed(cfg.hole, cfg.grid)),
                    "hole is not Steiner symmetric about {x1 = 0}");

  // Validate every placement before spending time on solves.
  std::vector<DomainMask> masks;
  for (double t : samples) {
    masks.push_back(hole_domain_mask(cfg.outer, translated(cfg.hole, {t, 0.0, 0.0}), cfg.grid));
  }
  const KernelTable K = build_kernel(cfg.grid, cfg.solver.fp, cfg.padFactor);
  std::vector<SweepRow> rows(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) rows[k] = solve_row(samples[k], masks[k], K, cfg);
  return classify("sweep-t", std::move(rows), false, cfg.solver.tolRel);
}

SweepReport sweep_rotation(const SweepConfig& cfg) {
  const auto* rot = std::get_if<RotateAbout>(&cfg.mode);
  if (!rot) throw Error(ErrorKind::InvalidArgument, "rotation sweep needs mode RotateAbout");
  if (cfg.grid.dim != 2) throw Error(ErrorKind::InvalidArgument, "rotation sweeps are planar");
  Point eta = rot->axis;
  const double len = norm(eta);
  if (!(len > 0.0)) throw Error(ErrorKind::InvalidArgument, "rotation axis must be nonzero");
  for (double& c : eta) c /= len;

  std::vector<double> samples = cfg.samples;
  std::sort(samples.begin(), samples.end());
  require_symmetric(is_foliated_schwarz_symmetric(cfg.outer, rasterize(cfg.outer, cfg.grid),
                                                  rot->point, eta, false),
                    "outer domain is not foliated Schwarz symmetric about the ray");
  require_symmetric(is_foliated_schwarz_symmetric(cfg.hole, rasterize_closed(cfg.hole, cfg.grid),
                                                  rot->point, eta, true),
                    "hole is not foliated Schwarz symmetric about the ray");

  std::vector<DomainMask> masks;
  for (double theta : samples) {
    masks.push_back(
        hole_domain_mask(cfg.outer, rotated(cfg.hole, rot->point, theta), cfg.grid));
  }
  const KernelTable K = build_kernel(cfg.grid, cfg.solver.fp, cfg.padFactor);
  std::vector<SweepRow> rows(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) rows[k] = solve_row(samples[k], masks[k], K, cfg);
  return classify("sweep-rot", std::move(rows), true, cfg.solver.tolRel);
}

// ---------------------------------------------------------- Faber-Krahn

bool padded_box_symmetric(const KernelTable& K, const Polarizer& H) {
  const Grid& pg = K.padded_grid();
  if (!grid_compatible(H, pg)) return false;
  const CellMirror cm = cell_mirror(H, pg);
  return cm.twice_plane == pg.counts[cm.axis];
}

FaberKrahnRecord faber_krahn_check(const DomainMask& m, const Polarizer& H,
                                   const KernelTable& K, const SolverParams& sp, int seeds) {
  (void)cell_mirror(H, m.grid);
  if (!padded_box_symmetric(K, H)) {
    throw Error(ErrorKind::IncompatiblePolarizer, "padded box is not symmetric under sigma_H");
  }
  const int starts = starts_for(sp.fp, seeds);
  FaberKrahnRecord rec;
  const EigenResult base = solve_best_of(m, K, sp, starts);
  rec.lambdaOmega = base.lambda;
  rec.converged = base.converged;
  rec.epsStrict = eps_strict(base.lambda, sp.tolRel);

  const GridFunction pu = polarize_function(base.u, H);
  rec.rayleighPolarized = rayleigh(pu, K, sp.fp.q);
  rec.nonStrictHolds = rec.rayleighPolarized <= rec.lambdaOmega * (1.0 + 1e-10);

  const DomainMask pm = polarize_mask(m, H);
  rec.strictExpected = !(pm == m) && !(pm == reflect_mask(m, H));
  if (rec.strictExpected) {
    const EigenResult pol = solve_best_of(pm, K, sp, starts);
    rec.lambdaPolarized = pol.lambda;
    rec.converged = rec.converged && pol.converged;
    rec.strictHolds = pol.lambda < rec.lambdaOmega - rec.epsStrict;
  }
  rec.pass = rec.nonStrictHolds && (!rec.strictExpected || rec.strictHolds);
  return rec;
}

ComparisonDiagnostic comparison_diagnostic(const GridFunction& u, const DomainMask& m,
                                           const Polarizer& H) {
  const CellMirror cm = cell_mirror(H, m.grid);
  const GridFunction pu = polarize_function(u, H);
  const double threshold = 1e-12 * u.max_value();
  ComparisonDiagnostic d;
  for (std::size_t i = 0; i < m.grid.cell_count(); ++i) {
    if (!m.inside[i] || cm.side(m.grid.coords(i)[cm.axis]) >= 0) continue;
    const double gap = std::fabs(pu.values[i] - u.values[i]);
    if (gap <= threshold) {
      ++d.zeroCells;
    } else {
      ++d.posCells;
      d.minGap = std::min(d.minGap, gap);
    }
  }
  const std::size_t total = d.zeroCells + d.posCells;
  d.fractionZero = total == 0 ? 1.0 : static_cast<double>(d.zeroCells) / total;
  return d;
}

// ----------------------------------------------------------------- output

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot open " + path);
  os << text;
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path);
}

}  // namespace

std::string csv_text(const SweepReport& report) {
  std::string out = "param,lambda,iterations,gradNorm,converged\n";
  for (const SweepRow& r : report.rows) {
    out += fmt17(r.param) + ',' + fmt17(r.lambda) + ',' + std::to_string(r.iterations) + ',' +
           fmt17(r.gradNorm) + ',' + (r.converged ? "1" : "0") + '\n';
  }
  return out;
}

std::string svg_text(const SweepReport& report) {
  if (report.rows.empty()) throw Error(ErrorKind::InvalidArgument, "cannot plot an empty report");
  constexpr double W = 640, Hh = 400, L = 80, Rm = 20, T = 30, B = 60;
  double xmin = report.rows.front().param, xmax = xmin;
  double ymin = report.rows.front().lambda, ymax = ymin;
  for (const auto& r : report.rows) {
    xmin = std::min(xmin, r.param);
    xmax = std::max(xmax, r.param);
    ymin = std::min(ymin, r.lambda);
    ymax = std::max(ymax, r.lambda);
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax == ymin) {
    ymin -= 0.5 * std::max(1.0, std::fabs(ymin));
    ymax += 0.5 * std::max(1.0, std::fabs(ymax));
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - Rm); };
  auto py = [&](double y) { return Hh - B - (y - ymin) / (ymax - ymin) * (Hh - T - B); };
  const std::string xlabel = report.mode == "sweep-rot" ? "theta" : "t";

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" "
        "viewBox=\"0 0 640 400\">\n";
  os << "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << Hh - B << "\" x2=\"" << W - Rm << "\" y2=\"" << Hh - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << Hh - B
     << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << Hh - 15
     << "\" text-anchor=\"middle\" font-size=\"14\">" << xlabel << "</text>\n";
  os << "<text x=\"20\" y=\"" << (T + Hh - B) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" "
     << "transform=\"rotate(-90 20 " << (T + Hh - B) / 2 << ")\">lambda</text>\n";
  os << "<text x=\"" << L << "\" y=\"" << Hh - B + 18 << "\" text-anchor=\"middle\" "
     << "font-size=\"11\">" << fmt("%.4g", xmin) << "</text>\n";
  os << "<text x=\"" << W - Rm << "\" y=\"" << Hh - B + 18 << "\" text-anchor=\"middle\" "
     << "font-size=\"11\">" << fmt("%.4g", xmax) << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << Hh - B << "\" text-anchor=\"end\" font-size=\"11\">"
     << fmt("%.6g", ymin) << "</text>\n";
  os << "<text x=\"" << L - 6 << "\" y=\"" << T + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
     << fmt("%.6g", ymax) << "</text>\n";
  os << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    if (k) os << ' ';
    os << fmt("%.3f", px(report.rows[k].param)) << ',' << fmt("%.3f", py(report.rows[k].lambda));
  }
  os << "\"/>\n</svg>\n";
  return os.str();
}

void emit_csv(const SweepReport& report, const std::string& path) {
  write_file(path, csv_text(report));
}

void emit_svg(const SweepReport& report, const std::string& path) {
  write_file(path, svg_text(report));
}

}  // namespace fracpol
