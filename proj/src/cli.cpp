#include "fracpol/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>

#include "fracpol/config.hpp"
#include "fracpol/error.hpp"
#include "fracpol/properties.hpp"

namespace fracpol {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void dump_mask(const fs::path& path, const DomainMask& m) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  write_mask_text(f, m);
}

int run_solve(const ExperimentConfig& cfg, const CliOptions& opts, const fs::path& out,
              std::ostream& os) {
  if (!cfg.domain) throw Error(ErrorKind::ParseError, "missing field: domain");
  const DomainMask m = rasterize(*cfg.domain, cfg.grid);
  if (opts.dumpMask) dump_mask(out / "domain.mask", m);
  const KernelTable K = build_kernel(cfg.grid, cfg.solver.fp, cfg.padFactor);
  const EigenResult r = solve_best_of(m, K, cfg.solver, starts_for(cfg.solver.fp, 3));

  const fs::path fnPath = out / "eigenfunction.txt";
  {
    std::ofstream f(fnPath, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot write " + fnPath.string());
    write_function_text(f, r.u);
  }
  write_file(out / "result.json", eigen_result_json(r, cfg.solver, cfg.padFactor, "eigenfunction.txt"));
  os << "RESULT solve lambda=" << fmt(r.lambda) << " iterations=" << r.iterations
     << " converged=" << (r.converged ? 1 : 0) << '\n';
  return r.converged ? 0 : 3;
}

int run_sweep(const ExperimentConfig& cfg, const CliOptions& opts, const fs::path& out,
              std::ostream& os, bool rotation) {
  const SweepConfig sc = cfg.sweep_config(rotation);
  if (opts.dumpMask) {
    for (std::size_t k = 0; k < sc.samples.size(); ++k) {
      const double v = sc.samples[k];
      ShapeSpec hole;
      if (rotation) {
        hole = rotated(sc.hole, std::get<RotateAbout>(sc.mode).point, v);
      } else {
        hole = translated(sc.hole, {v, 0.0, 0.0});
      }
      dump_mask(out / ("domain_" + std::to_string(k) + ".mask"),
                hole_domain_mask(sc.outer, hole, sc.grid));
    }
  }
  const SweepReport rep = rotation ? sweep_rotation(sc) : sweep_translation(sc);
  emit_csv(rep, (out / "sweep.csv").string());
  emit_svg(rep, (out / "sweep.svg").string());
  os << "VERDICT " << opts.subcommand << ' ' << to_string(rep.verdict.kind)
     << " margin=" << fmt(rep.margin) << '\n';
  if (!rep.all_converged()) return 3;
  return rep.verdict.kind == VerdictKind::StrictlyMonotone ? 0 : 1;
}

int run_fk(const ExperimentConfig& cfg, const CliOptions& opts, const fs::path& out,
           std::ostream& os) {
  if (!cfg.domain) throw Error(ErrorKind::ParseError, "missing field: domain");
  if (!cfg.polarizer) throw Error(ErrorKind::ParseError, "missing field: polarizer");
  const DomainMask m = rasterize(*cfg.domain, cfg.grid);
  if (opts.dumpMask) {
    dump_mask(out / "domain.mask", m);
    dump_mask(out / "polarized.mask", polarize_mask(m, *cfg.polarizer));
  }
  const KernelTable K = build_kernel(cfg.grid, cfg.solver.fp, cfg.padFactor);
  const int seeds = cfg.sweep ? cfg.sweep->seeds : 3;
  const FaberKrahnRecord rec = faber_krahn_check(m, *cfg.polarizer, K, cfg.solver, seeds);

  nlohmann::ordered_json j;
  j["lambdaOmega"] = rec.lambdaOmega;
  j["rayleighPolarized"] = rec.rayleighPolarized;
  if (std::isfinite(rec.lambdaPolarized)) {
    j["lambdaPolarized"] = rec.lambdaPolarized;
  } else {
    j["lambdaPolarized"] = nullptr;
  }
  j["strictExpected"] = rec.strictExpected;
  j["nonStrictHolds"] = rec.nonStrictHolds;
  j["strictHolds"] = rec.strictHolds;
  j["epsStrict"] = rec.epsStrict;
  j["converged"] = rec.converged;
  j["verdict"] = rec.pass ? "Pass" : "Fail";
  write_file(out / "fk.json", j.dump(2) + "\n");

  const double margin = rec.strictExpected
                            ? rec.lambdaOmega - rec.epsStrict - rec.lambdaPolarized
                            : rec.lambdaOmega - rec.rayleighPolarized;
  os << "VERDICT fk-check " << (rec.pass ? "Pass" : "Fail") << " margin=" << fmt(margin) << '\n';
  if (!rec.converged) return 3;
  return rec.pass ? 0 : 1;
}

int run_props(const ExperimentConfig& cfg, const fs::path& out, std::ostream& os) {
  const PropsSection& ps = cfg.props;
  PropertyReport rep = run_set_identity_suite(ps.seed, ps.cases, ps.polarizers, ps.gridSize);
  rep.merge(run_annulus_family_suite());
  rep.merge(run_rearrangement_suite(ps.seed + 1, ps.functionCases, ps.functionGridSize));
  rep.merge(run_polya_szego_suite(ps.seed + 2, ps.functionCases, ps.functionGridSize,
                                  {0.3, 0.5, 0.8}, {2.0, 3.0}, cfg.padFactor));
  const std::string text = rep.transcript();
  write_file(out / "props.txt", text);
  os << text;
  os << "VERDICT props " << (rep.ok() ? "Pass" : "Fail") << " failures=" << rep.failures() << '\n';
  return rep.ok() ? 0 : 1;
}

}  // namespace

int run(const CliOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = parse_config(opts.configPath, opts.overrides);
    std::error_code ec;
    fs::create_directories(opts.outDir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + opts.outDir + ": " + ec.message());
    const fs::path dir(opts.outDir);
    if (opts.subcommand == "solve") return run_solve(cfg, opts, dir, out);
    if (opts.subcommand == "sweep-t") return run_sweep(cfg, opts, dir, out, false);
    if (opts.subcommand == "sweep-rot") return run_sweep(cfg, opts, dir, out, true);
    if (opts.subcommand == "fk-check") return run_fk(cfg, opts, dir, out);
    if (opts.subcommand == "props") return run_props(cfg, dir, out);
    err << "error: unknown subcommand " << opts.subcommand << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::NoConvergence ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace fracpol
