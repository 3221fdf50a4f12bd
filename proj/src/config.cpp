#include "fracpol/config.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "fracpol/error.hpp"

namespace fracpol {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& msg) { throw Error(ErrorKind::ParseError, msg); }
[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::ValidationError, msg); }

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const json& field(const json& obj, const std::string& path, const std::string& key) {
  if (!obj.is_object()) parse_fail("expected object at " + (path.empty() ? "<root>" : path));
  auto it = obj.find(key);
  if (it == obj.end()) parse_fail("missing field: " + join(path, key));
  return *it;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) parse_fail("expected number at " + path);
  return v.get<double>();
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) parse_fail("expected integer at " + path);
  return v.get<int>();
}

double number_or(const json& obj, const std::string& path, const std::string& key, double dflt) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : number(*it, join(path, key));
}

int integer_or(const json& obj, const std::string& path, const std::string& key, int dflt) {
  auto it = obj.find(key);
  return it == obj.end() ? dflt : integer(*it, join(path, key));
}

Point point(const json& v, const std::string& path, int dim) {
  if (!v.is_array()) parse_fail("expected array at " + path);
  if (static_cast<int>(v.size()) != dim) {
    invalid(path + " must have " + std::to_string(dim) + " entries");
  }
  Point p{0, 0, 0};
  for (int k = 0; k < dim; ++k) p[k] = number(v[k], path + "[" + std::to_string(k) + "]");
  return p;
}

// Library errors raised while building config objects become validation
// errors carrying the original message.
template <class F>
auto validated(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::ValidationError) throw;
    invalid(e.detail());
  }
}

ShapeSpec shape(const json& v, const std::string& path, int dim) {
  const std::string type = [&] {
    const json& t = field(v, path, "type");
    if (!t.is_string()) parse_fail("expected string at " + join(path, "type"));
    return t.get<std::string>();
  }();
  ShapeSpec s;
  if (type == "ball") {
    s = make_ball(point(field(v, path, "center"), join(path, "center"), dim),
                  number(field(v, path, "radius"), join(path, "radius")));
  } else if (type == "annulus") {
    s = make_annulus(number(field(v, path, "R"), join(path, "R")),
                     number(field(v, path, "r"), join(path, "r")),
                     point(field(v, path, "holeCenter"), join(path, "holeCenter"), dim));
  } else if (type == "ellipse") {
    s = make_ellipse(point(field(v, path, "center"), join(path, "center"), dim),
                     point(field(v, path, "semi"), join(path, "semi"), dim),
                     number_or(v, path, "angle", 0.0));
  } else if (type == "box") {
    s = make_box(point(field(v, path, "center"), join(path, "center"), dim),
                 point(field(v, path, "half"), join(path, "half"), dim),
                 number_or(v, path, "angle", 0.0));
  } else if (type == "difference") {
    s = make_difference(shape(field(v, path, "outer"), join(path, "outer"), dim),
                        shape(field(v, path, "hole"), join(path, "hole"), dim));
  } else {
    invalid("unknown shape type '" + type + "' at " + join(path, "type"));
  }
  validated([&] {
    validate(s, dim);
    return 0;
  });
  return s;
}

void apply_override(json& doc, const std::string& item) {
  const auto eq = item.find('=');
  if (eq == std::string::npos || eq == 0) parse_fail("override must be key=value: " + item);
  const std::string key = item.substr(0, eq);
  const std::string raw = item.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::istringstream parts(key);
  std::string seg;
  std::vector<std::string> segs;
  while (std::getline(parts, seg, '.')) segs.push_back(seg);
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const std::string& s = segs[k];
    if (s.empty()) parse_fail("empty segment in override key: " + key);
    const bool last = k + 1 == segs.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(s);
      } catch (const std::exception&) {
        parse_fail("array index expected in override key: " + key);
      }
      if (idx >= node->size()) parse_fail("array index out of range in override key: " + key);
      node = &(*node)[idx];
    } else {
      if (!node->is_object() && !node->is_null()) parse_fail("cannot descend into " + key);
      node = &(*node)[s];
    }
    if (last) *node = value;
  }
}

}  // namespace

SweepConfig ExperimentConfig::sweep_config(bool rotation) const {
  if (!sweep) invalid("missing field: sweep");
  SweepConfig c;
  c.outer = sweep->outer;
  c.hole = sweep->hole;
  c.samples = sweep->samples;
  c.grid = grid;
  c.solver = solver;
  c.seeds = sweep->seeds;
  c.padFactor = padFactor;
  if (rotation) {
    c.mode = RotateAbout{sweep->rotationPoint, sweep->rotationAxis};
  } else {
    c.mode = TranslateE1{};
  }
  return c;
}

ExperimentConfig parse_config_text(const std::string& text,
                                   const std::vector<std::string>& overrides) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) parse_fail("config is not valid JSON");
  if (!doc.is_object()) parse_fail("config root must be an object");
  for (const auto& o : overrides) apply_override(doc, o);

  ExperimentConfig cfg;

  const json& g = field(doc, "", "grid");
  const int dim = integer(field(g, "grid", "dim"), "grid.dim");
  if (dim < 1 || dim > 3) invalid("grid.dim must be 1, 2 or 3");
  const json& counts = field(g, "grid", "counts");
  if (!counts.is_array() || static_cast<int>(counts.size()) != dim) {
    invalid("grid.counts must have " + std::to_string(dim) + " entries");
  }
  std::array<int, 3> n{1, 1, 1};
  for (int k = 0; k < dim; ++k) n[k] = integer(counts[k], "grid.counts[" + std::to_string(k) + "]");
  const Point origin = point(field(g, "grid", "origin"), "grid.origin", dim);
  const double spacing = number(field(g, "grid", "spacing"), "grid.spacing");
  cfg.grid = validated([&] { return Grid::make(dim, origin, spacing, n); });

  const json& pr = field(doc, "", "params");
  const double s = number(field(pr, "params", "s"), "params.s");
  const double p = number(field(pr, "params", "p"), "params.p");
  const double q = number(field(pr, "params", "q"), "params.q");
  cfg.solver.fp = validated([&] { return FracParams::make(s, p, q, dim); });

  cfg.padFactor = number_or(doc, "", "padFactor", 2.0);
  if (!(cfg.padFactor >= 1.0)) invalid("padFactor must be >= 1");

  if (auto it = doc.find("solver"); it != doc.end()) {
    const json& sv = *it;
    if (!sv.is_object()) parse_fail("expected object at solver");
    cfg.solver.tolRel = number_or(sv, "solver", "tolRel", cfg.solver.tolRel);
    cfg.solver.maxIter = integer_or(sv, "solver", "maxIter", cfg.solver.maxIter);
    cfg.solver.armijoBeta = number_or(sv, "solver", "armijoBeta", cfg.solver.armijoBeta);
    cfg.solver.armijoC = number_or(sv, "solver", "armijoC", cfg.solver.armijoC);
    cfg.solver.memory = integer_or(sv, "solver", "memory", cfg.solver.memory);
    if (auto seed = sv.find("rngSeed"); seed != sv.end()) {
      if (!seed->is_number_unsigned()) parse_fail("expected nonnegative integer at solver.rngSeed");
      cfg.solver.rngSeed = seed->get<std::uint64_t>();
    }
    if (auto init = sv.find("init"); init != sv.end()) {
      if (!init->is_string()) parse_fail("expected string at solver.init");
      const std::string kind = init->get<std::string>();
      if (kind == "distance-bump") {
        cfg.solver.initKind = InitKind::DistanceBump;
      } else if (kind == "constant") {
        cfg.solver.initKind = InitKind::Constant;
      } else if (kind == "custom") {
        cfg.solver.initKind = InitKind::Custom;
        const json& file = field(sv, "solver", "initFile");
        if (!file.is_string()) parse_fail("expected string at solver.initFile");
        std::ifstream in(file.get<std::string>());
        if (!in) throw Error(ErrorKind::IoError, "cannot open " + file.get<std::string>());
        const GridFunction u = read_function_text(in);
        if (!(u.grid == cfg.grid)) invalid("solver.initFile grid differs from grid");
        cfg.solver.customInit = u.values;
      } else {
        invalid("solver.init must be distance-bump, constant or custom");
      }
    }
  }
  validated([&] {
    cfg.solver.validate();
    return 0;
  });

  if (auto it = doc.find("domain"); it != doc.end()) cfg.domain = shape(*it, "domain", dim);

  if (auto it = doc.find("polarizer"); it != doc.end()) {
    const Point h = point(field(*it, "polarizer", "h"), "polarizer.h", dim);
    const double a = number(field(*it, "polarizer", "a"), "polarizer.a");
    cfg.polarizer = validated([&] { return Polarizer::make(h, a); });
  }

  if (auto it = doc.find("sweep"); it != doc.end()) {
    const json& sw = *it;
    SweepSection sec;
    sec.outer = shape(field(sw, "sweep", "outer"), "sweep.outer", dim);
    sec.hole = shape(field(sw, "sweep", "hole"), "sweep.hole", dim);
    const json& samples = field(sw, "sweep", "samples");
    if (!samples.is_array()) parse_fail("expected array at sweep.samples");
    if (samples.empty()) invalid("sweep.samples must not be empty");
    for (std::size_t k = 0; k < samples.size(); ++k) {
      sec.samples.push_back(number(samples[k], "sweep.samples[" + std::to_string(k) + "]"));
    }
    sec.seeds = integer_or(sw, "sweep", "seeds", 3);
    if (sec.seeds < 1) invalid("sweep.seeds must be >= 1");
    if (auto rp = sw.find("rotationPoint"); rp != sw.end()) {
      sec.rotationPoint = point(*rp, "sweep.rotationPoint", dim);
    }
    if (auto ra = sw.find("rotationAxis"); ra != sw.end()) {
      sec.rotationAxis = point(*ra, "sweep.rotationAxis", dim);
      if (!(norm(sec.rotationAxis) > 0.0)) invalid("sweep.rotationAxis must be nonzero");
    }
    cfg.sweep = sec;
  }

  if (auto it = doc.find("props"); it != doc.end()) {
    const json& ps = *it;
    if (!ps.is_object()) parse_fail("expected object at props");
    if (auto seed = ps.find("seed"); seed != ps.end()) {
      if (!seed->is_number_unsigned()) parse_fail("expected nonnegative integer at props.seed");
      cfg.props.seed = seed->get<std::uint64_t>();
    }
    cfg.props.cases = integer_or(ps, "props", "cases", cfg.props.cases);
    cfg.props.polarizers = integer_or(ps, "props", "polarizers", cfg.props.polarizers);
    cfg.props.gridSize = integer_or(ps, "props", "gridSize", cfg.props.gridSize);
    cfg.props.functionCases = integer_or(ps, "props", "functionCases", cfg.props.functionCases);
    cfg.props.functionGridSize =
        integer_or(ps, "props", "functionGridSize", cfg.props.functionGridSize);
    if (cfg.props.cases < 1 || cfg.props.polarizers < 1 || cfg.props.functionCases < 1) {
      invalid("props counts must be >= 1");
    }
    if (cfg.props.gridSize < 8 || cfg.props.functionGridSize < 8) {
      invalid("props grid sizes must be >= 8");
    }
  }
  return cfg;
}

ExperimentConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), overrides);
}

}  // namespace fracpol
