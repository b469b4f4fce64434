#include "perihyp/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace perihyp {

namespace {

class Reader {
 public:
  explicit Reader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const YAML::Mark mark = at.IsDefined() ? at.Mark() : YAML::Mark::null_mark();
    if (mark.is_null()) throw ConfigError(origin_ + ": " + msg);
    const int line = mark.line + 1, column = mark.column + 1;
    throw ConfigError(origin_ + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + msg, line,
                      column);
  }

  void require_map(const YAML::Node& node, const std::string& what) const {
    if (!node.IsMap()) fail(node, what + " must be a mapping");
  }

  void check_keys(const YAML::Node& node, const std::set<std::string>& allowed, const std::string& what) const {
    require_map(node, what);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + what);
    }
  }

  YAML::Node required(const YAML::Node& parent, const std::string& key, const std::string& what) const {
    YAML::Node n = parent[key];
    if (!n.IsDefined() || n.IsNull()) fail(parent, "missing required key '" + key + "' in " + what);
    return n;
  }

  std::string scalar(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    return n.Scalar();
  }

  Expression expression(const YAML::Node& n, const std::string& what, const std::set<int>& allowed) const {
    const std::string text = scalar(n, what);
    Expression e;
    try {
      e = parse_expression(text);
    } catch (const ParseError& err) {
      fail(n, what + ": " + err.what() + " in \"" + text + "\"");
    }
    for (int s : e.free_slots()) {
      if (!allowed.count(s)) fail(n, what + ": variable '" + slot_name(s) + "' is not allowed here");
    }
    return e;
  }

  double number(const YAML::Node& n, const std::string& what) const {
    Expression e = expression(n, what, {});
    try {
      const double v = *e.constant_value();
      if (!std::isfinite(v)) fail(n, what + " is not finite");
      return v;
    } catch (const DomainError& err) {
      fail(n, what + ": " + err.what());
    }
  }

  int integer(const YAML::Node& n, const std::string& what) const {
    const double v = number(n, what);
    if (v != std::nearbyint(v) || std::abs(v) > 1e9) fail(n, what + " must be an integer");
    return static_cast<int>(v);
  }

  bool boolean(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<bool>();
    } catch (const YAML::Exception&) {
      fail(n, what + " must be true or false");
    }
  }

  std::vector<Expression> expression_list(const YAML::Node& n, int size, const std::string& what,
                                          const std::set<int>& allowed) const {
    if (!n.IsSequence()) fail(n, what + " must be a list");
    if (static_cast<int>(n.size()) != size)
      fail(n, what + " must have " + std::to_string(size) + " entries, found " + std::to_string(n.size()));
    std::vector<Expression> out;
    for (std::size_t k = 0; k < n.size(); ++k)
      out.push_back(expression(n[k], what + "[" + std::to_string(k + 1) + "]", allowed));
    return out;
  }

  std::vector<Expression> expression_matrix(const YAML::Node& n, int size, const std::string& what,
                                            const std::set<int>& allowed) const {
    if (!n.IsSequence()) fail(n, what + " must be a list of rows");
    if (static_cast<int>(n.size()) != size)
      fail(n, what + " must have " + std::to_string(size) + " rows, found " + std::to_string(n.size()));
    std::vector<Expression> out;
    for (std::size_t j = 0; j < n.size(); ++j) {
      auto row = expression_list(n[j], size, what + "[" + std::to_string(j + 1) + "]", allowed);
      out.insert(out.end(), row.begin(), row.end());
    }
    return out;
  }

 private:
  std::string origin_;
};

const std::set<int> kXT = {slot::x, slot::t};
const std::set<int> kT = {slot::t};
const std::set<int> kTQ = {slot::t, slot::q};

std::set<int> state_slots(int n) {
  std::set<int> s = kXT;
  for (int k = 0; k < n; ++k) s.insert(slot::u(k));
  return s;
}

struct Sizes {
  int n;
  int m;
  double period;
};

Sizes read_sizes(const Reader& rd, const YAML::Node& sec, const std::string& what) {
  Sizes s;
  s.n = rd.integer(rd.required(sec, "n", what), what + ".n");
  if (s.n < 2) rd.fail(sec["n"], what + ".n must be at least 2");
  s.m = rd.integer(rd.required(sec, "m", what), what + ".m");
  if (s.m < 0 || s.m > s.n) rd.fail(sec["m"], what + ".m must lie in [0, n]");
  s.period = rd.number(rd.required(sec, "period", what), what + ".period");
  if (!(s.period > 0.0)) rd.fail(sec["period"], what + ".period must be positive");
  return s;
}

NonlocalBoundary read_nonlocal(const Reader& rd, const YAML::Node& node, int n, const std::string& what) {
  NonlocalBoundary nl;
  nl.H = rd.expression(rd.required(node, "H", what), what + ".H", kTQ);
  const YAML::Node q = rd.required(node, "Q", what);
  rd.check_keys(q, {"points", "kernels"}, what + ".Q");
  auto component = [&](const YAML::Node& c, const std::string& w) {
    const int k = rd.integer(c, w);
    if (k < 1 || k > n) rd.fail(c, w + " must lie in [1, n]");
    return k - 1;
  };
  if (q["points"]) {
    if (!q["points"].IsSequence()) rd.fail(q["points"], what + ".Q.points must be a list");
    for (std::size_t p = 0; p < q["points"].size(); ++p) {
      const YAML::Node pt = q["points"][p];
      const std::string w = what + ".Q.points[" + std::to_string(p + 1) + "]";
      rd.check_keys(pt, {"weight", "component", "location"}, w);
      PointSample s;
      s.weight = make_field(pt["weight"] ? rd.expression(pt["weight"], w + ".weight", kT) : Expression::constant(1.0));
      s.component = component(rd.required(pt, "component", w), w + ".component");
      s.location = rd.number(rd.required(pt, "location", w), w + ".location");
      if (s.location < 0.0 || s.location > 1.0) rd.fail(pt["location"], w + ".location must lie in [0, 1]");
      nl.points.push_back(s);
    }
  }
  if (q["kernels"]) {
    if (!q["kernels"].IsSequence()) rd.fail(q["kernels"], what + ".Q.kernels must be a list");
    for (std::size_t p = 0; p < q["kernels"].size(); ++p) {
      const YAML::Node kn = q["kernels"][p];
      const std::string w = what + ".Q.kernels[" + std::to_string(p + 1) + "]";
      rd.check_keys(kn, {"kernel", "component"}, w);
      KernelIntegral ki;
      ki.kernel = make_field(rd.expression(rd.required(kn, "kernel", w), w + ".kernel", kXT));
      ki.component = component(rd.required(kn, "component", w), w + ".component");
      nl.kernels.push_back(ki);
    }
  }
  return nl;
}

void read_boundary(const Reader& rd, const YAML::Node& sec, int n, std::vector<double>& r, std::vector<Expression>& h,
                   std::vector<std::optional<NonlocalBoundary>>& nonlocal) {
  rd.check_keys(sec, {"r", "h", "nonlocal"}, "boundary");
  (void)rd.expression_matrix(rd.required(sec, "r", "boundary"), n, "boundary.r", {});
  r.clear();
  const YAML::Node rnode = sec["r"];
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) r.push_back(rd.number(rnode[j][k], "boundary.r[" + std::to_string(j + 1) + "][" +
                                                                         std::to_string(k + 1) + "]"));
  h = sec["h"] ? rd.expression_list(sec["h"], n, "boundary.h", kT)
               : std::vector<Expression>(n, Expression::constant(0.0));
  nonlocal.assign(n, std::nullopt);
  if (sec["nonlocal"]) {
    const YAML::Node list = sec["nonlocal"];
    if (!list.IsSequence()) rd.fail(list, "boundary.nonlocal must be a list");
    for (std::size_t p = 0; p < list.size(); ++p) {
      const std::string w = "boundary.nonlocal[" + std::to_string(p + 1) + "]";
      rd.check_keys(list[p], {"row", "H", "Q"}, w);
      const int row = rd.integer(rd.required(list[p], "row", w), w + ".row");
      if (row < 1 || row > n) rd.fail(list[p]["row"], w + ".row must lie in [1, n]");
      if (nonlocal[row - 1]) rd.fail(list[p]["row"], w + ": row " + std::to_string(row) + " given twice");
      nonlocal[row - 1] = read_nonlocal(rd, list[p], n, w);
    }
  }
}

}  // namespace

Config parse_config(const std::string& text, const std::string& origin) {
  Reader rd(origin);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                          ": " + e.msg,
                      e.mark.line + 1, e.mark.column + 1);
  }
  if (!root.IsMap()) throw ConfigError(origin + ": configuration must be a mapping of sections");
  rd.check_keys(root, {"system", "quasilinear", "boundary", "lyapunov", "grid", "solver", "mms", "perturb", "simulate"},
                "configuration");

  Config cfg;
  cfg.origin = origin;
  const bool has_sys = root["system"].IsDefined();
  const bool has_ql = root["quasilinear"].IsDefined();
  if (has_sys == has_ql) rd.fail(root, "exactly one of 'system' and 'quasilinear' must be given");
  cfg.quasilinear = has_ql;
  int n = 0;
  if (has_sys) {
    const YAML::Node sec = root["system"];
    rd.check_keys(sec, {"n", "m", "period", "a", "b", "f"}, "system");
    Sizes s = read_sizes(rd, sec, "system");
    n = s.n;
    LinearProblem& p = cfg.linear;
    p.n = s.n;
    p.m = s.m;
    p.period = s.period;
    p.a = rd.expression_list(rd.required(sec, "a", "system"), n, "system.a", kXT);
    p.b = sec["b"] ? rd.expression_matrix(sec["b"], n, "system.b", kXT)
                   : std::vector<Expression>(static_cast<std::size_t>(n) * n, Expression::constant(0.0));
    p.f = sec["f"] ? rd.expression_list(sec["f"], n, "system.f", kXT)
                   : std::vector<Expression>(n, Expression::constant(0.0));
  } else {
    const YAML::Node sec = root["quasilinear"];
    rd.check_keys(sec, {"n", "m", "period", "A", "F", "delta0"}, "quasilinear");
    Sizes s = read_sizes(rd, sec, "quasilinear");
    n = s.n;
    QuasilinearSystemSpec& q = cfg.qspec;
    q.n = s.n;
    q.m = s.m;
    q.period = s.period;
    q.A = rd.expression_list(rd.required(sec, "A", "quasilinear"), n, "quasilinear.A", state_slots(n));
    q.F = rd.expression_list(rd.required(sec, "F", "quasilinear"), n, "quasilinear.F", state_slots(n));
    if (sec["delta0"]) {
      q.delta0 = rd.number(sec["delta0"], "quasilinear.delta0");
      if (!(q.delta0 > 0.0)) rd.fail(sec["delta0"], "quasilinear.delta0 must be positive");
    }
  }

  {
    std::vector<double> r;
    std::vector<Expression> h;
    std::vector<std::optional<NonlocalBoundary>> nonlocal;
    read_boundary(rd, rd.required(root, "boundary", "configuration"), n, r, h, nonlocal);
    cfg.linear.r = r;
    cfg.linear.h = h;
    cfg.linear.nonlocal = nonlocal;
    if (!has_sys) cfg.linear.n = n;
    cfg.boundary = cfg.linear.boundary();
  }
  if (has_sys) cfg.system = cfg.linear.system();

  cfg.lyapunov = LyapunovSpec::identity(n);
  if (const YAML::Node sec = root["lyapunov"]) {
    rd.check_keys(sec, {"V", "margins"}, "lyapunov");
    if (sec["V"]) {
      cfg.lyapunov.V.clear();
      for (const auto& e : rd.expression_list(sec["V"], n, "lyapunov.V", kXT)) cfg.lyapunov.V.push_back(make_field(e));
    }
    if (const YAML::Node mg = sec["margins"]) {
      if (mg.IsScalar() && mg.Scalar() == "auto") {
        cfg.lyapunov.margins.reset();
      } else {
        if (!mg.IsSequence() || mg.size() != 4) rd.fail(mg, "lyapunov.margins must be 'auto' or a list of 4 numbers");
        std::array<double, 4> b{};
        for (std::size_t k = 0; k < 4; ++k) {
          b[k] = rd.number(mg[k], "lyapunov.margins[" + std::to_string(k + 1) + "]");
          if (!(b[k] > 0.0)) rd.fail(mg[k], "lyapunov margins must be positive");
        }
        cfg.lyapunov.margins = b;
      }
    }
  }

  if (const YAML::Node sec = root["grid"]) {
    rd.check_keys(sec, {"nx", "nt", "substeps", "a0", "interpolation"}, "grid");
    auto positive = [&](const char* key, int& out) {
      if (!sec[key]) return;
      out = rd.integer(sec[key], std::string("grid.") + key);
      if (out < 1) rd.fail(sec[key], std::string("grid.") + key + " must be positive");
    };
    positive("nx", cfg.disc.nx);
    positive("nt", cfg.disc.nt);
    positive("substeps", cfg.disc.substeps);
    if (sec["a0"]) {
      cfg.disc.a0 = rd.number(sec["a0"], "grid.a0");
      if (!(cfg.disc.a0 > 0.0)) rd.fail(sec["a0"], "grid.a0 must be positive");
    }
    if (sec["interpolation"]) {
      const std::string rule = rd.scalar(sec["interpolation"], "grid.interpolation");
      if (rule == "linear")
        cfg.disc.rule = InterpolationRule::Linear;
      else if (rule == "monotone_cubic")
        cfg.disc.rule = InterpolationRule::MonotoneCubic;
      else
        rd.fail(sec["interpolation"], "grid.interpolation must be 'linear' or 'monotone_cubic'");
    }
  }

  if (const YAML::Node sec = root["solver"]) {
    rd.check_keys(sec, {"tol", "maxit", "anderson", "tol_inner", "tol_outer", "maxit_outer"}, "solver");
    auto tol = [&](const char* key, double& out) {
      if (!sec[key]) return;
      out = rd.number(sec[key], std::string("solver.") + key);
      if (!(out > 0.0)) rd.fail(sec[key], std::string("solver.") + key + " must be positive");
    };
    auto count = [&](const char* key, int& out) {
      if (!sec[key]) return;
      out = rd.integer(sec[key], std::string("solver.") + key);
      if (out < 1) rd.fail(sec[key], std::string("solver.") + key + " must be positive");
    };
    tol("tol", cfg.solver.tol);
    tol("tol_inner", cfg.solver.tol_inner);
    tol("tol_outer", cfg.solver.tol_outer);
    count("maxit", cfg.solver.maxit);
    count("maxit_outer", cfg.solver.maxit_outer);
    if (sec["anderson"]) cfg.solver.anderson = rd.boolean(sec["anderson"], "solver.anderson");
  }

  if (const YAML::Node sec = root["mms"]) {
    rd.check_keys(sec, {"solution", "levels"}, "mms");
    MmsSettings mms;
    mms.solution = rd.expression_list(rd.required(sec, "solution", "mms"), n, "mms.solution", kXT);
    if (const YAML::Node lv = sec["levels"]) {
      if (!lv.IsSequence() || lv.size() < 2) rd.fail(lv, "mms.levels must be a list of at least two [nx, nt] pairs");
      for (std::size_t k = 0; k < lv.size(); ++k) {
        const std::string w = "mms.levels[" + std::to_string(k + 1) + "]";
        if (!lv[k].IsSequence() || lv[k].size() != 2) rd.fail(lv[k], w + " must be a pair [nx, nt]");
        const int nx = rd.integer(lv[k][0], w), nt = rd.integer(lv[k][1], w);
        if (nx < 2 || nt < 2) rd.fail(lv[k], w + " entries must be at least 2");
        mms.levels.emplace_back(nx, nt);
      }
    } else {
      mms.levels = {{32, 32}, {64, 64}, {128, 128}, {256, 256}};
    }
    cfg.mms = mms;
  }

  if (const YAML::Node sec = root["perturb"]) {
    rd.check_keys(sec, {"gamma", "samples"}, "perturb");
    if (sec["gamma"]) {
      cfg.perturb.gamma = rd.number(sec["gamma"], "perturb.gamma");
      if (cfg.perturb.gamma < 0.0) rd.fail(sec["gamma"], "perturb.gamma must be non-negative");
    }
    if (sec["samples"]) {
      cfg.perturb.samples = rd.integer(sec["samples"], "perturb.samples");
      if (cfg.perturb.samples < 1) rd.fail(sec["samples"], "perturb.samples must be positive");
    }
  }

  if (const YAML::Node sec = root["simulate"]) {
    rd.check_keys(sec, {"t_end", "initial", "skip"}, "simulate");
    if (sec["t_end"]) cfg.simulate.t_end = rd.number(sec["t_end"], "simulate.t_end");
    if (sec["initial"]) {
      cfg.simulate.initial = rd.scalar(sec["initial"], "simulate.initial");
      if (cfg.simulate.initial != "zero" && cfg.simulate.initial != "random")
        rd.fail(sec["initial"], "simulate.initial must be 'zero' or 'random'");
    }
    if (sec["skip"]) {
      cfg.simulate.skip = rd.integer(sec["skip"], "simulate.skip");
      if (cfg.simulate.skip < 0) rd.fail(sec["skip"], "simulate.skip must be non-negative");
    }
  }

  validate_config(cfg);
  return cfg;
}

void validate_config(const Config& cfg) {
  ValidationOptions vopts;
  vopts.nx = cfg.disc.nx;
  vopts.nt = cfg.disc.nt;
  vopts.a0 = cfg.disc.a0;
  ValidationReport sys = cfg.quasilinear ? validate(cfg.qspec, vopts) : validate(cfg.system, vopts);
  if (!sys.pass()) throw ConfigError(cfg.origin + ": validation failed:\n" + sys.failures());
  ValidationReport bnd = validate(cfg.boundary, cfg.period(), vopts);
  if (!bnd.pass()) throw ConfigError(cfg.origin + ": boundary validation failed:\n" + bnd.failures());
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

}  // namespace perihyp
