#include "perihyp/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace perihyp {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void emit(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        emit(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += close;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      bool first = true;
      for (const auto& v : j) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        emit(v, indent, depth + 1, out);
      }
      out += nl;
      out += close;
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_number(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  out += "\n";
  return out;
}

void write_json(const std::string& path, const Json& j) {
  auto out = open_out(path);
  out << dump_json(j);
}

Json to_json(const ValidationReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"pass", c.pass},
                      {"margin", number_or_null(c.margin)},
                      {"x", c.x},
                      {"t", c.t},
                      {"detail", c.detail}});
  }
  return {{"pass", r.pass()}, {"checks", checks}};
}

Json to_json(const GNorm& g) {
  return {{"value", g.value}, {"row", g.row + 1}, {"t", g.t}, {"row_values", g.row_values}};
}

Json to_json(const LyapunovCondition& c) {
  return {{"name", c.name},     {"pass", c.pass}, {"value", number_or_null(c.value)},
          {"margin", number_or_null(c.margin)}, {"required", c.required}, {"x", c.x},
          {"t", c.t}};
}

Json to_json(const CertificationReport& r) {
  Json norms = Json::array();
  for (std::size_t i = 0; i < r.dissipativity.norms.size(); ++i) {
    Json g = to_json(r.dissipativity.norms[i]);
    g["i"] = static_cast<int>(i);
    norms.push_back(g);
  }
  return {{"validation", to_json(r.validation)},
          {"auto_margins", r.auto_margins},
          {"lyapunov",
           {{"i_lower", to_json(r.cond_i_lower)},
            {"i_upper", to_json(r.cond_i_upper)},
            {"ii", to_json(r.cond_ii)},
            {"iii", to_json(r.cond_iii)},
            {"pass", r.lyapunov_pass}}},
          {"dissipativity", {{"norms", norms}, {"pass", r.dissipativity.pass}}},
          {"pass", r.pass},
          {"note", r.note}};
}

Json to_json(const SolveReport& r) {
  Json j = {{"converged", r.converged},
            {"message", r.message},
            {"iterations", r.iterations},
            {"increments", r.increments},
            {"fixed_point_residual", number_or_null(r.fixed_point_residual)},
            {"operator_residual", number_or_null(r.operator_residual)},
            {"pde_residual", number_or_null(r.pde_residual)},
            {"boundary_residual", number_or_null(r.boundary_residual)},
            {"g0_norm", number_or_null(r.g0_norm)},
            {"solution_sup_norm", r.solution.components() > 0 ? r.solution.sup_norm() : 0.0},
            {"warnings", r.warnings}};
  if (!r.outer_increments.empty()) {
    j["outer_contraction"] = r.outer_contraction;
    j["inner_iterations"] = r.inner_iterations;
  }
  if (r.solution.components() > 0)
    j["grid"] = {{"nx", r.solution.grid().nx}, {"nt", r.solution.grid().nt}, {"period", r.solution.grid().period}};
  return j;
}

Json to_json(const DecayEstimate& d) {
  return {{"alpha", number_or_null(d.alpha)},
          {"M", d.M},
          {"envelope", d.envelope},
          {"contraction", d.contraction},
          {"fit_residual", d.fit_residual},
          {"decayed_to_zero", d.decayed_to_zero}};
}

Json to_json(const MmsResult& r) {
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"nx", l.nx},
                      {"nt", l.nt},
                      {"sup_error", l.sup_error},
                      {"operator_residual", number_or_null(l.operator_residual)},
                      {"order", l.order},
                      {"d2t_max", l.d2t_max},
                      {"iterations", l.iterations},
                      {"converged", l.converged}});
  }
  return {{"levels", levels}, {"monotone", r.monotone}};
}

Json to_json(const PerturbResult& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples) {
    samples.push_back({{"sample", s.index + 1},
                       {"valid", s.valid},
                       {"converged", s.converged},
                       {"iterations", s.iterations},
                       {"solution_norm", s.solution_norm},
                       {"deviation", s.deviation},
                       {"message", s.message}});
  }
  return {{"gamma", r.gamma},
          {"seed", r.seed},
          {"base_converged", r.base_converged},
          {"base_norm", r.base_norm},
          {"max_deviation", r.max_deviation},
          {"deviation_constant", r.deviation_constant},
          {"all_converged", r.all_converged},
          {"samples", samples}};
}

void write_solution_csv(const std::string& path, const GridFunction& u) {
  auto out = open_out(path);
  const Grid& g = u.grid();
  out << "x,t";
  for (int j = 0; j < u.components(); ++j) out << ",u" << j + 1;
  out << "\n";
  for (int l = 0; l < g.nt; ++l) {
    for (int i = 0; i <= g.nx; ++i) {
      out << format_number(g.x(i)) << ',' << format_number(g.t(l));
      for (int j = 0; j < u.components(); ++j) out << ',' << format_number(u.at(l, i, j));
      out << "\n";
    }
  }
}

void write_norms_csv(const std::string& path, const TrajectoryRecord& rec) {
  auto out = open_out(path);
  out << "t,l2_norm,sup_norm\n";
  for (std::size_t k = 0; k < rec.times.size(); ++k)
    out << format_number(rec.times[k]) << ',' << format_number(rec.l2[k]) << ',' << format_number(rec.sup[k])
        << "\n";
}

void write_increments_csv(const std::string& path, const std::vector<double>& increments) {
  auto out = open_out(path);
  out << "iteration,increment\n";
  for (std::size_t k = 0; k < increments.size(); ++k) out << k + 1 << ',' << format_number(increments[k]) << "\n";
}

void write_mms_csv(const std::string& path, const MmsResult& r) {
  auto out = open_out(path);
  out << "nx,nt,sup_error,operator_residual,order,d2t_max,iterations,converged\n";
  for (const auto& l : r.levels)
    out << l.nx << ',' << l.nt << ',' << format_number(l.sup_error) << ',' << format_number(l.operator_residual)
        << ',' << format_number(l.order) << ',' << format_number(l.d2t_max) << ',' << l.iterations << ','
        << (l.converged ? 1 : 0) << "\n";
}

void write_perturb_csv(const std::string& path, const PerturbResult& r) {
  auto out = open_out(path);
  out << "sample,valid,converged,iterations,solution_norm,deviation\n";
  for (const auto& s : r.samples)
    out << s.index + 1 << ',' << (s.valid ? 1 : 0) << ',' << (s.converged ? 1 : 0) << ',' << s.iterations << ','
        << format_number(s.solution_norm) << ',' << format_number(s.deviation) << "\n";
}

}  // namespace perihyp
