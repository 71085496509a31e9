#include "cpsurf/cli.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace cpsurf::cli {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) config_error("unknown key '" + it.key() + "' in " + where);
  }
}

double number(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number()) config_error(what + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) config_error(what + " must be finite");
  return d;
}

std::pair<double, double> interval(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 2) config_error(what + " must be [min, max]");
  const double a = number(v[0], what), b = number(v[1], what);
  if (a > b) config_error(what + " has min > max");
  return {a, b};
}

Bindings params_of(const nlohmann::json& sol) {
  Bindings out;
  if (!sol.contains("params")) return out;
  const auto& p = sol["params"];
  if (!p.is_object()) config_error("solution.params must be an object");
  for (auto it = p.begin(); it != p.end(); ++it) out[it.key()] = number(it.value(), "solution.params." + it.key());
  return out;
}

std::vector<std::string> strings_of(const nlohmann::json& v, const std::string& what) {
  if (!v.is_array()) config_error(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) config_error(what + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

ojson matrix_json(const Eigen::MatrixXcd& m) {
  ojson re = ojson::array(), im = ojson::array();
  for (int r = 0; r < m.rows(); ++r) {
    ojson rr = ojson::array(), ir = ojson::array();
    for (int c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  return {{"re", re}, {"im", im}};
}

ojson real_matrix_json(const Eigen::MatrixXd& m) {
  ojson out = ojson::array();
  for (int r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

ojson vector_json(const Eigen::VectorXd& v) {
  ojson out = ojson::array();
  for (int k = 0; k < v.size(); ++k) out.push_back(v[k]);
  return out;
}

ojson optional_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

ojson domain_json(const Grid& g) {
  return {{"xiL", {g.l_min, g.l_max}}, {"xiR", {g.r_min, g.r_max}}};
}

ojson header(const std::string& command, const RunConfig& cfg) {
  ojson j;
  j["command"] = command;
  j["solution"] = cfg.solution_label;
  j["N"] = cfg.spec.n;
  return j;
}

std::filesystem::path output_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(cfg.out_dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + cfg.out_dir + ": " + ec.message());
  return std::filesystem::path(cfg.out_dir) / name;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void dump_into(const ojson& j, std::string& out, int indent) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  switch (j.type()) {
    case ojson::value_t::null: out += "null"; break;
    case ojson::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case ojson::value_t::number_integer: out += std::to_string(j.get<std::int64_t>()); break;
    case ojson::value_t::number_unsigned: out += std::to_string(j.get<std::uint64_t>()); break;
    case ojson::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      break;
    }
    case ojson::value_t::string: out += j.dump(); break;
    case ojson::value_t::array: {
      const bool flat = std::none_of(j.begin(), j.end(), [](const ojson& e) { return e.is_structured(); });
      if (j.empty()) {
        out += "[]";
      } else if (flat) {
        out += "[";
        for (std::size_t k = 0; k < j.size(); ++k) {
          if (k) out += ", ";
          dump_into(j[k], out, indent);
        }
        out += "]";
      } else {
        out += "[\n";
        for (std::size_t k = 0; k < j.size(); ++k) {
          out += inner;
          dump_into(j[k], out, indent + 2);
          out += k + 1 < j.size() ? ",\n" : "\n";
        }
        out += pad + "]";
      }
      break;
    }
    case ojson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t k = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++k) {
        out += inner + ojson(it.key()).dump() + ": ";
        dump_into(it.value(), out, indent + 2);
        out += k + 1 < j.size() ? ",\n" : "\n";
      }
      out += pad + "}";
      break;
    }
    default: out += "null"; break;
  }
}

void require_area(const RunConfig& cfg) {
  if (cfg.grid.l_min == cfg.grid.l_max || cfg.grid.r_min == cfg.grid.r_max) {
    config_error("domain rectangle must have positive area for this command");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string dump_json(const ojson& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

Point parse_point(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) config_error("point must be 'xiL,xiR'");
  try {
    std::size_t used_l = 0, used_r = 0;
    const std::string l = text.substr(0, comma), r = text.substr(comma + 1);
    const double xl = std::stod(l, &used_l), xr = std::stod(r, &used_r);
    if (used_l != l.size() || used_r != r.size() || !std::isfinite(xl) || !std::isfinite(xr)) throw 0;
    return {xl, xr};
  } catch (...) {
    config_error("point must be 'xiL,xiR' with two finite numbers, got '" + text + "'");
  }
}

RunConfig parse_config(const std::string& json_text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) config_error("config must be a JSON object");
  check_keys(root, {"N", "solution", "domain", "grid", "base", "tolerances", "projection", "point", "out_dir"},
             "config");

  RunConfig cfg;
  if (!root.contains("solution") || !root["solution"].is_object()) config_error("missing object 'solution'");
  const auto& sol = root["solution"];
  check_keys(sol, {"builtin", "components", "params"}, "solution");
  const Bindings params = params_of(sol);
  std::vector<std::string> components;
  if (sol.contains("components")) components = strings_of(sol["components"], "solution.components");
  if (sol.contains("builtin")) {
    if (!sol["builtin"].is_string()) config_error("solution.builtin must be a string");
    cfg.solution_label = sol["builtin"].get<std::string>();
    cfg.spec = make_builtin(cfg.solution_label, params, components);
  } else {
    if (components.empty()) config_error("solution needs 'builtin' or 'components'");
    cfg.solution_label = "expression";
    cfg.spec = make_expression_spec(components, params);
  }
  if (root.contains("N")) {
    if (!root["N"].is_number_integer()) config_error("N must be an integer");
    if (root["N"].get<int>() != cfg.spec.n) {
      config_error("N = " + std::to_string(root["N"].get<int>()) + " but the solution has " +
                   std::to_string(cfg.spec.n) + " components");
    }
  }

  if (!root.contains("domain") || !root["domain"].is_object()) config_error("missing object 'domain'");
  check_keys(root["domain"], {"xiL", "xiR"}, "domain");
  if (!root["domain"].contains("xiL") || !root["domain"].contains("xiR")) config_error("domain needs xiL and xiR");
  std::tie(cfg.grid.l_min, cfg.grid.l_max) = interval(root["domain"]["xiL"], "domain.xiL");
  std::tie(cfg.grid.r_min, cfg.grid.r_max) = interval(root["domain"]["xiR"], "domain.xiR");

  if (!root.contains("grid")) config_error("missing 'grid'");
  const auto& g = root["grid"];
  if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer()) {
    config_error("grid must be [n_L, n_R] integers");
  }
  cfg.grid.n_l = g[0].get<int>();
  cfg.grid.n_r = g[1].get<int>();
  if (cfg.grid.n_l < 2 || cfg.grid.n_r < 2) config_error("grid sizes must be >= 2");
  if (static_cast<long long>(cfg.grid.n_l) * cfg.grid.n_r > 25'000'000) config_error("grid too large");

  cfg.base = {cfg.grid.l_min, cfg.grid.r_min};
  if (root.contains("base")) {
    const auto& b = root["base"];
    if (!b.is_array() || b.size() != 2) config_error("base must be [xiL, xiR]");
    cfg.base = {number(b[0], "base"), number(b[1], "base")};
    if (cfg.base.xi_l < cfg.grid.l_min || cfg.base.xi_l > cfg.grid.l_max || cfg.base.xi_r < cfg.grid.r_min ||
        cfg.base.xi_r > cfg.grid.r_max) {
      config_error("base point lies outside the domain");
    }
  }

  if (root.contains("tolerances")) {
    const auto& t = root["tolerances"];
    if (!t.is_object()) config_error("tolerances must be an object");
    check_keys(t, {"det_g", "residual", "quadrature", "willmore"}, "tolerances");
    auto positive = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      slot = number(t[key], std::string("tolerances.") + key);
      if (!(slot > 0.0)) config_error(std::string("tolerances.") + key + " must be positive");
    };
    positive("det_g", cfg.tol.det_g);
    positive("residual", cfg.tol.residual);
    positive("quadrature", cfg.tol.quadrature);
    positive("willmore", cfg.tol.willmore);
  }

  if (root.contains("projection")) {
    cfg.projection = strings_of(root["projection"], "projection");
    if (cfg.projection.size() != 3) config_error("projection needs exactly three basis labels");
    std::set<std::string> labels;
    for (const auto& b : su_basis(cfg.spec.n)) labels.insert(b.label());
    for (const auto& l : cfg.projection) {
      if (!labels.count(l)) config_error("projection label '" + l + "' is not a basis element for this N");
    }
  }

  if (root.contains("point")) {
    const auto& p = root["point"];
    if (!p.is_array() || p.size() != 2) config_error("point must be [xiL, xiR]");
    cfg.point = Point{number(p[0], "point"), number(p[1], "point")};
  }
  if (root.contains("out_dir")) {
    if (!root["out_dir"].is_string()) config_error("out_dir must be a string");
    cfg.out_dir = root["out_dir"].get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read config " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::UnboundParameter:
    case ErrorKind::InvalidSpec:
    case ErrorKind::NotUnitary:
    case ErrorKind::OddPanelCount:
    case ErrorKind::ConfigError:
    case ErrorKind::IoError:
      return kConfigError;
    case ErrorKind::QuadratureNonConvergence:
      return kToleranceFailure;
    default:
      return kDomainError;
  }
}

// ---------------------------------------------------------------------------

int cmd_check(const RunConfig& cfg, std::ostream& log) {
  const std::vector<CheckSample> s = check_sweep(cfg.spec, cfg.grid);
  struct Stat {
    double max = 0.0, sum = 0.0;
    int arg = 0;
  };
  Stat el, cons, closed;
  for (int idx = 0; idx < static_cast<int>(s.size()); ++idx) {
    auto add = [&](Stat& st, double v) {
      if (v > st.max || idx == 0) {
        st.max = v;
        st.arg = idx;
      }
      st.sum += v;
    };
    add(el, s[idx].el);
    add(cons, s[idx].conservation);
    add(closed, s[idx].closedness);
  }
  const double count = static_cast<double>(s.size());
  const bool pass = el.max <= cfg.tol.residual && cons.max <= cfg.tol.residual && closed.max <= cfg.tol.residual;

  ojson j = header("check", cfg);
  j["grid"] = {cfg.grid.n_l, cfg.grid.n_r};
  j["domain"] = domain_json(cfg.grid);
  j["tolerance"] = cfg.tol.residual;
  auto stat_json = [&](const Stat& st) {
    const int i = st.arg / cfg.grid.n_r, jj = st.arg % cfg.grid.n_r;
    return ojson{{"max", st.max},
                 {"mean", st.sum / count},
                 {"argmax", {i, jj}},
                 {"argmax_point", {cfg.grid.xi_l(i), cfg.grid.xi_r(jj)}}};
  };
  j["summary"] = {{"el", stat_json(el)}, {"conservation", stat_json(cons)}, {"closedness", stat_json(closed)}};
  j["pass"] = pass;
  ojson points = ojson::array();
  for (int idx = 0; idx < static_cast<int>(s.size()); ++idx) {
    const int i = idx / cfg.grid.n_r, jj = idx % cfg.grid.n_r;
    points.push_back({{"index", {i, jj}},
                      {"xi", {cfg.grid.xi_l(i), cfg.grid.xi_r(jj)}},
                      {"el", s[idx].el},
                      {"conservation", s[idx].conservation},
                      {"closedness", s[idx].closedness}});
  }
  j["points"] = points;
  write_file(output_path(cfg, "check.json"), dump_json(j));

  log << "check: max EL " << format_double(el.max) << ", max conservation " << format_double(cons.max)
      << ", max closedness " << format_double(closed.max) << " (tolerance " << format_double(cfg.tol.residual)
      << ") -> " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? kOk : kToleranceFailure;
}

int cmd_geometry(const RunConfig& cfg, std::ostream& log) {
  const std::vector<GeometrySample> s = geometry_sweep(cfg.spec, cfg.grid);
  std::string csv = "xiL,xiR,J_L,G_LR,J_R,detG,regular,K,H_norm\r\n";
  int regular = 0;
  for (const GeometrySample& g : s) {
    const bool reg = g.metric.regular();
    regular += reg;
    csv += format_double(g.point.xi_l) + "," + format_double(g.point.xi_r) + "," + format_double(g.metric.j_left) +
           "," + format_double(g.metric.g_lr) + "," + format_double(g.metric.j_right) + "," +
           format_double(g.metric.det_g) + "," + (reg ? "true" : "false") + "," +
           (g.k ? format_double(*g.k) : "") + "," + (g.h_norm ? format_double(*g.h_norm) : "") + "\r\n";
  }
  write_file(output_path(cfg, "geometry.csv"), csv);
  log << "geometry: " << s.size() << " points, " << regular << " regular\n";
  return kOk;
}

int cmd_immerse(const RunConfig& cfg, std::ostream& log) {
  require_area(cfg);
  QuadratureOptions opts;
  opts.tolerance = cfg.tol.quadrature;
  const Immersion im = integrate_immersion(cfg.spec, cfg.base, cfg.grid, opts);
  const std::vector<GeometrySample> geo = geometry_sweep(cfg.spec, cfg.grid);
  const std::vector<BasisElement> basis = su_basis(cfg.spec.n);
  const Grid& g = cfg.grid;

  std::vector<Eigen::VectorXd> coords(g.size());
  for (int idx = 0; idx < g.size(); ++idx) coords[idx] = su_coordinates(im.x[idx], basis);

  ojson j = header("immerse", cfg);
  ojson labels = ojson::array();
  for (const auto& b : basis) labels.push_back(b.label());
  j["basis"] = labels;
  j["grid"] = {g.n_l, g.n_r};
  j["domain"] = domain_json(g);
  j["base"] = {cfg.base.xi_l, cfg.base.xi_r};
  j["vertex_order"] = "index = i * n_R + j";
  ojson verts = ojson::array(), xi = ojson::array();
  for (int idx = 0; idx < g.size(); ++idx) {
    verts.push_back(vector_json(coords[idx]));
    xi.push_back({geo[idx].point.xi_l, geo[idx].point.xi_r});
  }
  j["xi"] = xi;
  j["vertices"] = verts;
  ojson faces = ojson::array();
  for (int i = 0; i + 1 < g.n_l; ++i) {
    for (int jj = 0; jj + 1 < g.n_r; ++jj) {
      faces.push_back({g.index(i, jj), g.index(i + 1, jj), g.index(i + 1, jj + 1), g.index(i, jj + 1)});
    }
  }
  j["faces"] = faces;
  j["face_index_base"] = 0;
  ojson k = ojson::array(), h = ojson::array(), det = ojson::array();
  for (const GeometrySample& s : geo) {
    k.push_back(optional_json(s.k));
    h.push_back(optional_json(s.h_norm));
    det.push_back(s.metric.det_g);
  }
  j["scalars"] = {{"K", k}, {"H_norm", h}, {"detG", det}};

  auto obj = [&](const std::array<int, 3>& axes) {
    std::string text;
    for (int idx = 0; idx < g.size(); ++idx) {
      text += "v " + format_double(coords[idx][axes[0]]) + " " + format_double(coords[idx][axes[1]]) + " " +
              format_double(coords[idx][axes[2]]) + "\n";
    }
    for (int i = 0; i + 1 < g.n_l; ++i) {
      for (int jj = 0; jj + 1 < g.n_r; ++jj) {
        text += "f " + std::to_string(g.index(i, jj) + 1) + " " + std::to_string(g.index(i + 1, jj) + 1) + " " +
                std::to_string(g.index(i + 1, jj + 1) + 1) + " " + std::to_string(g.index(i, jj + 1) + 1) + "\n";
      }
    }
    return text;
  };

  std::vector<std::string> written = {"surface.json"};
  if (cfg.spec.n == 2) {
    write_file(output_path(cfg, "surface.obj"), obj({0, 1, 2}));
    written.push_back("surface.obj");
    j["obj"] = {{"file", "surface.obj"}, {"axes", {"A12", "B12", "C1"}}, {"projection", false}};
  } else if (!cfg.projection.empty()) {
    std::array<int, 3> axes{};
    for (int a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < basis.size(); ++b) {
        if (basis[b].label() == cfg.projection[a]) axes[a] = static_cast<int>(b);
      }
    }
    const std::string name =
        "surface_projection_" + cfg.projection[0] + "_" + cfg.projection[1] + "_" + cfg.projection[2] + ".obj";
    write_file(output_path(cfg, name), obj(axes));
    written.push_back(name);
    j["obj"] = {{"file", name}, {"axes", cfg.projection}, {"projection", true}};
  }
  write_file(output_path(cfg, "surface.json"), dump_json(j));

  log << "immerse: " << g.size() << " vertices, " << faces.size() << " faces ->";
  for (const auto& w : written) log << " " << w;
  log << "\n";
  return kOk;
}

int cmd_frame(const RunConfig& cfg, std::ostream& log) {
  if (!cfg.point) config_error("frame needs --point xiL,xiR (or 'point' in the config)");
  const Point at = *cfg.point;
  const FieldJet f = eval_field(cfg.spec, at);
  const RegularityReport reg = classify_regularity(f);
  if (!reg.metric.regular()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "point (%.17g, %.17g) is %s (detG=%.3e)", at.xi_l, at.xi_r,
                  to_string(reg.metric.regularity), reg.metric.det_g);
    throw Error(ErrorKind::DegeneratePoint, buf);
  }
  const Frame fr = build_frame(f);
  const Eigen::MatrixXd table = normalization_table(f, fr);
  const GWData gw = gw_coefficients(f, fr);
  const Reconstruction rec = gw_reconstruction_residual(fr, gw);
  const double h = 1e-3;
  const double gc = gauss_codazzi_residual(cfg.spec, at, h);
  const double gc_half = gauss_codazzi_residual(cfg.spec, at, h / 2);
  const MeanCurvature mc = mean_curvature(f, fr);
  const std::vector<BasisElement> basis = su_basis(cfg.spec.n);

  const double table_max = table.cwiseAbs().maxCoeff();
  const bool table_ok = table_max <= 1e-9;
  const bool rec_ok = rec.left <= 1e-7 && rec.right <= 1e-7;

  ojson j = header("frame", cfg);
  j["point"] = {at.xi_l, at.xi_r};
  j["regularity"] = to_string(reg.metric.regularity);
  j["metric"] = {{"J_L", reg.metric.j_left},
                 {"G_LR", reg.metric.g_lr},
                 {"J_R", reg.metric.j_right},
                 {"detG", reg.metric.det_g}};
  ojson labels = ojson::array();
  for (const auto& b : basis) labels.push_back(b.label());
  j["basis"] = labels;
  j["phi"] = matrix_json(fr.phi);
  j["tangents"] = {{"d_left", {{"matrix", matrix_json(fr.d_left)}, {"coordinates", vector_json(su_coordinates(fr.d_left, basis))}}},
                   {"d_right", {{"matrix", matrix_json(fr.d_right)}, {"coordinates", vector_json(su_coordinates(fr.d_right, basis))}}}};
  ojson normals = ojson::array();
  for (std::size_t k = 0; k < fr.normals.size(); ++k) {
    normals.push_back({{"label", fr.labels[k]},
                       {"gram_schmidt", static_cast<int>(k) < fr.gram_schmidt_count},
                       {"matrix", matrix_json(fr.normals[k])},
                       {"coordinates", vector_json(su_coordinates(fr.normals[k], basis))}});
  }
  j["normals"] = normals;
  j["normalization"] = {{"table", real_matrix_json(table)},
                        {"max_abs", table_max},
                        {"tolerance", 1e-9},
                        {"pass", table_ok}};
  j["gauss_weingarten"] = {{"U", real_matrix_json(gw.u)},
                           {"V", real_matrix_json(gw.v)},
                           {"s_antisymmetry_defect", gw.s_defect},
                           {"reconstruction", {{"left", rec.left}, {"right", rec.right}, {"tolerance", 1e-7}, {"pass", rec_ok}}}};
  j["gauss_codazzi"] = {{"h", h}, {"residual", gc}, {"residual_half_step", gc_half}, {"ratio", gc / gc_half}};
  ojson mcj = {{"norm", mc.norm}, {"vector", matrix_json(mc.vector)}};
  if (cfg.spec.n == 2) mcj["scalar"] = mc.scalar;
  j["mean_curvature"] = mcj;
  j["pass"] = table_ok && rec_ok;
  write_file(output_path(cfg, "frame.json"), dump_json(j));

  log << "frame: normalization " << format_double(table_max) << ", reconstruction "
      << format_double(std::max(rec.left, rec.right)) << ", Gauss-Codazzi(h=1e-3) " << format_double(gc) << " -> "
      << (table_ok && rec_ok ? "pass" : "FAIL") << "\n";
  return table_ok && rec_ok ? kOk : kToleranceFailure;
}

int cmd_willmore(const RunConfig& cfg, std::ostream& log) {
  const Grid& g = cfg.grid;
  const int pl = g.n_l - 1, pr = g.n_r - 1;
  if (pl % 2 || pr % 2) {
    throw Error(ErrorKind::OddPanelCount, "willmore needs odd grid sizes (even panel counts), got " +
                                              std::to_string(g.n_l) + " x " + std::to_string(g.n_r));
  }
  ojson levels = ojson::array();
  std::vector<double> values;
  for (int level = 0; level < 3; ++level) {
    const int f = 1 << level;
    const WillmoreResult w = willmore(cfg.spec, g.l_min, g.l_max, g.r_min, g.r_max, pl * f, pr * f);
    values.push_back(w.value);
    levels.push_back({{"panels", {w.panels_l, w.panels_r}}, {"value", w.value}});
  }
  const double last = values.back(), prev = values[values.size() - 2];
  const double change = last == prev ? 0.0 : std::abs(last - prev) / std::max(std::abs(last), 1e-300);
  const bool converged = change <= cfg.tol.willmore;

  ojson j = header("willmore", cfg);
  j["domain"] = domain_json(g);
  j["refinements"] = levels;
  j["relative_change"] = change;
  j["tolerance"] = cfg.tol.willmore;
  j["converged"] = converged;
  j["value"] = last;
  write_file(output_path(cfg, "willmore.json"), dump_json(j));
  log << "willmore: W = " << format_double(last) << " (relative change " << format_double(change) << ") -> "
      << (converged ? "converged" : "NOT converged") << "\n";
  return converged ? kOk : kToleranceFailure;
}

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  static const std::map<std::string, int (*)(const RunConfig&, std::ostream&)> table = {
      {"check", cmd_check}, {"geometry", cmd_geometry}, {"immerse", cmd_immerse},
      {"frame", cmd_frame}, {"willmore", cmd_willmore}};
  const auto it = table.find(command);
  if (it == table.end()) {
    err << "error: unknown command '" << command << "'\n";
    return kConfigError;
  }
  const double saved = det_g_relative_tolerance();
  set_det_g_relative_tolerance(cfg.tol.det_g);
  int code = kOk;
  try {
    code = it->second(cfg, log);
  } catch (const SingularPathError& e) {
    err << "error: " << e.what() << "\n";
    code = kDomainError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    code = exit_code_for(e.kind());
  }
  set_det_g_relative_tolerance(saved);
  return code;
}

}  // namespace cpsurf::cli
