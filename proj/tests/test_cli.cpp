#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cpsurf/cli.hpp"

using namespace cpsurf;
using namespace cpsurf::cli;
namespace fs = std::filesystem;

namespace {

const std::string kCp1 = R"({
  "N": 2,
  "solution": {"builtin": "cp1_example", "params": {"p": -1.5}},
  "domain": {"xiL": [0.2, 1.2], "xiR": [-1.2, -0.2]},
  "grid": [9, 9],
  "point": [1.0, -0.5]
})";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("cpsurf_test_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig config_in(const std::string& text, const fs::path& dir) {
  RunConfig cfg = parse_config(text);
  cfg.out_dir = dir.string();
  return cfg;
}

int run(const std::string& command, const RunConfig& cfg) {
  std::ostringstream log, err;
  return run_command(command, cfg, log, err);
}

std::string config_error_message(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigError);
    return e.what();
  }
  return "";
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(kCp1);
  CHECK(cfg.spec.n == 2);
  CHECK(cfg.solution_label == "cp1_example");
  CHECK(cfg.grid.n_l == 9);
  CHECK(cfg.grid.r_max == -0.2);
  CHECK(cfg.base.xi_l == 0.2);
  CHECK(cfg.base.xi_r == -1.2);
  REQUIRE(cfg.point.has_value());
  CHECK(cfg.point->xi_r == -0.5);
  CHECK(cfg.tol.det_g == 1e-9);

  const RunConfig ex = parse_config(R"({"solution": {"components": ["1", "a*xiL"], "params": {"a": 2}},
      "domain": {"xiL": [0, 1], "xiR": [0, 1]}, "grid": [3, 3], "tolerances": {"residual": 1e-6}})");
  CHECK(ex.solution_label == "expression");
  CHECK(ex.tol.residual == 1e-6);
}

TEST_CASE("config errors name the problem") {
  CHECK(config_error_message("{not json").find("malformed JSON") != std::string::npos);
  CHECK(config_error_message("[]").find("object") != std::string::npos);
  CHECK(config_error_message(R"({"solution": {"builtin": "constant"}, "domain": {"xiL": [0, 1], "xiR": [0, 1]},
      "grid": [3, 3], "colour": 1})").find("colour") != std::string::npos);
  CHECK(config_error_message(R"({"solution": {"builtin": "constant"}, "domain": {"xiL": [0, 1], "xiR": [0, 1]},
      "grid": [1, 3]})").find("grid") != std::string::npos);
  CHECK(config_error_message(R"({"N": 3, "solution": {"builtin": "constant"}, "domain": {"xiL": [0, 1], "xiR": [0, 1]},
      "grid": [3, 3]})").find("N = 3") != std::string::npos);
  CHECK(config_error_message(R"({"solution": {"builtin": "constant"}, "domain": {"xiL": [1, 0], "xiR": [0, 1]},
      "grid": [3, 3]})").find("min > max") != std::string::npos);
  CHECK(config_error_message(R"({"solution": {"builtin": "constant"}, "domain": {"xiL": [0, 1], "xiR": [0, 1]},
      "grid": [3, 3], "base": [2, 0]})").find("base") != std::string::npos);
  CHECK(config_error_message(R"({"solution": {"builtin": "torus"}, "domain": {"xiL": [0, 1], "xiR": [0, 1]},
      "grid": [3, 3], "projection": ["A12", "B12", "C3"]})").find("C3") != std::string::npos);
  CHECK(config_error_message(R"({"solution": {"builtin": "constant"}, "domain": {"xiL": [0, 1], "xiR": [0, 1]},
      "grid": [3, 3], "tolerances": {"det_g": -1}})").find("positive") != std::string::npos);
  CHECK_THROWS_AS(parse_config(R"({"solution": {"components": ["1", "cosh(xiL"]},
      "domain": {"xiL": [0, 1], "xiR": [0, 1]}, "grid": [3, 3]})"), ParseError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorKind::ConfigError) == 2);
  CHECK(exit_code_for(ErrorKind::ParseError) == 2);
  CHECK(exit_code_for(ErrorKind::OddPanelCount) == 2);
  CHECK(exit_code_for(ErrorKind::DegeneratePoint) == 3);
  CHECK(exit_code_for(ErrorKind::SingularPathPoint) == 3);
  CHECK(exit_code_for(ErrorKind::QuadratureNonConvergence) == 4);
}

TEST_CASE("point parsing") {
  const Point p = parse_point("1.5,-2e-1");
  CHECK(p.xi_l == 1.5);
  CHECK(p.xi_r == -0.2);
  CHECK_THROWS_AS(parse_point("1.5"), Error);
  CHECK_THROWS_AS(parse_point("1.5,x"), Error);
  CHECK_THROWS_AS(parse_point("1.5,2,3"), Error);
  CHECK_THROWS_AS(parse_point("nan,1"), Error);
}

TEST_CASE("number formatting round-trips exactly") {
  for (double v : {0.0, -0.0, 1.0, 0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 1.7976931348623157e308, -2.5e-17}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(format_double(std::strtod(s.c_str(), nullptr)) == s);
  }
  CHECK(format_double(0.1) == "1.0000000000000001e-01");
}

TEST_CASE("JSON emission is a fixed point of parse and re-emit") {
  nlohmann::ordered_json j;
  j["a"] = 0.1;
  j["b"] = {1, 2, 3};
  j["c"] = {{"x", -1.0 / 3.0}, {"y", nullptr}, {"z", true}};
  j["d"] = {{1.0, 2.0}, {3.5, 4.25}};
  j["e"] = std::nan("");
  const std::string once = dump_json(j);
  CHECK(once.find("null") != std::string::npos);
  const std::string twice = dump_json(nlohmann::ordered_json::parse(once));
  CHECK(once == twice);
}

TEST_CASE("check command") {
  const fs::path dir = scratch("check");
  CHECK(run("check", config_in(kCp1, dir)) == kOk);
  const auto report = nlohmann::json::parse(slurp(dir / "check.json"));
  CHECK(report["pass"] == true);
  CHECK(report["points"].size() == 81);
  CHECK(report["summary"]["el"]["max"].get<double>() <= 1e-10);
  CHECK(dump_json(nlohmann::ordered_json::parse(slurp(dir / "check.json"))) == slurp(dir / "check.json"));

  const RunConfig bad = config_in(R"({"solution": {"components": ["1", "xiL*xiR"]},
      "domain": {"xiL": [-1, 1], "xiR": [-1, 1]}, "grid": [11, 11]})", dir);
  CHECK(run("check", bad) == kToleranceFailure);
  const auto fail = nlohmann::json::parse(slurp(dir / "check.json"));
  CHECK(fail["pass"] == false);
  CHECK(fail["summary"]["el"]["max"].get<double>() > 1e-2);
}

TEST_CASE("geometry CSV re-parses bit-exactly") {
  const fs::path dir = scratch("geometry");
  const RunConfig cfg = config_in(R"({"solution": {"builtin": "cp1_example"},
      "domain": {"xiL": [-1, 1], "xiR": [-1, 1]}, "grid": [7, 7]})", dir);
  CHECK(run("geometry", cfg) == kOk);
  const std::string text = slurp(dir / "geometry.csv");
  const auto lines = split(text, '\n');
  REQUIRE(lines.size() == 7 * 7 + 2);
  CHECK(lines[0] == "xiL,xiR,J_L,G_LR,J_R,detG,regular,K,H_norm\r");
  CHECK(lines.back().empty());
  int degenerate = 0;
  for (std::size_t k = 1; k + 1 < lines.size(); ++k) {
    REQUIRE(lines[k].back() == '\r');
    const auto cells = split(lines[k].substr(0, lines[k].size() - 1), ',');
    REQUIRE(cells.size() == 9);
    for (int c : {0, 1, 2, 3, 4, 5, 7, 8}) {
      if (cells[c].empty()) continue;
      CHECK(format_double(std::strtod(cells[c].c_str(), nullptr)) == cells[c]);
    }
    if (cells[6] == "true") {
      CHECK(std::abs(std::strtod(cells[7].c_str(), nullptr) + 4.0) <= 1e-6);
    } else {
      CHECK(cells[6] == "false");
      CHECK(cells[7].empty());
      CHECK(cells[8].empty());
      ++degenerate;
    }
  }
  CHECK(degenerate == 7);

  const RunConfig mover = config_in(R"({"solution": {"builtin": "left_mover"},
      "domain": {"xiL": [0, 1], "xiR": [0, 1]}, "grid": [4, 4]})", dir);
  CHECK(run("geometry", mover) == kOk);
  const std::string mtext = slurp(dir / "geometry.csv");
  CHECK(mtext.find(",true,") == std::string::npos);
}

TEST_CASE("immerse writes the mesh, deterministically") {
  const fs::path a = scratch("immerse_a"), b = scratch("immerse_b");
  CHECK(run("immerse", config_in(kCp1, a)) == kOk);
  CHECK(run("immerse", config_in(kCp1, b)) == kOk);
  for (const char* name : {"surface.json", "surface.obj"}) CHECK(slurp(a / name) == slurp(b / name));

  const auto mesh = nlohmann::json::parse(slurp(a / "surface.json"));
  CHECK(mesh["vertices"].size() == 81);
  CHECK(mesh["faces"].size() == 64);
  CHECK(mesh["vertices"][0][0].get<double>() == 0.0);
  const std::string obj = slurp(a / "surface.obj");
  CHECK(std::count(obj.begin(), obj.end(), 'v') >= 81);
  CHECK(obj.find("f 1 10 11 2\n") != std::string::npos);

  const fs::path c = scratch("check_twice_a"), d = scratch("check_twice_b");
  CHECK(run("geometry", config_in(kCp1, c)) == kOk);
  CHECK(run("geometry", config_in(kCp1, d)) == kOk);
  CHECK(slurp(c / "geometry.csv") == slurp(d / "geometry.csv"));
}

TEST_CASE("moving the base point translates every vertex") {
  const fs::path a = scratch("base_a"), b = scratch("base_b");
  RunConfig ca = config_in(kCp1, a), cb = config_in(kCp1, b);
  cb.base = {0.7, -0.45};
  CHECK(run("immerse", ca) == kOk);
  CHECK(run("immerse", cb) == kOk);
  const auto va = nlohmann::json::parse(slurp(a / "surface.json"))["vertices"];
  const auto vb = nlohmann::json::parse(slurp(b / "surface.json"))["vertices"];
  std::vector<double> shift(3);
  for (int k = 0; k < 3; ++k) shift[k] = va[0][k].get<double>() - vb[0][k].get<double>();
  double worst = 0.0;
  for (std::size_t v = 0; v < va.size(); ++v) {
    for (int k = 0; k < 3; ++k) {
      worst = std::max(worst, std::abs(va[v][k].get<double>() - vb[v][k].get<double>() - shift[k]));
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("constant field is rejected as a degenerate mesh") {
  const fs::path dir = scratch("constant");
  const RunConfig cfg = config_in(R"({"solution": {"builtin": "constant"},
      "domain": {"xiL": [0, 1], "xiR": [0, 1]}, "grid": [4, 4]})", dir);
  std::ostringstream log, err;
  CHECK(run_command("immerse", cfg, log, err) == kDomainError);
  CHECK(err.str().find("SingularPathPoint") != std::string::npos);
}

TEST_CASE("higher N writes a labelled projection") {
  const fs::path dir = scratch("torus");
  const RunConfig cfg = config_in(R"({"solution": {"builtin": "torus"}, "domain": {"xiL": [0, 0.4], "xiR": [0, 0.4]},
      "grid": [5, 5], "projection": ["A12", "B12", "C1"]})", dir);
  CHECK(run("immerse", cfg) == kOk);
  CHECK(fs::exists(dir / "surface_projection_A12_B12_C1.obj"));
  CHECK_FALSE(fs::exists(dir / "surface.obj"));
  const auto mesh = nlohmann::json::parse(slurp(dir / "surface.json"));
  CHECK(mesh["obj"]["projection"] == true);
  CHECK(mesh["vertices"][3].size() == 8);
}

TEST_CASE("frame command") {
  const fs::path dir = scratch("frame");
  RunConfig cfg = config_in(kCp1, dir);
  CHECK(run("frame", cfg) == kOk);
  const auto report = nlohmann::json::parse(slurp(dir / "frame.json"));
  CHECK(report["normalization"]["max_abs"].get<double>() <= 1e-9);
  CHECK(report["pass"] == true);
  CHECK(report["normals"].size() == 1);

  cfg.point = Point{0.5, 0.5};
  CHECK(run("frame", cfg) == kDomainError);
  cfg.point.reset();
  CHECK(run("frame", cfg) == kConfigError);
}

TEST_CASE("willmore command") {
  const fs::path dir = scratch("willmore");
  RunConfig cfg = config_in(R"({"solution": {"builtin": "cp1_example"}, "domain": {"xiL": [0, 1], "xiR": [-1, -0.2]},
      "grid": [33, 33]})", dir);
  CHECK(run("willmore", cfg) == kOk);
  const auto report = nlohmann::json::parse(slurp(dir / "willmore.json"));
  CHECK(report["refinements"].size() == 3);
  CHECK(report["converged"] == true);
  CHECK(report["value"].get<double>() == doctest::Approx(0.0409125).epsilon(1e-5));

  cfg.grid.n_l = 32;
  CHECK(run("willmore", cfg) == kConfigError);
}
