#include "cpsurf/solution.hpp"

#include <cmath>

namespace cpsurf {

namespace {

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
  return text;
}

// The symmetry-reduced CP^1 solution with chi = xiL - xiR, p < -1.
std::vector<std::string> cp1_example_components() {
  const std::string g = "((p+1)*(xiL-xiR)/(2*(p-1)))";
  const std::string h = replace_all(
      "(arctan((p+1)/(2*sqrt(-p))*tanh(G)) + (p+2*sqrt(-p)-1)*(xiL-xiR)/(2*(p-1)))", "G", g);
  std::string second = "sqrt(((p-1)*cosh(G)+(p+1))/((p-1)*cosh(G)-(p+1)))*exp(i*(xiL-H))";
  second = replace_all(second, "G", g);
  second = replace_all(second, "H", h);
  return {"1", second};
}

void require_independent_of(const SolutionSpec& spec, Dir dir, const std::string& id) {
  for (const auto& c : spec.components) {
    if (depends_on(*c, dir)) {
      throw Error(ErrorKind::InvalidSpec,
                  id + " components must not depend on " + (dir == Dir::L ? "xiL" : "xiR"));
    }
  }
}

}  // namespace

Eigen::VectorXcd FieldJet::partial(int a, int b) const {
  Eigen::VectorXcd v(n());
  for (int k = 0; k < n(); ++k) v[k] = components[k].partial(a, b);
  return v;
}

MatJet FieldJet::column() const {
  MatJet out;
  for (int t = 0; t < kJetTerms; ++t) {
    out.c[t].resize(n(), 1);
    for (int k = 0; k < n(); ++k) out.c[t](k, 0) = components[k].c[t];
  }
  out.order = kJetOrder;
  for (const auto& c : components) out.order = std::min(out.order, c.order);
  return out;
}

void validate(const SolutionSpec& spec) {
  if (spec.n < 2) throw Error(ErrorKind::InvalidSpec, "N must be at least 2");
  if (static_cast<int>(spec.components.size()) != spec.n) {
    throw Error(ErrorKind::InvalidSpec, "component count differs from N");
  }
  for (const auto& c : spec.components) {
    if (!c) throw Error(ErrorKind::InvalidSpec, "null component");
  }
}

SolutionSpec make_expression_spec(const std::vector<std::string>& components, Bindings parameters) {
  std::set<std::string> names;
  for (const auto& [name, v] : parameters) names.insert(name);
  ParseOptions opts;
  opts.parameters = &names;
  SolutionSpec spec;
  spec.n = static_cast<int>(components.size());
  for (const auto& src : components) spec.components.push_back(parse_expr(src, opts));
  spec.parameters = std::move(parameters);
  validate(spec);
  return spec;
}

std::vector<std::string> builtin_catalog() {
  return {"cp1_example", "constant", "left_mover", "right_mover", "s2_kink", "torus"};
}

SolutionSpec make_builtin(const std::string& id, Bindings parameters,
                          const std::vector<std::string>& components) {
  auto pick = [&](std::vector<std::string> defaults) {
    return components.empty() ? defaults : components;
  };
  SolutionSpec spec;
  if (id == "cp1_example") {
    if (!parameters.count("p")) parameters["p"] = -1.5;
    if (!(parameters.at("p") < -1.0)) throw Error(ErrorKind::InvalidSpec, "cp1_example requires p < -1");
    spec = make_expression_spec(cp1_example_components(), parameters);
  } else if (id == "constant") {
    spec = make_expression_spec(pick({"1", "2"}), parameters);
    require_independent_of(spec, Dir::L, id);
    require_independent_of(spec, Dir::R, id);
  } else if (id == "left_mover") {
    spec = make_expression_spec(pick({"1", "exp(i*xiL)"}), parameters);
    require_independent_of(spec, Dir::R, id);
  } else if (id == "right_mover") {
    spec = make_expression_spec(pick({"1", "exp(i*xiR)"}), parameters);
    require_independent_of(spec, Dir::L, id);
  } else if (id == "s2_kink") {
    // Real wave map into S^2 read as a CP^2 field: (tanh chi cos w, tanh chi sin w, sech chi).
    spec = make_expression_spec(
        {"tanh(xiL-xiR)*cos(xiL+xiR)", "tanh(xiL-xiR)*sin(xiL+xiR)", "1/cosh(xiL-xiR)"}, parameters);
  } else if (id == "torus") {
    // Constant moduli (sqrt5, 4, 3) with phases linear in xiL, xiR.
    spec = make_expression_spec(
        {"sqrt(5)*exp(i*(xiL+xiR))", "4*exp(i*(-2*xiL-0.5*xiR))", "3*exp(i*(3*xiL+xiR/3))"}, parameters);
  } else {
    throw Error(ErrorKind::InvalidSpec, "unknown builtin '" + id + "'");
  }
  spec.builtin = id;
  return spec;
}

FieldJet eval_field(const SolutionSpec& spec, const Point& at) {
  FieldJet out;
  out.point = at;
  out.components.reserve(spec.components.size());
  double norm2 = 0.0;
  for (const auto& c : spec.components) {
    out.components.push_back(eval_jet(*c, at, spec.parameters));
    norm2 += std::norm(out.components.back().value());
  }
  for (const auto& j : out.components) {
    for (const auto& v : j.c) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw Error(ErrorKind::EvaluationDomainError, "non-finite field jet");
      }
    }
  }
  if (std::sqrt(norm2) < kJetEpsilon) throw Error(ErrorKind::EvaluationDomainError, "|f| = 0");
  return out;
}

Eigen::VectorXcd eval_field_value(const SolutionSpec& spec, const Point& at) {
  Eigen::VectorXcd v(spec.n);
  for (int k = 0; k < spec.n; ++k) v[k] = eval_value(*spec.components[k], at, spec.parameters);
  return v;
}

SolutionSpec swap_light_cone(const SolutionSpec& spec) {
  SolutionSpec out = spec;
  const ExprPtr l = make_var(Dir::L), r = make_var(Dir::R);
  for (auto& c : out.components) c = substitute(c, r, l);
  out.builtin.clear();
  return out;
}

SolutionSpec reparametrize(const SolutionSpec& spec, const ExprPtr& alpha, const ExprPtr& beta) {
  if ((alpha && depends_on(*alpha, Dir::R)) || (beta && depends_on(*beta, Dir::L))) {
    throw Error(ErrorKind::InvalidSpec, "conformal maps must be xi_L -> alpha(xi_L), xi_R -> beta(xi_R)");
  }
  SolutionSpec out = spec;
  for (auto& c : out.components) c = substitute(c, alpha, beta);
  out.builtin.clear();
  return out;
}

}  // namespace cpsurf
