#include "cpsurf/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>

namespace cpsurf {

ExprPtr make_constant(cplx v) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Constant;
  e->value = v;
  return e;
}

ExprPtr make_var(Dir dir) {
  auto e = std::make_shared<Expr>();
  e->kind = dir == Dir::L ? NodeKind::VarL : NodeKind::VarR;
  return e;
}

ExprPtr make_param(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Param;
  e->name = std::move(name);
  return e;
}

ExprPtr make_imag_unit() {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::ImagUnit;
  return e;
}

ExprPtr make_negate(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Negate;
  e->lhs = std::move(x);
  return e;
}

ExprPtr make_function(ElementaryFn fn, ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Function;
  e->fn = fn;
  e->lhs = std::move(x);
  return e;
}

ExprPtr make_conj(ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Conj;
  e->lhs = std::move(x);
  return e;
}

ExprPtr make_binary(BinaryOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = NodeKind::Binary;
  e->op = op;
  e->lhs = std::move(a);
  e->rhs = std::move(b);
  return e;
}

namespace {

const std::map<std::string, ElementaryFn, std::less<>> kFunctions = {
    {"exp", ElementaryFn::Exp},   {"log", ElementaryFn::Log},   {"sqrt", ElementaryFn::Sqrt},
    {"sin", ElementaryFn::Sin},   {"cos", ElementaryFn::Cos},   {"tan", ElementaryFn::Tan},
    {"sinh", ElementaryFn::Sinh}, {"cosh", ElementaryFn::Cosh}, {"tanh", ElementaryFn::Tanh},
    {"arctan", ElementaryFn::Arctan},
};

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  Tok kind = Tok::End;
  std::size_t pos = 0;  // 0-based
  std::string_view text;
  double number = 0.0;
};

class Parser {
 public:
  Parser(std::string_view src, const ParseOptions& opts) : src_(src), opts_(opts) {
    for (std::size_t k = 0; k < src_.size(); ++k) {
      if (static_cast<unsigned char>(src_[k]) >= 0x80) {
        throw ParseError(k + 1, {}, "non-ASCII byte");
      }
    }
    advance();
  }

  ExprPtr parse() {
    if (tok_.kind == Tok::End) throw ParseError(tok_.pos + 1, {"expression"}, "empty expression");
    ExprPtr e = expr();
    if (tok_.kind != Tok::End) {
      throw ParseError(tok_.pos + 1, {"end of input", "+", "-", "*", "/", "^"}, "trailing input");
    }
    return e;
  }

 private:
  void advance() {
    std::size_t p = pos_;
    while (p < src_.size() && std::isspace(static_cast<unsigned char>(src_[p]))) ++p;
    tok_ = Token{};
    tok_.pos = p;
    if (p >= src_.size()) {
      tok_.kind = Tok::End;
      pos_ = p;
      return;
    }
    const char ch = src_[p];
    auto single = [&](Tok k) {
      tok_.kind = k;
      tok_.text = src_.substr(p, 1);
      pos_ = p + 1;
    };
    switch (ch) {
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t q = p;
      bool digits = false;
      while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q, digits = true;
      if (q < src_.size() && src_[q] == '.') {
        ++q;
        while (q < src_.size() && std::isdigit(static_cast<unsigned char>(src_[q]))) ++q, digits = true;
      }
      if (!digits) throw ParseError(p + 1, {"number"}, "malformed number");
      if (q < src_.size() && (src_[q] == 'e' || src_[q] == 'E')) {
        std::size_t r = q + 1;
        if (r < src_.size() && (src_[r] == '+' || src_[r] == '-')) ++r;
        if (r >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[r]))) {
          throw ParseError(r + 1, {"exponent digits"}, "malformed number");
        }
        while (r < src_.size() && std::isdigit(static_cast<unsigned char>(src_[r]))) ++r;
        q = r;
      }
      tok_.kind = Tok::Number;
      tok_.text = src_.substr(p, q - p);
      tok_.number = std::strtod(std::string(tok_.text).c_str(), nullptr);
      pos_ = q;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t q = p;
      while (q < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[q])) || src_[q] == '_')) ++q;
      tok_.kind = Tok::Ident;
      tok_.text = src_.substr(p, q - p);
      pos_ = q;
      return;
    }
    throw ParseError(p + 1, {}, std::string("unexpected character '") + ch + "'");
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) throw ParseError(tok_.pos + 1, {what}, "unexpected token");
    advance();
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (tok_.kind == Tok::Plus || tok_.kind == Tok::Minus) {
      const BinaryOp op = tok_.kind == Tok::Plus ? BinaryOp::Add : BinaryOp::Sub;
      advance();
      lhs = make_binary(op, lhs, term());
    }
    return lhs;
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (tok_.kind == Tok::Star || tok_.kind == Tok::Slash) {
      const BinaryOp op = tok_.kind == Tok::Star ? BinaryOp::Mul : BinaryOp::Div;
      advance();
      lhs = make_binary(op, lhs, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (tok_.kind == Tok::Minus) {
      advance();
      return make_negate(unary());
    }
    if (tok_.kind == Tok::Plus) {
      advance();
      return unary();
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (tok_.kind == Tok::Caret) {
      advance();
      return make_binary(BinaryOp::Pow, base, unary());
    }
    return base;
  }

  ExprPtr atom() {
    switch (tok_.kind) {
      case Tok::Number: {
        ExprPtr e = make_constant(tok_.number);
        advance();
        return e;
      }
      case Tok::LParen: {
        advance();
        ExprPtr e = expr();
        expect(Tok::RParen, ")");
        return e;
      }
      case Tok::Ident: return identifier();
      default:
        throw ParseError(tok_.pos + 1, {"number", "identifier", "("},
                         tok_.kind == Tok::End ? "unexpected end of input" : "unexpected token");
    }
  }

  ExprPtr identifier() {
    const Token id = tok_;
    advance();
    const std::string name(id.text);
    if (tok_.kind == Tok::LParen) {
      const auto fit = kFunctions.find(name);
      if (fit == kFunctions.end() && name != "conj") {
        std::vector<std::string> expected;
        for (const auto& [fname, fn] : kFunctions) expected.push_back(fname);
        expected.emplace_back("conj");
        throw ParseError(id.pos + 1, expected, "unknown function '" + name + "'");
      }
      advance();
      ExprPtr arg = expr();
      expect(Tok::RParen, ")");
      return name == "conj" ? make_conj(arg) : make_function(fit->second, arg);
    }
    if (name == "i") return make_imag_unit();
    if (name == "xiL") return make_var(Dir::L);
    if (name == "xiR") return make_var(Dir::R);
    if (kFunctions.count(name) || name == "conj") {
      throw ParseError(tok_.pos + 1, {"("}, "function '" + name + "' needs an argument");
    }
    if (opts_.parameters && !opts_.parameters->count(name)) {
      throw ParseError(id.pos + 1, {"xiL", "xiR", "i", "bound parameter"},
                       "unknown identifier '" + name + "'");
    }
    return make_param(name);
  }

  std::string_view src_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
  Token tok_;
};

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string format_constant(cplx v) {
  if (v.imag() == 0.0) {
    return v.real() < 0 || std::signbit(v.real()) ? "(" + format_real(v.real()) + ")" : format_real(v.real());
  }
  return "(" + format_real(v.real()) + "+" + format_real(v.imag()) + "*i)";
}

const char* op_symbol(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Pow: return "^";
  }
  return "?";
}

template <class V, class Ops>
V evaluate(const Expr& e, const Point& at, const Bindings& params, const Ops& ops) {
  switch (e.kind) {
    case NodeKind::Constant: return ops.constant(e.value);
    case NodeKind::VarL: return ops.variable(Dir::L, at.xi_l);
    case NodeKind::VarR: return ops.variable(Dir::R, at.xi_r);
    case NodeKind::ImagUnit: return ops.constant(cplx(0.0, 1.0));
    case NodeKind::Param: {
      const auto it = params.find(e.name);
      if (it == params.end()) {
        throw Error(ErrorKind::UnboundParameter, "parameter '" + e.name + "' is not bound");
      }
      return ops.constant(it->second);
    }
    case NodeKind::Negate: return ops.negate(evaluate<V>(*e.lhs, at, params, ops));
    case NodeKind::Conj: return ops.conj(evaluate<V>(*e.lhs, at, params, ops));
    case NodeKind::Function: return ops.apply(e.fn, evaluate<V>(*e.lhs, at, params, ops));
    case NodeKind::Binary: {
      const V a = evaluate<V>(*e.lhs, at, params, ops);
      const V b = evaluate<V>(*e.rhs, at, params, ops);
      switch (e.op) {
        case BinaryOp::Add: return a + b;
        case BinaryOp::Sub: return a - b;
        case BinaryOp::Mul: return a * b;
        case BinaryOp::Div: return ops.div(a, b);
        case BinaryOp::Pow: return ops.pow(a, b);
      }
    }
  }
  throw Error(ErrorKind::EvaluationDomainError, "malformed expression");
}

struct JetOps {
  Jet2 constant(cplx v) const { return Jet2::constant(v); }
  Jet2 variable(Dir d, double x) const { return jet_variable(d, x); }
  Jet2 negate(const Jet2& x) const { return -x; }
  Jet2 conj(const Jet2& x) const { return jet_conj(x); }
  Jet2 apply(ElementaryFn fn, const Jet2& x) const { return jet_apply(fn, x); }
  Jet2 div(const Jet2& a, const Jet2& b) const { return jet_div(a, b); }
  Jet2 pow(const Jet2& a, const Jet2& b) const { return jet_pow(a, b); }
};

struct ValueOps {
  cplx constant(cplx v) const { return v; }
  cplx variable(Dir, double x) const { return x; }
  cplx negate(cplx x) const { return -x; }
  cplx conj(cplx x) const { return std::conj(x); }
  cplx apply(ElementaryFn fn, cplx x) const { return apply_value(fn, x); }
  cplx div(cplx a, cplx b) const {
    if (b == cplx(0.0)) throw Error(ErrorKind::EvaluationDomainError, "division by zero");
    return a / b;
  }
  cplx pow(cplx a, cplx b) const {
    if (b.imag() == 0.0 && std::nearbyint(b.real()) == b.real() && std::abs(b.real()) <= 64.0) {
      int n = static_cast<int>(b.real());
      cplx acc = 1.0, sq = n < 0 ? 1.0 / a : a;
      for (n = std::abs(n); n > 0; n >>= 1) {
        if (n & 1) acc *= sq;
        sq *= sq;
      }
      return acc;
    }
    return std::exp(b * std::log(a));
  }
};

}  // namespace

ExprPtr parse_expr(std::string_view source, const ParseOptions& options) {
  Parser parser(source, options);
  return parser.parse();
}

std::string to_string(const Expr& e) {
  switch (e.kind) {
    case NodeKind::Constant: return format_constant(e.value);
    case NodeKind::VarL: return "xiL";
    case NodeKind::VarR: return "xiR";
    case NodeKind::Param: return e.name;
    case NodeKind::ImagUnit: return "i";
    case NodeKind::Negate: return "(-" + to_string(*e.lhs) + ")";
    case NodeKind::Conj: return "conj(" + to_string(*e.lhs) + ")";
    case NodeKind::Function: return std::string(to_string(e.fn)) + "(" + to_string(*e.lhs) + ")";
    case NodeKind::Binary:
      return "(" + to_string(*e.lhs) + op_symbol(e.op) + to_string(*e.rhs) + ")";
  }
  return "";
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case NodeKind::Constant: return a.value == b.value;
    case NodeKind::Param: return a.name == b.name;
    case NodeKind::Function:
      return a.fn == b.fn && structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::Negate:
    case NodeKind::Conj: return structurally_equal(*a.lhs, *b.lhs);
    case NodeKind::Binary:
      return a.op == b.op && structurally_equal(*a.lhs, *b.lhs) && structurally_equal(*a.rhs, *b.rhs);
    default: return true;
  }
}

bool depends_on(const Expr& e, Dir dir) {
  switch (e.kind) {
    case NodeKind::VarL: return dir == Dir::L;
    case NodeKind::VarR: return dir == Dir::R;
    case NodeKind::Negate:
    case NodeKind::Conj:
    case NodeKind::Function: return depends_on(*e.lhs, dir);
    case NodeKind::Binary: return depends_on(*e.lhs, dir) || depends_on(*e.rhs, dir);
    default: return false;
  }
}

void collect_params(const Expr& e, std::set<std::string>& out) {
  if (e.kind == NodeKind::Param) out.insert(e.name);
  if (e.lhs) collect_params(*e.lhs, out);
  if (e.rhs) collect_params(*e.rhs, out);
}

ExprPtr substitute(const ExprPtr& e, const ExprPtr& for_l, const ExprPtr& for_r) {
  switch (e->kind) {
    case NodeKind::VarL: return for_l ? for_l : e;
    case NodeKind::VarR: return for_r ? for_r : e;
    case NodeKind::Negate: return make_negate(substitute(e->lhs, for_l, for_r));
    case NodeKind::Conj: return make_conj(substitute(e->lhs, for_l, for_r));
    case NodeKind::Function: return make_function(e->fn, substitute(e->lhs, for_l, for_r));
    case NodeKind::Binary:
      return make_binary(e->op, substitute(e->lhs, for_l, for_r), substitute(e->rhs, for_l, for_r));
    default: return e;
  }
}

Jet2 eval_jet(const Expr& e, const Point& at, const Bindings& params) {
  try {
    return evaluate<Jet2>(e, at, params, JetOps{});
  } catch (const Error& err) {
    if (err.kind() == ErrorKind::DomainError || err.kind() == ErrorKind::DivisionByZeroValue) {
      throw Error(ErrorKind::EvaluationDomainError, err.what());
    }
    throw;
  }
}

cplx eval_value(const Expr& e, const Point& at, const Bindings& params) {
  return evaluate<cplx>(e, at, params, ValueOps{});
}

}  // namespace cpsurf
