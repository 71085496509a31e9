#include "cpsurf/jet.hpp"

#include <cmath>

namespace cpsurf {

namespace {

bool is_constant(const Jet2& x) {
  for (int k = 1; k < kJetTerms; ++k) {
    if (jet_degree(k) <= x.order && x.c[k] != cplx(0.0)) return false;
  }
  return true;
}

// phi(u0 + d) = sum_k taylor[k] d^k with d the non-constant part of x.
Jet2 compose(const Jet2& x, const std::array<cplx, 4>& taylor) {
  Jet2 d = x;
  d.c[0] = 0.0;
  const Jet2 d2 = d * d;
  const Jet2 d3 = d2 * d;
  Jet2 out;
  for (int k = 0; k < kJetTerms; ++k) {
    out.c[k] = taylor[1] * d.c[k] + taylor[2] * d2.c[k] + taylor[3] * d3.c[k];
  }
  out.c[0] = taylor[0];
  out.order = x.order;
  return out;
}

}  // namespace

const char* to_string(ElementaryFn fn) {
  switch (fn) {
    case ElementaryFn::Exp: return "exp";
    case ElementaryFn::Log: return "log";
    case ElementaryFn::Sqrt: return "sqrt";
    case ElementaryFn::Sin: return "sin";
    case ElementaryFn::Cos: return "cos";
    case ElementaryFn::Tan: return "tan";
    case ElementaryFn::Sinh: return "sinh";
    case ElementaryFn::Cosh: return "cosh";
    case ElementaryFn::Tanh: return "tanh";
    case ElementaryFn::Arctan: return "arctan";
  }
  return "?";
}

Jet2 jet_variable(Dir dir, double at) {
  Jet2 out = Jet2::constant(at);
  out.c[dir == Dir::L ? jet_index(1, 0) : jet_index(0, 1)] = 1.0;
  return out;
}

Jet2 jet_add(const Jet2& x, const Jet2& y) { return x + y; }

Jet2 jet_mul(const Jet2& x, const Jet2& y) { return x * y; }

Jet2 jet_reciprocal(const Jet2& y) {
  const cplx y0 = y.value();
  if (std::abs(y0) < kJetEpsilon) {
    throw Error(ErrorKind::DivisionByZeroValue, "jet divisor has (near) zero value");
  }
  const cplx r = 1.0 / y0;
  return compose(y, {r, -r * r, r * r * r, -r * r * r * r});
}

Jet2 jet_div(const Jet2& x, const Jet2& y) { return x * jet_reciprocal(y); }

Jet2 jet_conj(const Jet2& x) {
  return x.map([](const cplx& v) { return std::conj(v); });
}

Jet2 jet_real(const Jet2& x) {
  return x.map([](const cplx& v) { return cplx(v.real(), 0.0); });
}

Jet2 jet_pow(const Jet2& base, const Jet2& exponent) {
  const cplx e = exponent.value();
  if (is_constant(exponent) && e.imag() == 0.0 && std::nearbyint(e.real()) == e.real() &&
      std::abs(e.real()) <= 64.0) {
    int n = static_cast<int>(e.real());
    Jet2 acc = Jet2::constant(1.0);
    acc.order = base.order;
    Jet2 sq = n < 0 ? jet_reciprocal(base) : base;
    for (n = std::abs(n); n > 0; n >>= 1) {
      if (n & 1) acc = acc * sq;
      if (n > 1) sq = sq * sq;
    }
    return acc;
  }
  return jet_apply(ElementaryFn::Exp, exponent * jet_apply(ElementaryFn::Log, base));
}

cplx apply_value(ElementaryFn fn, cplx x) {
  switch (fn) {
    case ElementaryFn::Exp: return std::exp(x);
    case ElementaryFn::Log: return std::log(x);
    case ElementaryFn::Sqrt: return std::sqrt(x);
    case ElementaryFn::Sin: return std::sin(x);
    case ElementaryFn::Cos: return std::cos(x);
    case ElementaryFn::Tan: return std::tan(x);
    case ElementaryFn::Sinh: return std::sinh(x);
    case ElementaryFn::Cosh: return std::cosh(x);
    case ElementaryFn::Tanh: return std::tanh(x);
    case ElementaryFn::Arctan: return std::atan(x);
  }
  return x;
}

Jet2 jet_apply(ElementaryFn fn, const Jet2& x) {
  const cplx u = x.value();
  auto domain = [&](const char* why) {
    return Error(ErrorKind::DomainError, std::string(to_string(fn)) + ": " + why);
  };
  switch (fn) {
    case ElementaryFn::Exp: {
      const cplx e = std::exp(u);
      return compose(x, {e, e, e / 2.0, e / 6.0});
    }
    case ElementaryFn::Log: {
      if (std::abs(u) < kJetEpsilon) throw domain("log of zero");
      const cplx r = 1.0 / u;
      return compose(x, {std::log(u), r, -r * r / 2.0, r * r * r / 3.0});
    }
    case ElementaryFn::Sqrt: {
      if (std::abs(u) < kJetEpsilon) {
        if (is_constant(x)) return Jet2::constant(0.0);
        throw domain("sqrt at zero with nonzero derivative demand");
      }
      const cplx s = std::sqrt(u);
      return compose(x, {s, 0.5 / s, -1.0 / (8.0 * s * s * s), 1.0 / (16.0 * s * s * s * s * s)});
    }
    case ElementaryFn::Sin: {
      const cplx s = std::sin(u), c = std::cos(u);
      return compose(x, {s, c, -s / 2.0, -c / 6.0});
    }
    case ElementaryFn::Cos: {
      const cplx s = std::sin(u), c = std::cos(u);
      return compose(x, {c, -s, -c / 2.0, s / 6.0});
    }
    case ElementaryFn::Tan: {
      if (std::abs(std::cos(u)) < kJetEpsilon) throw domain("pole of tan");
      const cplx t = std::tan(u);
      const cplx sec2 = 1.0 + t * t;
      return compose(x, {t, sec2, t * sec2, sec2 * (1.0 + 3.0 * t * t) / 3.0});
    }
    case ElementaryFn::Sinh: {
      const cplx s = std::sinh(u), c = std::cosh(u);
      return compose(x, {s, c, s / 2.0, c / 6.0});
    }
    case ElementaryFn::Cosh: {
      const cplx s = std::sinh(u), c = std::cosh(u);
      return compose(x, {c, s, c / 2.0, s / 6.0});
    }
    case ElementaryFn::Tanh: {
      if (std::abs(std::cosh(u)) < kJetEpsilon) throw domain("pole of tanh");
      const cplx t = std::tanh(u);
      const cplx sech2 = 1.0 - t * t;
      return compose(x, {t, sech2, -t * sech2, -sech2 * (1.0 - 3.0 * t * t) / 3.0});
    }
    case ElementaryFn::Arctan: {
      const cplx q = 1.0 + u * u;
      if (std::abs(q) < kJetEpsilon) throw domain("branch point of arctan");
      const cplx r = 1.0 / q;
      return compose(x, {std::atan(u), r, -u * r * r, (3.0 * u * u - 1.0) * r * r * r / 3.0});
    }
  }
  throw domain("unknown function");
}

MatJet adjoint(const MatJet& m) {
  return m.map([](const Eigen::MatrixXcd& a) { return Eigen::MatrixXcd(a.adjoint()); });
}

MatJet commutator(const MatJet& a, const MatJet& b) { return a * b - b * a; }

Jet2 trace(const MatJet& m) {
  return m.map([](const Eigen::MatrixXcd& a) { return a.trace(); });
}

Jet2 su_inner(const MatJet& a, const MatJet& b) {
  return convolve(a, b, [](const Eigen::MatrixXcd& x, const Eigen::MatrixXcd& y) {
    // tr(XY) without forming the product.
    return cplx(-0.5 * (x.transpose().cwiseProduct(y)).sum().real(), 0.0);
  });
}

MatJet identity_jet(int n) { return MatJet::constant(Eigen::MatrixXcd::Identity(n, n)); }

}  // namespace cpsurf
