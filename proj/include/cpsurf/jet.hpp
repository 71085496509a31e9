#pragma once

// Truncated Taylor jets in the two light-cone variables (xi_L, xi_R).
//
// A jet stores c_ab = (1 / (a! b!)) d_L^a d_R^b F at the expansion point for
// a + b <= 3, so products are plain truncated convolutions. The coefficient
// type is either a complex scalar (Jet2) or a complex Eigen matrix (MatJet);
// matrix jets carry P, the tangent form and the moving frame.
//
// Every jet built from a field has order 3. Taking a partial derivative lowers
// the order by one; binary operations return the smaller order of their
// operands. Coefficients above `order` hold no information.

#include <array>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "cpsurf/error.hpp"

namespace cpsurf {

using cplx = std::complex<double>;

enum class Dir { L, R };

inline constexpr int kJetOrder = 3;
inline constexpr int kJetTerms = 10;

/// Values below this magnitude count as zero for division, sqrt and log.
inline constexpr double kJetEpsilon = 1e-12;

constexpr int jet_index(int a, int b) {
  const int d = a + b;
  return d * (d + 1) / 2 + b;
}

constexpr int jet_degree(int idx) { return idx == 0 ? 0 : idx < 3 ? 1 : idx < 6 ? 2 : 3; }

constexpr std::pair<int, int> jet_exponents(int idx) {
  const int d = jet_degree(idx);
  const int b = idx - d * (d + 1) / 2;
  return {d - b, b};
}

namespace detail {

struct ConvTerm {
  int lhs, rhs, out;
};

constexpr int kConvTerms = 35;

constexpr std::array<ConvTerm, kConvTerms> make_conv_table() {
  std::array<ConvTerm, kConvTerms> table{};
  int n = 0;
  // Ordered by output index so the first hit of each output can assign.
  for (int out = 0; out < kJetTerms; ++out) {
    for (int i = 0; i < kJetTerms; ++i) {
      for (int j = 0; j < kJetTerms; ++j) {
        const auto [a1, b1] = jet_exponents(i);
        const auto [a2, b2] = jet_exponents(j);
        if (a1 + a2 + b1 + b2 <= kJetOrder && jet_index(a1 + a2, b1 + b2) == out) {
          table[n++] = {i, j, out};
        }
      }
    }
  }
  return table;
}

inline constexpr auto kConvTable = make_conv_table();

inline void set_zero(cplx& v) { v = 0.0; }
inline void set_zero(double& v) { v = 0.0; }
template <class Derived>
void set_zero(Eigen::PlainObjectBase<Derived>& m) {
  m.setZero();
}

constexpr double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace detail

template <class T>
class Taylor {
 public:
  std::array<T, kJetTerms> c{};
  int order = kJetOrder;

  Taylor() = default;

  /// Constant jet with every derivative coefficient a zero of the same shape.
  static Taylor constant(const T& value) {
    Taylor out;
    out.c.fill(value);
    for (int k = 1; k < kJetTerms; ++k) detail::set_zero(out.c[k]);
    out.c[0] = value;
    return out;
  }

  const T& value() const { return c[0]; }

  /// Taylor coefficient c_ab; requires a + b <= order.
  const T& coeff(int a, int b) const {
    if (a < 0 || b < 0 || a + b > order) {
      throw Error(ErrorKind::DomainError, "jet coefficient beyond truncation order");
    }
    return c[jet_index(a, b)];
  }
  T& coeff(int a, int b) {
    if (a < 0 || b < 0 || a + b > order) {
      throw Error(ErrorKind::DomainError, "jet coefficient beyond truncation order");
    }
    return c[jet_index(a, b)];
  }

  /// d_L^a d_R^b F at the expansion point.
  T partial(int a, int b) const {
    return coeff(a, b) * (detail::factorial(a) * detail::factorial(b));
  }

  template <class F>
  auto map(F&& fn) const -> Taylor<std::decay_t<decltype(fn(c[0]))>> {
    Taylor<std::decay_t<decltype(fn(c[0]))>> out;
    for (int k = 0; k < kJetTerms; ++k) out.c[k] = fn(c[k]);
    out.order = order;
    return out;
  }

  Taylor& operator+=(const Taylor& o) {
    for (int k = 0; k < kJetTerms; ++k) c[k] += o.c[k];
    order = std::min(order, o.order);
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (int k = 0; k < kJetTerms; ++k) c[k] -= o.c[k];
    order = std::min(order, o.order);
    return *this;
  }
  template <class S>
  Taylor& operator*=(const S& s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

using Jet2 = Taylor<cplx>;
using MatJet = Taylor<Eigen::MatrixXcd>;

/// Truncated Leibniz product with an arbitrary bilinear coefficient product.
template <class A, class B, class Op>
auto convolve(const Taylor<A>& x, const Taylor<B>& y, Op op)
    -> Taylor<std::decay_t<decltype(op(x.c[0], y.c[0]))>> {
  using Out = std::decay_t<decltype(op(x.c[0], y.c[0]))>;
  Taylor<Out> out;
  int last = -1;
  for (const auto& t : detail::kConvTable) {
    if (t.out != last) {
      out.c[t.out] = op(x.c[t.lhs], y.c[t.rhs]);
      last = t.out;
    } else {
      out.c[t.out] += op(x.c[t.lhs], y.c[t.rhs]);
    }
  }
  out.order = std::min(x.order, y.order);
  return out;
}

template <class T>
Taylor<T> operator+(Taylor<T> x, const Taylor<T>& y) {
  x += y;
  return x;
}
template <class T>
Taylor<T> operator-(Taylor<T> x, const Taylor<T>& y) {
  x -= y;
  return x;
}
template <class T>
Taylor<T> operator-(Taylor<T> x) {
  for (auto& v : x.c) v = -v;
  return x;
}

inline Jet2 operator*(const Jet2& x, const Jet2& y) {
  return convolve(x, y, [](const cplx& a, const cplx& b) { return a * b; });
}
inline MatJet operator*(const MatJet& x, const MatJet& y) {
  return convolve(x, y, [](const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return Eigen::MatrixXcd(a * b);
  });
}
inline MatJet operator*(const Jet2& s, const MatJet& m) {
  return convolve(s, m, [](const cplx& a, const Eigen::MatrixXcd& b) {
    return Eigen::MatrixXcd(a * b);
  });
}
inline MatJet operator*(const MatJet& m, const Jet2& s) { return s * m; }

inline Jet2 operator*(Jet2 x, cplx s) {
  x *= s;
  return x;
}
inline Jet2 operator*(cplx s, Jet2 x) {
  x *= s;
  return x;
}
inline MatJet operator*(MatJet x, cplx s) {
  x *= s;
  return x;
}
inline MatJet operator*(cplx s, MatJet x) {
  x *= s;
  return x;
}

/// Jet of the independent variable xi_D expanded at `at`.
Jet2 jet_variable(Dir dir, double at);

inline Jet2 jet_constant(cplx v) { return Jet2::constant(v); }

Jet2 jet_add(const Jet2& x, const Jet2& y);
Jet2 jet_mul(const Jet2& x, const Jet2& y);
/// Throws DivisionByZeroValue when |y(0)| < kJetEpsilon.
Jet2 jet_div(const Jet2& x, const Jet2& y);
Jet2 jet_reciprocal(const Jet2& y);
Jet2 jet_conj(const Jet2& x);
Jet2 jet_real(const Jet2& x);
Jet2 jet_pow(const Jet2& base, const Jet2& exponent);

enum class ElementaryFn { Exp, Log, Sqrt, Sin, Cos, Tan, Sinh, Cosh, Tanh, Arctan };

const char* to_string(ElementaryFn fn);

/// Composes an elementary function with a jet through third order.
/// Throws DomainError outside the function's domain.
Jet2 jet_apply(ElementaryFn fn, const Jet2& x);

/// Complex elementary function on a plain value (no jets).
cplx apply_value(ElementaryFn fn, cplx x);

/// d_D of a jet; the result has order one lower.
template <class T>
Taylor<T> derivative(const Taylor<T>& x, Dir dir) {
  if (x.order < 1) throw Error(ErrorKind::DomainError, "cannot differentiate an order-0 jet");
  Taylor<T> out;
  for (int k = 0; k < kJetTerms; ++k) {
    const auto [a, b] = jet_exponents(k);
    if (a + b + 1 > kJetOrder) {
      out.c[k] = x.c[0];
      detail::set_zero(out.c[k]);
      continue;
    }
    if (dir == Dir::L) {
      out.c[k] = x.c[jet_index(a + 1, b)] * static_cast<double>(a + 1);
    } else {
      out.c[k] = x.c[jet_index(a, b + 1)] * static_cast<double>(b + 1);
    }
  }
  out.order = x.order - 1;
  return out;
}

// Matrix-jet helpers.
MatJet adjoint(const MatJet& m);
MatJet commutator(const MatJet& a, const MatJet& b);
Jet2 trace(const MatJet& m);
/// su(N) scalar product -1/2 tr(AB), as a (real-valued) scalar jet.
Jet2 su_inner(const MatJet& a, const MatJet& b);
MatJet identity_jet(int n);

}  // namespace cpsurf
