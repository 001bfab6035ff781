#ifndef PACKBED_JET_HPP
#define PACKBED_JET_HPP

// Truncated bivariate Taylor polynomials for exact derivatives of
// manufactured solutions. Coefficient (i, j) multiplies dx^i dy^j, so the
// mixed partial d^(i+j) f / dx^i dy^j equals i! j! coeff(i, j).

#include <array>
#include <cmath>

namespace packbed {

template <int N>
class Jet {
  static_assert(N >= 0);

 public:
  static constexpr int kOrder = N;
  static constexpr int kSize = (N + 1) * (N + 2) / 2;

  Jet() = default;
  Jet(double v) { c_[0] = v; }  // NOLINT: implicit promotion of constants

  static Jet variable(double v, int axis) {
    Jet j(v);
    if constexpr (N >= 1) j.c_[index(axis == 0 ? 1 : 0, axis == 0 ? 0 : 1)] = 1.0;
    return j;
  }

  static constexpr int index(int i, int k) {
    const int d = i + k;
    return d * (d + 1) / 2 + k;
  }

  double value() const { return c_[0]; }
  double coeff(int i, int k) const { return (i + k <= N) ? c_[index(i, k)] : 0.0; }
  double& coeff(int i, int k) { return c_[index(i, k)]; }

  /// d^(i+k) f / dx^i dy^k at the expansion point.
  double partial(int i, int k) const { return coeff(i, k) * factorial(i) * factorial(k); }

  /// Exact partial derivative, one order lower.
  Jet<(N > 0 ? N - 1 : 0)> d(int axis) const {
    Jet<(N > 0 ? N - 1 : 0)> out;
    if constexpr (N > 0) {
      for (int deg = 0; deg < N; ++deg) {
        for (int k = 0; k <= deg; ++k) {
          const int i = deg - k;
          out.coeff(i, k) = axis == 0 ? (i + 1) * coeff(i + 1, k) : (k + 1) * coeff(i, k + 1);
        }
      }
    }
    return out;
  }

  template <int M>
  Jet<M> truncate() const {
    static_assert(M <= N);
    Jet<M> out;
    for (int deg = 0; deg <= M; ++deg)
      for (int k = 0; k <= deg; ++k) out.coeff(deg - k, k) = coeff(deg - k, k);
    return out;
  }

  Jet& operator+=(const Jet& o) {
    for (int i = 0; i < kSize; ++i) c_[i] += o.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    for (int i = 0; i < kSize; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet out;
    for (int da = 0; da <= N; ++da) {
      for (int ka = 0; ka <= da; ++ka) {
        const double ca = a.c_[index(da - ka, ka)];
        if (ca == 0.0) continue;
        for (int db = 0; db + da <= N; ++db) {
          for (int kb = 0; kb <= db; ++kb) {
            out.c_[index(da - ka + db - kb, ka + kb)] += ca * b.c_[index(db - kb, kb)];
          }
        }
      }
    }
    return out;
  }

  friend Jet operator/(const Jet& a, const Jet& b) { return a * pow(b, -1.0); }
  friend Jet operator/(double s, const Jet& b) { return s * pow(b, -1.0); }

  /// f(a) from the scalar derivatives f^(k)(a0), k = 0..N.
  static Jet compose(const Jet& a, const std::array<double, N + 1>& derivs) {
    Jet delta = a;
    delta.c_[0] = 0.0;
    Jet out(derivs[0]);
    Jet power(1.0);
    double fact = 1.0;
    for (int k = 1; k <= N; ++k) {
      power = power * delta;
      fact *= k;
      out += power * (derivs[static_cast<std::size_t>(k)] / fact);
    }
    return out;
  }

  friend Jet exp(const Jet& a) {
    std::array<double, N + 1> dv;
    dv.fill(std::exp(a.value()));
    return compose(a, dv);
  }
  friend Jet sin(const Jet& a) {
    std::array<double, N + 1> dv;
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const double cycle[4] = {s, c, -s, -c};
    for (int k = 0; k <= N; ++k) dv[static_cast<std::size_t>(k)] = cycle[k % 4];
    return compose(a, dv);
  }
  friend Jet cos(const Jet& a) {
    std::array<double, N + 1> dv;
    const double s = std::sin(a.value()), c = std::cos(a.value());
    const double cycle[4] = {c, -s, -c, s};
    for (int k = 0; k <= N; ++k) dv[static_cast<std::size_t>(k)] = cycle[k % 4];
    return compose(a, dv);
  }
  /// a^r for real r; requires a.value() > 0 unless r is a non-negative integer.
  friend Jet pow(const Jet& a, double r) {
    std::array<double, N + 1> dv;
    double factor = 1.0;
    for (int k = 0; k <= N; ++k) {
      dv[static_cast<std::size_t>(k)] = factor == 0.0 ? 0.0 : factor * std::pow(a.value(), r - k);
      factor *= (r - k);
    }
    return compose(a, dv);
  }
  friend Jet sqrt(const Jet& a) { return pow(a, 0.5); }

 private:
  static constexpr double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  }

  std::array<double, kSize> c_{};
};

}  // namespace packbed

#endif  // PACKBED_JET_HPP
