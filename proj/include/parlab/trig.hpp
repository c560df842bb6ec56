#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace parlab {

/// Point on the slow torus (or in the fast cell). Only the first `dim`
/// entries are meaningful; unused entries must be zero.
using Pt = std::array<double, 2>;

/// One mode of a trigonometric polynomial: amp * trig(2*pi*(kt*t + kx.x + ky.y)).
struct TrigTerm {
  double amplitude = 0.0;
  int freq_t = 0;
  std::array<int, 2> freq_x{0, 0};
  std::array<int, 2> freq_y{0, 0};
  bool use_sin = true;
};

/// Finite trigonometric polynomial in (t, x, y) with integer frequencies,
/// hence 1-periodic in every space coordinate. Evaluation is exact up to
/// floating-point rounding; there is no sampling or interpolation error.
struct TrigPolynomial {
  double offset = 0.0;
  std::vector<TrigTerm> terms;

  double eval(double t, const Pt& x, const Pt& y) const {
    double v = offset;
    for (const TrigTerm& tm : terms) {
      const double arg =
          2.0 * M_PI *
          (tm.freq_t * t + tm.freq_x[0] * x[0] + tm.freq_x[1] * x[1] +
           tm.freq_y[0] * y[0] + tm.freq_y[1] * y[1]);
      v += tm.amplitude * (tm.use_sin ? std::sin(arg) : std::cos(arg));
    }
    return v;
  }

  bool depends_on_fast() const {
    for (const TrigTerm& tm : terms)
      if (tm.freq_y[0] != 0 || tm.freq_y[1] != 0) return true;
    return false;
  }

  bool depends_on_slow() const {
    for (const TrigTerm& tm : terms)
      if (tm.freq_t != 0 || tm.freq_x[0] != 0 || tm.freq_x[1] != 0) return true;
    return false;
  }

  /// Rigorous bound sup |poly| <= |offset| + sum |amp|.
  double sup_bound() const {
    double b = std::abs(offset);
    for (const TrigTerm& tm : terms) b += std::abs(tm.amplitude);
    return b;
  }

  /// Rigorous lower bound inf poly >= offset - sum |amp|.
  double inf_bound() const {
    double b = offset;
    for (const TrigTerm& tm : terms) b -= std::abs(tm.amplitude);
    return b;
  }
};

/// A scalar coefficient. `take_sqrt` evaluates sqrt(poly) so that diffusion
/// square roots like a(y) = sqrt(2 + sin(2*pi*y)) stay exactly evaluable;
/// the underlying polynomial must then be nonnegative. `scale` is an exact
/// multiplicative factor used by the perturbation sweeps.
struct CoefficientField {
  TrigPolynomial poly;
  bool take_sqrt = false;
  double scale = 1.0;

  double eval(double t, const Pt& x, const Pt& y) const {
    double v = poly.eval(t, x, y);
    if (take_sqrt) {
      if (v < 0.0)
        throw std::domain_error("sqrt coefficient: negative polynomial value");
      v = std::sqrt(v);
    }
    return scale * v;
  }

  bool depends_on_fast() const { return poly.depends_on_fast(); }

  double sup_bound() const {
    double b = poly.sup_bound();
    if (take_sqrt) b = std::sqrt(std::max(0.0, b));
    return std::abs(scale) * b;
  }

  static CoefficientField constant(double c) {
    CoefficientField f;
    f.poly.offset = c;
    return f;
  }

  static CoefficientField zero() { return constant(0.0); }
};

}  // namespace parlab
