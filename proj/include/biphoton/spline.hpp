#pragma once

#include <vector>

namespace biphoton {

// Cubic interpolating spline with not-a-knot end conditions, plus exact
// piecewise-polynomial antiderivatives. Not-a-knot (rather than natural)
// matters here: it reproduces polynomials up to cubic exactly, so models
// built from quadratic beta2(omega) test tables carry no boundary artifacts
// into the double integral.
class CubicSpline {
 public:
  // x strictly increasing, at least 4 points
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double eval(double x) const;       // S(x)
  double integral(double x) const;   // int_{x0}^{x} S
  double integral2(double x) const;  // int_{x0}^{x} int_{x0}^{t} S

  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }
  bool in_range(double x) const { return x >= x_.front() && x <= x_.back(); }

 private:
  std::size_t piece(double x) const;

  std::vector<double> x_, y_;
  std::vector<double> m_;        // second derivatives at knots
  std::vector<double> b_, c3_;   // per-piece linear and cubic coefficients
  std::vector<double> i1_, i2_;  // cumulative single/double integrals at knots
};

}  // namespace biphoton
