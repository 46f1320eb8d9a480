#include "biphoton/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace biphoton {

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 4 || y_.size() != n)
    throw std::invalid_argument("spline needs >= 4 points and matching arrays");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(x_[i] < x_[i + 1]))
      throw std::invalid_argument("spline abscissae must be strictly increasing");
  }
  for (double v : y_) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite spline ordinate");
  }

  std::vector<double> h(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) h[i] = x_[i + 1] - x_[i];

  // Second derivatives M_j from the C2 continuity equations
  //   (h_{j-1}/6) M_{j-1} + ((h_{j-1}+h_j)/3) M_j + (h_j/6) M_{j+1} = d_j,
  //   d_j = (y_{j+1}-y_j)/h_j - (y_j-y_{j-1})/h_{j-1}.
  // Not-a-knot makes S''' continuous at x_1 and x_{n-2}:
  //   M_0 = (1 + h_0/h_1) M_1 - (h_0/h_1) M_2   (mirrored on the right),
  // which folds into the first and last interior rows, leaving a tridiagonal
  // system for M_1 .. M_{n-2}.
  const std::size_t m = n - 2;
  std::vector<double> lower(m, 0.0), diag(m, 0.0), upper(m, 0.0), rhs(m, 0.0);
  for (std::size_t j = 1; j <= m; ++j) {
    rhs[j - 1] = (y_[j + 1] - y_[j]) / h[j] - (y_[j] - y_[j - 1]) / h[j - 1];
  }
  for (std::size_t j = 2; j + 1 <= m; ++j) {  // untouched interior rows
    lower[j - 1] = h[j - 1] / 6.0;
    diag[j - 1] = (h[j - 1] + h[j]) / 3.0;
    upper[j - 1] = h[j] / 6.0;
  }
  {
    const double r = h[0] / h[1];
    diag[0] = (h[0] / 6.0) * (1.0 + r) + (h[0] + h[1]) / 3.0;
    upper[0] = h[1] / 6.0 - (h[0] / 6.0) * r;
  }
  {
    const double r = h[n - 2] / h[n - 3];
    diag[m - 1] = (h[n - 2] / 6.0) * (1.0 + r) + (h[n - 3] + h[n - 2]) / 3.0;
    lower[m - 1] = h[n - 3] / 6.0 - (h[n - 2] / 6.0) * r;
  }

  // Thomas algorithm
  for (std::size_t i = 1; i < m; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> sol(m);
  sol[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) {
    sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
  }

  m_.assign(n, 0.0);
  for (std::size_t j = 0; j < m; ++j) m_[j + 1] = sol[j];
  m_[0] = (1.0 + h[0] / h[1]) * m_[1] - (h[0] / h[1]) * m_[2];
  m_[n - 1] = (1.0 + h[n - 2] / h[n - 3]) * m_[n - 2] - (h[n - 2] / h[n - 3]) * m_[n - 3];

  // Piece form S = y_j + b_j t + (M_j/2) t^2 + c3_j t^3, t = x - x_j
  b_.assign(n - 1, 0.0);
  c3_.assign(n - 1, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    c3_[j] = (m_[j + 1] - m_[j]) / (6.0 * h[j]);
    b_[j] = (y_[j + 1] - y_[j]) / h[j] - h[j] * (2.0 * m_[j] + m_[j + 1]) / 6.0;
  }

  // Cumulative antiderivatives at the knots, analytic per piece
  i1_.assign(n, 0.0);
  i2_.assign(n, 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double t = h[j];
    const double p1 = y_[j] * t + b_[j] * t * t / 2.0 + m_[j] * t * t * t / 6.0 +
                      c3_[j] * t * t * t * t / 4.0;
    const double p2 = y_[j] * t * t / 2.0 + b_[j] * t * t * t / 6.0 +
                      m_[j] * t * t * t * t / 24.0 + c3_[j] * t * t * t * t * t / 20.0;
    i1_[j + 1] = i1_[j] + p1;
    i2_[j + 1] = i2_[j] + i1_[j] * t + p2;
  }
}

std::size_t CubicSpline::piece(double x) const {
  if (!in_range(x))
    throw std::domain_error("spline evaluation outside [" + std::to_string(x_.front()) +
                            ", " + std::to_string(x_.back()) + "] at x=" + std::to_string(x));
  auto it = std::upper_bound(x_.begin(), x_.end(), x);
  std::size_t j = static_cast<std::size_t>(it - x_.begin());
  if (j > 0) --j;
  if (j + 1 >= x_.size()) j = x_.size() - 2;
  return j;
}

double CubicSpline::eval(double x) const {
  const std::size_t j = piece(x);
  const double t = x - x_[j];
  return y_[j] + t * (b_[j] + t * (m_[j] / 2.0 + t * c3_[j]));
}

double CubicSpline::integral(double x) const {
  const std::size_t j = piece(x);
  const double t = x - x_[j];
  return i1_[j] +
         t * (y_[j] + t * (b_[j] / 2.0 + t * (m_[j] / 6.0 + t * c3_[j] / 4.0)));
}

double CubicSpline::integral2(double x) const {
  const std::size_t j = piece(x);
  const double t = x - x_[j];
  return i2_[j] + i1_[j] * t +
         t * t *
             (y_[j] / 2.0 + t * (b_[j] / 6.0 + t * (m_[j] / 24.0 + t * c3_[j] / 20.0)));
}

}  // namespace biphoton
