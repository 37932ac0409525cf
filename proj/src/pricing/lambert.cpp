// SPDX-License-Identifier: Apache-2.0
#include "gigcomp/pricing/lambert.hpp"

#include <cmath>
#include <stdexcept>

namespace gigcomp::pricing {

namespace {

double initial_guess(double x) {
  if (x < 1.0) {
    // Series around 0: W(x) = x - x^2 + 3/2 x^3 - ...
    return x * (1.0 + x * (-1.0 + x * (1.5 - 8.0 / 3.0 * x)));
  }
  // Asymptotic: L1 - L2 + L2/L1.
  const double l1 = std::log(x);
  const double l2 = std::log(std::max(l1, 1e-300));
  return l1 > 1.0 ? l1 - l2 + l2 / l1 : 0.5;
}

}  // namespace

double lambert_w0(double x) {
  if (!(x >= 0) || !std::isfinite(x))
    throw std::invalid_argument("lambert_w0: argument must be finite and >= 0");
  if (x == 0.0) return 0.0;

  double w = initial_guess(x);
  for (int it = 0; it < 50; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::abs(f) <= 1e-13 * (1.0 + x)) return w;
    // Halley step on f(w) = w e^w - x.
    const double fp = ew * (1.0 + w);
    const double step = f / (fp - f * (w + 2.0) / (2.0 * (w + 1.0)));
    w -= step;
  }
  return w;
}

double lambert_w0_log(double log_x) {
  if (!std::isfinite(log_x))
    throw std::invalid_argument("lambert_w0_log: argument must be finite");
  if (log_x <= 1.0) return lambert_w0(std::exp(log_x));

  // For log_x > 1 the identity w e^w = x reads w + ln w = log_x with
  // w >= 1, where Newton converges monotonically.
  double w = log_x > 3.0 ? log_x - std::log(log_x) : 1.0;
  for (int it = 0; it < 50; ++it) {
    const double f = w + std::log(w) - log_x;
    if (std::abs(f) <= 1e-14 * (1.0 + std::abs(log_x))) break;
    w -= f / (1.0 + 1.0 / w);
  }
  return w;
}

}  // namespace gigcomp::pricing
