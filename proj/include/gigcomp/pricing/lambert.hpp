// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace gigcomp::pricing {

// Principal-branch Lambert W for x >= 0: returns w with w * e^w = x,
// |w e^w - x| <= 1e-12 * (1 + x). Halley iteration from an asymptotic
// initial guess. Throws on negative or non-finite input.
double lambert_w0(double x);

// W0(exp(log_x)) without forming exp(log_x). For log_x > 1 solves
// w + ln w = log_x by Newton; otherwise exponentiates and delegates.
// Agrees with lambert_w0(exp(log_x)) wherever both are finite.
double lambert_w0_log(double log_x);

}  // namespace gigcomp::pricing
