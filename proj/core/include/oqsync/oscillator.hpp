#pragma once

#include <complex>

#include "oqsync/errors.hpp"

namespace oqsync {

/// Two coupled damped oscillators:
///   H = omega1 a1^+ a1 + omega2 a2^+ a2 + J (a1^+ a2 + a2^+ a1)
/// with thermal amplitude-damping/creation channels at rate gamma and
/// channel correlation xi (damping-damping and creation-creation blocks).
/// xi may be complex for exceptional-point continuation; building a
/// physical Lindblad model or a covariance requires real xi with |xi| <= 1.
struct OscillatorParams {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double J = 0.0;
  double gamma = 1.0;
  std::complex<double> xi = 0.0;
  double n1 = 0.0;
  double n2 = 0.0;

  void validate() const {
    if (!(gamma >= 0.0)) fail(ErrorCode::ValidationFailed, "oscillator gamma must be >= 0");
    if (!(n1 >= 0.0) || !(n2 >= 0.0))
      fail(ErrorCode::ValidationFailed, "thermal occupations must be >= 0");
  }

  void require_damping() const {
    if (!(gamma > 0.0)) fail(ErrorCode::ValidationFailed, "operation requires gamma > 0");
  }

  /// Real |xi| <= 1, as required outside EP continuation.
  double physical_xi() const {
    if (xi.imag() != 0.0 || !(std::abs(xi.real()) <= 1.0))
      fail(ErrorCode::BadXi, "physical simulation requires real xi with |xi| <= 1");
    return xi.real();
  }

  double mean_omega() const { return 0.5 * (omega1 + omega2); }
  double delta_omega() const { return omega1 - omega2; }
};

}  // namespace oqsync
