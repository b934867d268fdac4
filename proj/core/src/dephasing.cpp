#include "oqsync/dephasing.hpp"

#include <cmath>
#include <limits>

#include "oqsync/parallel.hpp"
#include "oqsync/rng.hpp"

namespace oqsync {

namespace {

double branch_weight(double xi, Branch branch) {
  return branch == Branch::Plus ? 1.0 + xi : 1.0 - xi;
}

void require_nonnegative_time(double t) {
  if (!(t >= 0.0)) fail(ErrorCode::NegativeTime, "time must be >= 0");
}

}  // namespace

DephasingParams::DephasingParams(double sigma_in, double gamma_in, double xi_in, double delta_in)
    : sigma(sigma_in), gamma(gamma_in), xi(xi_in), delta(delta_in) {
  if (!(gamma > 0.0)) fail(ErrorCode::ValidationFailed, "gamma must be > 0");
  if (!(sigma >= 0.0)) fail(ErrorCode::ValidationFailed, "sigma must be >= 0");
  if (!(std::abs(xi) <= 1.0)) fail(ErrorCode::BadXi, "|xi| <= 1 required");
}

const char* bell_label(BellState s) {
  switch (s) {
    case BellState::PhiPlus: return "phi+";
    case BellState::PhiMinus: return "phi-";
    case BellState::PsiPlus: return "psi+";
    case BellState::PsiMinus: return "psi-";
  }
  return "?";
}

double gamma_pm(double t, const DephasingParams& p, Branch branch) {
  require_nonnegative_time(t);
  const double gt = p.gamma * t;
  // gamma t + e^{-gamma t} - 1, evaluated via expm1 to keep the small-t
  // quadratic regime accurate.
  const double shape = gt + std::expm1(-gt);
  const double amp = (p.sigma * p.sigma) / (p.gamma * p.gamma);
  return amp * branch_weight(p.xi, branch) * shape;
}

double coherence_01_10(double t, const DephasingParams& p) {
  return std::exp(-gamma_pm(t, p, Branch::Minus));
}

double bell_gamma(BellState state, double t, const DephasingParams& p) {
  const Branch branch =
      (state == BellState::PhiPlus || state == BellState::PhiMinus) ? Branch::Plus : Branch::Minus;
  return 16.0 * gamma_pm(t, p, branch);
}

double bell_purity(BellState state, double t, const DephasingParams& p) {
  return 0.5 * (1.0 + std::exp(-2.0 * bell_gamma(state, t, p)));
}

std::complex<double> bell_phase_factor(BellState state, double t, const DephasingParams& p) {
  require_nonnegative_time(t);
  if (state == BellState::PsiPlus || state == BellState::PsiMinus) return {1.0, 0.0};
  // |00> sits at +delta, |11> at -delta (sigma_z|0> = +|0>), so the Phi
  // coherence rotates at 2 delta.
  return std::exp(std::complex<double>(0.0, -2.0 * p.delta * t));
}

const char* regime_label(ModulationRegime r) {
  switch (r) {
    case ModulationRegime::GaussianInhomogeneous: return "gaussian-inhomogeneous";
    case ModulationRegime::Crossover: return "crossover";
    case ModulationRegime::LorentzianNarrowed: return "lorentzian-narrowed";
    case ModulationRegime::DecoherenceFree: return "decoherence-free";
  }
  return "?";
}

namespace {

ModulationRegime classify(double gamma, double sigma_eff, double& r_out) {
  if (sigma_eff == 0.0) {
    r_out = std::numeric_limits<double>::infinity();
    return ModulationRegime::DecoherenceFree;
  }
  r_out = gamma / sigma_eff;
  if (r_out < 1.0 / 3.0) return ModulationRegime::GaussianInhomogeneous;
  if (r_out > 3.0) return ModulationRegime::LorentzianNarrowed;
  return ModulationRegime::Crossover;
}

}  // namespace

RegimeReport modulation_regime(const DephasingParams& p) {
  RegimeReport rep{};
  rep.plus = classify(p.gamma, p.sigma * std::sqrt(branch_weight(p.xi, Branch::Plus)), rep.r_plus);
  rep.minus =
      classify(p.gamma, p.sigma * std::sqrt(branch_weight(p.xi, Branch::Minus)), rep.r_minus);
  return rep;
}

EnvelopeCurve mc_dephasing_envelope(const DephasingParams& p, Branch branch, double t_final,
                                    double dt, int n_traj, std::uint64_t seed,
                                    double phase_coupling, int sample_stride, int n_resamples,
                                    int threads) {
  if (!(dt > 0.0) || t_final < dt) fail(ErrorCode::BadGrid, "need dt > 0 and t_final >= dt");
  if (n_traj < 2) fail(ErrorCode::InsufficientData, "need at least 2 trajectories");
  if (sample_stride < 1) sample_stride = 1;

  const OUParams ou(p.gamma, p.sigma, NoiseCorrelation::pair(p.xi));
  const OUStepper stepper(ou, dt);
  const int n_steps = static_cast<int>(std::floor(t_final / dt + 0.5 + 1e-12));
  const int n_samples = n_steps / sample_stride + 1;
  // AK normalization: delta_omega = sqrt(2 gamma) E  (see header).
  const double scale = phase_coupling * std::sqrt(2.0 * p.gamma) / std::sqrt(2.0);
  const double sgn = branch == Branch::Plus ? 1.0 : -1.0;

  Mat cos_phi(n_traj, n_samples);
  parallel_for(static_cast<std::size_t>(n_traj), threads, [&](std::size_t i) {
    GaussianStream rng(derive_stream_seed(seed, i));
    Vec e = stepper.initial(rng);
    double field = scale * (e[0] + sgn * e[1]);  // scale * sqrt(2) * E_branch
    double phi = 0.0;
    int col = 0;
    cos_phi(static_cast<int>(i), col++) = 1.0;
    for (int k = 1; k <= n_steps; ++k) {
      const double prev = field;
      stepper.step(e, rng);
      field = scale * (e[0] + sgn * e[1]);
      phi += 0.5 * dt * (prev + field);  // trapezoid
      if (k % sample_stride == 0) cos_phi(static_cast<int>(i), col++) = std::cos(phi);
    }
  });

  EnvelopeCurve curve;
  curve.times.resize(n_samples);
  for (int s = 0; s < n_samples; ++s) curve.times[s] = s * sample_stride * dt;
  curve.mean = cos_phi.colwise().mean();

  if (n_resamples < 200) n_resamples = 200;
  GaussianStream rng(derive_stream_seed(seed ^ 0xb007'57a9ULL, 0));
  Vec mean_acc = Vec::Zero(n_samples);
  Vec sq_acc = Vec::Zero(n_samples);
  Vec resample(n_samples);
  std::vector<int> picks(static_cast<std::size_t>(n_traj));
  for (int b = 0; b < n_resamples; ++b) {
    for (int i = 0; i < n_traj; ++i)
      picks[i] = static_cast<int>(rng.uniform01() * n_traj) % n_traj;
    resample.setZero();
    for (int i = 0; i < n_traj; ++i) resample += cos_phi.row(picks[i]);
    resample /= n_traj;
    mean_acc += resample;
    sq_acc += resample.cwiseProduct(resample);
  }
  curve.stderr_ =
      ((sq_acc / n_resamples) - (mean_acc / n_resamples).cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
  return curve;
}

}  // namespace oqsync
