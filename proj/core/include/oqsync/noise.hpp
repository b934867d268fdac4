#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "oqsync/errors.hpp"

namespace oqsync {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Validated noise-correlation matrix Xi: unit diagonal, symmetric, positive
/// semidefinite. Carries a lower-triangular factor C with Xi = C C^T; for
/// rank-deficient Xi (e.g. |xi| = 1 for two channels) the factor has zero
/// columns.
class NoiseCorrelation {
 public:
  /// Throws NonSymmetric / BadDiagonal / NotPSD (tolerance 1e-12).
  static NoiseCorrelation validate(const Mat& matrix);

  /// n x n identity shortcut (independent channels).
  static NoiseCorrelation identity(int n);

  /// Two-channel [[1, xi], [xi, 1]]; throws BadXi for |xi| > 1.
  static NoiseCorrelation pair(double xi);

  int size() const { return static_cast<int>(xi_.rows()); }
  const Mat& matrix() const { return xi_; }
  const Mat& factor() const { return factor_; }

 private:
  NoiseCorrelation(Mat xi, Mat factor) : xi_(std::move(xi)), factor_(std::move(factor)) {}
  Mat xi_;
  Mat factor_;  // lower triangular, Xi = factor * factor^T
};

/// Parameters of the coupled Ornstein-Uhlenbeck process
///   dE = -gamma E dt + sigma C dW,   E[dW dW^T] = Xi delta(t-t') dt
/// with stationary covariance (sigma^2 / 2 gamma) Xi.
struct OUParams {
  double gamma;  // decorrelation rate, > 0
  double sigma;  // fluctuation amplitude, >= 0
  NoiseCorrelation correlation;

  OUParams(double gamma_in, double sigma_in, NoiseCorrelation corr);

  double stationary_variance() const { return sigma * sigma / (2.0 * gamma); }
};

/// One sampled multichannel trajectory on a uniform grid starting at t = 0.
struct NoiseTrajectory {
  Vec times;               // n_times, times[0] = 0, uniform spacing
  Mat values;              // n_channels x n_times
  std::uint64_t seed = 0;  // master seed the ensemble was drawn from
  std::uint64_t index = 0; // trajectory index within the ensemble

  int channels() const { return static_cast<int>(values.rows()); }
  int samples() const { return static_cast<int>(values.cols()); }
};

class GaussianStream;

/// Exact one-step OU update for a fixed dt:
///   E(t+dt) = e^{-gamma dt} E(t) + eta,
///   eta ~ N(0, (sigma^2/2gamma)(1 - e^{-2 gamma dt}) Xi),
/// with the initial condition drawn from the stationary distribution.
/// Streaming form shared by the ensemble sampler and the Monte-Carlo
/// dephasing estimators; identical seeds give bit-identical samples.
class OUStepper {
 public:
  OUStepper(const OUParams& params, double dt);
  Vec initial(GaussianStream& rng) const;
  void step(Vec& e, GaussianStream& rng) const;
  int channels() const { return static_cast<int>(factor_.rows()); }

 private:
  Mat factor_;
  double decay_;
  double stat_sd_;
  double step_sd_;
};

/// Exact-discretization OU sampling (see OUStepper). Trajectory i owns the
/// RNG stream derive_stream_seed(seed, i), so ensembles are
/// order-independent and reproducible bit-for-bit.
std::vector<NoiseTrajectory> sample_ou(const OUParams& params, double t_final, double dt,
                                       int n_traj, std::uint64_t seed, int threads = 1);

/// Symmetry-adapted channels E_pm = (E_1 +- E_2)/sqrt(2); requires exactly
/// two channels.
NoiseTrajectory plus_minus_channels(const NoiseTrajectory& traj);

/// Lagged second-moment estimate with bootstrap standard errors.
struct LagCurve {
  Vec lags;    // time lags, starting at 0
  Vec value;   // covariance estimate per lag
  Vec stderr_; // bootstrap standard error per lag
};

/// E[ E_a(t) E_b(t + lag) ] estimated over trajectories and time origins.
/// Bootstrap resamples whole trajectories (>= 200 resamples).
LagCurve empirical_crosscovariance(std::span<const NoiseTrajectory> trajectories, int channel_a,
                                   int channel_b, double max_lag, int n_resamples = 200,
                                   std::uint64_t resample_seed = 0x6f71u);

/// Autocovariance: empirical_crosscovariance with channel_a == channel_b.
LagCurve empirical_autocorrelation(std::span<const NoiseTrajectory> trajectories, int channel,
                                   double max_lag, int n_resamples = 200,
                                   std::uint64_t resample_seed = 0x6f71u);

}  // namespace oqsync
