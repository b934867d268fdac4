#include "oqsync/noise.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "oqsync/parallel.hpp"
#include "oqsync/rng.hpp"

namespace oqsync {

namespace {

constexpr double kTol = 1e-12;

// Cholesky with zero-pivot handling: PSD inputs with rank deficiency get
// zero columns instead of a failure. PSD has already been verified via the
// eigenvalue check, so a pivot below tolerance implies the remainder of the
// column vanishes too.
Mat psd_lower_factor(const Mat& a) {
  const int n = static_cast<int>(a.rows());
  Mat l = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (d > kTol) {
      l(j, j) = std::sqrt(d);
      for (int i = j + 1; i < n; ++i) {
        double s = a(i, j);
        for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
        l(i, j) = s / l(j, j);
      }
    }
    // else: zero column (rank deficiency)
  }
  return l;
}

}  // namespace

NoiseCorrelation NoiseCorrelation::validate(const Mat& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
    fail(ErrorCode::NonSymmetric, "correlation matrix must be square and non-empty");
  if (!matrix.allFinite())
    fail(ErrorCode::NonSymmetric, "correlation matrix has non-finite entries");
  const int n = static_cast<int>(matrix.rows());

  const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asym > kTol) {
    std::ostringstream os;
    os << "max |Xi - Xi^T| = " << asym;
    fail(ErrorCode::NonSymmetric, os.str());
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(matrix(i, i) - 1.0) > kTol) {
      std::ostringstream os;
      os << "Xi(" << i << "," << i << ") = " << matrix(i, i) << ", expected 1";
      fail(ErrorCode::BadDiagonal, os.str());
    }
  }

  Mat sym = 0.5 * (matrix + matrix.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -kTol) {
    std::ostringstream os;
    os << "smallest eigenvalue " << min_eig << " < -1e-12";
    fail(ErrorCode::NotPSD, os.str());
  }
  // Clamp floating-point negative eigenvalues to zero before factorizing.
  if (min_eig < 0.0) {
    Vec clamped = es.eigenvalues().cwiseMax(0.0);
    sym = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    sym = 0.5 * (sym + sym.transpose());
  }
  return NoiseCorrelation(sym, psd_lower_factor(sym));
}

NoiseCorrelation NoiseCorrelation::identity(int n) { return validate(Mat::Identity(n, n)); }

NoiseCorrelation NoiseCorrelation::pair(double xi) {
  if (!(std::abs(xi) <= 1.0)) fail(ErrorCode::BadXi, "two-channel correlation requires |xi| <= 1");
  Mat m(2, 2);
  m << 1.0, xi, xi, 1.0;
  return validate(m);
}

OUParams::OUParams(double gamma_in, double sigma_in, NoiseCorrelation corr)
    : gamma(gamma_in), sigma(sigma_in), correlation(std::move(corr)) {
  if (!(gamma > 0.0)) fail(ErrorCode::ValidationFailed, "OU gamma must be > 0");
  if (!(sigma >= 0.0)) fail(ErrorCode::ValidationFailed, "OU sigma must be >= 0");
}

OUStepper::OUStepper(const OUParams& params, double dt) : factor_(params.correlation.factor()) {
  if (!(dt > 0.0)) fail(ErrorCode::BadGrid, "need dt > 0");
  decay_ = std::exp(-params.gamma * dt);
  stat_sd_ = std::sqrt(params.stationary_variance());
  step_sd_ = stat_sd_ * std::sqrt(1.0 - decay_ * decay_);
}

Vec OUStepper::initial(GaussianStream& rng) const {
  Vec z(channels());
  for (int ch = 0; ch < channels(); ++ch) z[ch] = rng.normal();
  return stat_sd_ * (factor_ * z);
}

void OUStepper::step(Vec& e, GaussianStream& rng) const {
  Vec z(channels());
  for (int ch = 0; ch < channels(); ++ch) z[ch] = rng.normal();
  e = decay_ * e + step_sd_ * (factor_ * z);
}

std::vector<NoiseTrajectory> sample_ou(const OUParams& params, double t_final, double dt,
                                       int n_traj, std::uint64_t seed, int threads) {
  if (!(dt > 0.0) || t_final < dt) fail(ErrorCode::BadGrid, "need dt > 0 and t_final >= dt");
  if (n_traj < 1) fail(ErrorCode::BadGrid, "need at least one trajectory");

  const int n_ch = params.correlation.size();
  const int n_steps = static_cast<int>(std::floor(t_final / dt + 0.5 + kTol));
  const int n_times = n_steps + 1;

  Vec times(n_times);
  for (int k = 0; k < n_times; ++k) times[k] = k * dt;

  const OUStepper stepper(params, dt);

  std::vector<NoiseTrajectory> out(static_cast<std::size_t>(n_traj));
  parallel_for(static_cast<std::size_t>(n_traj), threads, [&](std::size_t i) {
    GaussianStream rng(derive_stream_seed(seed, i));
    NoiseTrajectory traj;
    traj.times = times;
    traj.values.resize(n_ch, n_times);
    traj.seed = seed;
    traj.index = i;

    Vec e = stepper.initial(rng);
    traj.values.col(0) = e;
    for (int k = 1; k < n_times; ++k) {
      stepper.step(e, rng);
      traj.values.col(k) = e;
    }
    out[i] = std::move(traj);
  });
  return out;
}

NoiseTrajectory plus_minus_channels(const NoiseTrajectory& traj) {
  if (traj.channels() != 2)
    fail(ErrorCode::ChannelCount, "plus/minus channels are defined for exactly 2 channels");
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  NoiseTrajectory out = traj;
  out.values.row(0) = inv_sqrt2 * (traj.values.row(0) + traj.values.row(1));
  out.values.row(1) = inv_sqrt2 * (traj.values.row(0) - traj.values.row(1));
  return out;
}

LagCurve empirical_crosscovariance(std::span<const NoiseTrajectory> trajectories, int channel_a,
                                   int channel_b, double max_lag, int n_resamples,
                                   std::uint64_t resample_seed) {
  const int n_traj = static_cast<int>(trajectories.size());
  if (n_traj < 2) fail(ErrorCode::InsufficientData, "need at least 2 trajectories");
  const NoiseTrajectory& first = trajectories[0];
  if (channel_a < 0 || channel_a >= first.channels() || channel_b < 0 ||
      channel_b >= first.channels())
    fail(ErrorCode::ChannelCount, "channel index out of range");
  const double dt = first.times[1] - first.times[0];
  const double t_final = first.times[first.samples() - 1];
  if (!(max_lag < t_final)) fail(ErrorCode::BadGrid, "max_lag must be below t_final");
  const int n_lags = static_cast<int>(std::floor(max_lag / dt + kTol)) + 1;
  const int n_times = first.samples();
  if (n_resamples < 200) n_resamples = 200;

  // Per-trajectory time-origin averages; the estimator and its bootstrap
  // both reduce over these.
  Mat per_traj(n_traj, n_lags);
  for (int i = 0; i < n_traj; ++i) {
    const Mat& v = trajectories[i].values;
    for (int l = 0; l < n_lags; ++l) {
      const int n_org = n_times - l;
      double acc = 0.0;
      for (int k = 0; k < n_org; ++k) acc += v(channel_a, k) * v(channel_b, k + l);
      per_traj(i, l) = acc / n_org;
    }
  }

  LagCurve curve;
  curve.lags.resize(n_lags);
  for (int l = 0; l < n_lags; ++l) curve.lags[l] = l * dt;
  curve.value = per_traj.colwise().mean();

  GaussianStream rng(derive_stream_seed(resample_seed, 0));
  Vec mean_acc = Vec::Zero(n_lags);
  Vec sq_acc = Vec::Zero(n_lags);
  Vec resample(n_lags);
  for (int b = 0; b < n_resamples; ++b) {
    resample.setZero();
    for (int i = 0; i < n_traj; ++i) {
      const int pick = static_cast<int>(rng.uniform01() * n_traj) % n_traj;
      resample += per_traj.row(pick);
    }
    resample /= n_traj;
    mean_acc += resample;
    sq_acc += resample.cwiseProduct(resample);
  }
  curve.stderr_ =
      ((sq_acc / n_resamples) - (mean_acc / n_resamples).cwiseAbs2()).cwiseMax(0.0).cwiseSqrt();
  return curve;
}

LagCurve empirical_autocorrelation(std::span<const NoiseTrajectory> trajectories, int channel,
                                   double max_lag, int n_resamples, std::uint64_t resample_seed) {
  return empirical_crosscovariance(trajectories, channel, channel, max_lag, n_resamples,
                                   resample_seed);
}

}  // namespace oqsync
