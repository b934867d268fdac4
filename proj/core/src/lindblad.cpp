#include "oqsync/lindblad.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/KroneckerProduct>

namespace oqsync {

namespace {

constexpr cd kI{0.0, 1.0};

SpCMat to_sparse(const CMat& m) { return m.sparseView(); }

SpCMat sparse_identity(int n) {
  SpCMat id(n, n);
  id.setIdentity();
  return id;
}

SpCMat pauli_z() {
  CMat z(2, 2);
  z << 1.0, 0.0, 0.0, -1.0;
  return to_sparse(z);
}

/// Annihilation operator truncated at n_fock levels: a|n> = sqrt(n)|n-1>.
SpCMat ladder(int n_fock) {
  SpCMat a(n_fock, n_fock);
  for (int n = 1; n < n_fock; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
  a.makeCompressed();
  return a;
}

SpCMat site_operator(const SpCMat& op, int site, int n_sites, int local_dim) {
  SpCMat out = site == 0 ? op : sparse_identity(local_dim);
  for (int s = 1; s < n_sites; ++s) {
    const SpCMat& next = (s == site) ? op : sparse_identity(local_dim);
    out = Eigen::kroneckerProduct(out, next).eval();
  }
  return out;
}

void require_hermitian(const CMat& h, const char* what) {
  const double dev = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12) {
    std::ostringstream os;
    os << what << " must be Hermitian (max deviation " << dev << ")";
    fail(ErrorCode::ValidationFailed, os.str());
  }
}

}  // namespace

DensityMatrix::DensityMatrix(CMat rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() < 1)
    fail(ErrorCode::ValidationFailed, "density matrix must be square");
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-12) fail(ErrorCode::ValidationFailed, "density matrix not Hermitian within 1e-12");
  const double tr_err = std::abs(rho_.trace() - cd(1.0));
  if (tr_err > 1e-10) fail(ErrorCode::ValidationFailed, "density matrix trace deviates from 1");
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (rho_ + rho_.adjoint()),
                                         Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8)
    fail(ErrorCode::ValidationFailed, "density matrix has eigenvalue below -1e-8");
}

DensityMatrix DensityMatrix::from_pure(const CVec& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) fail(ErrorCode::ValidationFailed, "zero state vector");
  CVec unit = psi / norm;
  return DensityMatrix((unit * unit.adjoint()).eval());
}

DensityMatrix bell_state(BellState s) {
  CVec psi = CVec::Zero(4);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  switch (s) {
    case BellState::PhiPlus: psi[0] = inv_sqrt2; psi[3] = inv_sqrt2; break;
    case BellState::PhiMinus: psi[0] = inv_sqrt2; psi[3] = -inv_sqrt2; break;
    case BellState::PsiPlus: psi[1] = inv_sqrt2; psi[2] = inv_sqrt2; break;
    case BellState::PsiMinus: psi[1] = inv_sqrt2; psi[2] = -inv_sqrt2; break;
  }
  return DensityMatrix::from_pure(psi);
}

DensityMatrix fock_product(int n_fock, int level1, int level2) {
  if (n_fock < 2) fail(ErrorCode::BadTruncation, "need n_fock >= 2");
  if (level1 < 0 || level1 >= n_fock || level2 < 0 || level2 >= n_fock)
    fail(ErrorCode::ValidationFailed, "Fock level out of range");
  CVec psi = CVec::Zero(n_fock * n_fock);
  psi[level1 * n_fock + level2] = 1.0;
  return DensityMatrix::from_pure(psi);
}

LindbladModel make_model(const CMat& hamiltonian, const std::vector<CMat>& couplings, double rate,
                         const Mat& xi) {
  require_hermitian(hamiltonian, "H0");
  if (!(rate >= 0.0)) fail(ErrorCode::ValidationFailed, "dissipation rate must be >= 0");
  LindbladModel model;
  model.hamiltonian = to_sparse(hamiltonian);
  model.correlation = NoiseCorrelation::validate(xi);
  if (static_cast<int>(couplings.size()) != model.correlation.size())
    fail(ErrorCode::ChannelCount, "couplings count must equal correlation dimension");
  for (const CMat& a : couplings) {
    if (a.rows() != hamiltonian.rows() || a.cols() != hamiltonian.cols())
      fail(ErrorCode::ValidationFailed, "coupling operator dimension mismatch");
    model.couplings.push_back(to_sparse(a));
  }
  model.rate = rate;
  return model;
}

LindbladModel build_two_qubit_dephasing(double delta, double kappa, double xi) {
  if (!(std::abs(xi) <= 1.0)) fail(ErrorCode::BadXi, "|xi| <= 1 required");
  Mat corr(2, 2);
  corr << 1.0, xi, xi, 1.0;
  return build_multi_qubit_dephasing(2, delta, kappa, corr);
}

LindbladModel build_multi_qubit_dephasing(int n, double delta, double kappa, const Mat& xi) {
  if (n < 1) fail(ErrorCode::ValidationFailed, "need at least one qubit");
  if (!(kappa >= 0.0)) fail(ErrorCode::ValidationFailed, "kappa must be >= 0");
  LindbladModel model;
  model.correlation = NoiseCorrelation::validate(xi);
  if (model.correlation.size() != n)
    fail(ErrorCode::ChannelCount, "correlation dimension must equal qubit count");
  const int dim = 1 << n;
  const SpCMat sz = pauli_z();
  SpCMat h(dim, dim);
  for (int site = 0; site < n; ++site) {
    SpCMat a = site_operator(sz, site, n, 2);
    h += (0.5 * delta) * a;
    model.couplings.push_back(std::move(a));
  }
  model.hamiltonian = h;
  model.rate = kappa;
  model.factor_dims.assign(static_cast<std::size_t>(n), 2);
  return model;
}

LindbladModel build_coupled_oscillators(const OscillatorParams& p, int n_fock) {
  if (n_fock < 2) fail(ErrorCode::BadTruncation, "need n_fock >= 2");
  p.validate();
  const double xi = p.physical_xi();

  const SpCMat a = ladder(n_fock);
  const SpCMat a1 = site_operator(a, 0, 2, n_fock);
  const SpCMat a2 = site_operator(a, 1, 2, n_fock);
  const SpCMat a1d = SpCMat(a1.adjoint());
  const SpCMat a2d = SpCMat(a2.adjoint());

  LindbladModel model;
  model.hamiltonian = p.omega1 * (a1d * a1) + p.omega2 * (a2d * a2) +
                      p.J * (a1d * a2 + a2d * a1);
  model.couplings = {SpCMat(std::sqrt(p.n1 + 1.0) * a1), SpCMat(std::sqrt(p.n2 + 1.0) * a2),
                     SpCMat(std::sqrt(p.n1) * a1d), SpCMat(std::sqrt(p.n2) * a2d)};
  // Damping-damping and creation-creation blocks share xi; no cross-type
  // correlation. Reproduces the drift matrix lambda_pm as first moments.
  Mat corr = Mat::Identity(4, 4);
  corr(0, 1) = corr(1, 0) = xi;
  corr(2, 3) = corr(3, 2) = xi;
  model.correlation = NoiseCorrelation::validate(corr);
  // First moments damp at gamma (not gamma/2); see header.
  model.rate = 2.0 * p.gamma;
  model.factor_dims = {n_fock, n_fock};
  return model;
}

SpCMat correlated_dissipator(const LindbladModel& model) {
  const int dim = model.dim();
  const SpCMat id = sparse_identity(dim);
  const SpCMat& h = model.hamiltonian;

  SpCMat gen(dim * dim, dim * dim);
  gen = (-kI) * SpCMat(Eigen::kroneckerProduct(id, h)) +
        kI * SpCMat(Eigen::kroneckerProduct(SpCMat(h.transpose()), id));

  const Mat& xi = model.correlation.matrix();
  const int n_ch = model.correlation.size();
  for (int i = 0; i < n_ch; ++i) {
    for (int j = 0; j < n_ch; ++j) {
      const double w = xi(i, j);
      if (w == 0.0) continue;
      const SpCMat& ai = model.couplings[i];
      const SpCMat& aj = model.couplings[j];
      const SpCMat ajd_ai = SpCMat(aj.adjoint()) * ai;
      SpCMat term = SpCMat(Eigen::kroneckerProduct(SpCMat(aj.conjugate()), ai)) -
                    0.5 * SpCMat(Eigen::kroneckerProduct(id, ajd_ai)) -
                    0.5 * SpCMat(Eigen::kroneckerProduct(SpCMat(ajd_ai.transpose()), id));
      gen += (model.rate * w) * term;
    }
  }
  gen.makeCompressed();
  return gen;
}

GeneratorAction::GeneratorAction(const LindbladModel& model)
    : dim_(model.dim()), h_(model.hamiltonian), rate_(model.rate) {
  // Diagonalize Xi into independent eigenchannels L_k; zero modes drop out.
  Eigen::SelfAdjointEigenSolver<Mat> es(model.correlation.matrix());
  const int n_ch = model.correlation.size();
  for (int k = 0; k < n_ch; ++k) {
    const double mu = es.eigenvalues()[k];
    if (mu < 1e-14) continue;
    SpCMat l(dim_, dim_);
    for (int i = 0; i < n_ch; ++i) {
      const double u = es.eigenvectors()(i, k);
      if (u != 0.0) l += cd(u, 0.0) * model.couplings[i];
    }
    l = std::sqrt(mu) * l;
    l.makeCompressed();
    channels_adj_.push_back(SpCMat(l.adjoint()));
    channel_sq_.push_back(channels_adj_.back() * l);
    channels_.push_back(std::move(l));
  }
  scratch_.resize(dim_, dim_);
}

void GeneratorAction::apply(const CMat& rho, CMat& out) const {
  out.noalias() = (-kI) * (h_ * rho);
  out.noalias() += kI * (rho * h_);
  if (rate_ != 0.0) {
    for (std::size_t k = 0; k < channels_.size(); ++k) {
      scratch_.noalias() = channels_[k] * rho;
      out.noalias() += rate_ * (scratch_ * channels_adj_[k]);
      out.noalias() -= (0.5 * rate_) * (channel_sq_[k] * rho);
      out.noalias() -= (0.5 * rate_) * (rho * channel_sq_[k]);
    }
  }
}

CMat GeneratorAction::apply(const CMat& rho) const {
  CMat out(dim_, dim_);
  apply(rho, out);
  return out;
}

EvolveResult evolve(const LindbladModel& model, const DensityMatrix& rho0, double t_final,
                    double dt, const EvolveOptions& opts) {
  if (!(dt > 0.0) || t_final < dt) fail(ErrorCode::BadGrid, "need dt > 0 and t_final >= dt");
  if (rho0.dim() != model.dim()) fail(ErrorCode::ValidationFailed, "state/model dimension mismatch");
  const int stride = std::max(1, opts.sample_stride);
  const int audit_stride = std::max(1, opts.audit_stride);
  const int n_steps = static_cast<int>(std::floor(t_final / dt + 0.5 + 1e-12));

  const GeneratorAction gen(model);
  CMat rho = rho0.matrix();
  CMat k1(rho.rows(), rho.cols()), k2 = k1, k3 = k1, k4 = k1, tmp = k1;

  EvolveResult res;
  const int n_samples = n_steps / stride + 1;
  res.times.resize(n_samples);
  res.trace_drift.resize(n_samples);
  res.min_eigenvalue.resize(n_samples);
  res.states.reserve(n_samples);

  const auto min_eig = [](const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };

  int col = 0;
  res.times[col] = 0.0;
  res.trace_drift[col] = std::abs(rho.trace() - cd(1.0));
  res.min_eigenvalue[col] = min_eig(rho);
  res.max_trace_drift = res.trace_drift[col];
  res.min_eigenvalue_seen = res.min_eigenvalue[col];
  res.states.push_back(rho);
  ++col;

  double last_eig = res.min_eigenvalue_seen;
  for (int step = 1; step <= n_steps; ++step) {
    gen.apply(rho, k1);
    tmp = rho + (0.5 * dt) * k1;
    gen.apply(tmp, k2);
    tmp = rho + (0.5 * dt) * k2;
    gen.apply(tmp, k3);
    tmp = rho + dt * k3;
    gen.apply(tmp, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double drift = std::abs(rho.trace() - cd(1.0));
    res.max_trace_drift = std::max(res.max_trace_drift, drift);
    if (drift > opts.trace_tol) {
      std::ostringstream os;
      os << "|tr rho - 1| = " << drift << " at t = " << step * dt;
      fail(ErrorCode::TraceDrift, os.str());
    }
    const bool audited = (step % audit_stride == 0) || step == n_steps;
    if (audited) {
      last_eig = min_eig(rho);
      res.min_eigenvalue_seen = std::min(res.min_eigenvalue_seen, last_eig);
      if (last_eig < opts.positivity_floor) {
        std::ostringstream os;
        os << "min eigenvalue " << last_eig << " at t = " << step * dt
           << " (reduce dt)";
        fail(ErrorCode::PositivityBreach, os.str());
      }
    }
    if (step % stride == 0) {
      res.times[col] = step * dt;
      res.trace_drift[col] = drift;
      res.min_eigenvalue[col] = last_eig;
      res.states.push_back(rho);
      ++col;
    }
  }
  res.times.conservativeResize(col);
  res.trace_drift.conservativeResize(col);
  res.min_eigenvalue.conservativeResize(col);
  return res;
}

namespace {

Eigen::FullPivLU<CMat> generator_lu(const LindbladModel& model) {
  if (model.dim() > 32)
    fail(ErrorCode::TooLarge, "kernel extraction supports dim <= 32");
  CMat dense = CMat(correlated_dissipator(model));
  Eigen::FullPivLU<CMat> lu(dense);
  lu.setThreshold(1e-10);
  return lu;
}

}  // namespace

std::vector<CMat> steady_kernel_basis(const LindbladModel& model) {
  const auto lu = generator_lu(model);
  const CMat kernel = lu.kernel();
  std::vector<CMat> basis;
  const int dim = model.dim();
  for (int c = 0; c < kernel.cols(); ++c) {
    basis.push_back(Eigen::Map<const CMat>(kernel.col(c).data(), dim, dim));
  }
  return basis;
}

DensityMatrix steady_state(const LindbladModel& model) {
  const auto lu = generator_lu(model);
  const int kdim = static_cast<int>(lu.dimensionOfKernel());
  if (kdim == 0) fail(ErrorCode::ValidationFailed, "generator has no kernel at tolerance");
  if (kdim > 1) {
    std::ostringstream os;
    os << "stationary subspace has dimension " << kdim
       << "; request steady_kernel_basis for the full basis";
    fail(ErrorCode::DegenerateKernel, os.str());
  }
  const int dim = model.dim();
  const CMat kernel = lu.kernel();
  CMat raw = Eigen::Map<const CMat>(kernel.col(0).data(), dim, dim);
  const cd tr = raw.trace();
  if (std::abs(tr) < 1e-12)
    fail(ErrorCode::ValidationFailed, "kernel state has vanishing trace");
  raw /= tr;
  CMat herm = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(herm);
  Vec clamped = es.eigenvalues().cwiseMax(0.0);
  clamped /= clamped.sum();
  CMat rho = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().adjoint();
  return DensityMatrix(0.5 * (rho + rho.adjoint()));
}

Eigen::Vector2cd mode_amplitudes(const CMat& rho, int n_fock) {
  const SpCMat a = ladder(n_fock);
  const SpCMat a1 = site_operator(a, 0, 2, n_fock);
  const SpCMat a2 = site_operator(a, 1, 2, n_fock);
  Eigen::Vector2cd amp;
  amp[0] = (a1 * rho).eval().trace();
  amp[1] = (a2 * rho).eval().trace();
  return amp;
}

Mat quadrature_covariance(const CMat& rho, int n_fock) {
  const SpCMat a = ladder(n_fock);
  const cd inv_sqrt2{1.0 / std::sqrt(2.0), 0.0};
  const cd neg_i_inv_sqrt2{0.0, -1.0 / std::sqrt(2.0)};
  std::vector<CMat> q(4);
  for (int mode = 0; mode < 2; ++mode) {
    const SpCMat am = site_operator(a, mode, 2, n_fock);
    const CMat ad = CMat(am.adjoint());
    q[2 * mode] = inv_sqrt2 * (CMat(am) + ad);
    q[2 * mode + 1] = neg_i_inv_sqrt2 * (CMat(am) - ad);
  }
  Eigen::Vector4d mean;
  for (int i = 0; i < 4; ++i) mean[i] = (q[i] * rho).trace().real();
  Mat theta(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const cd sym = 0.5 * ((q[i] * q[j] + q[j] * q[i]) * rho).trace();
      theta(i, j) = theta(j, i) = sym.real() - mean[i] * mean[j];
    }
  }
  return theta;
}

double top_level_population(const CMat& rho, int n_fock) {
  double worst = 0.0;
  for (int mode = 0; mode < 2; ++mode) {
    double pop = 0.0;
    for (int other = 0; other < n_fock; ++other) {
      const int idx = mode == 0 ? (n_fock - 1) * n_fock + other : other * n_fock + (n_fock - 1);
      pop += rho(idx, idx).real();
    }
    worst = std::max(worst, pop);
  }
  return worst;
}

}  // namespace oqsync
