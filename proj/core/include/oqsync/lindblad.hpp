#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <vector>

#include "oqsync/dephasing.hpp"  // BellState
#include "oqsync/noise.hpp"
#include "oqsync/oscillator.hpp"

namespace oqsync {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using SpCMat = Eigen::SparseMatrix<cd>;

/// Validated density matrix: Hermitian (1e-12), unit trace (1e-10),
/// eigenvalues >= -1e-8.
class DensityMatrix {
 public:
  explicit DensityMatrix(CMat rho);
  static DensityMatrix from_pure(const CVec& psi);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const CMat& matrix() const { return rho_; }

 private:
  CMat rho_;
};

/// Two-qubit Bell states in the computational basis |00>,|01>,|10>,|11>
/// (site 0 is the left tensor factor).
DensityMatrix bell_state(BellState s);

/// Product Fock state |n1, n2> for two modes truncated at n_fock levels.
DensityMatrix fock_product(int n_fock, int level1, int level2);

/// Open-system model
///   d rho/dt = -i [H, rho] + rate * sum_ij Xi_ij (A_i rho A_j^+ - {A_j^+ A_i, rho}/2).
/// Complete positivity is guaranteed by Xi being PSD. Immutable after
/// construction; distinct instances evolve in parallel freely.
struct LindbladModel {
  SpCMat hamiltonian;
  std::vector<SpCMat> couplings;
  double rate = 0.0;
  NoiseCorrelation correlation = NoiseCorrelation::identity(1);
  std::vector<int> factor_dims;  // tensor-factor dimensions, e.g. {2,2} or {n_fock,n_fock}

  int dim() const { return static_cast<int>(hamiltonian.rows()); }
};

LindbladModel make_model(const CMat& hamiltonian, const std::vector<CMat>& couplings, double rate,
                         const Mat& xi);

/// Two dephasing qubits: H = (delta/2)(sz x I + I x sz), couplings sz x I
/// and I x sz, correlation [[1, xi],[xi, 1]]. sigma_z |0> = +|0>.
LindbladModel build_two_qubit_dephasing(double delta, double kappa, double xi);

/// n dephasing qubits with an arbitrary validated correlation matrix;
/// the two-qubit builder is the n = 2 special case.
LindbladModel build_multi_qubit_dephasing(int n, double delta, double kappa, const Mat& xi);

/// Two coupled modes with thermal channels sqrt(n_i+1) a_i (damping) and
/// sqrt(n_i) a_i^+ (creation); xi correlates damping with damping and
/// creation with creation. The dissipator prefactor is 2*gamma so that
/// first moments damp at gamma, matching the drift-matrix eigenvalues
/// lambda_pm: at n_i = 0 a single excitation decays as e^{-2 gamma t}.
LindbladModel build_coupled_oscillators(const OscillatorParams& p, int n_fock);

/// Full generator acting on column-major vec(rho), dim^2 x dim^2 sparse.
SpCMat correlated_dissipator(const LindbladModel& model);

/// Generator applied in operator form (precomputed correlation
/// eigenchannels); same map as correlated_dissipator without materializing
/// the superoperator.
class GeneratorAction {
 public:
  explicit GeneratorAction(const LindbladModel& model);
  void apply(const CMat& rho, CMat& out) const;
  CMat apply(const CMat& rho) const;
  int dim() const { return dim_; }

 private:
  int dim_;
  SpCMat h_;
  std::vector<SpCMat> channels_;      // sqrt(mu_k) * sum_i u_ki A_i
  std::vector<SpCMat> channels_adj_;  // L_k^+
  std::vector<SpCMat> channel_sq_;    // L_k^+ L_k
  double rate_;
  mutable CMat scratch_;
};

struct EvolveOptions {
  int sample_stride = 1;   // record every sample_stride-th step
  int audit_stride = 1;    // eigenvalue audit every audit_stride-th step
  double positivity_floor = -1e-6;  // PositivityBreach below this
  double trace_tol = 1e-8;          // TraceDrift beyond this
};

struct EvolveResult {
  Vec times;
  std::vector<CMat> states;
  Vec trace_drift;       // |tr rho - 1| at sample times
  Vec min_eigenvalue;    // smallest eigenvalue at audited sample times
  double max_trace_drift = 0.0;  // over every step
  double min_eigenvalue_seen = 1.0;
};

/// Fixed-step classical RK4 on the master equation. Trace drift and the
/// smallest eigenvalue are recorded each step, never corrected; breaches
/// throw PositivityBreach / TraceDrift (a positivity breach signals a
/// too-large dt).
EvolveResult evolve(const LindbladModel& model, const DensityMatrix& rho0, double t_final,
                    double dt, const EvolveOptions& opts = {});

/// Unit-trace kernel state of the generator, Hermitized with eigenvalues
/// clamped at -1e-12. Throws DegenerateKernel (reporting the kernel
/// dimension) when the stationary subspace is larger than one.
DensityMatrix steady_state(const LindbladModel& model);

/// Full kernel basis of the vectorized generator (for callers that want the
/// degenerate stationary subspace).
std::vector<CMat> steady_kernel_basis(const LindbladModel& model);

/// <a_i> for a two-mode Fock-truncated state.
Eigen::Vector2cd mode_amplitudes(const CMat& rho, int n_fock);

/// Symmetrized quadrature covariance of a two-mode state in the order
/// (x1, p1, x2, p2) with x = (a + a^+)/sqrt(2), p = -i(a - a^+)/sqrt(2).
Mat quadrature_covariance(const CMat& rho, int n_fock);

/// Largest single-mode top-Fock-level occupation; the truncation audit
/// warns when this exceeds 1e-6.
double top_level_population(const CMat& rho, int n_fock);

}  // namespace oqsync
