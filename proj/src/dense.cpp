#include "pintoc/dense.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "pintoc/spatial.hpp"
#include "pintoc/temporal.hpp"

namespace pintoc {

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

DenseOperatorSet build_dense(int N, int m, double gamma, double alpha,
                             const std::optional<Eigen::VectorXd>& mask,
                             double T_final) {
  if (static_cast<long>(N) * m * m > 4096)
    throw std::invalid_argument("build_dense: N * m^2 exceeds the 4096 cap");
  DenseOperatorSet set;
  set.N = N;
  set.m = m;
  set.gamma = gamma;
  set.alpha = alpha;
  set.T_final = T_final;
  set.tau = T_final / N;
  set.eta = gamma / set.tau;
  set.mask = mask;

  const TemporalSymbol q = b_symbol(N);
  set.B = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j <= i; ++j) set.B(i, j) = q.coeffs[i - j];

  set.Btilde = Eigen::MatrixXd::Zero(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) set.Btilde(i, j) = q.coeffs[N - (j - i)];
  set.Balpha = set.B + alpha * set.Btilde;

  const SpatialGrid grid(m);
  set.L = SpatialOperator::constant_coefficient(grid, 1.0).dense();

  const int J = grid.J;
  const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(N, N);
  const Eigen::MatrixXd Ij = Eigen::MatrixXd::Identity(J, J);
  set.G = 2.0 * kron(set.B, Ij) + set.tau * kron(In, set.L);

  Eigen::MatrixXd M = Ij;
  if (mask) {
    if (mask->size() != J) throw std::invalid_argument("build_dense: mask length mismatch");
    M = mask->asDiagonal();
  }
  set.K = set.tau * kron(In, M) + set.eta * set.G * set.G.transpose();

  const double st = std::sqrt(set.tau);
  const double se = std::sqrt(set.eta);
  set.R = kron(st * In + 2.0 * se * set.B, Ij) + set.tau * se * kron(In, set.L);
  set.Ralpha = kron(st * In + 2.0 * se * set.Balpha, Ij) + set.tau * se * kron(In, set.L);
  set.P = set.R * set.R.transpose();
  set.Palpha = set.Ralpha * set.Ralpha.transpose();
  return set;
}

SpectrumReport check_spectrum(const Eigen::MatrixXd& precond,
                              const Eigen::MatrixXd& target, double lo, double hi) {
  auto require_spd = [](const Eigen::MatrixXd& A, const char* name) {
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
      throw std::invalid_argument(std::string("check_spectrum: ") + name + " not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument(std::string("check_spectrum: ") + name +
                                  " not positive definite");
  };
  require_spd(precond, "preconditioner");
  require_spd(target, "target");

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(target, precond);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("check_spectrum: eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();

  SpectrumReport rep;
  rep.min_eig = ev.minCoeff();
  rep.max_eig = ev.maxCoeff();
  constexpr double slack = 1e-10;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] < lo - slack || ev[i] > hi + slack) ++rep.violations;
  rep.pass = rep.violations == 0;
  return rep;
}

bool IdentityReport::all_pass() const {
  return std::all_of(items.begin(), items.end(), [](const Item& it) { return it.pass; });
}

IdentityReport structural_identities(const DenseOperatorSet& set) {
  IdentityReport rep;
  const int N = set.N;
  auto add = [&](const std::string& name, double dev, double tol) {
    rep.items.push_back({name, dev, dev <= tol});
  };

  // B + B^T = 2 Dhat 1 1^T Dhat with Dhat = diag((-1)^k).
  Eigen::VectorXd dhat(N);
  for (int k = 0; k < N; ++k) dhat[k] = ((k + 1) % 2 == 0) ? 1.0 : -1.0;
  const Eigen::MatrixXd rank1 = 2.0 * (dhat * dhat.transpose());
  const Eigen::MatrixXd BpBt = set.B + set.B.transpose();
  add("b_plus_bt_rank1", (BpBt - rank1).cwiseAbs().maxCoeff(), 1e-11);

  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(BpBt);
    Eigen::VectorXd ev = es.eigenvalues();
    double dev = std::abs(ev[N - 1] - 2.0 * N);
    for (int k = 0; k + 1 < N; ++k) dev = std::max(dev, std::abs(ev[k]));
    add("b_plus_bt_eigenvalues", dev, 1e-12 * std::max(1, 2 * N));
  }

  // ||Btilde Btilde^T||_1 = 2 N (N-1) and ||.||_2 <= 2 T^2 / tau^2.
  const Eigen::MatrixXd BBt = set.Btilde * set.Btilde.transpose();
  const double one_norm = BBt.cwiseAbs().colwise().sum().maxCoeff();
  add("btilde_one_norm", std::abs(one_norm - 2.0 * N * (N - 1)), 1e-11 * N * N);
  {
    const double two_norm =
        N > 0 ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(BBt)
                    .eigenvalues()
                    .cwiseAbs()
                    .maxCoeff()
              : 0.0;
    const double bound = 2.0 * set.T_final * set.T_final / (set.tau * set.tau);
    add("btilde_two_norm_bound", std::max(0.0, two_norm - bound), 0.0);
  }

  // K = (tau I + 4 eta B B^T) (x) I + 2 eta tau (B + B^T) (x) L
  //     + tau^2 eta I (x) L^2   (unmasked form).
  if (!set.mask) {
    const int J = set.m * set.m;
    const Eigen::MatrixXd In = Eigen::MatrixXd::Identity(N, N);
    const Eigen::MatrixXd Ij = Eigen::MatrixXd::Identity(J, J);
    const Eigen::MatrixXd expanded =
        kron(set.tau * In + 4.0 * set.eta * set.B * set.B.transpose(), Ij) +
        2.0 * set.eta * set.tau * kron(BpBt, set.L) +
        set.tau * set.tau * set.eta * kron(In, set.L * set.L);
    const double scale = std::max(1.0, set.K.cwiseAbs().maxCoeff());
    add("k_expansion", (set.K - expanded).cwiseAbs().maxCoeff() / scale, 1e-10);
  }

  // Symmetric part of B_alpha: one eigenvalue N[1 + a(-1)^N] - a(-1)^N,
  // the rest -a(-1)^N.
  {
    const double sgn = (N % 2 == 0) ? 1.0 : -1.0;
    const double big = N * (1.0 + set.alpha * sgn) - set.alpha * sgn;
    const double small = -set.alpha * sgn;
    Eigen::MatrixXd H = 0.5 * (set.Balpha + set.Balpha.transpose());
    Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues();
    std::vector<double> expected(static_cast<std::size_t>(N), small);
    expected.back() = big;
    std::sort(expected.begin(), expected.end());
    double dev = 0.0;
    for (int k = 0; k < N; ++k) dev = std::max(dev, std::abs(ev[k] - expected[k]));
    add("h_balpha_spectrum", dev, 1e-12 * std::max(1, 2 * N));
  }

  // B_alpha = D^{-1} F Lambda F^* D.
  {
    const AlphaCirculantFactor fac = alpha_circulant_eigs(b_symbol(N), set.alpha);
    Eigen::MatrixXcd F(N, N);
    const std::complex<double> two_pi_i(0.0, 2.0 * M_PI / N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        F(i, j) = std::exp(two_pi_i * static_cast<double>(i * j)) / std::sqrt(double(N));
    Eigen::MatrixXcd D = fac.d_scale.cast<std::complex<double>>().asDiagonal();
    // Compare in the similarity frame D B_alpha D^{-1} = F Lambda F^*, where
    // both sides have O(1) entries; multiplying through by D^{-1} on the left
    // would amplify roundoff by the 1/alpha conditioning of the scaling.
    const Eigen::MatrixXcd lhs =
        D * set.Balpha.cast<std::complex<double>>() * D.inverse();
    const Eigen::MatrixXcd rhs = F * fac.eigs.asDiagonal() * F.adjoint();
    add("balpha_reconstruction", (lhs - rhs).cwiseAbs().maxCoeff(), 1e-11);
  }

  return rep;
}

std::vector<VerificationRecord> run_verification_grid() {
  const int Ns[] = {2, 3, 4, 8, 16};
  const int ms[] = {1, 3, 7};
  const double gammas[] = {1e-6, 1e-2, 1.0, 10.0};
  std::vector<VerificationRecord> records;
  for (int N : Ns) {
    for (int m : ms) {
      for (double gamma : gammas) {
        const double tau = 1.0 / N;
        const double alpha = choose_alpha(tau, gamma, 1.0);
        const DenseOperatorSet set = build_dense(N, m, gamma, alpha);
        auto emit = [&](const char* check, const Eigen::MatrixXd& precond,
                        const Eigen::MatrixXd& target, double lo, double hi) {
          const SpectrumReport rep = check_spectrum(precond, target, lo, hi);
          records.push_back({N, m, gamma, alpha, check, rep.min_eig, rep.max_eig, lo,
                             hi, rep.pass});
        };
        emit("p_inv_k", set.P, set.K, 0.5, 1.0);
        emit("palpha_inv_p", set.Palpha, set.P, 0.75, 1.5);
        emit("palpha_inv_k", set.Palpha, set.K, 0.375, 1.5);
      }
    }
  }
  return records;
}

}  // namespace pintoc
