#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

namespace pintoc {

/// Desk-scale dense assemblies of every operator, for verification only.
/// Dimension N * m^2 is capped at 4096.
struct DenseOperatorSet {
  int N = 0, m = 0;
  double gamma = 0.0, alpha = 0.0, T_final = 1.0, tau = 0.0, eta = 0.0;
  std::optional<Eigen::VectorXd> mask;
  Eigen::MatrixXd B, Btilde, Balpha, L, G, K, R, Ralpha, P, Palpha;
};

DenseOperatorSet build_dense(int N, int m, double gamma, double alpha,
                             const std::optional<Eigen::VectorXd>& mask = {},
                             double T_final = 1.0);

Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

struct SpectrumReport {
  double min_eig = 0.0, max_eig = 0.0;
  int violations = 0;
  bool pass = false;
};

/// Generalized eigenvalues of (target, precond), i.e. the spectrum of
/// precond^{-1} target, via Cholesky-based symmetric-definite reduction.
/// Reports violations of [lo - 1e-10, hi + 1e-10].
SpectrumReport check_spectrum(const Eigen::MatrixXd& precond,
                              const Eigen::MatrixXd& target, double lo, double hi);

struct IdentityReport {
  struct Item {
    std::string name;
    double deviation = 0.0;
    bool pass = false;
  };
  std::vector<Item> items;
  bool all_pass() const;
};

/// Verifies the rank-1 form of B + B^T, the norm identities for
/// Btilde Btilde^T, the Kronecker expansion of K, the closed-form spectrum
/// of the symmetric part of B_alpha, and the circulant reconstruction of
/// B_alpha.
IdentityReport structural_identities(const DenseOperatorSet& set);

struct VerificationRecord {
  int N = 0, m = 0;
  double gamma = 0.0, alpha = 0.0;
  std::string check;
  double min_eig = 0.0, max_eig = 0.0, lo = 0.0, hi = 0.0;
  bool pass = false;
};

/// Spectral-bound verification over the full grid
/// N in {2,3,4,8,16}, m in {1,3,7}, gamma in {1e-6,1e-2,1,10}, alpha chosen
/// by the selection rule: spectra of P^{-1}K, P_alpha^{-1}P, P_alpha^{-1}K.
std::vector<VerificationRecord> run_verification_grid();

}  // namespace pintoc
