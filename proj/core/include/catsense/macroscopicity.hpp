#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "catsense/linalg.hpp"
#include "catsense/states.hpp"

namespace catsense {

/// Eigendecomposition of D = [A, [A, rho]] (Hermitian, traceless). The
/// returned pairs live in the computational basis. Dense O(8^N) path.
EighResult double_commutator_spectrum(const DensityMatrix& rho, const AdditiveObservable& a);

/// Same spectrum restricted to the invariant subspace
/// span{v, Av, A^2 v : v in the low-rank decomposition}. Returns only the
/// eigenpairs living there (everything orthogonal has eigenvalue 0); the
/// identity component of the state drops out of the commutator.
EighResult double_commutator_spectrum_low_rank(const LowRankState& state,
                                               const AdditiveObservable& a);

/// The D operator itself, in the computational basis.
Matrix double_commutator_operator(const DensityMatrix& rho, const AdditiveObservable& a);

/// Cutoff separating genuine positive eigenvalues from the numerical zeros
/// that straddle the traceless spectrum: dim * eps * max|e|.
double positive_cutoff(const EighResult& spectrum, Eigen::Index dim);

double positive_eigensum(const EighResult& spectrum, double cutoff);

/// Projector onto the span of eigenvectors of [A, [A, rho]] with eigenvalue
/// above the positive cutoff. The zero projector is valid output.
Projector optimal_eta(const DensityMatrix& rho, const AdditiveObservable& a);
Projector optimal_eta_from_spectrum(const EighResult& spectrum, Eigen::Index dim);

/// Tr(rho [A, [A, eta]]). Throws NumericalError if the imaginary residual
/// exceeds tol (signals non-Hermitian inputs).
double cat_value(const DensityMatrix& rho, const AdditiveObservable& a, const Projector& eta,
                 double tol = 1e-8);

struct CatDiagnostic {
  std::string state_label;
  std::string observable_label;
  int n_sites = 0;
  double positive_eigensum = 0.0;
  double cat_value = 0.0;
  Eigen::Index eta_rank = 0;

  nlohmann::json to_json() const;
};

CatDiagnostic diagnose(const DensityMatrix& rho, const AdditiveObservable& a,
                       const std::string& state_label, const std::string& observable_label);
CatDiagnostic diagnose_low_rank(const LowRankState& state, const AdditiveObservable& a,
                                const std::string& state_label,
                                const std::string& observable_label);

/// Least-squares fit of log(max(N, value)) against log N; the clamp at N is
/// part of the index definition.
struct QFit {
  std::vector<int> n_values;
  std::vector<double> values;  // clamped at N
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  nlohmann::json to_json() const;
};

QFit q_fit(const std::vector<int>& n_values, const std::vector<double>& positive_eigensums);

}  // namespace catsense
