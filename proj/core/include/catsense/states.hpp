#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "catsense/linalg.hpp"

namespace catsense {

/// Spin-label convention: |0> = |up> with sigma_z |0> = +|0>. The total-
/// magnetization eigenvalue of a basis index is N - 2 * popcount(index).
int mz_eigenvalue(std::uint64_t basis_index, int n_sites);

/// (|0...0> + |1...1>) / sqrt(2)
PureState ghz(int n_sites);

/// Equal-amplitude superposition of the N+1 domain-wall strings
/// |up>^k |down>^(N-k), k = 0..N.
PureState staircase(int n_sites);

/// Uniform rank-N mixture of the one-spin-flipped cat states
/// (|down..up_l..down> + |up..down_l..up>) / sqrt(2). Requires N >= 3
/// (the flipped states degenerate below that).
DensityMatrix rho_ex(int n_sites);

/// |+>^N
PureState product_plus(int n_sites);

/// Product state with every spin along (theta, phi) on the Bloch sphere.
PureState product_polarized(int n_sites, double theta, double phi);

/// Product Gibbs state (x)_l exp(b sigma_x) / (2 cosh b); per-site
/// polarization <sigma_x> = tanh(b). b is the dimensionless Zeeman weight.
DensityMatrix thermal_x(int n_sites, double b);

/// b = beta * omega_prep / 2 from physical units (angular frequencies or any
/// consistent pair): b = zeeman / (2 * thermal).
double thermal_weight_b(double zeeman_frequency, double thermal_frequency);

/// eta_M rho_th eta_M / Tr(eta_M rho_th) for the M_z = sector_m subspace.
/// Throws std::domain_error if the sector has no thermal weight.
DensityMatrix mz_projected_thermal(int n_sites, double b, int sector_m,
                                   double weight_tol = 1e-14);

/// w * cat + (1 - w) * sep. Throws std::invalid_argument unless 0 <= w <= 1
/// and dimensions match.
DensityMatrix mixture(double w, const DensityMatrix& cat, const DensityMatrix& sep);

/// Diagonal projector onto the M_z = sector_m subspace;
/// rank C(N, (N - M) / 2). Throws std::invalid_argument on an invalid sector
/// (|M| > N or parity mismatch).
Projector hamming_projector(int n_sites, int sector_m);

/// Projector onto the strictly positive eigenspace of an additive
/// observable (e.g. the majority readout "total M_y > 0").
Projector positive_half_projector(const AdditiveObservable& a);

enum class StateKind {
  Ghz,
  Staircase,
  RhoEx,
  ProductPlus,
  ProductPolarized,
  ThermalX,
  MzProjectedThermal,
  Mixture,
};

std::string to_string(StateKind kind);
StateKind state_kind_from_string(const std::string& name);
bool is_pure_kind(StateKind kind);

/// Serializable description of a factory state:
/// {"kind": "...", "n": int, "params": {...}}.
struct StateSpec {
  StateKind kind = StateKind::Ghz;
  int n_sites = 1;
  nlohmann::json params = nlohmann::json::object();

  static StateSpec make_ghz(int n);
  static StateSpec make_staircase(int n);
  static StateSpec make_rho_ex(int n);
  static StateSpec make_product_plus(int n);
  static StateSpec make_product_polarized(int n, double theta, double phi);
  static StateSpec make_thermal_x(int n, double b);
  static StateSpec make_mz_projected_thermal(int n, double b, int sector_m);
  static StateSpec make_mixture(double w, const StateSpec& cat, const StateSpec& sep);

  nlohmann::json to_json() const;
  static StateSpec from_json(const nlohmann::json& j);
};

PureState make_pure(const StateSpec& spec);
DensityMatrix make_density(const StateSpec& spec);

/// rho = sum_i weights[i] |vectors[i]><vectors[i]| + identity_weight * I/2^N.
/// Lets the macroscopicity diagnostics run in a small invariant subspace
/// instead of a dense 4^N eigenproblem.
struct LowRankState {
  int n_sites = 0;
  std::vector<Vector> vectors;
  std::vector<double> weights;
  double identity_weight = 0.0;
};

/// Low-rank form for the kinds that have one (pure kinds, rho_ex, and
/// mixtures thereof, with thermal_x(b=0) contributing the identity part).
std::optional<LowRankState> low_rank_decomposition(const StateSpec& spec);

}  // namespace catsense
