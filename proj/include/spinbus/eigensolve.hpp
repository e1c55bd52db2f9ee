#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spinbus/hamiltonian.hpp"
#include "spinbus/model.hpp"

namespace spinbus {

struct SolverOptions {
  /// Residual contract: |Hv - lambda v| <= tol * max(1, |lambda|).
  double tol = 1e-10;
  /// Budget of operator applications per lanczos_lowest call.
  int max_matvecs = 5000;
  std::uint64_t seed = 20040101;
  /// Sectors up to this dimension are diagonalized densely (at most
  /// kDenseLimit). Dense cost grows as dim^3, so the default stays well below.
  Eigen::Index dense_limit = 1024;
};

/// Lowest eigenpairs of one S^z sector, eigenvalues ascending.
struct SpectrumResult {
  double sector_sz = 0.0;
  std::vector<double> eigenvalues;
  std::vector<StateVector> eigenvectors;
  /// True residual norms |Hv - lambda v|.
  std::vector<double> residuals;
  std::string method;
  std::uint64_t seed = 0;
  int matvecs = 0;
  /// True when every eigenvalue of the sector is present.
  bool complete = false;

  std::size_t size() const { return eigenvalues.size(); }
};

/// Full spectrum of a sector of dimension <= kDenseLimit.
SpectrumResult dense_spectrum(const HamiltonianOperator& op);

/// k lowest eigenpairs (1 <= k <= min(dim, 20)) by thick-restart Lanczos
/// with full reorthogonalization. Degenerate levels are recovered by extra
/// passes from fresh random vectors deflated against the converged ones.
/// Throws SolverError with the best residual when the budget runs out.
SpectrumResult lanczos_lowest(const HamiltonianOperator& op, int k, double tol,
                              std::uint64_t seed, int max_matvecs = 5000);

/// Dense below opts.dense_limit, Lanczos above; k is clamped to the dimension.
SpectrumResult lowest_eigenpairs(const HamiltonianOperator& op, int k, const SolverOptions& opts);

struct Level {
  double energy = 0.0;
  double spin = 0.0;
  int degeneracy = 1;
};

struct MultipletReport {
  double ground_energy = 0.0;
  double ground_spin = 0.0;
  /// Energy of the first level above the ground multiplet minus the ground energy.
  double gap = 0.0;
  /// Spin of the first excited multiplet.
  double first_excited_spin = 0.0;
  /// Labeled levels, ascending in energy; only levels every sector resolves.
  std::vector<Level> levels;
  int matvecs = 0;
};

/// Sector spectra together with their multiplet labels.
struct MultipletAnalysis {
  MultipletReport report;
  /// Sector spectra in order of increasing S^z starting at the lowest |S^z|.
  std::vector<SpectrumResult> sectors;
  std::shared_ptr<const SectorBasis> base_basis;
  double energy_tolerance = 0.0;

  /// Spin of the multiplet at `energy`; nullopt when unlabeled or when
  /// several spins share that energy.
  std::optional<double> spin_at(double energy) const;
};

/// Solves the three lowest |S^z| sectors and labels levels by total spin from
/// cross-sector degeneracy (|dE| <= 1e-8 * energy_scale), confirmed by the
/// S^2 Casimir. Throws AmbiguousMultiplet when the two disagree.
MultipletAnalysis analyze_multiplets(const CouplingGraph& graph, const SolverOptions& opts,
                                     double energy_scale);

MultipletReport ground_multiplet(const CouplingGraph& graph, const SolverOptions& opts,
                                 double energy_scale);

/// Full ladder-plus-qubits system; energy scale is spec.j_medium.
MultipletReport ground_multiplet(const LadderSpec& spec, const SolverOptions& opts = {});

}  // namespace spinbus
