#include "spinbus/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinbus/errors.hpp"

namespace spinbus {

namespace {

using Eigen::Index;

double residual_bound(double tol, double lambda) { return tol * std::max(1.0, std::abs(lambda)); }

struct Eigenpair {
  double value = 0.0;
  StateVector vector;
  double residual = 0.0;
};

/// One Krylov-Schur style pass: thick-restarted Lanczos with full
/// orthogonalization against its own basis and against `locked`.
class KrylovPass {
 public:
  KrylovPass(const HamiltonianOperator& op, const std::vector<StateVector>& locked, double tol,
             std::mt19937_64& rng, int& matvecs, int max_matvecs, double& best_residual)
      : op_(op),
        locked_(locked),
        tol_(tol),
        rng_(rng),
        matvecs_(matvecs),
        max_matvecs_(max_matvecs),
        best_residual_(best_residual) {}

  std::vector<Eigenpair> run(int want) {
    const Index n = op_.dim();
    const Index avail = n - static_cast<Index>(locked_.size());
    want = static_cast<int>(std::min<Index>(want, avail));
    if (want <= 0) return {};
    const Index mmax = std::min<Index>(avail, std::max<Index>(50, 3 * want + 20));
    const Index keep = std::min<Index>(mmax - 1, want + (mmax - want) / 2);

    V_.resize(n, mmax);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(mmax, mmax);
    Index m = 0;
    V_.col(0) = fresh_direction(m);
    m = 1;

    StateVector w(n);
    for (;;) {
      const Index j = m - 1;
      if (matvecs_ >= max_matvecs_)
        throw SolverError("Lanczos did not converge within " + std::to_string(max_matvecs_) +
                              " matrix applications (best residual " +
                              std::to_string(best_residual_) + ")",
                          best_residual_);
      op_.apply(StateVector(V_.col(j)), w);
      ++matvecs_;

      Eigen::VectorXd h = Eigen::VectorXd::Zero(m);
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd c = V_.leftCols(m).transpose() * w;
        w.noalias() -= V_.leftCols(m) * c;
        h += c;
        deflate_locked(w);
      }
      T.col(j).head(m) = h;
      T.row(j).head(m) = h.transpose();
      const double fnorm = w.norm();

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(T.topLeftCorner(m, m));
      const Eigen::VectorXd& theta = ritz.eigenvalues();
      const Eigen::MatrixXd& S = ritz.eigenvectors();
      const bool exhausted = (m == avail);

      if (m >= want) {
        bool converged = true;
        for (int i = 0; i < want; ++i) {
          const double est = fnorm * std::abs(S(m - 1, i));
          if (i == 0) best_residual_ = std::min(best_residual_, est);
          if (est > residual_bound(tol_, theta[i])) converged = false;
        }
        if (converged || exhausted) {
          std::vector<Eigenpair> out;
          bool verified = true;
          for (int i = 0; i < want; ++i) {
            Eigenpair p;
            p.value = theta[i];
            p.vector = V_.leftCols(m) * S.col(i);
            p.vector.normalize();
            const StateVector hv = op_ * p.vector;
            ++matvecs_;
            p.residual = (hv - p.value * p.vector).norm();
            if (p.residual > residual_bound(tol_, p.value)) verified = false;
            out.push_back(std::move(p));
          }
          if (verified || exhausted) return out;
        }
      }

      if (m < mmax) {
        if (fnorm > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
          V_.col(m) = w / fnorm;
        else
          V_.col(m) = fresh_direction(m);
        ++m;
        continue;
      }

      // Thick restart on the `keep` lowest Ritz vectors plus the residual direction.
      const Eigen::MatrixXd kept = V_.leftCols(m) * S.leftCols(keep);
      V_.leftCols(keep) = kept;
      T.setZero();
      T.diagonal().head(keep) = theta.head(keep);
      if (fnorm > 1e-10 * std::max(1.0, std::abs(theta[m - 1])))
        V_.col(keep) = w / fnorm;
      else
        V_.col(keep) = fresh_direction(keep);
      m = keep + 1;
    }
  }

 private:
  void deflate_locked(StateVector& w) const {
    for (const StateVector& l : locked_) w -= l.dot(w) * l;
  }

  StateVector fresh_direction(Index m) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 8; ++attempt) {
      StateVector r(op_.dim());
      for (Index i = 0; i < r.size(); ++i) r[i] = gauss(rng_);
      for (int pass = 0; pass < 2; ++pass) {
        if (m > 0) r.noalias() -= V_.leftCols(m) * (V_.leftCols(m).transpose() * r);
        deflate_locked(r);
      }
      const double nr = r.norm();
      if (nr > 1e-8) return r / nr;
    }
    throw SolverError("could not draw a start vector outside the current subspace", 0.0);
  }

  const HamiltonianOperator& op_;
  const std::vector<StateVector>& locked_;
  double tol_;
  std::mt19937_64& rng_;
  int& matvecs_;
  int max_matvecs_;
  double& best_residual_;
  Eigen::MatrixXd V_;
};

}  // namespace

SpectrumResult dense_spectrum(const HamiltonianOperator& op) {
  const Eigen::MatrixXd h = op.dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw SolverError("dense eigendecomposition failed", 0.0);
  SpectrumResult out;
  out.sector_sz = op.basis().total_sz();
  out.method = "dense";
  out.complete = true;
  const Eigen::MatrixXd resid = h * es.eigenvectors() - es.eigenvectors() * es.eigenvalues().asDiagonal();
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    out.eigenvalues.push_back(es.eigenvalues()[i]);
    out.eigenvectors.push_back(es.eigenvectors().col(i));
    out.residuals.push_back(resid.col(i).norm());
  }
  return out;
}

SpectrumResult lanczos_lowest(const HamiltonianOperator& op, int k, double tol, std::uint64_t seed,
                              int max_matvecs) {
  const Index n = op.dim();
  if (k < 1 || k > std::min<Index>(n, 20))
    throw InvalidArgument("k must be in [1, min(dim, 20)]");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be > 0");

  std::mt19937_64 rng(seed);
  int matvecs = 0;
  double best = std::numeric_limits<double>::infinity();
  std::vector<Eigenpair> found;
  std::vector<StateVector> locked;

  auto absorb = [&](std::vector<Eigenpair> pairs) {
    for (auto& p : pairs) {
      locked.push_back(p.vector);
      found.push_back(std::move(p));
    }
    std::sort(found.begin(), found.end(),
              [](const Eigenpair& a, const Eigenpair& b) { return a.value < b.value; });
  };

  absorb(KrylovPass(op, locked, tol, rng, matvecs, max_matvecs, best).run(k));
  // A single Krylov sequence sees one vector per eigenvalue; keep drawing
  // deflated starts until nothing new turns up below the k-th level.
  while (static_cast<Index>(locked.size()) < n) {
    const double kth = found[static_cast<std::size_t>(k) - 1].value;
    auto extra = KrylovPass(op, locked, tol, rng, matvecs, max_matvecs, best).run(1);
    if (extra.empty() || extra.front().value >= kth + 10.0 * residual_bound(tol, kth)) break;
    absorb(std::move(extra));
  }

  SpectrumResult out;
  out.sector_sz = op.basis().total_sz();
  out.method = "lanczos";
  out.seed = seed;
  out.matvecs = matvecs;
  out.complete = (k == n);
  for (int i = 0; i < k; ++i) {
    out.eigenvalues.push_back(found[i].value);
    out.eigenvectors.push_back(std::move(found[i].vector));
    out.residuals.push_back(found[i].residual);
  }
  return out;
}

SpectrumResult lowest_eigenpairs(const HamiltonianOperator& op, int k, const SolverOptions& opts) {
  const Index n = op.dim();
  k = static_cast<int>(std::clamp<Index>(k, 1, n));
  if (n <= std::min(opts.dense_limit, kDenseLimit)) {
    SpectrumResult full = dense_spectrum(op);
    full.seed = opts.seed;
    if (k < n) {
      full.eigenvalues.resize(k);
      full.eigenvectors.resize(k);
      full.residuals.resize(k);
      full.complete = false;
    }
    return full;
  }
  return lanczos_lowest(op, std::min(k, 20), opts.tol, opts.seed, opts.max_matvecs);
}

std::optional<double> MultipletAnalysis::spin_at(double energy) const {
  std::optional<double> spin;
  for (const Level& l : report.levels) {
    if (std::abs(l.energy - energy) > energy_tolerance) continue;
    if (spin && *spin != l.spin) return std::nullopt;
    spin = l.spin;
  }
  return spin;
}

namespace {

MultipletAnalysis analyze_once(const CouplingGraph& graph, const SolverOptions& opts,
                               double energy_scale, const std::vector<int>& ks) {
  const int n = graph.n_sites();
  const int base_twice = n % 2;
  const double etol = 1e-8 * energy_scale;

  MultipletAnalysis out;
  out.energy_tolerance = etol;
  for (std::size_t t = 0; t < ks.size(); ++t) {
    const int twice_sz = base_twice + 2 * static_cast<int>(t);
    if ((n + twice_sz) / 2 > n) break;
    HamiltonianOperator op = make_operator(graph, twice_sz);
    if (t == 0) out.base_basis = op.basis_ptr();
    SolverOptions o = opts;
    o.seed = opts.seed + t;
    out.sectors.push_back(lowest_eigenpairs(op, ks[t], o));
    out.report.matvecs += out.sectors.back().matvecs;
  }

  auto horizon = [&](std::size_t t) {
    if (t >= out.sectors.size() || out.sectors[t].complete)
      return std::numeric_limits<double>::infinity();
    return out.sectors[t].eigenvalues.back();
  };
  auto count_at = [&](std::size_t t, double e) {
    if (t >= out.sectors.size()) return 0;
    return static_cast<int>(std::count_if(
        out.sectors[t].eigenvalues.begin(), out.sectors[t].eigenvalues.end(),
        [&](double x) { return std::abs(x - e) <= etol; }));
  };

  const SpectrumResult& base = out.sectors.front();
  std::size_t i = 0;
  while (i < base.size()) {
    std::size_t end = i + 1;
    while (end < base.size() && base.eigenvalues[end] - base.eigenvalues[end - 1] <= etol) ++end;
    double energy = 0.0;
    for (std::size_t q = i; q < end; ++q) energy += base.eigenvalues[q];
    energy /= static_cast<double>(end - i);

    bool reliable = true;
    for (std::size_t t = 0; t < out.sectors.size(); ++t)
      if (!(energy < horizon(t) - etol)) reliable = false;
    if (!reliable) break;

    std::vector<int> counts;
    for (std::size_t t = 0; t <= out.sectors.size(); ++t) counts.push_back(count_at(t, energy));
    double casimir_expected = 0.0;
    std::vector<Level> group;
    for (std::size_t t = 0; t < out.sectors.size(); ++t) {
      const int multiplets = counts[t] - counts[t + 1];
      if (multiplets < 0)
        throw AmbiguousMultiplet("level near E=" + std::to_string(energy) +
                                 " has more copies at higher |S^z| than at lower");
      const double spin = 0.5 * (base_twice + 2 * static_cast<int>(t));
      for (int c = 0; c < multiplets; ++c) {
        group.push_back({energy, spin, static_cast<int>(std::lround(2 * spin + 1))});
        casimir_expected += spin * (spin + 1.0);
      }
    }
    double casimir = 0.0;
    for (std::size_t q = i; q < end; ++q)
      casimir += total_spin_squared(base.eigenvectors[q], *out.base_basis);
    if (std::abs(casimir - casimir_expected) > 1e-6 * std::max<double>(1.0, casimir_expected))
      throw AmbiguousMultiplet("Casimir trace " + std::to_string(casimir) +
                               " disagrees with degeneracy count " +
                               std::to_string(casimir_expected) + " near E=" +
                               std::to_string(energy));
    out.report.levels.insert(out.report.levels.end(), group.begin(), group.end());
    i = end;
  }
  return out;
}

}  // namespace

MultipletAnalysis analyze_multiplets(const CouplingGraph& graph, const SolverOptions& opts,
                                     double energy_scale) {
  std::vector<int> ks = {4, 3, 2};
  for (int attempt = 0;; ++attempt) {
    MultipletAnalysis a = analyze_once(graph, opts, energy_scale, ks);
    auto& levels = a.report.levels;
    const bool resolved =
        !levels.empty() && std::any_of(levels.begin(), levels.end(), [&](const Level& l) {
          return l.energy > levels.front().energy + a.energy_tolerance;
        });
    const bool all_complete = std::all_of(a.sectors.begin(), a.sectors.end(),
                                          [](const SpectrumResult& s) { return s.complete; });
    if (resolved) {
      MultipletReport& r = a.report;
      r.ground_energy = levels.front().energy;
      r.ground_spin = levels.front().spin;
      for (const Level& l : levels)
        if (l.energy > r.ground_energy + a.energy_tolerance) {
          r.gap = l.energy - r.ground_energy;
          r.first_excited_spin = l.spin;
          break;
        }
      return a;
    }
    if (all_complete || attempt >= 2) {
      if (!levels.empty() && all_complete) {
        // Single multiplet spectrum (e.g. two sites with one bond removed).
        a.report.ground_energy = levels.front().energy;
        a.report.ground_spin = levels.front().spin;
        a.report.gap = 0.0;
        return a;
      }
      throw SolverError("first excited multiplet could not be resolved", 0.0);
    }
    for (int& k : ks) k *= 2;
  }
}

MultipletReport ground_multiplet(const CouplingGraph& graph, const SolverOptions& opts,
                                 double energy_scale) {
  return analyze_multiplets(graph, opts, energy_scale).report;
}

MultipletReport ground_multiplet(const LadderSpec& spec, const SolverOptions& opts) {
  return ground_multiplet(attach_qubits(spec), opts, spec.j_medium);
}

}  // namespace spinbus
