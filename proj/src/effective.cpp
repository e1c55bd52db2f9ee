#include "spinbus/effective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spinbus/errors.hpp"

namespace spinbus {

namespace {

/// S^z_site applied to v (diagonal in the product basis).
StateVector apply_sz(const StateVector& v, const SectorBasis& basis, int site) {
  StateVector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out[i] = (((basis[static_cast<std::size_t>(i)] >> site) & 1u) ? 0.5 : -0.5) * v[i];
  return out;
}

void check_sites(const CouplingGraph& medium, int l, int r) {
  if (l < 0 || r < 0 || l >= medium.n_sites() || r >= medium.n_sites())
    throw InvalidArgument("probe site outside the medium");
}

struct CgResult {
  StateVector x;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves (H - e_g) x = rhs on the complement of `ground` by projected CG;
/// the shifted operator is positive definite there.
CgResult solve_projected(const HamiltonianOperator& op, double e_g,
                         const std::vector<StateVector>& ground, const StateVector& rhs,
                         double tol, int max_iterations, int& matvecs) {
  auto project = [&](StateVector& v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const StateVector& g : ground) v -= g.dot(v) * g;
  };
  StateVector b = rhs;
  project(b);
  const double bnorm = b.norm();
  CgResult out;
  out.x = StateVector::Zero(b.size());
  if (bnorm == 0.0) return out;

  StateVector r = b;
  StateVector p = r;
  StateVector ap(b.size());
  double rr = r.squaredNorm();
  for (int it = 1; it <= max_iterations; ++it) {
    op.apply(p, ap);
    ++matvecs;
    ap -= e_g * p;
    project(ap);
    const double pap = p.dot(ap);
    if (!(pap > 0.0))
      throw SolverError("resolvent system is not positive on the deflated space; the ground "
                        "multiplet was not fully removed (p.Ap = " + std::to_string(pap) + ")",
                        std::sqrt(rr) / bnorm);
    const double alpha = rr / pap;
    out.x += alpha * p;
    r -= alpha * ap;
    const double rr_new = r.squaredNorm();
    out.iterations = it;
    out.residual = std::sqrt(rr_new) / bnorm;
    if (out.residual <= tol) {
      project(out.x);
      return out;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  throw SolverError("resolvent solve stagnated after " + std::to_string(max_iterations) +
                        " iterations",
                    out.residual);
}

PerturbationResult from_contractions(double t_lr, double t_ll, double t_rr, double j_probe,
                                     JeffMethod method) {
  PerturbationResult out;
  out.t_lr = t_lr;
  out.t_ll = t_ll;
  out.t_rr = t_rr;
  out.j_eff = 2.0 * j_probe * j_probe * t_lr;
  out.epsilon = 0.75 * j_probe * j_probe * (t_ll + t_rr);
  out.method = method;
  return out;
}

}  // namespace

std::string to_string(JeffMethod m) {
  switch (m) {
    case JeffMethod::SumOverStates: return "sum-over-states";
    case JeffMethod::Resolvent: return "resolvent";
    case JeffMethod::GapSplitting: return "gap-splitting";
  }
  return "unknown";
}

PerturbationResult jeff_sum_over_states(const CouplingGraph& medium, int site_l, int site_r,
                                        double j_probe, double energy_scale) {
  check_sites(medium, site_l, site_r);
  const HamiltonianOperator op = make_operator(medium, medium.n_sites() % 2);
  if (op.dim() > kDenseLimit)
    throw InvalidArgument("medium sector too large for the sum-over-states route (dim " +
                          std::to_string(op.dim()) + "); use jeff_resolvent");
  const SpectrumResult spec = dense_spectrum(op);
  const double etol = 1e-8 * energy_scale;
  const double e_g = spec.eigenvalues.front();
  const StateVector& g = spec.eigenvectors.front();
  const StateVector lg = apply_sz(g, op.basis(), site_l);
  const StateVector rg = apply_sz(g, op.basis(), site_r);

  double t_lr = 0.0, t_ll = 0.0, t_rr = 0.0;
  for (std::size_t a = 1; a < spec.size(); ++a) {
    const double e_a = spec.eigenvalues[a];
    if (e_a - e_g <= etol) continue;
    const double l = spec.eigenvectors[a].dot(lg);
    const double r = spec.eigenvectors[a].dot(rg);
    const double denom = e_g - e_a;
    t_lr += l * r / denom;
    t_ll += l * l / denom;
    t_rr += r * r / denom;
  }
  return from_contractions(t_lr, t_ll, t_rr, j_probe, JeffMethod::SumOverStates);
}

PerturbationResult jeff_sum_over_states(const LadderSpec& spec) {
  const ProbeSites p = probe_sites(spec);
  return jeff_sum_over_states(medium_graph(spec), p.site_l, p.site_r, spec.j_probe,
                              spec.j_medium);
}

PerturbationResult jeff_resolvent(const CouplingGraph& medium, int site_l, int site_r,
                                  double j_probe, double energy_scale, double solver_tol,
                                  const SolverOptions& eigen_opts, int max_iterations) {
  check_sites(medium, site_l, site_r);
  if (!(solver_tol > 0.0)) throw InvalidArgument("solver_tol must be > 0");
  const HamiltonianOperator op = make_operator(medium, medium.n_sites() % 2);
  const double etol = 1e-8 * energy_scale;

  // Ground multiplet inside the sector; widen the request until a level
  // above it shows up.
  const int dim = static_cast<int>(op.dim());
  SpectrumResult low;
  std::vector<StateVector> ground;
  for (int k = std::min(dim, 3);; k = std::min(dim, 2 * k)) {
    low = lanczos_lowest(op, std::min(k, 20), eigen_opts.tol, eigen_opts.seed,
                         eigen_opts.max_matvecs);
    ground.clear();
    for (std::size_t i = 0; i < low.size(); ++i)
      if (low.eigenvalues[i] - low.eigenvalues.front() <= etol) ground.push_back(low.eigenvectors[i]);
    if (ground.size() < low.size() || low.complete) break;
    if (k >= 20)
      throw SolverError("ground multiplet larger than 20 states; cannot deflate", 0.0);
  }
  const double e_g = low.eigenvalues.front();
  const StateVector& g = ground.front();

  PerturbationResult out;
  out.matvecs = low.matvecs;
  const StateVector lg = apply_sz(g, op.basis(), site_l);
  const StateVector rg = apply_sz(g, op.basis(), site_r);

  int matvecs = 0;
  // x_k = (E_g - H)^-1 Q S^z_k |g>  <=>  (H - E_g) x_k = -Q S^z_k |g>.
  const CgResult xr = solve_projected(op, e_g, ground, -rg, solver_tol, max_iterations, matvecs);
  CgResult xl = xr;
  if (site_l != site_r)
    xl = solve_projected(op, e_g, ground, -lg, solver_tol, max_iterations, matvecs);

  out = from_contractions(lg.dot(xr.x), lg.dot(xl.x), rg.dot(xr.x), j_probe,
                          JeffMethod::Resolvent);
  out.iterations = xr.iterations + (site_l != site_r ? xl.iterations : 0);
  out.residual = std::max(xr.residual, xl.residual);
  out.matvecs = low.matvecs + matvecs;
  return out;
}

PerturbationResult jeff_resolvent(const LadderSpec& spec, double solver_tol,
                                  const SolverOptions& eigen_opts) {
  const ProbeSites p = probe_sites(spec);
  return jeff_resolvent(medium_graph(spec), p.site_l, p.site_r, spec.j_probe, spec.j_medium,
                        solver_tol, eigen_opts);
}

PerturbationResult jeff_gap_splitting(const LadderSpec& spec, const SolverOptions& opts) {
  const MultipletAnalysis a = analyze_multiplets(attach_qubits(spec), opts, spec.j_medium);
  const double inf = std::numeric_limits<double>::infinity();
  double e_singlet = inf, e_triplet = inf;
  for (const Level& l : a.report.levels) {
    if (l.spin == 0.0) e_singlet = std::min(e_singlet, l.energy);
    if (l.spin == 1.0) e_triplet = std::min(e_triplet, l.energy);
  }
  if (e_singlet == inf || e_triplet == inf)
    throw SolverError("lowest singlet and triplet were not both resolved", 0.0);
  PerturbationResult out;
  out.method = JeffMethod::GapSplitting;
  out.j_eff = e_triplet - e_singlet;
  out.matvecs = a.report.matvecs;
  return out;
}

EffectiveHamiltonian build_effective_hamiltonian(double j_eff, double epsilon) {
  if (!std::isfinite(j_eff) || !std::isfinite(epsilon))
    throw InvalidArgument("effective couplings must be finite");
  EffectiveHamiltonian h;
  h.j_eff = j_eff;
  h.epsilon = epsilon;
  h.matrix.diagonal() << 0.25, 0.25, 0.25, -0.75;
  h.matrix *= j_eff;
  h.matrix += epsilon * Eigen::Matrix4d::Identity();
  return h;
}

}  // namespace spinbus
