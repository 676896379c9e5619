#include "bmfl/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "bmfl/hartree.hpp"
#include "bmfl/rdm.hpp"
#include "bmfl/rng.hpp"

namespace bmfl {

namespace {

using nlohmann::json;

constexpr Eigen::Index kDenseLimit = 512;

std::uint64_t solver_seed(const ModelSpec& model, int particles,
                          const char* tag) {
  const std::string key =
      model.source_hash + ":" + std::to_string(particles) + ":" + tag;
  return fnv1a(key.data(), key.size());
}

struct EigPair {
  double theta0 = 0.0;
  double theta1 = 0.0;
  VecC vector;
  double residual = 0.0;
  int cycles = 0;
  bool dense = true;
};

double residual_norm(const SparseC& H, const VecC& x, double theta) {
  return (H * x - theta * x).norm();
}

EigPair dense_lowest(const SparseC& H) {
  const MatC Hd(H);
  Eigen::SelfAdjointEigenSolver<MatC> es(Hd);
  EigPair out;
  out.theta0 = es.eigenvalues()(0);
  out.theta1 = H.rows() > 1 ? es.eigenvalues()(1) : out.theta0;
  out.vector = es.eigenvectors().col(0);
  out.residual = residual_norm(H, out.vector, out.theta0);
  return out;
}

// Restarted Lanczos with full reorthogonalization.  The start vector is a
// seeded Gaussian, so the whole run is reproducible; restarting from the
// best Ritz vector keeps the memory at one dense block of `m + 1` columns.
EigPair lanczos_lowest(const SparseC& H, std::uint64_t seed) {
  const Eigen::Index dim = H.rows();
  const int m =
      static_cast<int>(std::min<Eigen::Index>(dim, dim > 200000 ? 24 : 48));
  GaussianSource gauss(seed);
  VecC v = gauss.vector(dim);
  v.normalize();
  MatC V(dim, m + 1);
  VecR alpha = VecR::Zero(m), beta = VecR::Zero(m);
  EigPair out;
  out.dense = false;
  const int budget = 500;
  for (int cycle = 1; cycle <= budget; ++cycle) {
    V.col(0) = v;
    int span = m;
    for (int j = 0; j < m; ++j) {
      VecC w = H * V.col(j);
      alpha[j] = V.col(j).dot(w).real();
      w -= alpha[j] * V.col(j);
      if (j > 0) w -= beta[j - 1] * V.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        VecC c = V.leftCols(j + 1).adjoint() * w;
        w.noalias() -= V.leftCols(j + 1) * c;
      }
      beta[j] = w.norm();
      if (beta[j] < 1e-13) {  // exact invariant subspace
        span = j + 1;
        break;
      }
      V.col(j + 1) = w / beta[j];
    }
    MatR T = MatR::Zero(span, span);
    for (int j = 0; j < span; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < span) {
        T(j, j + 1) = beta[j];
        T(j + 1, j) = beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<MatR> es(T);
    out.theta0 = es.eigenvalues()(0);
    out.theta1 = span > 1 ? es.eigenvalues()(1) : out.theta0;
    out.vector = V.leftCols(span) * es.eigenvectors().col(0).cast<cxd>();
    out.vector.normalize();
    out.residual = residual_norm(H, out.vector, out.theta0);
    out.cycles = cycle;
    if (out.residual <= 1e-10 * std::max(1.0, std::abs(out.theta0))) {
      return out;
    }
    v = out.vector;
  }
  if (out.residual <= 1e-9 * std::max(1.0, std::abs(out.theta0))) return out;
  std::ostringstream os;
  os << "eigensolver: residual " << out.residual << " after " << out.cycles
     << " restart cycles";
  throw convergence_error(os.str());
}

EigPair solve_lowest(const SparseC& H, std::uint64_t seed, EigMethod method) {
  const bool dense = method == EigMethod::dense ||
                     (method == EigMethod::automatic && H.rows() < kDenseLimit);
  return dense ? dense_lowest(H) : lanczos_lowest(H, seed);
}

bool keeps_model(const ModelSpec& m, const std::vector<int>& p) {
  const int d = m.modes;
  for (int i = 0; i < d; ++i) {
    if (std::abs(m.external_potential[p[i]] - m.external_potential[i]) > 1e-12)
      return false;
    for (int j = 0; j < d; ++j) {
      if (std::abs(m.kinetic(p[i], p[j]) - m.kinetic(i, j)) > 1e-12)
        return false;
    }
  }
  const MatC& w = m.two_body();
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          if (std::abs(w(p[i] * d + p[j], p[k] * d + p[l]) -
                       w(i * d + j, k * d + l)) > 1e-12)
            return false;
  return true;
}

}  // namespace

GroundState ground_state(const ModelSpec& model, int particles,
                         EigMethod method) {
  if (particles < 1)
    throw validation_error("ground_state: particles must be >= 1");
  OccupationBasis basis(model.modes, particles);
  const SparseC H = assemble(model, basis);
  EigPair p = solve_lowest(H, solver_seed(model, particles, "ground"), method);
  canonicalize_phase(p.vector);
  return GroundState{p.theta0,
                     p.theta1,
                     p.theta1 - p.theta0,
                     PureState{std::move(basis), std::move(p.vector)},
                     p.residual,
                     p.cycles,
                     p.dense};
}

double ground_energy(const ModelSpec& model, int particles) {
  return ground_state(model, particles).energy;
}

SweepReport mean_field_sweep(const ModelSpec& model,
                             const std::vector<int>& schedule) {
  if (schedule.empty())
    throw validation_error("mean_field_sweep: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1)
      throw validation_error("mean_field_sweep: particle numbers must be >= 1");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw validation_error("mean_field_sweep: schedule must increase");
  }
  HartreeResult h = minimize(model, 1.0);
  if (!h.converged)
    throw convergence_error("mean_field_sweep: hartree reference not converged");

  SweepReport rep;
  rep.hartree_energy = h.energy;
  rep.hartree_minimizer = h.minimizer;
  for (int n : schedule) {
    GroundState g = ground_state(model, n);
    SweepRecord r;
    r.particles = n;
    r.energy = g.energy;
    r.energy_per_particle = g.energy / n;
    r.gap_to_limit = rep.hartree_energy - r.energy_per_particle;
    const MatC gamma1 = reduce(g.state.basis, g.state.amplitudes, 1);
    OccupationBasis b1(model.modes, 1);
    const VecC u1 = product_state(b1, h.minimizer);
    r.overlap1 = std::real(u1.dot(gamma1 * u1));
    if (n >= 2) {
      const MatC gamma2 = reduce(g.state.basis, g.state.amplitudes, 2);
      OccupationBasis b2(model.modes, 2);
      const VecC u2 = product_state(b2, h.minimizer);
      r.overlap2 = std::real(u2.dot(gamma2 * u2));
    } else {
      r.overlap2 = std::numeric_limits<double>::quiet_NaN();
    }
    r.residual = g.residual;
    rep.rows.push_back(std::move(r));
  }
  return rep;
}

std::vector<std::vector<int>> model_symmetries(const ModelSpec& model) {
  const int d = model.modes;
  std::vector<std::vector<int>> candidates;
  std::vector<int> idn(d);
  for (int j = 0; j < d; ++j) idn[j] = j;
  candidates.push_back(idn);
  if (model.geometry == "ring") {
    for (int s = 1; s < d; ++s) {
      std::vector<int> rot(d);
      for (int j = 0; j < d; ++j) rot[j] = (j + s) % d;
      candidates.push_back(std::move(rot));
    }
    for (int s = 0; s < d; ++s) {
      std::vector<int> refl(d);
      for (int j = 0; j < d; ++j) refl[j] = ((s - j) % d + d) % d;
      candidates.push_back(std::move(refl));
    }
  } else {
    std::vector<int> rev(d);
    for (int j = 0; j < d; ++j) rev[j] = d - 1 - j;
    candidates.push_back(std::move(rev));
  }
  std::vector<std::vector<int>> out;
  for (const auto& p : candidates) {
    if (std::find(out.begin(), out.end(), p) == out.end() &&
        keeps_model(model, p)) {
      out.push_back(p);
    }
  }
  return out;
}

OverlapReport bec_overlap(const ModelSpec& model, int particles, int k) {
  if (k < 1 || k > 3)
    throw validation_error("bec_overlap: k must be 1, 2 or 3");
  if (particles < k)
    throw validation_error("bec_overlap: needs at least k particles");
  HartreeResult h = minimize(model, 1.0);
  if (!h.converged)
    throw convergence_error("bec_overlap: hartree reference not converged");
  GroundState g = ground_state(model, particles);
  const MatC gamma = reduce(g.state.basis, g.state.amplitudes, k);
  OccupationBasis kb(model.modes, k);

  std::vector<VecC> orbit;
  for (const auto& p : model_symmetries(model)) {
    VecC u(model.modes);
    for (int j = 0; j < model.modes; ++j) u[p[j]] = h.minimizer[j];
    canonicalize_phase(u);
    bool fresh = true;
    for (const VecC& q : orbit) fresh = fresh && (u - q).norm() > 1e-8;
    if (fresh) orbit.push_back(std::move(u));
  }

  OverlapReport rep;
  rep.k = k;
  rep.orbit_size = static_cast<int>(orbit.size());
  const auto dim = static_cast<Eigen::Index>(kb.size());
  MatC mix = MatC::Zero(dim, dim);
  for (const VecC& u : orbit) {
    const VecC uk = product_state(kb, u);
    rep.pure.push_back(std::real(uk.dot(gamma * uk)));
    mix.noalias() += uk * uk.adjoint();
  }
  mix /= static_cast<double>(orbit.size());
  rep.best_pure = *std::max_element(rep.pure.begin(), rep.pure.end());
  rep.mixture = fidelity(mix, gamma);
  return rep;
}

double scaled_energy_per_particle(const ModelSpec& model, int k,
                                  double lambda) {
  if (k < 1)
    throw validation_error("scaled_energy_per_particle: k must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw validation_error(
        "scaled_energy_per_particle: lambda must lie in [0, 1]");
  if (k == 1) return 0.0;
  OccupationBasis basis(model.modes, k);
  const SparseC H = scaled_assemble(model, basis, lambda);
  const EigPair p =
      solve_lowest(H, solver_seed(model, k, "scaled"), EigMethod::automatic);
  return p.theta0 / k;
}

ScaledEnergyScan scaled_energy_scan(const ModelSpec& model, int k,
                                    int points) {
  if (k < 2) throw validation_error("scaled_energy_scan: k must be >= 2");
  if (points < 2)
    throw validation_error("scaled_energy_scan: needs at least 2 grid points");
  ScaledEnergyScan scan;
  scan.k = k;
  for (int i = 0; i < points; ++i) {
    const double lam = static_cast<double>(i) / (points - 1);
    scan.lambdas.push_back(lam);
    scan.values.push_back(scaled_energy_per_particle(model, k, lam));
  }
  scan.all_preconditions = true;
  for (int i = 0; i < points; ++i) {
    const bool ok = scan.values[0] >= scan.values[i] - 1e-9;
    scan.precondition.push_back(ok);
    scan.all_preconditions = scan.all_preconditions && ok;
  }
  // The affine-path argument gives b(l) >= b(l') for l < l' whenever the
  // right endpoint passes the precondition, so that is all we assert.
  scan.monotone = true;
  for (int i = 0; i < points; ++i) {
    if (!scan.precondition[i]) continue;
    for (int j = 0; j < i; ++j)
      scan.monotone = scan.monotone && scan.values[j] >= scan.values[i] - 1e-9;
  }
  Eigen::SelfAdjointEigenSolver<MatC> ew(model.two_body());
  scan.lipschitz = ew.eigenvalues().cwiseAbs().maxCoeff() / 2.0;
  scan.lipschitz_ok = true;
  for (int i = 0; i < points; ++i)
    for (int j = 0; j < i; ++j)
      scan.lipschitz_ok =
          scan.lipschitz_ok &&
          std::abs(scan.values[i] - scan.values[j]) <=
              scan.lipschitz * std::abs(scan.lambdas[i] - scan.lambdas[j]) +
                  1e-9;
  return scan;
}

double uniform_limit_defect(const ModelSpec& model, int k, int N) {
  if (k < 2) throw validation_error("uniform_limit_defect: k must be >= 2");
  if (N < k) throw validation_error("uniform_limit_defect: needs N >= k");
  if (model.external_potential.cwiseAbs().maxCoeff() > 1e-12)
    throw validation_error(
        "uniform_limit_defect: external potential must vanish");
  const double lambda = static_cast<double>(k - 1) / (N - 1);
  const double bk = scaled_energy_per_particle(model, k, lambda);
  HartreeResult h = minimize(model, static_cast<double>(k) / N);
  if (!h.converged)
    throw convergence_error("uniform_limit_defect: hartree minimum not converged");
  return std::abs(static_cast<double>(k) / N * bk - h.energy);
}

NoBoundStateReport no_bound_state_check(const ModelSpec& model,
                                        int max_particles) {
  if (max_particles < 2)
    throw validation_error("no_bound_state_check: needs max_particles >= 2");
  if (!model.translation_invariant)
    throw validation_error(
        "no_bound_state_check: model must be translation-invariant");
  if (model.external_potential.cwiseAbs().maxCoeff() > 1e-12)
    throw validation_error(
        "no_bound_state_check: external potential must vanish");

  NoBoundStateReport rep;
  Eigen::SelfAdjointEigenSolver<MatC> ek(model.kinetic);
  rep.shift = ek.eigenvalues()(0);
  ModelSpec shifted = model;
  shifted.kinetic -= rep.shift * MatC::Identity(model.modes, model.modes);
  for (int n = 1; n <= max_particles; ++n)
    rep.energies.push_back(ground_state(shifted, n).energy);
  rep.pair_energy = rep.energies[1];
  rep.no_pair_binding = rep.pair_energy >= -1e-9;
  rep.consistent = true;
  rep.ordering = true;
  for (int n = 1; n <= max_particles; ++n) {
    const double e = rep.energies[n - 1];
    if (rep.no_pair_binding) rep.consistent = rep.consistent && e >= -1e-9;
    if (n >= 2)
      rep.ordering = rep.ordering && e / n >= rep.pair_energy / 2 - 1e-9;
  }
  return rep;
}

LiebYauReport lieb_yau_bound(const ModelSpec& model, int particles,
                             double eps) {
  if (model.geometry != "ring")
    throw validation_error("lieb_yau_bound: needs ring geometry");
  // translation_invariant is the shift-commutator check at the 1e-10 gate.
  if (!model.translation_invariant)
    throw validation_error(
        "lieb_yau_bound: model must be translation-invariant");
  if (model.external_potential.cwiseAbs().maxCoeff() > 1e-12)
    throw validation_error("lieb_yau_bound: external potential must vanish");
  if (model.kind == TwoBodyKind::dense)
    throw validation_error(
        "lieb_yau_bound: the entrywise negative-part split needs an onsite or "
        "pair-potential interaction");
  if (!(eps > 0.0 && eps < 0.5))
    throw validation_error("lieb_yau_bound: eps must lie in (0, 1/2)");
  if (particles < 3)
    throw validation_error("lieb_yau_bound: needs at least 3 particles");

  const int d = model.modes;
  std::vector<double> values = model.kind == TwoBodyKind::onsite
                                   ? std::vector<double>{model.onsite_strength}
                                   : model.pair_values;
  std::vector<double> wminus(values.size()), weps(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) {
    wminus[r] = std::max(0.0, -values[r]);
    weps[r] = values[r] + 2.0 * eps * wminus[r];
  }

  // (N-1)-particle model with the removed particle's attraction re-expressed
  // as a one-body well at a reference site; translation invariance makes the
  // site immaterial, which reference_spread double-checks.
  const auto rhs_at = [&](int ref) {
    json j;
    j["modes"] = d;
    j["geometry"] = "ring";
    json ob = json::array();
    for (int r = 0; r < d; ++r) {
      json row = json::array();
      for (int c = 0; c < d; ++c)
        row.push_back({model.kinetic(r, c).real(), model.kinetic(r, c).imag()});
      ob.push_back(row);
    }
    j["one_body"] = ob;
    json ext = json::array();
    for (int s = 0; s < d; ++s) {
      const int raw = std::abs(s - ref);
      const int dist = std::min(raw, d - raw);
      const double wm =
          dist < static_cast<int>(wminus.size()) ? wminus[dist] : 0.0;
      ext.push_back(-eps * wm);
    }
    j["external_potential"] = ext;
    j["two_body"] = {{"kind", "pair_potential"},
                     {"geometry", "ring"},
                     {"values", weps}};
    const ModelSpec cut = parse_model(j.dump(), "lieb-yau reduced model");
    return ground_state(cut, particles - 1).energy / (particles - 1);
  };

  LiebYauReport rep;
  rep.epsilon = eps;
  rep.lhs = ground_state(model, particles).energy / particles;
  rep.rhs = rhs_at(0);
  rep.slack = rep.lhs - rep.rhs;
  rep.reference_spread = std::abs(rhs_at(1 % d) - rep.rhs);
  return rep;
}

}  // namespace bmfl
