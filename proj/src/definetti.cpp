#include "bmfl/definetti.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "bmfl/rdm.hpp"

namespace bmfl {

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& what) {
  throw validation_error(origin + ": " + path + ": " + what);
}

cxd read_complex(const nlohmann::json& j, const std::string& origin,
                 const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(origin, path, "expected a [re, im] pair");
  return cxd(j[0].get<double>(), j[1].get<double>());
}

// Rotates the atom so its largest-modulus coefficient is real nonnegative.
// Ties go to the smallest mode index; the zero vector is left alone.

}  // namespace

DeFinettiMeasure make_measure(int modes, std::vector<MeasureAtom> atoms) {
  if (modes < 1) throw validation_error("measure needs at least one mode");
  if (atoms.empty()) throw validation_error("measure needs at least one atom");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    MeasureAtom& atom = atoms[i];
    if (!std::isfinite(atom.weight) || atom.weight <= 0.0)
      throw validation_error("atom " + std::to_string(i) +
                             ": weight must be positive");
    total += atom.weight;
    if (atom.vector.size() != modes)
      throw validation_error("atom " + std::to_string(i) + ": vector has " +
                             std::to_string(atom.vector.size()) +
                             " entries, expected " + std::to_string(modes));
    if (!atom.vector.allFinite())
      throw validation_error("atom " + std::to_string(i) +
                             ": vector entries must be finite");
    const double norm = atom.vector.norm();
    if (norm > 1.0 + 1e-9)
      throw validation_error("atom " + std::to_string(i) +
                             ": lies outside the closed unit ball (norm " +
                             std::to_string(norm) + ")");
    if (norm > 1.0) atom.vector /= norm;
    canonicalize_phase(atom.vector);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw validation_error("atom weights sum to " + std::to_string(total) +
                           ", expected 1");
  DeFinettiMeasure mu;
  mu.modes = modes;
  mu.atoms = std::move(atoms);
  return mu;
}

DeFinettiMeasure parse_measure(const std::string& text,
                               const std::string& origin) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw validation_error(origin + ": not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("atoms") || !j["atoms"].is_array() ||
      j["atoms"].empty())
    fail(origin, "/atoms", "expected a nonempty array of atoms");
  std::vector<MeasureAtom> atoms;
  int modes = -1;
  for (std::size_t i = 0; i < j["atoms"].size(); ++i) {
    const auto& ja = j["atoms"][i];
    const std::string base = "/atoms/" + std::to_string(i);
    if (!ja.is_object() || !ja.contains("weight") || !ja.contains("vector"))
      fail(origin, base, "expected an object with weight and vector");
    if (!ja["weight"].is_number())
      fail(origin, base + "/weight", "expected a number");
    if (!ja["vector"].is_array() || ja["vector"].empty())
      fail(origin, base + "/vector", "expected a nonempty array");
    MeasureAtom atom;
    atom.weight = ja["weight"].get<double>();
    atom.vector.resize(static_cast<int>(ja["vector"].size()));
    for (std::size_t c = 0; c < ja["vector"].size(); ++c)
      atom.vector[static_cast<int>(c)] = read_complex(
          ja["vector"][c], origin, base + "/vector/" + std::to_string(c));
    if (modes < 0) modes = static_cast<int>(atom.vector.size());
    if (atom.vector.size() != modes)
      fail(origin, base + "/vector", "all atoms must share one mode count");
    atoms.push_back(std::move(atom));
  }
  try {
    return make_measure(modes, std::move(atoms));
  } catch (const validation_error& e) {
    throw validation_error(origin + ": " + e.what());
  }
}

DeFinettiMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error("cannot open measure file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_measure(buf.str(), path);
}

MatC hierarchy(const DeFinettiMeasure& mu, int k) {
  if (k < 0) throw validation_error("hierarchy order must be nonnegative");
  const OccupationBasis basis(mu.modes, k);
  const std::size_t dim = basis.size();
  MatC out = MatC::Zero(static_cast<Eigen::Index>(dim),
                        static_cast<Eigen::Index>(dim));
  for (const MeasureAtom& atom : mu.atoms) {
    const VecC psi = product_state(basis, atom.vector);
    out.noalias() += atom.weight * psi * psi.adjoint();
  }
  return out;
}

double hierarchy_trace(const DeFinettiMeasure& mu, int k) {
  double tr = 0.0;
  for (const MeasureAtom& atom : mu.atoms)
    tr += atom.weight * std::pow(atom.vector.squaredNorm(), k);
  return tr;
}

double finite_N_match(const DeFinettiMeasure& mu, int N, int k) {
  if (N < 1 || k < 0 || k > N)
    throw validation_error("finite_N_match needs 0 <= k <= N with N >= 1");
  for (std::size_t i = 0; i < mu.atoms.size(); ++i)
    if (mu.atoms[i].vector.norm() < 1.0 - 1e-9)
      throw validation_error(
          "atom " + std::to_string(i) +
          " has interior mass; the finite-N mixture needs a measure "
          "supported on the unit sphere");
  const OccupationBasis big(mu.modes, N);
  MatC reduced;
  for (const MeasureAtom& atom : mu.atoms) {
    const VecC psi = product_state(big, atom.vector);
    const MatC part = reduce(big, psi, k);
    if (reduced.size() == 0)
      reduced = atom.weight * part;
    else
      reduced.noalias() += atom.weight * part;
  }
  return trace_norm(reduced - hierarchy(mu, k));
}

ConvergenceReport strong_convergence_report(
    const std::vector<MixedState>& states, const std::vector<int>& region,
    double strong_threshold) {
  if (states.empty())
    throw validation_error("convergence report needs at least one state");
  if (region.empty())
    throw validation_error("convergence report needs a nonempty mode region");
  ConvergenceReport report;
  int last_n = 0;
  for (const MixedState& state : states) {
    const int n = state.basis.particles();
    const int d = state.basis.modes();
    if (n <= last_n)
      throw validation_error(
          "states must come with strictly increasing particle number");
    last_n = n;
    for (int site : region)
      if (site < 0 || site >= d)
        throw validation_error("region mode " + std::to_string(site) +
                               " is outside a lattice with " +
                               std::to_string(d) + " modes");
    const MatC gamma1 = reduce(state, 1);
    double mass = 0.0;
    for (int site : region) mass += gamma1(site, site).real();
    report.rows.push_back({n, d, mass});
  }
  // Least-squares fit mass ~ a + b/N; the intercept a is the reported limit.
  if (report.rows.size() == 1) {
    report.extrapolated_mass = report.rows[0].localized_mass;
  } else {
    double sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
    for (const ConvergenceRow& row : report.rows) {
      const double x = 1.0 / row.particles;
      sx += x;
      sxx += x * x;
      sy += row.localized_mass;
      sxy += x * row.localized_mass;
    }
    const double m = static_cast<double>(report.rows.size());
    const double det = m * sxx - sx * sx;
    report.extrapolated_mass = (sxx * sy - sx * sxy) / det;
  }
  report.regime = report.extrapolated_mass >= strong_threshold
                      ? "strong"
                      : "weak-with-escape";
  return report;
}

namespace {

// Parameter block for the moment-matching fit: per atom a raw weight scalar
// (squared and normalized across atoms) plus re/im parts of an unconstrained
// vector that gets projected onto the unit ball.
struct FitSpace {
  int modes;
  int atoms;

  int size() const { return atoms * (1 + 2 * modes); }

  DeFinettiMeasure unpack(const VecR& p) const {
    double wsum = 0.0;
    for (int a = 0; a < atoms; ++a) wsum += p[a] * p[a];
    DeFinettiMeasure mu;
    mu.modes = modes;
    for (int a = 0; a < atoms; ++a) {
      MeasureAtom atom;
      atom.weight = p[a] * p[a] / wsum;
      atom.vector.resize(modes);
      for (int j = 0; j < modes; ++j)
        atom.vector[j] = cxd(p[atoms + 2 * (a * modes + j)],
                             p[atoms + 2 * (a * modes + j) + 1]);
      const double norm = atom.vector.norm();
      if (norm > 1.0) atom.vector /= norm;
      mu.atoms.push_back(std::move(atom));
    }
    return mu;
  }
};

double moment_misfit(const FitSpace& space, const VecR& p, const MatC& gamma1,
                     const MatC& gamma2) {
  const DeFinettiMeasure mu = space.unpack(p);
  return (hierarchy(mu, 1) - gamma1).squaredNorm() +
         (hierarchy(mu, 2) - gamma2).squaredNorm();
}

}  // namespace

DeFinettiMeasure match_atoms(int modes, const MatC& gamma1, const MatC& gamma2,
                             int max_atoms, std::uint64_t seed) {
  if (modes < 1 || max_atoms < 1)
    throw validation_error("match_atoms needs modes >= 1 and max_atoms >= 1");
  const std::size_t d1 = OccupationBasis::dimension(modes, 1);
  const std::size_t d2 = OccupationBasis::dimension(modes, 2);
  if (gamma1.rows() != static_cast<Eigen::Index>(d1) ||
      gamma1.cols() != gamma1.rows() ||
      gamma2.rows() != static_cast<Eigen::Index>(d2) ||
      gamma2.cols() != gamma2.rows())
    throw validation_error("moment matrices do not match the mode count");

  const FitSpace space{modes, max_atoms};
  const int n = space.size();
  VecR best_p;
  double best_f = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.7);

  for (int start = 0; start < 12; ++start) {
    VecR p(n);
    for (int i = 0; i < n; ++i) p[i] = start == 0 ? 1.0 : gauss(rng);
    for (int a = 0; a < max_atoms; ++a) p[a] = 1.0 + 0.1 * std::abs(p[a]);
    double f = moment_misfit(space, p, gamma1, gamma2);

    for (int iter = 0; iter < 500 && f > 1e-20; ++iter) {
      VecR grad(n);
      const double h = 1e-6;
      for (int i = 0; i < n; ++i) {
        VecR q = p;
        q[i] = p[i] + h;
        const double fp = moment_misfit(space, q, gamma1, gamma2);
        q[i] = p[i] - h;
        const double fm = moment_misfit(space, q, gamma1, gamma2);
        grad[i] = (fp - fm) / (2.0 * h);
      }
      const double g2 = grad.squaredNorm();
      if (g2 < 1e-24) break;
      double step = 1.0;
      bool moved = false;
      for (int bt = 0; bt < 40; ++bt) {
        const VecR q = p - step * grad;
        const double fq = moment_misfit(space, q, gamma1, gamma2);
        if (fq <= f - 0.3 * step * g2) {
          p = q;
          f = fq;
          moved = true;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (f < best_f) {
      best_f = f;
      best_p = p;
    }
  }

  DeFinettiMeasure raw = space.unpack(best_p);
  // Drop numerically empty atoms, then renormalize and canonicalize.
  std::vector<MeasureAtom> kept;
  double total = 0.0;
  for (MeasureAtom& atom : raw.atoms) {
    if (atom.weight < 1e-12) continue;
    total += atom.weight;
    kept.push_back(std::move(atom));
  }
  for (MeasureAtom& atom : kept) atom.weight /= total;
  return make_measure(modes, std::move(kept));
}

}  // namespace bmfl
