#include "bmfl/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bmfl/hartree.hpp"
#include "bmfl/rdm.hpp"
#include "bmfl/spectra.hpp"

namespace bmfl {

namespace {

std::vector<double> sorted_spectrum(const std::vector<double>& spectrum,
                                    const char* who) {
  if (spectrum.empty())
    throw validation_error(std::string(who) + ": empty spectrum");
  for (double k : spectrum)
    if (!std::isfinite(k))
      throw validation_error(std::string(who) + ": spectrum must be finite");
  std::vector<double> s = spectrum;
  std::sort(s.begin(), s.end());
  return s;
}

void require_beta(double beta, const char* who) {
  if (!(beta > 0.0))
    throw validation_error(std::string(who) + ": beta must be positive");
}

// Sum over occupations of e^{-beta sum_j n_j (k_j - k_1)}; every exponent is
// <= 0, so this is e^{beta N k_1} Z_N evaluated without overflow.
double shifted_partition(const std::vector<double>& s, int particles,
                         double beta) {
  const int d = static_cast<int>(s.size());
  OccupationBasis basis(d, particles);
  double total = 0.0;
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    const int* n = basis.state(idx);
    double ex = 0.0;
    for (int j = 0; j < d; ++j) ex += n[j] * (s[j] - s[0]);
    total += std::exp(-beta * ex);
  }
  return total;
}

}  // namespace

GibbsResult free_energy(const ModelSpec& model, int particles, double beta,
                        int dense_cap) {
  require_beta(beta, "free_energy");
  if (particles < 1)
    throw validation_error("free_energy: particles must be >= 1");
  if (dense_cap < 1)
    throw validation_error("free_energy: dense cap must be positive");
  OccupationBasis basis(model.modes, particles);
  if (basis.size() > static_cast<std::size_t>(dense_cap)) {
    throw capacity_error("free_energy: dimension " +
                         std::to_string(basis.size()) +
                         " exceeds the dense spectrum cap " +
                         std::to_string(dense_cap));
  }
  const MatC H(assemble(model, basis));
  Eigen::SelfAdjointEigenSolver<MatC> es(H);
  const VecR& e = es.eigenvalues();
  const double e0 = e(0);
  VecR w = (-beta * (e.array() - e0)).exp();
  const double partition = w.sum();
  const double value = e0 - std::log(partition) / beta;
  w /= partition;
  MatC gamma = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
  gamma = 0.5 * (gamma + gamma.adjoint());
  MixedState state{std::move(basis), std::move(gamma)};
  MatC g1 = reduce(state, 1);
  MatC g2 = particles >= 2 ? reduce(state, 2) : MatC();
  return GibbsResult{beta,  particles,    value,
                     std::move(state), std::move(g1), std::move(g2)};
}

double noninteracting_free_energy(const std::vector<double>& spectrum,
                                  int particles, double beta) {
  require_beta(beta, "noninteracting_free_energy");
  if (particles < 1)
    throw validation_error("noninteracting_free_energy: particles must be >= 1");
  const std::vector<double> s =
      sorted_spectrum(spectrum, "noninteracting_free_energy");
  const double total = shifted_partition(s, particles, beta);
  return particles * s[0] - std::log(total) / beta;
}

std::vector<double> condensation_tail(const std::vector<double>& spectrum,
                                      const std::vector<int>& schedule,
                                      double beta) {
  require_beta(beta, "condensation_tail");
  if (schedule.empty())
    throw validation_error("condensation_tail: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1)
      throw validation_error("condensation_tail: particle numbers must be >= 1");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw validation_error("condensation_tail: schedule must increase");
  }
  const std::vector<double> s = sorted_spectrum(spectrum, "condensation_tail");
  if (s.size() >= 2 && s[1] - s[0] < 1e-8) {
    throw validation_error(
        "condensation_tail: lowest level must be non-degenerate "
        "(gap below 1e-8)");
  }
  double limit = 1.0;
  for (std::size_t j = 1; j < s.size(); ++j)
    limit /= 1.0 - std::exp(-beta * (s[j] - s[0]));
  std::vector<double> defects;
  defects.reserve(schedule.size());
  for (int n : schedule)
    defects.push_back(std::abs(shifted_partition(s, n, beta) - limit));
  return defects;
}

TemperatureSweep finite_temperature_sweep(const ModelSpec& model,
                                          const std::vector<int>& schedule,
                                          double beta, int dense_cap) {
  require_beta(beta, "finite_temperature_sweep");
  if (schedule.empty())
    throw validation_error("finite_temperature_sweep: empty schedule");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1)
      throw validation_error(
          "finite_temperature_sweep: particle numbers must be >= 1");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw validation_error("finite_temperature_sweep: schedule must increase");
  }
  HartreeResult h = minimize(model, 1.0);
  if (!h.converged)
    throw convergence_error(
        "finite_temperature_sweep: hartree reference not converged");
  TemperatureSweep sweep;
  sweep.beta = beta;
  sweep.hartree_energy = h.energy;
  for (int n : schedule) {
    const GibbsResult g = free_energy(model, n, beta, dense_cap);
    TemperatureRecord r;
    r.particles = n;
    r.free_energy = g.free_energy;
    r.free_energy_per_particle = g.free_energy / n;
    r.ground_energy = ground_energy(model, n);
    r.gap_to_limit = std::abs(r.free_energy_per_particle - sweep.hartree_energy);
    sweep.rows.push_back(r);
  }
  return sweep;
}

}  // namespace bmfl
