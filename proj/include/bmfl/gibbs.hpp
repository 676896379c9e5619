#ifndef BMFL_GIBBS_HPP
#define BMFL_GIBBS_HPP

#include <vector>

#include "bmfl/common.hpp"
#include "bmfl/fock.hpp"
#include "bmfl/model.hpp"

namespace bmfl {

// Canonical state at inverse temperature beta.
struct GibbsResult {
  double beta = 0.0;
  int particles = 0;
  double free_energy = 0.0;  // -(1/beta) log Tr e^{-beta H}
  MixedState state;          // e^{-beta H} / Z
  MatC gamma1;
  MatC gamma2;  // empty when particles == 1
};

// Full dense spectrum (the Gibbs weights need every level), assembled via a
// log-sum-exp anchored at the ground energy so nothing overflows.  The
// default dense cap keeps the eigensolve at desk scale; callers may widen it
// explicitly.
GibbsResult free_energy(const ModelSpec& model, int particles, double beta,
                        int dense_cap = 4096);

// Free energy of non-interacting bosons with the given one-body spectrum,
// by exact occupation enumeration; the ground level N*min(spectrum) is
// subtracted inside the sum, so large |spectrum| and N are safe.  Entry
// order does not matter.
double noninteracting_free_energy(const std::vector<double>& spectrum,
                                  int particles, double beta);

// Distance of the shifted non-interacting partition function from its
// condensation limit:
//   defect_N = | e^{beta N k1} Z_N - prod_{j>=2} (1 - e^{-beta(k_j-k1)})^-1 |.
// The lowest level must be non-degenerate (gap >= 1e-8); the defects decay
// like e^{-beta(k2-k1)} per added particle.
std::vector<double> condensation_tail(const std::vector<double>& spectrum,
                                      const std::vector<int>& schedule,
                                      double beta);

struct TemperatureRecord {
  int particles = 0;
  double free_energy = 0.0;
  double free_energy_per_particle = 0.0;
  double ground_energy = 0.0;  // zero-temperature E(N)
  double gap_to_limit = 0.0;   // |free_energy/particles - hartree_energy|
};

struct TemperatureSweep {
  double beta = 0.0;
  double hartree_energy = 0.0;
  std::vector<TemperatureRecord> rows;
};

// Fixed-beta sweep along an increasing particle schedule; each row carries
// the zero-temperature energy so the variational sandwich
// free_energy <= ground_energy stays checkable per point.
TemperatureSweep finite_temperature_sweep(const ModelSpec& model,
                                          const std::vector<int>& schedule,
                                          double beta, int dense_cap = 4096);

}  // namespace bmfl

#endif
