#ifndef BMFL_DEFINETTI_HPP
#define BMFL_DEFINETTI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bmfl/common.hpp"
#include "bmfl/fock.hpp"

namespace bmfl {

// Atomic measure on the closed unit ball of the one-particle space: weights
// are positive and sum to one, atom phases are canonicalized so that each
// atom's largest-modulus coefficient is real and nonnegative.
struct MeasureAtom {
  double weight = 0.0;
  VecC vector;
};

struct DeFinettiMeasure {
  int modes = 0;
  std::vector<MeasureAtom> atoms;
};

// Validates weights/norms/dimensions and canonicalizes phases.
DeFinettiMeasure make_measure(int modes, std::vector<MeasureAtom> atoms);
DeFinettiMeasure parse_measure(const std::string& text, const std::string& origin);
DeFinettiMeasure load_measure(const std::string& path);

// k-th moment of the measure: sum_i w_i |u_i^{ox k}><u_i^{ox k}| on the
// k-particle occupation basis.  Trace = sum_i w_i ||u_i||^{2k}.
MatC hierarchy(const DeFinettiMeasure& mu, int k);
double hierarchy_trace(const DeFinettiMeasure& mu, int k);

// Trace-norm gap between the k-th moment and the k-particle reduction of the
// N-particle mixture sum_i w_i |u_i^{ox N}><u_i^{ox N}|.  Exact (zero) for
// measures supported on the unit sphere; interior atoms are rejected.
double finite_N_match(const DeFinettiMeasure& mu, int N, int k);

// Localized-mass trend along a family of states of growing particle number.
// The reference region is a set of mode indices; each state is probed with
// the projector onto those modes of its own lattice, so families whose mode
// count grows with N are fine.
struct ConvergenceRow {
  int particles = 0;
  int modes = 0;
  double localized_mass = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double extrapolated_mass = 0.0;  // 1/N -> 0 limit of a least-squares fit
  std::string regime;              // "strong" or "weak-with-escape"
};

ConvergenceReport strong_convergence_report(const std::vector<MixedState>& states,
                                            const std::vector<int>& region,
                                            double strong_threshold = 0.98);

// Recovers an atomic measure (at most `max_atoms` atoms) whose first two
// moments match the given pair, by multistart projected least squares.
DeFinettiMeasure match_atoms(int modes, const MatC& gamma1, const MatC& gamma2,
                             int max_atoms, std::uint64_t seed);

}  // namespace bmfl

#endif
