#ifndef BMFL_SPECTRA_HPP
#define BMFL_SPECTRA_HPP

#include <vector>

#include "bmfl/common.hpp"
#include "bmfl/fock.hpp"
#include "bmfl/model.hpp"

namespace bmfl {

enum class EigMethod { automatic, dense, iterative };

// Ground eigenpair of the N-particle Hamiltonian, plus the next Ritz value.
struct GroundState {
  double energy = 0.0;
  double second = 0.0;    // second-lowest (Ritz) value
  double gap = 0.0;       // second - energy
  PureState state;        // phase-canonicalized
  double residual = 0.0;  // ||H psi - E psi||
  int cycles = 0;         // restart cycles (0 on the dense path)
  bool dense = true;
};

// Dense solve below dimension 512, restarted Lanczos with full
// reorthogonalization above it.  The Lanczos start vector is seeded from the
// model hash and the particle number, so repeated runs are bitwise equal.
// Residual gate: ||H psi - E psi|| <= 1e-9 * max(1, |E|), else
// convergence_error carrying the reached residual.
GroundState ground_state(const ModelSpec& model, int particles,
                         EigMethod method = EigMethod::automatic);
double ground_energy(const ModelSpec& model, int particles);

// One row of a fixed-model sweep over particle numbers.
struct SweepRecord {
  int particles = 0;
  double energy = 0.0;
  double energy_per_particle = 0.0;
  double gap_to_limit = 0.0;  // hartree_energy - energy/particles
  double overlap1 = 0.0;      // <u_H, gamma^(1) u_H>
  double overlap2 = 0.0;      // <u_H^2, gamma^(2) u_H^2>; NaN when N = 1
  double residual = 0.0;
};

struct SweepReport {
  double hartree_energy = 0.0;  // unit-mass Hartree minimum
  VecC hartree_minimizer;
  std::vector<SweepRecord> rows;
};

// Exact E(N) along an increasing schedule, compared against the Hartree
// limit: E(N)/N is non-decreasing, bounded above by the Hartree energy, and
// the gap to it shrinks.  Condensate overlaps are taken against the Hartree
// minimizer.
SweepReport mean_field_sweep(const ModelSpec& model,
                             const std::vector<int>& schedule);

// Mode permutations (as index maps j -> perm[j]) that leave the one-body
// part, the external potential, and the interaction invariant.  Candidates
// are the lattice motions: ring rotations and reflections, chain reversal.
std::vector<std::vector<int>> model_symmetries(const ModelSpec& model);

// Condensation diagnostics of the N-particle ground state against the
// Hartree minimizer's symmetry orbit.
struct OverlapReport {
  int k = 0;
  int orbit_size = 0;        // distinct minimizers modulo global phase
  double best_pure = 0.0;    // max over the orbit of <u^k, gamma^(k) u^k>
  double mixture = 0.0;      // fidelity with the equal-weight orbit average
  std::vector<double> pure;  // per orbit member
};

// k <= 3.  When the minimizer is unique the orbit has one member and
// `mixture` equals `best_pure`; under symmetry breaking the orbit average is
// the better description of the finite-N state and `mixture` can exceed
// every pure overlap.
OverlapReport bec_overlap(const ModelSpec& model, int particles, int k);

// Per-particle ground energy of the lambda-scaled interaction on k
// particles, b_k(lambda).  b_1 is identically 0 by convention (the k = 1
// Hamiltonian carries no interaction and the convention shifts the kinetic
// ground level away); 0 <= lambda <= 1.
double scaled_energy_per_particle(const ModelSpec& model, int k,
                                  double lambda);

// b_k on a uniform lambda grid.  The scaled family is affine in lambda, so
// b_k is concave; it is non-increasing exactly when the non-interacting
// level dominates, i.e. b_k(0) >= b_k(lambda).  That precondition is checked
// per grid point and reported, never assumed.  `monotone` asserts
// b_k(lambda) >= b_k(lambda') only for pairs lambda < lambda' whose right
// endpoint passes the precondition.  The Lipschitz constant ||w||_op / 2 is
// model-level (independent of k) and checked against all grid pairs.
struct ScaledEnergyScan {
  int k = 0;
  std::vector<double> lambdas;
  std::vector<double> values;
  std::vector<bool> precondition;  // values[0] >= values[i] - 1e-9
  bool all_preconditions = false;
  bool monotone = false;
  double lipschitz = 0.0;
  bool lipschitz_ok = false;
};

ScaledEnergyScan scaled_energy_scan(const ModelSpec& model, int k,
                                    int points = 21);

// |(k/N) b_k((k-1)/(N-1)) - e_H(k/N)| where e_H(m) is the Hartree minimum at
// mass m.  Requires a vanishing external potential and 2 <= k <= N; the
// defect shrinks as the window (k, N) grows.
double uniform_limit_defect(const ModelSpec& model, int k, int N);

// Absence-of-binding diagnostic in the shifted convention min spec(T) = 0.
struct NoBoundStateReport {
  double shift = 0.0;            // kinetic ground level subtracted per particle
  double pair_energy = 0.0;      // shifted E(2)
  std::vector<double> energies;  // shifted E(N), N = 1..max_particles
  bool no_pair_binding = false;  // pair_energy >= -1e-9
  bool consistent = false;       // no_pair_binding => all energies >= -1e-9
  bool ordering = false;         // E(N)/N >= E(2)/2 - 1e-9 for N >= 2
};

// Requires a translation-invariant model with zero external potential.  The
// kinetic shift is applied internally and reported.
NoBoundStateReport no_bound_state_check(const ModelSpec& model,
                                        int max_particles = 6);

// One-step particle-removal bound: the N-particle energy per particle
// dominates the (N-1)-particle energy of the model with the attractive part
// w_minus = max(0, -w) redistributed, one-body term K - eps * w_minus(x -
// x_ref) and interaction w + 2 eps * w_minus.
struct LiebYauReport {
  double epsilon = 0.0;
  double lhs = 0.0;               // E(N)/N
  double rhs = 0.0;               // E_eps(N-1)/(N-1) at reference site 0
  double slack = 0.0;             // lhs - rhs
  double reference_spread = 0.0;  // |rhs(site 0) - rhs(site 1)|
};

// Ring geometry with verified translation invariance, zero external
// potential, onsite or pair-potential interaction (the entrywise split needs
// the multiplication-operator form), 0 < eps < 1/2, N >= 3.
LiebYauReport lieb_yau_bound(const ModelSpec& model, int particles,
                             double eps);

}  // namespace bmfl

#endif
