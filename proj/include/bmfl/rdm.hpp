#ifndef BMFL_RDM_HPP
#define BMFL_RDM_HPP

#include "bmfl/common.hpp"
#include "bmfl/fock.hpp"
#include "bmfl/model.hpp"

namespace bmfl {

// Partial trace over the last `traced` particles of an operator given in
// occupation coordinates on `basis`.  Result lives on the basis with
// (particles - traced) particles and the same modes.  Trace preserving.
MatC partial_trace(const OccupationBasis& basis, const MatC& gamma, int traced);

// k-particle reduced density matrix, normalized to unit trace.  The pure
// overload exploits Gamma = psi psi^dag to stay rank-structured.
MatC reduce(const OccupationBasis& basis, const VecC& psi, int k);
MatC reduce(const MixedState& state, int k);

// Trace-norm defect of the hierarchy identity
//   Tr_{k+1..k+n} gamma^{(k+n)} = gamma^{(k)},
// which holds exactly for reductions of one N-particle state.
double consistency_defect(const MixedState& state, int k, int n);

// Energy per particle from the first two reduced density matrices:
//   Tr[T gamma^(1)] + 1/2 Tr[w gamma^(2)]  (one-body only when N = 1).
double energy_per_particle(const ModelSpec& model, const MixedState& state);

// Same quantity through the two-particle Hamiltonian: 1/2 Tr[H_2 gamma^(2)].
double pair_energy_per_particle(const ModelSpec& model, const MixedState& state);

// Isometry from the symmetric pair basis into the modes^2 tensor space.
MatC pair_embedding(int modes);

// Sum of singular values.
double trace_norm(const MatC& A);

// Fidelity (Tr sqrt(sqrt(a) b sqrt(a)))^2 between two density matrices.
// Reduces to <psi|b|psi> when a = |psi><psi|; equals 1 iff a == b.
double fidelity(const MatC& a, const MatC& b);

}  // namespace bmfl

#endif
