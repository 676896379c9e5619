#ifndef BMFL_FOCK_HPP
#define BMFL_FOCK_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "bmfl/common.hpp"

namespace bmfl {

// Occupation-number basis of the N-particle bosonic space over d modes.
// States are enumerated in decreasing lexicographic order, so the first
// state puts every particle in mode 0.  Copies share the enumeration.
class OccupationBasis {
 public:
  OccupationBasis(int modes, int particles);

  int modes() const { return impl_->modes; }
  int particles() const { return impl_->particles; }
  std::size_t size() const { return impl_->dim; }

  // Occupation vector of basis state `idx` (length = modes()).
  const int* state(std::size_t idx) const {
    return impl_->flat.data() + idx * static_cast<std::size_t>(impl_->modes);
  }

  // Rank of an occupation vector via stars-and-bars counting, O(modes).
  std::size_t index_of(const int* occ) const;
  std::size_t index_of(const std::vector<int>& occ) const {
    return index_of(occ.data());
  }

  // Dimension binom(N+d-1, d-1) without enumerating anything.  Returns a
  // saturating value if the count overflows.
  static std::size_t dimension(int modes, int particles);

 private:
  struct Impl {
    int modes;
    int particles;
    std::size_t dim;
    std::vector<int> flat;                // dim x modes occupation table
    std::vector<std::uint64_t> binom;     // (N+d+1)^2 pascal table, saturating
    int binom_rows;
    std::uint64_t choose(int n, int k) const;
  };
  std::shared_ptr<const Impl> impl_;
};

// Amplitudes of u^{tensor N} in the occupation basis: entry at occupation n
// is sqrt(N!/prod n_j!) * prod u_j^{n_j}.  For a unit vector the result is a
// unit vector; for ||u|| < 1 the norm is ||u||^N.
VecC product_state(const OccupationBasis& basis, const VecC& u);

// Applies the hopping/transition operator adag_i a_j to a coefficient vector.
// Particle number is conserved, so the result lives on the same basis.
VecC apply_transition(const OccupationBasis& basis, const VecC& psi, int i,
                      int j);

// Matrix of V^{tensor k} restricted to the k-particle symmetric space, in
// occupation coordinates.  Built by expanding one rotated creation operator
// at a time, so it never touches the d^k product space.
MatC symmetric_power(const MatC& V, int k);

// Permutation of modes as an operator on the basis: |n> -> |n compose
// perm^{-1}>, i.e. new mode perm[j] receives the occupation of old mode j.
MatC mode_permutation(const OccupationBasis& basis, const std::vector<int>& perm);

// Fixes the global phase: the largest-modulus entry (smallest index on ties)
// is rotated onto the positive real axis.  No-op for the zero vector.
void canonicalize_phase(VecC& v);

// A pure N-particle state: basis plus coefficient vector.
struct PureState {
  OccupationBasis basis;
  VecC amplitudes;
};

// A mixed N-particle state: basis plus hermitian PSD matrix of unit trace.
struct MixedState {
  OccupationBasis basis;
  MatC matrix;
};

MixedState to_mixed(const PureState& psi);

}  // namespace bmfl

#endif
