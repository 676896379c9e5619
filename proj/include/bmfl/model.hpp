#ifndef BMFL_MODEL_HPP
#define BMFL_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "bmfl/common.hpp"
#include "bmfl/fock.hpp"

namespace bmfl {

enum class TwoBodyKind { dense, onsite, pair_potential };

// A one- and two-body lattice model: kinetic part, optional diagonal
// external potential, and a pair interaction entering the N-particle
// Hamiltonian with the 1/(N-1) mean-field weight.
struct ModelSpec {
  std::string name;            // optional label from the file
  std::string geometry;        // "chain" or "ring"
  int modes = 0;
  MatC kinetic;                // one-body part without the external potential
  VecR external_potential;     // always length `modes` (zeros when absent)
  TwoBodyKind kind = TwoBodyKind::onsite;
  double onsite_strength = 0.0;
  std::vector<double> pair_values;  // pair potential by lattice distance
  MatC dense_w;                // modes^2 x modes^2, pair index i*modes + j
  std::string source_hash;     // over the defining bytes
  bool translation_invariant = false;

  MatC one_body() const;                 // kinetic + diag(external_potential)
  const MatC& two_body() const { return dense_w; }
};

// Parses a model from JSON text.  `origin` names the source (file path or a
// label) and is prepended, together with the JSON path of the offending
// field, to every validation message.
ModelSpec parse_model(const std::string& text, const std::string& origin);
ModelSpec load_model(const std::string& path);

// Same model with the external potential zeroed.
ModelSpec without_external_potential(const ModelSpec& model);

// Same model with the interaction multiplied by `factor`.
ModelSpec with_coupling(const ModelSpec& model, double factor);

// N-particle Hamiltonian in the occupation basis: sum_{ij} T_{ij} adag_i a_j
// plus 1/(2(N-1)) sum w_{(ij),(kl)} adag_i adag_j a_l a_k.  For N = 1 the
// interaction is absent.
SparseC assemble(const ModelSpec& model, const OccupationBasis& basis);

// Interaction scaled by lambda in [0, 1]; lambda = 1 recovers assemble.
SparseC scaled_assemble(const ModelSpec& model, const OccupationBasis& basis,
                        double lambda);

// Smallest constants (in the shifted-kinetic convention used here) with
//   -beta_minus (T (+) T) - C  <=  w  <=  beta_plus (T (+) T) + C,
// where T (+) T = T ox 1 + 1 ox T.  Diagnostic only; nothing is enforced.
struct RelativeBounds {
  double beta_minus = 0.0;
  double beta_plus = 0.0;
  double constant = 0.0;
};
RelativeBounds relative_bounds(const ModelSpec& model);

// 64-bit FNV-1a, used to fingerprint model files and seed solvers.
std::uint64_t fnv1a(const void* data, std::size_t len);
std::string hex_hash(std::uint64_t h);

}  // namespace bmfl

#endif
