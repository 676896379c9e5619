#ifndef BMFL_HARTREE_HPP
#define BMFL_HARTREE_HPP

#include <cstdint>
#include <vector>

#include "bmfl/common.hpp"
#include "bmfl/model.hpp"

namespace bmfl {

// Mean-field energy of a one-particle vector:
//   E(u) = <u, T u> + 1/2 <u ox u, w (u ox u)>.
// Any finite vector of the right dimension is allowed; mass shells are the
// business of the minimizers.
double hartree_energy(const ModelSpec& model, const VecC& u);

// Partial contraction of the pair interaction against a one-body density:
//   h[gamma]_{ik} = sum_{jl} w_{(ij),(kl)} gamma_{lj}.
// The rank-one overload contracts against |u><u|.
MatC mean_field_operator(const ModelSpec& model, const MatC& gamma);
MatC mean_field_operator(const ModelSpec& model, const VecC& u);

// Real-inner-product gradient 2(T u + h[u] u): the first-order change of the
// energy along a perturbation delta is Re <gradient, delta>.
VecC hartree_gradient(const ModelSpec& model, const VecC& u);

struct MinimizeOptions {
  int restarts = 16;          // random starts beyond the one-body eigenvector
  int max_iterations = 4000;  // per start
  double tolerance = 1e-10;   // on the tangent gradient norm
  std::uint64_t seed = 1;
};

struct HartreeResult {
  double energy = 0.0;
  VecC minimizer;
  double mass = 0.0;          // the constraint ||u||^2
  int iterations = 0;         // taken by the winning start
  double gradient_norm = 0.0; // tangent certificate of the winner
  int restarts_used = 0;      // index of the winning start (0 = eigenvector)
  bool converged = false;     // false = best found, certificate not met
};

// Projected gradient descent with Armijo backtracking on the sphere
// ||u||^2 = mass, best-of over deterministic seeded starts plus the ground
// eigenvector of the one-body part.  Ties in energy keep the earlier start.
HartreeResult minimize(const ModelSpec& model, double mass,
                       const MinimizeOptions& options = {});

// Mass-split scan: e^V(lambda) for the model as given, e^0(lambda) for the
// model with external potential zeroed, and the binding margins
//   b(lambda) = e^V(lambda) + e^0(1 - lambda) - e^V(1).
struct EnergyCurve {
  std::vector<double> mass;               // lambda grid on [0, 1]
  std::vector<double> with_potential;     // e^V(lambda)
  std::vector<double> without_potential;  // e^0(lambda)
  std::vector<double> margin;             // b(lambda)
  double strictness = 1e-6;
  bool strict_binding = false;  // margin > strictness on every lambda < 1
  double kinetic_ground = 0.0;  // smallest eigenvalue of the kinetic part
  bool all_converged = true;
};

EnergyCurve energy_curve(const ModelSpec& model, int points = 21,
                         const MinimizeOptions& options = {},
                         double strictness = 1e-6);

// Minimum of Tr[T gamma] + 1/2 Tr[w gamma ox gamma] over PSD trace-one
// matrices, through the square-root parametrization gamma = B B^dag / Tr.
// Never above the pure minimum: pure states are feasible.
struct MixedHartreeResult {
  double energy = 0.0;
  MatC gamma;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
};

MixedHartreeResult minimize_mixed(const ModelSpec& model,
                                  const MinimizeOptions& options = {});

}  // namespace bmfl

#endif
