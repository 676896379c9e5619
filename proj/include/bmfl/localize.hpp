#ifndef BMFL_LOCALIZE_HPP
#define BMFL_LOCALIZE_HPP

#include <functional>
#include <vector>

#include "bmfl/common.hpp"
#include "bmfl/fock.hpp"

namespace bmfl {

// Result of localizing an N-particle state with a hermitian operator A whose
// spectrum lies in [0, 1]: one PSD component per particle count k, living on
// the k-particle occupation basis.  Traces sum to the trace of the input.
struct LocalizedState {
  int modes = 0;
  int particles = 0;
  std::vector<MatC> components;  // index k = 0..particles
};

// Components C(N,k) Tr_{k+1..N} [(A^k ox B^{N-k}) Gamma (A^k ox B^{N-k})]
// with B = sqrt(1 - A^2), computed in the eigenbasis of A and rotated back.
LocalizedState localize(const MixedState& state, const MatC& A);

// Traces of the components without performing the back-rotation.
std::vector<double> localized_trace_profile(const MixedState& state, const MatC& A);

std::vector<double> component_traces(const LocalizedState& loc);

// sqrt(1 - A^2), the complementary localizing operator.
MatC complement_operator(const MatC& A);

// max_k | Tr G^A_{N,k} - Tr G^B_{N,N-k} |, both sides computed through the
// public localization path.
double duality_defect(const MixedState& state, const MatC& A);

// Trace-norm defect of rebuilding the localized reduced matrix:
//   A^n gamma^(n) A^n = C(N,n)^{-1} sum_k C(k,n) Tr_{n+1..k} G_{N,k}.
double reconstruction_defect(const MixedState& state, const MatC& A, int n);

// sum_k f(k/N) Tr G_{N,k}: expectation of f under the localized particle
// count distribution.
double mass_statistic(const MixedState& state, const MatC& A,
                      const std::function<double(double)>& f);

// Signed gap (k/N)^n - C(k,n)/C(N,n) over 0 <= k <= N, its proven ceiling
// (n-1)^2/(N-n+1), and whether every gap is nonnegative.
struct BinomialRatioCheck {
  double max_difference = 0.0;
  double bound = 0.0;
  bool nonnegative = true;
};
BinomialRatioCheck binomial_ratio_check(int N, int n);

}  // namespace bmfl

#endif
