#include "bmfl/rdm.hpp"

#include <cmath>
#include <vector>

namespace bmfl {

namespace {

// sqrt(prod_j C(m_j + s_j, s_j)): the weight with which the residual
// occupation s contributes to the (m, m') block of a partial trace.
double trace_weight(const int* m, const int* s, int d) {
  double prod = 1.0;
  for (int j = 0; j < d; ++j) {
    for (int t = 1; t <= s[j]; ++t) {
      prod *= static_cast<double>(m[j] + t) / static_cast<double>(t);
    }
  }
  return std::sqrt(prod);
}

double binom(int n, int k) {
  double acc = 1.0;
  for (int t = 1; t <= k; ++t) acc *= static_cast<double>(n - k + t) / t;
  return acc;
}

}  // namespace

MatC partial_trace(const OccupationBasis& basis, const MatC& gamma, int traced) {
  const int d = basis.modes();
  const int M = basis.particles();
  if (traced < 0 || traced > M) {
    throw validation_error("partial_trace: traced count out of range");
  }
  if (gamma.rows() != static_cast<Eigen::Index>(basis.size()) ||
      gamma.cols() != gamma.rows()) {
    throw validation_error("partial_trace: matrix does not match basis");
  }
  if (traced == 0) return gamma;

  const int k = M - traced;
  OccupationBasis kept(d, k);
  OccupationBasis rest(d, traced);
  const double norm = 1.0 / binom(M, traced);

  MatC out = MatC::Zero(kept.size(), kept.size());
  std::vector<int> sum(d);
  std::vector<double> weights(kept.size());
  std::vector<Eigen::Index> positions(kept.size());
  for (std::size_t si = 0; si < rest.size(); ++si) {
    const int* s = rest.state(si);
    for (std::size_t mi = 0; mi < kept.size(); ++mi) {
      const int* m = kept.state(mi);
      for (int j = 0; j < d; ++j) sum[j] = m[j] + s[j];
      weights[mi] = trace_weight(m, s, d);
      positions[mi] = static_cast<Eigen::Index>(basis.index_of(sum));
    }
    for (std::size_t a = 0; a < kept.size(); ++a) {
      for (std::size_t b = 0; b < kept.size(); ++b) {
        out(a, b) += norm * weights[a] * weights[b] * gamma(positions[a], positions[b]);
      }
    }
  }
  return out;
}

MatC reduce(const OccupationBasis& basis, const VecC& psi, int k) {
  const int d = basis.modes();
  const int N = basis.particles();
  if (k < 0 || k > N) throw validation_error("reduce: order out of range");
  if (psi.size() != static_cast<Eigen::Index>(basis.size())) {
    throw validation_error("reduce: state length does not match basis");
  }
  OccupationBasis kept(d, k);
  OccupationBasis rest(d, N - k);
  const double norm = 1.0 / binom(N, N - k);

  MatC out = MatC::Zero(kept.size(), kept.size());
  std::vector<int> sum(d);
  VecC v(kept.size());
  for (std::size_t si = 0; si < rest.size(); ++si) {
    const int* s = rest.state(si);
    for (std::size_t mi = 0; mi < kept.size(); ++mi) {
      const int* m = kept.state(mi);
      for (int j = 0; j < d; ++j) sum[j] = m[j] + s[j];
      v[static_cast<Eigen::Index>(mi)] =
          trace_weight(m, s, d) *
          psi[static_cast<Eigen::Index>(basis.index_of(sum))];
    }
    out.noalias() += norm * (v * v.adjoint());
  }
  return out;
}

MatC reduce(const MixedState& state, int k) {
  return partial_trace(state.basis, state.matrix, state.basis.particles() - k);
}

double consistency_defect(const MixedState& state, int k, int n) {
  if (k < 0 || n < 1 || k + n > state.basis.particles()) {
    throw validation_error("consistency_defect: orders out of range");
  }
  const MatC big = reduce(state, k + n);
  OccupationBasis big_basis(state.basis.modes(), k + n);
  const MatC traced = partial_trace(big_basis, big, n);
  return trace_norm(traced - reduce(state, k));
}

MatC pair_embedding(int modes) {
  const int d = modes;
  OccupationBasis pairs(d, 2);
  MatC E = MatC::Zero(d * d, pairs.size());
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    const int* m = pairs.state(c);
    int i = -1, j = -1;
    for (int s = 0; s < d; ++s) {
      if (m[s] == 2) i = j = s;
      if (m[s] == 1) (i < 0 ? i : j) = s;
    }
    if (i == j) {
      E(i * d + i, c) = 1.0;
    } else {
      E(i * d + j, c) = 1.0 / std::sqrt(2.0);
      E(j * d + i, c) = 1.0 / std::sqrt(2.0);
    }
  }
  return E;
}

double energy_per_particle(const ModelSpec& model, const MixedState& state) {
  const int N = state.basis.particles();
  if (N < 1) throw validation_error("energy_per_particle: needs at least one particle");
  const MatC gamma1 = reduce(state, 1);
  const double one_body = (model.one_body() * gamma1).trace().real();
  if (N == 1) return one_body;
  const MatC gamma2 = reduce(state, 2);
  const MatC E = pair_embedding(model.modes);
  const MatC w_sym = E.adjoint() * model.two_body() * E;
  return one_body + 0.5 * (w_sym * gamma2).trace().real();
}

double pair_energy_per_particle(const ModelSpec& model, const MixedState& state) {
  const int N = state.basis.particles();
  if (N < 2) throw validation_error("pair_energy_per_particle: needs N >= 2");
  const MatC gamma2 = reduce(state, 2);
  OccupationBasis pair_basis(model.modes, 2);
  const MatC H2 = MatC(assemble(model, pair_basis));
  return 0.5 * (H2 * gamma2).trace().real();
}

double trace_norm(const MatC& A) {
  return Eigen::JacobiSVD<MatC>(A).singularValues().sum();
}

double fidelity(const MatC& a, const MatC& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw validation_error("fidelity: shape mismatch");
  Eigen::SelfAdjointEigenSolver<MatC> ea(a);
  VecR lam = ea.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const MatC sqrt_a =
      ea.eigenvectors() * lam.asDiagonal() * ea.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<MatC> em(sqrt_a * b * sqrt_a);
  const double root_sum = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return root_sum * root_sum;
}

}  // namespace bmfl
