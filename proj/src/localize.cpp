#include "bmfl/localize.hpp"

#include <cmath>
#include <vector>

#include "bmfl/rdm.hpp"

namespace bmfl {

namespace {

struct Splitting {
  MatC V;          // eigenvectors of A (identity on the diagonal fast path)
  VecR a;          // eigenvalues clamped to [0, 1]
  VecR b2;         // complementary weights (1-a)(1+a)
  bool rotated;    // false when A was already diagonal in mode coordinates
};

Splitting split_operator(const MatC& A, int modes) {
  if (A.rows() != modes || A.cols() != modes) {
    throw validation_error("localize: operator size does not match mode count");
  }
  if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw validation_error("localize: operator must be hermitian");
  }
  Splitting s;
  double off = 0.0;
  for (int i = 0; i < modes; ++i)
    for (int j = 0; j < modes; ++j)
      if (i != j) off = std::max(off, std::abs(A(i, j)));

  if (off <= 1e-14) {
    s.V = MatC::Identity(modes, modes);
    s.a = A.diagonal().real();
    s.rotated = false;
  } else {
    Eigen::SelfAdjointEigenSolver<MatC> es(A);
    s.V = es.eigenvectors();
    s.a = es.eigenvalues();
    s.rotated = true;
  }
  for (int i = 0; i < modes; ++i) {
    if (s.a[i] < -1e-10 || s.a[i] > 1.0 + 1e-10) {
      throw validation_error("localize: operator spectrum must lie in [0, 1]");
    }
    s.a[i] = std::min(1.0, std::max(0.0, s.a[i]));
  }
  s.b2 = ((1.0 - s.a.array()) * (1.0 + s.a.array())).matrix();
  return s;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double acc = 1.0;
  for (int t = 1; t <= k; ++t) acc *= static_cast<double>(n - k + t) / t;
  return acc;
}

// sqrt(prod_j C(m_j + s_j, s_j)), as in the partial trace machinery.
double trace_weight(const int* m, const int* s, int d) {
  double prod = 1.0;
  for (int j = 0; j < d; ++j) {
    for (int t = 1; t <= s[j]; ++t) {
      prod *= static_cast<double>(m[j] + t) / static_cast<double>(t);
    }
  }
  return std::sqrt(prod);
}

// Components in the eigenbasis of A; optionally traces only.
std::vector<MatC> eigenbasis_components(const MixedState& state, const Splitting& sp,
                                        bool traces_only, std::vector<double>* traces) {
  const int d = state.basis.modes();
  const int N = state.basis.particles();

  // State in the eigenmode occupation basis.
  MatC gamma;
  if (sp.rotated) {
    const MatC W = symmetric_power(sp.V, N);
    gamma = W.adjoint() * state.matrix * W;
  } else {
    gamma = state.matrix;
  }

  // Powers of the localizing weights per mode.
  std::vector<std::vector<double>> apow(d), b2pow(d);
  for (int j = 0; j < d; ++j) {
    apow[j].assign(2 * N + 1, 1.0);
    for (int t = 1; t <= 2 * N; ++t) apow[j][t] = apow[j][t - 1] * sp.a[j];
    b2pow[j].assign(N + 1, 1.0);
    for (int t = 1; t <= N; ++t) b2pow[j][t] = b2pow[j][t - 1] * sp.b2[j];
  }

  std::vector<MatC> comps(N + 1);
  if (traces) traces->assign(N + 1, 0.0);
  std::vector<int> sum(d);
  for (int k = 0; k <= N; ++k) {
    OccupationBasis kept(d, k);
    OccupationBasis rest(d, N - k);
    MatC out;
    if (!traces_only) out = MatC::Zero(kept.size(), kept.size());
    std::vector<double> weights(kept.size());
    std::vector<Eigen::Index> pos(kept.size());
    std::vector<double> amono(kept.size());
    for (std::size_t si = 0; si < rest.size(); ++si) {
      const int* s = rest.state(si);
      double bmono = 1.0;
      for (int j = 0; j < d; ++j) bmono *= b2pow[j][s[j]];
      if (bmono == 0.0) continue;
      for (std::size_t mi = 0; mi < kept.size(); ++mi) {
        const int* m = kept.state(mi);
        for (int j = 0; j < d; ++j) sum[j] = m[j] + s[j];
        weights[mi] = trace_weight(m, s, d);
        pos[mi] = static_cast<Eigen::Index>(state.basis.index_of(sum));
        double mono = 1.0;
        for (int j = 0; j < d; ++j) mono *= apow[j][m[j]];
        amono[mi] = mono;
      }
      if (traces_only) {
        double acc = 0.0;
        for (std::size_t mi = 0; mi < kept.size(); ++mi) {
          acc += amono[mi] * amono[mi] * weights[mi] * weights[mi] * bmono *
                 gamma(pos[mi], pos[mi]).real();
        }
        (*traces)[k] += acc;
      } else {
        for (std::size_t a = 0; a < kept.size(); ++a) {
          for (std::size_t b = 0; b < kept.size(); ++b) {
            out(a, b) += amono[a] * amono[b] * weights[a] * weights[b] * bmono *
                         gamma(pos[a], pos[b]);
          }
        }
      }
    }
    if (!traces_only) {
      if (traces) (*traces)[k] = out.trace().real();
      comps[k] = std::move(out);
    }
  }
  return comps;
}

}  // namespace

LocalizedState localize(const MixedState& state, const MatC& A) {
  const int d = state.basis.modes();
  const int N = state.basis.particles();
  const Splitting sp = split_operator(A, d);
  std::vector<MatC> comps = eigenbasis_components(state, sp, false, nullptr);
  if (sp.rotated) {
    for (int k = 0; k <= N; ++k) {
      const MatC Wk = symmetric_power(sp.V, k);
      comps[k] = Wk * comps[k] * Wk.adjoint();
    }
  }
  LocalizedState out;
  out.modes = d;
  out.particles = N;
  out.components = std::move(comps);
  return out;
}

std::vector<double> localized_trace_profile(const MixedState& state, const MatC& A) {
  const Splitting sp = split_operator(A, state.basis.modes());
  std::vector<double> traces;
  eigenbasis_components(state, sp, true, &traces);
  return traces;
}

std::vector<double> component_traces(const LocalizedState& loc) {
  std::vector<double> out(loc.components.size());
  for (std::size_t k = 0; k < loc.components.size(); ++k) {
    out[k] = loc.components[k].trace().real();
  }
  return out;
}

MatC complement_operator(const MatC& A) {
  Eigen::SelfAdjointEigenSolver<MatC> es(A);
  VecR a = es.eigenvalues();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < -1e-10 || a[i] > 1.0 + 1e-10) {
      throw validation_error("complement_operator: spectrum must lie in [0, 1]");
    }
    a[i] = std::min(1.0, std::max(0.0, a[i]));
  }
  const VecR b = ((1.0 - a.array()) * (1.0 + a.array())).sqrt().matrix();
  return es.eigenvectors() * b.asDiagonal() * es.eigenvectors().adjoint();
}

double duality_defect(const MixedState& state, const MatC& A) {
  const int N = state.basis.particles();
  const std::vector<double> ta = localized_trace_profile(state, A);
  const std::vector<double> tb = localized_trace_profile(state, complement_operator(A));
  double defect = 0.0;
  for (int k = 0; k <= N; ++k) {
    defect = std::max(defect, std::abs(ta[k] - tb[N - k]));
  }
  return defect;
}

double reconstruction_defect(const MixedState& state, const MatC& A, int n) {
  const int d = state.basis.modes();
  const int N = state.basis.particles();
  if (n < 1 || n > N) throw validation_error("reconstruction_defect: order out of range");

  const MatC An = symmetric_power(A, n);
  const MatC gamma_n = reduce(state, n);
  const MatC lhs = An * gamma_n * An.adjoint();

  const LocalizedState loc = localize(state, A);
  OccupationBasis target(d, n);
  MatC rhs = MatC::Zero(target.size(), target.size());
  const double cNn = binom(N, n);
  for (int k = n; k <= N; ++k) {
    OccupationBasis basis_k(d, k);
    rhs += (binom(k, n) / cNn) * partial_trace(basis_k, loc.components[k], k - n);
  }
  return trace_norm(lhs - rhs);
}

double mass_statistic(const MixedState& state, const MatC& A,
                      const std::function<double(double)>& f) {
  const int N = state.basis.particles();
  const std::vector<double> traces = localized_trace_profile(state, A);
  double acc = 0.0;
  for (int k = 0; k <= N; ++k) {
    acc += f(static_cast<double>(k) / N) * traces[k];
  }
  return acc;
}

BinomialRatioCheck binomial_ratio_check(int N, int n) {
  if (n < 1 || n > N) throw validation_error("binomial_ratio_check: needs 1 <= n <= N");
  BinomialRatioCheck out;
  out.bound = static_cast<double>(n - 1) * (n - 1) / (N - n + 1);
  for (int k = 0; k <= N; ++k) {
    const double diff = std::pow(static_cast<double>(k) / N, n) - binom(k, n) / binom(N, n);
    out.max_difference = std::max(out.max_difference, diff);
    if (diff < -1e-15) out.nonnegative = false;
  }
  return out;
}

}  // namespace bmfl
