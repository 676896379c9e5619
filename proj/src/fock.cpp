#include "bmfl/fock.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace bmfl {

std::size_t dimension_cap() {
  static const std::size_t cap = [] {
    const char* env = std::getenv("BMFL_DIM_CAP");
    if (env != nullptr) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end != env && v > 0) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(2000000);
  }();
  return cap;
}

namespace {

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  return (a > max - b) ? max : a + b;
}

}  // namespace

std::uint64_t OccupationBasis::Impl::choose(int n, int k) const {
  if (k < 0 || k > n) return 0;
  return binom[static_cast<std::size_t>(n) * binom_rows + k];
}

std::size_t OccupationBasis::dimension(int modes, int particles) {
  // binom(N+d-1, d-1) accumulated multiplicatively; saturate on overflow.
  long double acc = 1.0L;
  for (int i = 1; i < modes; ++i) {
    acc *= static_cast<long double>(particles + i) / i;
    if (acc > 1e18L) return std::numeric_limits<std::size_t>::max();
  }
  return static_cast<std::size_t>(acc + 0.5L);
}

OccupationBasis::OccupationBasis(int modes, int particles) {
  if (modes < 1) throw validation_error("occupation basis needs modes >= 1");
  if (particles < 0) throw validation_error("occupation basis needs particles >= 0");
  const std::size_t dim = dimension(modes, particles);
  if (dim > dimension_cap()) {
    throw capacity_error("basis dimension " + std::to_string(dim) +
                         " exceeds cap " + std::to_string(dimension_cap()));
  }

  auto impl = std::make_shared<Impl>();
  impl->modes = modes;
  impl->particles = particles;
  impl->dim = dim;

  // Pascal triangle up to N+d, saturating; used by index_of.
  impl->binom_rows = modes + particles + 1;
  impl->binom.assign(static_cast<std::size_t>(impl->binom_rows) * impl->binom_rows, 0);
  for (int n = 0; n < impl->binom_rows; ++n) {
    impl->binom[static_cast<std::size_t>(n) * impl->binom_rows] = 1;
    for (int k = 1; k <= n; ++k) {
      const std::uint64_t up = impl->binom[static_cast<std::size_t>(n - 1) * impl->binom_rows + k];
      const std::uint64_t upleft =
          impl->binom[static_cast<std::size_t>(n - 1) * impl->binom_rows + k - 1];
      impl->binom[static_cast<std::size_t>(n) * impl->binom_rows + k] =
          saturating_add(up, upleft);
    }
  }

  // Enumerate occupation vectors in decreasing lexicographic order.
  impl->flat.reserve(dim * static_cast<std::size_t>(modes));
  std::vector<int> n(modes, 0);
  n[0] = particles;
  while (true) {
    impl->flat.insert(impl->flat.end(), n.begin(), n.end());
    if (n[modes - 1] == particles) break;
    int j = modes - 2;
    while (j >= 0 && n[j] == 0) --j;
    int tail = 1;
    for (int i = j + 1; i < modes; ++i) {
      tail += n[i];
      n[i] = 0;
    }
    n[j] -= 1;
    n[j + 1] = tail;
  }
  impl_ = std::move(impl);
}

std::size_t OccupationBasis::index_of(const int* occ) const {
  const Impl& im = *impl_;
  const int d = im.modes;
  // Count the vectors that precede occ: they agree on a prefix and carry a
  // strictly larger entry at the first disagreement.
  std::uint64_t rank = 0;
  int remaining = im.particles;
  for (int j = 0; j + 1 < d; ++j) {
    const int nj = occ[j];
    if (nj < 0 || nj > remaining) {
      throw validation_error("occupation vector does not lie in this basis");
    }
    if (remaining - nj >= 1) {
      rank += im.choose(remaining - nj - 1 + d - 1 - j, d - 1 - j);
    }
    remaining -= nj;
  }
  if (occ[d - 1] != remaining) {
    throw validation_error("occupation vector does not sum to the particle number");
  }
  return static_cast<std::size_t>(rank);
}

VecC product_state(const OccupationBasis& basis, const VecC& u) {
  if (u.size() != basis.modes()) {
    throw validation_error("product_state: vector length does not match mode count");
  }
  const int d = basis.modes();
  const int N = basis.particles();
  VecC out(basis.size());
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    const int* n = basis.state(idx);
    cxd monomial = 1.0;
    for (int j = 0; j < d; ++j) {
      for (int t = 0; t < n[j]; ++t) monomial *= u[j];
    }
    double root_multinomial;
    if (N <= 20) {
      // Exact integer multinomial N!/prod n_j! as a product of binomials.
      std::uint64_t mult = 1;
      int partial = 0;
      for (int j = 0; j < d; ++j) {
        partial += n[j];
        std::uint64_t c = 1;
        for (int t = 1; t <= n[j]; ++t) {
          c = c * static_cast<std::uint64_t>(partial - n[j] + t) / t;
        }
        mult *= c;
      }
      root_multinomial = std::sqrt(static_cast<double>(mult));
    } else {
      double lg = std::lgamma(static_cast<double>(N) + 1.0);
      for (int j = 0; j < d; ++j) lg -= std::lgamma(static_cast<double>(n[j]) + 1.0);
      root_multinomial = std::exp(0.5 * lg);
    }
    out[static_cast<Eigen::Index>(idx)] = root_multinomial * monomial;
  }
  return out;
}

VecC apply_transition(const OccupationBasis& basis, const VecC& psi, int i, int j) {
  if (psi.size() != static_cast<Eigen::Index>(basis.size())) {
    throw validation_error("apply_transition: coefficient length does not match basis");
  }
  const int d = basis.modes();
  if (i < 0 || i >= d || j < 0 || j >= d) {
    throw validation_error("apply_transition: mode index out of range");
  }
  VecC out = VecC::Zero(psi.size());
  std::vector<int> scratch(d);
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    const cxd c = psi[static_cast<Eigen::Index>(idx)];
    if (c == cxd(0.0)) continue;
    const int* n = basis.state(idx);
    if (n[j] == 0) continue;
    if (i == j) {
      out[static_cast<Eigen::Index>(idx)] += c * static_cast<double>(n[i]);
      continue;
    }
    std::copy(n, n + d, scratch.begin());
    const double amp = std::sqrt(static_cast<double>(n[j])) *
                       std::sqrt(static_cast<double>(n[i] + 1));
    scratch[j] -= 1;
    scratch[i] += 1;
    out[static_cast<Eigen::Index>(basis.index_of(scratch))] += amp * c;
  }
  return out;
}

MatC symmetric_power(const MatC& V, int k) {
  const int d = static_cast<int>(V.rows());
  if (V.cols() != d) throw validation_error("symmetric_power: matrix must be square");
  if (k < 0) throw validation_error("symmetric_power: order must be >= 0");
  if (k == 0) return MatC::Ones(1, 1);

  std::vector<OccupationBasis> levels;
  levels.reserve(k + 1);
  for (int t = 0; t <= k; ++t) levels.emplace_back(d, t);
  const OccupationBasis& top = levels[k];

  MatC out(top.size(), top.size());
  std::vector<int> scratch(d);
  for (std::size_t col = 0; col < top.size(); ++col) {
    const int* m = top.state(col);
    // Expand prod_alpha (sum_j V_{j,alpha} adag_j)^{m_alpha} |vac>, one
    // creation operator at a time, then divide by sqrt(prod m_alpha!).
    VecC cur = VecC::Ones(1);
    int level = 0;
    double norm_fac = 1.0;
    for (int alpha = 0; alpha < d; ++alpha) {
      for (int rep = 0; rep < m[alpha]; ++rep) {
        norm_fac *= static_cast<double>(rep + 1);
        const OccupationBasis& src = levels[level];
        const OccupationBasis& dst = levels[level + 1];
        VecC next = VecC::Zero(dst.size());
        for (std::size_t s = 0; s < src.size(); ++s) {
          const cxd c = cur[static_cast<Eigen::Index>(s)];
          if (c == cxd(0.0)) continue;
          const int* n = src.state(s);
          std::copy(n, n + d, scratch.begin());
          for (int jj = 0; jj < d; ++jj) {
            const cxd v = V(jj, alpha);
            if (v == cxd(0.0)) continue;
            scratch[jj] += 1;
            next[static_cast<Eigen::Index>(dst.index_of(scratch))] +=
                v * std::sqrt(static_cast<double>(scratch[jj])) * c;
            scratch[jj] -= 1;
          }
        }
        cur.swap(next);
        ++level;
      }
    }
    out.col(static_cast<Eigen::Index>(col)) = cur / std::sqrt(norm_fac);
  }
  return out;
}

MatC mode_permutation(const OccupationBasis& basis, const std::vector<int>& perm) {
  const int d = basis.modes();
  if (static_cast<int>(perm.size()) != d) {
    throw validation_error("mode_permutation: permutation length mismatch");
  }
  std::vector<int> seen(d, 0);
  for (int p : perm) {
    if (p < 0 || p >= d || seen[p]++) {
      throw validation_error("mode_permutation: not a permutation");
    }
  }
  MatC P = MatC::Zero(basis.size(), basis.size());
  std::vector<int> scratch(d);
  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    const int* n = basis.state(idx);
    for (int j = 0; j < d; ++j) scratch[perm[j]] = n[j];
    P(static_cast<Eigen::Index>(basis.index_of(scratch)),
      static_cast<Eigen::Index>(idx)) = 1.0;
  }
  return P;
}

void canonicalize_phase(VecC& v) {
  Eigen::Index best = -1;
  double mag = 0.0;
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double m = std::abs(v[j]);
    if (m > mag + 1e-15) {
      mag = m;
      best = j;
    }
  }
  if (best < 0 || mag < 1e-300) return;
  v *= std::conj(v[best]) / mag;
  v[best] = cxd(std::abs(v[best]), 0.0);
}

MixedState to_mixed(const PureState& psi) {
  return MixedState{psi.basis, psi.amplitudes * psi.amplitudes.adjoint()};
}

}  // namespace bmfl
