#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "bmfl/definetti.hpp"
#include "bmfl/fock.hpp"
#include "bmfl/rdm.hpp"
#include "tensor_oracle.hpp"

using namespace bmfl;

namespace {

VecC unit2(double a0, double a1) {
  VecC u(2);
  u << cxd(a0, 0.0), cxd(a1, 0.0);
  return u / u.norm();
}

MeasureAtom atom(double w, const VecC& u) { return MeasureAtom{w, u}; }

}  // namespace

TEST_CASE("phase canonicalization pins the dominant coefficient") {
  VecC u(3);
  u << cxd(0.2, 0.3), cxd(-0.1, 0.7), cxd(0.05, -0.02);
  u /= u.norm();
  const cxd phase = std::polar(1.0, 1.234);
  const DeFinettiMeasure mu = make_measure(3, {atom(1.0, phase * u)});
  const VecC& v = mu.atoms[0].vector;
  // Mode 1 has the largest modulus; its canonical value is real >= 0.
  CHECK(std::abs(v[1].imag()) < 1e-14);
  CHECK(v[1].real() > 0.0);
  // Canonical form ignores the input phase entirely.
  const DeFinettiMeasure mu2 = make_measure(3, {atom(1.0, u)});
  CHECK((mu.atoms[0].vector - mu2.atoms[0].vector).norm() < 1e-13);
}

TEST_CASE("measure JSON parses to the canonical in-memory form") {
  const char* text = R"({
    "atoms": [
      {"weight": 0.25, "vector": [[0.0, 1.0], [0.0, 0.0]]},
      {"weight": 0.75, "vector": [[0.6, 0.0], [0.0, 0.8]]}
    ]
  })";
  const DeFinettiMeasure mu = parse_measure(text, "inline");
  REQUIRE(mu.modes == 2);
  REQUIRE(mu.atoms.size() == 2);
  CHECK(mu.atoms[0].weight == doctest::Approx(0.25));
  // [i, 0] canonicalizes to [1, 0].
  CHECK(std::abs(mu.atoms[0].vector[0] - cxd(1.0, 0.0)) < 1e-15);
  // [0.6, 0.8i] rotates so the dominant entry 0.8i becomes 0.8.
  CHECK(std::abs(mu.atoms[1].vector[1] - cxd(0.8, 0.0)) < 1e-15);
  CHECK(std::abs(std::abs(mu.atoms[1].vector[0]) - 0.6) < 1e-15);
}

TEST_CASE("measure validation rejects malformed input") {
  VecC e0 = VecC::Zero(2);
  e0[0] = 1.0;
  CHECK_THROWS_AS(make_measure(2, {atom(0.5, e0)}), validation_error);
  CHECK_THROWS_AS(make_measure(2, {atom(-0.2, e0), atom(1.2, e0)}),
                  validation_error);
  CHECK_THROWS_AS(make_measure(2, {atom(1.0, 1.2 * e0)}), validation_error);
  CHECK_THROWS_AS(make_measure(3, {atom(1.0, e0)}), validation_error);
  CHECK_THROWS_AS(parse_measure("{", "inline"), validation_error);
  CHECK_THROWS_AS(parse_measure(R"({"atoms": []})", "inline"),
                  validation_error);
  // Mixed mode counts across atoms.
  CHECK_THROWS_AS(parse_measure(R"({"atoms": [
    {"weight": 0.5, "vector": [[1.0, 0.0]]},
    {"weight": 0.5, "vector": [[1.0, 0.0], [0.0, 0.0]]}
  ]})",
                                "inline"),
                  validation_error);
}

TEST_CASE("hierarchy matches the tensor-power oracle") {
  const int d = 3;
  VecC u1(d), u2(d);
  u1 << cxd(0.3, 0.4), cxd(0.5, -0.1), cxd(0.2, 0.6);
  u1 /= u1.norm();
  u2 << cxd(0.1, 0.0), cxd(-0.3, 0.2), cxd(0.4, 0.1);
  u2 *= 0.5 / u2.norm();  // interior atom, norm 1/2
  const DeFinettiMeasure mu = make_measure(d, {atom(0.6, u1), atom(0.4, u2)});

  for (int k = 1; k <= 3; ++k) {
    const OccupationBasis basis(d, k);
    const MatC E = oracle::embed_matrix(basis);
    MatC want = MatC::Zero(basis.size(), basis.size());
    for (const MeasureAtom& a : mu.atoms) {
      const VecC psi = E.adjoint() * oracle::kron_power(a.vector, k);
      want += a.weight * psi * psi.adjoint();
    }
    const MatC got = hierarchy(mu, k);
    CHECK((got - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(hierarchy_trace(mu, k) ==
          doctest::Approx(got.trace().real()).epsilon(1e-12));
  }
}

TEST_CASE("hierarchy trace follows the interior-mass power law") {
  VecC e0 = VecC::Zero(2), half = VecC::Zero(2);
  e0[0] = 1.0;
  half[1] = 0.5;  // squared norm 1/4
  const DeFinettiMeasure mu = make_measure(2, {atom(0.5, e0), atom(0.5, half)});
  CHECK(hierarchy_trace(mu, 0) == doctest::Approx(1.0));
  CHECK(hierarchy_trace(mu, 1) == doctest::Approx(0.625));
  // 0.5 * 1 + 0.5 * (1/4)^2
  CHECK(hierarchy_trace(mu, 2) == doctest::Approx(0.53125));
  const MatC h0 = hierarchy(mu, 0);
  REQUIRE(h0.rows() == 1);
  CHECK(std::abs(h0(0, 0) - cxd(1.0, 0.0)) < 1e-15);
}

TEST_CASE("unit-sphere measures reproduce their finite-N reductions exactly") {
  VecC u1 = unit2(1.0, 0.0);
  VecC u2 = unit2(1.0, 1.0);
  VecC u3(2);
  u3 << cxd(0.6, 0.2), cxd(-0.5, 0.59160797830996161);
  u3 /= u3.norm();
  const DeFinettiMeasure mu =
      make_measure(2, {atom(0.2, u1), atom(0.5, u2), atom(0.3, u3)});
  for (int N = 2; N <= 6; ++N) {
    for (int k = 0; k <= std::min(3, N); ++k) {
      CHECK(finite_N_match(mu, N, k) < 1e-10);
    }
  }
}

TEST_CASE("finite-N matching rejects interior mass") {
  VecC e0 = VecC::Zero(2), small = VecC::Zero(2);
  e0[0] = 1.0;
  small[1] = 0.5;
  const DeFinettiMeasure mu =
      make_measure(2, {atom(0.5, e0), atom(0.5, small)});
  CHECK_THROWS_WITH_AS(static_cast<void>(finite_N_match(mu, 4, 1)),
                       doctest::Contains("interior mass"), validation_error);
}

TEST_CASE("hierarchy reductions are monotone for interior measures") {
  // Tr_n applied to the (k+n)-th moment can only lose mass relative to the
  // k-th moment, and the loss is PSD with trace sum_i w_i L_i^k (1 - L_i^n)
  // for L_i = ||u_i||^2.
  VecC u1(2), u2(2);
  u1 << cxd(0.5, 0.1), cxd(0.2, -0.3);   // norm < 1
  u2 << cxd(0.1, 0.0), cxd(0.85, 0.2);   // norm < 1
  const DeFinettiMeasure mu = make_measure(2, {atom(0.4, u1), atom(0.6, u2)});
  for (int k = 1; k <= 2; ++k) {
    for (int n = 1; n <= 2; ++n) {
      const OccupationBasis big(2, k + n);
      const MatC diff =
          hierarchy(mu, k) - partial_trace(big, hierarchy(mu, k + n), n);
      Eigen::SelfAdjointEigenSolver<MatC> es(diff);
      CHECK(es.eigenvalues().minCoeff() > -1e-12);
      double want = 0.0;
      for (const MeasureAtom& a : mu.atoms) {
        const double L = a.vector.squaredNorm();
        want += a.weight * std::pow(L, k) * (1.0 - std::pow(L, n));
      }
      CHECK(diff.trace().real() == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("distinct measures can share low moments but split at k = 2") {
  VecC e0 = VecC::Zero(2), e1 = VecC::Zero(2);
  e0[0] = 1.0;
  e1[1] = 1.0;
  const DeFinettiMeasure site_mix =
      make_measure(2, {atom(0.5, e0), atom(0.5, e1)});
  const DeFinettiMeasure super_mix = make_measure(
      2, {atom(0.5, unit2(1.0, 1.0)), atom(0.5, unit2(1.0, -1.0))});
  CHECK(trace_norm(hierarchy(site_mix, 1) - hierarchy(super_mix, 1)) < 1e-14);
  const double gap2 =
      trace_norm(hierarchy(site_mix, 2) - hierarchy(super_mix, 2));
  CHECK(gap2 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("no atomic measure matches a pure first moment with vanishing second") {
  // With gamma^(1) = |u><u| any single atom must sit on the unit sphere with
  // full weight, forcing Tr gamma^(2) = 1 instead of 0.
  const VecC u = unit2(0.6, 0.8);
  const DeFinettiMeasure forced = make_measure(2, {atom(1.0, u)});
  CHECK(trace_norm(hierarchy(forced, 1) - u * u.adjoint()) < 1e-14);
  CHECK(hierarchy_trace(forced, 2) == doctest::Approx(1.0));

  // The least-squares fit cannot do better than the analytic floor
  // min_t (1-t)^2 + t^4 ~ 0.2893 on the squared misfit.
  const MatC gamma1 = u * u.adjoint();
  const MatC gamma2 = MatC::Zero(3, 3);
  const DeFinettiMeasure best = match_atoms(2, gamma1, gamma2, 1, 7);
  const double misfit = (hierarchy(best, 1) - gamma1).squaredNorm() +
                        (hierarchy(best, 2) - gamma2).squaredNorm();
  CHECK(misfit > 0.25);
}

TEST_CASE("moment matching recovers a two-atom measure") {
  const DeFinettiMeasure target =
      make_measure(2, {atom(0.4, unit2(1.0, 0.0)), atom(0.6, unit2(1.0, 1.0))});
  const MatC g1 = hierarchy(target, 1);
  const MatC g2 = hierarchy(target, 2);
  const DeFinettiMeasure fit = match_atoms(2, g1, g2, 2, 11);
  CHECK(trace_norm(hierarchy(fit, 1) - g1) < 1e-5);
  CHECK(trace_norm(hierarchy(fit, 2) - g2) < 1e-5);
  // Matching two moments pins the measure itself here: the third moment and
  // the atoms (sorted by weight) come out right too.
  CHECK(trace_norm(hierarchy(fit, 3) - hierarchy(target, 3)) < 1e-3);
  REQUIRE(fit.atoms.size() == 2);
  std::vector<MeasureAtom> got = fit.atoms;
  std::sort(got.begin(), got.end(),
            [](const MeasureAtom& a, const MeasureAtom& b) {
              return a.weight < b.weight;
            });
  CHECK(got[0].weight == doctest::Approx(0.4).epsilon(5e-3));
  CHECK(got[1].weight == doctest::Approx(0.6).epsilon(5e-3));
  CHECK((got[0].vector - target.atoms[0].vector).norm() < 5e-3);
  CHECK((got[1].vector - target.atoms[1].vector).norm() < 5e-3);
}

TEST_CASE("escaping families keep constant localized mass and flag weak") {
  for (double theta : {M_PI / 6.0, M_PI / 4.0}) {
    std::vector<MixedState> family;
    for (int N : {4, 6, 8}) {
      const int d = N + 1;
      VecC u = VecC::Zero(d);
      u[0] = std::cos(theta);
      u[d - 1] = std::sin(theta);
      const OccupationBasis basis(d, N);
      family.push_back(to_mixed(PureState{basis, product_state(basis, u)}));
    }
    const ConvergenceReport rep = strong_convergence_report(family, {0});
    const double want = std::cos(theta) * std::cos(theta);
    REQUIRE(rep.rows.size() == 3);
    for (const ConvergenceRow& row : rep.rows) {
      CHECK(row.localized_mass == doctest::Approx(want).epsilon(1e-9));
    }
    CHECK(rep.extrapolated_mass == doctest::Approx(want).epsilon(1e-6));
    CHECK(rep.regime == "weak-with-escape");
  }
}

TEST_CASE("a fixed condensate reports the strong regime") {
  std::vector<MixedState> family;
  for (int N : {3, 5, 7}) {
    VecC u = VecC::Zero(3);
    u[0] = std::sqrt(0.995);
    u[1] = std::sqrt(0.005);
    const OccupationBasis basis(3, N);
    family.push_back(to_mixed(PureState{basis, product_state(basis, u)}));
  }
  const ConvergenceReport rep = strong_convergence_report(family, {0, 1});
  for (const ConvergenceRow& row : rep.rows) {
    CHECK(row.localized_mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(rep.regime == "strong");
}

TEST_CASE("partial escape mixes the two regimes linearly") {
  const double theta = M_PI / 3.0;
  const double stay = 0.7;
  std::vector<MixedState> family;
  for (int N : {4, 6}) {
    const int d = N + 1;
    VecC fixed = VecC::Zero(d), esc = VecC::Zero(d);
    fixed[0] = 1.0;
    esc[0] = std::cos(theta);
    esc[d - 1] = std::sin(theta);
    const OccupationBasis basis(d, N);
    const VecC a = product_state(basis, fixed);
    const VecC b = product_state(basis, esc);
    MixedState state{basis, stay * a * a.adjoint() + (1.0 - stay) * b * b.adjoint()};
    family.push_back(std::move(state));
  }
  const ConvergenceReport rep = strong_convergence_report(family, {0});
  const double want = stay + (1.0 - stay) * std::cos(theta) * std::cos(theta);
  for (const ConvergenceRow& row : rep.rows) {
    CHECK(row.localized_mass == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK(rep.regime == "weak-with-escape");
}

TEST_CASE("convergence report validates its inputs") {
  const OccupationBasis basis(2, 3);
  VecC u = unit2(1.0, 0.0);
  MixedState st = to_mixed(PureState{basis, product_state(basis, u)});
  CHECK_THROWS_AS(strong_convergence_report({}, {0}), validation_error);
  CHECK_THROWS_AS(strong_convergence_report({st}, {}), validation_error);
  CHECK_THROWS_AS(strong_convergence_report({st}, {5}), validation_error);
  CHECK_THROWS_AS(strong_convergence_report({st, st}, {0}), validation_error);
}
