#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "bmfl/gibbs.hpp"
#include "bmfl/hartree.hpp"
#include "bmfl/model.hpp"
#include "bmfl/rdm.hpp"
#include "bmfl/spectra.hpp"

using namespace bmfl;

namespace {

std::string models_dir() { return BMFL_MODELS_DIR; }

ModelSpec named(const char* stem) {
  return load_model(models_dir() + "/" + stem + ".json");
}

}  // namespace

TEST_CASE("single mode: the Hamiltonian is a scalar at every temperature") {
  const ModelSpec m = parse_model(
      R"({"modes": 1, "one_body": [[[0.7, 0]]],
          "two_body": {"kind": "onsite", "U": 0.6}})",
      "inline single mode");
  // 3 * 0.7 kinetic plus 0.6 * 3*2/2 / (3-1) pair energy = 3.0
  for (double beta : {0.3, 5.0}) {
    const GibbsResult g = free_energy(m, 3, beta);
    CHECK(std::abs(g.free_energy - 3.0) < 1e-12);
    CHECK(std::abs(g.state.matrix(0, 0).real() - 1.0) < 1e-14);
    CHECK(std::abs(g.gamma1(0, 0).real() - 1.0) < 1e-12);
  }
}

TEST_CASE("free dimer pair matches the three-level closed form") {
  const ModelSpec m = named("dimer_free");
  for (double beta : {0.7, 1.0}) {
    const GibbsResult g = free_energy(m, 2, beta);
    const double closed =
        -std::log(std::exp(2.0 * beta) + 1.0 + std::exp(-2.0 * beta)) / beta;
    CHECK(g.free_energy == doctest::Approx(closed).epsilon(1e-13));
  }
}

TEST_CASE("gibbs state is a density matrix with consistent reductions") {
  const ModelSpec m = named("dimer_repulsive");
  const GibbsResult g = free_energy(m, 4, 1.3);
  const MatC& G = g.state.matrix;
  CHECK(std::abs(G.trace().real() - 1.0) < 1e-12);
  CHECK((G - G.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<MatC> eg(G);
  CHECK(eg.eigenvalues()(0) > -1e-12);
  CHECK(std::abs(g.gamma1.trace().real() - 1.0) < 1e-12);
  CHECK(std::abs(g.gamma2.trace().real() - 1.0) < 1e-12);

  // mean energy through the reduced matrices equals the softmax average of
  // the spectrum, computed here straight from a dense solve
  OccupationBasis basis(m.modes, 4);
  const MatC H(assemble(m, basis));
  Eigen::SelfAdjointEigenSolver<MatC> es(H);
  const VecR& e = es.eigenvalues();
  VecR w = (-1.3 * (e.array() - e(0))).exp();
  const double mean = (w.array() * e.array()).sum() / w.sum();
  CHECK(std::abs(4.0 * energy_per_particle(m, g.state) - mean) < 1e-9);

  // a one-particle result carries no pair matrix
  CHECK(free_energy(m, 1, 1.0).gamma2.size() == 0);
}

TEST_CASE("free energy sits under the ground energy and rises with beta") {
  const ModelSpec m = named("dimer_repulsive");
  const GroundState g4 = ground_state(m, 4);
  double prev = -1e300;
  for (double beta : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double f = free_energy(m, 4, beta).free_energy;
    CHECK(f <= g4.energy + 1e-9);
    CHECK(f >= prev);
    prev = f;
  }
  // low temperature collapses onto the ground level
  const double cold = free_energy(m, 4, 50.0 / g4.gap).free_energy;
  CHECK(std::abs(cold - g4.energy) < 1e-6);
}

TEST_CASE("non-interacting enumeration has closed forms") {
  // one mode: N particles each at kappa
  CHECK(std::abs(noninteracting_free_energy({0.4}, 5, 1.7) - 2.0) < 1e-12);
  // two modes {0, kappa}: geometric sum over the excited count
  const double kappa = 0.8, beta = 1.1;
  const int N = 7;
  const double closed =
      -std::log((1.0 - std::exp(-beta * kappa * (N + 1))) /
                (1.0 - std::exp(-beta * kappa))) /
      beta;
  CHECK(noninteracting_free_energy({0.0, kappa}, N, beta) ==
        doctest::Approx(closed).epsilon(1e-13));
  // entry order is immaterial
  CHECK(noninteracting_free_energy({kappa, 0.0}, N, beta) ==
        doctest::Approx(closed).epsilon(1e-13));
  CHECK_THROWS_AS(noninteracting_free_energy({}, 3, 1.0), validation_error);
  CHECK_THROWS_AS(noninteracting_free_energy({0.0}, 3, 0.0), validation_error);
  CHECK_THROWS_AS(noninteracting_free_energy({0.0}, 0, 1.0), validation_error);
}

TEST_CASE("interacting and enumerated free energies agree at U = 0") {
  const ModelSpec m = named("dimer_free");
  for (int n = 1; n <= 6; ++n) {
    for (double beta : {0.5, 2.0}) {
      const double dense = free_energy(m, n, beta).free_energy;
      const double enumerated =
          noninteracting_free_energy({-1.0, 1.0}, n, beta);
      CHECK(std::abs(dense - enumerated) < 1e-10);
    }
  }
}

TEST_CASE("condensation tail: two-level closed form and exact ratio") {
  std::vector<int> sched;
  for (int n = 1; n <= 12; ++n) sched.push_back(n);
  const std::vector<double> defects = condensation_tail({0.0, 1.0}, sched, 1.0);
  for (int n = 1; n <= 12; ++n) {
    const double expect = std::exp(-(n + 1.0)) / (1.0 - std::exp(-1.0));
    CHECK(std::abs(defects[n - 1] - expect) < 1e-12);
  }
  for (std::size_t i = 1; i < defects.size(); ++i) {
    CHECK(defects[i] < defects[i - 1]);
    CHECK(std::abs(defects[i] / defects[i - 1] - std::exp(-1.0)) < 1e-9);
  }
}

TEST_CASE("condensation tail: single mode is already condensed") {
  const std::vector<double> defects = condensation_tail({0.3}, {1, 2, 3}, 2.0);
  for (double d : defects) CHECK(std::abs(d) < 1e-15);
}

TEST_CASE("condensation tail: gapped three-level decay") {
  // the asymptotic ratio e^{-beta(k2-k1)} emerges once the k3 channel has
  // died off; the early window overshoots the gate, so start at N = 6
  std::vector<int> sched;
  for (int n = 6; n <= 12; ++n) sched.push_back(n);
  const std::vector<double> defects =
      condensation_tail({0.0, 2.0, 3.5}, sched, 1.0);
  const double gate = std::exp(-2.0) + 1e-6;
  for (std::size_t i = 1; i < defects.size(); ++i) {
    CHECK(defects[i] < defects[i - 1]);
    CHECK(defects[i] / defects[i - 1] <= gate);
  }

  CHECK_THROWS_AS(condensation_tail({0.0, 0.0, 1.0}, {1, 2}, 1.0),
                  validation_error);
  CHECK_THROWS_AS(condensation_tail({0.0, 5e-9, 1.0}, {1, 2}, 1.0),
                  validation_error);
  CHECK_THROWS_AS(condensation_tail({0.0, 1.0}, {}, 1.0), validation_error);
  CHECK_THROWS_AS(condensation_tail({0.0, 1.0}, {2, 2}, 1.0),
                  validation_error);
}

TEST_CASE("fixed-beta sweep closes in on the Hartree level") {
  const ModelSpec m = named("dimer_repulsive");
  const TemperatureSweep s = finite_temperature_sweep(m, {2, 4, 8, 16}, 2.0);
  CHECK(s.hartree_energy == doctest::Approx(-0.75).epsilon(1e-8));
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const TemperatureRecord& r = s.rows[i];
    CHECK(r.free_energy <= r.ground_energy + 1e-9);
    if (i > 0) CHECK(r.gap_to_limit < s.rows[i - 1].gap_to_limit);
  }
}

TEST_CASE("huge beta reproduces the zero-temperature sweep") {
  const ModelSpec m = named("dimer_repulsive");
  const TemperatureSweep s = finite_temperature_sweep(m, {2, 4}, 50.0);
  for (const TemperatureRecord& r : s.rows)
    CHECK(std::abs(r.free_energy - r.ground_energy) < 1e-6);
}

TEST_CASE("non-interacting sweep rides the enumeration") {
  const ModelSpec m = named("dimer_free");
  const TemperatureSweep s = finite_temperature_sweep(m, {1, 2, 3, 4}, 1.0);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    const TemperatureRecord& r = s.rows[i];
    const double enumerated =
        noninteracting_free_energy({-1.0, 1.0}, r.particles, 1.0);
    CHECK(std::abs(r.free_energy - enumerated) < 1e-10);
    if (i > 0) CHECK(r.gap_to_limit < s.rows[i - 1].gap_to_limit);
  }
}

TEST_CASE("gibbs computations respect their caps and argument gates") {
  const ModelSpec r3 = named("ring3_attractive");
  CHECK_THROWS_AS(free_energy(r3, 200, 1.0), capacity_error);  // dim 20301
  CHECK_THROWS_AS(free_energy(r3, 5, 1.0, 10), capacity_error);
  CHECK_THROWS_AS(free_energy(r3, 5, 0.0), validation_error);
  CHECK_THROWS_AS(free_energy(r3, 5, -2.0), validation_error);
  CHECK_THROWS_AS(free_energy(r3, 0, 1.0), validation_error);
  CHECK_THROWS_AS(finite_temperature_sweep(r3, {2, 3}, 0.0), validation_error);
  CHECK_THROWS_AS(finite_temperature_sweep(r3, {3, 2}, 1.0), validation_error);
}
