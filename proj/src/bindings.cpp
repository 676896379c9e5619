#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "bmfl/definetti.hpp"
#include "bmfl/fock.hpp"
#include "bmfl/gibbs.hpp"
#include "bmfl/hartree.hpp"
#include "bmfl/localize.hpp"
#include "bmfl/model.hpp"
#include "bmfl/rdm.hpp"
#include "bmfl/spectra.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace bmfl;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Exact lattice bosons against their mean-field description: occupation "
      "bases, reduced density matrices, Hartree minimization, geometric "
      "localization, de Finetti measures, and Gibbs free energies.";

  py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<capacity_error>(m, "CapacityError", PyExc_RuntimeError);
  py::register_exception<convergence_error>(m, "ConvergenceError", PyExc_RuntimeError);

  m.def("dimension_cap", &dimension_cap,
        "Largest basis dimension the library will enumerate.");

  // fock
  py::class_<OccupationBasis>(m, "OccupationBasis")
      .def(py::init<int, int>(), "modes"_a, "particles"_a)
      .def_property_readonly("modes", &OccupationBasis::modes)
      .def_property_readonly("particles", &OccupationBasis::particles)
      .def("__len__", &OccupationBasis::size)
      .def("state",
           [](const OccupationBasis& b, std::size_t idx) {
             if (idx >= b.size()) throw py::index_error();
             const int* occ = b.state(idx);
             return std::vector<int>(occ, occ + b.modes());
           },
           "index"_a, "Occupation vector of the basis state at `index`.")
      .def("index_of",
           [](const OccupationBasis& b, const std::vector<int>& occ) {
             return b.index_of(occ);
           },
           "occupation"_a)
      .def_static("dimension", &OccupationBasis::dimension, "modes"_a,
                  "particles"_a);

  py::class_<PureState>(m, "PureState")
      .def_readonly("basis", &PureState::basis)
      .def_readonly("amplitudes", &PureState::amplitudes);

  py::class_<MixedState>(m, "MixedState")
      .def(py::init([](const OccupationBasis& basis, const MatC& matrix) {
             return MixedState{basis, matrix};
           }),
           "basis"_a, "matrix"_a)
      .def_readonly("basis", &MixedState::basis)
      .def_readonly("matrix", &MixedState::matrix);

  m.def("product_state", &product_state, "basis"_a, "u"_a,
        "Amplitudes of u^(ox N) in the occupation basis.");
  m.def("apply_transition", &apply_transition, "basis"_a, "psi"_a, "i"_a,
        "j"_a, "Apply adag_i a_j to a state vector.");
  m.def("symmetric_power", &symmetric_power, "V"_a, "k"_a);
  m.def("mode_permutation", &mode_permutation, "basis"_a, "perm"_a);
  m.def("canonicalize_phase",
        [](VecC v) {
          canonicalize_phase(v);
          return v;
        },
        "v"_a, "Copy with the global phase fixed.");
  m.def("to_mixed", &to_mixed, "psi"_a);

  // model
  py::class_<ModelSpec>(m, "ModelSpec")
      .def_readonly("name", &ModelSpec::name)
      .def_readonly("geometry", &ModelSpec::geometry)
      .def_readonly("modes", &ModelSpec::modes)
      .def_readonly("external_potential", &ModelSpec::external_potential)
      .def_readonly("source_hash", &ModelSpec::source_hash)
      .def_readonly("translation_invariant", &ModelSpec::translation_invariant)
      .def("one_body", &ModelSpec::one_body)
      .def("two_body", [](const ModelSpec& spec) { return spec.two_body(); });

  m.def("parse_model", &parse_model, "text"_a, "origin"_a = "<string>");
  m.def("load_model", &load_model, "path"_a);
  m.def("without_external_potential", &without_external_potential, "model"_a);
  m.def("with_coupling", &with_coupling, "model"_a, "factor"_a);
  m.def("assemble", &assemble, "model"_a, "basis"_a,
        "N-particle Hamiltonian as a sparse matrix.");
  m.def("scaled_assemble", &scaled_assemble, "model"_a, "basis"_a, "lam"_a);

  py::class_<RelativeBounds>(m, "RelativeBounds")
      .def_readonly("beta_minus", &RelativeBounds::beta_minus)
      .def_readonly("beta_plus", &RelativeBounds::beta_plus)
      .def_readonly("constant", &RelativeBounds::constant);
  m.def("relative_bounds", &relative_bounds, "model"_a);

  // rdm
  m.def("partial_trace", &partial_trace, "basis"_a, "gamma"_a, "traced"_a);
  m.def("reduce",
        py::overload_cast<const OccupationBasis&, const VecC&, int>(&reduce),
        "basis"_a, "psi"_a, "k"_a, "k-particle reduction of a pure state.");
  m.def("reduce", py::overload_cast<const MixedState&, int>(&reduce),
        "state"_a, "k"_a);
  m.def("consistency_defect", &consistency_defect, "state"_a, "k"_a, "n"_a);
  m.def("energy_per_particle", &energy_per_particle, "model"_a, "state"_a);
  m.def("pair_energy_per_particle", &pair_energy_per_particle, "model"_a,
        "state"_a);
  m.def("pair_embedding", &pair_embedding, "modes"_a);
  m.def("trace_norm", &trace_norm, "A"_a);
  m.def("fidelity", &fidelity, "a"_a, "b"_a);

  // spectra
  py::enum_<EigMethod>(m, "EigMethod")
      .value("automatic", EigMethod::automatic)
      .value("dense", EigMethod::dense)
      .value("iterative", EigMethod::iterative);

  py::class_<GroundState>(m, "GroundState")
      .def_readonly("energy", &GroundState::energy)
      .def_readonly("second", &GroundState::second)
      .def_readonly("gap", &GroundState::gap)
      .def_readonly("state", &GroundState::state)
      .def_readonly("residual", &GroundState::residual)
      .def_readonly("cycles", &GroundState::cycles)
      .def_readonly("dense", &GroundState::dense);

  m.def("ground_state", &ground_state, "model"_a, "particles"_a,
        "method"_a = EigMethod::automatic);
  m.def("ground_energy", &ground_energy, "model"_a, "particles"_a);

  py::class_<SweepRecord>(m, "SweepRecord")
      .def_readonly("particles", &SweepRecord::particles)
      .def_readonly("energy", &SweepRecord::energy)
      .def_readonly("energy_per_particle", &SweepRecord::energy_per_particle)
      .def_readonly("gap_to_limit", &SweepRecord::gap_to_limit)
      .def_readonly("overlap1", &SweepRecord::overlap1)
      .def_readonly("overlap2", &SweepRecord::overlap2)
      .def_readonly("residual", &SweepRecord::residual);

  py::class_<SweepReport>(m, "SweepReport")
      .def_readonly("hartree_energy", &SweepReport::hartree_energy)
      .def_readonly("hartree_minimizer", &SweepReport::hartree_minimizer)
      .def_readonly("rows", &SweepReport::rows);

  m.def("mean_field_sweep", &mean_field_sweep, "model"_a, "schedule"_a);
  m.def("model_symmetries", &model_symmetries, "model"_a);

  py::class_<OverlapReport>(m, "OverlapReport")
      .def_readonly("k", &OverlapReport::k)
      .def_readonly("orbit_size", &OverlapReport::orbit_size)
      .def_readonly("best_pure", &OverlapReport::best_pure)
      .def_readonly("mixture", &OverlapReport::mixture)
      .def_readonly("pure", &OverlapReport::pure);

  m.def("bec_overlap", &bec_overlap, "model"_a, "particles"_a, "k"_a);
  m.def("scaled_energy_per_particle", &scaled_energy_per_particle, "model"_a,
        "k"_a, "lam"_a);

  py::class_<ScaledEnergyScan>(m, "ScaledEnergyScan")
      .def_readonly("k", &ScaledEnergyScan::k)
      .def_readonly("lambdas", &ScaledEnergyScan::lambdas)
      .def_readonly("values", &ScaledEnergyScan::values)
      .def_readonly("precondition", &ScaledEnergyScan::precondition)
      .def_readonly("all_preconditions", &ScaledEnergyScan::all_preconditions)
      .def_readonly("monotone", &ScaledEnergyScan::monotone)
      .def_readonly("lipschitz", &ScaledEnergyScan::lipschitz)
      .def_readonly("lipschitz_ok", &ScaledEnergyScan::lipschitz_ok);

  m.def("scaled_energy_scan", &scaled_energy_scan, "model"_a, "k"_a,
        "points"_a = 21);
  m.def("uniform_limit_defect", &uniform_limit_defect, "model"_a, "k"_a,
        "N"_a);

  py::class_<NoBoundStateReport>(m, "NoBoundStateReport")
      .def_readonly("shift", &NoBoundStateReport::shift)
      .def_readonly("pair_energy", &NoBoundStateReport::pair_energy)
      .def_readonly("energies", &NoBoundStateReport::energies)
      .def_readonly("no_pair_binding", &NoBoundStateReport::no_pair_binding)
      .def_readonly("consistent", &NoBoundStateReport::consistent)
      .def_readonly("ordering", &NoBoundStateReport::ordering);

  m.def("no_bound_state_check", &no_bound_state_check, "model"_a,
        "max_particles"_a = 6);

  py::class_<LiebYauReport>(m, "LiebYauReport")
      .def_readonly("epsilon", &LiebYauReport::epsilon)
      .def_readonly("lhs", &LiebYauReport::lhs)
      .def_readonly("rhs", &LiebYauReport::rhs)
      .def_readonly("slack", &LiebYauReport::slack)
      .def_readonly("reference_spread", &LiebYauReport::reference_spread);

  m.def("lieb_yau_bound", &lieb_yau_bound, "model"_a, "particles"_a, "eps"_a);

  // hartree
  py::class_<MinimizeOptions>(m, "MinimizeOptions")
      .def(py::init([](int restarts, int max_iterations, double tolerance,
                       std::uint64_t seed) {
             MinimizeOptions o;
             o.restarts = restarts;
             o.max_iterations = max_iterations;
             o.tolerance = tolerance;
             o.seed = seed;
             return o;
           }),
           "restarts"_a = 16, "max_iterations"_a = 4000,
           "tolerance"_a = 1e-10, "seed"_a = 1)
      .def_readwrite("restarts", &MinimizeOptions::restarts)
      .def_readwrite("max_iterations", &MinimizeOptions::max_iterations)
      .def_readwrite("tolerance", &MinimizeOptions::tolerance)
      .def_readwrite("seed", &MinimizeOptions::seed);

  py::class_<HartreeResult>(m, "HartreeResult")
      .def_readonly("energy", &HartreeResult::energy)
      .def_readonly("minimizer", &HartreeResult::minimizer)
      .def_readonly("mass", &HartreeResult::mass)
      .def_readonly("iterations", &HartreeResult::iterations)
      .def_readonly("gradient_norm", &HartreeResult::gradient_norm)
      .def_readonly("restarts_used", &HartreeResult::restarts_used)
      .def_readonly("converged", &HartreeResult::converged);

  m.def("hartree_energy", &hartree_energy, "model"_a, "u"_a);
  m.def("mean_field_operator",
        py::overload_cast<const ModelSpec&, const MatC&>(&mean_field_operator),
        "model"_a, "gamma"_a);
  m.def("mean_field_operator",
        py::overload_cast<const ModelSpec&, const VecC&>(&mean_field_operator),
        "model"_a, "u"_a);
  m.def("hartree_gradient", &hartree_gradient, "model"_a, "u"_a);
  m.def("minimize", &minimize, "model"_a, "mass"_a = 1.0,
        "options"_a = MinimizeOptions{});

  py::class_<EnergyCurve>(m, "EnergyCurve")
      .def_readonly("mass", &EnergyCurve::mass)
      .def_readonly("with_potential", &EnergyCurve::with_potential)
      .def_readonly("without_potential", &EnergyCurve::without_potential)
      .def_readonly("margin", &EnergyCurve::margin)
      .def_readonly("strictness", &EnergyCurve::strictness)
      .def_readonly("strict_binding", &EnergyCurve::strict_binding)
      .def_readonly("kinetic_ground", &EnergyCurve::kinetic_ground)
      .def_readonly("all_converged", &EnergyCurve::all_converged);

  m.def("energy_curve", &energy_curve, "model"_a, "points"_a = 21,
        "options"_a = MinimizeOptions{}, "strictness"_a = 1e-6);

  py::class_<MixedHartreeResult>(m, "MixedHartreeResult")
      .def_readonly("energy", &MixedHartreeResult::energy)
      .def_readonly("iterations", &MixedHartreeResult::iterations)
      .def_readonly("gradient_norm", &MixedHartreeResult::gradient_norm)
      .def_readonly("converged", &MixedHartreeResult::converged);

  m.def("minimize_mixed", &minimize_mixed, "model"_a,
        "options"_a = MinimizeOptions{});

  // localize
  py::class_<LocalizedState>(m, "LocalizedState")
      .def_readonly("modes", &LocalizedState::modes)
      .def_readonly("particles", &LocalizedState::particles)
      .def_readonly("components", &LocalizedState::components);

  m.def("localize", &localize, "state"_a, "A"_a);
  m.def("localized_trace_profile", &localized_trace_profile, "state"_a, "A"_a);
  m.def("component_traces", &component_traces, "loc"_a);
  m.def("complement_operator", &complement_operator, "A"_a);
  m.def("duality_defect", &duality_defect, "state"_a, "A"_a);
  m.def("reconstruction_defect", &reconstruction_defect, "state"_a, "A"_a,
        "n"_a);
  m.def("mass_statistic", &mass_statistic, "state"_a, "A"_a, "f"_a,
        "Expectation of f(k/N) under the localized particle distribution.");

  py::class_<BinomialRatioCheck>(m, "BinomialRatioCheck")
      .def_readonly("max_difference", &BinomialRatioCheck::max_difference)
      .def_readonly("bound", &BinomialRatioCheck::bound)
      .def_readonly("nonnegative", &BinomialRatioCheck::nonnegative);

  m.def("binomial_ratio_check", &binomial_ratio_check, "N"_a, "n"_a);

  // definetti
  py::class_<MeasureAtom>(m, "MeasureAtom")
      .def(py::init([](double weight, const VecC& vector) {
             return MeasureAtom{weight, vector};
           }),
           "weight"_a, "vector"_a)
      .def_readonly("weight", &MeasureAtom::weight)
      .def_readonly("vector", &MeasureAtom::vector);

  py::class_<DeFinettiMeasure>(m, "DeFinettiMeasure")
      .def_readonly("modes", &DeFinettiMeasure::modes)
      .def_readonly("atoms", &DeFinettiMeasure::atoms);

  m.def("make_measure", &make_measure, "modes"_a, "atoms"_a);
  m.def("parse_measure", &parse_measure, "text"_a, "origin"_a = "<string>");
  m.def("load_measure", &load_measure, "path"_a);
  m.def("hierarchy", &hierarchy, "mu"_a, "k"_a);
  m.def("hierarchy_trace", &hierarchy_trace, "mu"_a, "k"_a);
  m.def("finite_N_match", &finite_N_match, "mu"_a, "N"_a, "k"_a);

  py::class_<ConvergenceRow>(m, "ConvergenceRow")
      .def_readonly("particles", &ConvergenceRow::particles)
      .def_readonly("modes", &ConvergenceRow::modes)
      .def_readonly("localized_mass", &ConvergenceRow::localized_mass);

  py::class_<ConvergenceReport>(m, "ConvergenceReport")
      .def_readonly("rows", &ConvergenceReport::rows)
      .def_readonly("extrapolated_mass", &ConvergenceReport::extrapolated_mass)
      .def_readonly("regime", &ConvergenceReport::regime);

  m.def("strong_convergence_report", &strong_convergence_report, "states"_a,
        "region"_a, "threshold"_a = 0.98);
  m.def("match_atoms", &match_atoms, "modes"_a, "gamma1"_a, "gamma2"_a,
        "max_atoms"_a, "seed"_a = 1);

  // gibbs
  py::class_<GibbsResult>(m, "GibbsResult")
      .def_readonly("beta", &GibbsResult::beta)
      .def_readonly("particles", &GibbsResult::particles)
      .def_readonly("free_energy", &GibbsResult::free_energy)
      .def_readonly("state", &GibbsResult::state)
      .def_readonly("gamma1", &GibbsResult::gamma1)
      .def_readonly("gamma2", &GibbsResult::gamma2);

  m.def("free_energy", &free_energy, "model"_a, "particles"_a, "beta"_a,
        "dense_cap"_a = 4096);
  m.def("noninteracting_free_energy", &noninteracting_free_energy,
        "spectrum"_a, "particles"_a, "beta"_a);
  m.def("condensation_tail", &condensation_tail, "spectrum"_a, "schedule"_a,
        "beta"_a);

  py::class_<TemperatureRecord>(m, "TemperatureRecord")
      .def_readonly("particles", &TemperatureRecord::particles)
      .def_readonly("free_energy", &TemperatureRecord::free_energy)
      .def_readonly("free_energy_per_particle",
                    &TemperatureRecord::free_energy_per_particle)
      .def_readonly("ground_energy", &TemperatureRecord::ground_energy)
      .def_readonly("gap_to_limit", &TemperatureRecord::gap_to_limit);

  py::class_<TemperatureSweep>(m, "TemperatureSweep")
      .def_readonly("beta", &TemperatureSweep::beta)
      .def_readonly("hartree_energy", &TemperatureSweep::hartree_energy)
      .def_readonly("rows", &TemperatureSweep::rows);

  m.def("finite_temperature_sweep", &finite_temperature_sweep, "model"_a,
        "schedule"_a, "beta"_a, "dense_cap"_a = 4096);
}
