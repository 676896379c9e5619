// Command-line driver: loads a lattice model, runs one experiment, and emits
// deterministic CSV or JSON (17 significant digits, LF endings).  Every row
// carries the subcommand, the model hash, the seed, and a schedule key, so a
// result file is reproducible from its own argv.
//
// Exit codes: 0 ok, 1 failed verification, 2 bad input, 3 non-convergence,
// 4 capacity exceeded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "bmfl/common.hpp"
#include "bmfl/definetti.hpp"
#include "bmfl/fock.hpp"
#include "bmfl/gibbs.hpp"
#include "bmfl/hartree.hpp"
#include "bmfl/localize.hpp"
#include "bmfl/model.hpp"
#include "bmfl/rdm.hpp"
#include "bmfl/rng.hpp"
#include "bmfl/spectra.hpp"

namespace {

using namespace bmfl;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// One output cell, rendered once for each format.
struct Cell {
  std::string csv;
  std::string json;
};

Cell num(double v) {
  if (!std::isfinite(v)) return {"nan", "null"};
  const std::string s = fmt17(v);
  return {s, s};
}

Cell integer(long long v) {
  const std::string s = std::to_string(v);
  return {s, s};
}

Cell flag(bool b) { return integer(b ? 1 : 0); }

struct Table {
  std::string subcommand;
  std::string source_hash;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::pair<std::string, std::vector<Cell>>> rows;

  void row(std::string key, std::vector<Cell> cells) {
    rows.emplace_back(std::move(key), std::move(cells));
  }
};

void emit_csv(const Table& t, std::ostream& out) {
  out << "subcommand,model,seed,key";
  for (const std::string& c : t.columns) out << ',' << c;
  out << '\n';
  for (const auto& [key, cells] : t.rows) {
    out << t.subcommand << ',' << t.source_hash << ',' << t.seed << ','
        << key;
    for (const Cell& c : cells) out << ',' << c.csv;
    out << '\n';
  }
}

void emit_json(const Table& t, std::ostream& out) {
  out << "{\n";
  out << "  \"subcommand\": \"" << t.subcommand << "\",\n";
  out << "  \"model\": \"" << t.source_hash << "\",\n";
  out << "  \"seed\": " << t.seed << ",\n";
  out << "  \"columns\": [\"key\"";
  for (const std::string& c : t.columns) out << ", \"" << c << "\"";
  out << "],\n";
  out << "  \"rows\": [\n";
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    out << "    [\"" << t.rows[r].first << "\"";
    for (const Cell& c : t.rows[r].second) out << ", " << c.json;
    out << (r + 1 < t.rows.size() ? "],\n" : "]\n");
  }
  out << "  ]\n}\n";
}

// Options shared by every subcommand.
struct CommonOpts {
  std::string model_path;
  std::string output;  // empty = stdout
  std::string format = "csv";
  std::uint64_t seed = 0;
  std::uint64_t dim_cap = 0;  // 0 = keep the environment's value
};

void add_common(CLI::App* sub, CommonOpts& o, bool needs_model = true) {
  if (needs_model)
    sub->add_option("-m,--model", o.model_path, "model file (JSON)")
        ->required();
  sub->add_option("-o,--output", o.output,
                  "write results here instead of stdout");
  sub->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--seed", o.seed,
                  "seed for the randomized parts, recorded in every row");
  sub->add_option("--dim-cap", o.dim_cap,
                  "override the many-body dimension cap")
      ->check(CLI::PositiveNumber);
}

void apply_caps(const CommonOpts& o) {
  if (o.dim_cap > 0)
    setenv("BMFL_DIM_CAP", std::to_string(o.dim_cap).c_str(), 1);
}

void write_text(const std::string& text, const CommonOpts& o) {
  if (o.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) throw validation_error("cannot open output file: " + o.output);
  out << text;
  if (!out) throw validation_error("cannot write output file: " + o.output);
}

void write_table(const Table& t, const CommonOpts& o) {
  std::ostringstream buf;
  if (o.format == "json")
    emit_json(t, buf);
  else
    emit_csv(t, buf);
  write_text(buf.str(), o);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------- ground

void run_ground(const CommonOpts& o, int n) {
  const ModelSpec model = load_model(o.model_path);
  const GroundState g = ground_state(model, n);
  Table t{"ground", model.source_hash, o.seed,
          {"particles", "energy", "energy_per_particle", "residual"}, {}};
  t.row("n=" + std::to_string(n),
        {integer(n), num(g.energy), num(g.energy / n), num(g.residual)});
  write_table(t, o);
}

// ----------------------------------------------------------------- sweep

void run_sweep(const CommonOpts& o, const std::vector<int>& schedule,
               const std::vector<int>& ks) {
  for (int k : ks)
    if (k != 1 && k != 2)
      throw validation_error("--k entries must be 1 or 2, got " +
                             std::to_string(k));
  const bool want1 = std::find(ks.begin(), ks.end(), 1) != ks.end();
  const bool want2 = std::find(ks.begin(), ks.end(), 2) != ks.end();

  const ModelSpec model = load_model(o.model_path);
  const SweepReport rep = mean_field_sweep(model, schedule);

  std::vector<std::string> cols = {"particles", "hartree_energy", "energy",
                                   "energy_per_particle", "gap_to_limit"};
  if (want1) cols.push_back("overlap1");
  if (want2) cols.push_back("overlap2");
  cols.push_back("residual");

  Table t{"sweep", model.source_hash, o.seed, std::move(cols), {}};
  for (const SweepRecord& r : rep.rows) {
    std::vector<Cell> cells = {integer(r.particles), num(rep.hartree_energy),
                               num(r.energy), num(r.energy_per_particle),
                               num(r.gap_to_limit)};
    if (want1) cells.push_back(num(r.overlap1));
    if (want2) cells.push_back(num(r.overlap2));
    cells.push_back(num(r.residual));
    t.row("n=" + std::to_string(r.particles), std::move(cells));
  }
  write_table(t, o);
}

// --------------------------------------------------------------- hartree

void run_hartree(const CommonOpts& o, double mass, int restarts,
                 int max_iterations) {
  const ModelSpec model = load_model(o.model_path);
  MinimizeOptions opt;
  opt.restarts = restarts;
  opt.max_iterations = max_iterations;
  opt.seed = o.seed;
  HartreeResult h = minimize(model, mass, opt);
  if (!h.converged)
    throw convergence_error(
        "hartree minimization missed its gradient tolerance (norm " +
        fmt17(h.gradient_norm) + ")");
  canonicalize_phase(h.minimizer);  // any global phase is a minimizer
  Table t{"hartree",
          model.source_hash,
          o.seed,
          {"mode", "energy", "mass", "iterations", "gradient_norm",
           "restarts_used", "re", "im"},
          {}};
  for (int j = 0; j < model.modes; ++j)
    t.row("mode=" + std::to_string(j),
          {integer(j), num(h.energy), num(h.mass), integer(h.iterations),
           num(h.gradient_norm), integer(h.restarts_used),
           num(h.minimizer[j].real()), num(h.minimizer[j].imag())});
  write_table(t, o);
}

// ----------------------------------------------------------------- curve

void run_curve(const CommonOpts& o, int grid, int restarts,
               int max_iterations, double strictness) {
  const ModelSpec model = load_model(o.model_path);
  MinimizeOptions opt;
  opt.restarts = restarts;
  opt.max_iterations = max_iterations;
  opt.seed = o.seed;
  const EnergyCurve c = energy_curve(model, grid, opt, strictness);
  if (!c.all_converged)
    throw convergence_error(
        "a grid point of the energy curve failed to certify its minimum");
  Table t{"curve",
          model.source_hash,
          o.seed,
          {"lambda", "with_potential", "without_potential", "margin",
           "strict_binding", "kinetic_ground"},
          {}};
  for (std::size_t i = 0; i < c.mass.size(); ++i)
    t.row("grid=" + std::to_string(i),
          {num(c.mass[i]), num(c.with_potential[i]),
           num(c.without_potential[i]), num(c.margin[i]),
           flag(c.strict_binding), num(c.kinetic_ground)});
  write_table(t, o);
}

// -------------------------------------------------------------- localize

std::function<double(double)> parse_statistic(const std::string& f) {
  if (f == "lambda") return [](double x) { return x; };
  if (f == "lambda2") return [](double x) { return x * x; };
  const std::string prefix = "indicator:";
  if (f.rfind(prefix, 0) == 0) {
    const std::string body = f.substr(prefix.size());
    const std::size_t comma = body.find(',');
    if (comma != std::string::npos) {
      try {
        std::size_t apos = 0, bpos = 0;
        const double a = std::stod(body.substr(0, comma), &apos);
        const double b = std::stod(body.substr(comma + 1), &bpos);
        if (apos == comma && bpos == body.size() - comma - 1 &&
            std::isfinite(a) && std::isfinite(b) && a <= b)
          return [a, b](double x) { return a <= x && x <= b ? 1.0 : 0.0; };
      } catch (const std::exception&) {
      }
    }
  }
  throw validation_error(
      "--f must be lambda, lambda2, or indicator:a,b with a <= b");
}

void run_localize(const CommonOpts& o, int n, const std::vector<int>& sites,
                  const std::string& f) {
  const std::function<double(double)> stat_f = parse_statistic(f);
  const ModelSpec model = load_model(o.model_path);
  if (sites.empty()) throw validation_error("--sites needs at least one site");
  MatC A = MatC::Zero(model.modes, model.modes);
  for (int s : sites) {
    if (s < 0 || s >= model.modes)
      throw validation_error("--sites entry " + std::to_string(s) +
                             " is outside 0.." +
                             std::to_string(model.modes - 1));
    if (A(s, s).real() != 0.0)
      throw validation_error("--sites entry " + std::to_string(s) +
                             " appears twice");
    A(s, s) = 1.0;
  }
  const GroundState g = ground_state(model, n);
  const MixedState state = to_mixed(g.state);
  const std::vector<double> profile = localized_trace_profile(state, A);
  const double statistic = mass_statistic(state, A, stat_f);
  Table t{"localize", model.source_hash, o.seed,
          {"k", "trace", "statistic"}, {}};
  for (std::size_t k = 0; k < profile.size(); ++k)
    t.row("k=" + std::to_string(k),
          {integer(static_cast<long long>(k)), num(profile[k]),
           num(statistic)});
  write_table(t, o);
}

// ------------------------------------------------------------- definetti

void run_definetti(const CommonOpts& o, const std::string& measure_path,
                   int k, int match_n) {
  const std::string text = slurp(measure_path);
  const std::string hash = hex_hash(fnv1a(text.data(), text.size()));
  const DeFinettiMeasure mu = parse_measure(text, measure_path);
  const double trace = hierarchy_trace(mu, k);
  const double match =
      match_n > 0 ? finite_N_match(mu, match_n, k)
                  : std::numeric_limits<double>::quiet_NaN();
  Table t{"definetti", hash, o.seed,
          {"atom", "weight", "mass", "hierarchy_trace", "match_defect"}, {}};
  for (std::size_t i = 0; i < mu.atoms.size(); ++i)
    t.row("atom=" + std::to_string(i),
          {integer(static_cast<long long>(i)), num(mu.atoms[i].weight),
           num(mu.atoms[i].vector.squaredNorm()), num(trace), num(match)});
  write_table(t, o);
}

// ----------------------------------------------------------------- gibbs

void run_gibbs(const CommonOpts& o, const std::vector<double>& betas,
               const std::vector<int>& schedule, std::uint64_t dense_cap) {
  const ModelSpec model = load_model(o.model_path);
  Table t{"gibbs",
          model.source_hash,
          o.seed,
          {"beta", "particles", "free_energy", "free_energy_per_particle",
           "ground_energy", "gap_to_limit", "hartree_energy"},
          {}};
  for (std::size_t bi = 0; bi < betas.size(); ++bi) {
    const TemperatureSweep s =
        finite_temperature_sweep(model, schedule, betas[bi], dense_cap);
    for (const TemperatureRecord& r : s.rows)
      t.row("b=" + std::to_string(bi) + ";n=" + std::to_string(r.particles),
            {num(s.beta), integer(r.particles), num(r.free_energy),
             num(r.free_energy_per_particle), num(r.ground_energy),
             num(r.gap_to_limit), num(s.hartree_energy)});
  }
  write_table(t, o);
}

// ------------------------------------------------------------------- byk

void run_byk(const CommonOpts& o, int k, int grid) {
  const ModelSpec model = load_model(o.model_path);
  const ScaledEnergyScan s = scaled_energy_scan(model, k, grid);
  Table t{"byk",
          model.source_hash,
          o.seed,
          {"k", "lambda", "value", "precondition", "monotone",
           "all_preconditions", "lipschitz", "lipschitz_ok"},
          {}};
  for (std::size_t i = 0; i < s.lambdas.size(); ++i)
    t.row("grid=" + std::to_string(i),
          {integer(k), num(s.lambdas[i]), num(s.values[i]),
           flag(s.precondition[i]), flag(s.monotone),
           flag(s.all_preconditions), num(s.lipschitz),
           flag(s.lipschitz_ok)});
  write_table(t, o);
}

// ---------------------------------------------------------------- verify

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  return seed + 0x9e3779b97f4a7c15ull * (salt + 1);
}

MixedState random_mixed(const OccupationBasis& basis, GaussianSource& src) {
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  const Eigen::Index rank = std::min<Eigen::Index>(dim, 4);
  MatC B(dim, rank);
  for (Eigen::Index c = 0; c < rank; ++c) B.col(c) = src.vector(dim);
  MatC G = B * B.adjoint();
  G /= G.trace().real();
  return MixedState{basis, std::move(G)};
}

// Random hermitian contraction with spectrum mapped onto [0, 1].
MatC random_contraction(int d, GaussianSource& src) {
  MatC G(d, d);
  for (int c = 0; c < d; ++c) G.col(c) = src.vector(d);
  const MatC H = (G + G.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<MatC> es(H);
  const VecR& ev = es.eigenvalues();
  const double lo = ev(0), hi = ev(d - 1);
  if (hi - lo < 1e-12) return MatC::Identity(d, d) * 0.5;
  VecR mapped = (ev.array() - lo) / (hi - lo);
  return es.eigenvectors() * mapped.asDiagonal() *
         es.eigenvectors().adjoint();
}

double direct_energy_per_particle(const ModelSpec& model,
                                  const MixedState& state) {
  const SparseC H = assemble(model, state.basis);
  cxd tr = 0.0;
  for (int r = 0; r < H.outerSize(); ++r)
    for (SparseC::InnerIterator it(H, r); it; ++it)
      tr += it.value() * state.matrix(it.col(), it.row());
  return tr.real() / state.basis.particles();
}

int run_verify(const CommonOpts& o, int n) {
  const ModelSpec model = load_model(o.model_path);
  const OccupationBasis basis(model.modes, n);

  GaussianSource state_src(mix_seed(o.seed, 1));
  GaussianSource contraction_src(mix_seed(o.seed, 2));
  GaussianSource point_src(mix_seed(o.seed, 3));

  std::vector<MixedState> states;
  std::vector<MatC> contractions;
  for (int s = 0; s < 5; ++s) {
    states.push_back(random_mixed(basis, state_src));
    contractions.push_back(random_contraction(model.modes, contraction_src));
  }

  double consistency = 0.0, duality = 0.0, reconstruction = 0.0;
  double equivalence = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (int k = 1; k < n; ++k)
      for (int m = 1; k + m <= n; ++m)
        consistency =
            std::max(consistency, consistency_defect(states[s], k, m));
    duality = std::max(duality, duality_defect(states[s], contractions[s]));
    for (int m = 1; m <= std::min(2, n); ++m)
      reconstruction = std::max(
          reconstruction, reconstruction_defect(states[s], contractions[s], m));
    const double direct = direct_energy_per_particle(model, states[s]);
    equivalence = std::max(
        equivalence,
        std::abs(energy_per_particle(model, states[s]) - direct));
    equivalence = std::max(
        equivalence,
        std::abs(pair_energy_per_particle(model, states[s]) - direct));
  }

  // signed gap between the power and the ratio of counts, against its ceiling
  double ratio_excess = -1e300;
  bool ratio_nonnegative = true;
  for (int m = 1; m <= n; ++m) {
    const BinomialRatioCheck c = binomial_ratio_check(n, m);
    ratio_excess = std::max(ratio_excess, c.max_difference - c.bound);
    ratio_nonnegative = ratio_nonnegative && c.nonnegative;
  }

  // gradient against central differences in every real coordinate
  double gradient = 0.0;
  const double h = 1e-5;
  for (int p = 0; p < 100; ++p) {
    const VecC u = point_src.vector(model.modes);
    const VecC g = hartree_gradient(model, u);
    for (int j = 0; j < model.modes; ++j)
      for (int part = 0; part < 2; ++part) {
        const cxd delta = part == 0 ? cxd(h, 0.0) : cxd(0.0, h);
        VecC up = u, um = u;
        up[j] += delta;
        um[j] -= delta;
        const double fd =
            (hartree_energy(model, up) - hartree_energy(model, um)) /
            (2.0 * h);
        const double an = part == 0 ? g[j].real() : g[j].imag();
        gradient = std::max(gradient,
                            std::abs(fd - an) / std::max(1.0, std::abs(an)));
      }
  }

  std::ostringstream out;
  out << "# verify model=" << model.source_hash << " n=" << n
      << " seed=" << o.seed << "\n";
  bool ok = true;
  const auto check = [&](const char* name, bool pass, double worst,
                         double tol) {
    char line[160];
    std::snprintf(line, sizeof line, "[%s] %-26s worst %.3e  (tol %.0e)\n",
                  pass ? "PASS" : "FAIL", name, worst, tol);
    out << line;
    ok = ok && pass;
  };
  check("hierarchy-consistency", consistency <= 1e-9, consistency, 1e-9);
  check("localization-duality", duality <= 1e-9, duality, 1e-9);
  check("localized-reconstruction", reconstruction <= 1e-9, reconstruction,
        1e-9);
  check("count-ratio-bound", ratio_nonnegative && ratio_excess <= 0.0,
        ratio_excess, 0.0);
  check("hartree-gradient", gradient <= 1e-6, gradient, 1e-6);
  check("energy-equivalence", equivalence <= 1e-10, equivalence, 1e-10);
  write_text(out.str(), o);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "bmfl: exact lattice bosons against their mean-field description"};
  app.require_subcommand(1);

  int rc = 0;

  // ground
  CommonOpts o_ground;
  int ground_n = 0;
  {
    CLI::App* sub = app.add_subcommand(
        "ground",
        "ground-state energy at fixed particle number (columns: particles, "
        "energy, energy_per_particle, residual)");
    add_common(sub, o_ground);
    sub->add_option("-n,--n", ground_n, "particle number")
        ->required()
        ->check(CLI::PositiveNumber);
    sub->callback([&] {
      apply_caps(o_ground);
      run_ground(o_ground, ground_n);
    });
  }

  // sweep
  CommonOpts o_sweep;
  std::vector<int> sweep_schedule;
  std::vector<int> sweep_ks = {1, 2};
  {
    CLI::App* sub = app.add_subcommand(
        "sweep",
        "exact energies along an increasing N schedule against the Hartree "
        "limit (columns: particles, hartree_energy, energy, "
        "energy_per_particle, gap_to_limit, overlap1, overlap2, residual)");
    add_common(sub, o_sweep);
    sub->add_option("--n-schedule", sweep_schedule,
                    "comma-separated particle numbers, strictly increasing")
        ->required()
        ->delimiter(',');
    sub->add_option("--k", sweep_ks,
                    "which condensate overlap orders to include (1 and/or 2)")
        ->delimiter(',');
    sub->callback([&] {
      apply_caps(o_sweep);
      run_sweep(o_sweep, sweep_schedule, sweep_ks);
    });
  }

  // hartree
  CommonOpts o_hartree;
  double hartree_mass = 1.0;
  int hartree_restarts = 16;
  int hartree_iterations = 4000;
  {
    CLI::App* sub = app.add_subcommand(
        "hartree",
        "product-state energy minimum on the mass sphere (columns: mode, "
        "energy, mass, iterations, gradient_norm, restarts_used, re, im; one "
        "row per mode of the minimizer)");
    add_common(sub, o_hartree);
    sub->add_option("--mass", hartree_mass, "constraint ||u||^2")
        ->check(CLI::PositiveNumber);
    sub->add_option("--restarts", hartree_restarts,
                    "random starts beyond the one-body eigenvector")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-iterations", hartree_iterations,
                    "iteration budget per start")
        ->check(CLI::PositiveNumber);
    sub->callback([&] {
      apply_caps(o_hartree);
      run_hartree(o_hartree, hartree_mass, hartree_restarts,
                  hartree_iterations);
    });
  }

  // curve
  CommonOpts o_curve;
  int curve_grid = 21;
  int curve_restarts = 16;
  int curve_iterations = 4000;
  double curve_strictness = 1e-6;
  {
    CLI::App* sub = app.add_subcommand(
        "curve",
        "mass-split energies and binding margins on a lambda grid (columns: "
        "lambda, with_potential, without_potential, margin, strict_binding, "
        "kinetic_ground)");
    add_common(sub, o_curve);
    sub->add_option("--grid", curve_grid, "number of lambda grid points")
        ->check(CLI::Range(2, 100000));
    sub->add_option("--restarts", curve_restarts,
                    "random starts per minimization")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--max-iterations", curve_iterations,
                    "iteration budget per start")
        ->check(CLI::PositiveNumber);
    sub->add_option("--strictness", curve_strictness,
                    "margin that counts as strict binding")
        ->check(CLI::PositiveNumber);
    sub->callback([&] {
      apply_caps(o_curve);
      run_curve(o_curve, curve_grid, curve_restarts, curve_iterations,
                curve_strictness);
    });
  }

  // localize
  CommonOpts o_localize;
  int localize_n = 0;
  std::vector<int> localize_sites;
  std::string localize_f = "lambda";
  {
    CLI::App* sub = app.add_subcommand(
        "localize",
        "particle-count decomposition of the N-particle ground state on a "
        "site region (columns: k, trace, statistic)");
    add_common(sub, o_localize);
    sub->add_option("-n,--n", localize_n, "particle number")
        ->required()
        ->check(CLI::PositiveNumber);
    sub->add_option("--sites", localize_sites,
                    "comma-separated site indices of the region, 0-based")
        ->required()
        ->delimiter(',');
    sub->add_option(
        "--f", localize_f,
        "statistic over the localized fraction: lambda, lambda2, or "
        "indicator:a,b");
    sub->callback([&] {
      apply_caps(o_localize);
      run_localize(o_localize, localize_n, localize_sites, localize_f);
    });
  }

  // definetti
  CommonOpts o_definetti;
  std::string definetti_measure;
  int definetti_k = 0;
  int definetti_match_n = 0;
  {
    CLI::App* sub = app.add_subcommand(
        "definetti",
        "moments of an atomic measure on the unit ball (columns: atom, "
        "weight, mass, hierarchy_trace, match_defect)");
    add_common(sub, o_definetti, /*needs_model=*/false);
    sub->add_option("--measure", definetti_measure, "measure file (JSON)")
        ->required();
    sub->add_option("-k,--k", definetti_k, "moment order")
        ->required()
        ->check(CLI::PositiveNumber);
    sub->add_option("--match-n", definetti_match_n,
                    "also report the trace-norm gap to the N-particle "
                    "mixture's reduction")
        ->check(CLI::PositiveNumber);
    sub->callback([&] {
      apply_caps(o_definetti);
      run_definetti(o_definetti, definetti_measure, definetti_k,
                    definetti_match_n);
    });
  }

  // gibbs
  CommonOpts o_gibbs;
  std::vector<double> gibbs_betas;
  std::vector<int> gibbs_schedule;
  std::uint64_t gibbs_dense_cap = 4096;
  {
    CLI::App* sub = app.add_subcommand(
        "gibbs",
        "canonical free energies along an N schedule (columns: beta, "
        "particles, free_energy, free_energy_per_particle, ground_energy, "
        "gap_to_limit, hartree_energy)");
    add_common(sub, o_gibbs);
    sub->add_option("--beta", gibbs_betas,
                    "inverse temperatures, comma-separated")
        ->required()
        ->delimiter(',');
    sub->add_option("--n-schedule", gibbs_schedule,
                    "comma-separated particle numbers, strictly increasing")
        ->required()
        ->delimiter(',');
    sub->add_option("--dense-cap", gibbs_dense_cap,
                    "largest dimension the thermal solve may diagonalize")
        ->check(CLI::PositiveNumber);
    sub->callback([&] {
      apply_caps(o_gibbs);
      run_gibbs(o_gibbs, gibbs_betas, gibbs_schedule, gibbs_dense_cap);
    });
  }

  // byk
  CommonOpts o_byk;
  int byk_k = 0;
  int byk_grid = 21;
  {
    CLI::App* sub = app.add_subcommand(
        "byk",
        "per-particle energies of the lambda-scaled interaction (columns: k, "
        "lambda, value, precondition, monotone, all_preconditions, "
        "lipschitz, lipschitz_ok)");
    add_common(sub, o_byk);
    sub->add_option("-k,--k", byk_k, "particle number of the scaled family")
        ->required()
        ->check(CLI::PositiveNumber);
    sub->add_option("--lambda-grid", byk_grid, "number of lambda grid points")
        ->check(CLI::Range(2, 100000));
    sub->callback([&] {
      apply_caps(o_byk);
      run_byk(o_byk, byk_k, byk_grid);
    });
  }

  // verify
  CommonOpts o_verify;
  int verify_n = 4;
  {
    CLI::App* sub = app.add_subcommand(
        "verify",
        "identity suite on seeded random states: reduction consistency, "
        "localization duality and reconstruction, count-ratio bound, "
        "gradient check, energy equivalence; prints one PASS/FAIL line per "
        "check (plain text, --format is ignored)");
    add_common(sub, o_verify);
    sub->add_option("-n,--n", verify_n, "particle number")
        ->check(CLI::Range(2, 100000));
    sub->callback([&] {
      apply_caps(o_verify);
      rc = run_verify(o_verify, verify_n);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const convergence_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const capacity_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
