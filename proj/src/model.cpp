#include "bmfl/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "json.hpp"

namespace bmfl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& path,
                       const std::string& what) {
  throw validation_error(origin + ": " + path + ": " + what);
}

double require_number(const json& j, const std::string& origin,
                      const std::string& path) {
  if (!j.is_number()) fail(origin, path, "expected a number");
  return j.get<double>();
}

cxd read_complex(const json& j, const std::string& origin, const std::string& path) {
  if (!j.is_array() || j.size() != 2) {
    fail(origin, path, "expected [re, im]");
  }
  return cxd(require_number(j[0], origin, path + "/0"),
             require_number(j[1], origin, path + "/1"));
}

MatC read_complex_matrix(const json& j, int rows, const std::string& origin,
                         const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows) {
    fail(origin, path, "expected a " + std::to_string(rows) + "-row array");
  }
  MatC out(rows, rows);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    const std::string rpath = path + "/" + std::to_string(r);
    if (!row.is_array() || static_cast<int>(row.size()) != rows) {
      fail(origin, rpath, "expected " + std::to_string(rows) + " entries");
    }
    for (int c = 0; c < rows; ++c) {
      out(r, c) = read_complex(row[c], origin, rpath + "/" + std::to_string(c));
    }
  }
  return out;
}

void require_hermitian(const MatC& M, const std::string& origin,
                       const std::string& path) {
  const double dev = (M - M.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12) {
    std::ostringstream os;
    os << "matrix is not hermitian (max deviation " << dev << ")";
    fail(origin, path, os.str());
  }
}

int lattice_distance(int i, int j, int d, const std::string& geometry) {
  const int raw = std::abs(i - j);
  return geometry == "ring" ? std::min(raw, d - raw) : raw;
}

int max_distance(int d, const std::string& geometry) {
  return geometry == "ring" ? d / 2 : d - 1;
}

MatC cyclic_shift(int d) {
  MatC C = MatC::Zero(d, d);
  for (int j = 0; j < d; ++j) C((j + 1) % d, j) = 1.0;
  return C;
}

MatC kron(const MatC& A, const MatC& B) {
  MatC out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

MatC materialize_two_body(const ModelSpec& m) {
  const int d = m.modes;
  MatC w = MatC::Zero(d * d, d * d);
  switch (m.kind) {
    case TwoBodyKind::dense:
      return m.dense_w;
    case TwoBodyKind::onsite:
      for (int j = 0; j < d; ++j) w(j * d + j, j * d + j) = m.onsite_strength;
      return w;
    case TwoBodyKind::pair_potential:
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          const int r = lattice_distance(i, j, d, m.geometry);
          const double v = r < static_cast<int>(m.pair_values.size())
                               ? m.pair_values[r]
                               : 0.0;
          w(i * d + j, i * d + j) = v;
        }
      }
      return w;
  }
  return w;
}

bool compute_translation_invariance(const ModelSpec& m) {
  const MatC C = cyclic_shift(m.modes);
  const MatC T = m.one_body();
  if ((T * C - C * T).cwiseAbs().maxCoeff() > 1e-10) return false;
  const MatC CC = kron(C, C);
  return (m.dense_w * CC - CC * m.dense_w).cwiseAbs().maxCoeff() <= 1e-10;
}

}  // namespace

MatC ModelSpec::one_body() const {
  MatC T = kinetic;
  for (int j = 0; j < modes; ++j) T(j, j) += external_potential[j];
  return T;
}

std::uint64_t fnv1a(const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_hash(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

ModelSpec parse_model(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw validation_error(origin + ": /: " + e.what());
  }
  if (!j.is_object()) fail(origin, "/", "model must be a JSON object");

  ModelSpec m;
  m.source_hash = hex_hash(fnv1a(text.data(), text.size()));

  if (!j.contains("modes") || !j["modes"].is_number_integer()) {
    fail(origin, "/modes", "required integer");
  }
  m.modes = j["modes"].get<int>();
  if (m.modes < 1) fail(origin, "/modes", "must be >= 1");
  const int d = m.modes;

  m.name = j.value("name", std::string{});
  m.geometry = j.value("geometry", std::string{"chain"});
  if (m.geometry != "chain" && m.geometry != "ring") {
    fail(origin, "/geometry", "must be \"chain\" or \"ring\"");
  }

  m.kinetic = MatC::Zero(d, d);
  if (j.contains("one_body")) {
    m.kinetic = read_complex_matrix(j["one_body"], d, origin, "/one_body");
    require_hermitian(m.kinetic, origin, "/one_body");
  }
  if (j.contains("hopping")) {
    const double t = require_number(j["hopping"], origin, "/hopping");
    for (int s = 0; s + 1 < d; ++s) {
      m.kinetic(s, s + 1) += -t;
      m.kinetic(s + 1, s) += -t;
    }
    if (m.geometry == "ring" && d > 2) {
      m.kinetic(d - 1, 0) += -t;
      m.kinetic(0, d - 1) += -t;
    }
  }

  m.external_potential = VecR::Zero(d);
  if (j.contains("external_potential")) {
    const json& v = j["external_potential"];
    if (!v.is_array() || static_cast<int>(v.size()) != d) {
      fail(origin, "/external_potential", "expected " + std::to_string(d) + " reals");
    }
    for (int s = 0; s < d; ++s) {
      m.external_potential[s] =
          require_number(v[s], origin, "/external_potential/" + std::to_string(s));
    }
  }

  if (j.contains("two_body")) {
    const json& w = j["two_body"];
    if (!w.is_object() || !w.contains("kind") || !w["kind"].is_string()) {
      fail(origin, "/two_body/kind", "required string");
    }
    const std::string kind = w["kind"].get<std::string>();
    if (kind == "dense") {
      m.kind = TwoBodyKind::dense;
      if (!w.contains("matrix")) fail(origin, "/two_body/matrix", "required");
      m.dense_w = read_complex_matrix(w["matrix"], d * d, origin, "/two_body/matrix");
      require_hermitian(m.dense_w, origin, "/two_body/matrix");
      // Exchange symmetry: conjugating by the swap |i,j> -> |j,i> must fix w.
      double dev = 0.0;
      for (int i = 0; i < d; ++i)
        for (int jj = 0; jj < d; ++jj)
          for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l)
              dev = std::max(dev, std::abs(m.dense_w(i * d + jj, k * d + l) -
                                           m.dense_w(jj * d + i, l * d + k)));
      if (dev > 1e-12) {
        std::ostringstream os;
        os << "matrix is not exchange symmetric (max deviation " << dev << ")";
        fail(origin, "/two_body/matrix", os.str());
      }
    } else if (kind == "onsite") {
      m.kind = TwoBodyKind::onsite;
      if (!w.contains("U")) fail(origin, "/two_body/U", "required");
      m.onsite_strength = require_number(w["U"], origin, "/two_body/U");
    } else if (kind == "pair_potential") {
      m.kind = TwoBodyKind::pair_potential;
      if (!w.contains("geometry") || !w["geometry"].is_string()) {
        fail(origin, "/two_body/geometry", "required string");
      }
      const std::string g = w["geometry"].get<std::string>();
      if (g != "chain" && g != "ring") {
        fail(origin, "/two_body/geometry", "must be \"chain\" or \"ring\"");
      }
      if (j.contains("geometry") && g != m.geometry) {
        fail(origin, "/two_body/geometry", "conflicts with top-level geometry");
      }
      m.geometry = g;
      if (!w.contains("values") || !w["values"].is_array()) {
        fail(origin, "/two_body/values", "required array of reals");
      }
      const int maxlen = max_distance(d, g) + 1;
      if (static_cast<int>(w["values"].size()) > maxlen) {
        fail(origin, "/two_body/values",
             "more entries than lattice distances (max " + std::to_string(maxlen) + ")");
      }
      for (std::size_t s = 0; s < w["values"].size(); ++s) {
        m.pair_values.push_back(require_number(w["values"][s], origin,
                                               "/two_body/values/" + std::to_string(s)));
      }
    } else {
      fail(origin, "/two_body/kind",
           "must be \"dense\", \"onsite\" or \"pair_potential\"");
    }
  }

  if (m.kind != TwoBodyKind::dense) m.dense_w = materialize_two_body(m);
  m.translation_invariant = compute_translation_invariance(m);
  return m;
}

ModelSpec load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error(path + ": cannot open model file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str(), path);
}

ModelSpec without_external_potential(const ModelSpec& model) {
  ModelSpec out = model;
  out.external_potential.setZero();
  out.translation_invariant = compute_translation_invariance(out);
  return out;
}

ModelSpec with_coupling(const ModelSpec& model, double factor) {
  ModelSpec out = model;
  out.onsite_strength *= factor;
  for (double& v : out.pair_values) v *= factor;
  out.dense_w *= factor;
  return out;
}

namespace {

SparseC assemble_impl(const ModelSpec& model, const OccupationBasis& basis,
                      double coupling) {
  const int d = model.modes;
  const int N = basis.particles();
  if (d != basis.modes()) {
    throw validation_error("assemble: basis mode count does not match model");
  }
  const MatC T = model.one_body();
  const double pair_weight = N >= 2 ? coupling / (2.0 * (N - 1)) : 0.0;
  const bool diagonal_w = model.kind != TwoBodyKind::dense;

  std::vector<Eigen::Triplet<cxd>> trip;
  std::vector<int> scratch(d);
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int* n = basis.state(col);

    // One-body: diagonal piece plus hops.
    cxd diag = 0.0;
    for (int jj = 0; jj < d; ++jj) diag += T(jj, jj) * static_cast<double>(n[jj]);
    for (int jj = 0; jj < d; ++jj) {
      if (n[jj] == 0) continue;
      for (int ii = 0; ii < d; ++ii) {
        if (ii == jj || T(ii, jj) == cxd(0.0)) continue;
        std::copy(n, n + d, scratch.begin());
        scratch[jj] -= 1;
        scratch[ii] += 1;
        const double amp = std::sqrt(static_cast<double>(n[jj])) *
                           std::sqrt(static_cast<double>(n[ii] + 1));
        trip.emplace_back(static_cast<Eigen::Index>(basis.index_of(scratch)), col,
                          amp * T(ii, jj));
      }
    }

    if (N >= 2 && pair_weight != 0.0) {
      if (diagonal_w) {
        // Multiplication-operator interactions stay diagonal in occupation
        // coordinates: sum_{ij} w(i,j) n_i (n_j - delta_ij).
        cxd acc = 0.0;
        for (int i = 0; i < d; ++i) {
          if (n[i] == 0) continue;
          for (int jj = 0; jj < d; ++jj) {
            const cxd w = model.dense_w(i * d + jj, i * d + jj);
            if (w == cxd(0.0)) continue;
            acc += w * static_cast<double>(n[i]) *
                   static_cast<double>(n[jj] - (i == jj ? 1 : 0));
          }
        }
        diag += pair_weight * acc;
      } else {
        // Generic two-body term: ordered annihilation pair (k,l), ordered
        // creation pair (i,j).
        for (int k = 0; k < d; ++k) {
          if (n[k] == 0) continue;
          for (int l = 0; l < d; ++l) {
            const int nl = n[l] - (l == k ? 1 : 0);
            if (nl < 1) continue;
            const double ann = std::sqrt(static_cast<double>(n[k])) *
                               std::sqrt(static_cast<double>(nl));
            std::copy(n, n + d, scratch.begin());
            scratch[k] -= 1;
            scratch[l] -= 1;
            for (int i = 0; i < d; ++i) {
              for (int jj = 0; jj < d; ++jj) {
                const cxd w = model.dense_w(i * d + jj, k * d + l);
                if (w == cxd(0.0)) continue;
                const double cre =
                    std::sqrt(static_cast<double>(scratch[jj] + 1)) *
                    std::sqrt(static_cast<double>(scratch[i] + 1 + (i == jj ? 1 : 0)));
                scratch[jj] += 1;
                scratch[i] += 1;
                const Eigen::Index row =
                    static_cast<Eigen::Index>(basis.index_of(scratch));
                scratch[i] -= 1;
                scratch[jj] -= 1;
                trip.emplace_back(row, col, pair_weight * w * ann * cre);
              }
            }
          }
        }
      }
    }
    trip.emplace_back(col, col, diag);
  }

  SparseC H(dim, dim);
  H.setFromTriplets(trip.begin(), trip.end());
  H.makeCompressed();
  return H;
}

}  // namespace

SparseC assemble(const ModelSpec& model, const OccupationBasis& basis) {
  return assemble_impl(model, basis, 1.0);
}

SparseC scaled_assemble(const ModelSpec& model, const OccupationBasis& basis,
                        double lambda) {
  return assemble_impl(model, basis, lambda);
}

RelativeBounds relative_bounds(const ModelSpec& model) {
  const int d = model.modes;
  const MatC T = model.one_body();
  Eigen::SelfAdjointEigenSolver<MatC> est(T);
  const double tmin = est.eigenvalues().minCoeff();
  // S = T ox 1 + 1 ox T + c0 with c0 chosen so that S >= 1.
  const double c0 = 1.0 - 2.0 * tmin;
  const MatC I = MatC::Identity(d, d);
  MatC S = kron(T, I) + kron(I, T) + c0 * MatC::Identity(d * d, d * d);
  Eigen::SelfAdjointEigenSolver<MatC> ess(S);
  const MatC S_inv_half = ess.operatorInverseSqrt();
  Eigen::SelfAdjointEigenSolver<MatC> esw(S_inv_half * model.dense_w * S_inv_half);
  RelativeBounds b;
  b.beta_plus = std::max(0.0, esw.eigenvalues().maxCoeff());
  b.beta_minus = std::max(0.0, -esw.eigenvalues().minCoeff());
  b.constant = std::max(std::abs(b.beta_plus * c0), std::abs(b.beta_minus * c0));
  return b;
}

}  // namespace bmfl
