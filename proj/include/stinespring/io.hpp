#pragma once

#include "stinespring/cstar.hpp"
#include "stinespring/dilation.hpp"
#include "stinespring/hilbert_module.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stinespring::io {

using Json = nlohmann::json;

/// Malformed input: unreadable files, schema violations, inconsistent
/// shapes. Distinct from stinespring::Error so callers can map input
/// problems and mathematical failures to different exit codes.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_object(const Json& j, const std::string& field) {
  if (!j.is_object()) throw ParseError(field + ": expected an object");
}

/// Strict schema: every required key present, nothing outside
/// required + optional allowed.
inline void require_keys(const Json& j, const std::string& field,
                         const std::set<std::string>& required,
                         const std::set<std::string>& optional = {}) {
  require_object(j, field);
  for (const std::string& key : required) {
    if (!j.contains(key)) throw ParseError(field + ": missing required key \"" + key + "\"");
  }
  for (const auto& item : j.items()) {
    if (!required.count(item.key()) && !optional.count(item.key())) {
      throw ParseError(field + ": unknown key \"" + item.key() + "\"");
    }
  }
}

inline int positive_int(const Json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1) {
    throw ParseError(field + ": expected a positive integer");
  }
  return j.get<int>();
}

inline double finite_number(const Json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field + ": expected a number");
  const double value = j.get<double>();
  if (!std::isfinite(value)) throw ParseError(field + ": value is not finite");
  return value;
}

}  // namespace detail

inline Json complex_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Complex complex_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2) throw ParseError(field + ": expected [re, im]");
  return {detail::finite_number(j[0], field + "[0]"), detail::finite_number(j[1], field + "[1]")};
}

/// Matrices are arrays of rows, each entry a [re, im] pair.
inline Json matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const Json& j, int rows, int cols, const std::string& field) {
  if (!j.is_array()) throw ParseError(field + ": expected an array of rows");
  if (static_cast<int>(j.size()) != rows) {
    throw ParseError(field + ": expected " + std::to_string(rows) + " rows, got " +
                     std::to_string(j.size()));
  }
  CMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    const Json& row = j[i];
    const std::string row_field = field + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw ParseError(row_field + ": expected " + std::to_string(cols) + " entries");
    }
    for (int c = 0; c < cols; ++c) {
      m(i, c) = complex_from_json(row[c], row_field + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline std::vector<CMatrix> matrix_list_from_json(const Json& j, int count, int rows, int cols,
                                                  const std::string& field) {
  if (!j.is_array() || static_cast<int>(j.size()) != count) {
    throw ParseError(field + ": expected an array of " + std::to_string(count) + " matrices");
  }
  std::vector<CMatrix> list;
  list.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    list.push_back(matrix_from_json(j[i], rows, cols, field + "[" + std::to_string(i) + "]"));
  }
  return list;
}

inline Json matrix_list_json(const std::vector<CMatrix>& list) {
  Json out = Json::array();
  for (const CMatrix& m : list) out.push_back(matrix_json(m));
  return out;
}

// ---------------------------------------------------------------------------
// Instance files: dimensions, phi (as schur multiplier, unit images, or
// Kraus operators), and the scalar-basis images of Phi.
// ---------------------------------------------------------------------------

inline PhiMap instance_from_json(const Json& j) {
  detail::require_keys(j, "instance", {"n", "k", "h1_dim", "h2_dim", "phi", "Phi"});
  const int n = detail::positive_int(j["n"], "n");
  const int k = detail::positive_int(j["k"], "k");
  const int h1 = detail::positive_int(j["h1_dim"], "h1_dim");
  const int h2 = detail::positive_int(j["h2_dim"], "h2_dim");

  const Json& phi_json = j["phi"];
  detail::require_object(phi_json, "phi");
  if (!phi_json.contains("kind") || !phi_json["kind"].is_string()) {
    throw ParseError("phi.kind: expected a string");
  }
  const std::string kind = phi_json["kind"].get<std::string>();
  CPMap phi;
  if (kind == "schur") {
    detail::require_keys(phi_json, "phi", {"kind", "D"});
    if (h1 != n) {
      throw ParseError("h1_dim: a schur map requires h1_dim == n");
    }
    phi = schur_map(matrix_from_json(phi_json["D"], n, n, "phi.D"));
  } else if (kind == "images") {
    detail::require_keys(phi_json, "phi", {"kind", "images"});
    phi = CPMap{MatrixAlgebra{n}, h1,
                matrix_list_from_json(phi_json["images"], n * n, h1, h1, "phi.images")};
  } else if (kind == "kraus") {
    detail::require_keys(phi_json, "phi", {"kind", "ops"});
    const Json& ops = phi_json["ops"];
    if (!ops.is_array() || ops.empty()) {
      throw ParseError("phi.ops: expected a nonempty array of matrices");
    }
    std::vector<CMatrix> kraus;
    for (std::size_t s = 0; s < ops.size(); ++s) {
      kraus.push_back(matrix_from_json(ops[s], h1, n, "phi.ops[" + std::to_string(s) + "]"));
    }
    phi = cp_map_from_kraus(n, h1, kraus);
  } else {
    throw ParseError("phi.kind: expected \"schur\", \"images\", or \"kraus\"");
  }

  PhiMap Phi;
  Phi.module = FreeModule{MatrixAlgebra{n}, k};
  Phi.phi = std::move(phi);
  Phi.h2_dim = h2;
  Phi.basis_images = matrix_list_from_json(j["Phi"], k * n * n, h2, h1, "Phi");
  return Phi;
}

/// Canonical serialization: phi is always written in "images" form.
inline Json instance_json(const PhiMap& Phi) {
  Json j;
  j["n"] = Phi.module.algebra.n;
  j["k"] = Phi.module.k;
  j["h1_dim"] = Phi.phi.h1_dim;
  j["h2_dim"] = Phi.h2_dim;
  j["phi"] = Json{{"kind", "images"}, {"images", matrix_list_json(Phi.phi.images)}};
  j["Phi"] = matrix_list_json(Phi.basis_images);
  return j;
}

// ---------------------------------------------------------------------------
// Representation pair files (written by dilate, read back by equiv).
// ---------------------------------------------------------------------------

inline Json pair_json(const RepresentationPair& pair) {
  Json j;
  j["k1_dim"] = pair.stinespring.k1_dim;
  j["k2_dim"] = pair.module_rep.k2_dim;
  j["rho"] = matrix_list_json(pair.stinespring.rho_images);
  j["V"] = matrix_json(pair.stinespring.V);
  j["psi"] = matrix_list_json(pair.module_rep.psi_images);
  j["W"] = matrix_json(pair.module_rep.W);
  return j;
}

inline RepresentationPair pair_from_json(const Json& root, int n, int k, int h1, int h2) {
  detail::require_keys(root, "representation file", {"pair"}, {"report"});
  const Json& j = root["pair"];
  detail::require_keys(j, "pair", {"k1_dim", "k2_dim", "rho", "V", "psi", "W"});
  if (!j["k1_dim"].is_number_integer() || j["k1_dim"].get<long long>() < 0) {
    throw ParseError("pair.k1_dim: expected a non-negative integer");
  }
  if (!j["k2_dim"].is_number_integer() || j["k2_dim"].get<long long>() < 0) {
    throw ParseError("pair.k2_dim: expected a non-negative integer");
  }
  const int k1 = j["k1_dim"].get<int>();
  const int k2 = j["k2_dim"].get<int>();
  RepresentationPair pair;
  pair.stinespring.k1_dim = k1;
  pair.stinespring.rho_images = matrix_list_from_json(j["rho"], n * n, k1, k1, "pair.rho");
  pair.stinespring.V = matrix_from_json(j["V"], k1, h1, "pair.V");
  pair.module_rep.k2_dim = k2;
  pair.module_rep.psi_images = matrix_list_from_json(j["psi"], k * n * n, k2, k1, "pair.psi");
  pair.module_rep.W = matrix_from_json(j["W"], k2, h2, "pair.W");
  return pair;
}

// ---------------------------------------------------------------------------
// Reports and witnesses (write-only).
// ---------------------------------------------------------------------------

inline Json cp_verdict_json(const CpVerdict& verdict) {
  Json eigenvalues = Json::array();
  for (Eigen::Index i = 0; i < verdict.choi_eigenvalues.size(); ++i) {
    eigenvalues.push_back(verdict.choi_eigenvalues(i));
  }
  return Json{{"verdict", verdict.completely_positive},
              {"min_choi_eigenvalue", verdict.min_eigenvalue},
              {"choi_eigenvalues", std::move(eigenvalues)},
              {"hermiticity_residual", verdict.hermiticity_residual}};
}

inline Json phi_check_json(const PhiMapCheck& check) {
  return Json{{"verdict", check.verdict},
              {"max_residual", check.max_residual},
              {"scale", check.scale}};
}

inline Json representation_report_json(const RepresentationReport& report) {
  return Json{{"verdict", report.verdict},
              {"scale", report.scale},
              {"residuals",
               Json{{"rho_multiplicative", report.rho_multiplicative},
                    {"rho_adjoint", report.rho_adjoint},
                    {"rho_unital", report.rho_unital},
                    {"phi_reconstruction", report.phi_reconstruction},
                    {"psi_morphism", report.psi_morphism},
                    {"module_reconstruction", report.module_reconstruction},
                    {"norm_identity", report.norm_identity}}}};
}

inline Json witness_json(const EquivalenceWitness& witness) {
  return Json{{"U1", matrix_json(witness.U1)},
              {"U2", matrix_json(witness.U2)},
              {"scale", witness.scale},
              {"residuals",
               Json{{"u1_unitarity", witness.u1_unitarity},
                    {"u2_unitarity", witness.u2_unitarity},
                    {"intertwines_v", witness.intertwines_v},
                    {"intertwines_rho", witness.intertwines_rho},
                    {"intertwines_w", witness.intertwines_w},
                    {"intertwines_psi", witness.intertwines_psi}}}};
}

// ---------------------------------------------------------------------------
// File helpers.
// ---------------------------------------------------------------------------

inline Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline PhiMap load_instance(const std::string& path) {
  try {
    return instance_from_json(load_json(path));
  } catch (const Error& e) {
    // Shape errors raised while assembling the maps are input errors here.
    throw ParseError(path + ": " + e.what());
  }
}

inline RepresentationPair load_pair(const std::string& path, const PhiMap& Phi) {
  return pair_from_json(load_json(path), Phi.module.algebra.n, Phi.module.k, Phi.phi.h1_dim,
                        Phi.h2_dim);
}

inline void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError(path + ": cannot open file for writing");
  out << j.dump(2) << "\n";
}

}  // namespace stinespring::io
