#pragma once

// JSON encodings. Complex numbers are [re, im] pairs (plain numbers are accepted on
// input as real values). Non-finite margins are written as null.

#include <closedsum/blockmodel.hpp>
#include <closedsum/images.hpp>
#include <closedsum/margins.hpp>
#include <closedsum/subspaces.hpp>
#include <closedsum/systems.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace closedsum::io {

using json = nlohmann::ordered_json;

/// Thrown for unreadable files and malformed documents; the CLI maps it to exit code 3.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

inline json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(what + ": " + e.what());
  }
}

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw InputError("expected a number or [re, im], got " + j.dump());
}

inline json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline json real_to_json(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

/// Matrix given as a list of rows.
inline CMatrix matrix_from_rows(const json& rows) {
  if (!rows.is_array()) throw InputError("matrix must be a list of rows");
  const Index r = static_cast<Index>(rows.size());
  const Index c = r == 0 ? 0 : static_cast<Index>(rows[0].size());
  CMatrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != c) throw InputError("ragged matrix rows");
    for (Index k = 0; k < c; ++k) m(i, k) = complex_from_json(row[static_cast<std::size_t>(k)]);
  }
  return m;
}

inline json matrix_to_rows(const CMatrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

inline Index require_dim(const json& j) {
  if (!j.contains("ambient_dim") || !j["ambient_dim"].is_number_integer() || j["ambient_dim"].get<long long>() < 0) {
    throw InputError("missing or invalid ambient_dim");
  }
  return static_cast<Index>(j["ambient_dim"].get<long long>());
}

/// {"ambient_dim": d, "vectors": [[z, …], …]} with vectors as columns.
inline Subspace subspace_from_json(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw InputError("subspace must be an object");
  const Index d = require_dim(j);
  const json vecs = j.value("vectors", json::array());
  if (!vecs.is_array()) throw InputError("vectors must be a list");
  CMatrix m(d, static_cast<Index>(vecs.size()));
  for (std::size_t c = 0; c < vecs.size(); ++c) {
    if (!vecs[c].is_array()) throw InputError("each vector must be a list");
    if (static_cast<Index>(vecs[c].size()) != d) {
      throw Error(ErrorKind::DimensionMismatch, "vector " + std::to_string(c + 1) + " has " +
                                                    std::to_string(vecs[c].size()) + " entries, expected " +
                                                    std::to_string(d));
    }
    for (Index i = 0; i < d; ++i) m(i, static_cast<Index>(c)) = complex_from_json(vecs[c][static_cast<std::size_t>(i)]);
  }
  return from_spanning(d, m, tol);
}

inline json subspace_to_json(const Subspace& s) {
  json vecs = json::array();
  for (Index c = 0; c < s.dim(); ++c) {
    json v = json::array();
    for (Index i = 0; i < s.ambient_dim(); ++i) v.push_back(complex_to_json(s.basis()(i, c)));
    vecs.push_back(v);
  }
  return json{{"ambient_dim", s.ambient_dim()}, {"dim", s.dim()}, {"vectors", vecs}};
}

/// {"ambient_dim": d, "members": [subspace, …]}.
inline SubspaceSystem system_from_json(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw InputError("system must be an object");
  const Index d = require_dim(j);
  if (!j.contains("members") || !j["members"].is_array()) throw InputError("system needs a members list");
  std::vector<Subspace> members;
  for (const auto& m : j["members"]) {
    json copy = m;
    if (!copy.contains("ambient_dim")) copy["ambient_dim"] = d;
    members.push_back(subspace_from_json(copy, tol));
  }
  return SubspaceSystem(d, std::move(members));
}

inline json system_to_json(const SubspaceSystem& s) {
  json members = json::array();
  for (const auto& m : s.members()) members.push_back(subspace_to_json(m));
  return json{{"ambient_dim", s.ambient_dim()}, {"members", members}};
}

/// {"n": n, "edges": [[i, j, w], …]} with 1-based vertices; w defaults to 1.
inline WeightedGraph graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_integer()) throw InputError("graph needs an integer n");
  std::vector<Edge> edges;
  for (const auto& e : j.value("edges", json::array())) {
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw InputError("edge must be [i, j] or [i, j, w]");
    const double w = e.size() == 3 ? e[2].get<double>() : 1.0;
    edges.push_back({e[0].get<Index>() - 1, e[1].get<Index>() - 1, w});
  }
  return WeightedGraph(j["n"].get<Index>(), std::move(edges));
}

/// {"ambient_dim": d, "matrices": [rows, …], "kind": ["nonnegative" | "general", …]}.
inline OperatorFamily operators_from_json(const json& j, const Tolerances& tol = {}) {
  if (!j.is_object()) throw InputError("operator family must be an object");
  const Index d = require_dim(j);
  if (!j.contains("matrices") || !j["matrices"].is_array()) throw InputError("operator family needs matrices");
  std::vector<CMatrix> ms;
  for (const auto& m : j["matrices"]) ms.push_back(matrix_from_rows(m));
  std::vector<OperatorKind> kinds;
  if (j.contains("kind")) {
    for (const auto& k : j["kind"]) {
      const std::string s = k.get<std::string>();
      if (s == "nonnegative") {
        kinds.push_back(OperatorKind::Nonnegative);
      } else if (s == "general") {
        kinds.push_back(OperatorKind::General);
      } else {
        throw InputError("unknown operator kind '" + s + "'");
      }
    }
  }
  return OperatorFamily(d, std::move(ms), std::move(kinds), tol);
}

inline std::vector<cplx> coefficients_from_json(const json& j) {
  if (j.is_number()) return {complex_from_json(j)};
  if (!j.is_array()) throw InputError("polynomial coefficients must be a list");
  std::vector<cplx> out;
  for (const auto& c : j) out.push_back(complex_from_json(c));
  return out;
}

inline json report_to_json(const MarginReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back(json{{"id", e.id},
                           {"margin", real_to_json(e.margin)},
                           {"verdict", to_string(e.verdict)},
                           {"estimate", e.estimate},
                           {"vacuous", e.vacuous}});
  }
  json values = json::object();
  for (const auto& [k, v] : r.values) values[k] = real_to_json(v);
  json flags = json::object();
  for (const auto& [k, v] : r.flags) flags[k] = v;
  return json{{"entries", entries}, {"values", values}, {"flags", flags}};
}

inline json reals_to_json(const std::vector<double>& xs) {
  json out = json::array();
  for (double x : xs) out.push_back(real_to_json(x));
  return out;
}

inline json tolerances_to_json(const Tolerances& t) {
  return json{{"rank_tol", t.rank_tol}, {"eig_tol", t.eig_tol}, {"margin_tol", t.margin_tol}};
}

}  // namespace closedsum::io
