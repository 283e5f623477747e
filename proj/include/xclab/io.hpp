#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "bounds.hpp"
#include "errors.hpp"
#include "matching.hpp"
#include "matrix.hpp"
#include "polytope.hpp"
#include "rational.hpp"
#include "yannakakis.hpp"

namespace xclab::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Files

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Writes to a sibling temporary and renames it into place, so a failed run
/// never leaves a truncated file behind.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << contents;
    if (!out.flush()) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ComputationError("write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(what + ": malformed JSON: " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Scalars, vectors, matrices. Rationals are written as strings; integers are
// accepted as JSON numbers on input.

inline json to_json(const Rational& x) { return to_string(x); }

inline Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long>());
  throw InputError("expected a rational as \"p/q\" string or integer");
}

inline json to_json(const Vector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_json(x));
  return a;
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected an array of rationals");
  Vector v;
  for (const auto& x : j) v.push_back(rational_from_json(x));
  return v;
}

inline json to_json(const Matrix& m) {
  json a = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) a.push_back(to_json(m.row_vector(i)));
  return a;
}

inline Matrix matrix_from_json(const json& j, std::size_t cols) {
  if (!j.is_array()) throw InputError("expected an array of rows");
  std::vector<Vector> rows;
  for (const auto& r : j) rows.push_back(vector_from_json(r));
  return Matrix::from_rows(rows, cols);
}

inline std::vector<std::string> labels_from_json(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  return j.at(key).get<std::vector<std::string>>();
}

// ---------------------------------------------------------------------------
// Polytope JSON: {dim, ineqs: {A, b} | {file}, eqs: {A, b}, vertices,
// row_labels, eq_labels, vertex_labels}. A referenced file holds [A | b] in
// the matrix text format, resolved relative to the JSON file.

inline std::pair<Matrix, Vector> system_from_json(const json& j, std::size_t dim,
                                                  const std::filesystem::path& base) {
  if (j.contains("file")) {
    auto ab = matrix_from_text(read_file(base / j.at("file").get<std::string>()));
    if (ab.cols() != dim + 1) throw InputError("constraint file must have dim + 1 columns");
    std::vector<std::size_t> cols(dim);
    for (std::size_t k = 0; k < dim; ++k) cols[k] = k;
    std::vector<std::size_t> last{dim};
    return {ab.select_cols(cols), ab.select_cols(last).col_vector(0)};
  }
  Matrix a = matrix_from_json(j.at("A"), dim);
  Vector b = vector_from_json(j.at("b"));
  return {std::move(a), std::move(b)};
}

inline json system_to_json(const Matrix& a, const Vector& b) { return {{"A", to_json(a)}, {"b", to_json(b)}}; }

inline json polytope_to_json(const Polytope& p) {
  json j;
  j["dim"] = p.dim();
  j["ineqs"] = system_to_json(p.A(), p.b());
  j["eqs"] = system_to_json(p.E(), p.f());
  json verts = json::array();
  for (const auto& v : p.vertices()) verts.push_back(to_json(v));
  j["vertices"] = verts;
  j["row_labels"] = p.row_labels();
  j["eq_labels"] = p.eq_labels();
  j["vertex_labels"] = p.vertex_labels();
  return j;
}

inline Polytope polytope_from_json(const json& j, const std::filesystem::path& base = ".") {
  try {
    const auto dim = j.at("dim").get<std::size_t>();
    HRep h;
    std::tie(h.A, h.b) = system_from_json(j.at("ineqs"), dim, base);
    if (j.contains("eqs"))
      std::tie(h.E, h.f) = system_from_json(j.at("eqs"), dim, base);
    else
      h.E = Matrix(0, dim);
    if (h.E.rows() == 0) h.E = Matrix(0, dim);
    if (h.A.rows() == 0) h.A = Matrix(0, dim);
    h.row_labels = labels_from_json(j, "row_labels");
    h.eq_labels = labels_from_json(j, "eq_labels");
    if (h.row_labels.empty())
      for (std::size_t i = 0; i < h.A.rows(); ++i) h.row_labels.push_back("row:" + std::to_string(i));
    if (h.eq_labels.empty())
      for (std::size_t i = 0; i < h.E.rows(); ++i) h.eq_labels.push_back("eq:" + std::to_string(i));
    std::vector<Vector> verts;
    for (const auto& v : j.at("vertices")) verts.push_back(vector_from_json(v));
    return Polytope(dim, std::move(h), std::move(verts), labels_from_json(j, "vertex_labels"));
  } catch (const json::exception& e) {
    throw InputError(std::string("polytope JSON: ") + e.what());
  }
}

inline Polytope load_polytope(const std::filesystem::path& path) {
  return polytope_from_json(parse_json(read_file(path), path.string()), path.parent_path());
}

// ---------------------------------------------------------------------------
// Slack matrix text: the matrix text format followed by "rows: ..." and
// "cols: ..." label lines.

inline std::string slack_to_text(const SlackMatrix& s) {
  std::ostringstream os;
  write_matrix_text(os, s.S);
  os << "rows:";
  for (const auto& l : s.row_labels) os << ' ' << l;
  os << "\ncols:";
  for (const auto& l : s.col_labels) os << ' ' << l;
  os << '\n';
  return os.str();
}

inline SlackMatrix slack_from_text(const std::string& text) {
  std::istringstream is(text);
  SlackMatrix s;
  s.S = read_matrix_text(is);
  std::string line;
  auto read_labels = [&](const std::string& tag, std::size_t expect) {
    std::vector<std::string> out;
    while (std::getline(is, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) break;
    if (line.rfind(tag, 0) != 0) {
      for (std::size_t k = 0; k < expect; ++k) out.push_back(std::to_string(k));
      return std::pair{out, false};
    }
    std::istringstream ls(line.substr(tag.size()));
    std::string tok;
    while (ls >> tok) out.push_back(tok);
    if (out.size() != expect) throw InputError("slack text: '" + tag + "' line has the wrong number of labels");
    return std::pair{out, true};
  };
  bool had_rows = false;
  std::tie(s.row_labels, had_rows) = read_labels("rows:", s.S.rows());
  if (had_rows)
    s.col_labels = read_labels("cols:", s.S.cols()).first;
  else
    for (std::size_t k = 0; k < s.S.cols(); ++k) s.col_labels.push_back(std::to_string(k));
  for (std::size_t i = 0; i < s.S.rows(); ++i) s.source_rows.push_back(i);
  return s;
}

/// Accepts a polytope JSON (slack over all rows) or slack/matrix text.
inline SlackMatrix load_slack(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return slack_matrix(polytope_from_json(parse_json(text, path.string()), path.parent_path()));
  return slack_from_text(text);
}

// ---------------------------------------------------------------------------
// Weight matrix text: matrix text format with "-inf" for FORBIDDEN.

inline std::string weight_to_text(const WeightMatrix& w) {
  std::ostringstream os;
  os << w.rows() << ' ' << w.cols() << '\n';
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j)
      os << (j ? " " : "") << (w.forbidden(i, j) ? std::string("-inf") : to_string(w.value(i, j)));
    os << '\n';
  }
  return os.str();
}

inline WeightMatrix weight_from_text(const std::string& text) {
  std::istringstream is(text);
  long long rows = -1, cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw InputError("weight text: malformed header");
  WeightMatrix w(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols));
  for (std::size_t i = 0; i < w.rows(); ++i)
    for (std::size_t j = 0; j < w.cols(); ++j) {
      std::string tok;
      if (!(is >> tok)) throw InputError("weight text: too few entries");
      if (tok == "-inf")
        w.forbid(i, j);
      else
        w.set(i, j, parse_rational(tok));
    }
  std::string extra;
  if (is >> extra) throw InputError("weight text: trailing data");
  return w;
}

// ---------------------------------------------------------------------------
// Factorizations, extensions, reports, matchings

inline json factorization_to_json(const Factorization& f) {
  return {{"r", f.inner_dim()}, {"U", to_json(f.U)}, {"V", to_json(f.V)}};
}

inline Factorization factorization_from_json(const json& j) {
  try {
    const auto r = j.at("r").get<std::size_t>();
    Factorization f{matrix_from_json(j.at("U"), r), {}};
    const auto& vj = j.at("V");
    if (!vj.is_array() || vj.size() != r) throw InputError("factorization JSON: V must have r rows");
    const std::size_t cols = r ? vj.at(0).size() : 0;
    f.V = matrix_from_json(vj, cols);
    return f;
  } catch (const json::exception& e) {
    throw InputError(std::string("factorization JSON: ") + e.what());
  }
}

/// Extension in the polytope JSON layout over the joint variables (x, y),
/// plus x_dim, y_dim and variable names x:i / y:k.
inline json lifted_system_to_json(const LiftedSystem& q, const std::vector<Vector>& lifts = {}) {
  json j;
  j["dim"] = q.x_dim + q.y_dim;
  j["x_dim"] = q.x_dim;
  j["y_dim"] = q.y_dim;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < q.x_dim; ++i) names.push_back("x:" + std::to_string(i));
  for (std::size_t k = 0; k < q.y_dim; ++k) names.push_back("y:" + std::to_string(k));
  j["variables"] = names;
  j["ineqs"] = system_to_json(q.joint_ineqs(), q.d);
  j["eqs"] = system_to_json(q.joint_eqs(), q.de);
  j["row_labels"] = q.row_labels;
  j["eq_labels"] = q.eq_labels;
  if (!lifts.empty()) {
    json l = json::array();
    for (const auto& y : lifts) l.push_back(to_json(y));
    j["lifts"] = l;
  }
  return j;
}

inline LiftedSystem lifted_system_from_json(const json& j, const std::filesystem::path& base = ".") {
  try {
    LiftedSystem q;
    q.x_dim = j.at("x_dim").get<std::size_t>();
    q.y_dim = j.at("y_dim").get<std::size_t>();
    const std::size_t dim = q.x_dim + q.y_dim;
    if (j.contains("dim") && j.at("dim").get<std::size_t>() != dim) throw InputError("extension JSON: dim != x_dim + y_dim");
    std::vector<std::size_t> xs(q.x_dim), ys(q.y_dim);
    for (std::size_t i = 0; i < q.x_dim; ++i) xs[i] = i;
    for (std::size_t k = 0; k < q.y_dim; ++k) ys[k] = q.x_dim + k;
    auto [a, b] = system_from_json(j.at("ineqs"), dim, base);
    if (a.rows() == 0) a = Matrix(0, dim);
    q.B = a.select_cols(xs);
    q.C = a.select_cols(ys);
    q.d = std::move(b);
    if (j.contains("eqs")) {
      auto [e, f] = system_from_json(j.at("eqs"), dim, base);
      if (e.rows() == 0) e = Matrix(0, dim);
      q.Be = e.select_cols(xs);
      q.Ce = e.select_cols(ys);
      q.de = std::move(f);
    } else {
      q.Be = Matrix(0, q.x_dim);
      q.Ce = Matrix(0, q.y_dim);
    }
    q.row_labels = labels_from_json(j, "row_labels");
    q.eq_labels = labels_from_json(j, "eq_labels");
    if (q.row_labels.empty())
      for (std::size_t i = 0; i < q.B.rows(); ++i) q.row_labels.push_back("row:" + std::to_string(i));
    if (q.eq_labels.empty())
      for (std::size_t i = 0; i < q.Be.rows(); ++i) q.eq_labels.push_back("eq:" + std::to_string(i));
    q.validate();
    return q;
  } catch (const json::exception& e) {
    throw InputError(std::string("extension JSON: ") + e.what());
  }
}

inline json bound_report_to_json(const BoundReport& rep, const std::string& upper_witness_file = {}) {
  json certs = json::array();
  for (const auto& c : rep.lower_certificates)
    certs.push_back({{"method", c.method}, {"value", to_string(c.value)}, {"bound", c.bound}});
  json j{{"lower", rep.lower}, {"upper", rep.upper}, {"certificates", certs}, {"upper_method", rep.upper_method}};
  j["upper_witness_file"] = upper_witness_file.empty() ? json(nullptr) : json(upper_witness_file);
  if (rep.cover_exceeded) j["cover_exceeded"] = true;
  return j;
}

inline json matchings_to_json(const MatchingSet& ms) {
  json a = json::array();
  for (const auto& m : ms.matchings) a.push_back(m);
  return {{"n", ms.n}, {"matchings", a}};
}

inline MatchingSet matchings_from_json(const json& j) {
  MatchingSet ms;
  ms.n = j.at("n").get<std::size_t>();
  for (const auto& m : j.at("matchings")) {
    auto edges = m.get<Matching>();
    if (!std::is_sorted(edges.begin(), edges.end())) throw InputError("matching JSON: edge lists must be sorted");
    ms.matchings.push_back(std::move(edges));
  }
  return ms;
}

inline json rectangle_to_json(const Rectangle& r) { return {{"rows", r.rows}, {"cols", r.cols}}; }

}  // namespace xclab::io
