#include "tracial/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "tracial/error.hpp"
#include "tracial/poly.hpp"

namespace tracial {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw ParseError("expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(std::string("missing field \"") + key + "\"");
  return *it;
}

std::size_t as_size(const Json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw ParseError(std::string("\"") + what + "\" must be a nonnegative integer");
  return j.get<std::size_t>();
}

double as_double(const Json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string("\"") + what + "\" must be a number");
  return j.get<double>();
}

}  // namespace

TracialSequence sequence_from_json(const Json& j) {
  const std::size_t n = as_size(field(j, "variables"), "variables");
  const std::size_t order = as_size(field(j, "order"), "order");
  const Json& moments = field(j, "moments");
  if (!moments.is_array()) throw ParseError("\"moments\" must be an array");
  std::vector<std::pair<Word, double>> entries;
  entries.reserve(moments.size());
  for (const Json& m : moments) {
    const Json& w = field(m, "word");
    if (!w.is_string()) throw ParseError("\"word\" must be a string");
    Word word = parse_word(w.get<std::string>(), n);
    if (word.degree() > order)
      throw InputError("moment " + w.get<std::string>() + " exceeds the declared order " + std::to_string(order));
    entries.emplace_back(std::move(word), as_double(field(m, "value"), "value"));
  }
  return TracialSequence::from_entries(n, order, entries);
}

Json sequence_to_json(const TracialSequence& y) {
  Json j;
  j["variables"] = y.variables();
  j["order"] = y.order();
  Json moments = Json::array();
  for (const auto& [w, v] : y.values()) moments.push_back({{"word", render_word(w, y.variables())}, {"value", v}});
  j["moments"] = std::move(moments);
  return j;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("matrix must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.front().size();
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ParseError("matrix rows must be arrays of equal length");
    for (std::size_t c = 0; c < cols; ++c) m(i, c) = as_double(j[i][c], "matrix entry");
  }
  return m;
}

TracialRepresentation representation_from_json(const Json& j) {
  const Json& weights = field(j, "weights");
  const Json& atoms = field(j, "atoms");
  if (!weights.is_array() || !atoms.is_array()) throw ParseError("\"weights\" and \"atoms\" must be arrays");
  if (weights.size() != atoms.size()) throw InputError("weights and atoms differ in length");
  if (atoms.empty()) throw InputError("representation has no atoms");
  TracialRepresentation rep;
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    Atom a;
    a.weight = as_double(weights[i], "weight");
    if (!(a.weight >= 0.0)) throw InputError("weights must be nonnegative");
    total += a.weight;
    if (!atoms[i].is_array() || atoms[i].empty()) throw ParseError("each atom must be a nonempty array of matrices");
    for (const Json& m : atoms[i]) a.mats.push_back(matrix_from_json(m));
    if (i == 0) n = a.mats.size();
    if (a.mats.size() != n) throw InputError("atoms have different numbers of variables");
    validate_tuple(a.mats, n);
    rep.atoms.push_back(std::move(a));
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("weights must sum to 1");
  return rep;
}

Json representation_to_json(const TracialRepresentation& rep) {
  Json j;
  Json weights = Json::array();
  Json atoms = Json::array();
  for (const Atom& a : rep.atoms) {
    weights.push_back(a.weight);
    Json mats = Json::array();
    for (const Matrix& m : a.mats) mats.push_back(matrix_to_json(m));
    atoms.push_back(std::move(mats));
  }
  j["weights"] = std::move(weights);
  j["atoms"] = std::move(atoms);
  return j;
}

Json certificate_to_json(const Theta2Result& result, const std::vector<Polynomial>& squares) {
  Json j;
  j["verdict"] = to_string(result.verdict);
  j["gram"] = result.certificate ? matrix_to_json(result.certificate->gram) : Json::array();
  Json sq = Json::array();
  for (const Polynomial& g : squares) sq.push_back(render(g));
  j["squares"] = std::move(sq);
  j["witness"] = result.witness ? sequence_to_json(result.witness->y) : Json(nullptr);
  Json res;
  res["affine"] = result.affine_residual;
  res["projection_iterations"] = result.projection_iterations;
  res["witness_iterations"] = result.witness_iterations;
  if (result.certificate) {
    res["gram_residual"] = result.certificate->residual;
    res["gram_min_eigenvalue"] = result.certificate->min_eigenvalue;
  }
  if (result.witness) {
    res["witness_min_eigenvalue"] = result.witness->min_eigenvalue;
    res["riesz"] = result.witness->riesz_value;
  }
  j["residuals"] = std::move(res);
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << dump(j);
}

TracialSequence read_sequence(const std::filesystem::path& path) { return sequence_from_json(read_json_file(path)); }

void write_sequence(const std::filesystem::path& path, const TracialSequence& y) {
  write_json_file(path, sequence_to_json(y));
}

}  // namespace tracial
