#include "sbp/io.hpp"

#include "sbp/error.hpp"

#include <fstream>
#include <sstream>

namespace sbp {

namespace {

constexpr const char* kModule = "operator-core";
using nlohmann::json;

json flatten(const Matrix& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out.push_back(m(i, j));
  return out;
}

json to_array(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const json& require(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw Error(ErrorCode::schema, kModule, std::string("missing required field \"") + key + "\"");
  return *it;
}

double number_at(const json& value, const std::string& path) {
  if (!value.is_number()) throw Error(ErrorCode::parse, kModule, "expected a number at " + path);
  return value.get<double>();
}

Vector read_vector(const json& doc, const char* key, Index expected) {
  const json& arr = require(doc, key);
  if (!arr.is_array()) throw Error(ErrorCode::parse, kModule, std::string("expected an array at ") + key);
  if (static_cast<Index>(arr.size()) != expected) {
    throw Error(ErrorCode::schema, kModule,
                std::string(key) + " must have " + std::to_string(expected) + " entries, got " +
                    std::to_string(arr.size()));
  }
  Vector v(expected);
  for (Index i = 0; i < expected; ++i) v(i) = number_at(arr[i], std::string(key) + "[" + std::to_string(i) + "]");
  return v;
}

Matrix read_matrix(const json& doc, const char* key, Index size) {
  const Vector flat = read_vector(doc, key, size * size);
  Matrix m(size, size);
  for (Index i = 0; i < size; ++i)
    for (Index j = 0; j < size; ++j) m(i, j) = flat(i * size + j);
  return m;
}

}  // namespace

json operator_to_json(const SbpOperatorPair& op) {
  json doc;
  if (!op.name.empty()) doc["name"] = op.name;
  doc["n"] = op.degree();
  doc["q"] = op.q;
  doc["interval"] = json::array({op.interval.a(), op.interval.b()});
  doc["x"] = to_array(op.x);
  doc["D_plus"] = flatten(op.d_plus);
  doc["D_minus"] = flatten(op.d_minus);
  doc["H"] = flatten(op.h);
  doc["S"] = flatten(op.s);
  doc["p0"] = to_array(op.p0);
  doc["pn"] = to_array(op.pn);
  return doc;
}

SbpOperatorPair operator_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::parse, kModule, "operator document must be a JSON object");

  const json& n_field = require(doc, "n");
  if (!n_field.is_number_integer()) throw Error(ErrorCode::parse, kModule, "expected an integer at n");
  const auto n = n_field.get<long long>();
  if (n < 1) throw Error(ErrorCode::schema, kModule, "n must be at least 1");
  const Index size = static_cast<Index>(n) + 1;

  const json& q_field = require(doc, "q");
  if (!q_field.is_number_integer()) throw Error(ErrorCode::parse, kModule, "expected an integer at q");

  SbpOperatorPair op;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw Error(ErrorCode::parse, kModule, "expected a string at name");
    op.name = it->get<std::string>();
  }
  op.q = q_field.get<int>();

  const Vector ends = read_vector(doc, "interval", 2);
  op.interval = Interval(ends(0), ends(1));
  op.x = read_vector(doc, "x", size);
  op.d_plus = read_matrix(doc, "D_plus", size);
  op.h = read_matrix(doc, "H", size);
  op.p0 = read_vector(doc, "p0", size);
  op.pn = read_vector(doc, "pn", size);
  op.s = doc.contains("S") ? read_matrix(doc, "S", size) : Matrix::Zero(size, size);

  // Shapes and node distinctness first so a bad document never reaches a solve.
  op.d_minus = op.d_plus;
  check_structure(op);
  op.d_minus = doc.contains("D_minus") ? read_matrix(doc, "D_minus", size) : derive_d_minus(op.d_plus, op.h, op.s);
  check_structure(op);
  return op;
}

std::string dump_operator(const SbpOperatorPair& op) { return operator_to_json(op).dump(2) + "\n"; }

SbpOperatorPair parse_operator(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse, kModule, std::string("malformed JSON: ") + e.what());
  }
  return operator_from_json(doc);
}

void save_operator(const SbpOperatorPair& op, const std::filesystem::path& destination) {
  std::ofstream out(destination);
  if (!out) throw Error(ErrorCode::io, kModule, "cannot open " + destination.string() + " for writing");
  out << dump_operator(op);
  if (!out) throw Error(ErrorCode::io, kModule, "failed writing " + destination.string());
}

SbpOperatorPair load_operator(const std::filesystem::path& source) {
  std::ifstream in(source);
  if (!in) throw Error(ErrorCode::io, kModule, "cannot open " + source.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_operator(buffer.str());
}

}  // namespace sbp
