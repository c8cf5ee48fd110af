#include "hmment/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hmment::io {

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidModel, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidModel, std::string("malformed JSON: ") + e.what());
  }
}

Eigen::MatrixXd matrix_from(const json& j, const std::string& name) {
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::InvalidModel, name + " must be a nonempty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw Error(ErrorCode::InvalidModel, name + " row " + std::to_string(i) + " has the wrong length");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) {
        throw Error(ErrorCode::InvalidModel,
                    name + " entry (" + std::to_string(i) + ", " + std::to_string(k) + ") is not a number");
      }
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

SymbolMap phi_from(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidModel, "phi must be an array of symbols");
  std::vector<int> phi;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw Error(ErrorCode::InvalidModel, "phi entries must be integers");
    phi.push_back(v.get<int>());
  }
  return SymbolMap(std::move(phi));
}

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::InvalidModel, std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

}  // namespace

HiddenMarkovModel model_from_json(const std::string& text) {
  const json j = parse(text);
  return HiddenMarkovModel(StochasticMatrix(matrix_from(field(j, "delta"), "delta")), phi_from(field(j, "phi")));
}

HiddenMarkovModel load_model(const std::string& path) { return model_from_json(read_file(path)); }

ModelCurve curve_from_json(const std::string& text) {
  const json j = parse(text);
  const std::string type = j.value("type", "bsc");
  if (type == "bsc") {
    const Eigen::MatrixXd pi = matrix_from(field(j, "pi"), "pi");
    if (pi.rows() != 2 || pi.cols() != 2) throw Error(ErrorCode::InvalidModel, "pi must be 2x2");
    const StochasticMatrix check(pi);
    return ModelCurve::binary_symmetric(pi);
  }
  if (type == "affine") {
    return ModelCurve::affine(matrix_from(field(j, "base"), "base"),
                              matrix_from(field(j, "direction"), "direction"), phi_from(field(j, "phi")));
  }
  if (type == "polynomial") {
    std::vector<Eigen::MatrixXd> coeffs;
    const json& c = field(j, "coefficients");
    if (!c.is_array() || c.empty()) throw Error(ErrorCode::InvalidModel, "coefficients must be a nonempty array");
    for (std::size_t k = 0; k < c.size(); ++k) coeffs.push_back(matrix_from(c[k], "coefficients[" + std::to_string(k) + "]"));
    return ModelCurve(std::move(coeffs), phi_from(field(j, "phi")));
  }
  throw Error(ErrorCode::InvalidModel, "unknown curve type \"" + type + "\"");
}

ModelCurve load_curve(const std::string& path) { return curve_from_json(read_file(path)); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
  out_ << (filled_ ? "," : "") << v;
  ++filled_;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != columns_) {
    throw Error(ErrorCode::DomainError, "CSV row has " + std::to_string(filled_) + " cells, header has " +
                                            std::to_string(columns_));
  }
  out_ << '\n';
  filled_ = 0;
}

}  // namespace hmment::io
