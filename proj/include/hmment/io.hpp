#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "hmment/hmm.hpp"
#include "hmment/model_curve.hpp"

namespace hmment::io {

/// {"delta": [[...], ...], "phi": [...]}
HiddenMarkovModel model_from_json(const std::string& text);
HiddenMarkovModel load_model(const std::string& path);

/// {"type": "bsc", "pi": [[p00, p01], [p10, p11]]}
/// {"type": "affine", "phi": [...], "base": [[...]], "direction": [[...]]}
/// {"type": "polynomial", "phi": [...], "coefficients": [[[...]], ...]}
ModelCurve curve_from_json(const std::string& text);
ModelCurve load_curve(const std::string& path);

/// 17 significant digits, round-trip safe.
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header);

  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  CsvWriter& cell(const std::string& v);
  void end_row();

 private:
  std::ostream& out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

}  // namespace hmment::io
