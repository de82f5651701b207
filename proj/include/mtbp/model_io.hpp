#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mtbp/model.hpp"

namespace mtbp {

// File handling or schema problems; distinct from domain/hypothesis errors so
// the CLI can map them to the I/O exit code.
struct ModelIOError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Tabulated prefix of a countable-type family: offspring tables for types
// 1..d_max plus the growth weights used by the assumption checks.
struct CountableFamily {
  ProcessModel table;
  int d_max = 0;
  std::vector<double> phi;
  std::vector<double> psi;
  bool has_epsilon = false;
  double epsilon = 0.0;
};

ProcessModel model_from_json_text(const std::string& text);
ProcessModel load_model(const std::string& path);
// Probabilities serialize as "p/q" strings when exact, JSON numbers otherwise.
std::string model_to_json_text(const ProcessModel& m);
void save_model(const ProcessModel& m, const std::string& path);

CountableFamily family_from_json_text(const std::string& text);
CountableFamily load_family(const std::string& path);

}  // namespace mtbp
