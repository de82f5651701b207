#include "mtbp/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mtbp {

using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIOError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProcessModel parse_model(const json& j) {
  ProcessModel m;
  try {
    m.d = j.at("d").get<int>();
    if (m.d <= 0) throw ModelIOError("d must be positive");
    const auto& types = j.at("types");
    if (!types.is_array()) throw ModelIOError("types must be an array");
    for (const auto& jt : types) {
      OffspringDistribution dist;
      for (const auto& je : jt.at("entries")) {
        OffspringEntry e;
        const auto& jc = je.at("counts");
        if (!jc.is_array() || static_cast<int>(jc.size()) != m.d)
          throw ModelIOError("counts must be an array of length d");
        e.counts.resize(m.d);
        for (int i = 0; i < m.d; ++i) e.counts[i] = jc.at(i).get<int>();
        const auto& jp = je.at("prob");
        if (jp.is_string()) {
          e.prob_exact = Rational::parse(jp.get<std::string>());
          e.prob = e.prob_exact->to_double();
        } else if (jp.is_number()) {
          e.prob = jp.get<double>();
        } else {
          throw ModelIOError("prob must be a \"p/q\" string or a number");
        }
        dist.entries.push_back(std::move(e));
      }
      m.types.push_back(std::move(dist));
    }
  } catch (const json::exception& ex) {
    throw ModelIOError(std::string("model schema error: ") + ex.what());
  } catch (const std::invalid_argument& ex) {
    throw ModelIOError(std::string("model value error: ") + ex.what());
  }
  try {
    validate_model(m);
  } catch (const std::invalid_argument& ex) {
    throw ModelIOError(std::string("model invariant violated: ") + ex.what());
  }
  return m;
}

}  // namespace

ProcessModel model_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ModelIOError(std::string("JSON parse error: ") + ex.what());
  }
  return parse_model(j);
}

ProcessModel load_model(const std::string& path) { return model_from_json_text(read_file(path)); }

std::string model_to_json_text(const ProcessModel& m) {
  json j;
  j["d"] = m.d;
  json types = json::array();
  for (const auto& t : m.types) {
    json entries = json::array();
    for (const auto& e : t.entries) {
      json je;
      je["counts"] = std::vector<int>(e.counts.data(), e.counts.data() + e.counts.size());
      if (e.prob_exact) {
        je["prob"] = e.prob_exact->to_string();
      } else {
        je["prob"] = e.prob;
      }
      entries.push_back(std::move(je));
    }
    types.push_back(json{{"entries", std::move(entries)}});
  }
  j["types"] = std::move(types);
  return j.dump(1) + "\n";
}

void save_model(const ProcessModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelIOError("cannot write " + path);
  out << model_to_json_text(m);
}

CountableFamily family_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ModelIOError(std::string("JSON parse error: ") + ex.what());
  }
  CountableFamily fam;
  fam.table = parse_model(j);
  try {
    fam.d_max = j.at("d_max").get<int>();
    for (const auto& v : j.at("phi")) fam.phi.push_back(v.get<double>());
    for (const auto& v : j.at("psi")) fam.psi.push_back(v.get<double>());
    if (j.contains("epsilon")) {
      fam.has_epsilon = true;
      fam.epsilon = j.at("epsilon").get<double>();
    }
  } catch (const json::exception& ex) {
    throw ModelIOError(std::string("family schema error: ") + ex.what());
  }
  if (fam.d_max != fam.table.d)
    throw ModelIOError("family d_max must match the tabulated type count");
  if (static_cast<int>(fam.phi.size()) != fam.d_max || static_cast<int>(fam.psi.size()) != fam.d_max)
    throw ModelIOError("phi and psi must list one weight per tabulated type");
  for (double v : fam.phi)
    if (!(v >= 1.0)) throw ModelIOError("phi weights must be >= 1");
  for (double v : fam.psi)
    if (!(v >= 1.0)) throw ModelIOError("psi weights must be >= 1");
  if (fam.has_epsilon && !(fam.epsilon > 0.0)) throw ModelIOError("epsilon must be positive");
  return fam;
}

CountableFamily load_family(const std::string& path) {
  return family_from_json_text(read_file(path));
}

}  // namespace mtbp
