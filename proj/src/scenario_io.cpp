#include "beamsched/scenario_io.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

namespace beamsched {

using nlohmann::json;

namespace {

Matrix parse_matrix(const json& j, const std::string& path) {
  if (j.is_number()) return scalar_matrix(j.get<double>());
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ConfigError(path + ": expected a number or a nested row-major array");
  const auto rows = static_cast<int>(j.size());
  const auto cols = static_cast<int>(j.front().size());
  if (rows > kMaxStateDim || cols > kMaxStateDim || cols == 0)
    throw ConfigError(path + ": matrix shape out of range");
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw ConfigError(path + ": ragged matrix rows");
    for (int c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw ConfigError(path + ": non-numeric entry");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

std::vector<double> parse_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) throw ConfigError(path + ": non-numeric entry");
    v.push_back(x.get<double>());
  }
  return v;
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + ": missing key '" + key + "'");
  return *it;
}

double number(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& obj, const char* key, const std::string& path) {
  const auto& v = require(obj, key, path);
  if (!v.is_number_integer()) throw ConfigError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

DynamicsMode parse_mode(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  DynamicsMode mode;
  mode.label = j.value("label", std::string{});
  mode.amplitude = number(j, "q", path);

  Matrix base;
  if (auto b = j.find("builder"); b != j.end()) {
    const auto kind = b->get<std::string>();
    const double ts = j.value("Ts", 1.0);
    if (kind == "cv") {
      mode.transition = cv_matrix(ts);
    } else if (kind == "ct") {
      double omega;
      if (j.contains("omega_rad")) omega = number(j, "omega_rad", path);
      else if (j.contains("omega_deg")) omega = number(j, "omega_deg", path) * std::numbers::pi / 180.0;
      else throw ConfigError(path + ": ct builder needs omega_deg or omega_rad");
      mode.transition = ct_matrix(omega, ts);
    } else {
      throw ConfigError(path + ".builder: unknown builder '" + kind + "'");
    }
    base = process_noise(1.0, ts);
  } else {
    mode.transition = parse_matrix(require(j, "F", path), path + ".F");
    base = identity(static_cast<int>(mode.transition.rows()));
  }
  if (j.contains("Q_base")) base = parse_matrix(j["Q_base"], path + ".Q_base");
  mode.noise = j.contains("Q") ? parse_matrix(j["Q"], path + ".Q") : Matrix(mode.amplitude * base);
  return mode;
}

InitialRule parse_initial(const json& t, const std::string& path) {
  if (auto p = t.find("P0"); p != t.end()) return FixedInitial{parse_matrix(*p, path + ".P0")};
  auto r = t.find("P0_rule");
  if (r == t.end()) throw ConfigError(path + ": needs P0 or P0_rule");
  if (!r->is_object() || r->size() != 1) throw ConfigError(path + ".P0_rule: expected a single-key object");
  if (auto u = r->find("uniform_scalar"); u != r->end()) {
    auto v = parse_vector(*u, path + ".P0_rule.uniform_scalar");
    if (v.size() != 2) throw ConfigError(path + ".P0_rule.uniform_scalar: expected [lo, hi]");
    return UniformScalarInitial{v[0], v[1]};
  }
  if (auto g = r->find("gram_uniform01"); g != r->end()) {
    if (!g->is_number_integer()) throw ConfigError(path + ".P0_rule.gram_uniform01: expected an integer");
    return GramUniformInitial{g->get<int>()};
  }
  throw ConfigError(path + ".P0_rule: unknown rule '" + r->begin().key() + "'");
}

TargetSpec parse_target(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
  TargetSpec t;
  t.tag = j.value("tag", std::string{});
  const auto& modes = require(j, "modes", path);
  if (!modes.is_array() || modes.empty()) throw ConfigError(path + ".modes: expected a non-empty array");
  for (std::size_t m = 0; m < modes.size(); ++m)
    t.modes.push_back(parse_mode(modes[m], path + ".modes[" + std::to_string(m) + "]"));
  const auto& u = require(j, "U", path);
  t.probs.passive = parse_vector(require(u, "u0", path + ".U"), path + ".U.u0");
  t.probs.active = parse_vector(require(u, "u1", path + ".U"), path + ".U.u1");
  t.meas.H = parse_matrix(require(j, "H", path), path + ".H");
  t.meas.R = parse_matrix(require(j, "R", path), path + ".R");
  t.weight = number(j, "d", path);
  t.measurement_cost = j.contains("h") ? number(j, "h", path) : 0.0;
  t.initial = parse_initial(j, path);
  return t;
}

ScenarioSpec parse_scenario_impl(const json& doc) {
  if (!doc.is_object()) throw ConfigError("scenario: expected a JSON object");
  ScenarioSpec s;
  s.id = doc.value("id", std::string{"scenario"});
  const auto& targets = require(doc, "targets", "scenario");
  if (!targets.is_array()) throw ConfigError("targets: expected an array");
  for (std::size_t n = 0; n < targets.size(); ++n)
    s.targets.push_back(parse_target(targets[n], "targets[" + std::to_string(n) + "]"));
  s.radars = integer(doc, "K", "scenario");
  s.discount = number(doc, "beta", "scenario");
  s.horizon = integer(doc, "horizon", "scenario");
  s.truncation = integer(doc, "tau", "scenario");
  s.relax_probability_order = doc.value("relax_probability_order", false);
  return s;
}

}  // namespace

ScenarioSpec parse_scenario(const json& doc) {
  try {
    return parse_scenario_impl(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON type error: ") + e.what());
  }
}

ScenarioSpec parse_scenario_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
  }
  return parse_scenario(doc);
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

json matrix_to_json(const Matrix& m) {
  if (m.rows() == 1 && m.cols() == 1) return m(0, 0);
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const ScenarioSpec& spec) {
  json targets = json::array();
  for (const auto& t : spec.targets) {
    json modes = json::array();
    for (const auto& m : t.modes)
      modes.push_back({{"label", m.label},
                       {"F", matrix_to_json(m.transition)},
                       {"q", m.amplitude},
                       {"Q", matrix_to_json(m.noise)}});
    json jt = {{"modes", modes},
               {"U", {{"u0", t.probs.passive}, {"u1", t.probs.active}}},
               {"H", matrix_to_json(t.meas.H)},
               {"R", matrix_to_json(t.meas.R)},
               {"d", t.weight},
               {"h", t.measurement_cost}};
    if (!t.tag.empty()) jt["tag"] = t.tag;
    std::visit(
        [&](const auto& rule) {
          using R0 = std::decay_t<decltype(rule)>;
          if constexpr (std::is_same_v<R0, FixedInitial>) jt["P0"] = matrix_to_json(rule.P);
          else if constexpr (std::is_same_v<R0, UniformScalarInitial>)
            jt["P0_rule"] = {{"uniform_scalar", {rule.lo, rule.hi}}};
          else jt["P0_rule"] = {{"gram_uniform01", rule.dim}};
        },
        t.initial);
    targets.push_back(std::move(jt));
  }
  json doc = {{"id", spec.id},
              {"targets", targets},
              {"K", spec.radars},
              {"beta", spec.discount},
              {"horizon", spec.horizon},
              {"tau", spec.truncation}};
  if (spec.relax_probability_order) doc["relax_probability_order"] = true;
  return doc;
}

}  // namespace beamsched
