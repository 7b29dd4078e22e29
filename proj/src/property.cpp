#include "vgs/property.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace vgs {

using nlohmann::json;

std::string to_string(Relation r) {
  switch (r) {
    case Relation::gt: return ">";
    case Relation::lt: return "<";
    case Relation::ge: return ">=";
    case Relation::le: return "<=";
  }
  return "?";
}

Relation relation_from_string(const std::string& s) {
  if (s == ">") return Relation::gt;
  if (s == "<") return Relation::lt;
  if (s == ">=") return Relation::ge;
  if (s == "<=") return Relation::le;
  throw std::runtime_error("property file: unknown relation '" + s + "'");
}

static bool relation_satisfied(double value, Relation r) {
  switch (r) {
    case Relation::gt: return value > 0.0;
    case Relation::lt: return value < 0.0;
    case Relation::ge: return value >= 0.0;
    case Relation::le: return value <= 0.0;
  }
  return false;
}

bool holds(const SafetyProperty& p, const Eigen::VectorXd& x,
           const Eigen::VectorXd& y) {
  if (p.input_box.dim() != x.size())
    throw std::invalid_argument("holds: input dimension mismatch");
  if (!contains(p.input_box, x)) return false;
  if (p.argmax_selector) {
    const int i = *p.argmax_selector;
    if (i < 0 || i >= y.size())
      throw std::invalid_argument("holds: selector out of range");
    if (argmax_index(y) != i) return false;
    for (int j = 0; j < y.size(); ++j)
      if (j != i && y[i] < y[j] + p.margin) return false;
  }
  for (const auto& term : p.linear_terms) {
    if (term.out_coeff.size() != y.size() || term.in_coeff.size() != x.size())
      throw std::invalid_argument("holds: term dimension mismatch");
    const double value =
        term.out_coeff.dot(y) + term.in_coeff.dot(x) + term.constant;
    if (!relation_satisfied(value, term.relation)) return false;
  }
  return true;
}

bool any_holds(const std::vector<SafetyProperty>& props,
               const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  for (const auto& p : props)
    if (holds(p, x, y)) return true;
  return false;
}

std::vector<SafetyProperty> particle_world_properties(double margin) {
  std::vector<SafetyProperty> props;
  for (int i = 0; i < 4; ++i) {
    SafetyProperty p;
    p.name = "G" + std::to_string(i + 1);
    p.input_box = unit_box<double>(8);
    p.argmax_selector = i;
    LinearTerm term;
    term.out_coeff = Eigen::VectorXd::Zero(4);
    term.out_coeff[i] = kStepScale;
    term.in_coeff = Eigen::VectorXd::Zero(8);
    term.in_coeff[i] = -1.0;
    term.constant = 0.0;
    term.relation = Relation::gt;  // Y[i] * 0.055 - X[i] > 0
    p.linear_terms.push_back(std::move(term));
    p.margin = margin;
    props.push_back(std::move(p));
  }
  return props;
}

static json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

static Eigen::VectorXd vector_from_json(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = a.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

std::string properties_to_json(const std::vector<SafetyProperty>& props) {
  json out;
  out["properties"] = json::array();
  for (const auto& p : props) {
    json jp;
    jp["name"] = p.name;
    jp["input_box"] = {{"lower", vector_to_json(p.input_box.lower.matrix())},
                       {"upper", vector_to_json(p.input_box.upper.matrix())}};
    if (p.argmax_selector) jp["argmax_selector"] = *p.argmax_selector;
    jp["margin"] = p.margin;
    jp["linear_terms"] = json::array();
    for (const auto& t : p.linear_terms) {
      jp["linear_terms"].push_back(
          {{"output_coefficients", vector_to_json(t.out_coeff)},
           {"input_coefficients", vector_to_json(t.in_coeff)},
           {"constant", t.constant},
           {"relation", to_string(t.relation)}});
    }
    out["properties"].push_back(std::move(jp));
  }
  return out.dump(2) + "\n";
}

std::vector<SafetyProperty> properties_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("property file: ") + e.what());
  }
  if (!j.contains("properties") || !j.at("properties").is_array())
    throw std::runtime_error("property file: missing 'properties' array");
  std::vector<SafetyProperty> props;
  for (const auto& jp : j.at("properties")) {
    SafetyProperty p;
    p.name = jp.value("name", "");
    const auto& jb = jp.at("input_box");
    Eigen::VectorXd lo = vector_from_json(jb.at("lower"));
    Eigen::VectorXd hi = vector_from_json(jb.at("upper"));
    p.input_box = Box(lo.array(), hi.array());
    if (jp.contains("argmax_selector") && !jp.at("argmax_selector").is_null())
      p.argmax_selector = jp.at("argmax_selector").get<int>();
    p.margin = jp.value("margin", 0.0);
    Eigen::Index out_dim = -1;
    for (const auto& jt : jp.value("linear_terms", json::array())) {
      LinearTerm t;
      t.out_coeff = vector_from_json(jt.at("output_coefficients"));
      t.in_coeff = vector_from_json(jt.at("input_coefficients"));
      t.constant = jt.at("constant").get<double>();
      t.relation = relation_from_string(jt.at("relation").get<std::string>());
      if (t.in_coeff.size() != p.input_box.dim())
        throw std::runtime_error(
            "property file: term input coefficients do not match input box");
      if (out_dim >= 0 && t.out_coeff.size() != out_dim)
        throw std::runtime_error(
            "property file: inconsistent output coefficient lengths");
      out_dim = t.out_coeff.size();
      p.linear_terms.push_back(std::move(t));
    }
    props.push_back(std::move(p));
  }
  return props;
}

std::vector<SafetyProperty> load_properties(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open property file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return properties_from_json(ss.str());
}

void save_properties(const std::vector<SafetyProperty>& props,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write property file: " + path);
  out << properties_to_json(props);
}

}  // namespace vgs
