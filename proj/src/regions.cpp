#include "vgs/regions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "vgs/rng.hpp"

namespace vgs {

using nlohmann::json;

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::sampled_safe: return "sampled_safe";
    case Provenance::sampled_unsafe: return "sampled_unsafe";
    case Provenance::verified_safe: return "verified_safe";
    case Provenance::verified_unsat_to_sat: return "verified_unsat_to_sat";
    case Provenance::clustered: return "clustered";
  }
  return "?";
}

Provenance provenance_from_string(const std::string& s) {
  if (s == "sampled_safe") return Provenance::sampled_safe;
  if (s == "sampled_unsafe") return Provenance::sampled_unsafe;
  if (s == "verified_safe") return Provenance::verified_safe;
  if (s == "verified_unsat_to_sat") return Provenance::verified_unsat_to_sat;
  if (s == "clustered") return Provenance::clustered;
  throw std::runtime_error("region file: unknown provenance '" + s + "'");
}

void validate(const SplitterConfig& cfg) {
  if (cfg.epsilon <= 0.0 || cfg.epsilon >= 1.0)
    throw std::invalid_argument("splitter: epsilon must be in (0, 1)");
  if (cfg.delta <= 0.0 || cfg.delta >= 1.0)
    throw std::invalid_argument("splitter: delta must be in (0, 1)");
  if (cfg.violation_fraction_threshold < 0.0 ||
      cfg.violation_fraction_threshold > 1.0)
    throw std::invalid_argument("splitter: threshold must be in [0, 1]");
  if (cfg.max_depth < 0)
    throw std::invalid_argument("splitter: max_depth must be non-negative");
  const double needed = std::log(1.0 / cfg.delta) / cfg.epsilon;
  if (static_cast<double>(cfg.samples_per_region) < needed)
    throw std::invalid_argument(
        "splitter: samples_per_region below ln(1/delta)/epsilon");
}

namespace {

Box common_domain(const Network& net,
                  const std::vector<SafetyProperty>& props) {
  if (props.empty())
    throw std::invalid_argument("split_domain: no properties");
  const Box& domain = props.front().input_box;
  for (const auto& p : props)
    if (!(p.input_box == domain))
      throw std::invalid_argument(
          "split_domain: properties disagree on the input box");
  if (domain.dim() != net.input_dim())
    throw std::invalid_argument(
        "split_domain: domain does not match network input");
  return domain;
}

void sort_with_provenance(std::vector<Box>& boxes,
                          std::vector<Provenance>& tags) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return lex_less(boxes[a], boxes[b]);
  });
  std::vector<Box> sorted_boxes;
  std::vector<Provenance> sorted_tags;
  sorted_boxes.reserve(boxes.size());
  sorted_tags.reserve(tags.size());
  for (std::size_t i : order) {
    sorted_boxes.push_back(std::move(boxes[i]));
    sorted_tags.push_back(tags[i]);
  }
  boxes = std::move(sorted_boxes);
  tags = std::move(sorted_tags);
}

}  // namespace

void sort_canonical(LabeledRegionSet& set) {
  sort_with_provenance(set.safe, set.safe_provenance);
  sort_with_provenance(set.unsafe, set.unsafe_provenance);
}

LabeledRegionSet split_domain(const Network& net,
                              const std::vector<SafetyProperty>& props,
                              const SplitterConfig& cfg) {
  validate(net);
  validate(cfg);
  LabeledRegionSet out;
  out.domain = common_domain(net, props);

  struct Node {
    Box box;
    int depth;
  };
  std::vector<Node> stack{{out.domain, 0}};
  std::uint64_t leaf_counter = 0;
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    Rng rng(derive_seed(cfg.seed, leaf_counter++));
    int violations = 0;
    for (int k = 0; k < cfg.samples_per_region; ++k) {
      const Eigen::VectorXd x = sample(node.box, rng);
      if (any_holds(props, x, forward(net, x))) ++violations;
    }
    if (violations == 0) {
      out.safe.push_back(std::move(node.box));
      out.safe_provenance.push_back(Provenance::sampled_safe);
      continue;
    }
    const double fraction = static_cast<double>(violations) /
                            static_cast<double>(cfg.samples_per_region);
    if (fraction >= cfg.violation_fraction_threshold ||
        node.depth == cfg.max_depth) {
      out.unsafe.push_back(std::move(node.box));
      out.unsafe_provenance.push_back(Provenance::sampled_unsafe);
      continue;
    }
    auto halves = split(node.box, widest_dim(node.box));
    stack.push_back(Node{std::move(halves.second), node.depth + 1});
    stack.push_back(Node{std::move(halves.first), node.depth + 1});
  }
  sort_canonical(out);
  return out;
}

LabeledRegionSet refine(const Network& net,
                        const std::vector<SafetyProperty>& props,
                        const LabeledRegionSet& approx,
                        const VerifierConfig& budgets) {
  validate(net);
  LabeledRegionSet out;
  out.domain = approx.domain;
  out.unsafe = approx.unsafe;
  out.unsafe_provenance = approx.unsafe_provenance;
  for (std::size_t i = 0; i < approx.safe.size(); ++i) {
    const Box& box = approx.safe[i];
    const Verdict v = verify_any(net, props, box, budgets);
    if (v.kind == VerdictKind::unsat) {
      out.safe.push_back(box);
      out.safe_provenance.push_back(Provenance::verified_safe);
    } else {
      out.unsafe.push_back(box);
      out.unsafe_provenance.push_back(Provenance::verified_unsat_to_sat);
    }
  }
  sort_canonical(out);
  return out;
}

bool is_tiling(const LabeledRegionSet& set, double rel_tol) {
  std::vector<const Box*> all;
  for (const auto& b : set.safe) all.push_back(&b);
  for (const auto& b : set.unsafe) all.push_back(&b);
  double total = 0.0;
  for (const Box* b : all) {
    if (b->dim() != set.domain.dim() || is_empty(*b)) return false;
    if (!subsumes(set.domain, *b)) return false;
    total += volume(*b);
  }
  const double dom = volume(set.domain);
  if (std::abs(total - dom) > rel_tol * std::max(dom, 1.0)) return false;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (interiors_overlap(*all[i], *all[j])) return false;
  return true;
}

namespace {

json box_to_json(const Box& b) {
  json lower = json::array();
  json upper = json::array();
  for (Eigen::Index i = 0; i < b.dim(); ++i) {
    lower.push_back(b.lower[i]);
    upper.push_back(b.upper[i]);
  }
  return {{"lower", std::move(lower)}, {"upper", std::move(upper)}};
}

Box box_from_json(const json& j) {
  const auto& lo = j.at("lower");
  const auto& hi = j.at("upper");
  if (lo.size() != hi.size())
    throw std::runtime_error("region file: box dimension mismatch");
  Box::Array lower(static_cast<Eigen::Index>(lo.size()));
  Box::Array upper(static_cast<Eigen::Index>(hi.size()));
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    lower[i] = lo.at(static_cast<std::size_t>(i)).get<double>();
    upper[i] = hi.at(static_cast<std::size_t>(i)).get<double>();
  }
  return Box(std::move(lower), std::move(upper));
}

}  // namespace

std::string region_set_to_json(const LabeledRegionSet& set) {
  if (set.safe_provenance.size() != set.safe.size() ||
      set.unsafe_provenance.size() != set.unsafe.size())
    throw std::invalid_argument("region set: provenance length mismatch");
  json out;
  out["domain"] = box_to_json(set.domain);
  out["safe"] = json::array();
  for (const auto& b : set.safe) out["safe"].push_back(box_to_json(b));
  out["unsafe"] = json::array();
  for (const auto& b : set.unsafe) out["unsafe"].push_back(box_to_json(b));
  // One flat list: tags for the safe boxes first, then the unsafe ones.
  json prov = json::array();
  for (Provenance p : set.safe_provenance) prov.push_back(to_string(p));
  for (Provenance p : set.unsafe_provenance) prov.push_back(to_string(p));
  out["provenance"] = std::move(prov);
  return out.dump(2) + "\n";
}

LabeledRegionSet region_set_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("region file: ") + e.what());
  }
  LabeledRegionSet set;
  set.domain = box_from_json(j.at("domain"));
  for (const auto& jb : j.value("safe", json::array()))
    set.safe.push_back(box_from_json(jb));
  for (const auto& jb : j.value("unsafe", json::array()))
    set.unsafe.push_back(box_from_json(jb));
  const auto& prov = j.at("provenance");
  if (prov.size() != set.safe.size() + set.unsafe.size())
    throw std::runtime_error("region file: provenance length mismatch");
  std::size_t k = 0;
  for (std::size_t i = 0; i < set.safe.size(); ++i, ++k)
    set.safe_provenance.push_back(
        provenance_from_string(prov.at(k).get<std::string>()));
  for (std::size_t i = 0; i < set.unsafe.size(); ++i, ++k)
    set.unsafe_provenance.push_back(
        provenance_from_string(prov.at(k).get<std::string>()));
  for (const auto& b : set.safe)
    if (b.dim() != set.domain.dim())
      throw std::runtime_error("region file: box dimension mismatch");
  for (const auto& b : set.unsafe)
    if (b.dim() != set.domain.dim())
      throw std::runtime_error("region file: box dimension mismatch");
  return set;
}

LabeledRegionSet load_region_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open region file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return region_set_from_json(ss.str());
}

void save_region_set(const LabeledRegionSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write region file: " + path);
  out << region_set_to_json(set);
}

}  // namespace vgs
