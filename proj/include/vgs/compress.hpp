#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgs/box.hpp"

namespace vgs {

struct ClusterConfig {
  /// Stop once this few boxes remain (the other stop is max_waste).
  int target_count = 1;
  /// Maximum admissible waste per merge: the fraction of the merged
  /// bounding box not covered by the two boxes it replaces.
  double max_waste = 0.05;
};

void validate(const ClusterConfig& cfg);

/// Greedy agglomeration: repeatedly replaces the pair of boxes whose
/// bounding-box union adds the least volume, until target_count boxes
/// remain or the cheapest merge would waste more than max_waste. The result
/// covers the union of the inputs and is never longer than the input;
/// returned in canonical lexicographic order.
std::vector<Box> cluster(std::vector<Box> unsafe, const ClusterConfig& cfg);

/// One variable's range inside an SMT region: closed by default, either end
/// can be made strict.
struct SmtBound {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_strict = false;
  bool hi_strict = false;
};

std::vector<std::string> default_var_names(Eigen::Index dim);

/// Renders regions as SMT-LIB2: one Real declaration per variable and a
/// single assertion, a disjunction of per-region bound conjunctions. An
/// empty region list asserts false. Every region must have one bound per
/// variable; throws std::invalid_argument otherwise.
std::string emit_smt(const std::vector<std::vector<SmtBound>>& regions,
                     const std::vector<std::string>& names);
std::string emit_smt(const std::vector<Box>& boxes,
                     const std::vector<std::string>& names);

/// Removes boxes subsumed by another and coalesces pairs that agree in all
/// dimensions but one and overlap or touch in that one. The returned list
/// covers exactly the same point set; running it again changes nothing.
std::vector<Box> simplify_boxes(std::vector<Box> boxes);

/// Uniform bucket grid over (at most) the two dimensions that spread the
/// boxes most; the remaining dimensions are checked per candidate, so
/// lookups stay exact. Immutable after build; concurrent reads are safe.
struct RegionIndex {
  Box domain;
  std::vector<Box> boxes;
  int resolution = 0;
  std::vector<Eigen::Index> active_dims;
  std::vector<std::vector<int>> cells;  // resolution^|active_dims| buckets
};

RegionIndex build_index(const Box& domain, std::vector<Box> boxes,
                        int resolution = 32);

/// Query-side counters, owned by the caller so the index itself can stay
/// immutable under concurrent readers.
struct IndexStats {
  std::uint64_t queries = 0;
  std::uint64_t out_of_domain = 0;
  std::uint64_t boxes_inspected = 0;
};

/// True iff some box contains x (closed bounds). Points outside the domain
/// are conservatively unsafe: the call returns true and records the event.
bool contains(const RegionIndex& idx, const Eigen::VectorXd& x,
              IndexStats* stats = nullptr);

}  // namespace vgs
