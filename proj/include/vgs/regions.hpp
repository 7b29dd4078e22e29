#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgs/box.hpp"
#include "vgs/network.hpp"
#include "vgs/property.hpp"
#include "vgs/verifier.hpp"

namespace vgs {

enum class Provenance {
  sampled_safe,
  sampled_unsafe,
  verified_safe,
  verified_unsat_to_sat,
  clustered,
};

std::string to_string(Provenance p);
Provenance provenance_from_string(const std::string& s);

/// A partition of the input domain into safe and unsafe boxes. Before
/// clustering the boxes tile the domain exactly; each box carries a tag
/// recording how it earned its label. Lists are kept lexicographically
/// sorted so identical analyses serialize identically.
struct LabeledRegionSet {
  Box domain;
  std::vector<Box> safe;
  std::vector<Box> unsafe;
  std::vector<Provenance> safe_provenance;
  std::vector<Provenance> unsafe_provenance;
};

struct SplitterConfig {
  int samples_per_region = 354;
  double violation_fraction_threshold = 0.3;
  int max_depth = 14;
  double epsilon = 0.01;
  double delta = 0.03;
  std::uint64_t seed = 0;
};

/// Throws std::invalid_argument unless the parameters are in range and
/// samples_per_region >= ln(1/delta)/epsilon, the count at which a
/// zero-violation sample certifies violation rate <= epsilon with
/// confidence 1 - delta.
void validate(const SplitterConfig& cfg);

/// Recursively splits the common input box of the properties: a leaf whose
/// samples show no violation becomes sampled_safe; a violating leaf is
/// declared sampled_unsafe once the violation fraction reaches the
/// threshold or the depth limit, and is bisected along its widest
/// dimension otherwise. Deterministic given cfg.seed.
LabeledRegionSet split_domain(const Network& net,
                              const std::vector<SafetyProperty>& props,
                              const SplitterConfig& cfg);

/// Formal refinement pass: every sampled-safe box is verified against every
/// property; boxes with a satisfiable (or budget-exhausted) outcome move to
/// the unsafe side as verified_unsat_to_sat, the survivors become
/// verified_safe. Unsafe boxes pass through untouched.
LabeledRegionSet refine(const Network& net,
                        const std::vector<SafetyProperty>& props,
                        const LabeledRegionSet& approx,
                        const VerifierConfig& budgets = {});

/// Checks the partition invariant: volumes sum to the domain volume within
/// the relative tolerance and no two boxes overlap in their interiors.
bool is_tiling(const LabeledRegionSet& set, double rel_tol = 1e-9);

/// Sorts both lists lexicographically by box corners, provenance carried
/// along; the canonical order used by every producer in this library.
void sort_canonical(LabeledRegionSet& set);

LabeledRegionSet load_region_set(const std::string& path);
void save_region_set(const LabeledRegionSet& set, const std::string& path);
LabeledRegionSet region_set_from_json(const std::string& text);
std::string region_set_to_json(const LabeledRegionSet& set);

}  // namespace vgs
