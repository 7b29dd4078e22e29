#pragma once

#include <cstdint>
#include <vector>

#include "vgs/compress.hpp"
#include "vgs/metrics.hpp"
#include "vgs/network.hpp"
#include "vgs/property.hpp"
#include "vgs/world.hpp"

namespace vgs {

/// Runtime enforcement shield over a set of always-avoid properties. Every
/// safety check evaluates the whole property list formula_multiplier times;
/// the repetitions model a fixed formula budget per check and always agree,
/// so the multiplier changes cost but never decisions.
struct ShieldSpec {
  std::vector<SafetyProperty> properties;
  int formula_multiplier = 1;
};

/// Throws std::invalid_argument when formula_multiplier < 1.
void validate(const ShieldSpec& spec);

struct ShieldDecision {
  ActionChoice original;
  ActionChoice final;
  bool overridden = false;  // false implies final == original
};

/// Clearance kept between a corrected step and the sensor reading.
inline constexpr double kSafetyGap = 1e-4;

/// Bridge from a discrete choice back into the policy's output space, for
/// property evaluation on corrected actions: the chosen component carries
/// the magnitude and every other component sits one unit below it, so
/// argmax selectors resolve to the chosen direction.
Eigen::VectorXd action_vector(const ActionChoice& action, Eigen::Index out_dim);

/// Single unrepeated check: true when the action fires no property at this
/// observation.
bool action_safe(const std::vector<SafetyProperty>& properties,
                 const Observation& obs, const ActionChoice& action,
                 Eigen::Index out_dim);

/// Checks the proposed action and corrects it when it violates a property:
/// first the highest-policy-value direction whose own action is safe, else
/// the proposed direction with its step shortened to sensor reading minus
/// kSafetyGap (never below zero). A zero step is safe under the
/// collision-avoidance family, so a safe final action always exists there.
ShieldDecision enforce(const ShieldSpec& spec, const Network& net,
                       const Observation& obs, const ActionChoice& proposed);

/// One episode under the chosen shielding mode. noshield executes raw
/// actions, full_shield runs enforce() every step, guided runs enforce()
/// only when the observation lands in the index. The returned metrics carry
/// the mode string; index lookups are tallied into *stats when given.
EpisodeMetrics run_guided(const Network& net, const ShieldSpec& spec,
                          const RegionIndex& index, int map_id,
                          std::uint64_t seed, RunMode mode,
                          const EpisodeConfig& cfg = {},
                          IndexStats* stats = nullptr);

}  // namespace vgs
