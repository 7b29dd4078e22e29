#include "vgs/shield.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace vgs {
namespace {

// Repeats the full property sweep spec.formula_multiplier times. holds()
// lives in another translation unit, so the repetitions are real work; the
// sweeps agree by purity and the last result is returned.
bool checked_safe(const ShieldSpec& spec, const Observation& obs,
                  const ActionChoice& action, Eigen::Index out_dim) {
  const Eigen::VectorXd x = obs.as_vector();
  const Eigen::VectorXd y = action_vector(action, out_dim);
  bool safe = true;
  for (int rep = 0; rep < spec.formula_multiplier; ++rep)
    safe = !any_holds(spec.properties, x, y);
  return safe;
}

}  // namespace

void validate(const ShieldSpec& spec) {
  if (spec.formula_multiplier < 1)
    throw std::invalid_argument("shield: formula_multiplier must be >= 1");
}

Eigen::VectorXd action_vector(const ActionChoice& action,
                              Eigen::Index out_dim) {
  if (action.direction < 0 || action.direction >= out_dim)
    throw std::invalid_argument("action_vector: direction out of range");
  Eigen::VectorXd y =
      Eigen::VectorXd::Constant(out_dim, action.magnitude - 1.0);
  y[action.direction] = action.magnitude;
  return y;
}

bool action_safe(const std::vector<SafetyProperty>& properties,
                 const Observation& obs, const ActionChoice& action,
                 Eigen::Index out_dim) {
  return !any_holds(properties, obs.as_vector(),
                    action_vector(action, out_dim));
}

ShieldDecision enforce(const ShieldSpec& spec, const Network& net,
                       const Observation& obs, const ActionChoice& proposed) {
  validate(spec);
  validate(net);
  const Eigen::Index out_dim = net.output_dim();
  if (obs.as_vector().size() != net.input_dim())
    throw std::invalid_argument("enforce: observation dimension mismatch");

  ShieldDecision decision;
  decision.original = proposed;
  if (checked_safe(spec, obs, proposed, out_dim)) {
    decision.final = proposed;
    decision.overridden = false;
    return decision;
  }

  decision.overridden = true;
  const Eigen::VectorXd y = forward(net, obs.as_vector());
  std::vector<int> order(static_cast<std::size_t>(out_dim));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return y[a] > y[b]; });
  for (int d : order) {
    const ActionChoice candidate{d, y[d]};
    if (checked_safe(spec, obs, candidate, out_dim)) {
      decision.final = candidate;
      return decision;
    }
  }

  const int d = proposed.direction;
  const double sensor = d >= 0 && d < obs.sensors.size() ? obs.sensors[d] : 0.0;
  decision.final =
      ActionChoice{d, std::max(0.0, (sensor - kSafetyGap) / kStepScale)};
  return decision;
}

EpisodeMetrics run_guided(const Network& net, const ShieldSpec& spec,
                          const RegionIndex& index, int map_id,
                          std::uint64_t seed, RunMode mode,
                          const EpisodeConfig& cfg, IndexStats* stats) {
  validate(spec);
  validate(net);
  const WorldMap map = fixture_map(map_id);

  StepHook hook;
  switch (mode) {
    case RunMode::noshield:
      hook = passthrough_hook;
      break;
    case RunMode::full_shield:
      hook = [&](const Observation& obs, const ActionChoice& proposed) {
        return StepDecision{enforce(spec, net, obs, proposed).final, true};
      };
      break;
    case RunMode::guided:
      hook = [&](const Observation& obs, const ActionChoice& proposed) {
        if (!contains(index, obs.as_vector(), stats))
          return StepDecision{proposed, false};
        return StepDecision{enforce(spec, net, obs, proposed).final, true};
      };
      break;
  }

  EpisodeMetrics m = run_episode(net, map, seed, hook, cfg);
  m.mode = to_string(mode);
  return m;
}

}  // namespace vgs
