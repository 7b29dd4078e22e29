#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vgs/box.hpp"
#include "vgs/metrics.hpp"
#include "vgs/network.hpp"
#include "vgs/property.hpp"
#include "vgs/rng.hpp"

namespace vgs {

// Sensor and action direction convention, shared with the property set:
// index 0 looks/moves along +x (Right), 1 along -x (Left), 2 along +y (Up),
// 3 along -y (Down). Property i constrains sensor i against action i.
enum Direction : int { kRight = 0, kLeft = 1, kUp = 2, kDown = 3 };

/// Rectangular obstacles inside the unit square. The four domain walls act
/// as implicit obstacles.
struct WorldMap {
  int id = 0;
  std::vector<Box> obstacles;  // 2-d boxes, (x, y)
};

struct EnvState {
  Eigen::Vector2d agent;
  Eigen::Vector2d target;
  const WorldMap* map = nullptr;
};

/// Sensor readings plus agent and target position, all in [0, 1]. The
/// concatenation (sensors, agent, target) is the 8-vector fed to policies.
struct Observation {
  Eigen::Vector4d sensors;
  Eigen::Vector2d agent_pos;
  Eigen::Vector2d target_pos;

  Eigen::VectorXd as_vector() const {
    Eigen::VectorXd v(8);
    v << sensors, agent_pos, target_pos;
    return v;
  }
};

enum class Terminal { none, target_reached, collision, timeout };

struct StepOutcome {
  EnvState next;
  double reward = 0.0;  // +5 target reached, -1 collision, 0 otherwise
  Terminal terminal = Terminal::none;
};

struct EpisodeConfig {
  int max_steps = 100;
  double goal_radius = 0.05;
  double min_start_target_distance = 0.3;
};

/// Exact axis-aligned ray distances to the nearest obstacle or wall in each
/// direction, clamped to [0, 1].
Observation observe(const EnvState& state);

/// Advances one step. The collision test is the same arithmetic the
/// collision-avoidance properties encode: direction d collides exactly when
/// magnitude * kStepScale > sensors[d] (strict, raw magnitude). When no
/// collision occurs the agent translates by clamp(magnitude, 0, 1) *
/// kStepScale and the target check uses the configured goal radius.
StepOutcome step(const EnvState& state, const ActionChoice& action,
                 const EpisodeConfig& cfg = {});

/// What a step hook returns: the action to execute and whether the shield
/// ran for this step. Interventions are counted by comparing the returned
/// action against the proposed one.
struct StepDecision {
  ActionChoice action;
  bool shield_invoked = false;
};

using StepHook =
    std::function<StepDecision(const Observation&, const ActionChoice&)>;

/// Identity hook: execute the proposed action, shield never invoked.
StepDecision passthrough_hook(const Observation&, const ActionChoice& a);

/// Uniform start and target positions over the map's free space, rejection
/// sampled, with the configured minimum separation.
EnvState sample_initial_state(const WorldMap& map, Rng& rng,
                              const EpisodeConfig& cfg = {});

/// Plays one episode with uniformly sampled start/target (rejection inside
/// obstacles, minimum separation per config). Deterministic given (network,
/// map, seed, hook). Wall time covers the full decision loop including hook
/// evaluation.
EpisodeMetrics run_episode(const Network& net, const WorldMap& map,
                           std::uint64_t seed, const StepHook& hook,
                           const EpisodeConfig& cfg = {});

/// The five shipped map configurations, id 0..4.
WorldMap fixture_map(int id);
int fixture_map_count();

WorldMap load_map(const std::string& path);
void save_map(const WorldMap& map, const std::string& path);

}  // namespace vgs
