#include "vgs/world.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "vgs/rng.hpp"

namespace vgs {
namespace {

bool point_in_box(const Box& b, double x, double y) {
  return x >= b.lower[0] && x <= b.upper[0] && y >= b.lower[1] &&
         y <= b.upper[1];
}

bool point_blocked(const WorldMap& map, double x, double y) {
  for (const Box& obs : map.obstacles) {
    if (point_in_box(obs, x, y)) return true;
  }
  return false;
}

// Distance from (x, y) to the nearest blocking edge along +axis_sign * axis.
// Obstacles are closed, so grazing an edge counts as a hit.
double ray_distance(const WorldMap& map, double x, double y, int axis,
                    double axis_sign) {
  const double along = axis == 0 ? x : y;
  const double across = axis == 0 ? y : x;
  double best = axis_sign > 0 ? 1.0 - along : along;  // domain wall
  for (const Box& obs : map.obstacles) {
    const double cross_lo = obs.lower[1 - axis];
    const double cross_hi = obs.upper[1 - axis];
    if (across < cross_lo || across > cross_hi) continue;
    const double near = axis_sign > 0 ? obs.lower[axis] : obs.upper[axis];
    const double far = axis_sign > 0 ? obs.upper[axis] : obs.lower[axis];
    const double to_near = axis_sign * (near - along);
    const double to_far = axis_sign * (far - along);
    if (to_far < 0.0) continue;  // entirely behind
    best = std::min(best, std::max(to_near, 0.0));
  }
  return std::clamp(best, 0.0, 1.0);
}

Eigen::Vector2d direction_vector(int direction) {
  switch (direction) {
    case kRight:
      return {1.0, 0.0};
    case kLeft:
      return {-1.0, 0.0};
    case kUp:
      return {0.0, 1.0};
    case kDown:
      return {0.0, -1.0};
    default:
      throw std::invalid_argument("direction out of range");
  }
}

Eigen::Vector2d sample_free_point(const WorldMap& map, Rng& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    if (!point_blocked(map, x, y)) return {x, y};
  }
  throw std::runtime_error("map leaves no free space to sample");
}

}  // namespace

Observation observe(const EnvState& state) {
  if (state.map == nullptr) throw std::invalid_argument("state has no map");
  const double x = state.agent[0];
  const double y = state.agent[1];
  Observation obs;
  obs.sensors[kRight] = ray_distance(*state.map, x, y, 0, +1.0);
  obs.sensors[kLeft] = ray_distance(*state.map, x, y, 0, -1.0);
  obs.sensors[kUp] = ray_distance(*state.map, x, y, 1, +1.0);
  obs.sensors[kDown] = ray_distance(*state.map, x, y, 1, -1.0);
  obs.agent_pos = state.agent;
  obs.target_pos = state.target;
  return obs;
}

StepOutcome step(const EnvState& state, const ActionChoice& action,
                 const EpisodeConfig& cfg) {
  if (action.direction < 0 || action.direction > 3) {
    throw std::invalid_argument("direction out of range");
  }
  const Observation obs = observe(state);
  StepOutcome out;
  out.next = state;
  if (action.magnitude * kStepScale > obs.sensors[action.direction]) {
    out.reward = -1.0;
    out.terminal = Terminal::collision;
    return out;
  }
  const double travel = std::clamp(action.magnitude, 0.0, 1.0) * kStepScale;
  Eigen::Vector2d pos =
      state.agent + travel * direction_vector(action.direction);
  pos[0] = std::clamp(pos[0], 0.0, 1.0);
  pos[1] = std::clamp(pos[1], 0.0, 1.0);
  out.next.agent = pos;
  if ((pos - state.target).norm() <= cfg.goal_radius) {
    out.reward = 5.0;
    out.terminal = Terminal::target_reached;
  }
  return out;
}

StepDecision passthrough_hook(const Observation&, const ActionChoice& a) {
  return {a, false};
}

EnvState sample_initial_state(const WorldMap& map, Rng& rng,
                              const EpisodeConfig& cfg) {
  EnvState state;
  state.map = &map;
  state.agent = sample_free_point(map, rng);
  for (int attempt = 0; attempt < 10000; ++attempt) {
    state.target = sample_free_point(map, rng);
    if ((state.target - state.agent).norm() >=
        cfg.min_start_target_distance) {
      return state;
    }
  }
  throw std::runtime_error("could not place target away from start");
}

EpisodeMetrics run_episode(const Network& net, const WorldMap& map,
                           std::uint64_t seed, const StepHook& hook,
                           const EpisodeConfig& cfg) {
  Rng rng(seed);
  EnvState state = sample_initial_state(map, rng, cfg);

  EpisodeMetrics m;
  m.seed = seed;
  m.map_id = map.id;

  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < cfg.max_steps; ++i) {
    const Observation obs = observe(state);
    const ActionChoice proposed = select_action(net, obs.as_vector());
    const StepDecision decision =
        hook ? hook(obs, proposed) : passthrough_hook(obs, proposed);
    if (decision.shield_invoked) ++m.shield_invocations;
    if (!(decision.action == proposed)) ++m.interventions;
    const StepOutcome outcome = step(state, decision.action, cfg);
    ++m.steps;
    state = outcome.next;
    if (outcome.terminal == Terminal::collision) ++m.collisions;
    if (outcome.terminal == Terminal::target_reached) m.success = true;
    if (outcome.terminal != Terminal::none) break;
  }
  const auto t1 = std::chrono::steady_clock::now();
  m.wall_ns =
      std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
  return m;
}

WorldMap fixture_map(int id) {
  WorldMap map;
  map.id = id;
  switch (id) {
    case 0:
      map.obstacles = {make_box({0.30, 0.00}, {0.36, 0.62}),
                       make_box({0.62, 0.38}, {0.68, 1.00})};
      break;
    case 1:
      map.obstacles = {make_box({0.42, 0.42}, {0.58, 0.58}),
                       make_box({0.10, 0.70}, {0.22, 0.82}),
                       make_box({0.75, 0.12}, {0.90, 0.24})};
      break;
    case 2:
      map.obstacles = {make_box({0.00, 0.48}, {0.44, 0.54}),
                       make_box({0.56, 0.48}, {1.00, 0.54})};
      break;
    case 3:
      map.obstacles = {make_box({0.15, 0.15}, {0.30, 0.30}),
                       make_box({0.65, 0.60}, {0.85, 0.78}),
                       make_box({0.40, 0.72}, {0.52, 0.86})};
      break;
    case 4:
      map.obstacles = {make_box({0.25, 0.25}, {0.31, 0.75}),
                       make_box({0.25, 0.25}, {0.75, 0.31}),
                       make_box({0.68, 0.68}, {0.80, 0.80})};
      break;
    default:
      throw std::invalid_argument("unknown map id");
  }
  return map;
}

int fixture_map_count() { return 5; }

WorldMap load_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open map file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("map file: " + std::string(e.what()));
  }
  WorldMap map;
  try {
    map.id = j.at("id").get<int>();
    for (const auto& o : j.at("obstacles")) {
      const double xmin = o.at("xmin").get<double>();
      const double xmax = o.at("xmax").get<double>();
      const double ymin = o.at("ymin").get<double>();
      const double ymax = o.at("ymax").get<double>();
      if (!(xmin <= xmax && ymin <= ymax)) {
        throw std::runtime_error("map file: degenerate obstacle");
      }
      map.obstacles.push_back(make_box({xmin, ymin}, {xmax, ymax}));
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("map file: " + std::string(e.what()));
  }
  return map;
}

void save_map(const WorldMap& map, const std::string& path) {
  nlohmann::json j;
  j["id"] = map.id;
  j["obstacles"] = nlohmann::json::array();
  for (const Box& o : map.obstacles) {
    j["obstacles"].push_back({{"xmin", o.lower[0]},
                              {"xmax", o.upper[0]},
                              {"ymin", o.lower[1]},
                              {"ymax", o.upper[1]}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write map file: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace vgs
