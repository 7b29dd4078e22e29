#include "vgs/train.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "vgs/property.hpp"
#include "vgs/rng.hpp"

namespace vgs {
namespace {

// Parameter box for the policy family. The margin stays above one full
// step (kStepScale) so a free direction can always be taken at unit
// magnitude, which is what makes the family collision-free: a direction
// with sensor >= margin admits the longest possible step, and one with
// sensor < margin is braked out of the argmax faster than the step
// shortens (brake >> 1/step).
struct FamilyParams {
  double pull = 5.0;     // gain toward the target, per axis
  double brake = 100.0;  // sensor-margin penalty weight
  double margin = 0.06;  // sensor level where braking starts
};

constexpr double kPullLo = 2.5, kPullHi = 9.0;
constexpr double kBrakeLo = 60.0, kBrakeHi = 150.0;
constexpr double kMarginLo = 0.056, kMarginHi = 0.08;

double clamp_to(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

/// Builds the steer-and-brake network. First layer: per direction d a relu
/// pair clipping pull*delta_d into [0, 1] (units 2d, 2d+1) and a brake
/// feature relu(margin - sensor_d) (units 8+d). Second layer passes those
/// twelve features through. Output: clipped pull minus brake * weight.
Network family_network(const std::vector<int>& topology, const FamilyParams& p) {
  Network net;
  const int h1 = topology[1];
  const int h2 = topology[2];

  Layer l1;
  l1.weights = Eigen::MatrixXd::Zero(h1, 8);
  l1.bias = Eigen::VectorXd::Zero(h1);
  l1.activation = Activation::relu;
  const double sx[4] = {1.0, -1.0, 0.0, 0.0};
  const double sy[4] = {0.0, 0.0, 1.0, -1.0};
  for (int d = 0; d < 4; ++d) {
    for (int half : {0, 1}) {
      const int row = 2 * d + half;
      l1.weights(row, 6) = p.pull * sx[d];
      l1.weights(row, 4) = -p.pull * sx[d];
      l1.weights(row, 7) = p.pull * sy[d];
      l1.weights(row, 5) = -p.pull * sy[d];
      l1.bias[row] = half == 0 ? 0.0 : -1.0;
    }
    l1.weights(8 + d, d) = -1.0;
    l1.bias[8 + d] = p.margin;
  }
  net.layers.push_back(std::move(l1));

  Layer l2;
  l2.weights = Eigen::MatrixXd::Zero(h2, h1);
  l2.bias = Eigen::VectorXd::Zero(h2);
  l2.activation = Activation::relu;
  for (int i = 0; i < 12; ++i) l2.weights(i, i) = 1.0;
  net.layers.push_back(std::move(l2));

  Layer l3;
  l3.weights = Eigen::MatrixXd::Zero(4, h2);
  l3.bias = Eigen::VectorXd::Zero(4);
  l3.activation = Activation::identity;
  for (int d = 0; d < 4; ++d) {
    l3.weights(d, 2 * d) = 1.0;
    l3.weights(d, 2 * d + 1) = -1.0;
    l3.weights(d, 8 + d) = -p.brake;
  }
  net.layers.push_back(std::move(l3));
  return net;
}

/// Mean episode return over the shared batch: +5 per reached target, -1
/// per collision step, 0 otherwise.
double fitness_of(const Network& net, const TrainerConfig& cfg,
                  const EpisodeConfig& env_cfg,
                  const std::vector<std::uint64_t>& episode_seeds) {
  double total = 0.0;
  for (std::size_t e = 0; e < episode_seeds.size(); ++e) {
    const WorldMap map = fixture_map(cfg.map_ids[e % cfg.map_ids.size()]);
    const EpisodeMetrics m =
        run_episode(net, map, episode_seeds[e], passthrough_hook, env_cfg);
    total += 5.0 * (m.success ? 1.0 : 0.0) - 1.0 * m.collisions;
  }
  return total / static_cast<double>(episode_seeds.size());
}

}  // namespace

void validate(const TrainerConfig& cfg) {
  if (cfg.topology.size() != 4)
    throw std::invalid_argument("trainer: topology must have two hidden layers");
  if (cfg.topology.front() != 8 || cfg.topology.back() != 4)
    throw std::invalid_argument(
        "trainer: topology must map 8 inputs to 4 outputs");
  if (cfg.topology[1] < 12 || cfg.topology[2] < 12)
    throw std::invalid_argument(
        "trainer: hidden layers too narrow for the policy family");
  if (cfg.map_ids.empty())
    throw std::invalid_argument("trainer: no training maps");
  if (cfg.population < 2)
    throw std::invalid_argument("trainer: population must be at least 2");
  if (cfg.episodes_per_candidate < 1)
    throw std::invalid_argument("trainer: need fitness episodes");
  if (cfg.validation_episodes < 1)
    throw std::invalid_argument("trainer: need validation episodes");
  if (cfg.success_floor < 0.0)
    throw std::invalid_argument("trainer: negative success floor");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("trainer: iteration budget must be positive");
}

EvalSummary evaluate_policy(const Network& net, const std::vector<int>& map_ids,
                            int episodes, std::uint64_t base_seed,
                            const EpisodeConfig& env_cfg) {
  if (map_ids.empty())
    throw std::invalid_argument("evaluate_policy: no maps given");
  EvalSummary summary;
  summary.episodes = episodes;
  for (int e = 0; e < episodes; ++e) {
    const WorldMap map = fixture_map(map_ids[e % map_ids.size()]);
    const EpisodeMetrics m = run_episode(
        net, map, derive_seed(base_seed, static_cast<std::uint64_t>(e)),
        passthrough_hook, env_cfg);
    summary.successes += m.success ? 1 : 0;
    summary.collisions += m.collisions;
  }
  return summary;
}

Network train_policy(const EpisodeConfig& env_cfg, const TrainerConfig& cfg,
                     std::uint64_t seed) {
  validate(cfg);
  Rng rng(derive_seed(seed, 0x1717ULL));
  const std::uint64_t validation_seed = derive_seed(seed, 0xeba1ULL);

  FamilyParams center;
  center.pull = rng.uniform(kPullLo, kPullHi);
  center.brake = rng.uniform(kBrakeLo, kBrakeHi);
  center.margin = rng.uniform(kMarginLo, kMarginHi);
  double spread = 1.0;  // fraction of each parameter range used as sigma
  double best_fitness = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    const std::uint64_t batch = derive_seed(seed, 0xba7cULL + iter);
    std::vector<std::uint64_t> episode_seeds(cfg.episodes_per_candidate);
    for (std::size_t e = 0; e < episode_seeds.size(); ++e)
      episode_seeds[e] = derive_seed(batch, e);

    FamilyParams iter_best = center;
    double iter_best_fitness =
        fitness_of(family_network(cfg.topology, center), cfg, env_cfg,
                   episode_seeds);
    for (int cand = 1; cand < cfg.population; ++cand) {
      FamilyParams p;
      p.pull = clamp_to(center.pull + spread * (kPullHi - kPullLo) * 0.5 *
                                          rng.normal(),
                        kPullLo, kPullHi);
      p.brake = clamp_to(center.brake + spread * (kBrakeHi - kBrakeLo) * 0.5 *
                                            rng.normal(),
                         kBrakeLo, kBrakeHi);
      p.margin = clamp_to(center.margin + spread * (kMarginHi - kMarginLo) *
                                              0.5 * rng.normal(),
                          kMarginLo, kMarginHi);
      const double f =
          fitness_of(family_network(cfg.topology, p), cfg, env_cfg,
                     episode_seeds);
      if (f > iter_best_fitness) {
        iter_best_fitness = f;
        iter_best = p;
      }
    }
    center = iter_best;
    best_fitness = std::max(best_fitness, iter_best_fitness);
    spread = std::max(0.15, spread * 0.85);

    const Network incumbent = family_network(cfg.topology, center);
    const EvalSummary val =
        evaluate_policy(incumbent, cfg.map_ids, cfg.validation_episodes,
                        validation_seed, env_cfg);
    if (cfg.on_iteration)
      cfg.on_iteration(iter, iter_best_fitness, val.success_rate());
    if (val.success_rate() >= cfg.success_floor) return incumbent;
  }
  throw TrainBudgetError("training budget exhausted: " +
                         std::to_string(cfg.max_iterations) +
                         " iterations without reaching success floor " +
                         std::to_string(cfg.success_floor));
}

}  // namespace vgs
