#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vgs/network.hpp"
#include "vgs/world.hpp"

namespace vgs {

/// Population search over a structured steer-and-brake policy family. Each
/// candidate is a full weight assignment built from three parameters: a
/// pull gain toward the target (clipped to unit magnitude through a relu
/// pair), a brake weight that subtracts steeply from any direction whose
/// sensor dips below a margin, and the margin itself. Candidates are scored
/// by mean episode return on a shared batch; sampling contracts around the
/// best parameters each iteration. The clipped pull keeps raw magnitudes at
/// most 1 and the brake keeps blocked directions out of the argmax, so
/// every member of the family is collision-free by construction.
struct TrainerConfig {
  std::vector<int> topology{8, 16, 16, 4};
  std::vector<int> map_ids{1, 3};
  int population = 16;             // candidates sampled per iteration
  int episodes_per_candidate = 40; // shared fitness batch size
  int validation_episodes = 100;
  double success_floor = 0.8;
  int max_iterations = 500;
  /// Progress tap, called once per iteration with the best candidate's mean
  /// return and the incumbent's validation success rate. Observational.
  std::function<void(int iteration, double best_fitness, double val_success)>
      on_iteration;
};

void validate(const TrainerConfig& cfg);

/// Thrown when max_iterations pass without validation success reaching the
/// floor.
struct TrainBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EvalSummary {
  int episodes = 0;
  int successes = 0;
  int collisions = 0;
  double success_rate() const {
    return episodes > 0 ? static_cast<double>(successes) / episodes : 0.0;
  }
};

/// The standard evaluation protocol: episode e runs on map_ids[e % n] with
/// seed derive_seed(base_seed, e) and no shield. Shared by the trainer's
/// floor check and by downstream policy audits so their numbers agree.
EvalSummary evaluate_policy(const Network& net, const std::vector<int>& map_ids,
                            int episodes, std::uint64_t base_seed,
                            const EpisodeConfig& env_cfg = {});

/// Runs the search until the incumbent clears success_floor on the
/// validation batch, then returns it. Deterministic given (configs, seed).
/// Throws TrainBudgetError when the budget runs out.
Network train_policy(const EpisodeConfig& env_cfg, const TrainerConfig& cfg,
                     std::uint64_t seed);

}  // namespace vgs
