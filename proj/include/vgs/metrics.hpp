#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vgs {

/// Per-episode counters. interventions <= shield_invocations <= steps and
/// collisions is 0 or 1 per episode.
struct EpisodeMetrics {
  std::string mode;
  std::uint64_t seed = 0;
  int map_id = 0;
  int steps = 0;
  int shield_invocations = 0;
  int interventions = 0;
  int collisions = 0;
  bool success = false;
  std::int64_t wall_ns = 0;
  std::optional<std::int64_t> unshielded_baseline_ns;
};

enum class RunMode { noshield, full_shield, guided };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

/// Aggregate of one mode's episode batch, normalized against a shield-free
/// baseline batch.
struct RunReport {
  RunMode mode = RunMode::noshield;
  double active_time_pct = 0.0;
  double interventions_pct = 0.0;
  double collisions_pct = 0.0;
  double success_pct = 0.0;
  double overhead = 1.0;  // mean episode time / mean baseline episode time
  std::optional<double> gain_pct;
};

/// active_time = 100 * sum(invocations) / sum(steps); overhead is the ratio
/// of mean wall times. Throws std::invalid_argument on empty input.
RunReport report(const std::vector<EpisodeMetrics>& runs,
                 const std::vector<EpisodeMetrics>& baseline);

/// Relative overhead reduction of guided versus full shielding, in percent.
double gain_pct(double overhead_full, double overhead_guided);

std::string metrics_csv_header();
std::string metrics_csv_row(const EpisodeMetrics& m);
void write_metrics_csv(const std::vector<EpisodeMetrics>& all,
                       const std::string& path);
std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path);

}  // namespace vgs
