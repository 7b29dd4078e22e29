#include "vgs/metrics.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vgs {

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::noshield: return "noshield";
    case RunMode::full_shield: return "full";
    case RunMode::guided: return "guided";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string& s) {
  if (s == "noshield") return RunMode::noshield;
  if (s == "full") return RunMode::full_shield;
  if (s == "guided") return RunMode::guided;
  throw std::invalid_argument("unknown run mode '" + s + "'");
}

RunReport report(const std::vector<EpisodeMetrics>& runs,
                 const std::vector<EpisodeMetrics>& baseline) {
  if (runs.empty() || baseline.empty())
    throw std::invalid_argument("report: empty episode list");
  RunReport r;
  r.mode = run_mode_from_string(runs.front().mode);
  double steps = 0, invocations = 0, interventions = 0, collisions = 0,
         successes = 0, wall = 0;
  for (const auto& m : runs) {
    steps += m.steps;
    invocations += m.shield_invocations;
    interventions += m.interventions;
    collisions += m.collisions;
    successes += m.success ? 1 : 0;
    wall += static_cast<double>(m.wall_ns);
  }
  double base_wall = 0;
  for (const auto& m : baseline) base_wall += static_cast<double>(m.wall_ns);
  const double n = static_cast<double>(runs.size());
  const double bn = static_cast<double>(baseline.size());
  r.active_time_pct = steps > 0 ? 100.0 * invocations / steps : 0.0;
  r.interventions_pct = steps > 0 ? 100.0 * interventions / steps : 0.0;
  r.collisions_pct = 100.0 * collisions / n;
  r.success_pct = 100.0 * successes / n;
  r.overhead = (wall / n) / (base_wall / bn);
  return r;
}

double gain_pct(double overhead_full, double overhead_guided) {
  return 100.0 * (overhead_full - overhead_guided) / overhead_full;
}

std::string metrics_csv_header() {
  return "mode,seed,map,steps,invocations,interventions,collision,success,"
         "wall_ns";
}

std::string metrics_csv_row(const EpisodeMetrics& m) {
  std::ostringstream os;
  os << m.mode << ',' << m.seed << ',' << m.map_id << ',' << m.steps << ','
     << m.shield_invocations << ',' << m.interventions << ',' << m.collisions
     << ',' << (m.success ? 1 : 0) << ',' << m.wall_ns;
  return os.str();
}

void write_metrics_csv(const std::vector<EpisodeMetrics>& all,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metrics csv: " + path);
  out << metrics_csv_header() << '\n';
  for (const auto& m : all) out << metrics_csv_row(m) << '\n';
}

std::vector<EpisodeMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics csv: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("metrics csv: empty file");
  if (line != metrics_csv_header())
    throw std::runtime_error("metrics csv: unexpected header");
  std::vector<EpisodeMetrics> all;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream is(line);
    EpisodeMetrics m;
    std::string field;
    auto next = [&]() {
      if (!std::getline(is, field, ','))
        throw std::runtime_error("metrics csv: short row");
      return field;
    };
    m.mode = next();
    m.seed = std::stoull(next());
    m.map_id = std::stoi(next());
    m.steps = std::stoi(next());
    m.shield_invocations = std::stoi(next());
    m.interventions = std::stoi(next());
    m.collisions = std::stoi(next());
    m.success = next() == "1";
    m.wall_ns = std::stoll(next());
    all.push_back(std::move(m));
  }
  return all;
}

}  // namespace vgs
