// Pipeline driver: train, verify-model, analyze, compress, run, report.
// Every stage reads one JSON config plus the artifacts persisted by the
// stage before it, and writes its own artifacts under the output directory,
// so stages can be rerun or resumed independently.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vgs/compress.hpp"
#include "vgs/metrics.hpp"
#include "vgs/network_io.hpp"
#include "vgs/property.hpp"
#include "vgs/regions.hpp"
#include "vgs/shield.hpp"
#include "vgs/train.hpp"
#include "vgs/verifier.hpp"
#include "vgs/world.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitGuidedCollision = 2;
constexpr int kExitBudget = 3;

struct RunSettings {
  std::vector<std::string> modes{"noshield", "full", "guided"};
  int episodes = 100;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::vector<int> maps{1};
  int formula_multiplier = 1;
};

struct PipelineConfig {
  std::string network;
  std::string properties;
  std::string output_dir = "out";
  vgs::SplitterConfig splitter;
  vgs::VerifierConfig verifier;
  vgs::ClusterConfig cluster;
  vgs::TrainerConfig trainer;
  std::uint64_t trainer_seed = 0;
  RunSettings run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

template <class T>
void read_into(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  nlohmann::json j = nlohmann::json::parse(in);

  PipelineConfig cfg;
  read_into(j, "network", cfg.network);
  read_into(j, "properties", cfg.properties);
  read_into(j, "output_dir", cfg.output_dir);
  if (cfg.network.empty()) throw std::runtime_error("config: missing network");
  if (cfg.properties.empty())
    throw std::runtime_error("config: missing properties");

  if (j.contains("splitter")) {
    const auto& s = j.at("splitter");
    read_into(s, "samples_per_region", cfg.splitter.samples_per_region);
    read_into(s, "violation_fraction_threshold",
              cfg.splitter.violation_fraction_threshold);
    read_into(s, "max_depth", cfg.splitter.max_depth);
    read_into(s, "epsilon", cfg.splitter.epsilon);
    read_into(s, "delta", cfg.splitter.delta);
    read_into(s, "seed", cfg.splitter.seed);
  }
  vgs::validate(cfg.splitter);

  if (j.contains("verifier")) {
    const auto& v = j.at("verifier");
    read_into(v, "strict_slack", cfg.verifier.strict_slack);
    read_into(v, "max_branches", cfg.verifier.max_branches);
    read_into(v, "max_seconds", cfg.verifier.max_seconds);
    read_into(v, "enum_max_unstable", cfg.verifier.enum_max_unstable);
    read_into(v, "probe_samples", cfg.verifier.probe_samples);
    read_into(v, "probe_seed", cfg.verifier.probe_seed);
  }
  if (cfg.verifier.strict_slack <= 0 || cfg.verifier.max_branches == 0 ||
      cfg.verifier.max_seconds <= 0 || cfg.verifier.enum_max_unstable < 0 ||
      cfg.verifier.probe_samples < 0)
    throw std::runtime_error("config: verifier budgets out of range");

  if (j.contains("cluster")) {
    const auto& c = j.at("cluster");
    read_into(c, "target_count", cfg.cluster.target_count);
    read_into(c, "max_waste", cfg.cluster.max_waste);
  }
  vgs::validate(cfg.cluster);

  if (j.contains("trainer")) {
    const auto& t = j.at("trainer");
    read_into(t, "topology", cfg.trainer.topology);
    read_into(t, "map_ids", cfg.trainer.map_ids);
    read_into(t, "population", cfg.trainer.population);
    read_into(t, "episodes_per_candidate", cfg.trainer.episodes_per_candidate);
    read_into(t, "validation_episodes", cfg.trainer.validation_episodes);
    read_into(t, "success_floor", cfg.trainer.success_floor);
    read_into(t, "max_iterations", cfg.trainer.max_iterations);
    read_into(t, "seed", cfg.trainer_seed);
  }
  vgs::validate(cfg.trainer);

  if (j.contains("run")) {
    const auto& r = j.at("run");
    read_into(r, "modes", cfg.run.modes);
    read_into(r, "episodes", cfg.run.episodes);
    read_into(r, "seeds", cfg.run.seeds);
    read_into(r, "maps", cfg.run.maps);
    read_into(r, "formula_multiplier", cfg.run.formula_multiplier);
  }
  for (const auto& m : cfg.run.modes) vgs::run_mode_from_string(m);
  if (cfg.run.modes.empty()) throw std::runtime_error("config: no run modes");
  if (cfg.run.episodes < 1)
    throw std::runtime_error("config: run.episodes must be positive");
  if (cfg.run.seeds.empty()) throw std::runtime_error("config: no run seeds");
  if (cfg.run.maps.empty()) throw std::runtime_error("config: no run maps");
  for (int id : cfg.run.maps)
    if (id < 0 || id >= vgs::fixture_map_count())
      throw std::runtime_error("config: unknown map id " + std::to_string(id));
  if (cfg.run.formula_multiplier < 1)
    throw std::runtime_error("config: formula_multiplier must be >= 1");
  return cfg;
}

std::string regions_path(const PipelineConfig& cfg) {
  return cfg.output_dir + "/regions.json";
}
std::string clustered_path(const PipelineConfig& cfg) {
  return cfg.output_dir + "/regions_clustered.json";
}
std::string smt_path(const PipelineConfig& cfg) {
  return cfg.output_dir + "/unsafe.smt2";
}
std::string metrics_path(const PipelineConfig& cfg) {
  return cfg.output_dir + "/metrics.csv";
}
std::string report_path(const PipelineConfig& cfg) {
  return cfg.output_dir + "/report.csv";
}

bool has_refined_provenance(const vgs::LabeledRegionSet& set) {
  for (auto p : set.safe_provenance)
    if (p == vgs::Provenance::verified_safe) return true;
  for (auto p : set.unsafe_provenance)
    if (p == vgs::Provenance::verified_safe ||
        p == vgs::Provenance::verified_unsat_to_sat)
      return true;
  return false;
}

int cmd_train(const PipelineConfig& cfg) {
  std::cout << "Training policy (maps:";
  for (int id : cfg.trainer.map_ids) std::cout << ' ' << id;
  std::cout << ", seed " << cfg.trainer_seed << ")\n";
  const auto t0 = std::chrono::steady_clock::now();
  vgs::Network net = vgs::train_policy({}, cfg.trainer, cfg.trainer_seed);
  const auto summary = vgs::evaluate_policy(
      net, cfg.trainer.map_ids, cfg.trainer.validation_episodes,
      vgs::derive_seed(cfg.trainer_seed, 0xeba1ULL));
  std::filesystem::create_directories(
      std::filesystem::path(cfg.network).parent_path());
  vgs::save_network(net, cfg.network);
  std::printf("Training (s): %.2f\n", seconds_since(t0));
  std::printf("Validation success: %.3f collisions: %d\n",
              summary.success_rate(), summary.collisions);
  std::cout << "Saved network to " << cfg.network << "\n";
  return kExitOk;
}

int cmd_verify_model(const PipelineConfig& cfg) {
  const vgs::Network net = vgs::load_network(cfg.network);
  const auto props = vgs::load_properties(cfg.properties);
  const auto t0 = std::chrono::steady_clock::now();
  bool any_sat = false, any_inconclusive = false;
  for (const auto& prop : props) {
    const auto verdict = vgs::verify(net, prop, prop.input_box, cfg.verifier);
    switch (verdict.kind) {
      case vgs::VerdictKind::unsat:
        std::cout << prop.name << ": UNSAT\n";
        break;
      case vgs::VerdictKind::sat: {
        any_sat = true;
        std::cout << prop.name << ": SAT witness [";
        const auto& x = verdict.witness->input;
        for (Eigen::Index i = 0; i < x.size(); ++i)
          std::cout << (i ? ", " : "") << x[i];
        std::cout << "]\n";
        break;
      }
      case vgs::VerdictKind::inconclusive:
        any_inconclusive = true;
        std::cout << prop.name << ": INCONCLUSIVE\n";
        break;
    }
  }
  std::printf("Verification (s): %.2f\n", seconds_since(t0));
  if (any_sat)
    std::cout << "Model violates at least one property.\n";
  else if (any_inconclusive)
    std::cout << "Verification budget exhausted before a verdict.\n";
  else
    std::cout << "All properties hold on their domains.\n";
  return any_inconclusive && !any_sat ? kExitBudget : kExitOk;
}

int cmd_analyze(const PipelineConfig& cfg, bool skip_refine) {
  const vgs::Network net = vgs::load_network(cfg.network);
  const auto props = vgs::load_properties(cfg.properties);

  const auto t_split = std::chrono::steady_clock::now();
  vgs::LabeledRegionSet set = vgs::split_domain(net, props, cfg.splitter);
  const double split_s = seconds_since(t_split);
  std::printf("Splitting (s): %.2f\n", split_s);
  std::printf("Sampled regions: %zu safe, %zu unsafe\n", set.safe.size(),
              set.unsafe.size());

  if (!skip_refine) {
    const std::size_t unsafe_before = set.unsafe.size();
    const auto t_ref = std::chrono::steady_clock::now();
    set = vgs::refine(net, props, set, cfg.verifier);
    const double refine_s = seconds_since(t_ref);
    std::printf("Verification (hr): %.4f\n", refine_s / 3600.0);
    std::printf("Refinement moved %zu region(s) to unsafe\n",
                set.unsafe.size() - unsafe_before);
  }

  std::filesystem::create_directories(cfg.output_dir);
  vgs::save_region_set(set, regions_path(cfg));
  std::cout << "Saved " << set.safe.size() + set.unsafe.size()
            << " regions to " << regions_path(cfg) << "\n";
  return kExitOk;
}

int cmd_compress(const PipelineConfig& cfg) {
  vgs::LabeledRegionSet set = vgs::load_region_set(regions_path(cfg));
  const std::size_t before = set.unsafe.size();

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<vgs::Box> clustered = vgs::cluster(set.unsafe, cfg.cluster);
  clustered = vgs::simplify_boxes(std::move(clustered));
  const double cluster_s = seconds_since(t0);

  // The clustered artifact keeps the safe side untouched so downstream
  // stages can still see whether refinement ran; only the unsafe side is
  // replaced by its clustered cover.
  set.unsafe = clustered;
  set.unsafe_provenance.assign(clustered.size(),
                               vgs::Provenance::clustered);
  vgs::save_region_set(set, clustered_path(cfg));

  const vgs::Network net = vgs::load_network(cfg.network);
  std::ofstream smt(smt_path(cfg));
  smt << vgs::emit_smt(clustered,
                       vgs::default_var_names(net.input_dim()));

  std::printf("Clustering (s): %.2f\n", cluster_s);
  std::printf("Regions before: %zu after: %zu\n", before, clustered.size());
  std::cout << "Saved " << clustered_path(cfg) << " and " << smt_path(cfg)
            << "\n";
  return kExitOk;
}

int cmd_run(const PipelineConfig& cfg) {
  const vgs::Network net = vgs::load_network(cfg.network);
  vgs::ShieldSpec spec{vgs::load_properties(cfg.properties),
                       cfg.run.formula_multiplier};
  vgs::validate(spec);

  bool want_guided = false;
  for (const auto& m : cfg.run.modes)
    if (m == "guided") want_guided = true;

  vgs::RegionIndex index;
  bool refined = false;
  if (want_guided) {
    const vgs::LabeledRegionSet set =
        vgs::load_region_set(clustered_path(cfg));
    refined = has_refined_provenance(set);
    index = vgs::build_index(set.domain, set.unsafe);
  } else {
    index = vgs::build_index(vgs::unit_box<double>(net.input_dim()), {});
  }

  const auto episodes_for =
      [&](vgs::RunMode mode) -> std::vector<vgs::EpisodeMetrics> {
    std::vector<vgs::EpisodeMetrics> rows;
    rows.reserve(cfg.run.seeds.size() *
                 static_cast<std::size_t>(cfg.run.episodes));
    for (std::uint64_t s : cfg.run.seeds)
      for (int e = 0; e < cfg.run.episodes; ++e) {
        const int map_id =
            cfg.run.maps[static_cast<std::size_t>(e) % cfg.run.maps.size()];
        rows.push_back(vgs::run_guided(net, spec, index, map_id,
                                       vgs::derive_seed(s, e), mode));
      }
    return rows;
  };

  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<vgs::EpisodeMetrics> baseline =
      episodes_for(vgs::RunMode::noshield);

  std::vector<vgs::EpisodeMetrics> all;
  int guided_collisions = 0;
  for (const auto& mode_name : cfg.run.modes) {
    const vgs::RunMode mode = vgs::run_mode_from_string(mode_name);
    std::vector<vgs::EpisodeMetrics> rows =
        mode == vgs::RunMode::noshield ? baseline : episodes_for(mode);
    if (mode == vgs::RunMode::guided)
      for (const auto& m : rows) guided_collisions += m.collisions;

    const vgs::RunReport rep = vgs::report(rows, baseline);
    std::printf(
        "%-9s active %6.2f%%  interventions %6.2f%%  collisions %5.2f%%  "
        "success %6.2f%%  overhead %.3f\n",
        mode_name.c_str(), rep.active_time_pct, rep.interventions_pct,
        rep.collisions_pct, rep.success_pct, rep.overhead);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  std::printf("Episodes (s): %.2f\n", seconds_since(t0));

  std::filesystem::create_directories(cfg.output_dir);
  vgs::write_metrics_csv(all, metrics_path(cfg));
  std::cout << "Saved " << all.size() << " episodes to " << metrics_path(cfg)
            << "\n";

  if (guided_collisions > 0 && refined) {
    std::cerr << "guided mode collided " << guided_collisions
              << " time(s) on verified regions\n";
    return kExitGuidedCollision;
  }
  return kExitOk;
}

int cmd_report(const PipelineConfig& cfg) {
  const std::vector<vgs::EpisodeMetrics> all =
      vgs::read_metrics_csv(metrics_path(cfg));

  std::vector<std::string> modes;
  for (const auto& m : all)
    if (std::find(modes.begin(), modes.end(), m.mode) == modes.end())
      modes.push_back(m.mode);

  std::vector<vgs::EpisodeMetrics> baseline;
  for (const auto& m : all)
    if (m.mode == "noshield") baseline.push_back(m);
  if (baseline.empty())
    throw std::runtime_error("report: no noshield baseline in " +
                             metrics_path(cfg));

  std::vector<vgs::RunReport> reports;
  for (const auto& mode : modes) {
    std::vector<vgs::EpisodeMetrics> rows;
    for (const auto& m : all)
      if (m.mode == mode) rows.push_back(m);
    reports.push_back(vgs::report(rows, baseline));
  }

  const vgs::RunReport* full = nullptr;
  vgs::RunReport* guided = nullptr;
  for (auto& r : reports) {
    if (r.mode == vgs::RunMode::full_shield) full = &r;
    if (r.mode == vgs::RunMode::guided) guided = &r;
  }
  if (full && guided)
    guided->gain_pct = vgs::gain_pct(full->overhead, guided->overhead);

  std::ofstream out(report_path(cfg));
  out << "mode,active_time_pct,interventions_pct,collisions_pct,"
         "success_pct,overhead,gain_pct\n";
  for (const auto& r : reports) {
    char line[256];
    std::snprintf(line, sizeof line, "%s,%.4f,%.4f,%.4f,%.4f,%.6f,",
                  vgs::to_string(r.mode).c_str(), r.active_time_pct,
                  r.interventions_pct, r.collisions_pct, r.success_pct,
                  r.overhead);
    out << line;
    if (r.gain_pct) out << *r.gain_pct;
    out << "\n";

    std::printf(
        "%-9s active %6.2f%%  interventions %6.2f%%  collisions %5.2f%%  "
        "success %6.2f%%  overhead %.3f",
        vgs::to_string(r.mode).c_str(), r.active_time_pct,
        r.interventions_pct, r.collisions_pct, r.success_pct, r.overhead);
    if (r.gain_pct) std::printf("  gain %.1f%%", *r.gain_pct);
    std::printf("\n");
  }
  std::cout << "Saved " << report_path(cfg) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification-guided shielding pipeline"};
  app.require_subcommand(1);

  std::string config_path = "pipeline.json";
  app.add_option("-c,--config", config_path, "Pipeline configuration file")
      ->capture_default_str();

  auto* train = app.add_subcommand("train", "Train a policy network");
  auto* verify =
      app.add_subcommand("verify-model", "Verify properties on full domains");
  auto* analyze = app.add_subcommand(
      "analyze", "Partition the input domain into safe/unsafe regions");
  bool skip_refine = false;
  analyze->add_flag("--skip-refine", skip_refine,
                    "Keep sampled labels, skip formal refinement");
  auto* compress =
      app.add_subcommand("compress", "Cluster unsafe regions and emit SMT");
  auto* run = app.add_subcommand("run", "Run shielded episodes");
  std::string mode_override;
  int episodes_override = 0;
  std::vector<std::uint64_t> seeds_override;
  int multiplier_override = 0;
  run->add_option("--mode", mode_override,
                  "Single mode to run: noshield, full or guided");
  run->add_option("--episodes", episodes_override, "Episodes per seed");
  run->add_option("--seeds", seeds_override, "Episode seeds")->delimiter(',');
  run->add_option("--formula-multiplier", multiplier_override,
                  "Property evaluations per shield check");
  auto* report =
      app.add_subcommand("report", "Aggregate saved episode metrics");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = load_config(config_path);
    if (*run) {
      if (!mode_override.empty()) cfg.run.modes = {mode_override};
      if (episodes_override > 0) cfg.run.episodes = episodes_override;
      if (!seeds_override.empty()) cfg.run.seeds = seeds_override;
      if (multiplier_override > 0)
        cfg.run.formula_multiplier = multiplier_override;
      for (const auto& m : cfg.run.modes) vgs::run_mode_from_string(m);
    }

    if (*train) return cmd_train(cfg);
    if (*verify) return cmd_verify_model(cfg);
    if (*analyze) return cmd_analyze(cfg, skip_refine);
    if (*compress) return cmd_compress(cfg);
    if (*run) return cmd_run(cfg);
    if (*report) return cmd_report(cfg);
  } catch (const vgs::TrainBudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
