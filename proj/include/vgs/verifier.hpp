#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vgs/box.hpp"
#include "vgs/network.hpp"
#include "vgs/property.hpp"

namespace vgs {

/// One decision instance: does any x in region make the property fire?
struct VerificationQuery {
  Network net;
  Box region;
  SafetyProperty property;
};

struct VerifierConfig {
  /// Strict relations `s > 0` are proved/refuted as `s >= strict_slack`;
  /// returned witnesses are always re-checked under true strict semantics.
  double strict_slack = 1e-9;
  std::uint64_t max_branches = 1'000'000;
  double max_seconds = 60.0;
  /// When at most this many relus are sign-unstable on a box, the box is
  /// resolved exactly by enumerating their sign patterns (one feasibility
  /// LP per pattern) instead of splitting further.
  int enum_max_unstable = 6;
  /// Extra random probe points per box (the center is always probed).
  int probe_samples = 4;
  std::uint64_t probe_seed = 0x700dULL;
};

enum class VerdictKind { unsat, sat, inconclusive };

struct VerifierStats {
  std::uint64_t branches = 0;
  std::uint64_t lp_calls = 0;
  double wall_seconds = 0.0;
};

/// inconclusive = budget exhausted; callers must treat it like SAT for
/// safety purposes (the region stays unproven).
struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  std::optional<Violation> witness;  // present iff kind == sat
  VerifierStats stats;
};

Verdict verify(const Network& net, const SafetyProperty& property,
               const Box& region, const VerifierConfig& cfg = {});

inline Verdict verify(const VerificationQuery& q,
                      const VerifierConfig& cfg = {}) {
  return verify(q.net, q.property, q.region, cfg);
}

/// Disjunction over properties: SAT if any property is SAT (first hit wins,
/// in list order); UNSAT only if every property is UNSAT; otherwise
/// inconclusive. Stats are accumulated across the per-property calls.
Verdict verify_any(const Network& net,
                   const std::vector<SafetyProperty>& properties,
                   const Box& region, const VerifierConfig& cfg = {});

}  // namespace vgs
