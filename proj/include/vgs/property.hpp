#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vgs/box.hpp"
#include "vgs/network.hpp"

namespace vgs {

enum class Relation { gt, lt, ge, le };

std::string to_string(Relation r);
Relation relation_from_string(const std::string& s);

/// One linear inequality over inputs and outputs:
///   out_coeff . Y + in_coeff . X + constant  <relation>  0
struct LinearTerm {
  Eigen::VectorXd out_coeff;
  Eigen::VectorXd in_coeff;
  double constant = 0.0;
  Relation relation = Relation::gt;
};

/// An unsafe-behavior predicate over a single (input, output) pair.
/// `holds` true means the property fires, i.e. the behavior is a violation:
/// properties encode the negation of the desired behavior.
struct SafetyProperty {
  std::string name;
  Box input_box;
  std::optional<int> argmax_selector;  // requires argmax(Y) == *selector
  std::vector<LinearTerm> linear_terms;
  double margin = 0.0;  // selector wins only if y[i] >= y[j] + margin
};

/// Exact concrete evaluation with strict inequalities taken literally.
/// True iff x lies in the property's input box, the argmax selector (when
/// present) picks index i under the lowest-index tie-break with a win of at
/// least `margin` over every other output, and every linear term is
/// satisfied. Pure and deterministic.
bool holds(const SafetyProperty& p, const Eigen::VectorXd& x,
           const Eigen::VectorXd& y);

/// True when any property in the list fires.
bool any_holds(const std::vector<SafetyProperty>& props,
               const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// The linear speed multiplier of the navigation benchmark: a raw policy
/// output v moved in some direction translates the agent by v * kStepScale.
inline constexpr double kStepScale = 0.055;

/// The four collision-avoidance properties of the particle navigation
/// benchmark: for direction i, the agent must not pick direction i with a
/// scaled step larger than the sensor reading in that direction. Input box
/// is the full normalized domain [0,1]^8.
std::vector<SafetyProperty> particle_world_properties(double margin = 0.0);

/// A satisfying assignment found by the verifier, replayable through the
/// network for audit.
struct Violation {
  Eigen::VectorXd input;
  Eigen::VectorXd output;
  std::string property_name;
};

std::vector<SafetyProperty> load_properties(const std::string& path);
void save_properties(const std::vector<SafetyProperty>& props,
                     const std::string& path);
std::vector<SafetyProperty> properties_from_json(const std::string& text);
std::string properties_to_json(const std::vector<SafetyProperty>& props);

}  // namespace vgs
