#pragma once

#include <string>

#include "vgs/network.hpp"

namespace vgs {

/// Reads a weight file (JSON). Validates the structural invariants and
/// throws std::runtime_error on parse failure, std::invalid_argument on
/// invariant violations.
Network load_network(const std::string& path);

/// Writes a weight file. Doubles are serialized with shortest round-trip
/// precision, so load(save(net)) is bit-exact.
void save_network(const Network& net, const std::string& path);

std::string network_to_json(const Network& net);
Network network_from_json(const std::string& text);

}  // namespace vgs
