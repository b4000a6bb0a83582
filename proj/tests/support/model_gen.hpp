#pragma once

// Random acyclic model generator for the property suites.

#include "katena/model.hpp"

#include <random>
#include <string>

namespace katena::testing {

struct GeneratedModel {
    model::DeploymentModel model;
    size_t libraries = 0;
    size_t contracts = 0;
    size_t offchain = 0;
};

// Builds a structurally valid model: one network, one wallet, `n_lib`
// libraries, `n_contract` contracts and `n_off` off-chain nodes with random
// LL/LC/CC/Lazy-CC/OO edges. Hard edges always point from a later node to an
// earlier one, so the hard subgraph is acyclic by construction; lazy edges
// may point anywhere (including mutual references).
GeneratedModel random_acyclic_model(std::mt19937& rng, size_t n_lib, size_t n_contract,
                                    size_t n_off);

// Programmatic node insertion keeping the declaration order consistent.
void add_node(model::DeploymentModel& m, model::NodeInstance node);

}  // namespace katena::testing
