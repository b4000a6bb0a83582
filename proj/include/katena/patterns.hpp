#pragma once

#include "katena/artifact.hpp"
#include "katena/model.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace katena::patterns {

enum class CutAction { Add, Replace, Remove };

std::string cut_action_name(CutAction action);

struct FacetCut {
    std::string facet;                   // facet node name
    CutAction action = CutAction::Add;
    std::vector<std::string> selectors;  // 8-hex-char selectors, sorted ascending
};

// All external function selectors of a facet minus the excluded names,
// sorted ascending. Unknown exclude names are collected as warnings.
std::vector<std::string> facet_selectors(const model::ContractArtifact& facet_artifact,
                                         const std::vector<std::string>& exclude,
                                         std::vector<std::string>* warnings = nullptr);

struct DiamondWiring {
    std::vector<FacetCut> cuts;              // Add cuts, ordered by facet name
    std::optional<std::string> init_target;  // present when useInit declared
    std::vector<std::string> warnings;
};

// One Add cut per useFacet requirement; rejects selector collisions across
// facets. The init call stays a described no-op.
DiamondWiring plan_diamond_wiring(const model::NodeInstance& diamond,
                                  const model::DeploymentModel& deployment,
                                  const model::ArtifactStore& artifacts);

// Remove cut covering exactly the selectors previously routed for this facet.
FacetCut plan_facet_removal(const std::string& facet,
                            const std::vector<std::string>& routed_selectors);

// Cut sequence that migrates a diamond's routing from the facet's previously
// routed selectors to its current artifact selectors: Remove stale, Replace
// kept, Add new.
std::vector<FacetCut> plan_facet_upgrade(const std::string& facet,
                                         const std::vector<std::string>& routed_selectors,
                                         const std::vector<std::string>& new_selectors);

struct CallDescriptor {
    std::string function_name;
    std::string signature;     // canonical
    std::string selector_hex;  // 8 hex chars
};

// Upgrade-implementation call against the proxy's configured setter
// (default upgradeTo(address)).
CallDescriptor wire_proxy(const model::NodeInstance& proxy,
                          const model::ContractArtifact& proxy_artifact);

// The diamondCut function's descriptor, read from the cut facet's artifact.
CallDescriptor cut_call_descriptor(const model::ContractArtifact& cut_artifact);

}  // namespace katena::patterns
