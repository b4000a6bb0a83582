#pragma once

#include "katena/model.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace katena::graph {

enum class EdgeKind { LL, LC, CC, LazyCC, OO, Facet, Cut, Init, ProxyImpl };

std::string edge_kind_name(EdgeKind kind);

// Hard edges constrain deployment order and cascade on upgrade: the source's
// bytecode or constructor embeds the target's address.
bool is_hard(EdgeKind kind);

struct Edge {
    std::string source;  // dependent
    std::string target;  // dependency
    EdgeKind kind;
    std::string function_name;         // LazyCC setter
    std::vector<std::string> exclude;  // Facet exclusions

    auto tie() const { return std::tie(source, target, kind, function_name); }
    bool operator<(const Edge& rhs) const { return tie() < rhs.tie(); }
    bool operator==(const Edge& rhs) const { return tie() == rhs.tie(); }
};

struct DependencyGraph {
    std::vector<std::string> vertices;  // sorted
    std::vector<Edge> edges;            // sorted

    std::vector<const Edge*> edges_from(const std::string& source) const;
    std::vector<const Edge*> edges_to(const std::string& target) const;
    bool has_edge(const std::string& source, const std::string& target, EdgeKind kind) const;
};

DependencyGraph build_dependency_graph(const model::DeploymentModel& model);

// Cycles over the hard-edge subgraph only; each cycle is reported once as its
// vertex sequence starting from its lexicographically smallest member.
std::vector<std::vector<std::string>> detect_hard_cycles(const DependencyGraph& graph);

struct Step {
    enum class Kind {
        DeployLibrary,
        LinkAndDeploy,
        DeployContract,
        CallWire,
        DiamondCutAdd,
        DiamondCutReplace,
        DiamondCutRemove,
        CallDestroy,
        ConfigureOffChain,
    };

    Kind kind;
    std::string node;           // deploy target / wire source / diamond / off-chain node
    std::string target;         // wire target / facet
    std::string function_name;  // wire or destroy function

    std::string kind_name() const;
    nlohmann::ordered_json to_json() const;
    auto tie() const { return std::tie(node, kind, target, function_name); }
    bool operator<(const Step& rhs) const { return tie() < rhs.tie(); }
    bool operator==(const Step& rhs) const { return tie() == rhs.tie(); }
};

struct DeploymentPlan {
    std::vector<std::vector<Step>> layers;
    std::vector<std::string> warnings;

    nlohmann::ordered_json to_json() const;
    std::string to_canonical_json() const;
    int layer_of(const std::string& node) const;  // -1 when absent
};

// Layers: on-chain deploys by longest hard-edge path, then one layer of
// post-deploy calls (lazy wires, diamond cuts), then off-chain configuration.
DeploymentPlan deployment_plan(const DependencyGraph& graph,
                               const model::DeploymentModel& model);

struct UpgradePlan {
    std::string target;
    std::vector<std::string> redeploy_set;  // topologically ordered
    std::vector<Step> wire_calls;           // lazy dependents outside the redeploy set
    std::vector<Step> facet_cuts;           // replace cuts when the target is a facet
    std::vector<Step> offchain_updates;

    nlohmann::ordered_json to_json() const;
    std::string to_canonical_json() const;
};

UpgradePlan upgrade_plan(const DependencyGraph& graph, const model::DeploymentModel& model,
                         const std::string& target);

// Facet detachments first, then the destroy call itself.
std::vector<Step> destroy_plan(const DependencyGraph& graph,
                               const model::DeploymentModel& model,
                               const std::string& target);

nlohmann::ordered_json destroy_plan_json(const std::vector<Step>& steps,
                                         const std::string& target);

}  // namespace katena::graph
