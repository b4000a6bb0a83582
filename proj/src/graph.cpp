#include "katena/graph.hpp"

#include "katena/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>

namespace katena::graph {

using model::NodeKind;
using model::Relation;

std::string edge_kind_name(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::LL: return "L-L";
        case EdgeKind::LC: return "L-C";
        case EdgeKind::CC: return "C-C";
        case EdgeKind::LazyCC: return "Lazy-C-C";
        case EdgeKind::OO: return "O-O";
        case EdgeKind::Facet: return "Facet";
        case EdgeKind::Cut: return "Cut";
        case EdgeKind::Init: return "Init";
        case EdgeKind::ProxyImpl: return "Proxy-Impl";
    }
    return "?";
}

bool is_hard(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::LL:
        case EdgeKind::LC:
        case EdgeKind::CC:
        case EdgeKind::Cut:
        case EdgeKind::ProxyImpl: return true;
        default: return false;
    }
}

std::vector<const Edge*> DependencyGraph::edges_from(const std::string& source) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges) {
        if (e.source == source) out.push_back(&e);
    }
    return out;
}

std::vector<const Edge*> DependencyGraph::edges_to(const std::string& target) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges) {
        if (e.target == target) out.push_back(&e);
    }
    return out;
}

bool DependencyGraph::has_edge(const std::string& source, const std::string& target,
                               EdgeKind kind) const {
    for (const auto& e : edges) {
        if (e.source == source && e.target == target && e.kind == kind) return true;
    }
    return false;
}

DependencyGraph build_dependency_graph(const model::DeploymentModel& model) {
    DependencyGraph graph;
    for (const auto& [name, node] : model.nodes) {
        graph.vertices.push_back(name);
        for (const auto& req : node.requirements) {
            Edge edge{name, req.target, EdgeKind::CC, req.function_name, req.exclude};
            switch (req.relation) {
                case Relation::UseLibrary:
                    edge.kind = node.kind == NodeKind::Library ? EdgeKind::LL : EdgeKind::LC;
                    break;
                case Relation::UseContractInConstructor:
                case Relation::UseReferenceInConstructor:
                    edge.kind = EdgeKind::CC;
                    break;
                case Relation::UseContract:
                    edge.kind = node.kind == NodeKind::OffChainComponent ? EdgeKind::OO
                                                                         : EdgeKind::LazyCC;
                    break;
                case Relation::UseReference:
                    edge.kind = EdgeKind::LazyCC;
                    break;
                case Relation::UseFacet:
                    edge.kind = EdgeKind::Facet;
                    break;
                case Relation::UseCut:
                    edge.kind = EdgeKind::Cut;
                    break;
                case Relation::UseInit:
                    edge.kind = EdgeKind::Init;
                    break;
                case Relation::Implementation:
                    edge.kind = EdgeKind::ProxyImpl;
                    break;
                // Execution-context relations do not order deployables.
                case Relation::UseNetwork:
                case Relation::UseWallet:
                case Relation::HostedOn:
                case Relation::UseCredentials:
                    continue;
            }
            graph.edges.push_back(std::move(edge));
        }
    }
    std::sort(graph.vertices.begin(), graph.vertices.end());
    std::sort(graph.edges.begin(), graph.edges.end());
    return graph;
}

namespace {

// Hard-edge adjacency, dependent -> dependency.
std::map<std::string, std::vector<std::string>> hard_adjacency(const DependencyGraph& graph) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& v : graph.vertices) adj[v];
    for (const auto& e : graph.edges) {
        if (is_hard(e.kind)) adj[e.source].push_back(e.target);
    }
    for (auto& [_, deps] : adj) {
        std::sort(deps.begin(), deps.end());
        deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
    }
    return adj;
}

}  // namespace

std::vector<std::vector<std::string>> detect_hard_cycles(const DependencyGraph& graph) {
    auto adj = hard_adjacency(graph);

    // Iterative DFS with colors; extracts each cycle from the stack once.
    enum class Color { White, Gray, Black };
    std::map<std::string, Color> color;
    for (const auto& v : graph.vertices) color[v] = Color::White;

    std::vector<std::vector<std::string>> cycles;
    std::set<std::vector<std::string>> seen;
    std::vector<std::string> path;

    std::function<void(const std::string&)> visit = [&](const std::string& v) {
        color[v] = Color::Gray;
        path.push_back(v);
        for (const auto& next : adj[v]) {
            if (color[next] == Color::Gray) {
                auto it = std::find(path.begin(), path.end(), next);
                std::vector<std::string> cycle(it, path.end());
                // Canonical rotation: start at the smallest vertex.
                auto smallest = std::min_element(cycle.begin(), cycle.end());
                std::rotate(cycle.begin(), smallest, cycle.end());
                if (seen.insert(cycle).second) cycles.push_back(cycle);
            } else if (color[next] == Color::White) {
                visit(next);
            }
        }
        path.pop_back();
        color[v] = Color::Black;
    };

    for (const auto& v : graph.vertices) {
        if (color[v] == Color::White) visit(v);
    }
    std::sort(cycles.begin(), cycles.end());
    return cycles;
}

std::string Step::kind_name() const {
    switch (kind) {
        case Kind::DeployLibrary: return "deploy_library";
        case Kind::LinkAndDeploy: return "link_and_deploy";
        case Kind::DeployContract: return "deploy_contract";
        case Kind::CallWire: return "call_wire";
        case Kind::DiamondCutAdd: return "diamond_cut_add";
        case Kind::DiamondCutReplace: return "diamond_cut_replace";
        case Kind::DiamondCutRemove: return "diamond_cut_remove";
        case Kind::CallDestroy: return "call_destroy";
        case Kind::ConfigureOffChain: return "configure_offchain";
    }
    return "?";
}

nlohmann::ordered_json Step::to_json() const {
    nlohmann::ordered_json j;
    j["step"] = kind_name();
    j["node"] = node;
    if (!target.empty()) j["target"] = target;
    if (!function_name.empty()) j["function"] = function_name;
    return j;
}

nlohmann::ordered_json DeploymentPlan::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "deploy";
    auto layers_json = nlohmann::ordered_json::array();
    for (const auto& layer : layers) {
        auto layer_json = nlohmann::ordered_json::array();
        for (const auto& step : layer) layer_json.push_back(step.to_json());
        layers_json.push_back(std::move(layer_json));
    }
    j["layers"] = std::move(layers_json);
    j["warnings"] = warnings;
    return j;
}

std::string DeploymentPlan::to_canonical_json() const { return to_json().dump(2) + "\n"; }

int DeploymentPlan::layer_of(const std::string& node) const {
    for (size_t i = 0; i < layers.size(); ++i) {
        for (const auto& step : layers[i]) {
            if (step.node == node) return static_cast<int>(i);
        }
    }
    return -1;
}

namespace {

Step deploy_step_for(const model::NodeInstance& node) {
    Step step;
    step.node = node.name;
    if (!node.requirements_of(Relation::UseLibrary).empty()) {
        step.kind = Step::Kind::LinkAndDeploy;
    } else if (node.kind == NodeKind::Library) {
        step.kind = Step::Kind::DeployLibrary;
    } else {
        step.kind = Step::Kind::DeployContract;
    }
    return step;
}

void require_acyclic(const DependencyGraph& graph) {
    auto cycles = detect_hard_cycles(graph);
    if (!cycles.empty()) {
        std::string msg = "hard dependency cycle:";
        for (const auto& cycle : cycles) {
            msg += " {";
            for (size_t i = 0; i < cycle.size(); ++i) {
                if (i > 0) msg += ",";
                msg += cycle[i];
            }
            msg += "}";
        }
        throw plan_error(msg);
    }
}

// Longest-path layer over hard edges, restricted to deployable nodes.
std::map<std::string, int> deploy_layers(const DependencyGraph& graph,
                                         const model::DeploymentModel& model) {
    std::map<std::string, int> layer;
    std::function<int(const std::string&)> depth = [&](const std::string& v) -> int {
        auto it = layer.find(v);
        if (it != layer.end()) return it->second;
        int best = 0;
        for (const auto* e : graph.edges_from(v)) {
            if (!is_hard(e->kind)) continue;
            const auto* target = model.find(e->target);
            if (!target || !model::is_onchain_kind(target->kind)) continue;
            best = std::max(best, depth(e->target) + 1);
        }
        layer[v] = best;
        return best;
    };
    for (const auto& [name, node] : model.nodes) {
        if (model::is_onchain_kind(node.kind)) depth(name);
    }
    return layer;
}

}  // namespace

DeploymentPlan deployment_plan(const DependencyGraph& graph,
                               const model::DeploymentModel& model) {
    require_acyclic(graph);

    DeploymentPlan plan;
    auto layer = deploy_layers(graph, model);

    int max_layer = -1;
    for (const auto& [name, node] : model.nodes) {
        if (model::is_onchain_kind(node.kind)) max_layer = std::max(max_layer, layer[name]);
    }
    plan.layers.assign(static_cast<size_t>(max_layer + 1), {});
    for (const auto& [name, node] : model.nodes) {
        if (model::is_onchain_kind(node.kind)) {
            plan.layers[static_cast<size_t>(layer[name])].push_back(deploy_step_for(node));
        }
    }

    std::vector<Step> post;
    for (const auto& e : graph.edges) {
        if (e.kind == EdgeKind::LazyCC) {
            post.push_back({Step::Kind::CallWire, e.source, e.target, e.function_name});
        } else if (e.kind == EdgeKind::Facet) {
            post.push_back({Step::Kind::DiamondCutAdd, e.source, e.target, ""});
        } else if (e.kind == EdgeKind::Init) {
            plan.warnings.push_back("diamondInit '" + e.target + "' for diamond '" + e.source +
                                    "' is modelled but its initialization call is not executed");
        }
    }
    if (!post.empty()) {
        std::sort(post.begin(), post.end());
        plan.layers.push_back(std::move(post));
    }

    std::vector<Step> configs;
    for (const auto& [name, node] : model.nodes) {
        if (node.kind == NodeKind::OffChainComponent) {
            configs.push_back({Step::Kind::ConfigureOffChain, name, "", ""});
        }
    }
    if (!configs.empty()) {
        std::sort(configs.begin(), configs.end());
        plan.layers.push_back(std::move(configs));
    }

    for (auto& l : plan.layers) std::sort(l.begin(), l.end());
    std::sort(plan.warnings.begin(), plan.warnings.end());
    return plan;
}

namespace {

// Reverse closure of `target` over redeploy-propagating edges. Hard edges
// cascade except Proxy-Impl: a proxy is re-pointed with its upgrade call
// rather than redeployed.
std::set<std::string> redeploy_closure(const DependencyGraph& graph, const std::string& target) {
    std::set<std::string> closure{target};
    std::vector<std::string> stack{target};
    while (!stack.empty()) {
        std::string v = stack.back();
        stack.pop_back();
        for (const auto* e : graph.edges_to(v)) {
            if (!is_hard(e->kind) || e->kind == EdgeKind::ProxyImpl) continue;
            if (closure.insert(e->source).second) stack.push_back(e->source);
        }
    }
    return closure;
}

}  // namespace

UpgradePlan upgrade_plan(const DependencyGraph& graph, const model::DeploymentModel& model,
                         const std::string& target) {
    const auto* target_node = model.find(target);
    if (!target_node) throw plan_error("unknown upgrade target '" + target + "'");
    if (!model::is_onchain_kind(target_node->kind)) {
        throw plan_error("upgrade target '" + target +
                         "' is not an on-chain component; reconfigure it instead");
    }
    require_acyclic(graph);

    UpgradePlan plan;
    plan.target = target;

    auto closure = redeploy_closure(graph, target);
    auto layer = deploy_layers(graph, model);
    plan.redeploy_set.assign(closure.begin(), closure.end());
    std::sort(plan.redeploy_set.begin(), plan.redeploy_set.end(),
              [&](const std::string& a, const std::string& b) {
                  if (layer[a] != layer[b]) return layer[a] < layer[b];
                  return a < b;
              });

    for (const auto& e : graph.edges) {
        bool target_redeployed = closure.contains(e.target);
        bool source_redeployed = closure.contains(e.source);
        if (e.kind == EdgeKind::LazyCC && target_redeployed && !source_redeployed) {
            plan.wire_calls.push_back({Step::Kind::CallWire, e.source, e.target, e.function_name});
        } else if (e.kind == EdgeKind::Facet && target_redeployed && !source_redeployed) {
            plan.facet_cuts.push_back({Step::Kind::DiamondCutReplace, e.source, e.target, ""});
        } else if (e.kind == EdgeKind::ProxyImpl && target_redeployed && !source_redeployed) {
            const auto* proxy = model.find(e.source);
            plan.wire_calls.push_back({Step::Kind::CallWire, e.source, e.target,
                                       proxy ? proxy->upgrade_function : "upgradeTo"});
        } else if (e.kind == EdgeKind::OO && target_redeployed) {
            Step step{Step::Kind::ConfigureOffChain, e.source, "", ""};
            if (std::find(plan.offchain_updates.begin(), plan.offchain_updates.end(), step) ==
                plan.offchain_updates.end()) {
                plan.offchain_updates.push_back(step);
            }
        }
    }
    std::sort(plan.wire_calls.begin(), plan.wire_calls.end());
    std::sort(plan.facet_cuts.begin(), plan.facet_cuts.end());
    std::sort(plan.offchain_updates.begin(), plan.offchain_updates.end());
    return plan;
}

nlohmann::ordered_json UpgradePlan::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = "upgrade";
    j["target"] = target;
    j["redeploy"] = redeploy_set;
    auto dump_steps = [](const std::vector<Step>& steps) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& s : steps) arr.push_back(s.to_json());
        return arr;
    };
    j["wire_calls"] = dump_steps(wire_calls);
    j["facet_cuts"] = dump_steps(facet_cuts);
    j["offchain_updates"] = dump_steps(offchain_updates);
    return j;
}

std::string UpgradePlan::to_canonical_json() const { return to_json().dump(2) + "\n"; }

std::vector<Step> destroy_plan(const DependencyGraph& graph,
                               const model::DeploymentModel& model,
                               const std::string& target) {
    const auto* node = model.find(target);
    if (!node) throw plan_error("unknown destroy target '" + target + "'");
    if (!model::is_contract_kind(node->kind)) {
        throw plan_error("destroy target '" + target + "' is not a destroyable contract");
    }
    if (node->destroy_function.empty()) {
        throw plan_error("node '" + target + "' does not define destroyFunction");
    }

    std::vector<std::string> hard_dependents;
    for (const auto* e : graph.edges_to(target)) {
        if (is_hard(e->kind)) hard_dependents.push_back(e->source);
    }
    if (!hard_dependents.empty()) {
        std::sort(hard_dependents.begin(), hard_dependents.end());
        std::string msg = "cannot destroy '" + target + "': live hard dependents:";
        for (const auto& d : hard_dependents) msg += " " + d;
        throw plan_error(msg);
    }

    std::vector<Step> steps;
    std::vector<Step> removals;
    for (const auto* e : graph.edges_to(target)) {
        if (e->kind == EdgeKind::Facet) {
            removals.push_back({Step::Kind::DiamondCutRemove, e->source, target, ""});
        }
    }
    std::sort(removals.begin(), removals.end());
    steps.insert(steps.end(), removals.begin(), removals.end());
    steps.push_back({Step::Kind::CallDestroy, target, "", node->destroy_function});
    return steps;
}

nlohmann::ordered_json destroy_plan_json(const std::vector<Step>& steps,
                                         const std::string& target) {
    nlohmann::ordered_json j;
    j["kind"] = "destroy";
    j["target"] = target;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& s : steps) arr.push_back(s.to_json());
    j["steps"] = std::move(arr);
    return j;
}

}  // namespace katena::graph
