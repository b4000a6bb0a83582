#include <doctest.h>

#include "fixtures.hpp"
#include "model_gen.hpp"

#include "katena/errors.hpp"
#include "katena/graph.hpp"
#include "katena/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>
#include <set>

using namespace katena;
using graph::EdgeKind;
using graph::Step;

namespace {

model::DeploymentModel voting() {
    return model::parse_model_file(testing::fixture_model("voting_dapp.yaml"), {});
}

model::DeploymentModel ticketing() {
    return model::parse_model_file(testing::fixture_model("ticketing_dapp.yaml"), {});
}

std::vector<std::string> layer_nodes(const graph::DeploymentPlan& plan, size_t index) {
    std::vector<std::string> out;
    for (const auto& step : plan.layers.at(index)) out.push_back(step.node);
    return out;
}

// Brute-force reverse reachability over redeploy-propagating edges,
// independent of the planner's implementation.
std::set<std::string> oracle_reverse_closure(const graph::DependencyGraph& g,
                                             const std::string& target) {
    std::set<std::string> closure{target};
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& e : g.edges) {
            if (!graph::is_hard(e.kind) || e.kind == EdgeKind::ProxyImpl) continue;
            if (closure.contains(e.target) && !closure.contains(e.source)) {
                closure.insert(e.source);
                changed = true;
            }
        }
    }
    return closure;
}

}  // namespace

TEST_CASE("voting model produces exactly the declared dependency edges") {
    auto m = voting();
    auto g = graph::build_dependency_graph(m);
    CHECK(g.has_edge("votingContract", "mathLib", EdgeKind::LC));
    CHECK(g.has_edge("randomGeneratorContract", "mathLib", EdgeKind::LC));
    CHECK(g.has_edge("votingContract", "randomGeneratorContract", EdgeKind::CC));
    CHECK(g.has_edge("backend", "votingContract", EdgeKind::OO));
    CHECK(g.edges.size() == 4);  // useNetwork/useWallet excluded
}

TEST_CASE("ticketing model includes the L-L and Lazy-C-C edges") {
    auto m = ticketing();
    auto g = graph::build_dependency_graph(m);
    CHECK(g.has_edge("utils", "math", EdgeKind::LL));
    CHECK(g.has_edge("tickets", "admin", EdgeKind::LazyCC));
    CHECK(g.has_edge("admin", "utils", EdgeKind::LC));
    CHECK(g.has_edge("events", "admin", EdgeKind::CC));
    CHECK(g.has_edge("frontend", "tickets", EdgeKind::OO));
    CHECK(g.has_edge("frontend", "events", EdgeKind::OO));
}

TEST_CASE("single contract with only network/wallet requirements has zero edges") {
    const char* text = R"(
net:
  type: katena.nodes.network.ethereum
wallet:
  type: katena.nodes.wallet
  properties: { privateKey: { env: K } }
solo:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}]
  properties: { abi: "Plain" }
)";
    auto g = graph::build_dependency_graph(model::parse_model(text, {}));
    CHECK(g.edges.empty());
}

TEST_CASE("hard cycle detection distinguishes CC from Lazy-CC") {
    auto cyclic = model::parse_model_file(testing::fixture_model("cycle_cc.yaml"), {});
    auto cycles = graph::detect_hard_cycles(graph::build_dependency_graph(cyclic));
    REQUIRE(cycles.size() == 1);
    CHECK(cycles[0] == std::vector<std::string>{"alpha", "beta"});

    // A -> B via CC, B -> A via LazyCC: not a cycle.
    const char* mixed = R"(
net:
  type: katena.nodes.network.ethereum
wallet:
  type: katena.nodes.wallet
  properties: { privateKey: { env: K } }
a:
  type: katena.nodes.smartcontract
  requirements:
    - useNetwork: net
    - useWallet: wallet
    - useContractInConstructor: b
  properties: { abi: "Plain" }
b:
  type: katena.nodes.smartcontract
  requirements:
    - useNetwork: net
    - useWallet: wallet
    - useContract: { node: a, functionName: setPeer }
  properties: { abi: "Peer" }
)";
    CHECK(graph::detect_hard_cycles(graph::build_dependency_graph(model::parse_model(mixed, {})))
              .empty());

    // acyclic 3-chain
    const char* chain3 = R"(
net:
  type: katena.nodes.network.ethereum
wallet:
  type: katena.nodes.wallet
  properties: { privateKey: { env: K } }
a:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}, {useContractInConstructor: b}]
  properties: { abi: "Plain" }
b:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}, {useContractInConstructor: c}]
  properties: { abi: "Plain" }
c:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}]
  properties: { abi: "Plain" }
)";
    CHECK(graph::detect_hard_cycles(graph::build_dependency_graph(model::parse_model(chain3, {})))
              .empty());
}

TEST_CASE("voting deployment plan layers match the expected order") {
    auto m = voting();
    auto plan = graph::deployment_plan(graph::build_dependency_graph(m), m);
    REQUIRE(plan.layers.size() == 4);
    CHECK(layer_nodes(plan, 0) == std::vector<std::string>{"mathLib"});
    CHECK(layer_nodes(plan, 1) == std::vector<std::string>{"randomGeneratorContract"});
    CHECK(layer_nodes(plan, 2) == std::vector<std::string>{"votingContract"});
    CHECK(layer_nodes(plan, 3) == std::vector<std::string>{"backend"});
    CHECK(plan.layers[3][0].kind == Step::Kind::ConfigureOffChain);
    CHECK(plan.layers[0][0].kind == Step::Kind::DeployLibrary);
    CHECK(plan.layers[1][0].kind == Step::Kind::LinkAndDeploy);
}

TEST_CASE("ticketing plan: math before utils, wire call after all deploys, config last") {
    auto m = ticketing();
    auto plan = graph::deployment_plan(graph::build_dependency_graph(m), m);
    int math_layer = plan.layer_of("math");
    int utils_layer = plan.layer_of("utils");
    int admin_layer = plan.layer_of("admin");
    int events_layer = plan.layer_of("events");
    int tickets_layer = plan.layer_of("tickets");
    REQUIRE(math_layer >= 0);
    CHECK(math_layer < utils_layer);
    CHECK(utils_layer < admin_layer);
    CHECK(admin_layer < events_layer);

    // The tickets->admin wire call sits in a layer after every deploy.
    int wire_layer = -1, config_layer = -1;
    for (size_t i = 0; i < plan.layers.size(); ++i) {
        for (const auto& step : plan.layers[i]) {
            if (step.kind == Step::Kind::CallWire) wire_layer = static_cast<int>(i);
            if (step.kind == Step::Kind::ConfigureOffChain) config_layer = static_cast<int>(i);
        }
    }
    REQUIRE(wire_layer >= 0);
    CHECK(wire_layer > std::max({math_layer, utils_layer, admin_layer, events_layer,
                                 tickets_layer}));
    CHECK(config_layer > wire_layer);
}

TEST_CASE("two independent contracts deploy in one layer in lexicographic order") {
    const char* text = R"(
net:
  type: katena.nodes.network.ethereum
wallet:
  type: katena.nodes.wallet
  properties: { privateKey: { env: K } }
zebra:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}]
  properties: { abi: "Plain" }
apple:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}]
  properties: { abi: "Plain" }
)";
    auto m = model::parse_model(text, {});
    auto plan = graph::deployment_plan(graph::build_dependency_graph(m), m);
    REQUIRE(plan.layers.size() == 1);
    CHECK(layer_nodes(plan, 0) == std::vector<std::string>{"apple", "zebra"});
}

TEST_CASE("plans serialize to byte-identical canonical JSON") {
    auto m = ticketing();
    auto g = graph::build_dependency_graph(m);
    auto a = graph::deployment_plan(g, m).to_canonical_json();
    auto b = graph::deployment_plan(graph::build_dependency_graph(ticketing()), ticketing())
                 .to_canonical_json();
    CHECK(a == b);
}

TEST_CASE("planning a cyclic model fails with the cycle named") {
    auto cyclic = model::parse_model_file(testing::fixture_model("cycle_cc.yaml"), {});
    auto g = graph::build_dependency_graph(cyclic);
    CHECK_THROWS_WITH_AS(graph::deployment_plan(g, cyclic), doctest::Contains("alpha"), Error);
}

TEST_CASE("upgrade plan: math cascade redeploys closure, tickets only gets a wire call") {
    auto m = ticketing();
    auto g = graph::build_dependency_graph(m);
    auto plan = graph::upgrade_plan(g, m, "math");

    std::set<std::string> redeploy(plan.redeploy_set.begin(), plan.redeploy_set.end());
    CHECK(redeploy == std::set<std::string>{"math", "utils", "admin", "events"});
    CHECK_FALSE(redeploy.contains("tickets"));

    REQUIRE(plan.wire_calls.size() == 1);
    CHECK(plan.wire_calls[0].node == "tickets");
    CHECK(plan.wire_calls[0].target == "admin");
    CHECK(plan.wire_calls[0].function_name == "setAdmin");

    // order respects hard dependencies
    auto pos = [&](const std::string& n) {
        return std::find(plan.redeploy_set.begin(), plan.redeploy_set.end(), n) -
               plan.redeploy_set.begin();
    };
    CHECK(pos("math") < pos("utils"));
    CHECK(pos("utils") < pos("admin"));
    CHECK(pos("admin") < pos("events"));

    // frontend uses events (redeployed): exactly one off-chain update
    REQUIRE(plan.offchain_updates.size() == 1);
    CHECK(plan.offchain_updates[0].node == "frontend");
}

TEST_CASE("upgrade of a lazy dependency does not redeploy the dependent") {
    auto m = ticketing();
    auto g = graph::build_dependency_graph(m);
    auto plan = graph::upgrade_plan(g, m, "admin");
    std::set<std::string> redeploy(plan.redeploy_set.begin(), plan.redeploy_set.end());
    CHECK(redeploy == std::set<std::string>{"admin", "events"});  // events: CC on admin
    REQUIRE(plan.wire_calls.size() == 1);
    CHECK(plan.wire_calls[0].node == "tickets");
}

TEST_CASE("upgrade of a leaf is a single redeploy") {
    auto m = ticketing();
    auto g = graph::build_dependency_graph(m);
    auto plan = graph::upgrade_plan(g, m, "tickets");
    CHECK(plan.redeploy_set == std::vector<std::string>{"tickets"});
    CHECK(plan.wire_calls.empty());
}

TEST_CASE("upgrade errors: unknown target and off-chain target") {
    auto m = ticketing();
    auto g = graph::build_dependency_graph(m);
    CHECK_THROWS_AS(graph::upgrade_plan(g, m, "nope"), Error);
    CHECK_THROWS_WITH_AS(graph::upgrade_plan(g, m, "frontend"),
                         doctest::Contains("on-chain"), Error);
}

TEST_CASE("proxy implementation upgrade re-points the proxy instead of redeploying it") {
    auto m = model::parse_model_file(testing::fixture_model("proxy.yaml"), {});
    auto g = graph::build_dependency_graph(m);
    CHECK(g.has_edge("gateway", "logic", EdgeKind::ProxyImpl));

    auto plan = graph::upgrade_plan(g, m, "logic");
    CHECK(plan.redeploy_set == std::vector<std::string>{"logic"});
    REQUIRE(plan.wire_calls.size() == 1);
    CHECK(plan.wire_calls[0].node == "gateway");
    CHECK(plan.wire_calls[0].function_name == "upgradeTo");

    // Deploy ordering still treats the edge as hard: logic before gateway.
    auto deploy = graph::deployment_plan(g, m);
    CHECK(deploy.layer_of("logic") < deploy.layer_of("gateway"));
}

TEST_CASE("destroy plan: facet removal first, refusal on hard dependents") {
    auto dm = model::parse_model_file(testing::fixture_model("destroyable.yaml"), {});
    auto dg = graph::build_dependency_graph(dm);
    auto steps = graph::destroy_plan(dg, dm, "vault");
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].kind == Step::Kind::CallDestroy);
    CHECK(steps[0].function_name == "close");

    // missing destroyFunction
    auto m5 = voting();
    auto g5 = graph::build_dependency_graph(m5);
    CHECK_THROWS_WITH_AS(graph::destroy_plan(g5, m5, "randomGeneratorContract"),
                         doctest::Contains("destroyFunction"), Error);

    // hard dependents block destruction
    const char* dependent = R"(
net:
  type: katena.nodes.network.ethereum
wallet:
  type: katena.nodes.wallet
  properties: { privateKey: { env: K } }
base:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}]
  properties:
    abi: "Closeable"
    destroyFunction: close
    refundAddress: "0x00000000000000000000000000000000000000aa"
user:
  type: katena.nodes.smartcontract
  requirements: [{useNetwork: net}, {useWallet: wallet}, {useContractInConstructor: base}]
  properties: { abi: "Plain" }
)";
    auto md = model::parse_model(dependent, {});
    auto gd = graph::build_dependency_graph(md);
    CHECK_THROWS_WITH_AS(graph::destroy_plan(gd, md, "base"), doctest::Contains("user"), Error);
}

TEST_CASE("property: plans are linear extensions of the hard-edge partial order") {
    std::mt19937 rng(42);
    for (int iter = 0; iter < 150; ++iter) {
        auto generated = testing::random_acyclic_model(
            rng, std::uniform_int_distribution<size_t>(0, 4)(rng),
            std::uniform_int_distribution<size_t>(1, 8)(rng),
            std::uniform_int_distribution<size_t>(0, 2)(rng));
        const auto& m = generated.model;
        auto g = graph::build_dependency_graph(m);
        REQUIRE(graph::detect_hard_cycles(g).empty());
        auto plan = graph::deployment_plan(g, m);

        int max_deploy_layer = -1;
        for (const auto& [name, node] : m.nodes) {
            if (model::is_onchain_kind(node.kind)) {
                max_deploy_layer = std::max(max_deploy_layer, plan.layer_of(name));
            }
        }
        for (const auto& e : g.edges) {
            CAPTURE(iter);
            if (graph::is_hard(e.kind)) {
                CHECK(plan.layer_of(e.target) < plan.layer_of(e.source));
            }
        }
        // lazy wires after both endpoints; off-chain configs after all deploys
        for (size_t i = 0; i < plan.layers.size(); ++i) {
            for (const auto& step : plan.layers[i]) {
                if (step.kind == Step::Kind::CallWire) {
                    CHECK(static_cast<int>(i) > plan.layer_of(step.node));
                    CHECK(static_cast<int>(i) > plan.layer_of(step.target));
                }
                if (step.kind == Step::Kind::ConfigureOffChain) {
                    CHECK(static_cast<int>(i) > max_deploy_layer);
                }
            }
        }

        // determinism: rebuilding everything reproduces identical bytes
        auto plan2 = graph::deployment_plan(graph::build_dependency_graph(m), m);
        CHECK(plan.to_canonical_json() == plan2.to_canonical_json());
    }
}

TEST_CASE("property: upgrade redeploy set equals the brute-force closure oracle") {
    std::mt19937 rng(43);
    for (int iter = 0; iter < 150; ++iter) {
        auto generated = testing::random_acyclic_model(rng, 2, 6, 1);
        const auto& m = generated.model;
        auto g = graph::build_dependency_graph(m);
        for (const auto& [name, node] : m.nodes) {
            if (!model::is_onchain_kind(node.kind)) continue;
            auto plan = graph::upgrade_plan(g, m, name);
            std::set<std::string> got(plan.redeploy_set.begin(), plan.redeploy_set.end());
            CAPTURE(iter);
            CAPTURE(name);
            CHECK(got == oracle_reverse_closure(g, name));
        }
    }
}
