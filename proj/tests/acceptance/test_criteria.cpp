#include <doctest.h>

#include "abi_decode.hpp"
#include "fake_node.hpp"
#include "fixtures.hpp"
#include "model_gen.hpp"

#include "katena/chain.hpp"
#include "katena/errors.hpp"
#include "katena/graph.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"
#include "katena/linker.hpp"
#include "katena/model.hpp"
#include "katena/notcount.hpp"
#include "katena/orchestrator.hpp"
#include "katena/patterns.hpp"
#include "katena/rpc.hpp"
#include "katena/signing.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <random>
#include <set>

using namespace katena;
using Clock = std::chrono::steady_clock;

namespace {

struct MockRun {
    testing::TempDir tmp;
    model::DeploymentModel model;
    model::ArtifactStore store{testing::fixture_artifacts()};
    chain::MockChain mock;
    orch::DeploymentRecord record;
    std::unique_ptr<orch::Orchestrator> orchestrator;

    explicit MockRun(const std::string& fixture)
        : model(model::parse_model_file(testing::fixture_model(fixture), {})) {
        init();
    }
    MockRun(const char* yaml_text, bool) : model(model::parse_model(yaml_text, {})) { init(); }

    void init() {
        orch::ExecutionOptions opts;
        opts.record_path = tmp.file("state.json");
        opts.config_dir = tmp.str();
        opts.model_hash = "fixture";
        orchestrator = std::make_unique<orch::Orchestrator>(model, store, mock, secrets(), opts);
    }

    static std::map<std::string, std::string> secrets() { return {}; }

    orch::ExecutionReport deploy() {
        auto graph = graph::build_dependency_graph(model);
        auto plan = graph::deployment_plan(graph, model);
        return orchestrator->execute_deploy(plan, record);
    }

    orch::ExecutionReport upgrade(const std::string& target) {
        auto graph = graph::build_dependency_graph(model);
        auto plan = graph::upgrade_plan(graph, model, target);
        return orchestrator->execute_upgrade(plan, record);
    }
};

std::vector<std::string> mock_deploy_order(const chain::MockChain& mock) {
    std::vector<std::string> out;
    for (const auto& event : mock.tx_log()) {
        if (event.kind == "deploy") out.push_back(event.target_role);
    }
    return out;
}

const char* kDiamondDestroyModel = R"(
ganache:
  type: katena.nodes.network.ganache
wallet:
  type: katena.nodes.wallet
  properties: { privateKey: { env: KATENA_WALLET_KEY } }
cutFacet:
  type: katena.nodes.diamond.cut
  requirements: [{useNetwork: ganache}, {useWallet: wallet}]
  properties: { abi: "DiamondCutFacet" }
closer:
  type: katena.nodes.diamond.facet
  requirements: [{useNetwork: ganache}, {useWallet: wallet}]
  properties:
    abi: "Closeable"
    destroyFunction: close
    refundAddress: "0x00000000000000000000000000000000000000aa"
appDiamond:
  type: katena.nodes.diamond
  requirements:
    - useNetwork: ganache
    - useWallet: wallet
    - useCut: cutFacet
    - useFacet: closer
  properties: { abi: "Diamond" }
)";

}  // namespace

TEST_CASE("criterion 1: voting model plans and deploys in the expected order, under 1s") {
    auto start = Clock::now();

    MockRun run("voting_dapp.yaml");
    auto graph = graph::build_dependency_graph(run.model);
    auto plan = graph::deployment_plan(graph, run.model);

    REQUIRE(plan.layers.size() == 4);
    auto names = [&](size_t i) {
        std::vector<std::string> out;
        for (const auto& s : plan.layers[i]) out.push_back(s.node);
        return out;
    };
    REQUIRE(names(0) == std::vector<std::string>{"mathLib"});
    REQUIRE(names(1) == std::vector<std::string>{"randomGeneratorContract"});
    REQUIRE(names(2) == std::vector<std::string>{"votingContract"});
    REQUIRE(names(3) == std::vector<std::string>{"backend"});
    REQUIRE(plan.layers[3][0].kind == graph::Step::Kind::ConfigureOffChain);

    auto report = run.orchestrator->execute_deploy(plan, run.record);
    REQUIRE(report.ok());
    REQUIRE(mock_deploy_order(run.mock) ==
            std::vector<std::string>{"mathLib", "randomGeneratorContract", "votingContract"});

    auto elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    REQUIRE(elapsed < 1.0);
}

TEST_CASE("criterion 2: tickets fixture wire ordering and math upgrade cascade") {
    MockRun run("ticketing_dapp.yaml");
    REQUIRE(run.deploy().ok());

    // the tickets->admin wire call is strictly after both deployments
    auto log = run.mock.tx_log();
    int tickets_deploy = -1, admin_deploy = -1, wire = -1;
    for (size_t i = 0; i < log.size(); ++i) {
        if (log[i].kind == "deploy" && log[i].target_role == "tickets")
            tickets_deploy = static_cast<int>(i);
        if (log[i].kind == "deploy" && log[i].target_role == "admin")
            admin_deploy = static_cast<int>(i);
        if (log[i].kind == "call" && log[i].target_role == "tickets") wire = static_cast<int>(i);
    }
    REQUIRE(wire > tickets_deploy);
    REQUIRE(wire > admin_deploy);
    REQUIRE(tickets_deploy >= 0);
    REQUIRE(admin_deploy >= 0);

    // upgrading math redeploys exactly the hard-edge reverse closure
    std::map<std::string, std::string> before;
    for (const auto& [name, entry] : run.record.entries) before[name] = entry.address;

    auto report = run.upgrade("math");
    REQUIRE(report.ok());

    std::set<std::string> redeployed;
    size_t tickets_wires = 0;
    for (const auto& step : report.steps) {
        if (step.status != "executed") continue;
        switch (step.step.kind) {
            case graph::Step::Kind::DeployLibrary:
            case graph::Step::Kind::LinkAndDeploy:
            case graph::Step::Kind::DeployContract:
                redeployed.insert(step.step.node);
                break;
            case graph::Step::Kind::CallWire:
                if (step.step.node == "tickets") ++tickets_wires;
                break;
            default: break;
        }
    }
    REQUIRE(redeployed == std::set<std::string>{"math", "utils", "admin", "events"});
    REQUIRE(tickets_wires == 1);
    REQUIRE(run.record.entries.at("tickets").address == before.at("tickets"));
    for (const auto& name : {"math", "utils", "admin", "events"}) {
        REQUIRE(run.record.entries.at(name).address != before.at(name));
    }
}

TEST_CASE("criterion 3: constructor cycles rejected by name, lazy mutual references pass") {
    model::ArtifactStore store(testing::fixture_artifacts());

    auto cyclic = model::parse_model_file(testing::fixture_model("cycle_cc.yaml"), {});
    auto report = model::validate_model(cyclic, &store);
    REQUIRE_FALSE(report.ok());
    bool named = false;
    for (const auto& v : report.violations) {
        if (v.code == "constructor-cycle" &&
            v.message.find("alpha") != std::string::npos &&
            v.message.find("beta") != std::string::npos) {
            named = true;
        }
    }
    REQUIRE(named);

    auto lazy = model::parse_model_file(testing::fixture_model("cycle_lazy.yaml"), {});
    auto lazy_report = model::validate_model(lazy, &store);
    REQUIRE(lazy_report.ok());
    REQUIRE(graph::detect_hard_cycles(graph::build_dependency_graph(lazy)).empty());
}

TEST_CASE("criterion 4: 1000 randomized acyclic models plan and upgrade correctly, under 60s") {
    auto start = Clock::now();
    std::mt19937 rng(240808);
    size_t models_checked = 0;

    // independent brute-force reverse closure over redeploy-propagating edges
    auto oracle = [](const graph::DependencyGraph& g, const std::string& target) {
        std::set<std::string> closure{target};
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& e : g.edges) {
                if (!graph::is_hard(e.kind) || e.kind == graph::EdgeKind::ProxyImpl) continue;
                if (closure.contains(e.target) && !closure.contains(e.source)) {
                    closure.insert(e.source);
                    changed = true;
                }
            }
        }
        return closure;
    };

    for (int iter = 0; iter < 1000; ++iter) {
        auto generated = testing::random_acyclic_model(
            rng, std::uniform_int_distribution<size_t>(0, 4)(rng),
            std::uniform_int_distribution<size_t>(1, 8)(rng),
            std::uniform_int_distribution<size_t>(0, 2)(rng));
        const auto& m = generated.model;
        auto g = graph::build_dependency_graph(m);
        REQUIRE(graph::detect_hard_cycles(g).empty());
        auto plan = graph::deployment_plan(g, m);

        int max_deploy_layer = -1;
        std::vector<std::string> onchain;
        for (const auto& [name, node] : m.nodes) {
            if (model::is_onchain_kind(node.kind)) {
                onchain.push_back(name);
                max_deploy_layer = std::max(max_deploy_layer, plan.layer_of(name));
            }
        }
        for (const auto& e : g.edges) {
            if (graph::is_hard(e.kind)) {
                REQUIRE(plan.layer_of(e.target) < plan.layer_of(e.source));
            }
        }
        for (size_t i = 0; i < plan.layers.size(); ++i) {
            for (const auto& step : plan.layers[i]) {
                if (step.kind == graph::Step::Kind::CallWire) {
                    REQUIRE(static_cast<int>(i) > plan.layer_of(step.node));
                    REQUIRE(static_cast<int>(i) > plan.layer_of(step.target));
                }
                if (step.kind == graph::Step::Kind::ConfigureOffChain) {
                    REQUIRE(static_cast<int>(i) > max_deploy_layer);
                }
            }
        }

        // byte-determinism across a full rebuild
        auto again = graph::deployment_plan(graph::build_dependency_graph(m), m);
        REQUIRE(plan.to_canonical_json() == again.to_canonical_json());

        // upgrade closure equals the oracle (minimality and soundness)
        for (const auto& name : onchain) {
            auto up = graph::upgrade_plan(g, m, name);
            std::set<std::string> got(up.redeploy_set.begin(), up.redeploy_set.end());
            REQUIRE(got == oracle(g, name));
        }
        ++models_checked;
    }
    REQUIRE(models_checked == 1000);
    auto elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    REQUIRE(elapsed < 60.0);
}

TEST_CASE("criterion 5: linker round trips, pinned transfer selector, abi round trips") {
    // placeholder extraction/substitution on 100 randomized bytecodes
    std::mt19937 rng(5150);
    const char* hexdigits = "0123456789abcdef";
    for (int iter = 0; iter < 100; ++iter) {
        std::string bytecode;
        size_t chunks = std::uniform_int_distribution<size_t>(1, 6)(rng);
        for (size_t c = 0; c < chunks; ++c) {
            size_t len = 2 * std::uniform_int_distribution<size_t>(0, 12)(rng);
            for (size_t i = 0; i < len; ++i) bytecode += hexdigits[rng() % 16];
            std::string name = "Lib" + std::to_string(rng() % 4);
            if (rng() % 2 == 0) {
                bytecode += "__$" + linker::placeholder_digest(name) + "$__";
            } else {
                std::string legacy = "__" + name;
                legacy.resize(40, '_');
                bytecode += legacy;
            }
        }
        size_t original = bytecode.size();
        std::string linked = bytecode;
        while (true) {
            auto remaining = linker::extract_placeholders(linked);
            if (remaining.empty()) break;
            abi::Address addr;
            for (auto& b : addr.bytes) b = static_cast<uint8_t>(rng());
            linked = linker::link_library(linked, remaining[0], addr);
        }
        REQUIRE(linked.size() == original);
        REQUIRE(linker::extract_placeholders(linked).empty());
    }

    // selector of transfer(address,uint256): keccak oracle, then the pin
    auto oracle_selector = crypto::keccak256_hex("transfer(address,uint256)").substr(0, 8);
    REQUIRE(oracle_selector == "a9059cbb");
    REQUIRE(crypto::selector_hex("transfer(address,uint256)") == oracle_selector);

    // encode/decode round-trip over randomized values of the supported subset
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<abi::Value> values;
        std::vector<abi::Type> types;
        size_t n = std::uniform_int_distribution<size_t>(1, 4)(rng);
        for (size_t i = 0; i < n; ++i) {
            switch (rng() % 6) {
                case 0:
                    values.push_back(abi::Value::uint_value(U256(rng() % 1000), 256));
                    break;
                case 1: {
                    abi::Address a;
                    for (auto& b : a.bytes) b = static_cast<uint8_t>(rng());
                    values.push_back(abi::Value::address_value(a));
                    break;
                }
                case 2:
                    values.push_back(abi::Value::bool_value(rng() % 2 == 0));
                    break;
                case 3: {
                    std::vector<uint8_t> data(rng() % 50);
                    for (auto& b : data) b = static_cast<uint8_t>(rng());
                    values.push_back(abi::Value::bytes_value(std::move(data)));
                    break;
                }
                case 4: {
                    std::string s(rng() % 30, 'a');
                    for (auto& c : s) c = static_cast<char>('a' + rng() % 26);
                    values.push_back(abi::Value::string_value(s));
                    break;
                }
                default: {
                    std::vector<abi::Value> items;
                    size_t len = rng() % 4;
                    for (size_t k = 0; k < len; ++k) {
                        items.push_back(abi::Value::uint_value(U256(rng() % 100), 128));
                    }
                    values.push_back(abi::Value::array_value(abi::Type::uint_t(128),
                                                             std::move(items)));
                    break;
                }
            }
            types.push_back(values.back().type);
        }
        auto encoded = abi::encode(values);
        auto decoded = testing::abi_decode(encoded, types);
        REQUIRE(decoded.size() == values.size());
        for (size_t i = 0; i < values.size(); ++i) {
            REQUIRE(abi::encode({decoded[i]}) == abi::encode({values[i]}));
        }
    }
}

TEST_CASE("criterion 6: diamond cut composition, removal restores routing, collisions rejected") {
    model::ArtifactStore store(testing::fixture_artifacts());

    // the fixture produces one add cut with the exclusion applied
    auto m = model::parse_model_file(testing::fixture_model("diamond_app.yaml"), {});
    auto wiring = patterns::plan_diamond_wiring(m.node("appDiamond"), m, store);
    REQUIRE(wiring.cuts.size() == 1);
    REQUIRE(wiring.cuts[0].action == patterns::CutAction::Add);
    REQUIRE(wiring.cuts[0].selectors ==
            std::vector<std::string>{crypto::selector_hex("setB(uint256)")});

    // deploy a diamond, detach the facet through the destroy path: routing
    // returns to its pre-add (empty) state before the destroy call
    MockRun run(kDiamondDestroyModel, true);
    REQUIRE(run.deploy().ok());
    auto diamond_address = abi::Address::parse(run.record.entries.at("appDiamond").address);
    REQUIRE_FALSE(run.mock.routing_of(diamond_address).empty());

    auto g = graph::build_dependency_graph(run.model);
    auto steps = graph::destroy_plan(g, run.model, "closer");
    REQUIRE(steps.size() == 2);
    REQUIRE(steps[0].kind == graph::Step::Kind::DiamondCutRemove);
    REQUIRE(steps[1].kind == graph::Step::Kind::CallDestroy);
    REQUIRE(run.orchestrator->execute_destroy(steps, run.record).ok());
    REQUIRE(run.mock.routing_of(diamond_address).empty());
    REQUIRE(run.record.entries.at("closer").status == "destroyed");

    // random add-then-remove sequences restore the table exactly
    std::mt19937 rng(66);
    for (int iter = 0; iter < 50; ++iter) {
        chain::MockChain mock;
        abi::Address diamond;
        diamond.bytes[19] = 0x0d;
        size_t facets = std::uniform_int_distribution<size_t>(1, 4)(rng);
        std::vector<std::pair<abi::Address, std::vector<std::string>>> added;
        std::set<std::string> used;
        for (size_t f = 0; f < facets; ++f) {
            abi::Address facet;
            facet.bytes[19] = static_cast<uint8_t>(f + 1);
            std::vector<std::string> selectors;
            size_t count = std::uniform_int_distribution<size_t>(1, 5)(rng);
            for (size_t s = 0; s < count; ++s) {
                char buf[9];
                std::snprintf(buf, sizeof(buf), "%08x", static_cast<unsigned>(rng()));
                if (used.insert(buf).second) selectors.push_back(buf);
            }
            if (selectors.empty()) continue;
            mock.route_selectors(diamond, selectors, facet);
            added.emplace_back(facet, selectors);
        }
        for (auto it = added.rbegin(); it != added.rend(); ++it) {
            mock.unroute_selectors(diamond, it->second);
        }
        REQUIRE(mock.routing_of(diamond).empty());
    }

    // cross-facet collision: two facets exporting the same signature
    const char* collision = R"(
ganache:
  type: katena.nodes.network.ganache
wallet:
  type: katena.nodes.wallet
  properties: { privateKey: { env: KATENA_WALLET_KEY } }
cutFacet:
  type: katena.nodes.diamond.cut
  requirements: [{useNetwork: ganache}, {useWallet: wallet}]
  properties: { abi: "DiamondCutFacet" }
one:
  type: katena.nodes.diamond.facet
  requirements: [{useNetwork: ganache}, {useWallet: wallet}]
  properties: { abi: "FacetA" }
two:
  type: katena.nodes.diamond.facet
  requirements: [{useNetwork: ganache}, {useWallet: wallet}]
  properties: { abi: "FacetA" }
appDiamond:
  type: katena.nodes.diamond
  requirements:
    - useNetwork: ganache
    - useWallet: wallet
    - useCut: cutFacet
    - useFacet: one
    - useFacet: two
  properties: { abi: "Diamond" }
)";
    auto colliding = model::parse_model(collision, {});
    REQUIRE_THROWS_WITH_AS(patterns::plan_diamond_wiring(colliding.node("appDiamond"),
                                                         colliding, store),
                           doctest::Contains("selector"), Error);
}

TEST_CASE("criterion 7: two cold runs produce byte-identical deployment records") {
    auto cold_record = [](const std::string& fixture) {
        MockRun run(fixture);
        REQUIRE(run.deploy().ok());
        return testing::read_text(run.tmp.file("state.json"));
    };
    for (const std::string fixture :
         {"voting_dapp.yaml", "ticketing_dapp.yaml", "proxy.yaml"}) {
        CAPTURE(fixture);
        auto first = cold_record(fixture);
        auto second = cold_record(fixture);
        REQUIRE_FALSE(first.empty());
        REQUIRE(first == second);
    }
    // the diamond model too
    auto run_diamond = [&] {
        MockRun run(kDiamondDestroyModel, true);
        REQUIRE(run.deploy().ok());
        return testing::read_text(run.tmp.file("state.json"));
    };
    REQUIRE(run_diamond() == run_diamond());
}

TEST_CASE("criterion 8: token metric matches the worked example and the registered count") {
    REQUIRE(toolkit::count_tokens("contract.deploy()", "js") == 2);
    auto count = toolkit::count_tokens_file(
        testing::fixtures_dir() + "/metrics/ens_snippet.yaml", "yaml");
    // pre-registered manual tokenization of the printed registry/resolver model
    REQUIRE(count.tokens == 36);
}

namespace {

struct RpcRun {
    testing::TempDir tmp;
    model::DeploymentModel model;
    model::ArtifactStore store{testing::fixture_artifacts()};
    std::unique_ptr<chain::RpcBackend> backend;
    orch::DeploymentRecord record;
    std::unique_ptr<orch::Orchestrator> orchestrator;

    RpcRun(const std::string& fixture, const std::string& url,
           const std::map<std::string, std::string>& secrets)
        : model(model::parse_model_file(testing::fixture_model(fixture), {})) {
        chain::RpcOptions options;
        options.url = url;
        options.poll_interval = std::chrono::milliseconds(20);
        backend = std::make_unique<chain::RpcBackend>(options);
        orch::ExecutionOptions opts;
        opts.record_path = tmp.file("state.json");
        opts.config_dir = tmp.str();
        opts.model_hash = "fixture";
        orchestrator =
            std::make_unique<orch::Orchestrator>(model, store, *backend, secrets, opts);
    }

    orch::ExecutionReport deploy() {
        auto graph = graph::build_dependency_graph(model);
        auto plan = graph::deployment_plan(graph, model);
        return orchestrator->execute_deploy(plan, record);
    }
};

std::map<std::string, std::string> integration_secrets() {
    // well-known funded dev-chain key (default anvil/hardhat account 0)
    return {{"UserKeyEthereum",
             "ac0974bec39a17e36ba4a6b4d238ff944bacb478cbed5efcae784d7bf4f2ff80"}};
}

nlohmann::json rpc_single(const std::string& url, const std::string& method,
                          const nlohmann::json& params) {
    auto scheme_end = url.find("://");
    auto path_start = url.find('/', scheme_end + 3);
    std::string host = path_start == std::string::npos ? url : url.substr(0, path_start);
    httplib::Client client(host);
    client.set_connection_timeout(std::chrono::seconds(1));
    nlohmann::json body = {{"jsonrpc", "2.0"}, {"method", method}, {"params", params},
                           {"id", 1}};
    auto res = client.Post("/", body.dump(), "application/json");
    if (!res || res->status != 200) return nullptr;
    return nlohmann::json::parse(res->body, nullptr, false);
}

}  // namespace

TEST_CASE("criterion 9 (optional, gated): two-contract C-C model over JSON-RPC") {
    const std::string dev_url = "http://127.0.0.1:8545";
    auto probe = rpc_single(dev_url, "eth_chainId", nlohmann::json::array());
    if (probe.is_null() || probe.is_discarded() || !probe.contains("result")) {
        MESSAGE("skipped: no local dev chain at ", dev_url);
        return;
    }
    auto secrets = integration_secrets();

    // funded account check; otherwise the environment cannot run this criterion
    auto wallet_address =
        crypto::address_from_private_key(hex::decode(secrets.at("UserKeyEthereum")));
    auto balance = rpc_single(dev_url, "eth_getBalance",
                              nlohmann::json::array({wallet_address.to_hex(), "latest"}));
    if (balance.is_null() || !balance.contains("result") ||
        balance["result"].get<std::string>() == "0x0") {
        MESSAGE("skipped: dev chain does not fund the default account");
        return;
    }

    // mock reference run
    MockRun mock_run("ens.yaml");
    REQUIRE(mock_run.deploy().ok());

    // rpc run
    RpcRun rpc_run("ens.yaml", dev_url, secrets);
    auto report = rpc_run.deploy();
    REQUIRE(report.ok());

    // recorded addresses match receipt contractAddress fields
    for (const auto& name : {"ensRegistry", "publicResolver"}) {
        const auto& entry = rpc_run.record.entries.at(name);
        REQUIRE(entry.tx_ids.size() == 1);
        auto receipt = rpc_single(dev_url, "eth_getTransactionReceipt",
                                  nlohmann::json::array({entry.tx_ids[0]}));
        REQUIRE(receipt.contains("result"));
        REQUIRE(hex::to_lower(receipt["result"]["contractAddress"].get<std::string>()) ==
                entry.address);
    }

    // identical call-visible sequences across backends
    MockRun mock_again("ens.yaml");
    auto mock_report = mock_again.deploy();
    REQUIRE(mock_report.op_sequence == report.op_sequence);
}

TEST_CASE("invariant: rpc and mock backends emit identical call-visible sequences") {
    // An in-process JSON-RPC stub stands in for the endpoint; this runs
    // everywhere, unlike the gated dev-chain criterion above.
    testing::FakeNode node;
    auto secrets = integration_secrets();

    MockRun mock_run("ticketing_dapp.yaml");
    REQUIRE(mock_run.deploy().ok());

    RpcRun rpc_run("ticketing_dapp.yaml", node.url(), secrets);
    auto rpc_report = rpc_run.deploy();
    REQUIRE(rpc_report.ok());

    MockRun mock_again("ticketing_dapp.yaml");
    auto mock_report = mock_again.deploy();
    REQUIRE(mock_report.op_sequence == rpc_report.op_sequence);

    // the sequence includes the deploys and the tickets wire call
    bool saw_wire = false;
    for (const auto& [role, op] : rpc_report.op_sequence) {
        if (role == "tickets" && op == "0x" + crypto::selector_hex("setAdmin(address)")) {
            saw_wire = true;
        }
    }
    REQUIRE(saw_wire);
}
