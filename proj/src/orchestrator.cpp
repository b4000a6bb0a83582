#include "katena/orchestrator.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"
#include "katena/linker.hpp"
#include "katena/patterns.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

namespace katena::orch {

using model::NodeInstance;
using model::NodeKind;
using model::Relation;

nlohmann::ordered_json ExecutionReport::to_json() const {
    nlohmann::ordered_json j;
    j["attempted"] = attempted;
    j["executed"] = executed;
    j["skipped"] = skipped;
    j["failed"] = failed;
    j["error"] = error;
    auto steps_json = nlohmann::ordered_json::array();
    for (const auto& s : steps) {
        auto e = s.step.to_json();
        e["status"] = s.status;
        if (!s.detail.empty()) e["detail"] = s.detail;
        if (!s.tx.empty()) e["tx"] = s.tx;
        if (!s.address.empty()) e["address"] = s.address;
        e["durationMs"] = s.duration_ms;
        steps_json.push_back(std::move(e));
    }
    j["steps"] = std::move(steps_json);
    auto ops = nlohmann::ordered_json::array();
    for (const auto& [role, op] : op_sequence) ops.push_back({{"role", role}, {"op", op}});
    j["opSequence"] = std::move(ops);
    j["warnings"] = warnings;
    return j;
}

Orchestrator::Orchestrator(const model::DeploymentModel& deployment,
                           const model::ArtifactStore& artifacts, chain::ChainBackend& backend,
                           std::map<std::string, std::string> secrets, ExecutionOptions options)
    : deployment_(deployment),
      artifacts_(artifacts),
      backend_(backend),
      secrets_(std::move(secrets)),
      options_(std::move(options)),
      graph_(graph::build_dependency_graph(deployment)) {}

chain::Wallet& Orchestrator::wallet_for(const NodeInstance& node) {
    const auto* req = node.first_requirement(Relation::UseWallet);
    if (!req) {
        throw backend_error("node '" + node.name + "' declares no useWallet requirement");
    }
    auto it = wallet_cache_.find(req->target);
    if (it != wallet_cache_.end()) return it->second;
    const auto& wallet_node = deployment_.node(req->target);
    bool derive = backend_.name() == "rpc";
    auto [pos, _] =
        wallet_cache_.emplace(req->target, chain::resolve_wallet(wallet_node, secrets_, derive));
    return pos->second;
}

std::string Orchestrator::address_of(const DeploymentRecord& record,
                                     const std::string& node_name) const {
    const auto& node = deployment_.node(node_name);
    if (node.kind == NodeKind::SmartContractReference) return node.address;
    auto it = record.entries.find(node_name);
    if (it == record.entries.end() || it->second.address.empty() ||
        it->second.status == "destroyed") {
        throw backend_error("node '" + node_name + "' has no live deployed address in the record");
    }
    return it->second.address;
}

std::vector<abi::Address> Orchestrator::constructor_refs(const NodeInstance& node,
                                                         const DeploymentRecord& record) const {
    std::vector<abi::Address> refs;
    for (const auto& req : node.requirements) {
        switch (req.relation) {
            case Relation::Implementation:
            case Relation::UseCut:
            case Relation::UseContractInConstructor:
            case Relation::UseReferenceInConstructor:
                refs.push_back(abi::Address::parse(address_of(record, req.target)));
                break;
            default: break;
        }
    }
    return refs;
}

std::pair<std::vector<uint8_t>, std::string> Orchestrator::build_deploy_payload(
    const NodeInstance& node, const DeploymentRecord& record) const {
    const auto& artifact = artifacts_.get(node.abi_ref);

    std::map<std::string, abi::Address> lib_addresses;
    for (const auto* req : node.requirements_of(Relation::UseLibrary)) {
        lib_addresses.emplace(req->target,
                              abi::Address::parse(address_of(record, req->target)));
    }
    std::string linked =
        linker::link_all(node, artifact, deployment_, artifacts_, lib_addresses);

    auto args = linker::bind_constructor(artifact, constructor_refs(node, record),
                                         node.parameters);
    auto payload = linker::encode_constructor_call(linked, args);

    std::string display;
    for (const auto& a : args) {
        if (!display.empty()) display += ",";
        display += a.to_display();
    }
    return {std::move(payload), std::move(display)};
}

void Orchestrator::note_history(DeploymentRecord& record, const std::string& event,
                                const std::string& node, const std::string& detail,
                                const std::string& tx) {
    record.history.push_back({backend_.now(), event, node, detail, tx});
}

void Orchestrator::persist(const DeploymentRecord& record) {
    if (!options_.record_path.empty()) record.save(options_.record_path);
}

Orchestrator::StepResult Orchestrator::deploy_node(const NodeInstance& node,
                                                   DeploymentRecord& record, bool force) {
    auto [payload, args_display] = [&] {
        std::lock_guard<std::mutex> lock(record_mutex_);
        return build_deploy_payload(node, record);
    }();
    std::string payload_hash =
        hex::encode(crypto::keccak256(std::span<const uint8_t>(payload.data(), payload.size())));

    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        auto it = record.entries.find(node.name);
        if (it != record.entries.end()) {
            const auto& entry = it->second;
            if (entry.status == "destroyed") {
                throw backend_error("node '" + node.name +
                                    "' was destroyed; destroyed entries never regain deployed "
                                    "status (clear the record to redeploy)");
            }
            if (!force && (entry.status == "deployed" || entry.status == "wired") &&
                entry.bytecode_hash == payload_hash) {
                return StepResult{"skipped", "up to date", "", entry.address, ""};
            }
        }
    }

    auto& wallet = wallet_for(node);
    auto result = backend_.deploy(wallet, payload, node.name);

    std::lock_guard<std::mutex> lock(record_mutex_);
    auto& entry = record.entries[node.name];
    std::string old_address = entry.address;
    if (force && !old_address.empty()) {
        note_history(record, "superseded", node.name,
                     old_address + " -> " + result.address.to_hex(), "");
    }
    entry.address = result.address.to_hex();
    entry.bytecode_hash = payload_hash;
    entry.tx_ids.push_back(result.tx_id);
    entry.status = "deployed";
    entry.wires.clear();
    entry.cuts.clear();
    note_history(record, "deployed", node.name,
                 args_display.empty() ? "" : "args=" + args_display, result.tx_id);
    refresh_status(node.name, record);
    persist(record);
    return {"executed", "", result.tx_id, entry.address, ""};
}

void Orchestrator::refresh_status(const std::string& node_name, DeploymentRecord& record) {
    auto it = record.entries.find(node_name);
    if (it == record.entries.end() || it->second.status == "destroyed") return;

    for (const auto* edge : graph_.edges_from(node_name)) {
        if (edge->kind == graph::EdgeKind::LazyCC &&
            !it->second.find_wire(edge->function_name, edge->target)) {
            it->second.status = "deployed";
            return;
        }
        if (edge->kind == graph::EdgeKind::Facet && !it->second.find_cut(edge->target)) {
            it->second.status = "deployed";
            return;
        }
    }
    it->second.status = "wired";
}

Orchestrator::StepResult Orchestrator::wire_edge(const NodeInstance& source,
                                                 const std::string& target,
                                                 const std::string& function_name,
                                                 DeploymentRecord& record) {
    std::string source_address, target_address;
    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        source_address = address_of(record, source.name);
        target_address = address_of(record, target);
        const auto* entry = record.entries.contains(source.name)
                                ? &record.entries.at(source.name)
                                : nullptr;
        if (entry) {
            const auto* mark = entry->find_wire(function_name, target);
            if (mark && mark->target_address == target_address) {
                return StepResult{"skipped", "already wired", mark->tx, "", ""};
            }
        }
    }

    const auto& artifact = artifacts_.get(source.abi_ref);
    auto value = abi::Value::address_value(abi::Address::parse(target_address));
    auto calldata = linker::encode_function_call(artifact, function_name, {value});

    auto& wallet = wallet_for(source);
    std::string tx = backend_.call(wallet, abi::Address::parse(source_address), calldata,
                                   source.name, target_address);
    std::string selector = hex::encode(std::span<const uint8_t>(calldata.data(), 4));

    std::lock_guard<std::mutex> lock(record_mutex_);
    auto& entry = record.entries[source.name];
    std::erase_if(entry.wires, [&](const WireMark& w) {
        return w.function == function_name && w.target == target;
    });
    entry.wires.push_back({function_name, target, target_address, tx});
    note_history(record, "wired", source.name,
                 function_name + "(" + target_address + ") -> " + target, tx);
    refresh_status(source.name, record);
    persist(record);
    return {"executed", "", tx, "", selector};
}

std::vector<uint8_t> Orchestrator::cut_calldata(const NodeInstance& diamond,
                                                const std::string&) {
    const auto* cut_req = diamond.first_requirement(Relation::UseCut);
    if (!cut_req) throw backend_error("diamond '" + diamond.name + "' has no useCut");
    const auto& cut_artifact = artifacts_.get(deployment_.node(cut_req->target).abi_ref);
    auto descriptor = patterns::cut_call_descriptor(cut_artifact);
    // The canonical diamondCut signature takes tuples, which the v1 encoder
    // does not produce; the call carries the selector and the cut is applied
    // through the backend's routing hook.
    return hex::decode(descriptor.selector_hex);
}

Orchestrator::StepResult Orchestrator::add_facet(const NodeInstance& diamond,
                                                 const std::string& facet,
                                                 DeploymentRecord& record) {
    const auto* req = [&]() -> const model::Requirement* {
        for (const auto& r : diamond.requirements) {
            if (r.relation == Relation::UseFacet && r.target == facet) return &r;
        }
        return nullptr;
    }();
    if (!req) throw backend_error("diamond '" + diamond.name + "' has no useFacet '" + facet + "'");

    std::string diamond_address, facet_address;
    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        diamond_address = address_of(record, diamond.name);
        facet_address = address_of(record, facet);
        const auto& entry = record.entries.at(diamond.name);
        if (const auto* mark = entry.find_cut(facet); mark && mark->facet_address == facet_address) {
            return StepResult{"skipped", "facet already added", mark->tx, "", ""};
        }
    }

    const auto& facet_artifact = artifacts_.get(deployment_.node(facet).abi_ref);
    auto selectors = patterns::facet_selectors(facet_artifact, req->exclude);

    auto& wallet = wallet_for(diamond);
    auto calldata = cut_calldata(diamond, "add");
    std::string tx = backend_.call(wallet, abi::Address::parse(diamond_address), calldata,
                                   diamond.name, "add " + facet);
    backend_.route_selectors(abi::Address::parse(diamond_address), selectors,
                             abi::Address::parse(facet_address));

    std::lock_guard<std::mutex> lock(record_mutex_);
    auto& entry = record.entries[diamond.name];
    std::erase_if(entry.cuts, [&](const CutMark& c) { return c.facet == facet; });
    entry.cuts.push_back({facet, facet_address, selectors, tx});
    note_history(record, "cut-add", diamond.name,
                 facet + " (" + std::to_string(selectors.size()) + " selectors)", tx);
    refresh_status(diamond.name, record);
    persist(record);
    return {"executed", "", tx, "",
            hex::encode(std::span<const uint8_t>(calldata.data(), 4))};
}

Orchestrator::StepResult Orchestrator::remove_facet(const NodeInstance& diamond,
                                                    const std::string& facet,
                                                    DeploymentRecord& record) {
    std::string diamond_address;
    std::vector<std::string> routed;
    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        diamond_address = address_of(record, diamond.name);
        const auto& entry = record.entries.at(diamond.name);
        const auto* mark = entry.find_cut(facet);
        if (!mark) {
            throw backend_error("facet '" + facet + "' is not attached to diamond '" +
                                diamond.name + "'");
        }
        routed = mark->selectors;
    }
    auto cut = patterns::plan_facet_removal(facet, routed);

    auto& wallet = wallet_for(diamond);
    auto calldata = cut_calldata(diamond, "remove");
    std::string tx = backend_.call(wallet, abi::Address::parse(diamond_address), calldata,
                                   diamond.name, "remove " + facet);
    backend_.unroute_selectors(abi::Address::parse(diamond_address), cut.selectors);

    std::lock_guard<std::mutex> lock(record_mutex_);
    auto& entry = record.entries[diamond.name];
    std::erase_if(entry.cuts, [&](const CutMark& c) { return c.facet == facet; });
    note_history(record, "cut-remove", diamond.name, facet, tx);
    persist(record);
    return {"executed", "", tx, "",
            hex::encode(std::span<const uint8_t>(calldata.data(), 4))};
}

Orchestrator::StepResult Orchestrator::replace_facet(const NodeInstance& diamond,
                                                     const std::string& facet,
                                                     DeploymentRecord& record) {
    const auto* req = [&]() -> const model::Requirement* {
        for (const auto& r : diamond.requirements) {
            if (r.relation == Relation::UseFacet && r.target == facet) return &r;
        }
        return nullptr;
    }();
    if (!req) throw backend_error("diamond '" + diamond.name + "' has no useFacet '" + facet + "'");

    std::string diamond_address, facet_address;
    std::vector<std::string> routed;
    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        diamond_address = address_of(record, diamond.name);
        facet_address = address_of(record, facet);
        const auto& entry = record.entries.at(diamond.name);
        const auto* mark = entry.find_cut(facet);
        if (!mark) {
            throw backend_error("facet '" + facet + "' is not attached to diamond '" +
                                diamond.name + "'");
        }
        routed = mark->selectors;
    }

    const auto& facet_artifact = artifacts_.get(deployment_.node(facet).abi_ref);
    auto new_selectors = patterns::facet_selectors(facet_artifact, req->exclude);
    auto cuts = patterns::plan_facet_upgrade(facet, routed, new_selectors);

    auto& wallet = wallet_for(diamond);
    auto diamond_addr = abi::Address::parse(diamond_address);
    auto facet_addr = abi::Address::parse(facet_address);
    std::string last_tx;
    std::string last_selector;
    for (const auto& cut : cuts) {
        auto calldata = cut_calldata(diamond, patterns::cut_action_name(cut.action));
        last_selector = hex::encode(std::span<const uint8_t>(calldata.data(), 4));
        last_tx = backend_.call(wallet, diamond_addr, calldata, diamond.name,
                                patterns::cut_action_name(cut.action) + " " + facet);
        switch (cut.action) {
            case patterns::CutAction::Add:
                backend_.route_selectors(diamond_addr, cut.selectors, facet_addr);
                break;
            case patterns::CutAction::Replace:
                backend_.reroute_selectors(diamond_addr, cut.selectors, facet_addr);
                break;
            case patterns::CutAction::Remove:
                backend_.unroute_selectors(diamond_addr, cut.selectors);
                break;
        }
    }

    std::lock_guard<std::mutex> lock(record_mutex_);
    auto& entry = record.entries[diamond.name];
    std::erase_if(entry.cuts, [&](const CutMark& c) { return c.facet == facet; });
    entry.cuts.push_back({facet, facet_address, new_selectors, last_tx});
    note_history(record, "cut-replace", diamond.name, facet, last_tx);
    refresh_status(diamond.name, record);
    persist(record);
    return {"executed", "", last_tx, "", last_selector};
}

nlohmann::ordered_json Orchestrator::offchain_payload(const NodeInstance& node,
                                                      const DeploymentRecord& record) const {
    nlohmann::ordered_json payload;
    payload["node"] = node.name;

    const NodeInstance* network = nullptr;
    if (const auto* net_req = node.first_requirement(Relation::UseNetwork)) {
        network = &deployment_.node(net_req->target);
    } else {
        // Fall back to the network of the first contract this node uses.
        for (const auto& req : node.requirements) {
            if (req.relation != Relation::UseContract) continue;
            const auto& target = deployment_.node(req.target);
            if (const auto* net_req = target.first_requirement(Relation::UseNetwork)) {
                network = &deployment_.node(net_req->target);
                break;
            }
        }
    }
    std::string endpoint;
    if (network) {
        endpoint = network->kind == NodeKind::NodeServiceProvider
                       ? network->url
                       : "http://" + network->host + ":" + std::to_string(network->port);
    }
    payload["endpoint"] = endpoint;

    auto contracts = nlohmann::ordered_json::object();
    for (const auto& req : node.requirements) {
        if (req.relation == Relation::UseContract) {
            contracts[req.target] = address_of(record, req.target);
        }
    }
    payload["contracts"] = std::move(contracts);

    if (const auto* hosted = node.first_requirement(Relation::HostedOn)) {
        payload["hostedOn"] = hosted->target;
    }
    return payload;
}

Orchestrator::StepResult Orchestrator::configure_offchain(const NodeInstance& node,
                                                          DeploymentRecord& record) {
    nlohmann::ordered_json payload;
    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        payload = offchain_payload(node, record);
    }
    std::string text = payload.dump(2) + "\n";
    std::string payload_hash = hex::encode(crypto::keccak256(text));

    // The record stays relocatable: it keeps the payload's file name, the
    // payload itself lands beside the record file.
    std::string file_name = node.name + ".config.json";
    std::filesystem::path dir = options_.config_dir.empty()
                                    ? std::filesystem::path(".")
                                    : std::filesystem::path(options_.config_dir);
    std::string path = (dir / file_name).string();

    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        auto it = record.entries.find(node.name);
        if (it != record.entries.end() && it->second.config_hash == payload_hash &&
            std::filesystem::exists(path)) {
            return StepResult{"skipped", "configuration unchanged", "", "", ""};
        }
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw backend_error("cannot write off-chain config '" + path + "'");
    out << text;
    out.close();

    std::lock_guard<std::mutex> lock(record_mutex_);
    auto& entry = record.entries[node.name];
    entry.status = "wired";
    entry.config_path = file_name;
    entry.config_hash = payload_hash;
    // Actual provisioning is out of scope; the hostedOn target is only noted.
    std::string detail = file_name;
    if (const auto* hosted = node.first_requirement(Relation::HostedOn)) {
        detail += " (hostedOn " + hosted->target + ")";
    }
    note_history(record, "configured", node.name, detail, "");
    persist(record);
    return {"executed", "", "", path, ""};
}

Orchestrator::StepResult Orchestrator::destroy_node(const NodeInstance& node,
                                                    DeploymentRecord& record) {
    std::string address;
    {
        std::lock_guard<std::mutex> lock(record_mutex_);
        auto it = record.entries.find(node.name);
        if (it == record.entries.end() || it->second.address.empty()) {
            throw backend_error("node '" + node.name + "' is not deployed");
        }
        if (it->second.status == "destroyed") {
            throw backend_error("node '" + node.name + "' is already destroyed");
        }
        address = it->second.address;
    }

    const auto& artifact = artifacts_.get(node.abi_ref);
    abi::Address refund = abi::Address::parse(node.refund_address);

    std::vector<abi::Value> args;
    if (const auto* with_refund = artifact.find_function(node.destroy_function, 1);
        with_refund && with_refund->inputs[0].kind == abi::Type::Kind::AddressTy) {
        args.push_back(abi::Value::address_value(refund));
    } else if (!artifact.find_function(node.destroy_function, 0)) {
        throw backend_error("node '" + node.name + "': destroyFunction '" +
                            node.destroy_function + "' is not a () or (address) ABI function");
    }
    auto calldata = linker::encode_function_call(artifact, node.destroy_function, args);

    auto& wallet = wallet_for(node);
    std::string tx =
        backend_.destroy(wallet, abi::Address::parse(address), calldata, node.name, refund);

    std::lock_guard<std::mutex> lock(record_mutex_);
    auto& entry = record.entries[node.name];
    entry.status = "destroyed";
    entry.tx_ids.push_back(tx);
    note_history(record, "destroyed", node.name, "refund=" + node.refund_address, tx);
    persist(record);
    return {"executed", "", tx, "",
            hex::encode(std::span<const uint8_t>(calldata.data(), 4))};
}

Orchestrator::StepResult Orchestrator::run_step(const graph::Step& step,
                                                DeploymentRecord& record, bool force_deploy) {
    const auto& node = deployment_.node(step.node);
    switch (step.kind) {
        case graph::Step::Kind::DeployLibrary:
        case graph::Step::Kind::LinkAndDeploy:
        case graph::Step::Kind::DeployContract:
            return deploy_node(node, record, force_deploy);
        case graph::Step::Kind::CallWire:
            return wire_edge(node, step.target, step.function_name, record);
        case graph::Step::Kind::DiamondCutAdd:
            return add_facet(node, step.target, record);
        case graph::Step::Kind::DiamondCutReplace:
            return replace_facet(node, step.target, record);
        case graph::Step::Kind::DiamondCutRemove:
            return remove_facet(node, step.target, record);
        case graph::Step::Kind::CallDestroy:
            return destroy_node(node, record);
        case graph::Step::Kind::ConfigureOffChain:
            return configure_offchain(node, record);
    }
    throw backend_error("unknown step kind");
}

namespace {

bool is_deploy_step(const graph::Step& step) {
    switch (step.kind) {
        case graph::Step::Kind::DeployLibrary:
        case graph::Step::Kind::LinkAndDeploy:
        case graph::Step::Kind::DeployContract: return true;
        default: return false;
    }
}

}  // namespace

ExecutionReport Orchestrator::run_layers(const std::vector<std::vector<graph::Step>>& layers,
                                         DeploymentRecord& record, bool force_deploy,
                                         std::vector<std::string> initial_warnings) {
    ExecutionReport report;
    report.warnings = std::move(initial_warnings);

    auto endpoint = backend_.check_endpoint();  // throws when unreachable
    report.warnings.push_back("endpoint: " + backend_.name() + ", chain id " +
                              std::to_string(endpoint.chain_id));

    record.model_hash = options_.model_hash;

    for (const auto& layer : layers) {
        std::vector<StepOutcome> outcomes(layer.size());
        auto execute_one = [&](size_t i) {
            auto start = std::chrono::steady_clock::now();
            StepOutcome& outcome = outcomes[i];
            outcome.step = layer[i];
            try {
                auto result = run_step(layer[i], record, force_deploy);
                outcome.status = result.status;
                outcome.detail = result.detail;
                outcome.tx = result.tx;
                outcome.address = result.address;
                outcome.selector = result.selector;
            } catch (const Error& e) {
                outcome.status = "failed";
                outcome.detail = e.what();
            } catch (const std::exception& e) {
                outcome.status = "failed";
                outcome.detail = e.what();
            }
            outcome.duration_ms = std::chrono::duration<double, std::milli>(
                                      std::chrono::steady_clock::now() - start)
                                      .count();
        };

        if (options_.parallel && layer.size() > 1) {
            std::vector<std::thread> workers;
            workers.reserve(layer.size());
            for (size_t i = 0; i < layer.size(); ++i) workers.emplace_back(execute_one, i);
            for (auto& w : workers) w.join();
        } else {
            for (size_t i = 0; i < layer.size(); ++i) {
                execute_one(i);
                if (outcomes[i].status == "failed") break;
            }
        }

        for (auto& outcome : outcomes) {
            if (outcome.status.empty()) continue;  // not reached after a halt
            ++report.attempted;
            if (outcome.status == "executed") {
                ++report.executed;
                if (is_deploy_step(outcome.step)) {
                    report.op_sequence.emplace_back(outcome.step.node, "deploy");
                } else if (!outcome.selector.empty()) {
                    report.op_sequence.emplace_back(outcome.step.node, "0x" + outcome.selector);
                } else {
                    report.op_sequence.emplace_back(outcome.step.node, outcome.step.kind_name());
                }
            } else if (outcome.status == "skipped") {
                ++report.skipped;
            } else {
                ++report.failed;
                if (report.error.empty()) {
                    report.error = "step " + outcome.step.kind_name() + " '" +
                                   outcome.step.node + "': " + outcome.detail;
                }
            }
            report.steps.push_back(std::move(outcome));
        }
        if (report.failed > 0) break;  // halt; the record holds the completed prefix
    }
    persist(record);
    return report;
}

ExecutionReport Orchestrator::execute_deploy(const graph::DeploymentPlan& plan,
                                             DeploymentRecord& record) {
    return run_layers(plan.layers, record, /*force_deploy=*/false, plan.warnings);
}

ExecutionReport Orchestrator::execute_upgrade(const graph::UpgradePlan& plan,
                                              DeploymentRecord& record) {
    // Redeploys run one node per layer in dependency order; the fresh nodes'
    // own wiring obligations follow, then wire calls / cuts / configs for
    // dependents that stay in place.
    std::vector<std::vector<graph::Step>> layers;
    std::set<std::string> redeployed(plan.redeploy_set.begin(), plan.redeploy_set.end());

    for (const auto& name : plan.redeploy_set) {
        const auto& node = deployment_.node(name);
        graph::Step step;
        step.node = name;
        if (!node.requirements_of(Relation::UseLibrary).empty()) {
            step.kind = graph::Step::Kind::LinkAndDeploy;
        } else if (node.kind == NodeKind::Library) {
            step.kind = graph::Step::Kind::DeployLibrary;
        } else {
            step.kind = graph::Step::Kind::DeployContract;
        }
        layers.push_back({step});
    }

    std::vector<graph::Step> rewires;
    for (const auto& name : plan.redeploy_set) {
        for (const auto* edge : graph_.edges_from(name)) {
            if (edge->kind == graph::EdgeKind::LazyCC) {
                rewires.push_back(
                    {graph::Step::Kind::CallWire, name, edge->target, edge->function_name});
            } else if (edge->kind == graph::EdgeKind::Facet) {
                rewires.push_back({graph::Step::Kind::DiamondCutAdd, name, edge->target, ""});
            }
        }
    }
    std::sort(rewires.begin(), rewires.end());
    if (!rewires.empty()) layers.push_back(std::move(rewires));

    if (!plan.wire_calls.empty()) layers.push_back(plan.wire_calls);
    if (!plan.facet_cuts.empty()) layers.push_back(plan.facet_cuts);
    if (!plan.offchain_updates.empty()) layers.push_back(plan.offchain_updates);

    return run_layers(layers, record, /*force_deploy=*/true, {});
}

ExecutionReport Orchestrator::execute_destroy(const std::vector<graph::Step>& steps,
                                              DeploymentRecord& record) {
    std::vector<std::vector<graph::Step>> layers;
    for (const auto& step : steps) layers.push_back({step});
    return run_layers(layers, record, /*force_deploy=*/false, {});
}

}  // namespace katena::orch
