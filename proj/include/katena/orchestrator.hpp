#pragma once

#include "katena/chain.hpp"
#include "katena/graph.hpp"
#include "katena/model.hpp"
#include "katena/record.hpp"

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace katena::orch {

struct ExecutionOptions {
    std::string record_path;
    std::string config_dir;  // off-chain payloads land beside the record
    std::string model_hash;
    bool parallel = false;  // run steps of one layer concurrently (forfeits
                            // mock address determinism)
};

struct StepOutcome {
    graph::Step step;
    std::string status;  // "executed" | "skipped" | "failed"
    std::string detail;
    std::string tx;
    std::string address;
    std::string selector;
    double duration_ms = 0.0;
};

struct ExecutionReport {
    size_t attempted = 0;
    size_t executed = 0;
    size_t skipped = 0;
    size_t failed = 0;
    std::string error;  // first failure
    std::vector<StepOutcome> steps;
    // Ordered backend-visible operations as (node role, "deploy" or selector);
    // identical across backends for the same plan.
    std::vector<std::pair<std::string, std::string>> op_sequence;
    std::vector<std::string> warnings;

    bool ok() const { return failed == 0; }
    nlohmann::ordered_json to_json() const;
};

// Executes plans against a backend while keeping the record consistent: the
// record is persisted after every step, execution halts at the first error.
class Orchestrator {
public:
    Orchestrator(const model::DeploymentModel& deployment, const model::ArtifactStore& artifacts,
                 chain::ChainBackend& backend, std::map<std::string, std::string> secrets,
                 ExecutionOptions options);

    ExecutionReport execute_deploy(const graph::DeploymentPlan& plan, DeploymentRecord& record);
    ExecutionReport execute_upgrade(const graph::UpgradePlan& plan, DeploymentRecord& record);
    ExecutionReport execute_destroy(const std::vector<graph::Step>& steps,
                                    DeploymentRecord& record);

    // Configuration payload for one off-chain node: endpoint plus the
    // addresses of every contract it uses.
    nlohmann::ordered_json offchain_payload(const model::NodeInstance& node,
                                            const DeploymentRecord& record) const;

private:
    struct StepResult {
        std::string status;
        std::string detail;
        std::string tx;
        std::string address;
        std::string selector;  // 8 hex chars for call-shaped steps
    };

    const model::DeploymentModel& deployment_;
    const model::ArtifactStore& artifacts_;
    chain::ChainBackend& backend_;
    std::map<std::string, std::string> secrets_;
    ExecutionOptions options_;
    graph::DependencyGraph graph_;
    std::map<std::string, chain::Wallet> wallet_cache_;
    std::mutex record_mutex_;

    chain::Wallet& wallet_for(const model::NodeInstance& node);
    std::string address_of(const DeploymentRecord& record, const std::string& node_name) const;
    std::vector<abi::Address> constructor_refs(const model::NodeInstance& node,
                                               const DeploymentRecord& record) const;
    std::pair<std::vector<uint8_t>, std::string> build_deploy_payload(
        const model::NodeInstance& node, const DeploymentRecord& record) const;

    StepResult run_step(const graph::Step& step, DeploymentRecord& record, bool force_deploy);
    StepResult deploy_node(const model::NodeInstance& node, DeploymentRecord& record, bool force);
    StepResult wire_edge(const model::NodeInstance& source, const std::string& target,
                         const std::string& function_name, DeploymentRecord& record);
    StepResult add_facet(const model::NodeInstance& diamond, const std::string& facet,
                         DeploymentRecord& record);
    StepResult remove_facet(const model::NodeInstance& diamond, const std::string& facet,
                            DeploymentRecord& record);
    StepResult replace_facet(const model::NodeInstance& diamond, const std::string& facet,
                             DeploymentRecord& record);
    StepResult configure_offchain(const model::NodeInstance& node, DeploymentRecord& record);
    StepResult destroy_node(const model::NodeInstance& node, DeploymentRecord& record);

    std::vector<uint8_t> cut_calldata(const model::NodeInstance& diamond,
                                      const std::string& action_display);
    void refresh_status(const std::string& node_name, DeploymentRecord& record);
    void note_history(DeploymentRecord& record, const std::string& event,
                      const std::string& node, const std::string& detail, const std::string& tx);
    void persist(const DeploymentRecord& record);

    ExecutionReport run_layers(const std::vector<std::vector<graph::Step>>& layers,
                               DeploymentRecord& record, bool force_deploy,
                               std::vector<std::string> initial_warnings);
};

}  // namespace katena::orch
