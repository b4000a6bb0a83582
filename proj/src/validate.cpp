#include "katena/errors.hpp"
#include "katena/graph.hpp"
#include "katena/hex.hpp"
#include "katena/linker.hpp"
#include "katena/model.hpp"
#include "katena/patterns.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace katena::model {

namespace {

struct Collector {
    std::vector<Violation> violations;
    std::vector<Violation> warnings;

    void violation(std::string code, std::string message, std::vector<std::string> nodes) {
        violations.push_back({std::move(code), std::move(message), std::move(nodes)});
    }
    void warning(std::string code, std::string message, std::vector<std::string> nodes) {
        warnings.push_back({std::move(code), std::move(message), std::move(nodes)});
    }
};

bool address_format_ok(const std::string& text) {
    std::string_view body = hex::strip_prefix(text);
    if (!text.starts_with("0x") && !text.starts_with("0X")) return false;
    return body.size() == 40 && hex::is_hex(body) && abi::checksum_ok(text);
}

void check_requirements(const DeploymentModel& model, Collector& out) {
    for (const auto& [name, node] : model.nodes) {
        for (const auto& req : node.requirements) {
            const auto* target = model.find(req.target);
            if (!target) continue;  // parse already rejects dangling targets
            if (!relation_allowed(node.kind, req.relation, target->kind)) {
                out.violation("illegal-relation",
                              "node '" + name + "' (" + kind_name(node.kind) + ") may not use " +
                                  relation_name(req.relation) + " towards '" + req.target +
                                  "' (" + kind_name(target->kind) + ")",
                              {name, req.target});
                continue;
            }
            bool lazy_setter = (req.relation == Relation::UseContract ||
                                req.relation == Relation::UseReference) &&
                               is_contract_kind(node.kind);
            if (lazy_setter && req.function_name.empty()) {
                out.violation("missing-function-name",
                              "node '" + name + "': " + relation_name(req.relation) +
                                  " towards '" + req.target + "' needs a functionName",
                              {name});
            }
            if (node.kind == NodeKind::OffChainComponent &&
                req.relation == Relation::UseContract && !req.function_name.empty()) {
                out.warning("ignored-function-name",
                            "node '" + name + "': functionName on an off-chain useContract " +
                                "has no effect",
                            {name});
            }
            for (const auto& ex : req.exclude) {
                if (ex.empty() ||
                    ex.find_first_of(" \t(),") != std::string::npos) {
                    out.violation("bad-exclude-entry",
                                  "node '" + name + "': exclude entry '" + ex +
                                      "' is not a function name",
                                  {name});
                }
            }
        }
    }
}

void check_multiplicities(const DeploymentModel& model, Collector& out) {
    for (const auto& [name, node] : model.nodes) {
        auto count = [&node](Relation r) { return node.requirements_of(r).size(); };
        if (is_onchain_kind(node.kind)) {
            if (count(Relation::UseNetwork) != 1) {
                out.violation("network-multiplicity",
                              "node '" + name + "' must declare exactly one useNetwork",
                              {name});
            }
            if (count(Relation::UseWallet) != 1) {
                out.violation("wallet-multiplicity",
                              "node '" + name + "' must declare exactly one useWallet", {name});
            }
        }
        if (node.kind == NodeKind::Proxy && count(Relation::Implementation) != 1) {
            out.violation("implementation-multiplicity",
                          "proxy '" + name + "' must declare exactly one implementation",
                          {name});
        }
        if (node.kind == NodeKind::Diamond) {
            if (count(Relation::UseCut) != 1) {
                out.violation("cut-multiplicity",
                              "diamond '" + name + "' must declare exactly one useCut", {name});
            }
            if (count(Relation::UseInit) > 1) {
                out.violation("init-multiplicity",
                              "diamond '" + name + "' declares more than one useInit", {name});
            }
        }
        if (node.kind == NodeKind::OffChainComponent) {
            size_t hosted = count(Relation::HostedOn);
            if (hosted > 1) {
                out.violation("hostedon-multiplicity",
                              "off-chain node '" + name + "' declares more than one hostedOn",
                              {name});
            } else if (hosted == 0) {
                out.warning("missing-hostedon",
                            "off-chain node '" + name + "' declares no hostedOn target; " +
                                "only its configuration payload will be emitted",
                            {name});
            }
        }
        if (node.kind == NodeKind::Server && count(Relation::UseCredentials) != 1) {
            out.violation("credentials-multiplicity",
                          "server '" + name + "' must declare exactly one useCredentials",
                          {name});
        }
    }
}

void check_properties(const DeploymentModel& model, Collector& out) {
    for (const auto& [name, node] : model.nodes) {
        switch (node.kind) {
            case NodeKind::SelfHostedNode:
                if (node.host.empty()) {
                    out.violation("missing-host", "network '" + name + "' has no host", {name});
                }
                if (node.port < 1 || node.port > 65535) {
                    out.violation("bad-port",
                                  "network '" + name + "' port " + std::to_string(node.port) +
                                      " is outside [1, 65535]",
                                  {name});
                }
                break;
            case NodeKind::NodeServiceProvider:
                if (node.url.empty() ||
                    (!node.url.starts_with("http://") && !node.url.starts_with("https://"))) {
                    out.violation("bad-url",
                                  "provider '" + name + "' needs a well-formed http(s) url",
                                  {name});
                }
                if (!node.secret.present()) {
                    out.violation("missing-secret",
                                  "provider '" + name + "' declares no access secret", {name});
                }
                break;
            case NodeKind::Wallet:
                if (!node.private_key.present()) {
                    out.violation("missing-private-key",
                                  "wallet '" + name + "' declares no privateKey", {name});
                }
                if (!node.public_key.empty() && !address_format_ok(node.public_key)) {
                    out.violation("bad-public-key",
                                  "wallet '" + name + "' publicKey is not a valid address",
                                  {name});
                }
                break;
            case NodeKind::SmartContractReference:
                if (node.address.empty() || !address_format_ok(node.address)) {
                    out.violation("bad-reference-address",
                                  "reference '" + name +
                                      "' needs a checksummed or lowercase 0x address",
                                  {name});
                }
                break;
            case NodeKind::Credential:
                if (!node.ssh_key.present()) {
                    out.violation("missing-ssh-key",
                                  "credential '" + name + "' declares no sshKey", {name});
                }
                break;
            default: break;
        }

        if (is_onchain_kind(node.kind) && node.abi_ref.empty()) {
            out.violation("missing-abi", "node '" + name + "' declares no abi artifact", {name});
        }
        if (node.kind == NodeKind::Library) {
            if (!node.parameters.empty()) {
                out.violation("library-parameters",
                              "library '" + name + "' cannot take constructor parameters",
                              {name});
            }
            if (!node.destroy_function.empty()) {
                out.violation("library-destroy",
                              "library '" + name + "' cannot be destroyed", {name});
            }
        }
        if (!node.destroy_function.empty() && node.refund_address.empty()) {
            out.violation("destroy-without-refund",
                          "node '" + name + "' defines destroyFunction '" +
                              node.destroy_function + "' but no refundAddress",
                          {name});
        }
        if (!node.refund_address.empty() && !address_format_ok(node.refund_address)) {
            out.violation("bad-refund-address",
                          "node '" + name + "' refundAddress is not a valid address", {name});
        }

        auto warn_inline = [&](const SecretRef& secret, const char* what) {
            if (secret.source == SecretRef::Source::Inline) {
                out.warning("inline-secret",
                            "node '" + name + "' inlines its " + std::string(what) +
                                "; prefer { get_input: KEY } or { env: VAR }",
                            {name});
            }
        };
        warn_inline(node.private_key, "privateKey");
        warn_inline(node.ssh_key, "sshKey");
        warn_inline(node.secret, "provider secret");
    }
}

void check_cycles(const DeploymentModel& model, Collector& out) {
    auto dependency_graph = graph::build_dependency_graph(model);
    for (const auto& cycle : graph::detect_hard_cycles(dependency_graph)) {
        std::string names = "{";
        for (size_t i = 0; i < cycle.size(); ++i) {
            if (i > 0) names += ",";
            names += cycle[i];
        }
        names += "}";
        out.violation("constructor-cycle", "constructor cycle " + names, cycle);
    }
}

std::vector<abi::Address> dry_run_refs(const NodeInstance& node) {
    // Constructor references in declaration order; addresses are unknown at
    // validation time, the zero address stands in.
    std::vector<abi::Address> refs;
    for (const auto& req : node.requirements) {
        switch (req.relation) {
            case Relation::Implementation:
            case Relation::UseCut:
            case Relation::UseContractInConstructor:
            case Relation::UseReferenceInConstructor:
                refs.emplace_back();
                break;
            default: break;
        }
    }
    return refs;
}

void check_artifacts(const DeploymentModel& model, const ArtifactStore& artifacts,
                     Collector& out) {
    for (const auto& [name, node] : model.nodes) {
        if (!is_onchain_kind(node.kind) || node.abi_ref.empty()) continue;
        const ContractArtifact* artifact = nullptr;
        try {
            artifact = &artifacts.get(node.abi_ref);
        } catch (const Error& e) {
            out.violation("artifact-unloadable", "node '" + name + "': " + e.what(), {name});
            continue;
        }

        if (node.kind == NodeKind::Library) {
            if (artifact->has_constructor && !artifact->constructor_inputs.empty()) {
                out.violation("library-constructor",
                              "library '" + name + "' artifact declares a constructor with " +
                                  "parameters",
                              {name});
            }
        } else {
            try {
                linker::bind_constructor(*artifact, dry_run_refs(node), node.parameters);
            } catch (const Error& e) {
                out.violation("constructor-binding", "node '" + name + "': " + e.what(), {name});
            }
        }

        try {
            linker::resolve_placeholders(node, *artifact, model, artifacts);
        } catch (const Error& e) {
            out.violation("unlinkable-bytecode", "node '" + name + "': " + e.what(), {name});
        }

        if (!node.destroy_function.empty()) {
            auto named = artifact->functions_named(node.destroy_function);
            bool usable = false;
            for (const auto* fn : named) {
                if (fn->inputs.empty() ||
                    (fn->inputs.size() == 1 &&
                     fn->inputs[0].kind == abi::Type::Kind::AddressTy)) {
                    usable = true;
                }
            }
            if (!usable) {
                out.violation("bad-destroy-function",
                              "node '" + name + "': destroyFunction '" + node.destroy_function +
                                  "' is not a () or (address) function of its ABI",
                              {name});
            }
        }

        for (const auto& req : node.requirements) {
            bool lazy_setter = (req.relation == Relation::UseContract ||
                                req.relation == Relation::UseReference) &&
                               is_contract_kind(node.kind);
            if (!lazy_setter || req.function_name.empty()) continue;
            const auto* fn = artifact->find_function(req.function_name, 1);
            if (!fn) {
                out.violation("missing-setter",
                              "node '" + name + "': setter '" + req.function_name +
                                  "(address)' not found in its ABI",
                              {name});
            } else if (fn->inputs[0].kind != abi::Type::Kind::AddressTy) {
                out.violation("setter-not-address",
                              "node '" + name + "': setter '" + req.function_name +
                                  "' does not take a single address",
                              {name});
            }
        }
    }

    for (const auto& [name, node] : model.nodes) {
        if (node.kind != NodeKind::Diamond) continue;
        try {
            auto wiring = patterns::plan_diamond_wiring(node, model, artifacts);
            for (const auto& w : wiring.warnings) {
                out.warning("diamond-wiring", "diamond '" + name + "': " + w, {name});
            }
        } catch (const Error& e) {
            out.violation("diamond-wiring", e.what(), {name});
        }
        const auto* cut_req = node.first_requirement(Relation::UseCut);
        if (cut_req) {
            const auto* cut_node = model.find(cut_req->target);
            if (cut_node && !cut_node->abi_ref.empty()) {
                try {
                    patterns::cut_call_descriptor(artifacts.get(cut_node->abi_ref));
                } catch (const Error& e) {
                    out.violation("bad-cut-artifact",
                                  "diamond '" + name + "': " + e.what(), {name, cut_req->target});
                }
            }
        }
    }

    for (const auto& [name, node] : model.nodes) {
        if (node.kind != NodeKind::Proxy || node.abi_ref.empty()) continue;
        try {
            patterns::wire_proxy(node, artifacts.get(node.abi_ref));
        } catch (const Error& e) {
            out.warning("proxy-upgrade-function",
                        std::string(e.what()) + "; upgrades of its implementation will fail",
                        {name});
        }
    }
}

void sort_report(std::vector<Violation>& entries) {
    std::sort(entries.begin(), entries.end(), [](const Violation& a, const Violation& b) {
        return std::tie(a.code, a.nodes, a.message) < std::tie(b.code, b.nodes, b.message);
    });
}

}  // namespace

nlohmann::ordered_json ValidationReport::to_json() const {
    nlohmann::ordered_json j;
    auto dump = [](const std::vector<Violation>& entries) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& v : entries) {
            nlohmann::ordered_json e;
            e["code"] = v.code;
            e["message"] = v.message;
            e["nodes"] = v.nodes;
            arr.push_back(std::move(e));
        }
        return arr;
    };
    j["violations"] = dump(violations);
    j["warnings"] = dump(warnings);
    return j;
}

ValidationReport validate_model(const DeploymentModel& model, const ArtifactStore* artifacts) {
    Collector out;
    check_requirements(model, out);
    check_multiplicities(model, out);
    check_properties(model, out);
    check_cycles(model, out);
    if (artifacts) check_artifacts(model, *artifacts, out);

    ValidationReport report;
    report.violations = std::move(out.violations);
    report.warnings = std::move(out.warnings);
    sort_report(report.violations);
    sort_report(report.warnings);
    return report;
}

}  // namespace katena::model
