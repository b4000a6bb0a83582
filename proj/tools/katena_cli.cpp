// katena CLI: thin shell over the C API in katena.h.
//
// Exit codes: 0 ok, 1 validation failure, 2 plan error (cycles, bad targets),
// 3 backend error (record keeps the completed prefix), 4 usage error.

#include <katena.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>

namespace {

using nlohmann::json;

struct GlobalOptions {
    std::string model;
    std::string inputs;
    std::string secrets;
    std::string artifacts;
    std::string backend = "mock";
    std::string rpc_url;
    std::string record;
    bool parallel = false;
    bool json_output = false;
    unsigned long long gas_price = 1'000'000'000ULL;
    unsigned long long gas_limit = 8'000'000ULL;
};

std::string options_json(const GlobalOptions& g) {
    json j;
    if (!g.inputs.empty()) j["inputs"] = g.inputs;
    if (!g.secrets.empty()) j["secrets"] = g.secrets;
    if (!g.artifacts.empty()) j["artifacts"] = g.artifacts;
    j["backend"] = g.backend;
    if (!g.rpc_url.empty()) j["rpc_url"] = g.rpc_url;
    if (!g.record.empty()) j["record"] = g.record;
    j["parallel"] = g.parallel;
    j["gas_price"] = g.gas_price;
    j["gas_limit"] = g.gas_limit;
    return j.dump();
}

struct ProjectHandle {
    katena_project* project = nullptr;
    ~ProjectHandle() { katena_close(project); }
};

int open_project(const GlobalOptions& g, ProjectHandle& handle) {
    if (g.model.empty()) {
        std::cerr << "error: --model PATH is required\n";
        return KATENA_ERR_USAGE;
    }
    katena_status status = katena_open(g.model.c_str(), options_json(g).c_str(),
                                       &handle.project);
    if (status != KATENA_OK) {
        std::cerr << "error: " << katena_last_error() << "\n";
    }
    return status;
}

struct OwnedString {
    char* str = nullptr;
    ~OwnedString() { katena_string_free(str); }
};

void print_validate(const std::string& report_text, bool as_json) {
    if (as_json) {
        std::cout << report_text;
        return;
    }
    auto doc = json::parse(report_text);
    const auto& violations = doc["violations"];
    const auto& warnings = doc["warnings"];
    for (const auto& v : violations) {
        std::cout << "violation [" << v.value("code", "") << "] " << v.value("message", "")
                  << "\n";
    }
    for (const auto& w : warnings) {
        std::cout << "warning   [" << w.value("code", "") << "] " << w.value("message", "")
                  << "\n";
    }
    if (violations.empty()) {
        std::cout << "model ok (" << warnings.size() << " warning(s))\n";
    } else {
        std::cout << violations.size() << " violation(s), " << warnings.size()
                  << " warning(s)\n";
    }
}

void print_report(const std::string& report_text, bool as_json) {
    if (as_json) {
        std::cout << report_text;
        return;
    }
    auto doc = json::parse(report_text);
    for (const auto& s : doc["steps"]) {
        std::cout << s.value("status", "") << "  " << s.value("step", "") << " "
                  << s.value("node", "");
        if (s.contains("target")) std::cout << " -> " << s["target"].get<std::string>();
        if (s.contains("address")) std::cout << "  @ " << s["address"].get<std::string>();
        if (s.contains("detail")) std::cout << "  (" << s["detail"].get<std::string>() << ")";
        std::cout << "\n";
    }
    std::cout << doc.value("executed", 0) << " executed, " << doc.value("skipped", 0)
              << " skipped, " << doc.value("failed", 0) << " failed\n";
    if (!doc.value("error", std::string()).empty()) {
        std::cout << "halted: " << doc["error"].get<std::string>() << "\n";
    }
    std::cout << "record: " << doc.value("recordPath", "") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"katena - declarative deployment of EVM-style applications"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--model", g.model, "application model YAML");
    app.add_option("--inputs", g.inputs, "inputs YAML (resolves get_input)");
    app.add_option("--secrets", g.secrets, "secrets YAML (or env KATENA_SECRETS)");
    app.add_option("--artifacts", g.artifacts, "artifact directory (default: model dir)");
    app.add_option("--backend", g.backend, "mock | rpc")->check(CLI::IsMember({"mock", "rpc"}));
    app.add_option("--rpc-url", g.rpc_url, "JSON-RPC endpoint override");
    app.add_option("--record", g.record, "record file (default: <model>.katena-state.json)");
    app.add_option("--gas-price", g.gas_price, "gas price in wei (rpc backend)");
    app.add_option("--gas-limit", g.gas_limit, "gas limit (rpc backend)");
    app.add_flag("--parallel", g.parallel,
                 "run independent steps concurrently (mock addresses stop being deterministic)");
    app.add_flag("--json", g.json_output, "machine-readable JSON output");

    auto* cmd_validate = app.add_subcommand("validate", "check the model against its constraints");
    auto* cmd_plan = app.add_subcommand("plan", "print the deployment plan as canonical JSON");
    auto* cmd_deploy = app.add_subcommand("deploy", "execute the deployment plan");

    std::string upgrade_node;
    auto* cmd_upgrade = app.add_subcommand("upgrade", "redeploy a node and its hard dependents");
    cmd_upgrade->add_option("node", upgrade_node, "node to upgrade")->required();
    bool plan_only_upgrade = false;
    cmd_upgrade->add_flag("--plan-only", plan_only_upgrade, "print the upgrade plan, no execution");

    std::string destroy_node_name;
    auto* cmd_destroy = app.add_subcommand("destroy", "destroy a node via its destroyFunction");
    cmd_destroy->add_option("node", destroy_node_name, "node to destroy")->required();
    bool plan_only_destroy = false;
    cmd_destroy->add_flag("--plan-only", plan_only_destroy, "print the destroy plan, no execution");

    auto* cmd_record = app.add_subcommand("record", "deployment record operations");
    auto* cmd_record_show = cmd_record->add_subcommand("show", "print the record JSON");
    cmd_record->require_subcommand(1);

    auto* cmd_metrics = app.add_subcommand("metrics", "evaluation utilities");
    std::string not_file;
    std::string not_lang = "yaml";
    auto* cmd_metrics_not = cmd_metrics->add_subcommand("not", "Number-of-Tokens counter");
    cmd_metrics_not->add_option("file", not_file, "file to measure")->required();
    cmd_metrics_not->add_option("--lang", not_lang, "yaml | js")
        ->check(CLI::IsMember({"yaml", "js"}));
    cmd_metrics->require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : KATENA_ERR_USAGE;
    }

    if (cmd_metrics_not->parsed()) {
        unsigned long long tokens = 0;
        katena_status status = katena_count_tokens_file(not_file.c_str(), not_lang.c_str(),
                                                        &tokens);
        if (status != KATENA_OK) {
            std::cerr << "error: " << katena_last_error() << "\n";
            return status;
        }
        if (g.json_output) {
            json j{{"file", not_file}, {"language", not_lang}, {"tokens", tokens}};
            std::cout << j.dump(2) << "\n";
        } else {
            std::cout << not_file << ": " << tokens << " tokens (" << not_lang << ")\n";
        }
        return KATENA_OK;
    }

    ProjectHandle handle;
    if (int status = open_project(g, handle); status != KATENA_OK) return status;

    OwnedString out;
    katena_status status = KATENA_OK;

    if (cmd_validate->parsed()) {
        status = katena_validate(handle.project, &out.str);
        if (out.str) print_validate(out.str, g.json_output);
        if (status != KATENA_OK && !out.str) std::cerr << "error: " << katena_last_error() << "\n";
        return status;
    }
    if (cmd_plan->parsed()) {
        status = katena_plan(handle.project, &out.str);
        if (status == KATENA_OK) {
            std::cout << out.str;
        } else {
            std::cerr << "error: " << katena_last_error() << "\n";
        }
        return status;
    }
    if (cmd_deploy->parsed()) {
        status = katena_deploy(handle.project, &out.str);
        if (out.str) print_report(out.str, g.json_output);
        if (status != KATENA_OK && !out.str) std::cerr << "error: " << katena_last_error() << "\n";
        return status;
    }
    if (cmd_upgrade->parsed()) {
        status = plan_only_upgrade
                     ? katena_plan_upgrade(handle.project, upgrade_node.c_str(), &out.str)
                     : katena_upgrade(handle.project, upgrade_node.c_str(), &out.str);
        if (status == KATENA_OK || out.str) {
            if (plan_only_upgrade) {
                std::cout << (out.str ? out.str : "");
            } else if (out.str) {
                print_report(out.str, g.json_output);
            }
        }
        if (status != KATENA_OK && !out.str) std::cerr << "error: " << katena_last_error() << "\n";
        return status;
    }
    if (cmd_destroy->parsed()) {
        status = plan_only_destroy
                     ? katena_plan_destroy(handle.project, destroy_node_name.c_str(), &out.str)
                     : katena_destroy_node(handle.project, destroy_node_name.c_str(), &out.str);
        if (status == KATENA_OK || out.str) {
            if (plan_only_destroy) {
                std::cout << (out.str ? out.str : "");
            } else if (out.str) {
                print_report(out.str, g.json_output);
            }
        }
        if (status != KATENA_OK && !out.str) std::cerr << "error: " << katena_last_error() << "\n";
        return status;
    }
    if (cmd_record_show->parsed()) {
        status = katena_record_show(handle.project, &out.str);
        if (status == KATENA_OK) {
            std::cout << out.str;
        } else {
            std::cerr << "error: " << katena_last_error() << "\n";
        }
        return status;
    }

    std::cerr << "error: no command\n";
    return KATENA_ERR_USAGE;
}
