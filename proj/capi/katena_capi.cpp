#include "katena.h"

#include "katena/chain.hpp"
#include "katena/errors.hpp"
#include "katena/graph.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"
#include "katena/model.hpp"
#include "katena/notcount.hpp"
#include "katena/orchestrator.hpp"
#include "katena/record.hpp"
#include "katena/rpc.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <sstream>

using nlohmann::json;

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void set_output(char** out, const std::string& value) {
    if (out) *out = dup_string(value);
}

katena_status status_of(const katena::Error& e) {
    switch (e.code()) {
        case katena::ErrorCode::Validation: return KATENA_ERR_VALIDATION;
        case katena::ErrorCode::Plan: return KATENA_ERR_PLAN;
        case katena::ErrorCode::Backend: return KATENA_ERR_BACKEND;
        case katena::ErrorCode::Usage: return KATENA_ERR_USAGE;
    }
    return KATENA_ERR_USAGE;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw katena::usage_error("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct ProjectOptions {
    std::string inputs_path;
    std::string secrets_path;
    std::string artifacts_dir;
    std::string backend = "mock";
    std::string rpc_url;
    std::string record_path;
    std::string auth_scheme = "bearer";
    bool parallel = false;
    uint64_t gas_price = 1'000'000'000;
    uint64_t gas_limit = 8'000'000;
};

}  // namespace

struct katena_project {
    std::string model_path;
    std::string model_text;
    std::string model_hash;
    ProjectOptions options;
    katena::model::DeploymentModel model;
    std::unique_ptr<katena::model::ArtifactStore> artifacts;
    std::map<std::string, std::string> secrets;

    std::string mock_state_path() const {
        std::filesystem::path p(options.record_path);
        auto stem = p.filename().string();
        const std::string suffix = ".katena-state.json";
        if (stem.size() > suffix.size() && stem.ends_with(suffix)) {
            stem = stem.substr(0, stem.size() - suffix.size());
        }
        return (p.parent_path() / (stem + ".katena-mock.json")).string();
    }

    std::unique_ptr<katena::chain::ChainBackend> make_backend() const {
        if (options.backend == "mock") {
            auto path = mock_state_path();
            if (std::filesystem::exists(path)) {
                return katena::chain::MockChain::from_json(json::parse(read_file(path)));
            }
            return std::make_unique<katena::chain::MockChain>();
        }
        if (options.backend != "rpc") {
            throw katena::usage_error("unknown backend '" + options.backend + "'");
        }
        katena::chain::RpcOptions rpc;
        rpc.gas_price = options.gas_price;
        rpc.gas_limit = options.gas_limit;
        rpc.auth_scheme = options.auth_scheme;
        rpc.url = options.rpc_url;
        const auto* network = model.sole_network();
        if (network) {
            rpc.expected_chain_id = network->expected_chain_id;
            if (rpc.url.empty()) {
                rpc.url = network->kind == katena::model::NodeKind::NodeServiceProvider
                              ? network->url
                              : "http://" + network->host + ":" + std::to_string(network->port);
            }
            if (network->secret.present()) {
                using Source = katena::model::SecretRef::Source;
                switch (network->secret.source) {
                    case Source::Inline: rpc.auth_secret = network->secret.value; break;
                    case Source::Input: {
                        auto it = secrets.find(network->secret.value);
                        if (it != secrets.end()) rpc.auth_secret = it->second;
                        break;
                    }
                    case Source::Env: {
                        const char* v = std::getenv(network->secret.value.c_str());
                        if (v) rpc.auth_secret = v;
                        break;
                    }
                    case Source::None: break;
                }
            }
        }
        if (rpc.url.empty()) {
            throw katena::usage_error(
                "rpc backend needs --rpc-url or a network node with host/port or url");
        }
        return std::make_unique<katena::chain::RpcBackend>(std::move(rpc));
    }

    void save_mock_state(katena::chain::ChainBackend& backend) const {
        if (options.backend != "mock") return;
        auto* mock = dynamic_cast<katena::chain::MockChain*>(&backend);
        if (!mock) return;
        std::ofstream out(mock_state_path(), std::ios::binary | std::ios::trunc);
        if (out) out << mock->to_json().dump(2) << "\n";
    }

    katena::orch::ExecutionOptions exec_options() const {
        katena::orch::ExecutionOptions opts;
        opts.record_path = options.record_path;
        opts.config_dir = std::filesystem::path(options.record_path).parent_path().string();
        opts.model_hash = model_hash;
        opts.parallel = options.parallel;
        return opts;
    }

    katena::model::ValidationReport require_valid() const {
        auto report = katena::model::validate_model(model, artifacts.get());
        if (!report.ok()) {
            throw katena::validation_error("model has " +
                                           std::to_string(report.violations.size()) +
                                           " validation violation(s); run validate");
        }
        return report;
    }
};

namespace {

template <typename Fn>
katena_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const katena::Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return KATENA_ERR_USAGE;
    }
}

katena_status run_execution(katena_project* project, char** out_report_json, bool need_record,
                            const std::function<katena::orch::ExecutionReport(
                                katena::orch::Orchestrator&, katena::orch::DeploymentRecord&)>& run) {
    project->require_valid();

    auto existing = katena::orch::DeploymentRecord::load(project->options.record_path);
    if (need_record && !existing) {
        throw katena::usage_error("no deployment record at '" + project->options.record_path +
                                  "'; deploy first");
    }
    katena::orch::DeploymentRecord record =
        existing ? std::move(*existing) : katena::orch::DeploymentRecord{};

    katena::orch::RecordLock lock(project->options.record_path);
    auto backend = project->make_backend();
    katena::orch::Orchestrator orchestrator(project->model, *project->artifacts, *backend,
                                            project->secrets, project->exec_options());
    auto report = run(orchestrator, record);
    project->save_mock_state(*backend);

    auto doc = report.to_json();
    doc["recordPath"] = project->options.record_path;
    doc["record"] = record.to_json();
    set_output(out_report_json, doc.dump(2) + "\n");
    if (!report.ok()) {
        g_last_error = report.error;
        return KATENA_ERR_BACKEND;
    }
    return KATENA_OK;
}

}  // namespace

extern "C" {

katena_status katena_open(const char* model_path, const char* options_json,
                          katena_project** out_project) {
    return guarded([&]() -> katena_status {
        if (!model_path || !out_project) {
            throw katena::usage_error("model_path and out_project are required");
        }
        auto project = std::make_unique<katena_project>();
        project->model_path = model_path;

        if (options_json && *options_json) {
            json opts;
            try {
                opts = json::parse(options_json);
            } catch (const json::exception& e) {
                throw katena::usage_error(std::string("options_json is not valid JSON: ") +
                                          e.what());
            }
            project->options.inputs_path = opts.value("inputs", "");
            project->options.secrets_path = opts.value("secrets", "");
            project->options.artifacts_dir = opts.value("artifacts", "");
            project->options.backend = opts.value("backend", "mock");
            project->options.rpc_url = opts.value("rpc_url", "");
            project->options.record_path = opts.value("record", "");
            project->options.auth_scheme = opts.value("auth_scheme", "bearer");
            project->options.parallel = opts.value("parallel", false);
            project->options.gas_price = opts.value("gas_price", project->options.gas_price);
            project->options.gas_limit = opts.value("gas_limit", project->options.gas_limit);
        }

        if (const char* env = std::getenv("KATENA_SECRETS"); env && *env) {
            project->options.secrets_path = env;
        }

        project->model_text = read_file(project->model_path);
        project->model_hash = katena::crypto::keccak256_hex(project->model_text);

        std::map<std::string, std::string> inputs;
        if (!project->options.inputs_path.empty()) {
            inputs = katena::model::parse_scalar_map_file(project->options.inputs_path);
        }
        if (!project->options.secrets_path.empty()) {
            project->secrets = katena::model::parse_secrets_file(project->options.secrets_path);
        }
        project->model = katena::model::parse_model(project->model_text, inputs);

        if (project->options.artifacts_dir.empty()) {
            project->options.artifacts_dir =
                std::filesystem::path(project->model_path).parent_path().string();
            if (project->options.artifacts_dir.empty()) project->options.artifacts_dir = ".";
        }
        project->artifacts =
            std::make_unique<katena::model::ArtifactStore>(project->options.artifacts_dir);

        if (project->options.record_path.empty()) {
            project->options.record_path =
                katena::orch::default_record_path(project->model_path);
        }

        *out_project = project.release();
        return KATENA_OK;
    });
}

void katena_close(katena_project* project) { delete project; }

const char* katena_last_error(void) { return g_last_error.c_str(); }

katena_status katena_validate(katena_project* project, char** out_report_json) {
    return guarded([&]() -> katena_status {
        if (!project) throw katena::usage_error("null project");
        auto report = katena::model::validate_model(project->model, project->artifacts.get());
        set_output(out_report_json, report.to_json().dump(2) + "\n");
        if (!report.ok()) {
            g_last_error = std::to_string(report.violations.size()) + " violation(s)";
            return KATENA_ERR_VALIDATION;
        }
        return KATENA_OK;
    });
}

katena_status katena_plan(katena_project* project, char** out_plan_json) {
    return guarded([&]() -> katena_status {
        if (!project) throw katena::usage_error("null project");
        auto graph = katena::graph::build_dependency_graph(project->model);
        auto plan = katena::graph::deployment_plan(graph, project->model);
        set_output(out_plan_json, plan.to_canonical_json());
        return KATENA_OK;
    });
}

katena_status katena_plan_upgrade(katena_project* project, const char* node,
                                  char** out_plan_json) {
    return guarded([&]() -> katena_status {
        if (!project || !node) throw katena::usage_error("null project or node");
        auto graph = katena::graph::build_dependency_graph(project->model);
        auto plan = katena::graph::upgrade_plan(graph, project->model, node);
        set_output(out_plan_json, plan.to_canonical_json());
        return KATENA_OK;
    });
}

katena_status katena_plan_destroy(katena_project* project, const char* node,
                                  char** out_plan_json) {
    return guarded([&]() -> katena_status {
        if (!project || !node) throw katena::usage_error("null project or node");
        auto graph = katena::graph::build_dependency_graph(project->model);
        auto steps = katena::graph::destroy_plan(graph, project->model, node);
        set_output(out_plan_json,
                   katena::graph::destroy_plan_json(steps, node).dump(2) + "\n");
        return KATENA_OK;
    });
}

katena_status katena_deploy(katena_project* project, char** out_report_json) {
    return guarded([&]() -> katena_status {
        if (!project) throw katena::usage_error("null project");
        auto graph = katena::graph::build_dependency_graph(project->model);
        auto plan = katena::graph::deployment_plan(graph, project->model);
        return run_execution(project, out_report_json, /*need_record=*/false,
                             [&](katena::orch::Orchestrator& orch,
                                 katena::orch::DeploymentRecord& record) {
                                 return orch.execute_deploy(plan, record);
                             });
    });
}

katena_status katena_upgrade(katena_project* project, const char* node,
                             char** out_report_json) {
    return guarded([&]() -> katena_status {
        if (!project || !node) throw katena::usage_error("null project or node");
        auto graph = katena::graph::build_dependency_graph(project->model);
        auto plan = katena::graph::upgrade_plan(graph, project->model, node);
        return run_execution(project, out_report_json, /*need_record=*/true,
                             [&](katena::orch::Orchestrator& orch,
                                 katena::orch::DeploymentRecord& record) {
                                 return orch.execute_upgrade(plan, record);
                             });
    });
}

katena_status katena_destroy_node(katena_project* project, const char* node,
                                  char** out_report_json) {
    return guarded([&]() -> katena_status {
        if (!project || !node) throw katena::usage_error("null project or node");
        auto graph = katena::graph::build_dependency_graph(project->model);
        auto steps = katena::graph::destroy_plan(graph, project->model, node);
        return run_execution(project, out_report_json, /*need_record=*/true,
                             [&](katena::orch::Orchestrator& orch,
                                 katena::orch::DeploymentRecord& record) {
                                 return orch.execute_destroy(steps, record);
                             });
    });
}

katena_status katena_record_show(katena_project* project, char** out_record_json) {
    return guarded([&]() -> katena_status {
        if (!project) throw katena::usage_error("null project");
        auto record = katena::orch::DeploymentRecord::load(project->options.record_path);
        if (!record) {
            throw katena::usage_error("no deployment record at '" +
                                      project->options.record_path + "'");
        }
        set_output(out_record_json, record->to_canonical_json());
        return KATENA_OK;
    });
}

katena_status katena_count_tokens(const char* text, const char* language,
                                  unsigned long long* out_tokens) {
    return guarded([&]() -> katena_status {
        if (!text || !language || !out_tokens) {
            throw katena::usage_error("text, language and out_tokens are required");
        }
        *out_tokens = katena::toolkit::count_tokens(text, language);
        return KATENA_OK;
    });
}

katena_status katena_count_tokens_file(const char* path, const char* language,
                                       unsigned long long* out_tokens) {
    return guarded([&]() -> katena_status {
        if (!path || !language || !out_tokens) {
            throw katena::usage_error("path, language and out_tokens are required");
        }
        *out_tokens = katena::toolkit::count_tokens_file(path, language).tokens;
        return KATENA_OK;
    });
}

void katena_string_free(char* str) { std::free(str); }

}  // extern "C"
