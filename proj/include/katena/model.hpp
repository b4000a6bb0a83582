#pragma once

#include "katena/abi.hpp"
#include "katena/artifact.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace katena::model {

enum class NodeKind {
    SelfHostedNode,
    NodeServiceProvider,
    Wallet,
    Library,
    SmartContract,
    SmartContractReference,
    Proxy,
    Diamond,
    Facet,
    DiamondCut,
    DiamondInit,
    OffChainComponent,
    DecentralizedStorage,
    Server,
    Credential,
};

std::string kind_name(NodeKind kind);
bool is_network_kind(NodeKind kind);
// Deployable on-chain code: libraries plus every contract-shaped kind.
bool is_onchain_kind(NodeKind kind);
bool is_contract_kind(NodeKind kind);  // on-chain minus Library

enum class Relation {
    UseNetwork,
    UseWallet,
    UseLibrary,
    UseContractInConstructor,
    UseReferenceInConstructor,
    UseContract,
    UseReference,
    UseFacet,
    UseCut,
    UseInit,
    Implementation,
    HostedOn,
    UseCredentials,
};

std::string relation_name(Relation relation);

struct Requirement {
    Relation relation;
    std::string target;
    std::string function_name;          // useContract / useReference setter
    std::vector<std::string> exclude;   // useFacet exclusions
};

// Secret-bearing properties are indirections resolved at execution time.
struct SecretRef {
    enum class Source { None, Inline, Input, Env };
    Source source = Source::None;
    std::string value;

    bool present() const { return source != Source::None; }
};

// A scalar from the model file, kept as written so coercion errors can quote it.
struct Literal {
    enum class Kind { Int, Float, Bool, String, List };
    Kind kind = Kind::String;
    std::string text;
    std::vector<Literal> items;  // List only
};

struct NodeInstance {
    std::string name;
    std::string type_name;  // as written in the model file
    NodeKind kind = NodeKind::SmartContract;
    std::vector<Requirement> requirements;

    // on-chain
    std::string abi_ref;
    std::vector<Literal> parameters;
    std::string destroy_function;
    std::string refund_address;
    std::string upgrade_function = "upgradeTo";  // proxy implementation setter

    // network
    std::string host;
    int port = 0;
    std::string url;
    SecretRef secret;
    std::optional<uint64_t> expected_chain_id;

    // wallet
    std::string public_key;
    SecretRef private_key;

    // reference
    std::string address;

    // credential
    SecretRef ssh_key;

    std::vector<const Requirement*> requirements_of(Relation relation) const;
    const Requirement* first_requirement(Relation relation) const;
};

struct DeploymentModel {
    std::map<std::string, NodeInstance> nodes;
    std::vector<std::string> declaration_order;
    std::map<std::string, std::string> inputs;

    const NodeInstance& node(const std::string& name) const;
    const NodeInstance* find(const std::string& name) const;
    // The single network node execution runs against (error if several are
    // referenced); nullptr when the model declares none.
    const NodeInstance* sole_network() const;
};

// Parses a model document. Top level is either a bare map of node names or a
// map with "nodes" (and optionally "inputs") keys. `inputs` resolves
// get_input references for non-secret properties; secret-typed get_input
// references resolve later against the secrets file.
DeploymentModel parse_model(const std::string& yaml_text,
                            const std::map<std::string, std::string>& inputs);

DeploymentModel parse_model_file(const std::string& path,
                                 const std::map<std::string, std::string>& inputs);

std::map<std::string, std::string> parse_scalar_map_file(const std::string& path);

// Secrets file: YAML map name -> value. Refuses world-readable files.
std::map<std::string, std::string> parse_secrets_file(const std::string& path);

// Round-trip surface used by the parse/serialize property test.
std::string serialize_model(const DeploymentModel& model);

struct Violation {
    std::string code;
    std::string message;
    std::vector<std::string> nodes;
};

struct ValidationReport {
    std::vector<Violation> violations;
    std::vector<Violation> warnings;

    bool ok() const { return violations.empty(); }
    nlohmann::ordered_json to_json() const;
};

// Structural checks plus, when `artifacts` is non-null, artifact-dependent
// checks (constructor arity, setter presence, facet selector collisions).
ValidationReport validate_model(const DeploymentModel& model,
                                const ArtifactStore* artifacts);

// The relation legality table mirrored from the metamodel associations.
bool relation_allowed(NodeKind source, Relation relation, NodeKind target);

}  // namespace katena::model
