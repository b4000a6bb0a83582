#include "katena/model.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <sys/stat.h>

namespace katena::model {

std::string kind_name(NodeKind kind) {
    switch (kind) {
        case NodeKind::SelfHostedNode: return "SelfHostedNode";
        case NodeKind::NodeServiceProvider: return "NodeServiceProvider";
        case NodeKind::Wallet: return "Wallet";
        case NodeKind::Library: return "Library";
        case NodeKind::SmartContract: return "SmartContract";
        case NodeKind::SmartContractReference: return "SmartContractReference";
        case NodeKind::Proxy: return "Proxy";
        case NodeKind::Diamond: return "Diamond";
        case NodeKind::Facet: return "Facet";
        case NodeKind::DiamondCut: return "DiamondCut";
        case NodeKind::DiamondInit: return "DiamondInit";
        case NodeKind::OffChainComponent: return "OffChainComponent";
        case NodeKind::DecentralizedStorage: return "DecentralizedStorage";
        case NodeKind::Server: return "Server";
        case NodeKind::Credential: return "Credential";
    }
    return "?";
}

bool is_network_kind(NodeKind kind) {
    return kind == NodeKind::SelfHostedNode || kind == NodeKind::NodeServiceProvider;
}

bool is_contract_kind(NodeKind kind) {
    switch (kind) {
        case NodeKind::SmartContract:
        case NodeKind::Proxy:
        case NodeKind::Diamond:
        case NodeKind::Facet:
        case NodeKind::DiamondCut:
        case NodeKind::DiamondInit: return true;
        default: return false;
    }
}

bool is_onchain_kind(NodeKind kind) {
    return kind == NodeKind::Library || is_contract_kind(kind);
}

std::string relation_name(Relation relation) {
    switch (relation) {
        case Relation::UseNetwork: return "useNetwork";
        case Relation::UseWallet: return "useWallet";
        case Relation::UseLibrary: return "useLibrary";
        case Relation::UseContractInConstructor: return "useContractInConstructor";
        case Relation::UseReferenceInConstructor: return "useReferenceInConstructor";
        case Relation::UseContract: return "useContract";
        case Relation::UseReference: return "useReference";
        case Relation::UseFacet: return "useFacet";
        case Relation::UseCut: return "useCut";
        case Relation::UseInit: return "useInit";
        case Relation::Implementation: return "implementation";
        case Relation::HostedOn: return "hostedOn";
        case Relation::UseCredentials: return "useCredentials";
    }
    return "?";
}

std::vector<const Requirement*> NodeInstance::requirements_of(Relation relation) const {
    std::vector<const Requirement*> out;
    for (const auto& r : requirements) {
        if (r.relation == relation) out.push_back(&r);
    }
    return out;
}

const Requirement* NodeInstance::first_requirement(Relation relation) const {
    for (const auto& r : requirements) {
        if (r.relation == relation) return &r;
    }
    return nullptr;
}

const NodeInstance& DeploymentModel::node(const std::string& name) const {
    auto it = nodes.find(name);
    if (it == nodes.end()) throw usage_error("unknown node '" + name + "'");
    return it->second;
}

const NodeInstance* DeploymentModel::find(const std::string& name) const {
    auto it = nodes.find(name);
    return it == nodes.end() ? nullptr : &it->second;
}

const NodeInstance* DeploymentModel::sole_network() const {
    const NodeInstance* found = nullptr;
    for (const auto& [_, node] : nodes) {
        if (is_network_kind(node.kind)) {
            if (found) {
                throw usage_error("model declares more than one network node ('" +
                                  found->name + "', '" + node.name + "')");
            }
            found = &node;
        }
    }
    return found;
}

namespace {

struct TypeMapping {
    NodeKind kind;
    std::string default_host;
    int default_port = 0;
};

std::optional<TypeMapping> map_type_name(const std::string& type_name) {
    static const std::map<std::string, TypeMapping> table = {
        {"katena.nodes.network.ethereum", {NodeKind::SelfHostedNode, "localhost", 8545}},
        {"katena.nodes.network.ganache", {NodeKind::SelfHostedNode, "localhost", 8545}},
        {"katena.nodes.network.selfhosted", {NodeKind::SelfHostedNode, "", 0}},
        {"katena.nodes.network.provider", {NodeKind::NodeServiceProvider, "", 0}},
        {"katena.nodes.wallet", {NodeKind::Wallet, "", 0}},
        {"katena.nodes.library", {NodeKind::Library, "", 0}},
        {"katena.nodes.smartcontract", {NodeKind::SmartContract, "", 0}},
        {"katena.nodes.smartcontract.reference", {NodeKind::SmartContractReference, "", 0}},
        {"katena.nodes.reference", {NodeKind::SmartContractReference, "", 0}},
        {"katena.nodes.proxy", {NodeKind::Proxy, "", 0}},
        {"katena.nodes.diamond", {NodeKind::Diamond, "", 0}},
        {"katena.nodes.diamond.facet", {NodeKind::Facet, "", 0}},
        {"katena.nodes.facet", {NodeKind::Facet, "", 0}},
        {"katena.nodes.diamond.cut", {NodeKind::DiamondCut, "", 0}},
        {"katena.nodes.diamondcut", {NodeKind::DiamondCut, "", 0}},
        {"katena.nodes.diamond.init", {NodeKind::DiamondInit, "", 0}},
        {"katena.nodes.diamondinit", {NodeKind::DiamondInit, "", 0}},
        {"katena.nodes.offchain", {NodeKind::OffChainComponent, "", 0}},
        // Generic TOSCA container type, accepted for off-chain components.
        {"tosca.nodes.Container.Application", {NodeKind::OffChainComponent, "", 0}},
        {"katena.nodes.offchain.storage", {NodeKind::DecentralizedStorage, "", 0}},
        {"katena.nodes.offchain.server", {NodeKind::Server, "", 0}},
        {"katena.nodes.credential", {NodeKind::Credential, "", 0}},
    };
    auto it = table.find(type_name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

std::optional<Relation> map_relation_name(std::string name) {
    constexpr std::string_view kNamespace = "katena.relationships.";
    if (name.starts_with(kNamespace)) name = name.substr(kNamespace.size());
    static const std::map<std::string, Relation> table = {
        {"useNetwork", Relation::UseNetwork},
        {"useWallet", Relation::UseWallet},
        {"useLibrary", Relation::UseLibrary},
        {"useContractInConstructor", Relation::UseContractInConstructor},
        // Alternate spellings of the same relation seen in real models.
        {"usesContractInConstructor", Relation::UseContractInConstructor},
        {"callsInConstructor", Relation::UseContractInConstructor},
        {"callInConstructor", Relation::UseContractInConstructor},
        {"useReferenceInConstructor", Relation::UseReferenceInConstructor},
        {"usesReferenceInConstructor", Relation::UseReferenceInConstructor},
        {"useContract", Relation::UseContract},
        {"useReference", Relation::UseReference},
        {"useFacet", Relation::UseFacet},
        {"useCut", Relation::UseCut},
        {"useInit", Relation::UseInit},
        {"implementation", Relation::Implementation},
        {"hostedOn", Relation::HostedOn},
        {"useCredentials", Relation::UseCredentials},
    };
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

bool looks_like_int(const std::string& s) {
    static const std::regex re(R"(^-?[0-9]+$)");
    return std::regex_match(s, re);
}

bool looks_like_float(const std::string& s) {
    static const std::regex re(R"(^-?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+[eE][+-]?[0-9]+)([eE][+-]?[0-9]+)?$)");
    return std::regex_match(s, re);
}

Literal parse_literal(const YAML::Node& node, const std::string& context) {
    Literal lit;
    if (node.IsSequence()) {
        lit.kind = Literal::Kind::List;
        for (const auto& item : node) lit.items.push_back(parse_literal(item, context));
        return lit;
    }
    if (!node.IsScalar()) {
        throw validation_error(context + ": expected a scalar or list value");
    }
    lit.text = node.Scalar();
    bool quoted = node.Tag() == "!";
    if (quoted) {
        lit.kind = Literal::Kind::String;
    } else if (lit.text == "true" || lit.text == "false") {
        lit.kind = Literal::Kind::Bool;
    } else if (looks_like_int(lit.text)) {
        lit.kind = Literal::Kind::Int;
    } else if (looks_like_float(lit.text)) {
        lit.kind = Literal::Kind::Float;
    } else {
        lit.kind = Literal::Kind::String;
    }
    return lit;
}

// A property value is a plain scalar, { get_input: KEY }, or { env: VAR }.
struct PropValue {
    enum class Form { Plain, Input, Env } form = Form::Plain;
    std::string text;  // scalar text, input key, or env var name
};

PropValue read_prop_value(const YAML::Node& node, const std::string& context) {
    if (node.IsScalar()) return {PropValue::Form::Plain, node.Scalar()};
    if (node.IsMap()) {
        size_t entries = 0;
        for (auto it : node) {
            (void)it;
            ++entries;
        }
        if (entries == 1) {
            if (node["get_input"] && node["get_input"].IsScalar()) {
                return {PropValue::Form::Input, node["get_input"].Scalar()};
            }
            if (node["env"] && node["env"].IsScalar()) {
                return {PropValue::Form::Env, node["env"].Scalar()};
            }
        }
    }
    throw validation_error(context + ": expected a scalar, { get_input: KEY } or { env: VAR }");
}

std::string resolve_plain(const PropValue& v, const std::map<std::string, std::string>& inputs,
                          const std::string& context) {
    switch (v.form) {
        case PropValue::Form::Plain: return v.text;
        case PropValue::Form::Input: {
            auto it = inputs.find(v.text);
            if (it == inputs.end()) {
                throw validation_error(context + ": unresolved input key '" + v.text + "'");
            }
            return it->second;
        }
        case PropValue::Form::Env: {
            const char* val = std::getenv(v.text.c_str());
            if (!val) {
                throw validation_error(context + ": environment variable '" + v.text +
                                       "' is not set");
            }
            return val;
        }
    }
    return "";
}

SecretRef to_secret(const PropValue& v) {
    switch (v.form) {
        case PropValue::Form::Plain: return {SecretRef::Source::Inline, v.text};
        case PropValue::Form::Input: return {SecretRef::Source::Input, v.text};
        case PropValue::Form::Env: return {SecretRef::Source::Env, v.text};
    }
    return {};
}

Requirement parse_requirement(const YAML::Node& item, const std::string& node_name) {
    if (!item.IsMap()) {
        throw validation_error("node '" + node_name + "': requirement entries must be maps");
    }
    std::string rel_name;
    YAML::Node body;
    size_t entries = 0;
    for (auto it : item) {
        rel_name = it.first.Scalar();
        body = it.second;
        ++entries;
    }
    if (entries != 1) {
        throw validation_error("node '" + node_name +
                               "': each requirement entry must have exactly one key");
    }

    Requirement req;
    std::string effective_relation = rel_name;
    std::string target;
    if (body.IsScalar()) {
        target = body.Scalar();
    } else if (body.IsMap()) {
        if (body["node"] && body["node"].IsScalar()) target = body["node"].Scalar();
        if (body["relationship"] && body["relationship"].IsScalar()) {
            if (rel_name != "dependency") {
                throw validation_error("node '" + node_name + "': 'relationship' is only valid " +
                                       "under the generic 'dependency' requirement");
            }
            effective_relation = body["relationship"].Scalar();
        } else if (rel_name == "dependency") {
            throw validation_error("node '" + node_name +
                                   "': generic 'dependency' requirement needs a 'relationship'");
        }
        if (body["functionName"] && body["functionName"].IsScalar()) {
            req.function_name = body["functionName"].Scalar();
        }
        if (body["exclude"]) {
            if (!body["exclude"].IsSequence()) {
                throw validation_error("node '" + node_name + "': 'exclude' must be a list");
            }
            for (const auto& ex : body["exclude"]) req.exclude.push_back(ex.Scalar());
        }
    } else {
        throw validation_error("node '" + node_name + "': malformed requirement '" + rel_name +
                               "'");
    }
    if (target.empty()) {
        throw validation_error("node '" + node_name + "': requirement '" + rel_name +
                               "' has no target node");
    }

    auto relation = map_relation_name(effective_relation);
    if (!relation) {
        throw validation_error("node '" + node_name + "': unknown relation '" +
                               effective_relation + "'");
    }
    req.relation = *relation;
    req.target = target;
    return req;
}

uint64_t parse_port_like(const std::string& text, const std::string& context) {
    if (!looks_like_int(text) || text.starts_with("-")) {
        throw validation_error(context + ": expected a non-negative integer, got '" + text + "'");
    }
    return std::stoull(text);
}

NodeInstance parse_node(const std::string& name, const YAML::Node& body,
                        const std::map<std::string, std::string>& inputs) {
    if (!body.IsMap()) {
        throw validation_error("node '" + name + "': body must be a map");
    }
    NodeInstance node;
    node.name = name;
    if (!body["type"] || !body["type"].IsScalar()) {
        throw validation_error("node '" + name + "': missing 'type'");
    }
    node.type_name = body["type"].Scalar();
    auto mapping = map_type_name(node.type_name);
    if (!mapping) {
        throw validation_error("node '" + name + "': unknown kind '" + node.type_name + "'");
    }
    node.kind = mapping->kind;
    node.host = mapping->default_host;
    node.port = mapping->default_port;

    for (auto it : body) {
        std::string key = it.first.Scalar();
        if (key != "type" && key != "requirements" && key != "properties") {
            throw validation_error("node '" + name + "': unknown field '" + key + "'");
        }
    }

    if (body["requirements"]) {
        if (!body["requirements"].IsSequence()) {
            throw validation_error("node '" + name + "': 'requirements' must be a list");
        }
        for (const auto& item : body["requirements"]) {
            node.requirements.push_back(parse_requirement(item, name));
        }
    }

    const YAML::Node props = body["properties"];
    if (props && !props.IsMap()) {
        throw validation_error("node '" + name + "': 'properties' must be a map");
    }
    if (props) {
        for (auto it : props) {
            std::string key = it.first.Scalar();
            const YAML::Node value = it.second;
            std::string context = "node '" + name + "', property '" + key + "'";
            if (key == "abi") {
                node.abi_ref = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "parameters") {
                if (!value.IsSequence() && !value.IsNull()) {
                    throw validation_error(context + ": must be a list");
                }
                if (value.IsSequence()) {
                    for (const auto& p : value) node.parameters.push_back(parse_literal(p, context));
                }
            } else if (key == "destroyFunction") {
                node.destroy_function = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "refundAddress") {
                node.refund_address = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "upgradeFunction") {
                node.upgrade_function = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "host") {
                node.host = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "port") {
                node.port = static_cast<int>(parse_port_like(
                    resolve_plain(read_prop_value(value, context), inputs, context), context));
            } else if (key == "url") {
                node.url = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "chainId") {
                node.expected_chain_id = parse_port_like(
                    resolve_plain(read_prop_value(value, context), inputs, context), context);
            } else if (key == "secret") {
                node.secret = to_secret(read_prop_value(value, context));
            } else if (key == "publicKey") {
                node.public_key = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "privateKey") {
                node.private_key = to_secret(read_prop_value(value, context));
            } else if (key == "address") {
                node.address = resolve_plain(read_prop_value(value, context), inputs, context);
            } else if (key == "sshKey") {
                node.ssh_key = to_secret(read_prop_value(value, context));
            } else {
                throw validation_error(context + ": unknown property");
            }
        }
    }
    return node;
}

}  // namespace

DeploymentModel parse_model(const std::string& yaml_text,
                            const std::map<std::string, std::string>& inputs) {
    YAML::Node doc;
    try {
        doc = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw validation_error(std::string("YAML syntax error: ") + e.what());
    }

    DeploymentModel model;
    model.inputs = inputs;
    if (doc.IsNull() || !doc.IsDefined()) return model;
    if (!doc.IsMap()) throw validation_error("model document must be a map of nodes");

    YAML::Node nodes_node = doc;
    if (doc["nodes"] || doc["inputs"]) {
        for (auto it : doc) {
            std::string key = it.first.Scalar();
            if (key != "nodes" && key != "inputs") {
                throw validation_error("unexpected top-level key '" + key + "'");
            }
        }
        if (doc["inputs"]) {
            if (!doc["inputs"].IsMap() && !doc["inputs"].IsNull()) {
                throw validation_error("'inputs' must be a map of scalars");
            }
            if (doc["inputs"].IsMap()) {
                for (auto it : doc["inputs"]) {
                    // The inputs file takes precedence over inline defaults.
                    model.inputs.emplace(it.first.Scalar(), it.second.Scalar());
                }
            }
        }
        nodes_node = doc["nodes"];
        if (!nodes_node || nodes_node.IsNull()) return model;
        if (!nodes_node.IsMap()) throw validation_error("'nodes' must be a map");
    }

    for (auto it : nodes_node) {
        std::string name = it.first.Scalar();
        if (model.nodes.contains(name)) {
            throw validation_error("duplicate node name '" + name + "'");
        }
        model.nodes.emplace(name, parse_node(name, it.second, model.inputs));
        model.declaration_order.push_back(name);
    }

    for (const auto& [name, node] : model.nodes) {
        for (const auto& req : node.requirements) {
            if (!model.nodes.contains(req.target)) {
                throw validation_error("node '" + name + "': requirement '" +
                                       relation_name(req.relation) + "' targets unknown node '" +
                                       req.target + "'");
            }
        }
    }
    return model;
}

DeploymentModel parse_model_file(const std::string& path,
                                 const std::map<std::string, std::string>& inputs) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot read model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), inputs);
}

std::map<std::string, std::string> parse_scalar_map_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot read file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    YAML::Node doc;
    try {
        doc = YAML::Load(buf.str());
    } catch (const YAML::Exception& e) {
        throw validation_error(path + ": YAML syntax error: " + e.what());
    }
    std::map<std::string, std::string> out;
    if (doc.IsNull() || !doc.IsDefined()) return out;
    if (!doc.IsMap()) throw validation_error(path + ": expected a map of scalars");
    for (auto it : doc) {
        if (!it.second.IsScalar()) {
            throw validation_error(path + ": value for '" + it.first.Scalar() +
                                   "' is not a scalar");
        }
        out[it.first.Scalar()] = it.second.Scalar();
    }
    return out;
}

std::map<std::string, std::string> parse_secrets_file(const std::string& path) {
    struct stat st{};
    if (::stat(path.c_str(), &st) != 0) {
        throw usage_error("cannot read secrets file '" + path + "'");
    }
    if (st.st_mode & (S_IROTH | S_IWOTH)) {
        throw usage_error("secrets file '" + path +
                          "' is world-accessible; tighten its permissions (chmod 600)");
    }
    return parse_scalar_map_file(path);
}

namespace {

void emit_literal(YAML::Emitter& out, const Literal& lit) {
    switch (lit.kind) {
        case Literal::Kind::List:
            out << YAML::BeginSeq;
            for (const auto& item : lit.items) emit_literal(out, item);
            out << YAML::EndSeq;
            break;
        case Literal::Kind::String:
            out << YAML::DoubleQuoted << lit.text;
            break;
        default:
            out << lit.text;
            break;
    }
}

void emit_secret(YAML::Emitter& out, const std::string& key, const SecretRef& secret) {
    out << YAML::Key << key << YAML::Value;
    switch (secret.source) {
        case SecretRef::Source::Input:
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "get_input" << YAML::Value
                << secret.value << YAML::EndMap;
            break;
        case SecretRef::Source::Env:
            out << YAML::Flow << YAML::BeginMap << YAML::Key << "env" << YAML::Value
                << secret.value << YAML::EndMap;
            break;
        default:
            out << YAML::DoubleQuoted << secret.value;
            break;
    }
}

}  // namespace

std::string serialize_model(const DeploymentModel& model) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "nodes" << YAML::Value << YAML::BeginMap;
    for (const auto& name : model.declaration_order) {
        const NodeInstance& node = model.node(name);
        out << YAML::Key << name << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "type" << YAML::Value << node.type_name;
        if (!node.requirements.empty()) {
            out << YAML::Key << "requirements" << YAML::Value << YAML::BeginSeq;
            for (const auto& req : node.requirements) {
                out << YAML::BeginMap;
                out << YAML::Key << relation_name(req.relation) << YAML::Value;
                if (req.function_name.empty() && req.exclude.empty()) {
                    out << req.target;
                } else {
                    out << YAML::BeginMap;
                    out << YAML::Key << "node" << YAML::Value << req.target;
                    if (!req.function_name.empty()) {
                        out << YAML::Key << "functionName" << YAML::Value << req.function_name;
                    }
                    if (!req.exclude.empty()) {
                        out << YAML::Key << "exclude" << YAML::Value << YAML::Flow << req.exclude;
                    }
                    out << YAML::EndMap;
                }
                out << YAML::EndMap;
            }
            out << YAML::EndSeq;
        }

        out << YAML::Key << "properties" << YAML::Value << YAML::BeginMap;
        if (!node.abi_ref.empty()) {
            out << YAML::Key << "abi" << YAML::Value << YAML::DoubleQuoted << node.abi_ref;
        }
        if (!node.parameters.empty()) {
            out << YAML::Key << "parameters" << YAML::Value << YAML::BeginSeq;
            for (const auto& p : node.parameters) emit_literal(out, p);
            out << YAML::EndSeq;
        }
        if (!node.destroy_function.empty()) {
            out << YAML::Key << "destroyFunction" << YAML::Value << node.destroy_function;
        }
        if (!node.refund_address.empty()) {
            out << YAML::Key << "refundAddress" << YAML::Value << YAML::DoubleQuoted
                << node.refund_address;
        }
        if (node.kind == NodeKind::Proxy && node.upgrade_function != "upgradeTo") {
            out << YAML::Key << "upgradeFunction" << YAML::Value << node.upgrade_function;
        }
        if (node.kind == NodeKind::SelfHostedNode) {
            if (!node.host.empty()) out << YAML::Key << "host" << YAML::Value << node.host;
            if (node.port != 0) out << YAML::Key << "port" << YAML::Value << node.port;
        }
        if (!node.url.empty()) out << YAML::Key << "url" << YAML::Value << node.url;
        if (node.expected_chain_id) {
            out << YAML::Key << "chainId" << YAML::Value << *node.expected_chain_id;
        }
        if (node.secret.present()) emit_secret(out, "secret", node.secret);
        if (!node.public_key.empty()) {
            out << YAML::Key << "publicKey" << YAML::Value << YAML::DoubleQuoted
                << node.public_key;
        }
        if (node.private_key.present()) emit_secret(out, "privateKey", node.private_key);
        if (!node.address.empty()) {
            out << YAML::Key << "address" << YAML::Value << YAML::DoubleQuoted << node.address;
        }
        if (node.ssh_key.present()) emit_secret(out, "sshKey", node.ssh_key);
        out << YAML::EndMap;  // properties

        out << YAML::EndMap;  // node
    }
    out << YAML::EndMap;  // nodes
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

bool relation_allowed(NodeKind source, Relation relation, NodeKind target) {
    const bool src_onchain = is_onchain_kind(source);
    const bool src_contract = is_contract_kind(source);
    const bool tgt_contract = is_contract_kind(target);
    switch (relation) {
        case Relation::UseNetwork:
            return (src_onchain || source == NodeKind::OffChainComponent) &&
                   is_network_kind(target);
        case Relation::UseWallet:
            return src_onchain && target == NodeKind::Wallet;
        case Relation::UseLibrary:
            return src_onchain && target == NodeKind::Library;
        case Relation::UseContractInConstructor:
            return src_contract && tgt_contract;
        case Relation::UseReferenceInConstructor:
            return src_contract && target == NodeKind::SmartContractReference;
        case Relation::UseContract:
            if (source == NodeKind::OffChainComponent) {
                return tgt_contract || target == NodeKind::SmartContractReference;
            }
            return src_contract && tgt_contract;
        case Relation::UseReference:
            return src_contract && target == NodeKind::SmartContractReference;
        case Relation::UseFacet:
            return source == NodeKind::Diamond &&
                   (target == NodeKind::Facet || target == NodeKind::DiamondCut ||
                    target == NodeKind::DiamondInit || target == NodeKind::SmartContract);
        case Relation::UseCut:
            return source == NodeKind::Diamond &&
                   (target == NodeKind::DiamondCut || target == NodeKind::Facet ||
                    target == NodeKind::SmartContract);
        case Relation::UseInit:
            return source == NodeKind::Diamond &&
                   (target == NodeKind::DiamondInit || target == NodeKind::Facet ||
                    target == NodeKind::SmartContract);
        case Relation::Implementation:
            return source == NodeKind::Proxy && tgt_contract;
        case Relation::HostedOn:
            return source == NodeKind::OffChainComponent &&
                   (target == NodeKind::DecentralizedStorage || target == NodeKind::Server);
        case Relation::UseCredentials:
            return source == NodeKind::Server && target == NodeKind::Credential;
    }
    return false;
}

}  // namespace katena::model
