#include "katena/artifact.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace katena::model {

using nlohmann::json;

std::string AbiFunction::signature() const {
    return abi::canonical_signature(name, inputs);
}

std::string AbiFunction::selector_hex() const {
    return crypto::selector_hex(signature());
}

const AbiFunction* ContractArtifact::find_function(const std::string& fn_name,
                                                   size_t arity) const {
    const AbiFunction* found = nullptr;
    for (const auto& f : functions) {
        if (f.name == fn_name && f.inputs.size() == arity) {
            if (found) return nullptr;  // ambiguous at this arity
            found = &f;
        }
    }
    return found;
}

std::vector<const AbiFunction*> ContractArtifact::functions_named(
    const std::string& fn_name) const {
    std::vector<const AbiFunction*> out;
    for (const auto& f : functions) {
        if (f.name == fn_name) out.push_back(&f);
    }
    return out;
}

namespace {

// Bytecode hex must be clean outside link placeholder spans; placeholders use
// '_' and '$' which are never hex digits, so a cheap character scan suffices
// here and the linker does the structural check.
void check_bytecode_charset(const std::string& bytecode, const std::string& origin) {
    for (char c : bytecode) {
        if (!hex::is_hex_digit(c) && c != '_' && c != '$' && c != '.' && c != ':') {
            throw validation_error(origin + ": non-hex byte '" + std::string(1, c) +
                                   "' in bytecode");
        }
    }
}

std::string extract_bytecode(const json& doc, const std::string& origin) {
    json node;
    if (doc.contains("bytecode")) {
        node = doc["bytecode"];
    } else if (doc.contains("evm") && doc["evm"].contains("bytecode")) {
        node = doc["evm"]["bytecode"];
    } else {
        throw validation_error(origin + ": no 'bytecode' or 'evm.bytecode' field");
    }
    std::string text;
    if (node.is_string()) {
        text = node.get<std::string>();
    } else if (node.is_object() && node.contains("object") && node["object"].is_string()) {
        text = node["object"].get<std::string>();
    } else {
        throw validation_error(origin + ": unsupported bytecode layout");
    }
    std::string body(hex::strip_prefix(text));
    check_bytecode_charset(body, origin);
    return hex::to_lower(body);
}

}  // namespace

ContractArtifact parse_artifact_json(const std::string& text, const std::string& origin) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw validation_error(origin + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object()) throw validation_error(origin + ": artifact must be a JSON object");

    json abi_entries = doc.value("abi", json());
    if (abi_entries.is_string()) {
        // Some toolchains double-encode the ABI as a JSON string.
        try {
            abi_entries = json::parse(abi_entries.get<std::string>());
        } catch (const json::exception&) {
            throw validation_error(origin + ": 'abi' string is not valid JSON");
        }
    }
    if (!abi_entries.is_array()) {
        throw validation_error(origin + ": 'abi' must be an array");
    }

    ContractArtifact artifact;
    artifact.source_name = doc.value("sourceName", "");
    artifact.contract_name = doc.value("contractName", "");
    artifact.bytecode = extract_bytecode(doc, origin);

    for (const auto& entry : abi_entries) {
        if (!entry.is_object()) continue;
        std::string type = entry.value("type", "function");
        if (type == "constructor") {
            artifact.has_constructor = true;
            for (const auto& input : entry.value("inputs", json::array())) {
                artifact.constructor_inputs.push_back(abi::Type::from_abi_json(input));
            }
        } else if (type == "function") {
            AbiFunction fn;
            fn.name = entry.value("name", "");
            if (fn.name.empty()) {
                throw validation_error(origin + ": function entry without a name");
            }
            fn.state_mutability = entry.value("stateMutability", "");
            for (const auto& input : entry.value("inputs", json::array())) {
                fn.inputs.push_back(abi::Type::from_abi_json(input));
            }
            artifact.functions.push_back(std::move(fn));
        }
        // events, errors, fallback, receive: not needed for deployment
    }
    return artifact;
}

ContractArtifact load_artifact(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw usage_error("cannot read artifact file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    auto artifact = parse_artifact_json(buf.str(), path);
    if (artifact.contract_name.empty()) {
        artifact.contract_name = std::filesystem::path(path).stem().string();
    }
    return artifact;
}

const ContractArtifact& ArtifactStore::get(const std::string& abi_ref) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(abi_ref);
    if (it != cache_.end()) return *it->second;
    auto loaded = std::make_unique<ContractArtifact>(load_artifact(resolve_path(abi_ref)));
    auto [pos, _] = cache_.emplace(abi_ref, std::move(loaded));
    return *pos->second;
}

std::string ArtifactStore::resolve_path(const std::string& abi_ref) const {
    namespace fs = std::filesystem;
    if (abi_ref.ends_with(".json")) {
        fs::path p(abi_ref);
        if (p.is_absolute()) return p.string();
        return (fs::path(directory_) / p).string();
    }
    return (fs::path(directory_) / (abi_ref + ".json")).string();
}

}  // namespace katena::model
