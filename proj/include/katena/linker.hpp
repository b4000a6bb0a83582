#pragma once

#include "katena/abi.hpp"
#include "katena/artifact.hpp"
#include "katena/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace katena::linker {

struct LinkPlaceholder {
    enum class Format { Modern, Legacy };

    size_t offset = 0;          // position in the hex string
    size_t length = 40;         // placeholder spans are always 40 chars
    Format format = Format::Modern;
    std::string id;             // modern: 34 hex digest chars; legacy: padded body
    std::string name;           // legacy: name with padding stripped

    std::string token() const;  // the exact 40-char span as it appears
};

// Finds every placeholder span; validates hex everywhere else. Throws on a
// truncated modern placeholder (opening __$ without closing $__).
std::vector<LinkPlaceholder> extract_placeholders(const std::string& bytecode_hex);

// Replaces every occurrence of `placeholder`'s token with the 40-char
// lowercase address. Length is preserved by construction.
std::string link_library(const std::string& bytecode_hex, const LinkPlaceholder& placeholder,
                         const abi::Address& address);

// The digest solc embeds in modern placeholders: first 34 hex chars of
// keccak256 of the fully qualified library name.
std::string placeholder_digest(const std::string& fully_qualified_name);

// Maps each distinct placeholder to one of the node's library targets by
// digest or name; falls back to pairing when both sides are singletons.
// Returns placeholder-token -> library node name. Throws when a placeholder
// matches nothing or two libraries collide on one placeholder.
std::map<std::string, std::string> resolve_placeholders(
    const model::NodeInstance& node, const model::ContractArtifact& artifact,
    const model::DeploymentModel& deployment, const model::ArtifactStore& artifacts);

// Fully links a node's bytecode given resolved library addresses (keyed by
// library node name).
std::string link_all(const model::NodeInstance& node, const model::ContractArtifact& artifact,
                     const model::DeploymentModel& deployment,
                     const model::ArtifactStore& artifacts,
                     const std::map<std::string, abi::Address>& library_addresses);

// Merges constructor-reference addresses with user parameters against the
// constructor signature: refs fill the earliest address slots in requirement
// declaration order, params fill the remaining slots left to right.
std::vector<abi::Value> bind_constructor(const model::ContractArtifact& artifact,
                                         const std::vector<abi::Address>& refs,
                                         const std::vector<model::Literal>& params);

// Coerces one model literal to an ABI value of the requested type;
// throws with the offending literal text on mismatch.
abi::Value coerce_literal(const model::Literal& literal, const abi::Type& type);

// payload = bytecode || abi-encoded args. Throws if a placeholder survives.
std::vector<uint8_t> encode_constructor_call(const std::string& linked_bytecode_hex,
                                             const std::vector<abi::Value>& args);

// call data = selector || abi-encoded args; overloads resolved by arity, then
// by exact canonical argument types.
std::vector<uint8_t> encode_function_call(const model::ContractArtifact& artifact,
                                          const std::string& function_name,
                                          const std::vector<abi::Value>& args);

}  // namespace katena::linker
