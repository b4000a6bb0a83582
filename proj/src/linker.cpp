#include "katena/linker.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace katena::linker {

using model::Literal;

std::string LinkPlaceholder::token() const {
    if (format == Format::Modern) return "__$" + id + "$__";
    return id;  // legacy: `id` holds the full 40-char span
}

std::vector<LinkPlaceholder> extract_placeholders(const std::string& bytecode_hex) {
    std::vector<LinkPlaceholder> out;
    size_t i = 0;
    const size_t n = bytecode_hex.size();
    while (i < n) {
        char c = bytecode_hex[i];
        if (hex::is_hex_digit(c)) {
            ++i;
            continue;
        }
        if (c != '_') {
            throw validation_error("invalid bytecode character '" + std::string(1, c) +
                                   "' at offset " + std::to_string(i));
        }
        if (i + 2 < n && bytecode_hex[i + 1] == '_' && bytecode_hex[i + 2] == '$') {
            // modern: __$<34 hex>$__
            if (i + 40 > n || bytecode_hex.compare(i + 37, 3, "$__") != 0) {
                throw validation_error("truncated link placeholder at offset " +
                                       std::to_string(i));
            }
            LinkPlaceholder ph;
            ph.offset = i;
            ph.format = LinkPlaceholder::Format::Modern;
            ph.id = bytecode_hex.substr(i + 3, 34);
            if (!hex::is_hex(ph.id)) {
                throw validation_error("link placeholder digest is not hex at offset " +
                                       std::to_string(i));
            }
            out.push_back(std::move(ph));
            i += 40;
            continue;
        }
        // legacy: 40-char span `__<name padded with underscores>`
        if (i + 40 > n || bytecode_hex[i + 1] != '_') {
            throw validation_error("truncated link placeholder at offset " + std::to_string(i));
        }
        LinkPlaceholder ph;
        ph.offset = i;
        ph.format = LinkPlaceholder::Format::Legacy;
        ph.id = bytecode_hex.substr(i, 40);
        std::string body = ph.id.substr(2);
        while (!body.empty() && body.back() == '_') body.pop_back();
        ph.name = body;
        if (ph.name.empty()) {
            throw validation_error("empty link placeholder at offset " + std::to_string(i));
        }
        out.push_back(std::move(ph));
        i += 40;
    }
    return out;
}

std::string link_library(const std::string& bytecode_hex, const LinkPlaceholder& placeholder,
                         const abi::Address& address) {
    const std::string token = placeholder.token();
    const std::string replacement = address.to_hex_bare();
    std::string out = bytecode_hex;
    size_t pos = out.find(token);
    if (pos == std::string::npos) {
        throw validation_error("placeholder '" + token + "' not found in bytecode");
    }
    while (pos != std::string::npos) {
        out.replace(pos, token.size(), replacement);
        pos = out.find(token, pos + replacement.size());
    }
    return out;
}

std::string placeholder_digest(const std::string& fully_qualified_name) {
    return crypto::keccak256_hex(fully_qualified_name).substr(0, 34);
}

namespace {

std::vector<std::string> candidate_names(const model::NodeInstance& lib_node,
                                         const model::ContractArtifact& lib_artifact) {
    std::vector<std::string> out;
    auto push = [&out](std::string s) {
        if (!s.empty() && std::find(out.begin(), out.end(), s) == out.end()) {
            out.push_back(std::move(s));
        }
    };
    if (!lib_artifact.source_name.empty()) {
        push(lib_artifact.source_name + ":" + lib_artifact.contract_name);
        push(lib_artifact.source_name + ":" + lib_node.name);
    }
    push(lib_artifact.contract_name);
    push(lib_node.name);
    push(lib_node.abi_ref);
    return out;
}

bool legacy_name_matches(const std::string& placeholder_name,
                         const std::vector<std::string>& candidates) {
    for (const auto& cand : candidates) {
        if (cand == placeholder_name) return true;
        // Legacy spans truncate long names to 36 chars.
        if (placeholder_name.size() == 36 && cand.starts_with(placeholder_name)) return true;
        // Path-qualified candidate vs bare placeholder name and vice versa.
        size_t colon = cand.rfind(':');
        if (colon != std::string::npos && cand.substr(colon + 1) == placeholder_name) return true;
    }
    return false;
}

}  // namespace

std::map<std::string, std::string> resolve_placeholders(
    const model::NodeInstance& node, const model::ContractArtifact& artifact,
    const model::DeploymentModel& deployment, const model::ArtifactStore& artifacts) {
    auto placeholders = extract_placeholders(artifact.bytecode);

    std::vector<std::string> lib_targets;
    for (const auto* req : node.requirements_of(model::Relation::UseLibrary)) {
        if (std::find(lib_targets.begin(), lib_targets.end(), req->target) == lib_targets.end()) {
            lib_targets.push_back(req->target);
        }
    }

    std::map<std::string, std::string> resolution;  // token -> library node
    std::vector<const LinkPlaceholder*> distinct;
    std::set<std::string> seen_tokens;
    for (const auto& ph : placeholders) {
        if (seen_tokens.insert(ph.token()).second) distinct.push_back(&ph);
    }

    for (const auto* ph : distinct) {
        std::string matched;
        for (const auto& lib_name : lib_targets) {
            const auto& lib_node = deployment.node(lib_name);
            const auto& lib_artifact = artifacts.get(lib_node.abi_ref);
            auto candidates = candidate_names(lib_node, lib_artifact);
            bool hit = false;
            if (ph->format == LinkPlaceholder::Format::Modern) {
                for (const auto& cand : candidates) {
                    if (placeholder_digest(cand) == ph->id) {
                        hit = true;
                        break;
                    }
                }
            } else {
                hit = legacy_name_matches(ph->name, candidates);
            }
            if (hit) {
                if (!matched.empty() && matched != lib_name) {
                    throw validation_error("node '" + node.name + "': placeholder '" +
                                           ph->token() + "' matches both '" + matched +
                                           "' and '" + lib_name + "'");
                }
                matched = lib_name;
            }
        }
        if (matched.empty() && distinct.size() == 1 && lib_targets.size() == 1) {
            matched = lib_targets[0];  // unambiguous pairing
        }
        if (matched.empty()) {
            throw validation_error("node '" + node.name + "': placeholder '" + ph->token() +
                                   "' matches no useLibrary target");
        }
        resolution[ph->token()] = matched;
    }
    return resolution;
}

std::string link_all(const model::NodeInstance& node, const model::ContractArtifact& artifact,
                     const model::DeploymentModel& deployment,
                     const model::ArtifactStore& artifacts,
                     const std::map<std::string, abi::Address>& library_addresses) {
    auto resolution = resolve_placeholders(node, artifact, deployment, artifacts);
    std::string bytecode = artifact.bytecode;
    for (const auto& ph : extract_placeholders(artifact.bytecode)) {
        std::string token = ph.token();
        if (bytecode.find(token) == std::string::npos) continue;  // earlier pass replaced it
        const std::string& lib_name = resolution.at(token);
        auto addr_it = library_addresses.find(lib_name);
        if (addr_it == library_addresses.end()) {
            throw backend_error("node '" + node.name + "': library '" + lib_name +
                                "' has no deployed address yet");
        }
        bytecode = link_library(bytecode, ph, addr_it->second);
    }
    return bytecode;
}

namespace {

U256 integral_literal(const Literal& lit) {
    if (lit.kind == Literal::Kind::Int) {
        std::string digits = lit.text;
        if (!digits.empty() && digits[0] == '-') digits = digits.substr(1);
        return U256::from_decimal(digits);
    }
    if (lit.kind == Literal::Kind::String) {
        std::string_view body = lit.text;
        if (body.starts_with("0x") || body.starts_with("0X")) return U256::from_hex(body);
        return U256::from_decimal(body);
    }
    throw validation_error("cannot coerce literal '" + lit.text + "' to an integer type");
}

bool literal_negative(const Literal& lit) {
    return (lit.kind == Literal::Kind::Int || lit.kind == Literal::Kind::String) &&
           lit.text.starts_with("-");
}

}  // namespace

abi::Value coerce_literal(const Literal& lit, const abi::Type& type) {
    using Kind = abi::Type::Kind;
    switch (type.kind) {
        case Kind::Uint: {
            if (lit.kind == Literal::Kind::Float) {
                throw validation_error("non-integral literal '" + lit.text +
                                       "' cannot be coerced to " + type.canonical() +
                                       "; pre-scale it to an integer");
            }
            if (literal_negative(lit)) {
                throw validation_error("negative literal '" + lit.text + "' for " +
                                       type.canonical());
            }
            U256 v = integral_literal(lit);
            if (!v.fits_unsigned(type.m)) {
                throw validation_error("literal '" + lit.text + "' out of range for " +
                                       type.canonical());
            }
            return abi::Value::uint_value(v, type.m);
        }
        case Kind::Int: {
            if (lit.kind == Literal::Kind::Float) {
                throw validation_error("non-integral literal '" + lit.text +
                                       "' cannot be coerced to " + type.canonical() +
                                       "; pre-scale it to an integer");
            }
            bool negative = literal_negative(lit);
            U256 magnitude = integral_literal(lit);
            // Signed range: [-2^(m-1), 2^(m-1) - 1].
            if (negative) {
                // 2^(m-1) as a U256
                std::array<uint8_t, 32> bytes{};
                int bit = type.m - 1;
                bytes[31 - bit / 8] = static_cast<uint8_t>(1u << (bit % 8));
                U256 max_neg = U256::from_bytes(bytes.data(), bytes.size());
                if (magnitude > max_neg) {
                    throw validation_error("literal '" + lit.text + "' out of range for " +
                                           type.canonical());
                }
            } else if (!magnitude.fits_unsigned(type.m - 1)) {
                throw validation_error("literal '" + lit.text + "' out of range for " +
                                       type.canonical());
            }
            return abi::Value::int_value(negative, magnitude, type.m);
        }
        case Kind::AddressTy: {
            if (lit.kind != Literal::Kind::String) {
                throw validation_error("literal '" + lit.text +
                                       "' is not an address (expected 0x-prefixed string)");
            }
            return abi::Value::address_value(abi::Address::parse(lit.text));
        }
        case Kind::Bool: {
            if (lit.kind != Literal::Kind::Bool) {
                throw validation_error("literal '" + lit.text + "' is not a bool");
            }
            return abi::Value::bool_value(lit.text == "true");
        }
        case Kind::Bytes: {
            if (lit.kind != Literal::Kind::String || !lit.text.starts_with("0x")) {
                throw validation_error("bytes literal must be a 0x-prefixed hex string");
            }
            return abi::Value::bytes_value(hex::decode(lit.text));
        }
        case Kind::FixedBytes: {
            if (lit.kind != Literal::Kind::String || !lit.text.starts_with("0x")) {
                throw validation_error("bytes" + std::to_string(type.m) +
                                       " literal must be a 0x-prefixed hex string");
            }
            auto data = hex::decode(lit.text);
            if (data.size() != static_cast<size_t>(type.m)) {
                throw validation_error("literal '" + lit.text + "' is not exactly " +
                                       std::to_string(type.m) + " bytes");
            }
            return abi::Value::fixed_bytes_value(std::move(data));
        }
        case Kind::String: {
            if (lit.kind == Literal::Kind::List) {
                throw validation_error("list literal cannot be coerced to string");
            }
            return abi::Value::string_value(lit.text);
        }
        case Kind::Array:
        case Kind::FixedArray: {
            if (lit.kind != Literal::Kind::List) {
                throw validation_error("literal '" + lit.text + "' is not a list for " +
                                       type.canonical());
            }
            if (type.kind == Kind::FixedArray &&
                lit.items.size() != static_cast<size_t>(type.m)) {
                throw validation_error("list literal has " + std::to_string(lit.items.size()) +
                                       " items, " + type.canonical() + " expects " +
                                       std::to_string(type.m));
            }
            std::vector<abi::Value> items;
            items.reserve(lit.items.size());
            for (const auto& item : lit.items) items.push_back(coerce_literal(item, type.elems[0]));
            if (type.kind == Kind::FixedArray) {
                return abi::Value::fixed_array_value(type.elems[0], std::move(items));
            }
            return abi::Value::array_value(type.elems[0], std::move(items));
        }
        case Kind::Tuple:
            throw validation_error("tuple parameters are not supported");
    }
    throw validation_error("unsupported parameter type");
}

std::vector<abi::Value> bind_constructor(const model::ContractArtifact& artifact,
                                         const std::vector<abi::Address>& refs,
                                         const std::vector<Literal>& params) {
    const auto& signature = artifact.constructor_inputs;
    if (refs.size() + params.size() != signature.size()) {
        throw validation_error(
            "constructor arity mismatch: signature has " + std::to_string(signature.size()) +
            " parameter(s), model provides " + std::to_string(refs.size()) +
            " constructor reference(s) and " + std::to_string(params.size()) + " parameter(s)");
    }

    std::vector<bool> taken(signature.size(), false);
    std::vector<abi::Value> out(signature.size());

    size_t ref_index = 0;
    for (size_t slot = 0; slot < signature.size() && ref_index < refs.size(); ++slot) {
        if (signature[slot].kind == abi::Type::Kind::AddressTy) {
            out[slot] = abi::Value::address_value(refs[ref_index++]);
            taken[slot] = true;
        }
    }
    if (ref_index < refs.size()) {
        throw validation_error("constructor has fewer address slots than constructor "
                               "references: reference slot's ABI type is not address");
    }

    size_t param_index = 0;
    for (size_t slot = 0; slot < signature.size(); ++slot) {
        if (taken[slot]) continue;
        out[slot] = coerce_literal(params[param_index++], signature[slot]);
    }
    return out;
}

std::vector<uint8_t> encode_constructor_call(const std::string& linked_bytecode_hex,
                                             const std::vector<abi::Value>& args) {
    if (!extract_placeholders(linked_bytecode_hex).empty()) {
        throw validation_error("bytecode still contains unlinked placeholders");
    }
    auto payload = hex::decode(linked_bytecode_hex);
    auto encoded = abi::encode(args);
    payload.insert(payload.end(), encoded.begin(), encoded.end());
    return payload;
}

std::vector<uint8_t> encode_function_call(const model::ContractArtifact& artifact,
                                          const std::string& function_name,
                                          const std::vector<abi::Value>& args) {
    auto named = artifact.functions_named(function_name);
    if (named.empty()) {
        throw validation_error("function '" + function_name + "' not found in ABI");
    }
    std::vector<const model::AbiFunction*> by_arity;
    for (const auto* fn : named) {
        if (fn->inputs.size() == args.size()) by_arity.push_back(fn);
    }
    if (by_arity.empty()) {
        throw validation_error("no overload of '" + function_name + "' takes " +
                               std::to_string(args.size()) + " argument(s)");
    }
    const model::AbiFunction* chosen = nullptr;
    if (by_arity.size() == 1) {
        chosen = by_arity[0];
    } else {
        for (const auto* fn : by_arity) {
            bool exact = true;
            for (size_t i = 0; i < args.size(); ++i) {
                if (!(fn->inputs[i] == args[i].type)) {
                    exact = false;
                    break;
                }
            }
            if (exact) {
                if (chosen) {
                    throw validation_error("ambiguous overload for '" + function_name + "'");
                }
                chosen = fn;
            }
        }
        if (!chosen) {
            throw validation_error("ambiguous overload for '" + function_name +
                                   "': no exact type match");
        }
    }

    // Arguments must match the chosen signature exactly.
    for (size_t i = 0; i < args.size(); ++i) {
        if (!(chosen->inputs[i] == args[i].type)) {
            throw validation_error("argument " + std::to_string(i + 1) + " of '" +
                                   function_name + "' has type " + args[i].type.canonical() +
                                   ", expected " + chosen->inputs[i].canonical());
        }
    }

    auto sel = abi::selector(chosen->signature());
    std::vector<uint8_t> out(sel.begin(), sel.end());
    auto encoded = abi::encode(args);
    out.insert(out.end(), encoded.begin(), encoded.end());
    return out;
}

}  // namespace katena::linker
