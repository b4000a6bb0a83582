#pragma once

#include "katena/abi.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace katena::model {

struct AbiFunction {
    std::string name;
    std::vector<abi::Type> inputs;
    std::string state_mutability;

    std::string signature() const;     // canonical "name(type,...)"
    std::string selector_hex() const;  // 8 lowercase hex chars
};

// Parsed ABI + bytecode of one compiled contract or library.
struct ContractArtifact {
    std::string source_name;    // e.g. "contracts/Voting.sol"
    std::string contract_name;  // e.g. "Voting"
    std::string bytecode;       // hex, no 0x prefix, may contain link placeholders
    std::vector<abi::Type> constructor_inputs;
    std::vector<AbiFunction> functions;

    bool has_constructor = false;

    const AbiFunction* find_function(const std::string& name, size_t arity) const;
    std::vector<const AbiFunction*> functions_named(const std::string& name) const;
};

// Accepted layouts: {"abi": [...], "bytecode": "0x..."} or the compiler's
// nested form {"abi": [...], "evm": {"bytecode": {"object": "..."}}}.
ContractArtifact load_artifact(const std::string& path);

ContractArtifact parse_artifact_json(const std::string& text, const std::string& origin);

// Directory-backed store: "Voting" resolves to <dir>/Voting.json. Loads are
// cached; safe to share across threads.
class ArtifactStore {
public:
    explicit ArtifactStore(std::string directory) : directory_(std::move(directory)) {}

    const ContractArtifact& get(const std::string& abi_ref) const;
    std::string resolve_path(const std::string& abi_ref) const;
    const std::string& directory() const { return directory_; }

private:
    std::string directory_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::unique_ptr<ContractArtifact>> cache_;
};

}  // namespace katena::model
