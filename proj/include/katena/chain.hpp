#pragma once

#include "katena/abi.hpp"
#include "katena/model.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace katena::chain {

struct EndpointInfo {
    bool reachable = false;
    uint64_t chain_id = 0;
    std::string detail;  // client version or error text
};

// Signing/sending context for one wallet node, resolved from the secrets file
// or environment at execution time.
struct Wallet {
    std::string node_name;
    abi::Address address;
    std::vector<uint8_t> private_key;  // empty on the mock backend
};

struct TxResult {
    abi::Address address;  // deployments only
    std::string tx_id;
};

class ChainBackend {
public:
    virtual ~ChainBackend() = default;

    virtual std::string name() const = 0;
    virtual EndpointInfo check_endpoint() = 0;
    virtual TxResult deploy(const Wallet& wallet, const std::vector<uint8_t>& payload,
                            const std::string& node_role) = 0;
    virtual std::string call(const Wallet& wallet, const abi::Address& target,
                             const std::vector<uint8_t>& calldata, const std::string& target_role,
                             const std::string& args_display) = 0;
    virtual std::string destroy(const Wallet& wallet, const abi::Address& target,
                                const std::vector<uint8_t>& calldata,
                                const std::string& target_role,
                                const abi::Address& refund_address) = 0;
    // Receipt for a submitted transaction as a JSON document ("status",
    // "contractAddress" when applicable); null when unknown/not yet mined.
    virtual nlohmann::ordered_json get_receipt(const std::string& tx_id) = 0;
    virtual uint64_t balance_of(const abi::Address& address) = 0;

    // Timestamp source for record history: a logical tick on the mock keeps
    // records byte-identical across runs, wall-clock seconds on RPC.
    virtual uint64_t now() = 0;

    // Diamond routing bookkeeping; a real chain tracks routing itself.
    virtual void route_selectors(const abi::Address& diamond,
                                 const std::vector<std::string>& selectors,
                                 const abi::Address& facet) {
        (void)diamond, (void)selectors, (void)facet;
    }
    virtual void unroute_selectors(const abi::Address& diamond,
                                   const std::vector<std::string>& selectors) {
        (void)diamond, (void)selectors;
    }
    virtual void reroute_selectors(const abi::Address& diamond,
                                   const std::vector<std::string>& selectors,
                                   const abi::Address& facet) {
        (void)diamond, (void)selectors, (void)facet;
    }
};

// In-memory deterministic chain. Addresses are the low 20 bytes of
// keccak256(sender || nonce as 8-byte big-endian); this is intentionally
// simpler than real CREATE derivation and documented as such.
class MockChain : public ChainBackend {
public:
    static constexpr uint64_t kChainId = 1337;

    struct RegistryEntry {
        std::string bytecode_hash;
        std::string args_display;
        std::string node_role;
        bool alive = true;
    };

    struct TxEvent {
        std::string kind;  // "deploy" | "call" | "destroy"
        std::string caller;
        std::string target;        // address (empty for deploys until assigned)
        std::string target_role;   // model node name
        std::string selector_hex;  // calls only
        std::string args_display;
        std::string tx_id;
    };

    std::string name() const override { return "mock"; }
    EndpointInfo check_endpoint() override;
    TxResult deploy(const Wallet& wallet, const std::vector<uint8_t>& payload,
                    const std::string& node_role) override;
    std::string call(const Wallet& wallet, const abi::Address& target,
                     const std::vector<uint8_t>& calldata, const std::string& target_role,
                     const std::string& args_display) override;
    std::string destroy(const Wallet& wallet, const abi::Address& target,
                        const std::vector<uint8_t>& calldata, const std::string& target_role,
                        const abi::Address& refund_address) override;
    nlohmann::ordered_json get_receipt(const std::string& tx_id) override;
    uint64_t balance_of(const abi::Address& address) override;
    uint64_t now() override;

    void route_selectors(const abi::Address& diamond, const std::vector<std::string>& selectors,
                         const abi::Address& facet) override;
    void unroute_selectors(const abi::Address& diamond,
                           const std::vector<std::string>& selectors) override;
    void reroute_selectors(const abi::Address& diamond,
                           const std::vector<std::string>& selectors,
                           const abi::Address& facet) override;

    static abi::Address derive_address(const abi::Address& sender, uint64_t nonce);

    // Inspection helpers for tests and the CLI's mock-state file.
    std::vector<TxEvent> tx_log() const;
    std::vector<TxEvent> call_log() const;  // call/destroy events only
    std::map<std::string, std::string> routing_of(const abi::Address& diamond) const;
    bool alive(const abi::Address& address) const;
    size_t registry_size() const;

    nlohmann::ordered_json to_json() const;
    static std::unique_ptr<MockChain> from_json(const nlohmann::json& state);

private:
    mutable std::mutex mutex_;
    std::map<std::string, RegistryEntry> registry_;  // address hex -> entry
    std::map<std::string, uint64_t> nonces_;         // sender hex -> next nonce
    std::map<std::string, std::map<std::string, std::string>> routing_;  // diamond -> sel -> facet
    std::map<std::string, uint64_t> balances_;
    std::vector<TxEvent> log_;
    uint64_t clock_ = 0;

    std::string next_tx_id();
};

// Resolves a wallet node into a signing context. On the mock backend the
// address is the declared publicKey or, failing that, a digest of the node
// name; RPC derives it from the private key and cross-checks publicKey.
Wallet resolve_wallet(const model::NodeInstance& wallet_node,
                      const std::map<std::string, std::string>& secrets, bool derive_from_key);

}  // namespace katena::chain
