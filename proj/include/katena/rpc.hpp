#pragma once

#include "katena/chain.hpp"

#include <chrono>
#include <memory>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace katena::chain {

struct RpcOptions {
    std::string url;                  // http(s)://host[:port][/path]
    std::string auth_secret;          // node service provider secret
    std::string auth_scheme = "bearer";  // "bearer" | "path"
    std::optional<uint64_t> expected_chain_id;
    uint64_t gas_price = 1'000'000'000;  // 1 gwei
    uint64_t gas_limit = 8'000'000;
    std::chrono::milliseconds poll_interval{500};
    int max_poll_attempts = 60;
    std::chrono::seconds connect_timeout{5};
    std::chrono::seconds read_timeout{30};
};

// JSON-RPC 2.0 client speaking eth_chainId, eth_getTransactionCount,
// eth_sendRawTransaction, eth_getTransactionReceipt, eth_call and
// eth_getBalance. Transactions are legacy format, locally signed.
class RpcBackend : public ChainBackend {
public:
    explicit RpcBackend(RpcOptions options);
    ~RpcBackend() override;

    std::string name() const override { return "rpc"; }
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

    // Read-only eth_call, exposed for endpoint checks and tooling.
    std::string eth_call(const abi::Address& target, const std::vector<uint8_t>& calldata);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace katena::chain
