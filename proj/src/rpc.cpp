#include "katena/rpc.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"
#include "katena/signing.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <thread>

namespace katena::chain {

using nlohmann::json;

namespace {

struct ParsedUrl {
    std::string scheme_host_port;  // httplib client target
    std::string path;
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw usage_error("rpc url '" + url + "' must start with http:// or https://");
    }
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

uint64_t parse_quantity(const std::string& hex_text) {
    std::string_view body = hex::strip_prefix(hex_text);
    if (body.empty()) return 0;
    return std::stoull(std::string(body), nullptr, 16);
}

}  // namespace

struct RpcBackend::Impl {
    RpcOptions options;
    httplib::Client client;
    std::string path;
    uint64_t next_id = 1;

    explicit Impl(RpcOptions opts, const ParsedUrl& url)
        : options(std::move(opts)), client(url.scheme_host_port), path(url.path) {
        client.set_connection_timeout(options.connect_timeout);
        client.set_read_timeout(options.read_timeout);
        if (!options.auth_secret.empty() && options.auth_scheme == "bearer") {
            client.set_default_headers(
                {{"Authorization", "Bearer " + options.auth_secret}});
        }
        if (!options.auth_secret.empty() && options.auth_scheme == "path") {
            if (!path.ends_with("/")) path += "/";
            path += options.auth_secret;
        }
    }

    json request(const std::string& method, const json& params) {
        json body = {{"jsonrpc", "2.0"}, {"method", method}, {"params", params},
                     {"id", next_id++}};
        auto res = client.Post(path, body.dump(), "application/json");
        if (!res) {
            throw backend_error("rpc: cannot reach endpoint (" +
                                httplib::to_string(res.error()) + ")");
        }
        if (res->status == 401 || res->status == 403) {
            throw backend_error("rpc: endpoint rejected credentials (HTTP " +
                                std::to_string(res->status) + ")");
        }
        if (res->status != 200) {
            throw backend_error("rpc: HTTP " + std::to_string(res->status));
        }
        json doc;
        try {
            doc = json::parse(res->body);
        } catch (const json::exception& e) {
            throw backend_error(std::string("rpc: invalid JSON-RPC response: ") + e.what());
        }
        if (doc.contains("error") && !doc["error"].is_null()) {
            throw backend_error("rpc: " + method + " failed: " +
                                doc["error"].value("message", doc["error"].dump()));
        }
        if (!doc.contains("result")) {
            throw backend_error("rpc: " + method + " returned no result");
        }
        return doc["result"];
    }

    json await_receipt(const std::string& tx_hash) {
        for (int attempt = 0; attempt < options.max_poll_attempts; ++attempt) {
            json receipt = request("eth_getTransactionReceipt", json::array({tx_hash}));
            if (!receipt.is_null()) return receipt;
            std::this_thread::sleep_for(options.poll_interval);
        }
        throw backend_error("rpc: transaction " + tx_hash + " not mined within " +
                            std::to_string(options.max_poll_attempts) + " polls");
    }

    std::string send_transaction(const Wallet& wallet, std::optional<abi::Address> to,
                                 const std::vector<uint8_t>& data, uint64_t chain_id) {
        if (wallet.private_key.empty()) {
            throw backend_error("rpc: wallet '" + wallet.node_name + "' has no resolved key");
        }
        uint64_t nonce = parse_quantity(
            request("eth_getTransactionCount",
                    json::array({wallet.address.to_hex(), "pending"}))
                .get<std::string>());
        crypto::LegacyTransaction tx;
        tx.nonce = nonce;
        tx.gas_price = options.gas_price;
        tx.gas_limit = options.gas_limit;
        tx.to = to;
        tx.value = 0;
        tx.data = data;
        auto raw = crypto::sign_legacy_transaction(tx, chain_id, wallet.private_key);
        std::string raw_hex =
            "0x" + hex::encode(std::span<const uint8_t>(raw.data(), raw.size()));
        return request("eth_sendRawTransaction", json::array({raw_hex})).get<std::string>();
    }

    uint64_t chain_id() { return parse_quantity(request("eth_chainId", json::array()).get<std::string>()); }
};

RpcBackend::RpcBackend(RpcOptions options) {
    auto url = split_url(options.url);
    impl_ = std::make_unique<Impl>(std::move(options), url);
}

RpcBackend::~RpcBackend() = default;

EndpointInfo RpcBackend::check_endpoint() {
    EndpointInfo info;
    try {
        info.chain_id = impl_->chain_id();
        info.reachable = true;
        try {
            info.detail = impl_->request("web3_clientVersion", json::array()).get<std::string>();
        } catch (const Error&) {
            info.detail = "chain id " + std::to_string(info.chain_id);
        }
        if (impl_->options.expected_chain_id &&
            *impl_->options.expected_chain_id != info.chain_id) {
            throw backend_error("rpc: endpoint reports chain id " +
                                std::to_string(info.chain_id) + ", model expects " +
                                std::to_string(*impl_->options.expected_chain_id));
        }
    } catch (const Error& e) {
        info.reachable = false;
        info.detail = e.what();
        throw;
    }
    return info;
}

TxResult RpcBackend::deploy(const Wallet& wallet, const std::vector<uint8_t>& payload,
                            const std::string& node_role) {
    if (payload.empty()) throw backend_error("empty deploy payload");
    uint64_t chain = impl_->chain_id();
    std::string tx_hash = impl_->send_transaction(wallet, std::nullopt, payload, chain);
    json receipt = impl_->await_receipt(tx_hash);
    if (parse_quantity(receipt.value("status", "0x0")) != 1) {
        throw backend_error("rpc: deployment of '" + node_role + "' reverted (tx " + tx_hash +
                            ")");
    }
    std::string contract_address = receipt.value("contractAddress", "");
    if (contract_address.empty() || contract_address == "null") {
        throw backend_error("rpc: receipt for '" + node_role + "' carries no contractAddress");
    }
    return {abi::Address::parse(contract_address), tx_hash};
}

std::string RpcBackend::call(const Wallet& wallet, const abi::Address& target,
                             const std::vector<uint8_t>& calldata,
                             const std::string& target_role, const std::string&) {
    uint64_t chain = impl_->chain_id();
    std::string tx_hash = impl_->send_transaction(wallet, target, calldata, chain);
    json receipt = impl_->await_receipt(tx_hash);
    if (parse_quantity(receipt.value("status", "0x0")) != 1) {
        throw backend_error("rpc: call to '" + target_role + "' reverted (tx " + tx_hash + ")");
    }
    return tx_hash;
}

std::string RpcBackend::destroy(const Wallet& wallet, const abi::Address& target,
                                const std::vector<uint8_t>& calldata,
                                const std::string& target_role, const abi::Address&) {
    return call(wallet, target, calldata, target_role, "");
}

nlohmann::ordered_json RpcBackend::get_receipt(const std::string& tx_id) {
    json receipt = impl_->request("eth_getTransactionReceipt", json::array({tx_id}));
    return nlohmann::ordered_json::parse(receipt.dump());
}

uint64_t RpcBackend::balance_of(const abi::Address& address) {
    return parse_quantity(
        impl_->request("eth_getBalance", json::array({address.to_hex(), "latest"}))
            .get<std::string>());
}

uint64_t RpcBackend::now() {
    return static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
}

std::string RpcBackend::eth_call(const abi::Address& target,
                                 const std::vector<uint8_t>& calldata) {
    json params = json::array(
        {{{"to", target.to_hex()},
          {"data", "0x" + hex::encode(std::span<const uint8_t>(calldata.data(),
                                                               calldata.size()))}},
         "latest"});
    return impl_->request("eth_call", params).get<std::string>();
}

}  // namespace katena::chain
