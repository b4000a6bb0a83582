#include "katena/chain.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"
#include "katena/signing.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>

namespace katena::chain {

EndpointInfo MockChain::check_endpoint() {
    return {true, kChainId, "katena-mock"};
}

abi::Address MockChain::derive_address(const abi::Address& sender, uint64_t nonce) {
    std::vector<uint8_t> preimage(sender.bytes.begin(), sender.bytes.end());
    for (int i = 7; i >= 0; --i) preimage.push_back(static_cast<uint8_t>(nonce >> (i * 8)));
    auto digest = crypto::keccak256(std::span<const uint8_t>(preimage.data(), preimage.size()));
    return abi::Address::from_bytes(digest.data() + 12);
}

std::string MockChain::next_tx_id() {
    return "mock:" + std::to_string(log_.size());
}

TxResult MockChain::deploy(const Wallet& wallet, const std::vector<uint8_t>& payload,
                           const std::string& node_role) {
    if (payload.empty()) throw backend_error("empty deploy payload");
    std::lock_guard<std::mutex> lock(mutex_);
    uint64_t nonce = nonces_[wallet.address.to_hex()]++;
    abi::Address address = derive_address(wallet.address, nonce);
    std::string addr_hex = address.to_hex();
    if (auto it = registry_.find(addr_hex); it != registry_.end() && it->second.alive) {
        throw backend_error("address collision at " + addr_hex);
    }
    RegistryEntry entry;
    entry.bytecode_hash =
        hex::encode(crypto::keccak256(std::span<const uint8_t>(payload.data(), payload.size())));
    entry.node_role = node_role;
    registry_[addr_hex] = std::move(entry);

    TxEvent event{"deploy", wallet.address.to_hex(), addr_hex, node_role, "", "", next_tx_id()};
    log_.push_back(event);
    ++clock_;
    return {address, event.tx_id};
}

std::string MockChain::call(const Wallet& wallet, const abi::Address& target,
                            const std::vector<uint8_t>& calldata, const std::string& target_role,
                            const std::string& args_display) {
    if (calldata.size() < 4) throw backend_error("calldata shorter than a selector");
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = registry_.find(target.to_hex());
    if (it == registry_.end() || !it->second.alive) {
        throw backend_error("call target " + target.to_hex() + " is not alive");
    }
    TxEvent event{"call",
                  wallet.address.to_hex(),
                  target.to_hex(),
                  target_role,
                  hex::encode(std::span<const uint8_t>(calldata.data(), 4)),
                  args_display,
                  next_tx_id()};
    log_.push_back(event);
    ++clock_;
    return log_.back().tx_id;
}

std::string MockChain::destroy(const Wallet& wallet, const abi::Address& target,
                               const std::vector<uint8_t>& calldata,
                               const std::string& target_role,
                               const abi::Address& refund_address) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = registry_.find(target.to_hex());
    if (it == registry_.end() || !it->second.alive) {
        throw backend_error("destroy target " + target.to_hex() + " is not alive");
    }
    it->second.alive = false;
    balances_[refund_address.to_hex()] += 1;  // refund marker, not real value accounting
    std::string selector =
        calldata.size() >= 4 ? hex::encode(std::span<const uint8_t>(calldata.data(), 4)) : "";
    TxEvent event{"destroy",
                  wallet.address.to_hex(),
                  target.to_hex(),
                  target_role,
                  selector,
                  "refund=" + refund_address.to_hex(),
                  next_tx_id()};
    log_.push_back(event);
    ++clock_;
    return log_.back().tx_id;
}

nlohmann::ordered_json MockChain::get_receipt(const std::string& tx_id) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const auto& e : log_) {
        if (e.tx_id != tx_id) continue;
        nlohmann::ordered_json receipt;
        receipt["status"] = "0x1";
        receipt["transactionHash"] = e.tx_id;
        if (e.kind == "deploy") {
            receipt["contractAddress"] = e.target;
        } else {
            receipt["contractAddress"] = nullptr;
        }
        return receipt;
    }
    return nlohmann::ordered_json(nullptr);
}

uint64_t MockChain::balance_of(const abi::Address& address) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = balances_.find(address.to_hex());
    return it == balances_.end() ? 0 : it->second;
}

uint64_t MockChain::now() {
    std::lock_guard<std::mutex> lock(mutex_);
    return clock_;
}

void MockChain::route_selectors(const abi::Address& diamond,
                                const std::vector<std::string>& selectors,
                                const abi::Address& facet) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& table = routing_[diamond.to_hex()];
    for (const auto& sel : selectors) {
        auto [it, inserted] = table.emplace(sel, facet.to_hex());
        if (!inserted) {
            throw backend_error("selector 0x" + sel + " already routed on " + diamond.to_hex());
        }
    }
}

void MockChain::unroute_selectors(const abi::Address& diamond,
                                  const std::vector<std::string>& selectors) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& table = routing_[diamond.to_hex()];
    for (const auto& sel : selectors) {
        if (table.erase(sel) == 0) {
            throw backend_error("selector 0x" + sel + " not routed on " + diamond.to_hex());
        }
    }
    if (table.empty()) routing_.erase(diamond.to_hex());
}

void MockChain::reroute_selectors(const abi::Address& diamond,
                                  const std::vector<std::string>& selectors,
                                  const abi::Address& facet) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto& table = routing_[diamond.to_hex()];
    for (const auto& sel : selectors) {
        auto it = table.find(sel);
        if (it == table.end()) {
            throw backend_error("selector 0x" + sel + " not routed on " + diamond.to_hex());
        }
        it->second = facet.to_hex();
    }
}

std::vector<MockChain::TxEvent> MockChain::tx_log() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return log_;
}

std::vector<MockChain::TxEvent> MockChain::call_log() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<TxEvent> out;
    for (const auto& e : log_) {
        if (e.kind != "deploy") out.push_back(e);
    }
    return out;
}

std::map<std::string, std::string> MockChain::routing_of(const abi::Address& diamond) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = routing_.find(diamond.to_hex());
    return it == routing_.end() ? std::map<std::string, std::string>{} : it->second;
}

bool MockChain::alive(const abi::Address& address) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = registry_.find(address.to_hex());
    return it != registry_.end() && it->second.alive;
}

size_t MockChain::registry_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return registry_.size();
}

nlohmann::ordered_json MockChain::to_json() const {
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::ordered_json j;
    j["chainId"] = kChainId;
    j["clock"] = clock_;
    auto registry = nlohmann::ordered_json::object();
    for (const auto& [addr, entry] : registry_) {
        registry[addr] = {{"bytecodeHash", entry.bytecode_hash},
                          {"node", entry.node_role},
                          {"alive", entry.alive}};
    }
    j["registry"] = std::move(registry);
    j["nonces"] = nonces_;
    j["routing"] = routing_;
    j["balances"] = balances_;
    auto log = nlohmann::ordered_json::array();
    for (const auto& e : log_) {
        log.push_back({{"kind", e.kind},
                       {"caller", e.caller},
                       {"target", e.target},
                       {"role", e.target_role},
                       {"selector", e.selector_hex},
                       {"args", e.args_display},
                       {"tx", e.tx_id}});
    }
    j["log"] = std::move(log);
    return j;
}

std::unique_ptr<MockChain> MockChain::from_json(const nlohmann::json& state) {
    auto owned = std::make_unique<MockChain>();
    MockChain& chain = *owned;
    chain.clock_ = state.value("clock", 0ULL);
    const nlohmann::json registry = state.value("registry", nlohmann::json::object());
    for (const auto& [addr, entry] : registry.items()) {
        RegistryEntry e;
        e.bytecode_hash = entry.value("bytecodeHash", "");
        e.node_role = entry.value("node", "");
        e.alive = entry.value("alive", true);
        chain.registry_[addr] = std::move(e);
    }
    const nlohmann::json nonces = state.value("nonces", nlohmann::json::object());
    for (const auto& [sender, nonce] : nonces.items()) {
        chain.nonces_[sender] = nonce.get<uint64_t>();
    }
    const nlohmann::json routing = state.value("routing", nlohmann::json::object());
    for (const auto& [diamond, table] : routing.items()) {
        for (const auto& [sel, facet] : table.items()) {
            chain.routing_[diamond][sel] = facet.get<std::string>();
        }
    }
    const nlohmann::json balances = state.value("balances", nlohmann::json::object());
    for (const auto& [addr, bal] : balances.items()) {
        chain.balances_[addr] = bal.get<uint64_t>();
    }
    for (const auto& e : state.value("log", nlohmann::json::array())) {
        chain.log_.push_back({e.value("kind", ""), e.value("caller", ""), e.value("target", ""),
                              e.value("role", ""), e.value("selector", ""), e.value("args", ""),
                              e.value("tx", "")});
    }
    return owned;
}

Wallet resolve_wallet(const model::NodeInstance& wallet_node,
                      const std::map<std::string, std::string>& secrets, bool derive_from_key) {
    Wallet wallet;
    wallet.node_name = wallet_node.name;

    std::string key_hex;
    switch (wallet_node.private_key.source) {
        case model::SecretRef::Source::Inline:
            key_hex = wallet_node.private_key.value;
            break;
        case model::SecretRef::Source::Input: {
            auto it = secrets.find(wallet_node.private_key.value);
            if (it != secrets.end()) key_hex = it->second;
            break;
        }
        case model::SecretRef::Source::Env: {
            const char* v = std::getenv(wallet_node.private_key.value.c_str());
            if (v) key_hex = v;
            break;
        }
        case model::SecretRef::Source::None: break;
    }

    if (derive_from_key) {
        if (key_hex.empty()) {
            throw backend_error("wallet '" + wallet_node.name +
                                "': private key not resolvable from secrets or environment");
        }
        wallet.private_key = hex::decode(key_hex);
        if (wallet.private_key.size() != 32) {
            throw backend_error("wallet '" + wallet_node.name +
                                "': private key must be 32 bytes");
        }
        wallet.address = crypto::address_from_private_key(wallet.private_key);
        if (!wallet_node.public_key.empty()) {
            auto declared = abi::Address::parse(wallet_node.public_key);
            if (!(declared == wallet.address)) {
                throw backend_error("wallet '" + wallet_node.name + "': declared publicKey " +
                                    declared.to_hex() + " does not match the key-derived " +
                                    wallet.address.to_hex());
            }
        }
        return wallet;
    }

    // Mock backend: the declared publicKey is taken as-is; otherwise derive a
    // stable pseudo-address from the node name so secrets are not required.
    if (!wallet_node.public_key.empty()) {
        wallet.address = abi::Address::parse(wallet_node.public_key);
    } else {
        auto digest = crypto::keccak256("katena-mock-wallet:" + wallet_node.name);
        wallet.address = abi::Address::from_bytes(digest.data() + 12);
    }
    return wallet;
}

}  // namespace katena::chain
