#include <doctest.h>

#include "katena/chain.hpp"
#include "katena/errors.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"

#include <nlohmann/json.hpp>

#include <random>
#include <set>

using namespace katena;
using chain::MockChain;
using chain::Wallet;

namespace {

Wallet test_wallet(uint8_t tag = 0x11) {
    Wallet w;
    w.node_name = "wallet";
    for (auto& b : w.address.bytes) b = tag;
    return w;
}

std::vector<uint8_t> some_payload() { return {0x60, 0x01, 0x60, 0x02}; }

std::vector<uint8_t> some_calldata() { return {0xa9, 0x05, 0x9c, 0xbb, 0x00}; }

}  // namespace

TEST_CASE("mock endpoint reports the fixed chain id") {
    MockChain mock;
    auto info = mock.check_endpoint();
    CHECK(info.reachable);
    CHECK(info.chain_id == 1337);
}

TEST_CASE("mock addresses follow keccak(sender || nonce) and differ per nonce") {
    MockChain mock;
    auto w = test_wallet();

    std::vector<uint8_t> preimage(w.address.bytes.begin(), w.address.bytes.end());
    for (int i = 0; i < 8; ++i) preimage.push_back(0);
    auto digest = crypto::keccak256(std::span<const uint8_t>(preimage.data(), preimage.size()));
    auto expected_first = abi::Address::from_bytes(digest.data() + 12);

    auto first = mock.deploy(w, some_payload(), "a");
    auto second = mock.deploy(w, some_payload(), "b");
    CHECK(first.address == expected_first);
    CHECK(first.address != second.address);
    CHECK(MockChain::derive_address(w.address, 0) == first.address);
    CHECK(MockChain::derive_address(w.address, 1) == second.address);
}

TEST_CASE("two fresh mocks replay the same deploy sequence identically") {
    auto run = [] {
        MockChain mock;
        auto w = test_wallet();
        std::vector<std::string> addresses;
        for (int i = 0; i < 5; ++i) {
            addresses.push_back(mock.deploy(w, some_payload(), "n").address.to_hex());
        }
        return addresses;
    };
    CHECK(run() == run());
}

TEST_CASE("address uniqueness over randomized deploy sequences") {
    MockChain mock;
    std::mt19937 rng(5);
    std::set<std::string> seen;
    size_t total = 0;
    for (int w = 0; w < 6; ++w) {
        auto wallet = test_wallet(static_cast<uint8_t>(0x20 + w));
        size_t n = std::uniform_int_distribution<size_t>(5, 25)(rng);
        for (size_t i = 0; i < n; ++i) {
            seen.insert(mock.deploy(wallet, some_payload(), "n").address.to_hex());
            ++total;
        }
    }
    CHECK(seen.size() == total);
}

TEST_CASE("calls append to the log with the leading selector; dead targets fail") {
    MockChain mock;
    auto w = test_wallet();
    auto deployed = mock.deploy(w, some_payload(), "target");

    mock.call(w, deployed.address, some_calldata(), "target", "0x00");
    auto log = mock.call_log();
    REQUIRE(log.size() == 1);
    CHECK(log[0].selector_hex == "a9059cbb");
    CHECK(log[0].target_role == "target");

    abi::Address unknown;
    unknown.bytes[19] = 0x99;
    CHECK_THROWS_WITH_AS(mock.call(w, unknown, some_calldata(), "x", ""),
                         doctest::Contains("not alive"), Error);
}

TEST_CASE("destroy marks the entry dead, records the refund, blocks further calls") {
    MockChain mock;
    auto w = test_wallet();
    auto deployed = mock.deploy(w, some_payload(), "vault");
    auto refund = abi::Address::parse("0x00000000000000000000000000000000000000aa");

    CHECK(mock.balance_of(refund) == 0);
    mock.destroy(w, deployed.address, some_calldata(), "vault", refund);
    CHECK_FALSE(mock.alive(deployed.address));
    CHECK(mock.balance_of(refund) == 1);
    CHECK_THROWS_WITH_AS(mock.call(w, deployed.address, some_calldata(), "vault", ""),
                         doctest::Contains("not alive"), Error);

    auto log = mock.call_log();
    REQUIRE(log.size() == 1);
    CHECK(log[0].kind == "destroy");
    CHECK(log[0].args_display.find(refund.to_hex()) != std::string::npos);
}

TEST_CASE("diamond routing bookkeeping keeps selector exclusivity") {
    MockChain mock;
    auto w = test_wallet();
    auto diamond = mock.deploy(w, some_payload(), "diamond").address;
    abi::Address facet_a = MockChain::derive_address(w.address, 10);
    abi::Address facet_b = MockChain::derive_address(w.address, 11);

    mock.route_selectors(diamond, {"aa000000", "bb000000"}, facet_a);
    CHECK(mock.routing_of(diamond).size() == 2);
    CHECK_THROWS_WITH_AS(mock.route_selectors(diamond, {"aa000000"}, facet_b),
                         doctest::Contains("already routed"), Error);

    mock.reroute_selectors(diamond, {"aa000000"}, facet_b);
    CHECK(mock.routing_of(diamond).at("aa000000") == facet_b.to_hex());

    mock.unroute_selectors(diamond, {"aa000000", "bb000000"});
    CHECK(mock.routing_of(diamond).empty());
    CHECK_THROWS_WITH_AS(mock.unroute_selectors(diamond, {"aa000000"}),
                         doctest::Contains("not routed"), Error);
}

TEST_CASE("mock state serializes and restores") {
    MockChain mock;
    auto w = test_wallet();
    auto deployed = mock.deploy(w, some_payload(), "a");
    mock.call(w, deployed.address, some_calldata(), "a", "");

    auto state = mock.to_json();
    auto restored = MockChain::from_json(state);
    CHECK(restored->alive(deployed.address));
    CHECK(restored->call_log().size() == 1);
    // nonce continues rather than restarting
    auto next = restored->deploy(w, some_payload(), "b");
    CHECK(next.address == MockChain::derive_address(w.address, 1));
    CHECK(restored->to_json()["clock"].get<uint64_t>() > state["clock"].get<uint64_t>());
}

TEST_CASE("wallet resolution on the mock backend") {
    model::NodeInstance node;
    node.name = "userWallet";
    node.kind = model::NodeKind::Wallet;

    SUBCASE("publicKey taken as-is") {
        node.public_key = "0x00000000000000000000000000000000000000aa";
        auto w = chain::resolve_wallet(node, {}, /*derive_from_key=*/false);
        CHECK(w.address.to_hex() == node.public_key);
    }
    SUBCASE("derived from the node name when no publicKey is declared") {
        auto w1 = chain::resolve_wallet(node, {}, false);
        auto w2 = chain::resolve_wallet(node, {}, false);
        CHECK(w1.address == w2.address);
        CHECK_FALSE(w1.address.is_zero());
    }
}

TEST_CASE("wallet resolution for rpc derives from the key and cross-checks publicKey") {
    model::NodeInstance node;
    node.name = "userWallet";
    node.kind = model::NodeKind::Wallet;
    node.private_key = {model::SecretRef::Source::Input, "K1"};
    std::map<std::string, std::string> secrets{
        {"K1", "0000000000000000000000000000000000000000000000000000000000000001"}};

    auto w = chain::resolve_wallet(node, secrets, /*derive_from_key=*/true);
    CHECK(w.address.to_hex() == "0x7e5f4552091a69125d5dfcb7b8c2659029395bdf");

    node.public_key = "0x7E5F4552091A69125d5DfCb7b8C2659029395Bdf";
    CHECK_NOTHROW(chain::resolve_wallet(node, secrets, true));

    node.public_key = "0x00000000000000000000000000000000000000aa";
    CHECK_THROWS_WITH_AS(chain::resolve_wallet(node, secrets, true),
                         doctest::Contains("does not match"), Error);

    node.public_key.clear();
    CHECK_THROWS_WITH_AS(chain::resolve_wallet(node, {}, true),
                         doctest::Contains("not resolvable"), Error);
}

TEST_CASE("receipts are retrievable for submitted transactions") {
    MockChain mock;
    auto w = test_wallet();
    auto deployed = mock.deploy(w, some_payload(), "a");
    auto receipt = mock.get_receipt(deployed.tx_id);
    REQUIRE_FALSE(receipt.is_null());
    CHECK(receipt["status"] == "0x1");
    CHECK(receipt["contractAddress"] == deployed.address.to_hex());
    CHECK(mock.get_receipt("mock:999").is_null());
}
