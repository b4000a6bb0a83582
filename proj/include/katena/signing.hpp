#pragma once

#include "katena/abi.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace katena::crypto {

// RLP encoding, enough for legacy transactions.
std::vector<uint8_t> rlp_encode_string(const std::vector<uint8_t>& data);
std::vector<uint8_t> rlp_encode_list(const std::vector<std::vector<uint8_t>>& items);
// Minimal big-endian integer bytes (empty for zero).
std::vector<uint8_t> rlp_quantity(uint64_t value);

struct LegacyTransaction {
    uint64_t nonce = 0;
    uint64_t gas_price = 0;
    uint64_t gas_limit = 0;
    std::optional<abi::Address> to;  // empty for contract creation
    uint64_t value = 0;
    std::vector<uint8_t> data;
};

// Address = low 20 bytes of keccak256 of the uncompressed public key.
abi::Address address_from_private_key(const std::vector<uint8_t>& private_key);

// EIP-155 signed raw transaction bytes (v = 35 + 2*chain_id + recovery id).
std::vector<uint8_t> sign_legacy_transaction(const LegacyTransaction& tx, uint64_t chain_id,
                                             const std::vector<uint8_t>& private_key);

}  // namespace katena::crypto
