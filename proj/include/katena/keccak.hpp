#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace katena::crypto {

using Hash256 = std::array<uint8_t, 32>;

// Keccak-256 with the original 0x01 domain padding (the Ethereum variant,
// not FIPS-202 SHA3-256).
Hash256 keccak256(std::span<const uint8_t> data);
Hash256 keccak256(std::string_view data);

std::string keccak256_hex(std::string_view data);

// First 4 bytes of keccak256 of a canonical signature, as 8 lowercase hex chars.
std::string selector_hex(std::string_view canonical_signature);

}  // namespace katena::crypto
