#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace katena::hex {

bool is_hex_digit(char c);
bool is_hex(std::string_view s);

// Drops a leading "0x"/"0X" if present.
std::string_view strip_prefix(std::string_view s);

// Lowercase hex, no prefix.
std::string encode(std::span<const uint8_t> bytes);

// Accepts optional 0x prefix; throws Usage error on odd length or bad digits.
std::vector<uint8_t> decode(std::string_view s);

std::string to_lower(std::string_view s);

}  // namespace katena::hex
