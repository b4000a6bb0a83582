#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace katena {

// Minimal unsigned 256-bit integer, enough for ABI word arithmetic:
// decimal/hex parsing, range checks against uintN/intN widths, and
// two's-complement negation for signed values.
class U256 {
public:
    U256() : limbs_{} {}
    explicit U256(uint64_t v) : limbs_{v, 0, 0, 0} {}

    // Parses "123", "0x1f", or "-42" is NOT accepted here (sign handled by caller).
    static U256 from_decimal(std::string_view s);
    static U256 from_hex(std::string_view s);
    // Big-endian bytes, at most 32.
    static U256 from_bytes(const uint8_t* data, size_t len);

    std::array<uint8_t, 32> to_bytes32() const;
    std::string to_decimal() const;
    std::string to_hex() const;  // minimal form, no leading zeros, no prefix

    bool is_zero() const;
    // Number of significant bits (0 for zero).
    int bit_length() const;
    // True iff value < 2^bits.
    bool fits_unsigned(int bits) const;

    U256 operator+(const U256& rhs) const;
    U256 operator-(const U256& rhs) const;
    U256 twos_complement_negate() const;

    std::strong_ordering operator<=>(const U256& rhs) const;
    bool operator==(const U256& rhs) const = default;

    uint64_t low64() const { return limbs_[0]; }

private:
    // Little-endian limbs.
    std::array<uint64_t, 4> limbs_;

    U256 mul_small(uint64_t m) const;
    U256 add_small(uint64_t a) const;
    uint64_t divmod_small(uint64_t d);  // in-place divide, returns remainder
};

}  // namespace katena
