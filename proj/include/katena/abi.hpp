#pragma once

#include "katena/u256.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace katena::abi {

struct Address {
    std::array<uint8_t, 20> bytes{};

    static Address parse(std::string_view hex_with_prefix);
    static Address from_bytes(const uint8_t* data);
    std::string to_hex() const;       // 0x-prefixed lowercase
    std::string to_hex_bare() const;  // 40 lowercase chars, no prefix
    bool is_zero() const;

    auto operator<=>(const Address&) const = default;
};

// Checksum per the mixed-case address encoding; `candidate` must be 0x + 40 hex.
bool checksum_ok(std::string_view candidate);

struct Type {
    enum class Kind {
        Uint,        // bits in `m`
        Int,         // bits in `m`
        AddressTy,
        Bool,
        Bytes,       // dynamic
        FixedBytes,  // size in `m`, 1..32
        String,
        Array,       // dynamic length, element in elems[0]
        FixedArray,  // length in `m`, element in elems[0]
        Tuple,       // components in elems (selector computation only, not encodable)
    };

    Kind kind = Kind::Uint;
    int m = 256;
    std::vector<Type> elems;

    static Type uint_t(int bits = 256);
    static Type int_t(int bits = 256);
    static Type address_t();
    static Type bool_t();
    static Type bytes_t();
    static Type fixed_bytes_t(int size);
    static Type string_t();
    static Type array_of(Type elem);
    static Type fixed_array_of(Type elem, int len);

    // Parses "uint256", "address[2]", "bytes32[]", ... Throws on unknown types.
    static Type parse(std::string_view text);
    // Builds from one ABI JSON input entry (handles "tuple" with "components").
    static Type from_abi_json(const nlohmann::json& input);

    std::string canonical() const;
    bool is_dynamic() const;
    // True for types the v1 encoder can produce (everything except tuples).
    bool encodable() const;

    bool operator==(const Type& rhs) const;
};

struct Value {
    Type type;
    U256 num;                   // Uint/Int payload (Int stored two's complement)
    bool boolean = false;
    std::vector<uint8_t> data;  // Address / Bytes / FixedBytes / String payload
    std::vector<Value> items;   // array elements

    static Value uint_value(U256 v, int bits = 256);
    static Value int_value(bool negative, U256 magnitude, int bits = 256);
    static Value address_value(const Address& a);
    static Value bool_value(bool b);
    static Value bytes_value(std::vector<uint8_t> b);
    static Value fixed_bytes_value(std::vector<uint8_t> b);
    static Value string_value(std::string_view s);
    static Value array_value(Type elem, std::vector<Value> items);
    static Value fixed_array_value(Type elem, std::vector<Value> items);

    // Human-readable form used in logs and the mock call log.
    std::string to_display() const;
};

// Standard head/tail encoding of an argument list.
std::vector<uint8_t> encode(const std::vector<Value>& args);

// 4-byte selector (as bytes) for a canonical signature.
std::array<uint8_t, 4> selector(std::string_view canonical_signature);

std::string canonical_signature(std::string_view name, const std::vector<Type>& inputs);

}  // namespace katena::abi
