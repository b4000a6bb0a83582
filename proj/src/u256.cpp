#include "katena/u256.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"

#include <algorithm>
#include <bit>

namespace katena {

U256 U256::mul_small(uint64_t m) const {
    U256 out;
    unsigned __int128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        unsigned __int128 prod = static_cast<unsigned __int128>(limbs_[i]) * m + carry;
        out.limbs_[i] = static_cast<uint64_t>(prod);
        carry = prod >> 64;
    }
    if (carry != 0) throw usage_error("integer literal does not fit in 256 bits");
    return out;
}

U256 U256::add_small(uint64_t a) const {
    U256 out = *this;
    unsigned __int128 carry = a;
    for (int i = 0; i < 4 && carry != 0; ++i) {
        unsigned __int128 sum = static_cast<unsigned __int128>(out.limbs_[i]) + carry;
        out.limbs_[i] = static_cast<uint64_t>(sum);
        carry = sum >> 64;
    }
    if (carry != 0) throw usage_error("integer literal does not fit in 256 bits");
    return out;
}

uint64_t U256::divmod_small(uint64_t d) {
    unsigned __int128 rem = 0;
    for (int i = 3; i >= 0; --i) {
        unsigned __int128 cur = (rem << 64) | limbs_[i];
        limbs_[i] = static_cast<uint64_t>(cur / d);
        rem = cur % d;
    }
    return static_cast<uint64_t>(rem);
}

U256 U256::from_decimal(std::string_view s) {
    if (s.empty()) throw usage_error("empty integer literal");
    U256 out;
    for (char c : s) {
        if (c < '0' || c > '9') throw usage_error("invalid decimal digit in '" + std::string(s) + "'");
        out = out.mul_small(10).add_small(static_cast<uint64_t>(c - '0'));
    }
    return out;
}

U256 U256::from_hex(std::string_view s) {
    s = hex::strip_prefix(s);
    if (s.empty() || s.size() > 64 || !hex::is_hex(s)) {
        throw usage_error("invalid 256-bit hex literal");
    }
    std::string padded(64 - s.size(), '0');
    padded += hex::to_lower(s);
    auto bytes = hex::decode(padded);
    return from_bytes(bytes.data(), bytes.size());
}

U256 U256::from_bytes(const uint8_t* data, size_t len) {
    if (len > 32) throw usage_error("more than 32 bytes for a 256-bit value");
    U256 out;
    for (size_t i = 0; i < len; ++i) {
        size_t bit_pos = (len - 1 - i) * 8;
        out.limbs_[bit_pos / 64] |= static_cast<uint64_t>(data[i]) << (bit_pos % 64);
    }
    return out;
}

std::array<uint8_t, 32> U256::to_bytes32() const {
    std::array<uint8_t, 32> out{};
    for (int i = 0; i < 32; ++i) {
        int bit_pos = (31 - i) * 8;
        out[i] = static_cast<uint8_t>(limbs_[bit_pos / 64] >> (bit_pos % 64));
    }
    return out;
}

std::string U256::to_decimal() const {
    if (is_zero()) return "0";
    U256 tmp = *this;
    std::string out;
    while (!tmp.is_zero()) {
        out.push_back(static_cast<char>('0' + tmp.divmod_small(10)));
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string U256::to_hex() const {
    auto bytes = to_bytes32();
    std::string full = hex::encode(bytes);
    size_t first = full.find_first_not_of('0');
    if (first == std::string::npos) return "0";
    return full.substr(first);
}

bool U256::is_zero() const {
    return limbs_[0] == 0 && limbs_[1] == 0 && limbs_[2] == 0 && limbs_[3] == 0;
}

int U256::bit_length() const {
    for (int i = 3; i >= 0; --i) {
        if (limbs_[i] != 0) {
            return i * 64 + (64 - std::countl_zero(limbs_[i]));
        }
    }
    return 0;
}

bool U256::fits_unsigned(int bits) const { return bit_length() <= bits; }

U256 U256::operator+(const U256& rhs) const {
    U256 out;
    unsigned __int128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        unsigned __int128 sum =
            static_cast<unsigned __int128>(limbs_[i]) + rhs.limbs_[i] + carry;
        out.limbs_[i] = static_cast<uint64_t>(sum);
        carry = sum >> 64;
    }
    return out;  // wraps mod 2^256
}

U256 U256::operator-(const U256& rhs) const {
    return *this + rhs.twos_complement_negate();
}

U256 U256::twos_complement_negate() const {
    U256 out;
    for (int i = 0; i < 4; ++i) out.limbs_[i] = ~limbs_[i];
    return out.operator+(U256(1));
}

std::strong_ordering U256::operator<=>(const U256& rhs) const {
    for (int i = 3; i >= 0; --i) {
        if (limbs_[i] != rhs.limbs_[i]) {
            return limbs_[i] < rhs.limbs_[i] ? std::strong_ordering::less
                                             : std::strong_ordering::greater;
        }
    }
    return std::strong_ordering::equal;
}

}  // namespace katena
