#include "katena/keccak.hpp"

#include "katena/hex.hpp"

#include <cstring>

namespace katena::crypto {

namespace {

constexpr uint64_t kRoundConstants[24] = {
    0x0000000000000001ULL, 0x0000000000008082ULL, 0x800000000000808aULL,
    0x8000000080008000ULL, 0x000000000000808bULL, 0x0000000080000001ULL,
    0x8000000080008081ULL, 0x8000000000008009ULL, 0x000000000000008aULL,
    0x0000000000000088ULL, 0x0000000080008009ULL, 0x000000008000000aULL,
    0x000000008000808bULL, 0x800000000000008bULL, 0x8000000000008089ULL,
    0x8000000000008003ULL, 0x8000000000008002ULL, 0x8000000000000080ULL,
    0x000000000000800aULL, 0x800000008000000aULL, 0x8000000080008081ULL,
    0x8000000000008080ULL, 0x0000000080000001ULL, 0x8000000080008008ULL,
};

constexpr int kRotc[24] = {1,  3,  6,  10, 15, 21, 28, 36, 45, 55, 2,  14,
                           27, 41, 56, 8,  25, 43, 62, 18, 39, 61, 20, 44};
constexpr int kPiln[24] = {10, 7,  11, 17, 18, 3, 5,  16, 8,  21, 24, 4,
                           15, 23, 19, 13, 12, 2, 20, 14, 22, 9,  6,  1};

inline uint64_t rotl64(uint64_t x, int s) { return (x << s) | (x >> (64 - s)); }

void keccak_f1600(uint64_t st[25]) {
    for (int round = 0; round < 24; ++round) {
        uint64_t bc[5];
        // theta
        for (int i = 0; i < 5; ++i)
            bc[i] = st[i] ^ st[i + 5] ^ st[i + 10] ^ st[i + 15] ^ st[i + 20];
        for (int i = 0; i < 5; ++i) {
            uint64_t t = bc[(i + 4) % 5] ^ rotl64(bc[(i + 1) % 5], 1);
            for (int j = 0; j < 25; j += 5) st[j + i] ^= t;
        }
        // rho + pi
        uint64_t t = st[1];
        for (int i = 0; i < 24; ++i) {
            int j = kPiln[i];
            bc[0] = st[j];
            st[j] = rotl64(t, kRotc[i]);
            t = bc[0];
        }
        // chi
        for (int j = 0; j < 25; j += 5) {
            for (int i = 0; i < 5; ++i) bc[i] = st[j + i];
            for (int i = 0; i < 5; ++i)
                st[j + i] = bc[i] ^ (~bc[(i + 1) % 5] & bc[(i + 2) % 5]);
        }
        // iota
        st[0] ^= kRoundConstants[round];
    }
}

}  // namespace

Hash256 keccak256(std::span<const uint8_t> data) {
    constexpr size_t kRate = 136;  // 1088-bit rate for 256-bit output
    uint64_t st[25] = {};
    uint8_t block[kRate];

    size_t offset = 0;
    while (data.size() - offset >= kRate) {
        for (size_t i = 0; i < kRate / 8; ++i) {
            uint64_t lane = 0;
            for (int b = 7; b >= 0; --b) lane = (lane << 8) | data[offset + i * 8 + b];
            st[i] ^= lane;
        }
        keccak_f1600(st);
        offset += kRate;
    }

    std::memset(block, 0, kRate);
    std::memcpy(block, data.data() + offset, data.size() - offset);
    block[data.size() - offset] ^= 0x01;
    block[kRate - 1] ^= 0x80;
    for (size_t i = 0; i < kRate / 8; ++i) {
        uint64_t lane = 0;
        for (int b = 7; b >= 0; --b) lane = (lane << 8) | block[i * 8 + b];
        st[i] ^= lane;
    }
    keccak_f1600(st);

    Hash256 out;
    for (size_t i = 0; i < 4; ++i) {
        uint64_t lane = st[i];
        for (int b = 0; b < 8; ++b) {
            out[i * 8 + b] = static_cast<uint8_t>(lane & 0xff);
            lane >>= 8;
        }
    }
    return out;
}

Hash256 keccak256(std::string_view data) {
    return keccak256(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

std::string keccak256_hex(std::string_view data) {
    auto h = keccak256(data);
    return hex::encode(h);
}

std::string selector_hex(std::string_view canonical_signature) {
    auto h = keccak256(canonical_signature);
    return hex::encode(std::span<const uint8_t>(h.data(), 4));
}

}  // namespace katena::crypto
