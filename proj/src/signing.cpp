#include "katena/signing.hpp"

#include "katena/errors.hpp"
#include "katena/keccak.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/ecdsa.h>
#include <openssl/obj_mac.h>

#include <memory>

namespace katena::crypto {

std::vector<uint8_t> rlp_quantity(uint64_t value) {
    std::vector<uint8_t> out;
    for (int i = 7; i >= 0; --i) {
        uint8_t byte = static_cast<uint8_t>(value >> (i * 8));
        if (byte != 0 || !out.empty()) out.push_back(byte);
    }
    return out;
}

std::vector<uint8_t> rlp_encode_string(const std::vector<uint8_t>& data) {
    std::vector<uint8_t> out;
    if (data.size() == 1 && data[0] < 0x80) {
        out.push_back(data[0]);
        return out;
    }
    if (data.size() <= 55) {
        out.push_back(static_cast<uint8_t>(0x80 + data.size()));
    } else {
        auto len = rlp_quantity(data.size());
        out.push_back(static_cast<uint8_t>(0xb7 + len.size()));
        out.insert(out.end(), len.begin(), len.end());
    }
    out.insert(out.end(), data.begin(), data.end());
    return out;
}

std::vector<uint8_t> rlp_encode_list(const std::vector<std::vector<uint8_t>>& items) {
    std::vector<uint8_t> body;
    for (const auto& item : items) body.insert(body.end(), item.begin(), item.end());
    std::vector<uint8_t> out;
    if (body.size() <= 55) {
        out.push_back(static_cast<uint8_t>(0xc0 + body.size()));
    } else {
        auto len = rlp_quantity(body.size());
        out.push_back(static_cast<uint8_t>(0xf7 + len.size()));
        out.insert(out.end(), len.begin(), len.end());
    }
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

namespace {

struct BnDeleter {
    void operator()(BIGNUM* p) const { BN_free(p); }
};
struct EcKeyDeleter {
    void operator()(EC_KEY* p) const { EC_KEY_free(p); }
};
struct EcPointDeleter {
    void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};
struct BnCtxDeleter {
    void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct SigDeleter {
    void operator()(ECDSA_SIG* p) const { ECDSA_SIG_free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using EcKeyPtr = std::unique_ptr<EC_KEY, EcKeyDeleter>;
using EcPointPtr = std::unique_ptr<EC_POINT, EcPointDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using SigPtr = std::unique_ptr<ECDSA_SIG, SigDeleter>;

EcKeyPtr make_key(const std::vector<uint8_t>& private_key) {
    EcKeyPtr key(EC_KEY_new_by_curve_name(NID_secp256k1));
    if (!key) throw backend_error("OpenSSL: secp256k1 curve unavailable");
    BnPtr d(BN_bin2bn(private_key.data(), static_cast<int>(private_key.size()), nullptr));
    if (!d || BN_is_zero(d.get()) || EC_KEY_set_private_key(key.get(), d.get()) != 1) {
        throw backend_error("invalid private key");
    }
    const EC_GROUP* group = EC_KEY_get0_group(key.get());
    BnCtxPtr ctx(BN_CTX_new());
    EcPointPtr pub(EC_POINT_new(group));
    if (EC_POINT_mul(group, pub.get(), d.get(), nullptr, nullptr, ctx.get()) != 1) {
        throw backend_error("public key derivation failed");
    }
    EC_KEY_set_public_key(key.get(), pub.get());
    return key;
}

std::array<uint8_t, 64> public_key_xy(EC_KEY* key) {
    const EC_GROUP* group = EC_KEY_get0_group(key);
    const EC_POINT* pub = EC_KEY_get0_public_key(key);
    BnCtxPtr ctx(BN_CTX_new());
    uint8_t buf[65];
    size_t len = EC_POINT_point2oct(group, pub, POINT_CONVERSION_UNCOMPRESSED, buf, sizeof(buf),
                                    ctx.get());
    if (len != 65) throw backend_error("unexpected public key encoding");
    std::array<uint8_t, 64> out;
    std::copy(buf + 1, buf + 65, out.begin());
    return out;
}

std::vector<uint8_t> bn_to_32(const BIGNUM* bn) {
    std::vector<uint8_t> out(32, 0);
    int n = BN_num_bytes(bn);
    if (n > 32) throw backend_error("signature component longer than 32 bytes");
    BN_bn2bin(bn, out.data() + (32 - n));
    return out;
}

struct Signature {
    std::vector<uint8_t> r;
    std::vector<uint8_t> s;
    int recovery_id = 0;
};

// The recovery id identifies which of the candidate curve points recovers the
// signing key; found by recovering against both parities and comparing.
Signature sign_digest(const Hash256& digest, const std::vector<uint8_t>& private_key) {
    EcKeyPtr key = make_key(private_key);
    SigPtr sig(ECDSA_do_sign(digest.data(), static_cast<int>(digest.size()), key.get()));
    if (!sig) throw backend_error("ECDSA signing failed");

    const BIGNUM* r = nullptr;
    const BIGNUM* s = nullptr;
    ECDSA_SIG_get0(sig.get(), &r, &s);

    const EC_GROUP* group = EC_KEY_get0_group(key.get());
    BnCtxPtr ctx(BN_CTX_new());
    BnPtr order(BN_new());
    EC_GROUP_get_order(group, order.get(), ctx.get());

    // Enforce low-s form.
    BnPtr half(BN_new());
    BN_rshift1(half.get(), order.get());
    BnPtr s_norm(BN_dup(s));
    if (BN_cmp(s_norm.get(), half.get()) > 0) {
        BN_sub(s_norm.get(), order.get(), s_norm.get());
    }

    Signature out;
    out.r = bn_to_32(r);
    out.s = bn_to_32(s_norm.get());

    // z = digest as integer
    BnPtr z(BN_bin2bn(digest.data(), static_cast<int>(digest.size()), nullptr));
    BnPtr r_inv(BN_new());
    BN_mod_inverse(r_inv.get(), r, order.get(), ctx.get());

    const EC_POINT* expected = EC_KEY_get0_public_key(key.get());
    for (int parity = 0; parity <= 1; ++parity) {
        EcPointPtr R(EC_POINT_new(group));
        if (EC_POINT_set_compressed_coordinates(group, R.get(), r, parity, ctx.get()) != 1) {
            continue;
        }
        // Q = r^-1 * (s*R - z*G)
        BnPtr u1(BN_new());
        BnPtr u2(BN_new());
        BnPtr z_mod(BN_new());
        BN_mod(z_mod.get(), z.get(), order.get(), ctx.get());
        BN_mod_sub(u1.get(), order.get(), z_mod.get(), order.get(), ctx.get());  // -z mod n
        BN_mod_mul(u1.get(), u1.get(), r_inv.get(), order.get(), ctx.get());
        BnPtr s_bn(BN_dup(s_norm.get()));
        BN_mod_mul(u2.get(), s_bn.get(), r_inv.get(), order.get(), ctx.get());
        EcPointPtr q(EC_POINT_new(group));
        if (EC_POINT_mul(group, q.get(), u1.get(), R.get(), u2.get(), ctx.get()) != 1) continue;
        if (EC_POINT_cmp(group, q.get(), expected, ctx.get()) == 0) {
            out.recovery_id = parity;
            return out;
        }
    }
    throw backend_error("could not determine signature recovery id");
}

}  // namespace

abi::Address address_from_private_key(const std::vector<uint8_t>& private_key) {
    EcKeyPtr key = make_key(private_key);
    auto xy = public_key_xy(key.get());
    auto digest = keccak256(std::span<const uint8_t>(xy.data(), xy.size()));
    return abi::Address::from_bytes(digest.data() + 12);
}

std::vector<uint8_t> sign_legacy_transaction(const LegacyTransaction& tx, uint64_t chain_id,
                                             const std::vector<uint8_t>& private_key) {
    auto to_bytes = [&]() -> std::vector<uint8_t> {
        if (!tx.to) return {};
        return {tx.to->bytes.begin(), tx.to->bytes.end()};
    };

    std::vector<std::vector<uint8_t>> fields = {
        rlp_encode_string(rlp_quantity(tx.nonce)),
        rlp_encode_string(rlp_quantity(tx.gas_price)),
        rlp_encode_string(rlp_quantity(tx.gas_limit)),
        rlp_encode_string(to_bytes()),
        rlp_encode_string(rlp_quantity(tx.value)),
        rlp_encode_string(tx.data),
    };

    // EIP-155 signing payload appends (chain_id, 0, 0).
    auto unsigned_fields = fields;
    unsigned_fields.push_back(rlp_encode_string(rlp_quantity(chain_id)));
    unsigned_fields.push_back(rlp_encode_string({}));
    unsigned_fields.push_back(rlp_encode_string({}));
    auto preimage = rlp_encode_list(unsigned_fields);
    auto digest = keccak256(std::span<const uint8_t>(preimage.data(), preimage.size()));

    Signature sig = sign_digest(digest, private_key);
    uint64_t v = 35 + 2 * chain_id + static_cast<uint64_t>(sig.recovery_id);

    auto strip = [](std::vector<uint8_t> b) {
        size_t i = 0;
        while (i < b.size() && b[i] == 0) ++i;
        return std::vector<uint8_t>(b.begin() + static_cast<long>(i), b.end());
    };
    fields.push_back(rlp_encode_string(rlp_quantity(v)));
    fields.push_back(rlp_encode_string(strip(sig.r)));
    fields.push_back(rlp_encode_string(strip(sig.s)));
    return rlp_encode_list(fields);
}

}  // namespace katena::crypto
