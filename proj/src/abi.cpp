#include "katena/abi.hpp"

#include "katena/errors.hpp"
#include "katena/hex.hpp"
#include "katena/keccak.hpp"

#include <nlohmann/json.hpp>

#include <charconv>

namespace katena::abi {

Address Address::parse(std::string_view s) {
    std::string_view body = hex::strip_prefix(s);
    if (body.size() != 40 || !hex::is_hex(body)) {
        throw validation_error("invalid address '" + std::string(s) +
                               "': expected 40 hex chars after 0x");
    }
    auto bytes = hex::decode(body);
    Address a;
    std::copy(bytes.begin(), bytes.end(), a.bytes.begin());
    return a;
}

Address Address::from_bytes(const uint8_t* data) {
    Address a;
    std::copy(data, data + 20, a.bytes.begin());
    return a;
}

std::string Address::to_hex() const { return "0x" + to_hex_bare(); }

std::string Address::to_hex_bare() const {
    return hex::encode(std::span<const uint8_t>(bytes.data(), bytes.size()));
}

bool Address::is_zero() const {
    for (uint8_t b : bytes) {
        if (b != 0) return false;
    }
    return true;
}

bool checksum_ok(std::string_view candidate) {
    std::string_view body = hex::strip_prefix(candidate);
    if (body.size() != 40 || !hex::is_hex(body)) return false;
    std::string lower = hex::to_lower(body);
    bool has_upper = false, has_lower_alpha = false;
    for (char c : body) {
        if (c >= 'A' && c <= 'F') has_upper = true;
        if (c >= 'a' && c <= 'f') has_lower_alpha = true;
    }
    if (!has_upper) return true;  // all-lowercase (or all digits) is always accepted
    auto digest = crypto::keccak256(lower);
    for (size_t i = 0; i < 40; ++i) {
        char c = body[i];
        if (c >= '0' && c <= '9') continue;
        int nib = (digest[i / 2] >> (i % 2 == 0 ? 4 : 0)) & 0xf;
        bool want_upper = nib >= 8;
        bool got_upper = c >= 'A' && c <= 'F';
        if (want_upper != got_upper) return false;
    }
    (void)has_lower_alpha;
    return true;
}

Type Type::uint_t(int bits) { return Type{Kind::Uint, bits, {}}; }
Type Type::int_t(int bits) { return Type{Kind::Int, bits, {}}; }
Type Type::address_t() { return Type{Kind::AddressTy, 0, {}}; }
Type Type::bool_t() { return Type{Kind::Bool, 0, {}}; }
Type Type::bytes_t() { return Type{Kind::Bytes, 0, {}}; }
Type Type::fixed_bytes_t(int size) { return Type{Kind::FixedBytes, size, {}}; }
Type Type::string_t() { return Type{Kind::String, 0, {}}; }
Type Type::array_of(Type elem) { return Type{Kind::Array, 0, {std::move(elem)}}; }
Type Type::fixed_array_of(Type elem, int len) {
    return Type{Kind::FixedArray, len, {std::move(elem)}};
}

namespace {

int parse_width(std::string_view digits, int lo, int hi, std::string_view what) {
    int value = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc() || p != digits.data() + digits.size() || value < lo || value > hi) {
        throw validation_error("invalid " + std::string(what) + " width '" +
                               std::string(digits) + "'");
    }
    return value;
}

Type parse_base(std::string_view text) {
    if (text == "address") return Type::address_t();
    if (text == "bool") return Type::bool_t();
    if (text == "string") return Type::string_t();
    if (text == "bytes") return Type::bytes_t();
    if (text == "uint") return Type::uint_t(256);
    if (text == "int") return Type::int_t(256);
    if (text.starts_with("uint")) {
        int bits = parse_width(text.substr(4), 8, 256, "uint");
        if (bits % 8 != 0) throw validation_error("uint width must be a multiple of 8");
        return Type::uint_t(bits);
    }
    if (text.starts_with("int")) {
        int bits = parse_width(text.substr(3), 8, 256, "int");
        if (bits % 8 != 0) throw validation_error("int width must be a multiple of 8");
        return Type::int_t(bits);
    }
    if (text.starts_with("bytes")) {
        int size = parse_width(text.substr(5), 1, 32, "bytes");
        return Type::fixed_bytes_t(size);
    }
    throw validation_error("unsupported ABI type '" + std::string(text) + "'");
}

}  // namespace

Type Type::parse(std::string_view text) {
    // Peel array suffixes from the right.
    if (text.ends_with("]")) {
        size_t open = text.rfind('[');
        if (open == std::string_view::npos) {
            throw validation_error("malformed ABI type '" + std::string(text) + "'");
        }
        std::string_view len_text = text.substr(open + 1, text.size() - open - 2);
        Type elem = parse(text.substr(0, open));
        if (len_text.empty()) return array_of(std::move(elem));
        int len = parse_width(len_text, 1, 1 << 20, "array");
        return fixed_array_of(std::move(elem), len);
    }
    return parse_base(text);
}

Type Type::from_abi_json(const nlohmann::json& input) {
    std::string text = input.value("type", "");
    if (text.empty()) throw validation_error("ABI input entry missing 'type'");
    // Tuples carry their shape in "components"; only the canonical form is
    // needed (selector computation), the v1 encoder refuses them.
    size_t tuple_pos = text.find("tuple");
    if (tuple_pos == 0) {
        Type tuple{Kind::Tuple, 0, {}};
        for (const auto& comp : input.value("components", nlohmann::json::array())) {
            tuple.elems.push_back(from_abi_json(comp));
        }
        std::string suffix = text.substr(5);  // "", "[]", "[2]", ...
        Type result = std::move(tuple);
        // Array suffixes apply left-to-right.
        size_t pos = 0;
        while (pos < suffix.size()) {
            size_t close = suffix.find(']', pos);
            if (suffix[pos] != '[' || close == std::string::npos) {
                throw validation_error("malformed tuple type '" + text + "'");
            }
            std::string len_text = suffix.substr(pos + 1, close - pos - 1);
            if (len_text.empty()) {
                result = array_of(std::move(result));
            } else {
                result = fixed_array_of(std::move(result),
                                        parse_width(len_text, 1, 1 << 20, "array"));
            }
            pos = close + 1;
        }
        return result;
    }
    return parse(text);
}

std::string Type::canonical() const {
    switch (kind) {
        case Kind::Uint: return "uint" + std::to_string(m);
        case Kind::Int: return "int" + std::to_string(m);
        case Kind::AddressTy: return "address";
        case Kind::Bool: return "bool";
        case Kind::Bytes: return "bytes";
        case Kind::FixedBytes: return "bytes" + std::to_string(m);
        case Kind::String: return "string";
        case Kind::Array: return elems[0].canonical() + "[]";
        case Kind::FixedArray: return elems[0].canonical() + "[" + std::to_string(m) + "]";
        case Kind::Tuple: {
            std::string out = "(";
            for (size_t i = 0; i < elems.size(); ++i) {
                if (i > 0) out += ",";
                out += elems[i].canonical();
            }
            out += ")";
            return out;
        }
    }
    return "?";
}

bool Type::is_dynamic() const {
    switch (kind) {
        case Kind::Bytes:
        case Kind::String:
        case Kind::Array: return true;
        case Kind::FixedArray: return elems[0].is_dynamic();
        case Kind::Tuple:
            for (const auto& e : elems) {
                if (e.is_dynamic()) return true;
            }
            return false;
        default: return false;
    }
}

bool Type::encodable() const {
    if (kind == Kind::Tuple) return false;
    for (const auto& e : elems) {
        if (!e.encodable()) return false;
    }
    return true;
}

bool Type::operator==(const Type& rhs) const { return canonical() == rhs.canonical(); }

Value Value::uint_value(U256 v, int bits) {
    Value out;
    out.type = Type::uint_t(bits);
    out.num = v;
    return out;
}

Value Value::int_value(bool negative, U256 magnitude, int bits) {
    Value out;
    out.type = Type::int_t(bits);
    out.num = negative ? magnitude.twos_complement_negate() : magnitude;
    return out;
}

Value Value::address_value(const Address& a) {
    Value out;
    out.type = Type::address_t();
    out.data.assign(a.bytes.begin(), a.bytes.end());
    return out;
}

Value Value::bool_value(bool b) {
    Value out;
    out.type = Type::bool_t();
    out.boolean = b;
    return out;
}

Value Value::bytes_value(std::vector<uint8_t> b) {
    Value out;
    out.type = Type::bytes_t();
    out.data = std::move(b);
    return out;
}

Value Value::fixed_bytes_value(std::vector<uint8_t> b) {
    Value out;
    out.type = Type::fixed_bytes_t(static_cast<int>(b.size()));
    out.data = std::move(b);
    return out;
}

Value Value::string_value(std::string_view s) {
    Value out;
    out.type = Type::string_t();
    out.data.assign(s.begin(), s.end());
    return out;
}

Value Value::array_value(Type elem, std::vector<Value> items) {
    Value out;
    out.type = Type::array_of(std::move(elem));
    out.items = std::move(items);
    return out;
}

Value Value::fixed_array_value(Type elem, std::vector<Value> items) {
    Value out;
    out.type = Type::fixed_array_of(std::move(elem), static_cast<int>(items.size()));
    out.items = std::move(items);
    return out;
}

std::string Value::to_display() const {
    switch (type.kind) {
        case Type::Kind::Uint: return num.to_decimal();
        case Type::Kind::Int: {
            auto b = num.to_bytes32();
            if (b[0] & 0x80) return "-" + num.twos_complement_negate().to_decimal();
            return num.to_decimal();
        }
        case Type::Kind::AddressTy:
            return "0x" + hex::encode(std::span<const uint8_t>(data.data(), data.size()));
        case Type::Kind::Bool: return boolean ? "true" : "false";
        case Type::Kind::Bytes:
        case Type::Kind::FixedBytes:
            return "0x" + hex::encode(std::span<const uint8_t>(data.data(), data.size()));
        case Type::Kind::String: return std::string(data.begin(), data.end());
        case Type::Kind::Array:
        case Type::Kind::FixedArray: {
            std::string out = "[";
            for (size_t i = 0; i < items.size(); ++i) {
                if (i > 0) out += ",";
                out += items[i].to_display();
            }
            return out + "]";
        }
        case Type::Kind::Tuple: return "(tuple)";
    }
    return "?";
}

namespace {

void append_word(std::vector<uint8_t>& out, const std::array<uint8_t, 32>& word) {
    out.insert(out.end(), word.begin(), word.end());
}

void append_uint_word(std::vector<uint8_t>& out, uint64_t v) {
    append_word(out, U256(v).to_bytes32());
}

void append_padded_bytes(std::vector<uint8_t>& out, const std::vector<uint8_t>& data) {
    out.insert(out.end(), data.begin(), data.end());
    size_t pad = (32 - data.size() % 32) % 32;
    out.insert(out.end(), pad, 0);
}

std::vector<uint8_t> encode_value(const Value& v);

// Encodes a sequence as head words followed by tails, offsets relative to the
// start of the sequence's head block.
std::vector<uint8_t> encode_sequence(const std::vector<Value>& values) {
    size_t head_size = 0;
    for (const auto& v : values) {
        head_size += v.type.is_dynamic() ? 32 : encode_value(v).size();
    }
    std::vector<uint8_t> head;
    std::vector<uint8_t> tail;
    for (const auto& v : values) {
        if (v.type.is_dynamic()) {
            append_uint_word(head, head_size + tail.size());
            auto enc = encode_value(v);
            tail.insert(tail.end(), enc.begin(), enc.end());
        } else {
            auto enc = encode_value(v);
            head.insert(head.end(), enc.begin(), enc.end());
        }
    }
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
}

std::vector<uint8_t> encode_value(const Value& v) {
    std::vector<uint8_t> out;
    switch (v.type.kind) {
        case Type::Kind::Uint:
        case Type::Kind::Int:
            append_word(out, v.num.to_bytes32());
            break;
        case Type::Kind::AddressTy: {
            std::array<uint8_t, 32> word{};
            std::copy(v.data.begin(), v.data.end(), word.begin() + 12);
            append_word(out, word);
            break;
        }
        case Type::Kind::Bool:
            append_uint_word(out, v.boolean ? 1 : 0);
            break;
        case Type::Kind::FixedBytes: {
            std::array<uint8_t, 32> word{};
            std::copy(v.data.begin(), v.data.end(), word.begin());  // left-aligned
            append_word(out, word);
            break;
        }
        case Type::Kind::Bytes:
        case Type::Kind::String:
            append_uint_word(out, v.data.size());
            append_padded_bytes(out, v.data);
            break;
        case Type::Kind::Array: {
            append_uint_word(out, v.items.size());
            auto body = encode_sequence(v.items);
            out.insert(out.end(), body.begin(), body.end());
            break;
        }
        case Type::Kind::FixedArray: {
            auto body = encode_sequence(v.items);
            out.insert(out.end(), body.begin(), body.end());
            break;
        }
        case Type::Kind::Tuple:
            throw validation_error("tuple values are not encodable in this ABI subset");
    }
    return out;
}

}  // namespace

std::vector<uint8_t> encode(const std::vector<Value>& args) {
    for (const auto& a : args) {
        if (!a.type.encodable()) {
            throw validation_error("cannot encode argument of type " + a.type.canonical());
        }
    }
    return encode_sequence(args);
}

std::array<uint8_t, 4> selector(std::string_view canonical_signature) {
    auto digest = crypto::keccak256(canonical_signature);
    return {digest[0], digest[1], digest[2], digest[3]};
}

std::string canonical_signature(std::string_view name, const std::vector<Type>& inputs) {
    std::string out(name);
    out += "(";
    for (size_t i = 0; i < inputs.size(); ++i) {
        if (i > 0) out += ",";
        out += inputs[i].canonical();
    }
    out += ")";
    return out;
}

}  // namespace katena::abi
