#include "abi_decode.hpp"

#include <stdexcept>

namespace katena::testing {

using abi::Type;
using abi::Value;

namespace {

size_t static_size(const Type& type) {
    switch (type.kind) {
        case Type::Kind::FixedArray: return type.m * static_size(type.elems[0]);
        default: return 32;
    }
}

U256 read_word(const std::vector<uint8_t>& data, size_t pos) {
    if (pos + 32 > data.size()) throw std::runtime_error("decode: word out of range");
    return U256::from_bytes(data.data() + pos, 32);
}

Value decode_value(const std::vector<uint8_t>& data, size_t pos, const Type& type);

std::vector<Value> decode_sequence(const std::vector<uint8_t>& data, size_t base,
                                   const std::vector<Type>& types) {
    std::vector<Value> out;
    size_t cursor = base;
    for (const auto& type : types) {
        if (type.is_dynamic()) {
            size_t offset = static_cast<size_t>(read_word(data, cursor).low64());
            out.push_back(decode_value(data, base + offset, type));
            cursor += 32;
        } else {
            out.push_back(decode_value(data, cursor, type));
            cursor += static_size(type);
        }
    }
    return out;
}

Value decode_value(const std::vector<uint8_t>& data, size_t pos, const Type& type) {
    Value v;
    v.type = type;
    switch (type.kind) {
        case Type::Kind::Uint:
        case Type::Kind::Int:
            v.num = read_word(data, pos);
            return v;
        case Type::Kind::AddressTy: {
            read_word(data, pos);
            v.data.assign(data.begin() + pos + 12, data.begin() + pos + 32);
            return v;
        }
        case Type::Kind::Bool: {
            v.boolean = read_word(data, pos).low64() != 0;
            return v;
        }
        case Type::Kind::FixedBytes: {
            read_word(data, pos);
            v.data.assign(data.begin() + pos, data.begin() + pos + type.m);
            return v;
        }
        case Type::Kind::Bytes:
        case Type::Kind::String: {
            size_t len = static_cast<size_t>(read_word(data, pos).low64());
            if (pos + 32 + len > data.size()) throw std::runtime_error("decode: bytes overrun");
            v.data.assign(data.begin() + pos + 32, data.begin() + pos + 32 + len);
            return v;
        }
        case Type::Kind::Array: {
            size_t len = static_cast<size_t>(read_word(data, pos).low64());
            std::vector<Type> elems(len, type.elems[0]);
            v.items = decode_sequence(data, pos + 32, elems);
            return v;
        }
        case Type::Kind::FixedArray: {
            std::vector<Type> elems(type.m, type.elems[0]);
            v.items = decode_sequence(data, pos, elems);
            return v;
        }
        case Type::Kind::Tuple:
            throw std::runtime_error("decode: tuples unsupported");
    }
    throw std::runtime_error("decode: unknown type");
}

}  // namespace

std::vector<Value> abi_decode(const std::vector<uint8_t>& data,
                              const std::vector<Type>& types) {
    return decode_sequence(data, 0, types);
}

}  // namespace katena::testing
