#pragma once

#include <redledger/bytes.hpp>

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <random>

namespace redledger {

struct CryptoError : Error {
    using Error::Error;
};

// Fixed-width byte string; the width is part of the type.
template <std::size_t N, typename Tag>
struct FixedBytes {
    static constexpr std::size_t size = N;
    std::array<std::uint8_t, N> bytes{};

    static FixedBytes from(ByteView b) {
        if (b.size() != N)
            throw CryptoError{"expected " + std::to_string(N) + " bytes, got " +
                              std::to_string(b.size())};
        FixedBytes out;
        std::copy(b.begin(), b.end(), out.bytes.begin());
        return out;
    }
    static FixedBytes from_hex(std::string_view hex) { return from(redledger::from_hex(hex)); }

    ByteView view() const { return bytes; }
    std::string hex() const { return to_hex(bytes); }
    bool is_zero() const { return is_all_zero(bytes); }

    auto operator<=>(const FixedBytes &) const = default;
};

struct DigestTag {};
struct SaltTag {};
struct PublicKeyTag {};
struct SignatureTag {};

using Digest = FixedBytes<32, DigestTag>;
using Salt = FixedBytes<32, SaltTag>;
using PublicKey = FixedBytes<32, PublicKeyTag>;
using Signature = FixedBytes<64, SignatureTag>;

struct DigestHash {
    std::size_t operator()(const Digest &d) const noexcept {
        std::size_t h = 0;
        for (int i = 0; i < 8; ++i) h = (h << 8) | d.bytes[i];
        return h;
    }
};

// SHA-256.
Digest hash(ByteView data);
inline Digest hash(std::string_view s) {
    return hash(ByteView{reinterpret_cast<const std::uint8_t *>(s.data()), s.size()});
}

// Digest of salt ‖ value. The on-chain form of a written value.
Digest hash_preimage(const Salt &salt, ByteView value);
// Same, with the salt given as raw bytes; throws CryptoError unless exactly 32 bytes.
Digest hash_preimage(ByteView salt, ByteView value);

Bytes make_preimage(const Salt &salt, ByteView value);
// Splits salt ‖ value; throws CryptoError if shorter than a salt.
std::pair<Salt, ByteView> split_preimage(ByteView preimage);

Salt random_salt();
Salt salt_from(std::mt19937_64 &rng);

// Ed25519 identity. The secret half is the 32-byte seed followed by the public key.
class KeyPair {
public:
    static KeyPair generate();
    static KeyPair from_seed(ByteView seed32);
    static KeyPair from_seed(std::uint64_t n);

    const PublicKey &public_key() const { return pk_; }
    ByteView seed() const { return ByteView{sk_.data(), 32}; }
    Signature sign(ByteView message) const;

private:
    PublicKey pk_;
    std::array<std::uint8_t, 64> sk_{};
};

bool verify(const PublicKey &pk, ByteView message, const Signature &sig);

} // namespace redledger
