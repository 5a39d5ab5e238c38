#include <redledger/crypto.hpp>

#include <sodium.h>

namespace redledger {

namespace {

void ensure_sodium() {
    static const bool ready = [] {
        if (sodium_init() < 0) throw CryptoError{"libsodium initialisation failed"};
        return true;
    }();
    (void)ready;
}

} // namespace

Digest hash(ByteView data) {
    Digest out;
    crypto_hash_sha256(out.bytes.data(), data.data(), data.size());
    return out;
}

Digest hash_preimage(const Salt &salt, ByteView value) {
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, salt.bytes.data(), salt.size);
    crypto_hash_sha256_update(&st, value.data(), value.size());
    Digest out;
    crypto_hash_sha256_final(&st, out.bytes.data());
    return out;
}

Digest hash_preimage(ByteView salt, ByteView value) {
    if (salt.size() != Salt::size)
        throw CryptoError{"malformed salt: expected 32 bytes, got " + std::to_string(salt.size())};
    return hash_preimage(Salt::from(salt), value);
}

Bytes make_preimage(const Salt &salt, ByteView value) {
    Bytes out;
    out.reserve(Salt::size + value.size());
    out.insert(out.end(), salt.bytes.begin(), salt.bytes.end());
    out.insert(out.end(), value.begin(), value.end());
    return out;
}

std::pair<Salt, ByteView> split_preimage(ByteView preimage) {
    if (preimage.size() < Salt::size) throw CryptoError{"preimage shorter than its salt"};
    return {Salt::from(preimage.first(Salt::size)), preimage.subspan(Salt::size)};
}

Salt random_salt() {
    ensure_sodium();
    Salt s;
    randombytes_buf(s.bytes.data(), s.size);
    return s;
}

Salt salt_from(std::mt19937_64 &rng) {
    Salt s;
    for (std::size_t i = 0; i < s.size; i += 8) {
        auto v = rng();
        for (std::size_t j = 0; j < 8; ++j) s.bytes[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
    }
    return s;
}

KeyPair KeyPair::generate() {
    ensure_sodium();
    std::array<std::uint8_t, 32> seed;
    randombytes_buf(seed.data(), seed.size());
    return from_seed(seed);
}

KeyPair KeyPair::from_seed(ByteView seed32) {
    ensure_sodium();
    if (seed32.size() != crypto_sign_SEEDBYTES) throw CryptoError{"malformed key seed"};
    KeyPair kp;
    crypto_sign_seed_keypair(kp.pk_.bytes.data(), kp.sk_.data(), seed32.data());
    return kp;
}

KeyPair KeyPair::from_seed(std::uint64_t n) {
    ByteWriter w;
    w.raw(to_bytes("redledger-seeded-key"));
    w.u64(n);
    return from_seed(hash(w.buffer()).view());
}

Signature KeyPair::sign(ByteView message) const {
    Signature sig;
    crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(), sk_.data());
    return sig;
}

bool verify(const PublicKey &pk, ByteView message, const Signature &sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                       pk.bytes.data()) == 0;
}

} // namespace redledger
