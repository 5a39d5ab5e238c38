#include <redledger/bytes.hpp>

#include <algorithm>
#include <cstring>

namespace redledger {

DecodeError::DecodeError(const std::string &what, std::size_t off)
    : Error{what + " at byte offset " + std::to_string(off)}, offset{off} {}

std::string to_hex(ByteView b) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(b.size() * 2);
    for (auto c : b) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 0xf]);
    }
    return out;
}

static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw Error{"hex string has odd length"};
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        int hi = hex_value(hex[2 * i]);
        int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error{"invalid hex digit"};
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

bool is_all_zero(ByteView b) {
    return std::all_of(b.begin(), b.end(), [](std::uint8_t c) { return c == 0; });
}

bool contains(ByteView haystack, ByteView needle) {
    if (needle.empty()) return true;
    return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) !=
           haystack.end();
}

std::size_t BytesHash::operator()(const Bytes &b) const noexcept {
    // FNV-1a
    std::uint64_t h = 1469598103934665603ULL;
    for (auto c : b) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
}

void ByteWriter::u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::bytes(ByteView b) {
    count(b.size());
    raw(b);
}

void ByteWriter::count(std::size_t n) {
    if (n > 0xffffffffULL) throw Error{"length does not fit a 32-bit prefix"};
    u32(static_cast<std::uint32_t>(n));
}

void ByteReader::need(std::size_t n) const {
    if (remaining() < n)
        fail("truncated input: need " + std::to_string(n) + " bytes, have " +
             std::to_string(remaining()));
}

void ByteReader::fail(const std::string &what) const { throw DecodeError{what, offset()}; }

std::uint8_t ByteReader::u8() {
    need(1);
    return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
}

std::uint64_t ByteReader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
}

ByteView ByteReader::raw(std::size_t n) {
    need(n);
    auto out = data_.subspan(pos_, n);
    pos_ += n;
    return out;
}

ByteView ByteReader::bytes() {
    auto n = u32();
    return raw(n);
}

std::size_t ByteReader::count(std::size_t min_item_size) {
    auto n = u32();
    if (min_item_size > 0 && n > remaining() / min_item_size) {
        pos_ -= 4;
        fail("list count " + std::to_string(n) + " exceeds remaining input");
    }
    return n;
}

void ByteReader::expect_done() const {
    if (!done()) fail("trailing bytes: " + std::to_string(remaining()) + " unread");
}

} // namespace redledger
