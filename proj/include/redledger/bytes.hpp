#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redledger {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised by ByteReader; offset is where the reader gave up.
struct DecodeError : Error {
    DecodeError(const std::string &what, std::size_t offset);
    std::size_t offset;
};

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }
inline std::string to_string(ByteView b) { return std::string(b.begin(), b.end()); }

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);

bool is_all_zero(ByteView b);
bool contains(ByteView haystack, ByteView needle);

struct BytesHash {
    std::size_t operator()(const Bytes &b) const noexcept;
};

// Little-endian, length-prefixed writer. Byte strings and lists carry a u32 prefix;
// fixed-size fields (digests, keys, signatures) are written raw.
class ByteWriter {
public:
    ByteWriter() = default;
    explicit ByteWriter(std::size_t reserve) { buf_.reserve(reserve); }

    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void raw(ByteView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    void bytes(ByteView b);
    void count(std::size_t n);

    std::size_t size() const { return buf_.size(); }
    const Bytes &buffer() const & { return buf_; }
    Bytes take() && { return std::move(buf_); }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(ByteView data, std::size_t base_offset = 0)
        : data_{data}, base_{base_offset} {}

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    ByteView raw(std::size_t n);
    ByteView bytes();
    // List prefix; rejects counts that cannot fit in the remaining input given min_item_size.
    std::size_t count(std::size_t min_item_size = 1);

    std::size_t offset() const { return base_ + pos_; }
    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }
    void expect_done() const;

    [[noreturn]] void fail(const std::string &what) const;

private:
    void need(std::size_t n) const;

    ByteView data_;
    std::size_t base_;
    std::size_t pos_ = 0;
};

} // namespace redledger
