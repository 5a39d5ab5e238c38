#pragma once

#include <redledger/model.hpp>

#include <filesystem>
#include <memory>
#include <optional>

namespace redledger {

struct StorageError : Error {
    using Error::Error;
};

// Raw byte container behind a BlockStore.
class StorageBackend {
public:
    virtual ~StorageBackend() = default;
    virtual std::uint64_t size() const = 0;
    virtual void read(std::uint64_t offset, std::span<std::uint8_t> out) const = 0;
    virtual void append(ByteView data) = 0;
    virtual void overwrite(std::uint64_t offset, ByteView data) = 0;
    virtual void truncate(std::uint64_t size) = 0;
};

class MemoryStorage final : public StorageBackend {
public:
    MemoryStorage() = default;
    explicit MemoryStorage(Bytes initial) : data_{std::move(initial)} {}

    std::uint64_t size() const override { return data_.size(); }
    void read(std::uint64_t offset, std::span<std::uint8_t> out) const override;
    void append(ByteView data) override;
    void overwrite(std::uint64_t offset, ByteView data) override;
    void truncate(std::uint64_t size) override { data_.resize(size); }

    // Test hook: lets a test make the next append throw.
    bool fail_next_append = false;

private:
    Bytes data_;
};

class FileStorage final : public StorageBackend {
public:
    FileStorage(const std::filesystem::path &path, bool sync_writes);
    ~FileStorage() override;
    FileStorage(const FileStorage &) = delete;
    FileStorage &operator=(const FileStorage &) = delete;

    std::uint64_t size() const override { return size_; }
    void read(std::uint64_t offset, std::span<std::uint8_t> out) const override;
    void append(ByteView data) override;
    void overwrite(std::uint64_t offset, ByteView data) override;
    void truncate(std::uint64_t size) override;

private:
    void write_all(std::uint64_t offset, ByteView data);

    std::filesystem::path path_;
    int fd_ = -1;
    bool sync_;
    std::uint64_t size_ = 0;
};

// Frames of [u32 LE length][encoded block] laid end to end.
struct LedgerScan {
    struct Record {
        std::uint64_t offset; // of the encoded block, past the length prefix
        std::uint32_t length;
    };
    std::vector<Record> records;
    // Set when the tail does not form a whole record.
    std::optional<std::uint64_t> torn_at;
};
LedgerScan scan_ledger(ByteView ledger);

// Append-only block log. Only preimage bytes are ever rewritten, and only to zeros.
class BlockStore {
public:
    explicit BlockStore(std::unique_ptr<StorageBackend> storage);

    static BlockStore in_memory(Bytes initial = {});
    static BlockStore open_file(const std::filesystem::path &path, bool sync_writes = false);

    std::uint64_t height() const { return records_.size(); }

    // Returns the file offset of the new record's length prefix.
    std::uint64_t append(const Block &block);
    std::uint64_t append_encoded(ByteView encoded_block);

    Bytes read_record(std::uint64_t number) const;
    Block read(std::uint64_t number, BlockLayout *layout = nullptr) const;
    std::uint64_t record_offset(std::uint64_t number) const;

    // Overwrites the payload of preimage entry `entry` of block `number` with zeros.
    void zero_preimage(std::uint64_t number, std::size_t entry);

    // The whole ledger image, bit-exact with the on-disk file.
    Bytes contents() const;
    std::uint64_t byte_size() const { return storage_->size(); }

    StorageBackend &storage() { return *storage_; }

private:
    std::unique_ptr<StorageBackend> storage_;
    std::vector<LedgerScan::Record> records_;
};

// Zeroes the preimages of `keys` written by transaction `tx_index` of block `number`.
// A key whose preimage is already zero is skipped. Returns how many entries were zeroed.
// Throws Error if the transaction does not write one of the keys.
std::size_t zero_transaction_preimages(BlockStore &store, std::uint64_t number, std::uint32_t tx_index,
                                       std::span<const Bytes> keys);

} // namespace redledger
