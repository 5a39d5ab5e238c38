#include <redledger/block_store.hpp>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

namespace redledger {

void MemoryStorage::read(std::uint64_t offset, std::span<std::uint8_t> out) const {
    if (offset + out.size() > data_.size()) throw StorageError{"read past end of ledger"};
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(offset), out.size(), out.begin());
}

void MemoryStorage::append(ByteView data) {
    if (fail_next_append) {
        fail_next_append = false;
        throw StorageError{"injected append failure"};
    }
    data_.insert(data_.end(), data.begin(), data.end());
}

void MemoryStorage::overwrite(std::uint64_t offset, ByteView data) {
    if (offset + data.size() > data_.size()) throw StorageError{"overwrite past end of ledger"};
    std::copy(data.begin(), data.end(), data_.begin() + static_cast<std::ptrdiff_t>(offset));
}

static std::string errno_message(const std::string &what, const std::filesystem::path &p) {
    return what + " " + p.string() + ": " + std::strerror(errno);
}

FileStorage::FileStorage(const std::filesystem::path &path, bool sync_writes)
    : path_{path}, sync_{sync_writes} {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw StorageError{errno_message("cannot open", path)};
    struct stat st {};
    if (::fstat(fd_, &st) != 0) {
        ::close(fd_);
        throw StorageError{errno_message("cannot stat", path)};
    }
    size_ = static_cast<std::uint64_t>(st.st_size);
}

FileStorage::~FileStorage() {
    if (fd_ >= 0) ::close(fd_);
}

void FileStorage::read(std::uint64_t offset, std::span<std::uint8_t> out) const {
    std::size_t done = 0;
    while (done < out.size()) {
        auto n = ::pread(fd_, out.data() + done, out.size() - done, static_cast<off_t>(offset + done));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw StorageError{errno_message("short read from", path_)};
        done += static_cast<std::size_t>(n);
    }
}

void FileStorage::write_all(std::uint64_t offset, ByteView data) {
    std::size_t done = 0;
    while (done < data.size()) {
        auto n = ::pwrite(fd_, data.data() + done, data.size() - done, static_cast<off_t>(offset + done));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw StorageError{errno_message("write failed on", path_)};
        done += static_cast<std::size_t>(n);
    }
    if (sync_ && ::fdatasync(fd_) != 0) throw StorageError{errno_message("fdatasync failed on", path_)};
}

void FileStorage::append(ByteView data) {
    try {
        write_all(size_, data);
    } catch (...) {
        // Drop whatever part of the record made it to disk.
        if (::ftruncate(fd_, static_cast<off_t>(size_)) != 0) {}
        throw;
    }
    size_ += data.size();
}

void FileStorage::overwrite(std::uint64_t offset, ByteView data) {
    if (offset + data.size() > size_) throw StorageError{"overwrite past end of ledger"};
    write_all(offset, data);
}

void FileStorage::truncate(std::uint64_t size) {
    if (::ftruncate(fd_, static_cast<off_t>(size)) != 0)
        throw StorageError{errno_message("truncate failed on", path_)};
    size_ = size;
}

LedgerScan scan_ledger(ByteView ledger) {
    LedgerScan scan;
    std::uint64_t pos = 0;
    while (pos < ledger.size()) {
        if (ledger.size() - pos < 4) {
            scan.torn_at = pos;
            break;
        }
        ByteReader r{ledger.subspan(pos, 4), pos};
        auto len = r.u32();
        if (ledger.size() - pos - 4 < len) {
            scan.torn_at = pos;
            break;
        }
        scan.records.push_back({pos + 4, len});
        pos += 4 + static_cast<std::uint64_t>(len);
    }
    return scan;
}

BlockStore::BlockStore(std::unique_ptr<StorageBackend> storage) : storage_{std::move(storage)} {
    std::uint64_t pos = 0;
    auto end = storage_->size();
    while (pos < end) {
        if (end - pos < 4) throw DecodeError{"torn record length", pos};
        std::array<std::uint8_t, 4> prefix{};
        storage_->read(pos, prefix);
        ByteReader r{prefix, pos};
        auto len = r.u32();
        if (end - pos - 4 < len) throw DecodeError{"torn record body", pos};
        records_.push_back({pos + 4, len});
        pos += 4 + static_cast<std::uint64_t>(len);
    }
}

BlockStore BlockStore::in_memory(Bytes initial) {
    return BlockStore{std::make_unique<MemoryStorage>(std::move(initial))};
}

BlockStore BlockStore::open_file(const std::filesystem::path &path, bool sync_writes) {
    return BlockStore{std::make_unique<FileStorage>(path, sync_writes)};
}

std::uint64_t BlockStore::append(const Block &block) {
    ByteWriter w;
    w.u32(0);
    encode_to(w, block);
    auto buf = std::move(w).take();
    auto len = buf.size() - 4;
    if (len > 0xffffffffULL) throw StorageError{"block too large"};
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<std::uint8_t>(len >> (8 * i));

    auto at = storage_->size();
    storage_->append(buf);
    records_.push_back({at + 4, static_cast<std::uint32_t>(len)});
    return at;
}

std::uint64_t BlockStore::append_encoded(ByteView encoded_block) {
    ByteWriter w{encoded_block.size() + 4};
    w.bytes(encoded_block);
    auto at = storage_->size();
    storage_->append(w.buffer());
    records_.push_back({at + 4, static_cast<std::uint32_t>(encoded_block.size())});
    return at;
}

Bytes BlockStore::read_record(std::uint64_t number) const {
    if (number >= records_.size()) throw StorageError{"block " + std::to_string(number) + " not in store"};
    const auto &rec = records_[number];
    Bytes out(rec.length);
    storage_->read(rec.offset, out);
    return out;
}

Block BlockStore::read(std::uint64_t number, BlockLayout *layout) const {
    auto bytes = read_record(number);
    return decode_block(bytes, layout);
}

std::uint64_t BlockStore::record_offset(std::uint64_t number) const {
    if (number >= records_.size()) throw StorageError{"block " + std::to_string(number) + " not in store"};
    return records_[number].offset - 4;
}

void BlockStore::zero_preimage(std::uint64_t number, std::size_t entry) {
    BlockLayout layout;
    read(number, &layout);
    if (entry >= layout.preimage_entries.size()) throw StorageError{"preimage entry out of range"};
    auto [off, len] = layout.preimage_entries[entry];
    Bytes zeros(len, 0);
    storage_->overwrite(records_[number].offset + off, zeros);
}

Bytes BlockStore::contents() const {
    Bytes out(storage_->size());
    if (!out.empty()) storage_->read(0, out);
    return out;
}

std::size_t zero_transaction_preimages(BlockStore &store, std::uint64_t number, std::uint32_t tx_index,
                                       std::span<const Bytes> keys) {
    BlockLayout layout;
    auto block = store.read(number, &layout);
    if (tx_index >= block.transactions.size())
        throw Error{"transaction index " + std::to_string(tx_index) + " out of range"};
    const auto &tx = block.transactions[tx_index];

    auto &entries = block.preimages.entries;
    std::vector<std::optional<Digest>> hashed(entries.size());
    std::size_t zeroed = 0;
    for (const auto &key : keys) {
        bool written = false;
        for (const auto &w : tx.write_set) {
            if (w.key != key) continue;
            written = true;
            if (!w.needs_preimage()) continue;
            for (std::size_t i = 0; i < entries.size(); ++i) {
                if (PreimageSpace::is_redacted(entries[i])) continue;
                if (!hashed[i]) hashed[i] = hash(entries[i]);
                if (*hashed[i] != w.value_digest) continue;
                auto [off, len] = layout.preimage_entries[i];
                Bytes zeros(len, 0);
                store.storage().overwrite(store.record_offset(number) + 4 + off, zeros);
                std::fill(entries[i].begin(), entries[i].end(), 0);
                ++zeroed;
                break;
            }
        }
        if (!written)
            throw Error{"transaction " + tx.txid.hex() + " does not write key " + to_hex(key)};
    }
    return zeroed;
}

} // namespace redledger
