#include <redledger/state_store.hpp>

#include <algorithm>
#include <fstream>

namespace redledger {

std::string_view to_string(KeyStatus s) {
    switch (s) {
    case KeyStatus::live: return "live";
    case KeyStatus::crippled: return "crippled";
    case KeyStatus::deleted: return "deleted";
    }
    return "unknown";
}

StateStore::StateStore(const StateStore &other) {
    std::shared_lock lock{other.mutex_};
    height_ = other.height_;
    state_ = other.state_;
    tx_index_ = other.tx_index_;
    key_index_ = other.key_index_;
}

StateStore &StateStore::operator=(const StateStore &other) {
    if (this == &other) return *this;
    StateStore copy{other};
    std::unique_lock lock{mutex_};
    height_ = copy.height_;
    state_ = std::move(copy.state_);
    tx_index_ = std::move(copy.tx_index_);
    key_index_ = std::move(copy.key_index_);
    return *this;
}

std::optional<StateEntry> StateStore::get_unlocked(ByteView key) const {
    auto it = state_.find(Bytes(key.begin(), key.end()));
    if (it == state_.end()) return std::nullopt;
    return StateEntry{it->first, it->second.value, it->second.version, it->second.status};
}

std::optional<StateEntry> StateStore::get(ByteView key) const {
    std::shared_lock lock{mutex_};
    return get_unlocked(key);
}

std::uint64_t StateStore::height() const {
    std::shared_lock lock{mutex_};
    return height_;
}

void StateStore::apply_write_batch(const WriteBatch &batch) {
    std::unique_lock lock{mutex_};
    if (batch.block_number != height_)
        throw StateError{"commit gap: expected block " + std::to_string(height_) + ", got " +
                         std::to_string(batch.block_number)};
    std::uint32_t last = 0;
    for (const auto &w : batch.writes) {
        if (w.tx_index < last) throw StateError{"write batch is not in transaction order"};
        last = w.tx_index;
    }
    for (const auto &w : batch.writes) {
        auto it = state_.find(w.key);
        if (it != state_.end() && Version{batch.block_number, w.tx_index} < it->second.version)
            throw StateError{"write batch would move key version backwards"};
    }

    for (const auto &w : batch.writes) {
        auto &slot = state_[w.key];
        slot.version = Version{batch.block_number, w.tx_index};
        if (w.is_delete) {
            slot.value.reset();
            slot.status = KeyStatus::deleted;
        } else if (w.value) {
            slot.value = w.value;
            slot.status = KeyStatus::live;
        } else {
            slot.value.reset();
            slot.status = KeyStatus::crippled;
        }
    }
    for (const auto &tx : batch.txs) {
        tx_index_[tx.txid] = TxLocation{batch.block_number, tx.tx_index, batch.file_offset};
        for (const auto &k : tx.written_keys) key_index_[k].push_back(tx.txid);
    }
    ++height_;
}

std::optional<TxLocation> StateStore::locate(const Digest &txid) const {
    std::shared_lock lock{mutex_};
    auto it = tx_index_.find(txid);
    if (it == tx_index_.end()) return std::nullopt;
    return it->second;
}

std::vector<Digest> StateStore::lookup_user_txids(ByteView key) const {
    std::shared_lock lock{mutex_};
    auto it = key_index_.find(Bytes(key.begin(), key.end()));
    if (it == key_index_.end()) return {};
    // A transaction writing the key twice appears once.
    std::vector<Digest> out;
    for (const auto &d : it->second)
        if (out.empty() || out.back() != d) out.push_back(d);
    return out;
}

std::vector<Bytes> StateStore::keys_with_prefix(ByteView prefix) const {
    std::shared_lock lock{mutex_};
    std::vector<Bytes> out;
    Bytes p(prefix.begin(), prefix.end());
    for (auto it = key_index_.lower_bound(p); it != key_index_.end(); ++it) {
        if (it->first.size() < p.size() || !std::equal(p.begin(), p.end(), it->first.begin())) break;
        out.push_back(it->first);
    }
    return out;
}

std::vector<StateEntry> StateStore::entries() const {
    std::shared_lock lock{mutex_};
    std::vector<StateEntry> out;
    out.reserve(state_.size());
    for (const auto &[k, slot] : state_) out.push_back(StateEntry{k, slot.value, slot.version, slot.status});
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.key < b.key; });
    return out;
}

std::size_t StateStore::size() const {
    std::shared_lock lock{mutex_};
    return state_.size();
}

// ---- persistence ----

namespace {

constexpr std::uint32_t snapshot_magic = 0x54534c52; // "RLST"
constexpr std::uint32_t index_magic = 0x58494c52;    // "RLIX"

void write_file_atomically(const std::filesystem::path &path, ByteView data) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out{tmp, std::ios::binary | std::ios::trunc};
        out.write(reinterpret_cast<const char *>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out) throw StateError{"cannot write " + tmp.string()};
    }
    std::filesystem::rename(tmp, path);
}

Bytes read_file(const std::filesystem::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw StateError{"cannot read " + path.string()};
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

} // namespace

void StateStore::save_snapshot(const std::filesystem::path &path) const {
    ByteWriter w;
    w.u32(snapshot_magic);
    w.u64(height());
    auto all = entries();
    w.count(all.size());
    for (const auto &e : all) {
        w.bytes(e.key);
        w.u8(static_cast<std::uint8_t>(e.status));
        encode_to(w, e.version);
        w.u8(e.value ? 1 : 0);
        if (e.value) w.bytes(*e.value);
    }
    write_file_atomically(path, w.buffer());
}

void StateStore::save_index(const std::filesystem::path &path) const {
    std::shared_lock lock{mutex_};
    std::vector<std::pair<Digest, TxLocation>> txs(tx_index_.begin(), tx_index_.end());
    std::sort(txs.begin(), txs.end(), [](const auto &a, const auto &b) {
        return std::tie(a.second.block, a.second.tx_index) < std::tie(b.second.block, b.second.tx_index);
    });
    ByteWriter w;
    w.u32(index_magic);
    w.u64(height_);
    w.count(txs.size());
    for (const auto &[id, loc] : txs) {
        w.raw(id.view());
        w.u64(loc.block);
        w.u32(loc.tx_index);
        w.u64(loc.file_offset);
    }
    w.count(key_index_.size());
    for (const auto &[k, ids] : key_index_) {
        w.bytes(k);
        w.count(ids.size());
        for (const auto &id : ids) w.raw(id.view());
    }
    lock.unlock();
    write_file_atomically(path, w.buffer());
}

StateStore StateStore::load(const std::filesystem::path &snapshot, const std::filesystem::path &index) {
    StateStore s;
    auto snap = read_file(snapshot);
    ByteReader r{snap};
    if (r.u32() != snapshot_magic) r.fail("not a state snapshot");
    s.height_ = r.u64();
    auto n = r.count(4);
    for (std::size_t i = 0; i < n; ++i) {
        auto key = r.bytes();
        Slot slot;
        auto status = r.u8();
        if (status > static_cast<std::uint8_t>(KeyStatus::deleted)) r.fail("unknown key status");
        slot.status = static_cast<KeyStatus>(status);
        slot.version.block = r.u64();
        slot.version.tx = r.u32();
        if (r.u8() == 1) {
            auto v = r.bytes();
            slot.value = Bytes(v.begin(), v.end());
        }
        s.state_.emplace(Bytes(key.begin(), key.end()), std::move(slot));
    }
    r.expect_done();

    auto idx = read_file(index);
    ByteReader ir{idx};
    if (ir.u32() != index_magic) ir.fail("not a transaction index");
    if (ir.u64() != s.height_) throw StateError{"snapshot and index heights differ"};
    auto ntx = ir.count(52);
    for (std::size_t i = 0; i < ntx; ++i) {
        auto id = Digest::from(ir.raw(32));
        TxLocation loc;
        loc.block = ir.u64();
        loc.tx_index = ir.u32();
        loc.file_offset = ir.u64();
        s.tx_index_.emplace(id, loc);
    }
    auto nkeys = ir.count(8);
    for (std::size_t i = 0; i < nkeys; ++i) {
        auto key = ir.bytes();
        auto &ids = s.key_index_[Bytes(key.begin(), key.end())];
        auto m = ir.count(32);
        for (std::size_t j = 0; j < m; ++j) ids.push_back(Digest::from(ir.raw(32)));
    }
    ir.expect_done();
    return s;
}

} // namespace redledger
