#include <redledger/harness.hpp>
#include <redledger/ordering.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace redledger {

void WorkloadSpec::validate() const {
    if (total_txs == 0 || writes_per_tx == 0 || key_space == 0 || key_bytes == 0 || value_bytes == 0 ||
        txs_per_block == 0)
        throw Error{"workload spec: every field must be positive"};
    if (key_bytes < 2) throw Error{"workload spec: key_bytes must be at least 2"};
    if (writes_per_tx > key_space) throw Error{"workload spec: writes_per_tx exceeds key_space"};
    // "k" plus the digits of the largest key index must fit.
    if (std::to_string(key_space - 1).size() + 1 > key_bytes)
        throw Error{"workload spec: key_space does not fit in key_bytes"};
}

WorkloadSpec WorkloadSpec::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception &e) {
        throw Error{std::string{"workload spec: "} + e.what()};
    }
    WorkloadSpec s;
    try {
        s.total_txs = j.value("total_txs", s.total_txs);
        s.writes_per_tx = j.value("writes_per_tx", s.writes_per_tx);
        s.key_space = j.value("key_space", s.key_space);
        s.key_bytes = j.value("key_bytes", s.key_bytes);
        s.value_bytes = j.value("value_bytes", s.value_bytes);
        s.txs_per_block = j.value("txs_per_block", s.txs_per_block);
        if (j.contains("mode")) s.mode = parse_ledger_mode(j.at("mode").get<std::string>());
    } catch (const nlohmann::json::exception &e) {
        throw Error{std::string{"workload spec: "} + e.what()};
    }
    s.validate();
    return s;
}

WorkloadSpec WorkloadSpec::load(const std::filesystem::path &path) {
    std::ifstream in{path};
    if (!in) throw Error{"cannot read workload spec " + path.string()};
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json(ss.str());
}

WorkloadIdentities WorkloadIdentities::standard() {
    return {KeyPair::from_seed(std::uint64_t{1}), KeyPair::from_seed(std::uint64_t{1001}),
            KeyPair::from_seed(std::uint64_t{2001})};
}

PeerConfig WorkloadIdentities::peer_config(LedgerMode mode) const {
    PeerConfig c;
    c.endorsement_policy = {1, {endorser.public_key()}};
    c.redaction_policy = {1, {redactor.public_key()}};
    c.orderers = {orderer.public_key()};
    c.mode = mode;
    return c;
}

Bytes workload_key(std::uint32_t i, std::uint32_t width) {
    auto digits = std::to_string(i);
    if (digits.size() + 1 > width) throw Error{"workload key " + digits + " does not fit in " + std::to_string(width)};
    std::string k = "k";
    k.append(width - 1 - digits.size(), '0');
    k += digits;
    return to_bytes(k);
}

namespace {

template <typename Sink>
GeneratedLedger generate_into(const WorkloadSpec &spec, std::uint64_t seed, Sink &&sink) {
    spec.validate();
    auto ids = WorkloadIdentities::standard();
    std::mt19937_64 rng{seed};

    std::vector<Bytes> keys;
    std::vector<std::uint32_t> order(spec.key_space);
    for (std::uint32_t i = 0; i < spec.key_space; ++i) {
        keys.push_back(workload_key(i, spec.key_bytes));
        order[i] = i;
    }

    GeneratedLedger out;
    Digest prev{};
    std::vector<TransactionEnvelope> batch;
    Bytes value(spec.value_bytes);
    std::uint64_t made = 0;
    while (made < spec.total_txs) {
        batch.clear();
        auto n = std::min<std::uint64_t>(spec.txs_per_block, spec.total_txs - made);
        for (std::uint64_t t = 0; t < n; ++t, ++made) {
            TransactionEnvelope env;
            ByteWriter idw;
            idw.raw(to_bytes("workload-tx"));
            idw.u64(seed);
            idw.u64(made);
            env.tx.txid = hash(idw.buffer());
            // Distinct keys per transaction, drawn by a partial shuffle; the write set is
            // kept sorted like a simulated one.
            for (std::uint32_t w = 0; w < spec.writes_per_tx; ++w) {
                std::uniform_int_distribution<std::uint32_t> d{w, spec.key_space - 1};
                std::swap(order[w], order[d(rng)]);
            }
            std::map<Bytes, Bytes> writes;
            for (std::uint32_t w = 0; w < spec.writes_per_tx; ++w) {
                for (auto &b : value) b = static_cast<std::uint8_t>(rng());
                writes[keys[order[w]]] = value;
            }
            for (auto &[k, v] : writes) {
                if (spec.mode == LedgerMode::baseline) {
                    env.tx.write_set.push_back(WriteEntry::plain(k, v));
                } else {
                    auto salt = salt_from(rng);
                    env.tx.write_set.push_back(WriteEntry::hashed(k, hash_preimage(salt, v)));
                    env.preimages.push_back(make_preimage(salt, v));
                }
            }
            auto sig = ids.endorser.sign(endorsement_signing_bytes(env.tx));
            env.tx.endorsements.push_back({ids.endorser.public_key(), sig});
            out.writes += env.tx.write_set.size();
            out.preimages += env.preimages.size();
            batch.push_back(std::move(env));
        }
        auto block = form_block(out.blocks, prev, batch, ids.orderer);
        prev = compute_block_hash(block.header);
        auto encoded = encode(block);
        ByteWriter frame;
        frame.u32(static_cast<std::uint32_t>(encoded.size()));
        sink(frame.buffer());
        sink(ByteView{encoded});
        ++out.blocks;
    }
    out.txs = made;
    return out;
}

} // namespace

GeneratedLedger generate_blocks(const WorkloadSpec &spec, std::uint64_t seed) {
    Bytes ledger;
    auto out = generate_into(spec, seed, [&](ByteView b) { ledger.insert(ledger.end(), b.begin(), b.end()); });
    out.ledger = std::move(ledger);
    return out;
}

GeneratedLedger generate_blocks(const WorkloadSpec &spec, std::uint64_t seed, const std::filesystem::path &path) {
    std::ofstream f{path, std::ios::binary | std::ios::trunc};
    if (!f) throw Error{"cannot create " + path.string()};
    auto out = generate_into(spec, seed, [&](ByteView b) {
        f.write(reinterpret_cast<const char *>(b.data()), static_cast<std::streamsize>(b.size()));
        if (!f) throw Error{"write failed on " + path.string()};
    });
    f.close();
    if (!f) throw Error{"write failed on " + path.string()};
    return out;
}

BenchResult bench_commit(ByteView ledger, const PeerConfig &config, const BenchOptions &options) {
    if (options.reps == 0) throw Error{"bench: reps must be positive"};
    auto scan = scan_ledger(ledger);
    if (scan.torn_at) throw Error{"bench: ledger has a torn record"};
    if (scan.records.empty()) throw Error{"bench: empty ledger"};

    BenchResult r;
    r.mode = config.mode;
    r.reps = options.reps;
    {
        auto first = decode_block(ledger.subspan(scan.records[0].offset, scan.records[0].length));
        r.block_size = static_cast<std::uint32_t>(first.transactions.size());
    }

    std::vector<double> tps;
    CommitTimings total;
    for (std::uint32_t rep = 0; rep < options.reps; ++rep) {
        std::filesystem::path file;
        BlockStore store = BlockStore::in_memory();
        if (!options.scratch_dir.empty()) {
            std::filesystem::create_directories(options.scratch_dir);
            file = options.scratch_dir / ("bench-" + std::to_string(rep) + ".ledger");
            std::filesystem::remove(file);
            store = BlockStore::open_file(file);
        }
        std::uint64_t txs = 0;
        CommitTimings t;
        double elapsed = 0;
        {
            Committer peer{config, std::move(store)};
            auto start = std::chrono::steady_clock::now();
            for (const auto &rec : scan.records) {
                auto report = peer.process_encoded(ledger.subspan(rec.offset, rec.length), &t);
                txs += report.flags.size();
            }
            elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        if (!file.empty()) std::filesystem::remove(file);
        tps.push_back(static_cast<double>(txs) / elapsed);
        r.txs = txs;
        total.validate_s += t.validate_s;
        total.resolve_s += t.resolve_s;
        total.append_s += t.append_s;
        total.apply_s += t.apply_s;
    }

    double sum = 0;
    for (double x : tps) sum += x;
    r.tps_mean = sum / tps.size();
    double var = 0;
    for (double x : tps) var += (x - r.tps_mean) * (x - r.tps_mean);
    r.tps_stddev = tps.size() > 1 ? std::sqrt(var / (tps.size() - 1)) : 0.0;
    double per_rep_ms = 1000.0 / options.reps;
    r.validate_ms = total.validate_s * per_rep_ms;
    r.resolve_ms = total.resolve_s * per_rep_ms;
    r.append_ms = total.append_s * per_rep_ms;
    r.apply_ms = total.apply_s * per_rep_ms;
    return r;
}

std::string bench_csv_header() {
    return "block_size,mode,reps,txs,tps_mean,tps_stddev,validate_ms,resolve_ms,append_ms,apply_ms";
}

std::string bench_csv_row(const BenchResult &r) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%u,%s,%u,%llu,%.1f,%.1f,%.3f,%.3f,%.3f,%.3f", r.block_size,
                  std::string{to_string(r.mode)}.c_str(), r.reps, static_cast<unsigned long long>(r.txs), r.tps_mean,
                  r.tps_stddev, r.validate_ms, r.resolve_ms, r.append_ms, r.apply_ms);
    return buf;
}

} // namespace redledger
