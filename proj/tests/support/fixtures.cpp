#include "fixtures.hpp"

#include <map>
#include <set>

namespace redledger::testing {

TempDir::TempDir() {
    auto base = std::filesystem::temp_directory_path();
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        auto candidate = base / ("redledger-test-" + std::to_string(rd()) + std::to_string(rd()));
        if (std::filesystem::create_directory(candidate)) {
            path_ = candidate;
            return;
        }
    }
    throw Error{"could not create a temporary directory"};
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

Bytes random_bytes(std::mt19937_64 &rng, std::size_t n) {
    Bytes b(n);
    for (auto &x : b) x = static_cast<std::uint8_t>(rng());
    return b;
}

TransactionEnvelope random_envelope(std::mt19937_64 &rng, const KeyPair &endorser, std::uint32_t writes,
                                    LedgerMode mode, std::uint32_t deletions) {
    TransactionEnvelope env;
    env.tx.txid = Digest::from(random_bytes(rng, 32));
    std::set<Bytes> used;
    auto fresh_key = [&] {
        for (;;) {
            auto k = to_bytes("key-" + std::to_string(rng() % 64));
            if (used.insert(k).second) return k;
        }
    };
    for (std::uint32_t i = 0; i < writes; ++i) {
        auto key = fresh_key();
        auto value = random_bytes(rng, rng() % 40);
        if (mode == LedgerMode::baseline) {
            env.tx.write_set.push_back(WriteEntry::plain(key, value));
        } else {
            auto salt = salt_from(rng);
            env.tx.write_set.push_back(WriteEntry::hashed(key, hash_preimage(salt, value)));
            env.preimages.push_back(make_preimage(salt, value));
        }
    }
    for (std::uint32_t i = 0; i < deletions; ++i) env.tx.write_set.push_back(WriteEntry::deletion(fresh_key()));
    env.tx.endorsements.push_back({endorser.public_key(), endorser.sign(endorsement_signing_bytes(env.tx))});
    return env;
}

Bytes frame(ByteView encoded_block) {
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(encoded_block.size()));
    w.raw(encoded_block);
    return std::move(w).take();
}

Bytes ledger_image(std::span<const Block> blocks) {
    Bytes out;
    for (const auto &b : blocks) {
        auto f = frame(encode(b));
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

Block random_mutated_block(std::mt19937_64 &rng, const KeyPair &endorser) {
    auto pick = [&](std::uint64_t n) { return rng() % n; };
    Block block;
    block.header.number = pick(100);
    auto n = 1 + pick(8);
    for (std::uint64_t t = 0; t < n; ++t) {
        auto env = random_envelope(rng, endorser, static_cast<std::uint32_t>(pick(5)), LedgerMode::redactable,
                                   pick(4) == 0 ? 1 : 0);
        // Now and then reuse an earlier write's exact preimage, so equal digests occur.
        if (!block.preimages.entries.empty() && !env.preimages.empty() && pick(4) == 0) {
            const auto &donor = block.preimages.entries[pick(block.preimages.entries.size())];
            for (std::size_t w = 0, p = 0; w < env.tx.write_set.size(); ++w) {
                if (!env.tx.write_set[w].needs_preimage()) continue;
                if (p++ == 0) {
                    env.tx.write_set[w].value_digest = hash(donor);
                    env.preimages[0] = donor;
                }
            }
        }
        block.transactions.push_back(env.tx);
        for (auto &p : env.preimages) block.preimages.entries.push_back(std::move(p));
    }

    auto &entries = block.preimages.entries;
    for (auto m = pick(4); m > 0; --m) {
        auto any = [&] { return pick(entries.size()); };
        switch (pick(11)) {
        case 0: // redaction
        case 1:
            if (!entries.empty()) {
                auto &e = entries[any()];
                std::fill(e.begin(), e.end(), 0);
            }
            break;
        case 2:
            if (!entries.empty()) {
                auto &e = entries[any()];
                if (!e.empty()) e[pick(e.size())] ^= static_cast<std::uint8_t>(1 + pick(255));
            }
            break;
        case 3:
            if (!entries.empty()) {
                auto &e = entries[any()];
                e = random_bytes(rng, e.size());
            }
            break;
        case 4:
            if (!entries.empty()) {
                auto &e = entries[any()];
                if (!e.empty()) e.pop_back();
            }
            break;
        case 5:
            if (!entries.empty()) entries.erase(entries.begin() + static_cast<std::ptrdiff_t>(any()));
            break;
        case 6: entries.push_back(random_bytes(rng, 32 + pick(20))); break;
        case 7: entries.push_back(Bytes(32 + pick(20), 0)); break;
        case 8:
            if (!entries.empty()) entries.push_back(entries[any()]);
            break;
        case 9:
            if (entries.size() > 1) std::swap(entries[any()], entries[any()]);
            break;
        default:
            if (entries.size() > 1) entries[any()] = entries[any()];
            break;
        }
    }
    return block;
}

ConflictWorkload random_conflict_workload(std::mt19937_64 &rng, std::size_t max_txs) {
    auto pick = [&](std::uint64_t n) { return rng() % n; };
    auto orderer = KeyPair::from_seed(std::uint64_t{31});
    auto endorser = KeyPair::from_seed(std::uint64_t{32});
    ConflictWorkload w;
    w.config.endorsement_policy = {1, {endorser.public_key()}};
    w.config.redaction_policy = {1, {endorser.public_key()}};
    w.config.orderers = {orderer.public_key()};

    const int keys = 5;
    // Every version each key was ever written at, valid or not; reads pick among them.
    std::vector<std::vector<Version>> attempted(keys);
    auto total = 1 + pick(max_txs);
    std::size_t made = 0;
    Digest prev{};
    while (made < total) {
        auto size = std::min<std::size_t>(1 + pick(20), total - made);
        std::uint64_t number = w.blocks.size();
        std::vector<TransactionEnvelope> envs;
        std::vector<SequentialTx> oracle;
        std::vector<std::pair<int, Version>> written;
        for (std::size_t t = 0; t < size; ++t, ++made) {
            TransactionEnvelope env;
            SequentialTx seq;
            env.tx.txid = Digest::from(random_bytes(rng, 32));
            for (int k = 0; k < keys; ++k) {
                if (pick(3) != 0) continue;
                Version v = Version::never_written();
                if (!attempted[k].empty() && pick(5) != 0) {
                    // Mostly the newest attempt, sometimes an older one.
                    v = pick(2) == 0 ? attempted[k].back() : attempted[k][pick(attempted[k].size())];
                }
                auto key = to_bytes("k" + std::to_string(k));
                env.tx.read_set.push_back({key, v});
                seq.reads.push_back({key, v});
            }
            auto nwrites = 1 + pick(2);
            std::vector<int> chosen;
            for (std::uint64_t i = 0; i < nwrites; ++i) {
                int k = static_cast<int>(pick(keys));
                if (std::find(chosen.begin(), chosen.end(), k) != chosen.end()) continue;
                chosen.push_back(k);
                auto key = to_bytes("k" + std::to_string(k));
                if (pick(6) == 0) {
                    env.tx.write_set.push_back(WriteEntry::deletion(key));
                } else {
                    auto salt = salt_from(rng);
                    auto value = random_bytes(rng, 4);
                    env.tx.write_set.push_back(WriteEntry::hashed(key, hash_preimage(salt, value)));
                    env.preimages.push_back(make_preimage(salt, value));
                }
                seq.writes.push_back(key);
                written.push_back({k, Version{number, static_cast<std::uint32_t>(t)}});
            }
            env.tx.endorsements.push_back({endorser.public_key(), endorser.sign(endorsement_signing_bytes(env.tx))});
            envs.push_back(std::move(env));
            oracle.push_back(std::move(seq));
        }
        for (auto &[k, v] : written) attempted[k].push_back(v);
        w.blocks.push_back(form_block(number, prev, envs, orderer));
        prev = compute_block_hash(w.blocks.back().header);
        w.txs.push_back(std::move(oracle));
    }
    return w;
}

namespace {

bool lost_preimage(const Committer &joiner, const Bytes &key, const Version &v) {
    if (v.block >= joiner.height()) return false;
    auto block = joiner.ledger().read(v.block);
    if (v.tx >= block.transactions.size()) return false;
    auto check = check_preimages(block);
    const auto &tx = block.transactions[v.tx];
    for (std::size_t w = 0; w < tx.write_set.size(); ++w)
        if (tx.write_set[w].key == key)
            return tx.write_set[w].needs_preimage() && check.matched[v.tx][w] == PreimageCheck::npos;
    return false;
}

} // namespace

std::vector<std::string> compare_replicas(const Committer &live, const Committer &joiner) {
    std::vector<std::string> diffs;
    if (live.height() != joiner.height()) {
        diffs.push_back("height " + std::to_string(live.height()) + " vs " + std::to_string(joiner.height()));
        return diffs;
    }
    for (std::uint64_t n = 0; n < live.height(); ++n) {
        auto a = live.ledger().read(n);
        auto b = joiner.ledger().read(n);
        if (a.validity_flags != b.validity_flags) diffs.push_back("flags differ in block " + std::to_string(n));
        if (compute_block_hash(a.header) != compute_block_hash(b.header))
            diffs.push_back("header hash differs in block " + std::to_string(n));
        for (std::uint32_t t = 0; t < a.transactions.size(); ++t) {
            auto la = live.state().locate(a.transactions[t].txid);
            auto lb = joiner.state().locate(a.transactions[t].txid);
            if (la != lb) diffs.push_back("txid index differs for " + a.transactions[t].txid.hex());
        }
    }
    if (live.ledger().contents() != joiner.ledger().contents()) diffs.push_back("ledger images differ");

    auto ea = live.state().entries();
    auto eb = joiner.state().entries();
    if (ea.size() != eb.size()) {
        diffs.push_back("key count " + std::to_string(ea.size()) + " vs " + std::to_string(eb.size()));
        return diffs;
    }
    for (std::size_t i = 0; i < ea.size(); ++i) {
        const auto &a = ea[i];
        const auto &b = eb[i];
        auto name = to_string(a.key);
        if (a.key != b.key) {
            diffs.push_back("key sets differ at " + name);
            return diffs;
        }
        if (a.version != b.version)
            diffs.push_back(name + ": version " + to_string(a.version) + " vs " + to_string(b.version));
        if (a.status != b.status) {
            bool allowed = a.status == KeyStatus::live && b.status == KeyStatus::crippled &&
                           lost_preimage(joiner, b.key, b.version);
            if (!allowed)
                diffs.push_back(name + ": status " + std::string{to_string(a.status)} + " vs " +
                                std::string{to_string(b.status)});
        }
        if (a.value && b.value && *a.value != *b.value) diffs.push_back(name + ": values differ");
        if (b.value && !a.value) diffs.push_back(name + ": joiner holds a value the live peer lacks");
        if (live.state().lookup_user_txids(a.key) != joiner.state().lookup_user_txids(b.key))
            diffs.push_back(name + ": key index differs");
    }
    return diffs;
}

std::vector<std::string> run_divergence_scenario(std::uint64_t seed, ScenarioStats *stats) {
    std::mt19937_64 rng{seed};
    auto pick = [&](std::uint64_t n) { return rng() % n; };

    NetworkSetup setup;
    setup.key_seed = seed;
    setup.max_txs_per_block = 1 + static_cast<std::uint32_t>(pick(5));
    setup.endorsers = 1 + static_cast<std::uint32_t>(pick(3));
    setup.endorsement_threshold = 1 + static_cast<std::uint32_t>(pick(setup.endorsers));
    setup.redactors = 1 + static_cast<std::uint32_t>(pick(2));
    setup.redaction_threshold = 1 + static_cast<std::uint32_t>(pick(setup.redactors));
    setup.batch_timeout_ms = 1000;
    Network net{setup};

    ScenarioStats local;
    std::vector<std::string> diffs;
    std::vector<Digest> committed;
    auto record = [&](const std::vector<Block> &blocks) {
        for (const auto &b : blocks)
            for (const auto &tx : b.transactions)
                if (tx.kind == TxKind::endorsed) committed.push_back(tx.txid);
    };
    auto key = [&] { return "acct/" + std::to_string(pick(5)); };

    const auto rounds = 8 + pick(8);
    for (std::uint64_t round = 0; round < rounds; ++round) {
        auto proposals = 1 + pick(4);
        for (std::uint64_t p = 0; p < proposals; ++p) {
            std::vector<std::string> args;
            switch (pick(4)) {
            case 0: args = {"put", key(), "v" + std::to_string(rng() % 1000)}; break;
            case 1: args = {"touch", key(), "t" + std::to_string(rng() % 1000)}; break;
            case 2: args = {"del", key()}; break;
            default: args = {"copy", key(), key()}; break;
            }
            std::vector<Bytes> raw;
            for (const auto &a : args) raw.push_back(to_bytes(a));
            TransactionEnvelope env;
            try {
                env = net.endorse(net.make_proposal("kv", raw, "client-" + std::to_string(pick(3))));
            } catch (const PolicyError &) {
                continue; // e.g. copy from a missing key
            } catch (const CrippledKeyError &) {
                continue;
            }
            if (auto r = net.submit(std::move(env)); !r)
                diffs.push_back("orderer refused an endorsed tx: " + std::string{to_string(r.reason)});
            ++local.txs;
        }

        if (!committed.empty() && pick(10) < 4) {
            auto target = committed[pick(committed.size())];
            auto keys = net.redactable_keys(target);
            if (!keys.empty()) {
                std::vector<Bytes> chosen;
                for (const auto &k : keys)
                    if (pick(2) == 0) chosen.push_back(k);
                if (chosen.empty()) chosen.push_back(keys[pick(keys.size())]);
                if (auto r = net.submit(net.make_redaction(target, chosen)); !r)
                    diffs.push_back("orderer refused a redaction: " + std::string{to_string(r.reason)});
                ++local.redactions;
            }
        }
        if (pick(10) == 0) {
            auto r = net.submit(net.make_redaction(Digest::from(random_bytes(rng, 32)), {to_bytes("acct/0")}));
            if (r || r.reason != RejectReason::unknown_redaction_target)
                diffs.push_back("redaction of an unknown target was not refused");
            ++local.rejected_redactions;
        }

        record(net.deliver(OrderingService::Millis{static_cast<std::int64_t>(pick(2000))}));
        if (pick(3) == 0) record(net.flush());
    }
    record(net.flush());

    auto joiner = replay_ledger(net.peer().ledger().contents(), net.peer_config());
    auto found = compare_replicas(net.peer(), joiner);
    diffs.insert(diffs.end(), found.begin(), found.end());

    for (std::uint64_t n = 0; n < net.peer().height(); ++n)
        for (auto f : net.peer().ledger().read(n).validity_flags)
            if (f != ValidityFlag::valid) ++local.invalid;
    for (const auto &e : joiner.state().entries())
        if (e.status == KeyStatus::crippled) ++local.crippled_on_joiner;
    if (stats) *stats = local;
    return diffs;
}

} // namespace redledger::testing
