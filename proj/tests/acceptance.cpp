// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include "support/fixtures.hpp"

#include <cli.hpp>
#include <redledger/harness.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

using namespace redledger;
using namespace redledger::testing;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Records the first few failures of a criterion without stopping it.
class Failures {
public:
    void add(std::string what) {
        if (count_++ < 5) messages_ += (messages_.empty() ? "" : "; ") + what;
    }
    bool any() const { return count_ > 0; }
    std::string summary() const {
        return std::to_string(count_) + " failure(s): " + messages_ + (count_ > 5 ? "; ..." : "");
    }

private:
    std::size_t count_ = 0;
    std::string messages_;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

std::vector<Bytes> args(std::initializer_list<std::string> list) {
    std::vector<Bytes> out;
    for (const auto &a : list) out.push_back(to_bytes(a));
    return out;
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(std::vector<std::string> argv_strings) {
    argv_strings.insert(argv_strings.begin(), "redledger-cli");
    std::vector<const char *> argv;
    for (const auto &a : argv_strings) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string first_line(const std::string &text) { return text.substr(0, text.find('\n')); }

// ---------------------------------------------------------------------------------------

Outcome preimage_check_matches_bijection_oracle() {
    auto endorser = KeyPair::from_seed(std::uint64_t{8});
    PeerConfig config{{1, {endorser.public_key()}}, {1, {endorser.public_key()}}, {}, LedgerMode::redactable};
    Committer peer{config, BlockStore::in_memory()};
    std::mt19937_64 rng{20240601};

    Failures f;
    std::size_t accepted = 0;
    const int blocks = 10000;
    auto t0 = Clock::now();
    for (int i = 0; i < blocks; ++i) {
        auto block = random_mutated_block(rng, endorser);
        bool expected = preimage_bijection_exists(block);
        bool got = peer.validate_block(block).verdict == Verdict::success;
        if (got != expected) f.add("block " + std::to_string(i) + " expected " + (expected ? "accept" : "reject"));
        accepted += expected;
    }
    double elapsed = seconds_since(t0);
    if (elapsed >= 60) f.add("took " + fixed(elapsed, 1) + " s");
    // A corpus that is nearly all one outcome would make agreement meaningless.
    if (accepted < blocks / 5 || accepted > blocks * 4 / 5) f.add("unbalanced corpus: " + std::to_string(accepted));
    std::string detail = std::to_string(blocks) + " blocks, " + std::to_string(accepted) + " accepted by the oracle, " +
                         fixed(elapsed, 2) + " s";
    return {!f.any(), f.any() ? f.summary() : detail};
}

// The signed prefix (header, transactions, orderer signature) of every record, plus header hashes.
struct ChainFingerprint {
    std::vector<Bytes> signed_bytes;
    std::vector<Digest> header_hashes;
    std::vector<Signature> signatures;
};

ChainFingerprint fingerprint(const BlockStore &store) {
    ChainFingerprint fp;
    for (std::uint64_t n = 0; n < store.height(); ++n) {
        auto record = store.read_record(n);
        BlockLayout layout;
        auto block = decode_block(record, &layout);
        fp.signed_bytes.emplace_back(record.begin(), record.begin() + static_cast<std::ptrdiff_t>(layout.signature_end));
        fp.header_hashes.push_back(compute_block_hash(block.header));
        fp.signatures.push_back(block.orderer_signature);
    }
    return fp;
}

Outcome redaction_preserves_hash_chain() {
    Failures f;
    std::size_t zeroed_total = 0, redactions = 0, blocks_total = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        std::mt19937_64 rng{seed * 7919};
        auto pick = [&](std::uint64_t n) { return rng() % n; };
        NetworkSetup setup;
        setup.key_seed = seed;
        setup.max_txs_per_block = 1 + static_cast<std::uint32_t>(pick(4));
        setup.redactors = 1 + static_cast<std::uint32_t>(pick(3));
        setup.redaction_threshold = 1 + static_cast<std::uint32_t>(pick(setup.redactors));
        Network net{setup};

        std::vector<Digest> txids;
        auto txs = 2 + pick(9);
        for (std::uint64_t t = 0; t < txs; ++t) {
            std::vector<Bytes> a{to_bytes("put")};
            auto writes = 1 + pick(3);
            for (std::uint64_t w = 0; w < writes; ++w) {
                a.push_back(to_bytes("key" + std::to_string(w * 10 + pick(10))));
                a.push_back(to_bytes("value-" + std::to_string(seed) + "-" + std::to_string(t) + "-" +
                                     std::to_string(w)));
            }
            auto env = net.endorse(net.make_proposal("kv", std::move(a)));
            txids.push_back(env.tx.txid);
            if (!net.submit(std::move(env))) f.add("seed " + std::to_string(seed) + ": submit refused");
            if (pick(3) == 0) net.deliver(OrderingService::Millis{0});
        }
        net.flush();

        auto before_peer = fingerprint(net.peer().ledger());
        auto before_orderer = fingerprint(net.orderer().store());
        auto image_before = net.peer().ledger().contents();

        auto rounds = 1 + pick(4);
        for (std::uint64_t r = 0; r < rounds; ++r) {
            auto target = txids[pick(txids.size())];
            auto keys = net.redactable_keys(target);
            if (keys.empty()) continue;
            std::vector<Bytes> chosen;
            for (auto &k : keys)
                if (pick(2) == 0) chosen.push_back(k);
            if (chosen.empty()) chosen.push_back(keys.front());
            if (!net.redact(target, chosen)) f.add("seed " + std::to_string(seed) + ": redaction refused");
            ++redactions;
        }

        // Compare only the blocks that existed before; redaction transactions add new ones.
        for (const auto *store : std::vector<const BlockStore *>{&net.peer().ledger(), &net.orderer().store()}) {
            const auto &before = store == &net.peer().ledger() ? before_peer : before_orderer;
            auto after = fingerprint(*store);
            for (std::size_t n = 0; n < before.signed_bytes.size(); ++n) {
                if (after.signed_bytes[n] != before.signed_bytes[n] || after.header_hashes[n] != before.header_hashes[n] ||
                    after.signatures[n] != before.signatures[n])
                    f.add("seed " + std::to_string(seed) + ": block " + std::to_string(n) + " changed");
                if (n + 1 < after.header_hashes.size()) {
                    auto next = store->read(n + 1);
                    if (next.header.prev_hash != after.header_hashes[n])
                        f.add("seed " + std::to_string(seed) + ": link broken after block " + std::to_string(n));
                }
            }
        }
        auto report = verify_chain(net.peer().ledger().contents(), net.peer_config().orderers);
        if (!report.passed) f.add("seed " + std::to_string(seed) + ": verify_chain failed");
        auto image_after = net.peer().ledger().contents();
        for (std::size_t i = 0; i < image_before.size(); ++i)
            zeroed_total += image_before[i] != image_after[i];
        blocks_total += before_peer.signed_bytes.size();
    }
    if (zeroed_total == 0) f.add("no redaction changed any byte");
    std::string detail = "1000 chains, " + std::to_string(blocks_total) + " blocks, " + std::to_string(redactions) +
                         " redactions, " + std::to_string(zeroed_total) + " preimage bytes zeroed";
    return {!f.any(), f.any() ? f.summary() : detail};
}

Outcome live_peer_and_joiner_agree() {
    Failures f;
    ScenarioStats total;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        ScenarioStats s;
        auto diffs = run_divergence_scenario(seed, &s);
        if (!diffs.empty()) f.add("seed " + std::to_string(seed) + ": " + diffs.front());
        total.txs += s.txs;
        total.invalid += s.invalid;
        total.redactions += s.redactions;
        total.rejected_redactions += s.rejected_redactions;
        total.crippled_on_joiner += s.crippled_on_joiner;
    }
    if (total.redactions == 0 || total.crippled_on_joiner == 0 || total.invalid == 0)
        f.add("scenarios did not exercise redactions, crippled keys and conflicts");
    std::string detail = "1000 scenarios, " + std::to_string(total.txs) + " txs, " + std::to_string(total.invalid) +
                         " flagged invalid, " + std::to_string(total.redactions) + " redactions, " +
                         std::to_string(total.crippled_on_joiner) + " crippled keys on joiners, 0 divergences";
    return {!f.any(), f.any() ? f.summary() : detail};
}

// Salts and values of every present preimage written under `prefix`, and the writing txids.
struct UserData {
    std::vector<Bytes> secrets;
    std::set<Digest> writers;
};

UserData collect_user_data(const BlockStore &ledger, const std::string &prefix) {
    UserData d;
    for (std::uint64_t n = 0; n < ledger.height(); ++n) {
        auto block = ledger.read(n);
        for (const auto &tx : block.transactions)
            for (const auto &w : tx.write_set) {
                if (!w.needs_preimage() || to_string(w.key).rfind(prefix, 0) != 0) continue;
                for (const auto &e : block.preimages.entries) {
                    if (PreimageSpace::is_redacted(e) || hash(e) != w.value_digest) continue;
                    auto [salt, value] = split_preimage(e);
                    d.secrets.push_back(Bytes(salt.bytes.begin(), salt.bytes.end()));
                    d.secrets.emplace_back(value.begin(), value.end());
                    d.writers.insert(tx.txid);
                }
            }
    }
    return d;
}

bool contains_any(ByteView image, const std::vector<Bytes> &needles) {
    for (const auto &n : needles)
        if (std::search(image.begin(), image.end(), n.begin(), n.end()) != image.end()) return true;
    return false;
}

Outcome forget_user_erases_values_and_salts() {
    Failures f;

    // Through the CLI, against real files.
    TempDir tmp;
    auto dir = (tmp / "net").string();
    if (cli({"init", "--dir", dir, "--key-seed", "4"}).code != 0) return {false, "init failed"};
    int envs = 0;
    auto invoke = [&](std::vector<std::string> a) {
        auto path = (tmp / ("env" + std::to_string(envs++))).string();
        std::vector<std::string> argv{"propose", "--dir", dir, "--chaincode", "kv", "--out", path, "--"};
        argv.insert(argv.end(), a.begin(), a.end());
        if (cli(argv).code != 0 || cli({"submit", "--dir", dir, path}).code != 0) f.add("invoke failed");
    };
    invoke({"put", "user/dana/email", "dana.1@mail.example", "user/erin/email", "erin@mail.example"});
    invoke({"put", "user/dana/phone", "+1-555-0101"});
    invoke({"put", "user/erin/phone", "+1-555-0202"});
    invoke({"put", "user/dana/email", "dana.2@mail.example", "user/dana/city", "Springfield"});
    invoke({"put", "user/dana/email", "dana.3@mail.example"});

    UserData dana;
    {
        auto store = BlockStore::open_file(dir + "/peer.ledger");
        dana = collect_user_data(store, "user/dana/");
    }
    auto forget = cli({"forget-user", "--dir", dir, "--prefix", "user/dana/"});
    if (forget.code != 0) f.add("forget-user exited " + std::to_string(forget.code) + ": " + forget.err);
    if (first_line(forget.out) != std::to_string(dana.writers.size()) + " redaction transaction(s)")
        f.add("forget-user issued: " + first_line(forget.out));

    for (const auto *file : {"/peer.ledger", "/orderer.ledger"}) {
        auto image = read_ledger_file(dir + file);
        if (contains_any(image, dana.secrets)) f.add(std::string{file} + " still holds a redacted value or salt");
        if (!contains_any(image, {to_bytes("erin@mail.example")})) f.add(std::string{file} + " lost unrelated data");
    }
    auto v = cli({"verify", "--ledger", dir + "/peer.ledger", "--trust-anchors", dir + "/trust_anchors.json"});
    if (v.code != 0) f.add("verify exited " + std::to_string(v.code));
    auto anchors = Network{NetworkSetup{.key_seed = 4}}.peer_config().orderers;
    auto report = verify_chain(std::filesystem::path{dir + "/peer.ledger"}, anchors);
    auto listed = report.redacted_txids();
    if (!report.passed || std::set<Digest>(listed.begin(), listed.end()) != dana.writers ||
        listed.size() != dana.writers.size())
        f.add("verify_chain listed " + std::to_string(listed.size()) + " txids, expected " +
              std::to_string(dana.writers.size()));

    // Randomised, in memory.
    std::size_t scenarios = 200, secrets = 0;
    for (std::uint64_t seed = 1; seed <= scenarios; ++seed) {
        std::mt19937_64 rng{seed};
        auto pick = [&](std::uint64_t n) { return rng() % n; };
        NetworkSetup setup;
        setup.key_seed = seed;
        setup.max_txs_per_block = 1 + static_cast<std::uint32_t>(pick(4));
        Network net{setup};
        auto txs = 3 + pick(12);
        for (std::uint64_t t = 0; t < txs; ++t) {
            std::vector<Bytes> a{to_bytes("put")};
            std::set<std::string> keys;
            for (auto w = 1 + pick(3); w > 0; --w)
                keys.insert("user/u" + std::to_string(pick(4)) + "/f" + std::to_string(pick(3)));
            for (const auto &k : keys) {
                char value[48];
                std::snprintf(value, sizeof value, "<%06llu:%06llu:%s>", static_cast<unsigned long long>(seed),
                              static_cast<unsigned long long>(t), k.c_str());
                a.push_back(to_bytes(k));
                a.push_back(to_bytes(value));
            }
            net.submit(net.endorse(net.make_proposal("kv", std::move(a))));
            if (pick(2) == 0) net.deliver(OrderingService::Millis{0});
        }
        net.flush();
        auto prefix = "user/u" + std::to_string(pick(4)) + "/";
        auto user = collect_user_data(net.peer().ledger(), prefix);
        auto ids = net.forget_user(to_bytes(prefix));
        secrets += user.secrets.size();
        if (ids.size() != user.writers.size()) f.add("seed " + std::to_string(seed) + ": wrong redaction count");
        for (const auto *store : std::vector<const BlockStore *>{&net.peer().ledger(), &net.orderer().store()})
            if (contains_any(store->contents(), user.secrets))
                f.add("seed " + std::to_string(seed) + ": secret survived");
        auto r = verify_chain(net.peer().ledger().contents(), net.peer_config().orderers);
        auto got = r.redacted_txids();
        if (!r.passed || std::set<Digest>(got.begin(), got.end()) != user.writers)
            f.add("seed " + std::to_string(seed) + ": verify_chain disagrees");
    }

    std::string detail = "CLI scenario: " + std::to_string(dana.writers.size()) + " txs redacted, " +
                         std::to_string(dana.secrets.size()) + " values and salts absent; " +
                         std::to_string(scenarios) + " random scenarios, " + std::to_string(secrets) +
                         " values and salts absent";
    return {!f.any(), f.any() ? f.summary() : detail};
}

Outcome car_ownership_rebuilds_to_charley() {
    Failures f;
    auto owner_on_joiner = [&](const Network &net) -> std::string {
        auto joiner = replay_ledger(net.peer().ledger().contents(), net.peer_config());
        auto diffs = compare_replicas(net.peer(), joiner);
        if (!diffs.empty()) f.add("joiner diverged: " + diffs.front());
        auto owner = joiner.state().get(to_bytes("car/car1/owner"));
        if (!owner) return "<absent>";
        if (owner->status == KeyStatus::crippled) return "<crippled>";
        return owner->value ? to_string(*owner->value) : "<no value>";
    };

    // Variant 1: the Alice to Bob transfer is redacted in full after Charley owns the car.
    {
        Network net{NetworkSetup{}};
        net.invoke("cars", args({"register", "car1", "Alice"}));
        auto to_bob = net.invoke("cars", args({"transfer", "car1", "Alice", "Bob"}));
        net.invoke("cars", args({"transfer", "car1", "Bob", "Charley"}));
        if (!net.redact(to_bob, net.redactable_keys(to_bob))) f.add("redaction refused");
        auto owner = owner_on_joiner(net);
        if (owner != "Charley") f.add("full redaction: joiner owner is " + owner);
    }
    // Variant 2: forget-user on Bob's key space.
    {
        Network net{NetworkSetup{}};
        net.invoke("cars", args({"register", "car1", "Alice"}));
        net.invoke("cars", args({"transfer", "car1", "Alice", "Bob"}));
        net.invoke("cars", args({"transfer", "car1", "Bob", "Charley"}));
        if (net.forget_user(to_bytes("person/Bob/")).empty()) f.add("forget-user found nothing for Bob");
        auto owner = owner_on_joiner(net);
        if (owner != "Charley") f.add("forget-user: joiner owner is " + owner);
    }
    // Variant 3: redacted while Bob still owns the car. The joiner must not fall back to Alice,
    // and Charley's later transfer still goes through on both replicas.
    {
        Network net{NetworkSetup{}};
        net.invoke("cars", args({"register", "car1", "Alice"}));
        auto to_bob = net.invoke("cars", args({"transfer", "car1", "Alice", "Bob"}));
        if (!net.redact(to_bob, net.redactable_keys(to_bob))) f.add("redaction refused");
        auto owner = owner_on_joiner(net);
        if (owner == "Alice") f.add("joiner reverted to Alice before the final transfer");
        net.invoke("cars", args({"transfer", "car1", "Bob", "Charley"}));
        owner = owner_on_joiner(net);
        if (owner != "Charley") f.add("late transfer: joiner owner is " + owner);
    }
    // Variant 4: the same script through the CLI, rebuilt from the ledger file.
    {
        TempDir tmp;
        auto dir = (tmp / "net").string();
        cli({"init", "--dir", dir, "--key-seed", "5"});
        int envs = 0;
        auto invoke = [&](std::vector<std::string> a) {
            auto path = (tmp / ("env" + std::to_string(envs++))).string();
            std::vector<std::string> argv{"propose", "--dir", dir, "--chaincode", "cars", "--out", path, "--"};
            argv.insert(argv.end(), a.begin(), a.end());
            auto p = cli(argv);
            if (p.code != 0 || cli({"submit", "--dir", dir, path}).code != 0) f.add("cli invoke failed");
            return first_line(p.out);
        };
        invoke({"register", "car1", "Alice"});
        auto to_bob = invoke({"transfer", "car1", "Alice", "Bob"});
        invoke({"transfer", "car1", "Bob", "Charley"});
        if (cli({"redact", "--dir", dir, "--txid", to_bob}).code != 0) f.add("cli redact failed");
        auto state_file = (tmp / "state.json").string();
        auto r = cli({"rebuild", "--ledger", dir + "/peer.ledger", "--trust-anchors", dir + "/trust_anchors.json",
                      "--config", dir + "/config.json", "--report-out", state_file});
        std::ifstream in{state_file};
        std::string doc{std::istreambuf_iterator<char>(in), {}};
        if (r.code != 0 || doc.find("\"value\": \"Charley\"") == std::string::npos ||
            doc.find("Alice\"") != std::string::npos)
            f.add("cli rebuild did not end with Charley as sole owner");
    }
    return {!f.any(), f.any() ? f.summary() : "4 variants, joiner owner is Charley in every one, never Alice"};
}

Outcome mvcc_matches_sequential_oracle() {
    Failures f;
    std::mt19937_64 rng{6060};
    std::size_t valid = 0, invalid = 0;
    for (int i = 0; i < 1000; ++i) {
        auto w = random_conflict_workload(rng, 200);
        auto expected = sequential_mvcc(w.txs);
        Committer peer{w.config, BlockStore::in_memory()};
        for (std::size_t b = 0; b < w.blocks.size(); ++b) {
            auto report = peer.process(w.blocks[b]);
            if (report.flags.size() != expected[b].size()) {
                f.add("workload " + std::to_string(i) + " block " + std::to_string(b) + ": flag count");
                continue;
            }
            for (std::size_t t = 0; t < expected[b].size(); ++t) {
                bool got = report.flags[t] == ValidityFlag::valid;
                if (got != expected[b][t])
                    f.add("workload " + std::to_string(i) + " block " + std::to_string(b) + " tx " + std::to_string(t));
                (expected[b][t] ? valid : invalid)++;
            }
        }
    }
    if (valid == 0 || invalid == 0) f.add("workloads did not produce both outcomes");
    std::string detail = "1000 workloads, " + std::to_string(valid + invalid) + " txs (" + std::to_string(valid) +
                         " valid, " + std::to_string(invalid) + " stale)";
    return {!f.any(), f.any() ? f.summary() : detail};
}

Outcome bench_overhead_within_bound() {
    const std::vector<std::uint32_t> sizes{50, 100, 250, 500};
    const std::uint32_t reps = 5;
    WorkloadSpec spec; // 5 writes per tx over 10 keys of 16 bytes, 32-byte values
    spec.total_txs = 100000;
    auto ids = WorkloadIdentities::standard();
    TempDir scratch;

    Failures f;
    std::string detail;
    double worst = 0, sum = 0;
    for (auto size : sizes) {
        double tps[2] = {0, 0};
        int slot = 0;
        for (auto mode : {LedgerMode::baseline, LedgerMode::redactable}) {
            auto s = spec;
            s.txs_per_block = size;
            s.mode = mode;
            auto file = scratch / "generated.ledger";
            generate_blocks(s, 1, file);
            auto r = bench_commit(read_ledger_file(file), ids.peer_config(mode), {reps, scratch.path()});
            std::filesystem::remove(file);
            std::cout << "    " << bench_csv_row(r) << "\n";
            tps[slot++] = r.tps_mean;
        }
        auto ratio = overhead_ratio(tps[0], tps[1]);
        worst = std::max(worst, ratio);
        sum += ratio;
        detail += (detail.empty() ? "" : ", ") + std::to_string(size) + ": " + fixed(ratio * 100, 1) + "%";
        if (ratio > 0.35) f.add("block size " + std::to_string(size) + " overhead " + fixed(ratio * 100, 1) + "%");
    }
    detail = "overhead by block size " + detail + "; mean " + fixed(sum / sizes.size() * 100, 1) + "%, worst " +
             fixed(worst * 100, 1) + "% (bound 35%)";
    return {!f.any(), f.any() ? f.summary() + "; " + detail : detail};
}

Bytes golden(const std::string &name) {
    std::ifstream in{std::string{REDLEDGER_GOLDEN_DIR} + "/" + name, std::ios::binary};
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

Outcome codec_golden_and_sha256_vectors() {
    Failures f;
    struct Golden {
        const char *file;
        const char *header_hash;
    };
    for (auto g : {Golden{"redactable_block.bin", "56a2d502c3371eb558372bf269a5920deda4a9007b77a907a9c8c56c9959b18c"},
                   Golden{"baseline_block.bin", "4816d578036851fb329ce0a52857529960c6125b13d93f04d52291b4d7c2021d"}}) {
        auto bytes = golden(g.file);
        if (bytes.empty()) {
            f.add(std::string{g.file} + " missing");
            continue;
        }
        try {
            auto block = decode_block(bytes);
            if (encode(block) != bytes) f.add(std::string{g.file} + " does not re-encode bit-exactly");
            if (compute_block_hash(block.header).hex() != g.header_hash) f.add(std::string{g.file} + " header hash");
        } catch (const Error &e) {
            f.add(std::string{g.file} + ": " + e.what());
        }
    }

    struct Vector {
        std::string input;
        const char *digest;
    };
    std::vector<Vector> vectors{
        {"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"},
        {"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"},
        {"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq",
         "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"},
        {std::string(1000000, 'a'), "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0"},
    };
    for (const auto &v : vectors) {
        auto d = hash(std::string_view{v.input});
        if (d.hex() != v.digest) f.add("sha256 of " + std::to_string(v.input.size()) + " bytes");
        auto ref = reference_sha256(to_bytes(v.input));
        if (to_hex(ref) != v.digest) f.add("reference sha256 of " + std::to_string(v.input.size()) + " bytes");
    }
    return {!f.any(), f.any() ? f.summary() : "2 golden blocks round-trip bit-exactly, 4 SHA-256 vectors match"};
}

} // namespace

int main() {
    struct Criterion {
        int number;
        const char *title;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> criteria{
        {1, "preimage validation agrees with the bijection oracle", preimage_check_matches_bijection_oracle},
        {2, "redaction leaves header hashes and orderer signatures untouched", redaction_preserves_hash_chain},
        {3, "live peer and post-redaction joiner never diverge", live_peer_and_joiner_agree},
        {4, "forget-user removes every value and salt; verify lists exactly the redacted txs",
         forget_user_erases_values_and_salts},
        {5, "car transferred Alice, Bob, Charley rebuilds to Charley after redacting Bob",
         car_ownership_rebuilds_to_charley},
        {6, "MVCC flags equal the sequential stale-read oracle", mvcc_matches_sequential_oracle},
        {7, "redactable commit throughput overhead vs baseline is at most 35%", bench_overhead_within_bound},
        {8, "golden block encodings and SHA-256 test vectors", codec_golden_and_sha256_vectors},
    };

    int failed = 0;
    for (const auto &c : criteria) {
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string{"exception: "} + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << c.number << ": " << c.title << " -- "
                  << o.detail << " [" << fixed(seconds_since(t0), 1) << " s]" << std::endl;
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criterion(s) failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
