#include "cli.hpp"

#include <redledger/audit.hpp>
#include <redledger/harness.hpp>
#include <redledger/network.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <sodium.h>

#include <cmath>
#include <iomanip>
#include <fstream>
#include <map>
#include <optional>

namespace redledger {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Raised for anything the operator got wrong (bad paths, bad flags, bad input files).
struct UsageError : Error {
    using Error::Error;
};

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

std::string read_text(const fs::path &path) {
    std::ifstream in{path, std::ios::binary};
    if (!in) throw UsageError{"cannot read " + path.string()};
    return {std::istreambuf_iterator<char>(in), {}};
}

void write_bytes(const fs::path &path, ByteView data) {
    std::ofstream out{path, std::ios::binary | std::ios::trunc};
    if (!out) throw UsageError{"cannot write " + path.string()};
    out.write(reinterpret_cast<const char *>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error{"write to " + path.string() + " failed"};
}

void write_text(const fs::path &path, const std::string &text) { write_bytes(path, to_bytes(text)); }

json parse_json_file(const fs::path &path) {
    try {
        return json::parse(read_text(path));
    } catch (const json::exception &e) {
        throw UsageError{path.string() + ": " + e.what()};
    }
}

// Files that make up a network directory.
struct NetworkDir {
    fs::path root;

    fs::path config() const { return root / "config.json"; }
    fs::path anchors() const { return root / "trust_anchors.json"; }
    fs::path orderer_ledger() const { return root / "orderer.ledger"; }
    fs::path peer_ledger() const { return root / "peer.ledger"; }
    fs::path peer_state() const { return root / "peer.state"; }
    fs::path peer_index() const { return root / "peer.index"; }
};

json setup_to_json(const NetworkSetup &s) {
    return {{"mode", std::string{to_string(s.mode)}},
            {"endorsers", s.endorsers},
            {"endorsement_threshold", s.endorsement_threshold},
            {"redactors", s.redactors},
            {"redaction_threshold", s.redaction_threshold},
            {"max_txs_per_block", s.max_txs_per_block},
            {"max_block_bytes", s.max_block_bytes},
            {"batch_timeout_ms", s.batch_timeout_ms},
            {"key_seed", s.key_seed}};
}

NetworkSetup setup_from_json(const json &j) {
    NetworkSetup s;
    try {
        s.mode = parse_ledger_mode(j.at("mode").get<std::string>());
        s.endorsers = j.at("endorsers").get<std::uint32_t>();
        s.endorsement_threshold = j.at("endorsement_threshold").get<std::uint32_t>();
        s.redactors = j.at("redactors").get<std::uint32_t>();
        s.redaction_threshold = j.at("redaction_threshold").get<std::uint32_t>();
        s.max_txs_per_block = j.at("max_txs_per_block").get<std::uint32_t>();
        s.max_block_bytes = j.at("max_block_bytes").get<std::uint32_t>();
        s.batch_timeout_ms = j.at("batch_timeout_ms").get<std::uint32_t>();
        s.key_seed = j.at("key_seed").get<std::uint64_t>();
    } catch (const json::exception &e) {
        throw UsageError{std::string{"bad network config: "} + e.what()};
    }
    s.validate();
    return s;
}

NetworkSetup load_setup(const fs::path &config) { return setup_from_json(parse_json_file(config)); }

// Accepts either a bare list of hex keys or {"orderers": [...]}.
std::vector<PublicKey> load_anchors(const fs::path &path) {
    auto j = parse_json_file(path);
    const json &list = j.is_object() && j.contains("orderers") ? j.at("orderers") : j;
    if (!list.is_array()) throw UsageError{path.string() + ": expected a list of orderer public keys"};
    std::vector<PublicKey> out;
    try {
        for (const auto &k : list) out.push_back(PublicKey::from_hex(k.get<std::string>()));
    } catch (const std::exception &e) {
        throw UsageError{path.string() + ": " + e.what()};
    }
    return out;
}

// A network opened from its directory. The ledgers are file-backed, so blocks and zeroed
// preimages reach disk as they happen; the state snapshot is written by save().
struct OpenNetwork {
    NetworkDir dir;
    std::unique_ptr<Network> net;

    OpenNetwork(const fs::path &root, std::optional<NetworkSetup> override_setup = {}) : dir{root} {
        if (!fs::exists(dir.config())) throw UsageError{root.string() + " is not a network directory (run init)"};
        auto setup = override_setup ? *override_setup : load_setup(dir.config());
        StateStore state;
        if (fs::exists(dir.peer_state())) state = StateStore::load(dir.peer_state(), dir.peer_index());
        net = std::make_unique<Network>(setup, builtin_registry(), BlockStore::open_file(dir.orderer_ledger(), true),
                                        BlockStore::open_file(dir.peer_ledger(), true), std::move(state));
    }

    void save() const {
        net->peer().state().save_snapshot(dir.peer_state());
        net->peer().state().save_index(dir.peer_index());
    }
};

std::uint64_t os_random_u64() {
    std::uint64_t v;
    randombytes_buf(&v, sizeof v);
    return v;
}

std::vector<Bytes> to_bytes_list(const std::vector<std::string> &items) {
    std::vector<Bytes> out;
    for (const auto &s : items) out.push_back(to_bytes(s));
    return out;
}

Digest parse_txid(const std::string &hex) {
    try {
        return Digest::from_hex(hex);
    } catch (const std::exception &e) {
        throw UsageError{"bad txid '" + hex + "': " + e.what()};
    }
}

// Flags come from the peer's copy; the orderer's blocks carry none.
void print_blocks(std::ostream &out, const Network &net, const std::vector<Block> &blocks) {
    for (const auto &b : blocks) {
        auto flags = net.peer().ledger().read(b.header.number).validity_flags;
        out << "block " << b.header.number << ": " << b.transactions.size() << " tx";
        for (std::size_t i = 0; i < b.transactions.size(); ++i)
            out << "\n  " << b.transactions[i].txid.hex() << " " << to_string(b.transactions[i].kind) << " "
                << to_string(flags.at(i));
        out << "\n";
    }
}

// Cuts whatever the thresholds allow, then lets the batch timeout expire so nothing stays queued.
std::vector<Block> drain(Network &net) {
    auto blocks = net.deliver(OrderingService::Millis{0});
    auto timeout = OrderingService::Millis{net.setup().batch_timeout_ms};
    for (auto &b : net.deliver(timeout)) blocks.push_back(std::move(b));
    for (auto &b : net.flush()) blocks.push_back(std::move(b));
    return blocks;
}

void report_admit(std::ostream &out, std::ostream &err, const Digest &txid, const AdmitResult &r) {
    if (r) {
        out << "accepted " << txid.hex() << "\n";
    } else {
        err << "rejected " << txid.hex() << ": " << to_string(r.reason);
        if (!r.detail.empty()) err << " (" << r.detail << ")";
        err << "\n";
    }
}

json state_to_json(const StateStore &state) {
    json entries = json::array();
    for (const auto &e : state.entries()) {
        json j{{"key", to_string(e.key)},
               {"version", to_string(e.version)},
               {"status", std::string{to_string(e.status)}}};
        j["value"] = e.value ? json(to_string(*e.value)) : json(nullptr);
        entries.push_back(std::move(j));
    }
    return {{"height", state.height()}, {"entries", std::move(entries)}};
}

json block_to_json(const Block &b) {
    json txs = json::array();
    for (std::size_t i = 0; i < b.transactions.size(); ++i) {
        const auto &tx = b.transactions[i];
        json writes = json::array();
        for (const auto &w : tx.write_set) {
            json wj{{"key", to_string(w.key)}, {"delete", w.is_delete}};
            if (w.needs_preimage()) wj["value_digest"] = w.value_digest.hex();
            if (w.inline_value) wj["value"] = to_string(*w.inline_value);
            writes.push_back(std::move(wj));
        }
        txs.push_back({{"txid", tx.txid.hex()},
                       {"kind", std::string{to_string(tx.kind)}},
                       {"flag", i < b.validity_flags.size() ? std::string{to_string(b.validity_flags[i])} : ""},
                       {"reads", tx.read_set.size()},
                       {"writes", std::move(writes)},
                       {"endorsements", tx.endorsements.size()}});
    }
    std::size_t redacted = 0;
    for (const auto &e : b.preimages.entries) redacted += PreimageSpace::is_redacted(e);
    return {{"number", b.header.number},
            {"hash", compute_block_hash(b.header).hex()},
            {"prev_hash", b.header.prev_hash.hex()},
            {"data_hash", b.header.data_hash.hex()},
            {"transactions", std::move(txs)},
            {"preimages", b.preimages.entries.size()},
            {"redacted_preimages", redacted}};
}

// --- subcommands ---------------------------------------------------------------------

struct InitArgs {
    std::string dir;
    std::string mode = "redactable";
    NetworkSetup setup;
    std::optional<std::uint64_t> key_seed;
};

int cmd_init(const InitArgs &a, std::ostream &out) {
    NetworkDir dir{a.dir};
    if (fs::exists(dir.config())) throw UsageError{a.dir + " already holds a network"};
    auto setup = a.setup;
    setup.mode = parse_ledger_mode(a.mode);
    setup.key_seed = a.key_seed ? *a.key_seed : os_random_u64();
    setup.validate();
    fs::create_directories(dir.root);
    write_text(dir.config(), setup_to_json(setup).dump(2) + "\n");
    auto keys = NetworkKeys::derive(setup);
    write_text(dir.anchors(), json{{"orderers", {keys.orderer.public_key().hex()}}}.dump(2) + "\n");
    OpenNetwork{dir.root}.save();
    out << "initialised " << to_string(setup.mode) << " network in " << a.dir << "\n";
    return exit_ok;
}

struct ProposeArgs {
    std::string dir;
    std::string chaincode;
    std::string client = "client";
    std::string out;
    std::vector<std::string> args;
};

int cmd_propose(const ProposeArgs &a, std::ostream &out) {
    OpenNetwork n{a.dir};
    Proposal p;
    p.chaincode = a.chaincode;
    p.args = to_bytes_list(a.args);
    p.client_id = to_bytes(a.client);
    p.nonce = os_random_u64();
    p.salt_seed = Digest::from(random_salt().view());
    auto env = n.net->endorse(p);
    write_bytes(a.out, encode(env));
    out << env.tx.txid.hex() << "\n";
    return exit_ok;
}

struct SubmitArgs {
    std::string dir;
    std::vector<std::string> envelopes;
    std::optional<std::uint32_t> max_txs, max_bytes, timeout_ms;
};

int cmd_submit(const SubmitArgs &a, std::ostream &out, std::ostream &err) {
    auto setup = load_setup(NetworkDir{a.dir}.config());
    if (a.max_txs) setup.max_txs_per_block = *a.max_txs;
    if (a.max_bytes) setup.max_block_bytes = *a.max_bytes;
    if (a.timeout_ms) setup.batch_timeout_ms = *a.timeout_ms;
    setup.validate();

    std::vector<TransactionEnvelope> envs;
    for (const auto &path : a.envelopes) {
        auto text = read_text(path);
        try {
            envs.push_back(decode_envelope(to_bytes(text)));
        } catch (const Error &e) {
            throw UsageError{path + ": not an envelope: " + e.what()};
        }
    }

    OpenNetwork n{a.dir, setup};
    bool all_accepted = true;
    for (auto &env : envs) {
        auto txid = env.tx.txid;
        auto r = n.net->submit(std::move(env));
        report_admit(out, err, txid, r);
        all_accepted = all_accepted && r;
    }
    print_blocks(out, *n.net, drain(*n.net));
    n.save();
    return all_accepted ? exit_ok : exit_failed;
}

struct RedactArgs {
    std::string dir;
    std::string txid;
    std::vector<std::string> keys;
};

int cmd_redact(const RedactArgs &a, std::ostream &out, std::ostream &err) {
    OpenNetwork n{a.dir};
    auto &net = *n.net;
    if (net.setup().mode == LedgerMode::baseline) {
        err << "rejected: " << to_string(RejectReason::redaction_disabled) << " (baseline ledgers cannot redact)\n";
        return exit_failed;
    }
    auto target = parse_txid(a.txid);
    auto keys = a.keys.empty() ? net.redactable_keys(target) : to_bytes_list(a.keys);

    std::vector<const KeyPair *> approvers;
    for (std::uint32_t i = 0; i < net.setup().redaction_threshold; ++i) approvers.push_back(&net.keys().redactors[i]);
    auto env = make_redaction_envelope(target, std::move(keys), os_random_u64(), approvers);
    auto id = env.tx.txid;
    auto r = net.submit(std::move(env));
    report_admit(out, err, id, r);
    if (!r) return exit_failed;
    print_blocks(out, net, drain(net));
    n.save();
    return exit_ok;
}

struct ForgetArgs {
    std::string dir;
    std::string prefix;
};

int cmd_forget_user(const ForgetArgs &a, std::ostream &out, std::ostream &err) {
    OpenNetwork n{a.dir};
    if (n.net->setup().mode == LedgerMode::baseline) {
        err << "rejected: " << to_string(RejectReason::redaction_disabled) << " (baseline ledgers cannot redact)\n";
        return exit_failed;
    }
    if (a.prefix.empty()) throw UsageError{"--prefix must not be empty"};
    auto ids = n.net->forget_user(to_bytes(a.prefix));
    n.save();
    out << ids.size() << " redaction transaction(s)\n";
    for (const auto &id : ids) out << id.hex() << "\n";
    return exit_ok;
}

struct AuditArgs {
    std::string ledger;
    std::string anchors;
    std::string report_out;
    std::string config;
};

int cmd_verify(const AuditArgs &a, std::ostream &out, std::ostream &err) {
    auto anchors = load_anchors(a.anchors);
    if (!fs::exists(a.ledger)) throw UsageError{"no ledger at " + a.ledger};
    auto report = verify_chain(fs::path{a.ledger}, anchors);
    if (!a.report_out.empty()) write_text(a.report_out, report.to_json() + "\n");
    out << (report.passed ? "PASS" : "FAIL") << ": " << report.blocks.size() << " block(s)";
    auto redacted = report.redacted_txids();
    out << ", " << redacted.size() << " redacted transaction(s)\n";
    for (const auto &id : redacted) out << "redacted " << id.hex() << "\n";
    if (auto bad = report.first_failure()) {
        const auto &b = report.blocks[*bad];
        err << "first failure at block " << *bad;
        if (!b.decoded) err << ": " << b.error;
        else if (b.header != HeaderCheck::ok) err << ": header " << to_string(b.header);
        else err << ": preimages " << to_string(b.verdict);
        err << "\n";
    }
    return report.passed ? exit_ok : exit_failed;
}

int cmd_rebuild(const AuditArgs &a, std::ostream &out) {
    auto anchors = load_anchors(a.anchors);
    auto setup = load_setup(a.config);
    auto config = peer_config(setup, NetworkKeys::derive(setup));
    config.orderers = anchors;
    if (!fs::exists(a.ledger)) throw UsageError{"no ledger at " + a.ledger};
    auto state = rebuild_state(fs::path{a.ledger}, config);
    auto doc = state_to_json(state).dump(2) + "\n";
    if (a.report_out.empty()) out << doc;
    else write_text(a.report_out, doc);
    std::size_t crippled = 0;
    for (const auto &e : state.entries()) crippled += e.status == KeyStatus::crippled;
    if (!a.report_out.empty())
        out << "rebuilt " << state.size() << " key(s) at height " << state.height() << ", " << crippled
            << " crippled\n";
    return exit_ok;
}

struct BenchArgs {
    std::string spec;
    std::uint64_t seed = 1;
    std::string mode = "both";
    std::uint32_t reps = 5;
    std::string out;
    std::vector<std::uint32_t> block_sizes{50, 100, 250, 500};
    std::optional<std::uint64_t> txs;
    std::string scratch;
};

int cmd_bench(const BenchArgs &a, std::ostream &out) {
    WorkloadSpec spec;
    if (!a.spec.empty()) spec = WorkloadSpec::load(a.spec);
    if (a.txs) spec.total_txs = *a.txs;
    std::vector<LedgerMode> modes;
    if (a.mode == "both") modes = {LedgerMode::baseline, LedgerMode::redactable};
    else modes = {parse_ledger_mode(a.mode)};
    if (a.reps == 0) throw UsageError{"--reps must be positive"};

    fs::path scratch = a.scratch.empty() ? fs::temp_directory_path() / ("redledger-bench-" + std::to_string(os_random_u64()))
                                         : fs::path{a.scratch};
    fs::create_directories(scratch);
    auto ids = WorkloadIdentities::standard();

    std::vector<BenchResult> results;
    std::string csv = bench_csv_header() + "\n";
    try {
        for (auto size : a.block_sizes) {
            for (auto mode : modes) {
                auto s = spec;
                s.txs_per_block = size;
                s.mode = mode;
                s.validate();
                auto file = scratch / "generated.ledger";
                generate_blocks(s, a.seed, file);
                auto ledger = read_ledger_file(file);
                fs::remove(file);
                auto r = bench_commit(ledger, ids.peer_config(mode), {a.reps, scratch});
                results.push_back(r);
                csv += bench_csv_row(r) + "\n";
            }
        }
    } catch (...) {
        if (a.scratch.empty()) fs::remove_all(scratch);
        throw;
    }
    if (a.scratch.empty()) fs::remove_all(scratch);

    if (a.out.empty()) out << csv;
    else write_text(a.out, csv);

    if (modes.size() == 2) {
        double sum = 0;
        for (std::size_t i = 0; i + 1 < results.size(); i += 2) {
            auto ratio = overhead_ratio(results[i].tps_mean, results[i + 1].tps_mean);
            sum += ratio;
            out << "overhead block_size=" << results[i].block_size << ": " << std::fixed << std::setprecision(3)
                << ratio << "\n";
        }
        out << "overhead mean: " << std::fixed << std::setprecision(3) << sum / (results.size() / 2.0) << "\n";
    }
    return exit_ok;
}

struct InspectArgs {
    std::string ledger;
    std::optional<std::uint64_t> block;
};

int cmd_inspect(const InspectArgs &a, std::ostream &out) {
    if (!fs::exists(a.ledger)) throw UsageError{"no ledger at " + a.ledger};
    auto store = BlockStore::open_file(a.ledger);
    json doc;
    if (a.block) {
        if (*a.block >= store.height())
            throw UsageError{"block " + std::to_string(*a.block) + " is past the height " +
                             std::to_string(store.height())};
        doc = block_to_json(store.read(*a.block));
    } else {
        json blocks = json::array();
        for (std::uint64_t n = 0; n < store.height(); ++n) blocks.push_back(block_to_json(store.read(n)));
        doc = {{"height", store.height()}, {"bytes", store.byte_size()}, {"blocks", std::move(blocks)}};
    }
    out << doc.dump(2) << "\n";
    return exit_ok;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    if (sodium_init() < 0) {
        err << "libsodium failed to initialise\n";
        return exit_failed;
    }
    CLI::App app{"Redactable permissioned ledger: network simulator, auditor and benchmark"};
    app.require_subcommand(1);

    InitArgs init;
    auto *c_init = app.add_subcommand("init", "Create a network directory");
    c_init->add_option("--dir", init.dir, "Network directory")->required();
    c_init->add_option("--mode", init.mode, "baseline or redactable")->check(CLI::IsMember({"baseline", "redactable"}));
    c_init->add_option("--endorsers", init.setup.endorsers);
    c_init->add_option("--endorsement-threshold", init.setup.endorsement_threshold);
    c_init->add_option("--redactors", init.setup.redactors);
    c_init->add_option("--redaction-threshold", init.setup.redaction_threshold);
    c_init->add_option("--max-txs", init.setup.max_txs_per_block, "Transactions per block");
    c_init->add_option("--max-bytes", init.setup.max_block_bytes, "Bytes per block");
    c_init->add_option("--timeout-ms", init.setup.batch_timeout_ms, "Batch timeout");
    c_init->add_option("--key-seed", init.key_seed, "Derive identities from this seed (default: random)");

    ProposeArgs propose;
    auto *c_propose = app.add_subcommand("propose", "Simulate a chaincode call and write the endorsed envelope");
    c_propose->add_option("--dir", propose.dir)->required();
    c_propose->add_option("--chaincode", propose.chaincode, "kv or cars")->required();
    c_propose->add_option("--client", propose.client);
    c_propose->add_option("--out", propose.out, "Envelope file")->required();
    c_propose->add_option("args", propose.args, "Chaincode arguments")->required();

    SubmitArgs submit;
    auto *c_submit = app.add_subcommand("submit", "Order envelopes into blocks and commit them");
    c_submit->add_option("--dir", submit.dir)->required();
    c_submit->add_option("envelopes", submit.envelopes)->required()->check(CLI::ExistingFile);
    c_submit->add_option("--max-txs", submit.max_txs);
    c_submit->add_option("--max-bytes", submit.max_bytes);
    c_submit->add_option("--timeout-ms", submit.timeout_ms);

    RedactArgs redact;
    auto *c_redact = app.add_subcommand("redact", "Redact values written by one transaction");
    c_redact->add_option("--dir", redact.dir)->required();
    c_redact->add_option("--txid", redact.txid, "Target transaction (hex)")->required();
    c_redact->add_option("--key", redact.keys, "Key to redact; repeatable (default: every key still present)");

    ForgetArgs forget;
    auto *c_forget = app.add_subcommand("forget-user", "Redact every value written under a key prefix");
    c_forget->add_option("--dir", forget.dir)->required();
    c_forget->add_option("--prefix", forget.prefix)->required();

    AuditArgs verify_args;
    auto *c_verify = app.add_subcommand("verify", "Check a ledger file against orderer trust anchors");
    c_verify->add_option("--ledger", verify_args.ledger)->required();
    c_verify->add_option("--trust-anchors", verify_args.anchors)->required();
    c_verify->add_option("--report-out", verify_args.report_out, "Write the JSON report here");

    AuditArgs rebuild;
    auto *c_rebuild = app.add_subcommand("rebuild", "Replay a ledger file into a fresh state");
    c_rebuild->add_option("--ledger", rebuild.ledger)->required();
    c_rebuild->add_option("--trust-anchors", rebuild.anchors)->required();
    c_rebuild->add_option("--config", rebuild.config, "Network config.json (endorsement and redaction policies)")
        ->required();
    c_rebuild->add_option("--report-out", rebuild.report_out, "Write the state as JSON here");

    BenchArgs bench;
    auto *c_bench = app.add_subcommand("bench", "Commit-path throughput, baseline against redactable");
    c_bench->add_option("--spec", bench.spec, "Workload JSON");
    c_bench->add_option("--seed", bench.seed);
    c_bench->add_option("--mode", bench.mode)->check(CLI::IsMember({"baseline", "redactable", "both"}));
    c_bench->add_option("--reps", bench.reps);
    c_bench->add_option("--out", bench.out, "CSV file (default: stdout)");
    c_bench->add_option("--block-sizes", bench.block_sizes)->delimiter(',');
    c_bench->add_option("--txs", bench.txs, "Override total_txs");
    c_bench->add_option("--scratch", bench.scratch, "Directory for generated and committed ledgers");

    InspectArgs inspect;
    auto *c_inspect = app.add_subcommand("inspect", "Dump ledger blocks as JSON");
    c_inspect->add_option("--ledger", inspect.ledger)->required();
    c_inspect->add_option("--block", inspect.block);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*c_init) return cmd_init(init, out);
        if (*c_propose) return cmd_propose(propose, out);
        if (*c_submit) return cmd_submit(submit, out, err);
        if (*c_redact) return cmd_redact(redact, out, err);
        if (*c_forget) return cmd_forget_user(forget, out, err);
        if (*c_verify) return cmd_verify(verify_args, out, err);
        if (*c_rebuild) return cmd_rebuild(rebuild, out);
        if (*c_bench) return cmd_bench(bench, out);
        if (*c_inspect) return cmd_inspect(inspect, out);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_failed;
    }
    return exit_usage;
}

} // namespace redledger
