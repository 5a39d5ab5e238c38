#pragma once

#include <redledger/model.hpp>

namespace redledger {

// How a ledger carries written values.
enum class LedgerMode : std::uint8_t {
    baseline,   // values inline in the write set, no preimage space
    redactable, // digests in the write set, salted values in the preimage space
};
std::string_view to_string(LedgerMode m);
LedgerMode parse_ledger_mode(std::string_view s);

// t-of-n over a fixed member set.
struct ThresholdPolicy {
    std::uint32_t threshold = 1;
    std::vector<PublicKey> members;

    // Throws Error unless 1 <= threshold <= members.size().
    void validate() const;
    bool is_member(const PublicKey &pk) const;
};

enum class PolicyCheck { ok, bad_signature, unmet };

// Any invalid signature fails with bad_signature. Valid signatures from distinct members
// are counted against the threshold; non-members are ignored.
PolicyCheck check_signatures(const ThresholdPolicy &policy, ByteView message,
                             std::span<const EndorserSignature> signatures);

} // namespace redledger
