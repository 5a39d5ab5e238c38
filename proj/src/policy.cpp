#include <redledger/policy.hpp>

#include <algorithm>

namespace redledger {

std::string_view to_string(LedgerMode m) {
    return m == LedgerMode::baseline ? "baseline" : "redactable";
}

LedgerMode parse_ledger_mode(std::string_view s) {
    if (s == "baseline") return LedgerMode::baseline;
    if (s == "redactable") return LedgerMode::redactable;
    throw Error{"unknown ledger mode '" + std::string{s} + "'"};
}

void ThresholdPolicy::validate() const {
    if (threshold < 1 || threshold > members.size())
        throw Error{"policy threshold " + std::to_string(threshold) + " outside 1.." +
                    std::to_string(members.size())};
}

bool ThresholdPolicy::is_member(const PublicKey &pk) const {
    return std::find(members.begin(), members.end(), pk) != members.end();
}

PolicyCheck check_signatures(const ThresholdPolicy &policy, ByteView message,
                             std::span<const EndorserSignature> signatures) {
    std::vector<PublicKey> counted;
    for (const auto &s : signatures) {
        if (!verify(s.endorser, message, s.signature)) return PolicyCheck::bad_signature;
        if (policy.is_member(s.endorser) &&
            std::find(counted.begin(), counted.end(), s.endorser) == counted.end())
            counted.push_back(s.endorser);
    }
    return counted.size() >= policy.threshold ? PolicyCheck::ok : PolicyCheck::unmet;
}

} // namespace redledger
