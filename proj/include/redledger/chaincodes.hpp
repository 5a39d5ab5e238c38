#pragma once

#include <redledger/endorser.hpp>

namespace redledger {

// kv:   put <key> <value> [<key> <value> ...] | del <key> | copy <from> <to> | touch <key> <value>
//       (touch reads the key before writing it, so it takes part in version checks)
// cars: register <car> <owner> | transfer <car> <from> <to>
//       Ownership lives under car/<car>/owner; holdings under person/<name>/cars/<car>.
void register_builtin_chaincodes(ChaincodeRegistry &registry);
std::shared_ptr<const ChaincodeRegistry> builtin_registry();

} // namespace redledger
