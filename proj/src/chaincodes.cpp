#include <redledger/chaincodes.hpp>

namespace redledger {

namespace {

void kv(ChaincodeStub &stub) {
    auto op = stub.arg(0);
    if (op == "put") {
        if (stub.args().size() < 3 || stub.args().size() % 2 == 0) throw ChaincodeError{"put needs key/value pairs"};
        for (std::size_t i = 1; i + 1 < stub.args().size(); i += 2) stub.put(stub.args()[i], stub.args()[i + 1]);
    } else if (op == "del") {
        stub.del(to_bytes(stub.arg(1)));
    } else if (op == "copy") {
        auto v = stub.get(to_bytes(stub.arg(1)));
        if (!v) throw ChaincodeError{"copy source '" + stub.arg(1) + "' does not exist"};
        stub.put(to_bytes(stub.arg(2)), *v);
    } else if (op == "touch") {
        stub.get(to_bytes(stub.arg(1)));
        stub.put(to_bytes(stub.arg(1)), to_bytes(stub.arg(2)));
    } else {
        throw ChaincodeError{"kv: unknown operation '" + op + "'"};
    }
}

Bytes owner_key(const std::string &car) { return to_bytes("car/" + car + "/owner"); }
Bytes holding_key(const std::string &person, const std::string &car) {
    return to_bytes("person/" + person + "/cars/" + car);
}

void cars(ChaincodeStub &stub) {
    auto op = stub.arg(0);
    if (op == "register") {
        auto car = stub.arg(1), owner = stub.arg(2);
        if (stub.get(owner_key(car))) throw ChaincodeError{"car " + car + " already registered"};
        stub.put(owner_key(car), to_bytes(owner));
        stub.put(holding_key(owner, car), to_bytes("registered"));
    } else if (op == "transfer") {
        auto car = stub.arg(1), from = stub.arg(2), to = stub.arg(3);
        auto current = stub.get(owner_key(car));
        if (!current || to_string(*current) != from) throw ChaincodeError{car + " is not owned by " + from};
        stub.put(owner_key(car), to_bytes(to));
        stub.del(holding_key(from, car));
        stub.put(holding_key(to, car), to_bytes("bought from " + from));
    } else {
        throw ChaincodeError{"cars: unknown operation '" + op + "'"};
    }
}

} // namespace

void register_builtin_chaincodes(ChaincodeRegistry &registry) {
    registry.add("kv", kv);
    registry.add("cars", cars);
}

std::shared_ptr<const ChaincodeRegistry> builtin_registry() {
    auto r = std::make_shared<ChaincodeRegistry>();
    register_builtin_chaincodes(*r);
    return r;
}

} // namespace redledger
