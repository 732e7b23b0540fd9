#pragma once

#include "carbon/ledger.hpp"

// Minimal key/value contract for ledger tests: payload "key=value" writes one
// key; "key=" or a payload without '=' is rejected.
class KvChaincode final : public carbon::Chaincode {
 public:
  carbon::Execution execute(const carbon::Invocation& call, const carbon::StateView& state) const override {
    carbon::Execution ex;
    const auto eq = call.payload.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      ex.status = carbon::TxStatus::invalid("schema: expected key=value");
      return ex;
    }
    const std::string key(call.payload.substr(0, eq));
    ex.keys.push_back(key);
    if (eq + 1 == call.payload.size()) {
      ex.status = carbon::TxStatus::invalid("range: empty value");
      return ex;
    }
    if (call.function == "PutNew" && state.get(key)) {
      ex.status = carbon::TxStatus::invalid("duplicate: " + key);
      return ex;
    }
    ex.writes[key] = std::string(call.payload.substr(eq + 1));
    return ex;
  }
};
