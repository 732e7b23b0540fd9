#pragma once

#include <string>

#include "carbon/canonical.hpp"
#include "carbon/chaincode.hpp"
#include "carbon/ledger.hpp"

namespace fixture {

inline const carbon::Date kDay = carbon::Date::parse("2025-06-01");

// Five clean minutes at constant power.
inline carbon::Batch window_batch(const std::string& producer, const carbon::Date& day, int window,
                                  double power = 24000.0, double voltage = 230.0) {
  carbon::Batch b;
  b.producer_id = producer;
  b.batch_id = carbon::make_batch_id(producer, day, window);
  b.window_start = day.midnight() + window * 300;
  b.window_end = b.window_start + 300;
  for (int i = 0; i < 5; ++i) {
    carbon::PlantMinuteAggregate a;
    a.minute_start = b.window_start + i * 60;
    a.total_power = power;
    a.avg_voltage = voltage;
    a.avg_frequency = 50.0;
    a.phase_count = 24;
    b.aggregates.push_back(a);
  }
  return b;
}

// In-memory ledger with the credit chaincode and one identity per role.
struct CreditNet {
  carbon::CreditChaincode chaincode;
  carbon::Ledger ledger;

  explicit CreditNet(std::size_t block_size = 64)
      : ledger(chaincode, carbon::LedgerOptions{std::nullopt, 1, block_size}) {
    ledger.register_identity("farm-1", carbon::Role::kProducer);
    ledger.register_identity("farm-2", carbon::Role::kProducer);
    ledger.register_identity("cert", carbon::Role::kCertifier);
    ledger.register_identity("aud", carbon::Role::kAuditor);
  }

  carbon::Transaction submit(std::string_view function, std::string payload, const std::string& who) {
    const carbon::Hash256 id = ledger.submit_tx(function, std::move(payload), who);
    return *ledger.lookup_tx(id);
  }

  carbon::Transaction submit_batch(const carbon::Batch& b, const std::string& who = "farm-1") {
    return submit(carbon::fn::kSubmitBatch, carbon::canonical_serialize(b), who);
  }

  // Commits every window of the day at constant power and anchors it.
  void full_day(const std::string& producer, const carbon::Date& day, double power) {
    for (int w = 0; w < carbon::kWindowsPerDay; ++w) submit_batch(window_batch(producer, day, w, power), producer);
    submit(carbon::fn::kAnchorDay, carbon::anchor_day_payload(producer, day, {}, {}), producer);
    ledger.flush();
  }
};

}  // namespace fixture
