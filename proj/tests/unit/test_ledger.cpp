#include <catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "carbon/errors.hpp"
#include "carbon/io.hpp"
#include "carbon/ledger.hpp"
#include "support/kv_chaincode.hpp"

using namespace carbon;
namespace fs = std::filesystem;

namespace {

fs::path temp_root(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("carbon-ledger-" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("genesis and identities") {
  KvChaincode cc;
  Ledger ledger(cc);
  REQUIRE(ledger.height() == 1);
  const Block genesis = ledger.blocks().front();
  CHECK(genesis.height == 0);
  CHECK(genesis.prev_hash.is_zero());
  CHECK(genesis.transactions.empty());

  const Identity alice = ledger.register_identity("alice", Role::kProducer);
  CHECK(alice.key_id.size() == 64);
  try {
    ledger.register_identity("alice", Role::kAuditor);
    FAIL("duplicate name accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kDuplicateName);
  }
  try {
    ledger.submit_tx("Put", "a=1", "mallory");
    FAIL("unknown identity accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::kUnknownIdentity);
  }
  CHECK(ledger.pending_count() == 0);
}

TEST_CASE("transactions, blocks and state") {
  KvChaincode cc;
  Ledger ledger(cc, LedgerOptions{std::nullopt, 3, 2});
  ledger.register_identity("alice", Role::kProducer);
  const Hash256 t1 = ledger.submit_tx("Put", "a=1", "alice");
  const Hash256 t2 = ledger.submit_tx("PutNew", "a=2", "alice");
  const Hash256 t3 = ledger.submit_tx("Put", "b=x", "alice");

  // Pending writes are visible to validation but not to queries.
  CHECK(ledger.lookup_tx(t2)->status.reason == "duplicate: a");
  CHECK_FALSE(ledger.query_state("a"));
  CHECK(ledger.flush() == 2);
  CHECK(ledger.height() == 3);

  CHECK(ledger.query_state("a") == "1");
  CHECK(ledger.query_state("b") == "x");
  const auto tx1 = ledger.lookup_tx(t1);
  REQUIRE(tx1);
  CHECK(tx1->payload_digest == digest("a=1"));
  CHECK(tx1->tx_id == compute_tx_id("Put", digest("a=1"), "alice", tx1->sequence));
  CHECK(ledger.lookup_tx(t3)->status.valid);

  const auto history = ledger.get_history("a");
  REQUIRE(history.size() == 2);
  CHECK(history[0].status.valid);
  CHECK_FALSE(history[1].status.valid);
  CHECK(history[1].writes.empty());

  const auto blocks = ledger.blocks();
  for (std::size_t h = 1; h < blocks.size(); ++h) {
    CHECK(blocks[h].prev_hash == blocks[h - 1].block_hash);
    CHECK(blocks[h].block_hash == compute_block_hash(blocks[h]));
  }
  CHECK(ledger.verify_chain().ok);
  CHECK(ledger.replay_check().ok);
  CHECK(state_digest(ledger.rebuild_state()) == ledger.current_state_digest());
}

TEST_CASE("block timestamps follow the clock and never go backwards") {
  KvChaincode cc;
  Ledger ledger(cc, LedgerOptions{std::nullopt, 0, 1});
  ledger.register_identity("alice", Role::kProducer);
  ledger.set_clock(Timestamp{1000});
  ledger.submit_tx("Put", "a=1", "alice");
  ledger.cut_block();
  ledger.set_clock(Timestamp{500});
  ledger.submit_tx("Put", "a=2", "alice");
  ledger.cut_block();
  const auto blocks = ledger.blocks();
  CHECK(blocks[1].timestamp.seconds == 1000);
  CHECK(blocks[2].timestamp.seconds == 1000);
  CHECK_FALSE(ledger.cut_block());
}

TEST_CASE("verification catches edits to committed blocks") {
  KvChaincode cc;
  Ledger ledger(cc);
  ledger.register_identity("alice", Role::kProducer);
  for (int i = 0; i < 30; ++i) ledger.submit_tx("Put", "k" + std::to_string(i) + "=v", "alice");
  ledger.flush();
  const auto members = ledger.membership();
  const auto blocks = ledger.blocks();
  REQUIRE(verify_blocks(blocks, members).ok);

  auto edited = blocks;
  edited[2].transactions[0].payload = "k0=w";
  auto check = verify_blocks(edited, members);
  CHECK_FALSE(check.ok);
  CHECK(check.first_bad_height == 2);

  edited = blocks;
  edited[1].transactions[0].submitter = "bob";
  CHECK(verify_blocks(edited, members).first_bad_height == 1);

  edited = blocks;
  std::swap(edited[1], edited[2]);
  CHECK_FALSE(verify_blocks(edited, members).ok);
}

TEST_CASE("persisted ledger reloads and detects byte flips") {
  const fs::path dir = temp_root("persist");
  Hash256 tip;
  Hash256 state;
  {
    KvChaincode cc;
    Ledger ledger(cc, LedgerOptions{dir, 1, 4});
    ledger.register_identity("alice", Role::kProducer);
    for (int i = 0; i < 10; ++i) ledger.submit_tx("Put", "k" + std::to_string(i % 4) + "=" + std::to_string(i), "alice");
    ledger.flush();
    tip = ledger.tip_hash();
    state = ledger.current_state_digest();
  }
  KvChaincode cc;
  Ledger reopened(cc, LedgerOptions{dir, 1, 4});
  CHECK(reopened.tip_hash() == tip);
  CHECK(reopened.current_state_digest() == state);
  CHECK(reopened.find_identity("alice"));
  CHECK(verify_chain_dir(dir).ok);
  reopened.submit_tx("Put", "z=1", "alice");
  CHECK(reopened.lookup_tx(reopened.get_history("k0").front().tx_id));

  const fs::path block = dir / "blocks" / "2.json";
  const std::string original = read_file(block);
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::string mutated = original;
    const std::size_t pos = rng() % mutated.size();
    mutated[pos] = static_cast<char>(mutated[pos] ^ static_cast<char>(1 + rng() % 255));
    write_file_atomic(block, mutated);
    const auto check = verify_chain_dir(dir);
    REQUIRE_FALSE(check.ok);
  }
  write_file_atomic(block, original);
  CHECK(verify_chain_dir(dir).ok);
  fs::remove_all(dir);
}

TEST_CASE("block encoding round trips") {
  KvChaincode cc;
  Ledger ledger(cc);
  ledger.register_identity("alice", Role::kProducer);
  ledger.submit_tx("Put", "q=\"quoted\"\n", "alice");
  ledger.submit_tx("Put", "=bad", "alice");
  ledger.flush();
  for (const auto& b : ledger.blocks()) {
    const std::string text = serialize_block(b);
    CHECK(text.back() == '\n');
    CHECK(parse_block(text) == b);
  }
}

TEST_CASE("membership registry round trips") {
  MembershipRegistry r(42);
  r.register_identity("p", Role::kProducer);
  r.register_identity("c", Role::kCertifier);
  const auto back = MembershipRegistry::parse(r.serialize());
  CHECK(back.identities() == r.identities());
  const Hash256 d = digest("payload");
  CHECK(back.check_endorsement("c", d, r.endorse("c", d)));
  CHECK_FALSE(back.check_endorsement("p", d, r.endorse("c", d)));
  CHECK(MembershipRegistry(43).register_identity("p", Role::kProducer).key_id != r.identities()[0].key_id);
}
