#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "carbon/hash.hpp"
#include "carbon/model.hpp"
#include "carbon/time.hpp"

namespace carbon {

inline constexpr std::size_t kDefaultBlockSize = 12;

// Validation outcome. Invalid reasons read "<check>: <detail>", where <check>
// names the rule that failed (schema, duplicate, timestamps, range, ...).
struct TxStatus {
  bool valid = true;
  std::string reason;

  static TxStatus ok() { return {}; }
  static TxStatus invalid(std::string reason) { return {false, std::move(reason)}; }
  std::string_view check() const;
  bool operator==(const TxStatus&) const = default;
};

struct Transaction {
  Hash256 tx_id;
  std::uint64_t sequence = 0;
  std::string function;
  std::string payload;
  Hash256 payload_digest;
  std::string submitter;
  Hash256 endorsement;
  TxStatus status;
  std::vector<std::string> keys;               // every key the transaction addressed
  std::map<std::string, std::string> writes;  // empty unless valid

  bool operator==(const Transaction&) const = default;
};

struct Block {
  std::uint64_t height = 0;
  Hash256 prev_hash;
  Timestamp timestamp;
  std::vector<Transaction> transactions;
  Hash256 block_hash;

  bool operator==(const Block&) const = default;
};

Hash256 compute_tx_id(std::string_view function, const Hash256& payload_digest, std::string_view submitter,
                      std::uint64_t sequence);

// Digest over every block field except block_hash itself.
Hash256 compute_block_hash(const Block& block);

// Block file encoding: sorted-key compact JSON plus a trailing newline.
std::string serialize_block(const Block& block);
// Strict: rejects missing/extra fields, bad digests, and non-canonical bytes.
Block parse_block(std::string_view text);

struct StateEntry {
  std::string value;
  Hash256 last_tx;
  bool operator==(const StateEntry&) const = default;
};

using WorldState = std::map<std::string, StateEntry, std::less<>>;

Hash256 state_digest(const WorldState& state);

// Folds the write sets of valid transactions in chain order.
WorldState fold_state(std::span<const Block> blocks);

class StateView {
 public:
  virtual ~StateView() = default;
  virtual std::optional<std::string> get(std::string_view key) const = 0;
  // Entries whose key starts with `prefix`, in key order.
  virtual std::vector<std::pair<std::string, std::string>> scan_prefix(std::string_view prefix) const = 0;
  // Greatest key with the prefix, if any.
  virtual std::optional<std::pair<std::string, std::string>> last_with_prefix(std::string_view prefix) const = 0;
};

struct Invocation {
  std::string_view function;
  std::string_view payload;
  const Identity& submitter;
  std::uint64_t sequence = 0;
};

struct Execution {
  TxStatus status;
  std::vector<std::string> keys;
  std::map<std::string, std::string> writes;
};

// Smart-contract logic run inside the ordering context. Must be deterministic
// in (invocation, state) so replaying the chain reproduces every result.
class Chaincode {
 public:
  virtual ~Chaincode() = default;
  virtual Execution execute(const Invocation& call, const StateView& state) const = 0;
};

// Membership service: identities and their emulated signing secrets.
class MembershipRegistry {
 public:
  explicit MembershipRegistry(std::uint64_t network_seed = 0) : network_seed_(network_seed) {}

  Identity register_identity(const std::string& name, Role role);  // throws kDuplicateName
  std::optional<Identity> find(std::string_view name) const;
  const std::vector<Identity>& identities() const { return identities_; }

  Hash256 endorse(std::string_view name, const Hash256& payload_digest) const;  // throws kUnknownIdentity
  bool check_endorsement(std::string_view name, const Hash256& payload_digest, const Hash256& tag) const;

  std::string serialize() const;
  static MembershipRegistry parse(std::string_view text);

 private:
  std::string secret_for(std::string_view name) const;

  std::uint64_t network_seed_;
  std::vector<Identity> identities_;
  std::map<std::string, std::string, std::less<>> secrets_;
};

struct ChainCheck {
  bool ok = true;
  std::optional<std::uint64_t> first_bad_height;
  std::string detail;
};

// Recomputes digests, endorsements and linkage from genesis.
ChainCheck verify_blocks(std::span<const Block> blocks, const MembershipRegistry& members);

// Same, over a persisted ledger directory; unreadable or malformed block files
// count as bad at their height.
ChainCheck verify_chain_dir(const std::filesystem::path& ledger_dir);

struct LedgerOptions {
  std::optional<std::filesystem::path> directory;  // persistence root; in-memory when empty
  std::uint64_t network_seed = 0;
  std::size_t block_size = kDefaultBlockSize;
};

// Single-channel permissioned ledger. Submissions are totally ordered and
// validated against committed state plus earlier pending transactions;
// queries see committed blocks only.
class Ledger {
 public:
  Ledger(const Chaincode& chaincode, LedgerOptions options = {});

  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  Identity register_identity(const std::string& name, Role role);
  std::optional<Identity> find_identity(std::string_view name) const;
  MembershipRegistry membership() const;

  // Runs the chaincode and enqueues the transaction (valid or not). Throws
  // Error(kUnknownIdentity) for unregistered submitters, recording nothing.
  Hash256 submit_tx(std::string_view function, std::string payload, std::string_view identity_name);

  // Pending or committed transaction by id.
  std::optional<Transaction> lookup_tx(const Hash256& tx_id) const;

  // Moves up to block_size pending transactions into a new block.
  std::optional<Block> cut_block();
  // Cuts until the queue is empty; returns the number of blocks created.
  std::size_t flush();
  std::size_t pending_count() const;

  // Block timestamps are max(clock, previous block timestamp).
  void set_clock(Timestamp now);

  ChainCheck verify_chain() const;
  // Re-executes every transaction from genesis and compares statuses, keys and
  // write sets with what the chain recorded.
  ChainCheck replay_check() const;

  std::optional<std::string> query_state(std::string_view key) const;
  std::vector<std::pair<std::string, std::string>> scan_state(std::string_view prefix) const;
  std::vector<Transaction> get_history(std::string_view key) const;

  std::uint64_t height() const;  // number of blocks including genesis
  std::vector<Block> blocks() const;
  Hash256 tip_hash() const;
  WorldState world_state() const;
  WorldState rebuild_state() const;
  Hash256 current_state_digest() const;

 private:
  struct TxLocation {
    std::size_t block;
    std::size_t index;
  };

  void load(const std::filesystem::path& dir);
  void persist_block(const Block& block) const;
  void persist_members() const;
  void apply_block(const Block& block);
  void rebuild_overlay();

  const Chaincode& chaincode_;
  LedgerOptions options_;

  mutable std::mutex order_mu_;  // pending queue, sequence, membership, clock
  MembershipRegistry members_;
  std::vector<Transaction> pending_;
  std::map<std::string, std::string, std::less<>> overlay_;  // writes of pending valid txs
  std::uint64_t next_sequence_ = 1;
  Timestamp clock_;

  mutable std::shared_mutex commit_mu_;  // committed blocks, state, history
  std::vector<Block> blocks_;
  WorldState state_;
  std::unordered_map<std::string, std::vector<TxLocation>> history_;
};

}  // namespace carbon
