#include "carbon/ledger.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <json.hpp>

#include "carbon/errors.hpp"
#include "carbon/io.hpp"

namespace carbon {
namespace {

using nlohmann::json;

constexpr std::string_view kMembersFile = "identities.json";
constexpr std::string_view kBlocksDir = "blocks";

json tx_to_json(const Transaction& tx) {
  json writes = json::object();
  for (const auto& [k, v] : tx.writes) writes[k] = v;
  return json{{"endorsement", tx.endorsement.to_hex()},
              {"function", tx.function},
              {"keys", tx.keys},
              {"payload", tx.payload},
              {"payload_digest", tx.payload_digest.to_hex()},
              {"reason", tx.status.reason},
              {"sequence", tx.sequence},
              {"submitter", tx.submitter},
              {"tx_id", tx.tx_id.to_hex()},
              {"valid", tx.status.valid},
              {"writes", std::move(writes)}};
}

json block_body(const Block& block) {
  json txs = json::array();
  for (const auto& tx : block.transactions) txs.push_back(tx_to_json(tx));
  return json{{"height", block.height},
              {"prev_hash", block.prev_hash.to_hex()},
              {"timestamp", block.timestamp.to_string()},
              {"transactions", std::move(txs)}};
}

void expect_keys(const json& obj, std::initializer_list<const char*> names, std::string_view what) {
  if (!obj.is_object()) throw Error(Errc::kParse, std::string(what) + " must be an object");
  if (obj.size() != names.size()) throw Error(Errc::kParse, std::string(what) + " has unexpected fields");
  for (const char* n : names) {
    if (!obj.contains(n)) throw Error(Errc::kParse, std::string(what) + " lacks '" + n + "'");
  }
}

const std::string& str_field(const json& obj, const char* name) {
  const json& v = obj.at(name);
  if (!v.is_string()) throw Error(Errc::kParse, std::string("field '") + name + "' must be a string");
  return v.get_ref<const std::string&>();
}

std::uint64_t uint_field(const json& obj, const char* name) {
  const json& v = obj.at(name);
  if (!v.is_number_unsigned()) throw Error(Errc::kParse, std::string("field '") + name + "' must be unsigned");
  return v.get<std::uint64_t>();
}

Transaction tx_from_json(const json& j) {
  expect_keys(j,
              {"endorsement", "function", "keys", "payload", "payload_digest", "reason", "sequence", "submitter",
               "tx_id", "valid", "writes"},
              "transaction");
  Transaction tx;
  tx.endorsement = Hash256::from_hex(str_field(j, "endorsement"));
  tx.function = str_field(j, "function");
  const json& keys = j.at("keys");
  if (!keys.is_array()) throw Error(Errc::kParse, "field 'keys' must be an array");
  for (const json& k : keys) {
    if (!k.is_string()) throw Error(Errc::kParse, "keys must be strings");
    tx.keys.push_back(k.get<std::string>());
  }
  tx.payload = str_field(j, "payload");
  tx.payload_digest = Hash256::from_hex(str_field(j, "payload_digest"));
  tx.status.reason = str_field(j, "reason");
  tx.sequence = uint_field(j, "sequence");
  tx.submitter = str_field(j, "submitter");
  tx.tx_id = Hash256::from_hex(str_field(j, "tx_id"));
  const json& valid = j.at("valid");
  if (!valid.is_boolean()) throw Error(Errc::kParse, "field 'valid' must be boolean");
  tx.status.valid = valid.get<bool>();
  const json& writes = j.at("writes");
  if (!writes.is_object()) throw Error(Errc::kParse, "field 'writes' must be an object");
  for (auto it = writes.begin(); it != writes.end(); ++it) {
    if (!it.value().is_string()) throw Error(Errc::kParse, "write values must be strings");
    tx.writes[it.key()] = it.value().get<std::string>();
  }
  return tx;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// Reads committed state with pending writes layered on top.
class OverlayView final : public StateView {
 public:
  OverlayView(const WorldState& base, const std::map<std::string, std::string, std::less<>>& overlay)
      : base_(base), overlay_(overlay) {}

  std::optional<std::string> get(std::string_view key) const override {
    if (auto it = overlay_.find(key); it != overlay_.end()) return it->second;
    if (auto it = base_.find(key); it != base_.end()) return it->second.value;
    return std::nullopt;
  }

  std::vector<std::pair<std::string, std::string>> scan_prefix(std::string_view prefix) const override {
    std::map<std::string, std::string, std::less<>> merged;
    for (auto it = base_.lower_bound(prefix); it != base_.end() && starts_with(it->first, prefix); ++it) {
      merged[it->first] = it->second.value;
    }
    for (auto it = overlay_.lower_bound(prefix); it != overlay_.end() && starts_with(it->first, prefix); ++it) {
      merged[it->first] = it->second;
    }
    return {merged.begin(), merged.end()};
  }

  std::optional<std::pair<std::string, std::string>> last_with_prefix(std::string_view prefix) const override {
    const std::string upper = std::string(prefix) + '\xff';
    std::optional<std::pair<std::string, std::string>> best;
    if (auto it = base_.lower_bound(upper); it != base_.begin()) {
      --it;
      if (starts_with(it->first, prefix)) best.emplace(it->first, it->second.value);
    }
    if (auto it = overlay_.lower_bound(upper); it != overlay_.begin()) {
      --it;
      if (starts_with(it->first, prefix) && (!best || it->first >= best->first)) best.emplace(it->first, it->second);
    }
    return best;
  }

 private:
  const WorldState& base_;
  const std::map<std::string, std::string, std::less<>>& overlay_;
};

std::vector<std::string> normalized_keys(std::vector<std::string> keys, const std::map<std::string, std::string>& writes) {
  for (const auto& [k, v] : writes) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

Execution run_chaincode(const Chaincode& cc, const Invocation& call, const StateView& view) {
  Execution ex;
  try {
    ex = cc.execute(call, view);
  } catch (const std::exception& e) {
    ex = Execution{TxStatus::invalid(std::string("chaincode: ") + e.what()), {}, {}};
  }
  if (!ex.status.valid) ex.writes.clear();
  ex.keys = normalized_keys(std::move(ex.keys), ex.writes);
  return ex;
}

Block make_genesis() {
  Block g;
  g.height = 0;
  g.prev_hash = Hash256::zero();
  g.timestamp = Timestamp{0};
  g.block_hash = compute_block_hash(g);
  return g;
}

std::optional<std::uint64_t> block_file_height(const std::filesystem::path& p) {
  if (p.extension() != ".json") return std::nullopt;
  const std::string stem = p.stem().string();
  if (stem.empty() || (stem.size() > 1 && stem[0] == '0')) return std::nullopt;
  std::uint64_t h = 0;
  const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), h);
  if (ec != std::errc() || ptr != stem.data() + stem.size()) return std::nullopt;
  return h;
}

std::map<std::uint64_t, std::filesystem::path> list_block_files(const std::filesystem::path& dir) {
  std::map<std::uint64_t, std::filesystem::path> out;
  std::error_code ec;
  if (!std::filesystem::exists(dir, ec)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    if (auto h = block_file_height(entry.path())) out[*h] = entry.path();
  }
  return out;
}

}  // namespace

std::string_view TxStatus::check() const {
  if (valid) return "";
  const std::string_view r = reason;
  return r.substr(0, r.find(':'));
}

Hash256 compute_tx_id(std::string_view function, const Hash256& payload_digest, std::string_view submitter,
                      std::uint64_t sequence) {
  const json header{{"function", function},
                    {"payload_digest", payload_digest.to_hex()},
                    {"sequence", sequence},
                    {"submitter", submitter}};
  return digest(header.dump());
}

Hash256 compute_block_hash(const Block& block) { return digest(block_body(block).dump()); }

std::string serialize_block(const Block& block) {
  json j = block_body(block);
  j["block_hash"] = block.block_hash.to_hex();
  return j.dump() + "\n";
}

Block parse_block(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string("block is not JSON: ") + e.what());
  }
  Block b;
  try {
    expect_keys(j, {"block_hash", "height", "prev_hash", "timestamp", "transactions"}, "block");
    b.block_hash = Hash256::from_hex(str_field(j, "block_hash"));
    b.height = uint_field(j, "height");
    b.prev_hash = Hash256::from_hex(str_field(j, "prev_hash"));
    b.timestamp = Timestamp::parse(str_field(j, "timestamp"));
    const json& txs = j.at("transactions");
    if (!txs.is_array()) throw Error(Errc::kParse, "field 'transactions' must be an array");
    for (const json& t : txs) b.transactions.push_back(tx_from_json(t));
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string("malformed block: ") + e.what());
  }
  if (serialize_block(b) != text) throw Error(Errc::kParse, "block file is not in canonical form");
  return b;
}

Hash256 state_digest(const WorldState& state) {
  std::string buf;
  for (const auto& [key, entry] : state) {
    buf += std::to_string(key.size());
    buf += ':';
    buf += key;
    buf += std::to_string(entry.value.size());
    buf += ':';
    buf += entry.value;
    buf += entry.last_tx.to_hex();
  }
  return digest(buf);
}

WorldState fold_state(std::span<const Block> blocks) {
  WorldState state;
  for (const auto& block : blocks) {
    for (const auto& tx : block.transactions) {
      if (!tx.status.valid) continue;
      for (const auto& [k, v] : tx.writes) state[k] = StateEntry{v, tx.tx_id};
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// MembershipRegistry

std::string MembershipRegistry::secret_for(std::string_view name) const {
  return hmac("carbon-ledger-membership:" + std::to_string(network_seed_), name).to_hex();
}

Identity MembershipRegistry::register_identity(const std::string& name, Role role) {
  if (name.empty()) throw Error(Errc::kInvalidArgument, "identity name must not be empty");
  if (secrets_.count(name)) throw Error(Errc::kDuplicateName, "identity '" + name + "' already registered");
  const std::string secret = secret_for(name);
  Identity id{name, role, digest(secret).to_hex()};
  identities_.push_back(id);
  secrets_.emplace(name, secret);
  return id;
}

std::optional<Identity> MembershipRegistry::find(std::string_view name) const {
  for (const auto& id : identities_) {
    if (id.name == name) return id;
  }
  return std::nullopt;
}

Hash256 MembershipRegistry::endorse(std::string_view name, const Hash256& payload_digest) const {
  auto it = secrets_.find(name);
  if (it == secrets_.end()) throw Error(Errc::kUnknownIdentity, "identity '" + std::string(name) + "' is not registered");
  return hmac(it->second, payload_digest.to_hex());
}

bool MembershipRegistry::check_endorsement(std::string_view name, const Hash256& payload_digest,
                                           const Hash256& tag) const {
  auto it = secrets_.find(name);
  return it != secrets_.end() && hmac(it->second, payload_digest.to_hex()) == tag;
}

std::string MembershipRegistry::serialize() const {
  json ids = json::array();
  for (const auto& id : identities_) {
    ids.push_back(json{{"key_id", id.key_id},
                       {"name", id.name},
                       {"role", role_name(id.role)},
                       {"secret", secrets_.find(id.name)->second}});
  }
  return json{{"identities", std::move(ids)}, {"network_seed", network_seed_}}.dump(2) + "\n";
}

MembershipRegistry MembershipRegistry::parse(std::string_view text) {
  try {
    const json j = json::parse(text.begin(), text.end());
    MembershipRegistry reg(j.at("network_seed").get<std::uint64_t>());
    for (const json& e : j.at("identities")) {
      Identity id{e.at("name").get<std::string>(), parse_role(e.at("role").get<std::string>()),
                  e.at("key_id").get<std::string>()};
      const std::string secret = e.at("secret").get<std::string>();
      if (reg.secrets_.count(id.name)) throw Error(Errc::kParse, "duplicate identity '" + id.name + "'");
      if (digest(secret).to_hex() != id.key_id) throw Error(Errc::kParse, "key_id does not match credential for '" + id.name + "'");
      reg.secrets_.emplace(id.name, secret);
      reg.identities_.push_back(std::move(id));
    }
    return reg;
  } catch (const json::exception& e) {
    throw Error(Errc::kParse, std::string("malformed membership registry: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Verification

ChainCheck verify_blocks(std::span<const Block> blocks, const MembershipRegistry& members) {
  auto bad = [](std::uint64_t h, std::string detail) { return ChainCheck{false, h, std::move(detail)}; };
  if (blocks.empty()) return bad(0, "missing genesis block");

  std::uint64_t last_sequence = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    const auto h = static_cast<std::uint64_t>(i);
    if (b.height != h) return bad(h, "height field is " + std::to_string(b.height));
    if (i == 0) {
      if (!b.prev_hash.is_zero()) return bad(0, "genesis prev_hash is not zero");
      if (!b.transactions.empty()) return bad(0, "genesis block carries transactions");
    } else {
      if (b.prev_hash != blocks[i - 1].block_hash) return bad(h, "prev_hash does not match block " + std::to_string(i - 1));
      if (b.timestamp < blocks[i - 1].timestamp) return bad(h, "timestamp goes backwards");
      if (b.transactions.empty()) return bad(h, "empty non-genesis block");
    }
    for (const Transaction& tx : b.transactions) {
      if (tx.sequence <= last_sequence) return bad(h, "transaction sequence not increasing");
      last_sequence = tx.sequence;
      if (digest(tx.payload) != tx.payload_digest) return bad(h, "payload digest mismatch in tx " + std::to_string(tx.sequence));
      if (compute_tx_id(tx.function, tx.payload_digest, tx.submitter, tx.sequence) != tx.tx_id) {
        return bad(h, "tx_id mismatch in tx " + std::to_string(tx.sequence));
      }
      if (!members.check_endorsement(tx.submitter, tx.payload_digest, tx.endorsement)) {
        return bad(h, "endorsement check failed in tx " + std::to_string(tx.sequence));
      }
      if (!tx.status.valid && !tx.writes.empty()) return bad(h, "invalid transaction carries writes");
      if (tx.status.valid != tx.status.reason.empty()) return bad(h, "status and reason disagree");
      for (const auto& [k, v] : tx.writes) {
        if (!std::binary_search(tx.keys.begin(), tx.keys.end(), k)) return bad(h, "write key not listed in keys");
      }
    }
    if (compute_block_hash(b) != b.block_hash) return bad(h, "block_hash mismatch");
  }
  return {};
}

ChainCheck verify_chain_dir(const std::filesystem::path& ledger_dir) {
  MembershipRegistry members;
  try {
    members = MembershipRegistry::parse(read_file(ledger_dir / kMembersFile));
  } catch (const Error& e) {
    return ChainCheck{false, std::nullopt, std::string("membership registry: ") + e.what()};
  }
  const auto files = list_block_files(ledger_dir / kBlocksDir);
  std::vector<Block> blocks;
  std::uint64_t expected = 0;
  for (const auto& [height, path] : files) {
    if (height != expected) return ChainCheck{false, expected, "block file missing"};
    try {
      blocks.push_back(parse_block(read_file(path)));
    } catch (const Error& e) {
      return ChainCheck{false, height, e.what()};
    }
    ++expected;
  }
  return verify_blocks(blocks, members);
}

// ---------------------------------------------------------------------------
// Ledger

Ledger::Ledger(const Chaincode& chaincode, LedgerOptions options)
    : chaincode_(chaincode), options_(std::move(options)), members_(options_.network_seed) {
  if (options_.block_size == 0) throw Error(Errc::kInvalidArgument, "block size must be positive");
  if (options_.directory) {
    load(*options_.directory);
  } else {
    apply_block(make_genesis());
  }
}

void Ledger::load(const std::filesystem::path& dir) {
  const auto members_path = dir / kMembersFile;
  std::error_code ec;
  if (std::filesystem::exists(members_path, ec)) {
    members_ = MembershipRegistry::parse(read_file(members_path));
  } else {
    persist_members();
  }
  const auto files = list_block_files(dir / kBlocksDir);
  if (files.empty()) {
    const Block genesis = make_genesis();
    persist_block(genesis);
    apply_block(genesis);
    return;
  }
  std::uint64_t expected = 0;
  for (const auto& [height, path] : files) {
    if (height != expected) throw Error(Errc::kParse, "ledger block " + std::to_string(expected) + " is missing");
    Block b;
    try {
      b = parse_block(read_file(path));
    } catch (const Error& e) {
      throw Error(Errc::kParse, "ledger block " + std::to_string(height) + ": " + e.what());
    }
    for (const auto& tx : b.transactions) next_sequence_ = std::max(next_sequence_, tx.sequence + 1);
    clock_ = std::max(clock_, b.timestamp);
    apply_block(b);
    ++expected;
  }
}

void Ledger::persist_block(const Block& block) const {
  if (!options_.directory) return;
  write_file_atomic(*options_.directory / kBlocksDir / (std::to_string(block.height) + ".json"),
                    serialize_block(block));
}

void Ledger::persist_members() const {
  if (!options_.directory) return;
  write_file_atomic(*options_.directory / kMembersFile, members_.serialize());
}

void Ledger::apply_block(const Block& block) {
  const std::size_t bi = blocks_.size();
  for (std::size_t ti = 0; ti < block.transactions.size(); ++ti) {
    const Transaction& tx = block.transactions[ti];
    for (const auto& key : tx.keys) history_[key].push_back({bi, ti});
    if (!tx.status.valid) continue;
    for (const auto& [k, v] : tx.writes) state_[k] = StateEntry{v, tx.tx_id};
  }
  blocks_.push_back(block);
}

void Ledger::rebuild_overlay() {
  overlay_.clear();
  for (const auto& tx : pending_) {
    if (!tx.status.valid) continue;
    for (const auto& [k, v] : tx.writes) overlay_[k] = v;
  }
}

Identity Ledger::register_identity(const std::string& name, Role role) {
  std::lock_guard lock(order_mu_);
  Identity id = members_.register_identity(name, role);
  persist_members();
  return id;
}

std::optional<Identity> Ledger::find_identity(std::string_view name) const {
  std::lock_guard lock(order_mu_);
  return members_.find(name);
}

MembershipRegistry Ledger::membership() const {
  std::lock_guard lock(order_mu_);
  return members_;
}

Hash256 Ledger::submit_tx(std::string_view function, std::string payload, std::string_view identity_name) {
  std::lock_guard lock(order_mu_);
  const auto identity = members_.find(identity_name);
  if (!identity) {
    throw Error(Errc::kUnknownIdentity, "identity '" + std::string(identity_name) + "' is not registered");
  }
  try {
    (void)json(payload).dump();
  } catch (const json::exception&) {
    throw Error(Errc::kInvalidArgument, "transaction payload must be valid UTF-8 text");
  }

  Transaction tx;
  tx.sequence = next_sequence_++;
  tx.function = std::string(function);
  tx.payload = std::move(payload);
  tx.payload_digest = digest(tx.payload);
  tx.submitter = identity->name;
  tx.endorsement = members_.endorse(identity->name, tx.payload_digest);
  tx.tx_id = compute_tx_id(tx.function, tx.payload_digest, tx.submitter, tx.sequence);

  Execution ex;
  {
    std::shared_lock read(commit_mu_);
    OverlayView view(state_, overlay_);
    ex = run_chaincode(chaincode_, Invocation{tx.function, tx.payload, *identity, tx.sequence}, view);
  }
  tx.status = std::move(ex.status);
  tx.keys = std::move(ex.keys);
  tx.writes = std::move(ex.writes);
  for (const auto& [k, v] : tx.writes) overlay_[k] = v;

  const Hash256 id = tx.tx_id;
  pending_.push_back(std::move(tx));
  return id;
}

std::optional<Transaction> Ledger::lookup_tx(const Hash256& tx_id) const {
  {
    std::lock_guard lock(order_mu_);
    for (const auto& tx : pending_) {
      if (tx.tx_id == tx_id) return tx;
    }
  }
  std::shared_lock read(commit_mu_);
  for (auto b = blocks_.rbegin(); b != blocks_.rend(); ++b) {
    for (const auto& tx : b->transactions) {
      if (tx.tx_id == tx_id) return tx;
    }
  }
  return std::nullopt;
}

std::optional<Block> Ledger::cut_block() {
  std::lock_guard lock(order_mu_);
  if (pending_.empty()) return std::nullopt;

  const std::size_t n = std::min(options_.block_size, pending_.size());
  Block block;
  {
    std::shared_lock read(commit_mu_);
    const Block& tip = blocks_.back();
    block.height = tip.height + 1;
    block.prev_hash = tip.block_hash;
    block.timestamp = std::max(clock_, tip.timestamp);
  }
  block.transactions.assign(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(n));
  block.block_hash = compute_block_hash(block);

  persist_block(block);
  {
    std::unique_lock write(commit_mu_);
    apply_block(block);
  }
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(n));
  rebuild_overlay();
  return block;
}

std::size_t Ledger::flush() {
  std::size_t cut = 0;
  while (cut_block()) ++cut;
  return cut;
}

std::size_t Ledger::pending_count() const {
  std::lock_guard lock(order_mu_);
  return pending_.size();
}

void Ledger::set_clock(Timestamp now) {
  std::lock_guard lock(order_mu_);
  clock_ = now;
}

ChainCheck Ledger::verify_chain() const {
  const MembershipRegistry members = membership();
  std::shared_lock read(commit_mu_);
  return verify_blocks(blocks_, members);
}

ChainCheck Ledger::replay_check() const {
  const MembershipRegistry members = membership();
  std::shared_lock read(commit_mu_);
  WorldState replayed;
  const std::map<std::string, std::string, std::less<>> no_overlay;
  for (const Block& b : blocks_) {
    for (const Transaction& tx : b.transactions) {
      const auto identity = members.find(tx.submitter);
      if (!identity) return ChainCheck{false, b.height, "unknown submitter " + tx.submitter};
      OverlayView view(replayed, no_overlay);
      const Execution ex =
          run_chaincode(chaincode_, Invocation{tx.function, tx.payload, *identity, tx.sequence}, view);
      if (ex.status != tx.status || ex.keys != tx.keys || ex.writes != tx.writes) {
        return ChainCheck{false, b.height, "re-execution diverges at tx " + std::to_string(tx.sequence)};
      }
      for (const auto& [k, v] : ex.writes) replayed[k] = StateEntry{v, tx.tx_id};
    }
  }
  return {};
}

std::optional<std::string> Ledger::query_state(std::string_view key) const {
  std::shared_lock read(commit_mu_);
  if (auto it = state_.find(key); it != state_.end()) return it->second.value;
  return std::nullopt;
}

std::vector<std::pair<std::string, std::string>> Ledger::scan_state(std::string_view prefix) const {
  std::shared_lock read(commit_mu_);
  std::vector<std::pair<std::string, std::string>> out;
  for (auto it = state_.lower_bound(prefix); it != state_.end() && starts_with(it->first, prefix); ++it) {
    out.emplace_back(it->first, it->second.value);
  }
  return out;
}

std::vector<Transaction> Ledger::get_history(std::string_view key) const {
  std::shared_lock read(commit_mu_);
  std::vector<Transaction> out;
  auto it = history_.find(std::string(key));
  if (it == history_.end()) return out;
  for (const auto& loc : it->second) out.push_back(blocks_[loc.block].transactions[loc.index]);
  return out;
}

std::uint64_t Ledger::height() const {
  std::shared_lock read(commit_mu_);
  return blocks_.size();
}

std::vector<Block> Ledger::blocks() const {
  std::shared_lock read(commit_mu_);
  return blocks_;
}

Hash256 Ledger::tip_hash() const {
  std::shared_lock read(commit_mu_);
  return blocks_.back().block_hash;
}

WorldState Ledger::world_state() const {
  std::shared_lock read(commit_mu_);
  return state_;
}

WorldState Ledger::rebuild_state() const {
  std::shared_lock read(commit_mu_);
  return fold_state(blocks_);
}

Hash256 Ledger::current_state_digest() const {
  std::shared_lock read(commit_mu_);
  return state_digest(state_);
}

}  // namespace carbon
