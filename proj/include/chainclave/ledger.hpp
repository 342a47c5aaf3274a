/* Copyright 2026 The Chainclave Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * Execute-order-validate ledger core: versioned key-value store, blocks,
 * transactions with endorsements and read/write sets, a solo orderer, and
 * the validation/commit rules every peer applies deterministically.
 *
 * A transaction is endorsed against some committed state, ordered into a
 * block, then validated at commit time: the endorsement policy of its
 * chaincode must hold and every key it read must still carry the version it
 * saw. Invalid transactions are flagged and have no effect on state. Within
 * a block, earlier valid transactions invalidate later conflicting ones.
 */

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>

#include "chainclave/crypto.hpp"

namespace chainclave::ledger {

struct Version {
    uint64_t block_seq = 0;
    uint32_t tx_index = 0;
    auto operator<=>(const Version&) const = default;
};

struct ValueEntry {
    Bytes value;
    Version version;
};

struct ReadEntry {
    std::string key;
    std::optional<Version> version;  // nullopt: key was absent when read
    bool operator==(const ReadEntry&) const = default;
};

struct WriteEntry {
    std::string key;
    Bytes value;
    bool operator==(const WriteEntry&) const = default;
};

using ReadSet = std::vector<ReadEntry>;
using WriteSet = std::vector<WriteEntry>;

struct TransactionProposal {
    std::string client_id;
    std::string chaincode_id;
    Bytes operation;         // opaque to the ledger; ciphertext for enclave
                             // chaincodes, plain encoding otherwise
    Bytes proposal_nonce;    // replay-detection input, part of the digest
    Bytes result_key;        // optional client X25519 key for result
                             // encryption; empty means plaintext results
};

struct Endorsement {
    crypto::Digest proposal_digest{};
    ReadSet read_set;
    WriteSet write_set;
    Bytes result;
    Bytes endorser_public_key;  // peer key or chaincode-enclave key
    Bytes signature;            // over everything above
};

struct Transaction {
    TransactionProposal proposal;
    std::vector<Endorsement> endorsements;
};

struct Block {
    uint64_t seq = 0;
    crypto::Digest prev_hash{};
    std::vector<Transaction> transactions;
    Bytes config;             // canonical GenesisConfig; only in block 0
    Bytes orderer_signature;  // absent on the genesis block
};

enum class ChaincodeKind : uint8_t { plain = 0, enclave = 1 };

enum class StateEncryption : uint8_t {
    none = 0,
    per_chaincode = 1,
    client_based = 2,
};

struct ChaincodePolicy {
    std::string name;
    ChaincodeKind kind = ChaincodeKind::plain;
    uint32_t required_endorsements = 1;
    std::optional<crypto::Digest> expected_measurement;  // enclave kind only
    StateEncryption encryption = StateEncryption::none;
};

struct Identity {
    std::string id;
    Bytes public_key;
};

struct GenesisConfig {
    Bytes orderer_public_key;
    std::vector<Identity> peers;
    std::vector<Identity> clients;
    crypto::Digest ledger_enclave_measurement{};
    Bytes attestation_service_public_key;
    std::vector<ChaincodePolicy> chaincodes;

    const Identity* find_peer(const Bytes& public_key) const;
    const Identity* find_client(const std::string& id) const;
    const ChaincodePolicy* find_chaincode(const std::string& name) const;
};

class VersionedStore;
struct CommitRecord;
CommitRecord commit_block(VersionedStore& store, const Block& b,
                          const std::vector<bool>& flags);

/*
 * Committed state of one peer: the key-value map with per-key versions, plus
 * the chain position (height and last block hash) and the set of committed
 * proposal digests used for duplicate detection.
 */
class VersionedStore {
  public:
    std::optional<ValueEntry> get(const std::string& key) const;
    std::vector<std::pair<std::string, ValueEntry>> range(
        const std::string& prefix) const;

    uint64_t height() const { return height_; }
    const crypto::Digest& last_block_hash() const { return last_hash_; }
    bool seen_proposal(const crypto::Digest& d) const {
        return committed_proposals_.count(d) > 0;
    }

    const std::map<std::string, ValueEntry>& entries() const {
        return entries_;
    }
    crypto::Digest state_hash() const;

  private:
    friend CommitRecord commit_block(VersionedStore& store, const Block& b,
                                     const std::vector<bool>& flags);

    std::map<std::string, ValueEntry> entries_;
    std::set<crypto::Digest> committed_proposals_;
    uint64_t height_ = 0;
    crypto::Digest last_hash_{};
    bool has_genesis_ = false;
};

// codec
void write_version(codec::ByteWriter& w, const Version& v);
Version read_version(codec::ByteReader& r);
void write_proposal(codec::ByteWriter& w, const TransactionProposal& p);
TransactionProposal read_proposal(codec::ByteReader& r);
void write_endorsement(codec::ByteWriter& w, const Endorsement& e);
Endorsement read_endorsement(codec::ByteReader& r);
void write_transaction(codec::ByteWriter& w, const Transaction& t);
Transaction read_transaction(codec::ByteReader& r);
void write_block(codec::ByteWriter& w, const Block& b);
Block read_block(codec::ByteReader& r);
void write_read_set(codec::ByteWriter& w, const ReadSet& rs);
ReadSet read_read_set(codec::ByteReader& r);
void write_write_set(codec::ByteWriter& w, const WriteSet& ws);
WriteSet read_write_set(codec::ByteReader& r);
void write_genesis_config(codec::ByteWriter& w, const GenesisConfig& c);
GenesisConfig read_genesis_config(codec::ByteReader& r);

Bytes encode_block(const Block& b);
Block decode_block(ByteView b);
Bytes encode_transaction(const Transaction& t);
Transaction decode_transaction(ByteView b);
Bytes encode_genesis_config(const GenesisConfig& c);
GenesisConfig decode_genesis_config(ByteView b);

crypto::Digest proposal_digest(const TransactionProposal& p);
crypto::Digest block_hash(const Block& b);
// Canonical bytes the orderer signs and the endorser signs: the structure
// minus its own signature field.
Bytes block_signing_payload(const Block& b);
Bytes endorsement_signing_payload(const Endorsement& e);

// Throws Error{missing_field} when a required config element is absent.
Block make_genesis(const GenesisConfig& config);

/*
 * Solo ordering service: globally sequences submitted transactions into
 * signed, hash-chained blocks of at most block_size transactions. It never
 * inspects transaction contents. Emitted blocks are retained so tests and
 * the adversary can replay history.
 */
class Orderer {
  public:
    Orderer(crypto::SigningKeyPair key, const Block& genesis,
            size_t block_size);

    void submit(Transaction tx);
    // Cuts one block of pending transactions; nullopt when none are pending.
    std::optional<Block> cut_block();
    std::vector<Block> cut_all();

    size_t pending() const { return pending_.size(); }
    uint64_t next_seq() const { return next_seq_; }
    const std::vector<Block>& emitted() const { return emitted_; }
    const Bytes& public_key() const { return key_.public_key; }

  private:
    crypto::SigningKeyPair key_;
    size_t block_size_;
    uint64_t next_seq_;
    crypto::Digest prev_hash_{};
    std::vector<Transaction> pending_;
    std::vector<Block> emitted_;
};

/*
 * Endorsement-policy evaluation for enclave-backed chaincodes is supplied by
 * the registry module; the hook keeps this module free of attestation
 * concerns. Returning false marks the transaction invalid.
 */
using EnclavePolicyCheck =
    std::function<bool(const Transaction&, const ChaincodePolicy&)>;

/*
 * State access needed by per-transaction validation, abstracted so the same
 * loop runs both on a peer (backed by its VersionedStore) and inside the
 * ledger enclave (backed by integrity metadata). Any divergence between the
 * two would surface as a commit crosscheck mismatch, so there is exactly
 * one implementation.
 */
struct ValidationHooks {
    std::function<std::optional<Version>(const std::string&)> version_of;
    std::function<bool(const crypto::Digest&)> seen_proposal;
    EnclavePolicyCheck enclave_policy;  // required for enclave chaincodes
};

// Per-transaction decisions for one ordered block: endorsement consistency,
// endorsement policy, duplicate detection, read-version currency, and
// intra-block conflicts (an earlier valid transaction invalidates later ones
// touching the same keys). Returns one flag per transaction.
std::vector<bool> validate_transactions(const Block& b,
                                        const GenesisConfig& config,
                                        const ValidationHooks& hooks);

struct ValidationContext {
    const GenesisConfig* config = nullptr;
    EnclavePolicyCheck enclave_policy;  // required for enclave chaincodes
};

// Validates a whole ordered block against committed state. Returns one flag
// per transaction. Throws Error{bad_orderer_signature} for a bad or missing
// orderer signature, Error{sequence_gap} when block.seq is not height()+1,
// and Error{hash_chain_break} when prev_hash does not match.
std::vector<bool> validate_block(const VersionedStore& store, const Block& b,
                                 const ValidationContext& ctx);

// Applies the writes of valid transactions and advances the chain position.
// The flags must come from validate_block on the same store.
struct CommitRecord {
    uint64_t seq = 0;
    std::vector<bool> flags;
    crypto::Digest block_hash{};
    crypto::Digest state_hash{};
};

}  // namespace chainclave::ledger
