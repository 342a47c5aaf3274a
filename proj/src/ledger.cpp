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

#include "chainclave/ledger.hpp"

#include <algorithm>

namespace chainclave::ledger {

const Identity* GenesisConfig::find_peer(const Bytes& public_key) const {
    for (const auto& p : peers)
        if (p.public_key == public_key) return &p;
    return nullptr;
}

const Identity* GenesisConfig::find_client(const std::string& id) const {
    for (const auto& c : clients)
        if (c.id == id) return &c;
    return nullptr;
}

const ChaincodePolicy* GenesisConfig::find_chaincode(
    const std::string& name) const {
    for (const auto& cc : chaincodes)
        if (cc.name == name) return &cc;
    return nullptr;
}

std::optional<ValueEntry> VersionedStore::get(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::pair<std::string, ValueEntry>> VersionedStore::range(
    const std::string& prefix) const {
    std::vector<std::pair<std::string, ValueEntry>> out;
    for (auto it = entries_.lower_bound(prefix); it != entries_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        out.emplace_back(it->first, it->second);
    }
    return out;
}

crypto::Digest VersionedStore::state_hash() const {
    codec::ByteWriter w;
    w.u64(height_);
    crypto::write_digest(w, last_hash_);
    w.u32(static_cast<uint32_t>(entries_.size()));
    for (const auto& [key, entry] : entries_) {
        w.str(key);
        w.bytes(entry.value);
        write_version(w, entry.version);
    }
    return crypto::sha256(w.view());
}

void write_version(codec::ByteWriter& w, const Version& v) {
    w.u64(v.block_seq);
    w.u32(v.tx_index);
}

Version read_version(codec::ByteReader& r) {
    Version v;
    v.block_seq = r.u64();
    v.tx_index = r.u32();
    return v;
}

void write_proposal(codec::ByteWriter& w, const TransactionProposal& p) {
    w.str(p.client_id);
    w.str(p.chaincode_id);
    w.bytes(p.operation);
    w.bytes(p.proposal_nonce);
    w.bytes(p.result_key);
}

TransactionProposal read_proposal(codec::ByteReader& r) {
    TransactionProposal p;
    p.client_id = r.str();
    p.chaincode_id = r.str();
    p.operation = r.bytes();
    p.proposal_nonce = r.bytes();
    p.result_key = r.bytes();
    return p;
}

void write_read_set(codec::ByteWriter& w, const ReadSet& rs) {
    w.list(rs, [](codec::ByteWriter& w2, const ReadEntry& e) {
        w2.str(e.key);
        w2.opt(e.version, [](codec::ByteWriter& w3, const Version& v) {
            write_version(w3, v);
        });
    });
}

ReadSet read_read_set(codec::ByteReader& r) {
    return r.list<ReadEntry>([](codec::ByteReader& r2) {
        ReadEntry e;
        e.key = r2.str();
        e.version = r2.opt<Version>(
            [](codec::ByteReader& r3) { return read_version(r3); });
        return e;
    });
}

void write_write_set(codec::ByteWriter& w, const WriteSet& ws) {
    w.list(ws, [](codec::ByteWriter& w2, const WriteEntry& e) {
        w2.str(e.key);
        w2.bytes(e.value);
    });
}

WriteSet read_write_set(codec::ByteReader& r) {
    return r.list<WriteEntry>([](codec::ByteReader& r2) {
        WriteEntry e;
        e.key = r2.str();
        e.value = r2.bytes();
        return e;
    });
}

void write_endorsement(codec::ByteWriter& w, const Endorsement& e) {
    crypto::write_digest(w, e.proposal_digest);
    write_read_set(w, e.read_set);
    write_write_set(w, e.write_set);
    w.bytes(e.result);
    w.bytes(e.endorser_public_key);
    w.bytes(e.signature);
}

Endorsement read_endorsement(codec::ByteReader& r) {
    Endorsement e;
    e.proposal_digest = crypto::read_digest(r);
    e.read_set = read_read_set(r);
    e.write_set = read_write_set(r);
    e.result = r.bytes();
    e.endorser_public_key = r.bytes();
    e.signature = r.bytes();
    return e;
}

void write_transaction(codec::ByteWriter& w, const Transaction& t) {
    write_proposal(w, t.proposal);
    w.list(t.endorsements, [](codec::ByteWriter& w2, const Endorsement& e) {
        write_endorsement(w2, e);
    });
}

Transaction read_transaction(codec::ByteReader& r) {
    Transaction t;
    t.proposal = read_proposal(r);
    t.endorsements = r.list<Endorsement>(
        [](codec::ByteReader& r2) { return read_endorsement(r2); });
    return t;
}

void write_block(codec::ByteWriter& w, const Block& b) {
    w.u64(b.seq);
    crypto::write_digest(w, b.prev_hash);
    w.list(b.transactions, [](codec::ByteWriter& w2, const Transaction& t) {
        write_transaction(w2, t);
    });
    w.bytes(b.config);
    w.bytes(b.orderer_signature);
}

Block read_block(codec::ByteReader& r) {
    Block b;
    b.seq = r.u64();
    b.prev_hash = crypto::read_digest(r);
    b.transactions = r.list<Transaction>(
        [](codec::ByteReader& r2) { return read_transaction(r2); });
    b.config = r.bytes();
    b.orderer_signature = r.bytes();
    return b;
}

void write_genesis_config(codec::ByteWriter& w, const GenesisConfig& c) {
    w.bytes(c.orderer_public_key);
    auto write_identity = [](codec::ByteWriter& w2, const Identity& id) {
        w2.str(id.id);
        w2.bytes(id.public_key);
    };
    w.list(c.peers, write_identity);
    w.list(c.clients, write_identity);
    crypto::write_digest(w, c.ledger_enclave_measurement);
    w.bytes(c.attestation_service_public_key);
    w.list(c.chaincodes, [](codec::ByteWriter& w2, const ChaincodePolicy& p) {
        w2.str(p.name);
        w2.u8(static_cast<uint8_t>(p.kind));
        w2.u32(p.required_endorsements);
        w2.opt(p.expected_measurement,
               [](codec::ByteWriter& w3, const crypto::Digest& d) {
                   crypto::write_digest(w3, d);
               });
        w2.u8(static_cast<uint8_t>(p.encryption));
    });
}

GenesisConfig read_genesis_config(codec::ByteReader& r) {
    GenesisConfig c;
    c.orderer_public_key = r.bytes();
    auto read_identity = [](codec::ByteReader& r2) {
        Identity id;
        id.id = r2.str();
        id.public_key = r2.bytes();
        return id;
    };
    c.peers = r.list<Identity>(read_identity);
    c.clients = r.list<Identity>(read_identity);
    c.ledger_enclave_measurement = crypto::read_digest(r);
    c.attestation_service_public_key = r.bytes();
    c.chaincodes = r.list<ChaincodePolicy>([](codec::ByteReader& r2) {
        ChaincodePolicy p;
        p.name = r2.str();
        uint8_t kind = r2.u8();
        require(kind <= 1, Status::codec_error, "bad chaincode kind");
        p.kind = static_cast<ChaincodeKind>(kind);
        p.required_endorsements = r2.u32();
        p.expected_measurement = r2.opt<crypto::Digest>(
            [](codec::ByteReader& r3) { return crypto::read_digest(r3); });
        uint8_t enc = r2.u8();
        require(enc <= 2, Status::codec_error, "bad encryption mode");
        p.encryption = static_cast<StateEncryption>(enc);
        return p;
    });
    return c;
}

Bytes encode_block(const Block& b) {
    codec::ByteWriter w;
    write_block(w, b);
    return w.take();
}

Block decode_block(ByteView b) {
    return codec::decode_all(
        b, [](codec::ByteReader& r) { return read_block(r); });
}

Bytes encode_transaction(const Transaction& t) {
    codec::ByteWriter w;
    write_transaction(w, t);
    return w.take();
}

Transaction decode_transaction(ByteView b) {
    return codec::decode_all(
        b, [](codec::ByteReader& r) { return read_transaction(r); });
}

Bytes encode_genesis_config(const GenesisConfig& c) {
    codec::ByteWriter w;
    write_genesis_config(w, c);
    return w.take();
}

GenesisConfig decode_genesis_config(ByteView b) {
    return codec::decode_all(
        b, [](codec::ByteReader& r) { return read_genesis_config(r); });
}

crypto::Digest proposal_digest(const TransactionProposal& p) {
    codec::ByteWriter w;
    write_proposal(w, p);
    return crypto::sha256(w.view());
}

Bytes block_signing_payload(const Block& b) {
    Block unsigned_block = b;
    unsigned_block.orderer_signature.clear();
    return encode_block(unsigned_block);
}

crypto::Digest block_hash(const Block& b) {
    return crypto::sha256(encode_block(b));
}

Bytes endorsement_signing_payload(const Endorsement& e) {
    Endorsement unsigned_endorsement = e;
    unsigned_endorsement.signature.clear();
    codec::ByteWriter w;
    write_endorsement(w, unsigned_endorsement);
    return w.take();
}

Block make_genesis(const GenesisConfig& config) {
    require(!config.orderer_public_key.empty(), Status::missing_field,
            "genesis: orderer public key");
    require(!config.peers.empty(), Status::missing_field, "genesis: peers");
    require(!config.attestation_service_public_key.empty(),
            Status::missing_field, "genesis: attestation service key");
    require(config.ledger_enclave_measurement != crypto::Digest{},
            Status::missing_field, "genesis: ledger enclave measurement");
    for (const auto& cc : config.chaincodes) {
        require(!cc.name.empty(), Status::missing_field,
                "genesis: chaincode name");
        require(cc.required_endorsements >= 1, Status::missing_field,
                "genesis: endorsement requirement");
        if (cc.kind == ChaincodeKind::enclave)
            require(cc.expected_measurement.has_value(), Status::missing_field,
                    "genesis: expected measurement for " + cc.name);
    }
    Block b;
    b.seq = 0;
    b.config = encode_genesis_config(config);
    return b;
}

Orderer::Orderer(crypto::SigningKeyPair key, const Block& genesis,
                 size_t block_size)
    : key_(std::move(key)), block_size_(block_size), next_seq_(1) {
    require(block_size_ >= 1, Status::config_error, "orderer: block size");
    require(genesis.seq == 0, Status::config_error, "orderer: genesis seq");
    prev_hash_ = block_hash(genesis);
    emitted_.push_back(genesis);
}

void Orderer::submit(Transaction tx) { pending_.push_back(std::move(tx)); }

std::optional<Block> Orderer::cut_block() {
    if (pending_.empty()) return std::nullopt;
    Block b;
    b.seq = next_seq_++;
    b.prev_hash = prev_hash_;
    size_t take = std::min(block_size_, pending_.size());
    b.transactions.assign(std::make_move_iterator(pending_.begin()),
                          std::make_move_iterator(pending_.begin() + take));
    pending_.erase(pending_.begin(), pending_.begin() + take);
    b.orderer_signature = crypto::sign(key_.secret, block_signing_payload(b));
    prev_hash_ = block_hash(b);
    emitted_.push_back(b);
    return b;
}

std::vector<Block> Orderer::cut_all() {
    std::vector<Block> out;
    while (auto b = cut_block()) out.push_back(std::move(*b));
    return out;
}

namespace {

bool endorsements_consistent(const Transaction& tx) {
    if (tx.endorsements.empty()) return false;
    crypto::Digest digest = proposal_digest(tx.proposal);
    const Endorsement& first = tx.endorsements.front();
    for (const auto& e : tx.endorsements) {
        if (e.proposal_digest != digest) return false;
        if (e.read_set != first.read_set) return false;
        if (e.write_set != first.write_set) return false;
    }
    return true;
}

bool plain_policy_holds(const Transaction& tx, const ChaincodePolicy& policy,
                        const GenesisConfig& config) {
    std::set<Bytes> distinct;
    for (const auto& e : tx.endorsements) {
        if (!config.find_peer(e.endorser_public_key)) continue;
        if (!crypto::verify(e.endorser_public_key,
                            endorsement_signing_payload(e), e.signature))
            continue;
        distinct.insert(e.endorser_public_key);
    }
    return distinct.size() >= policy.required_endorsements;
}

bool reads_current(const ReadSet& reads, const ValidationHooks& hooks,
                   const std::set<std::string>& written_this_block) {
    for (const auto& r : reads) {
        if (written_this_block.count(r.key)) return false;
        std::optional<Version> current = hooks.version_of(r.key);
        if (current.has_value() != r.version.has_value()) return false;
        if (current && *current != *r.version) return false;
    }
    return true;
}

}  // namespace

std::vector<bool> validate_transactions(const Block& b,
                                        const GenesisConfig& config,
                                        const ValidationHooks& hooks) {
    std::vector<bool> flags;
    flags.reserve(b.transactions.size());
    std::set<std::string> written_this_block;
    std::set<crypto::Digest> digests_this_block;

    for (const auto& tx : b.transactions) {
        bool valid = endorsements_consistent(tx);

        const ChaincodePolicy* policy =
            config.find_chaincode(tx.proposal.chaincode_id);
        if (!policy) valid = false;

        crypto::Digest digest = proposal_digest(tx.proposal);
        if (valid &&
            (hooks.seen_proposal(digest) || digests_this_block.count(digest)))
            valid = false;

        if (valid) {
            if (policy->kind == ChaincodeKind::plain) {
                valid = plain_policy_holds(tx, *policy, config);
            } else {
                require(static_cast<bool>(hooks.enclave_policy),
                        Status::config_error,
                        "validation: no enclave policy hook");
                valid = hooks.enclave_policy(tx, *policy);
            }
        }

        if (valid)
            valid = reads_current(tx.endorsements.front().read_set, hooks,
                                  written_this_block);

        if (valid)
            for (const auto& w : tx.endorsements.front().write_set)
                written_this_block.insert(w.key);
        digests_this_block.insert(digest);
        flags.push_back(valid);
    }
    return flags;
}

std::vector<bool> validate_block(const VersionedStore& store, const Block& b,
                                 const ValidationContext& ctx) {
    require(ctx.config != nullptr, Status::config_error,
            "validation: missing config");
    if (b.seq == 0)
        raise(Status::sequence_gap, "validation: genesis resubmitted");
    require(b.seq == store.height() + 1, Status::sequence_gap,
            "validation: expected seq " + std::to_string(store.height() + 1) +
                ", got " + std::to_string(b.seq));
    require(b.prev_hash == store.last_block_hash(), Status::hash_chain_break,
            "validation: prev hash mismatch at seq " + std::to_string(b.seq));
    require(crypto::verify(ctx.config->orderer_public_key,
                           block_signing_payload(b), b.orderer_signature),
            Status::bad_orderer_signature,
            "validation: orderer signature at seq " + std::to_string(b.seq));

    ValidationHooks hooks;
    hooks.version_of =
        [&store](const std::string& key) -> std::optional<Version> {
        auto entry = store.get(key);
        if (!entry) return std::nullopt;
        return entry->version;
    };
    hooks.seen_proposal = [&store](const crypto::Digest& d) {
        return store.seen_proposal(d);
    };
    hooks.enclave_policy = ctx.enclave_policy;
    return validate_transactions(b, *ctx.config, hooks);
}

CommitRecord commit_block(VersionedStore& store, const Block& b,
                          const std::vector<bool>& flags) {
    CommitRecord rec;
    rec.seq = b.seq;
    rec.flags = flags;
    rec.block_hash = block_hash(b);

    if (b.seq == 0) {
        require(!store.has_genesis_, Status::sequence_gap,
                "commit: genesis already present");
        require(b.transactions.empty(), Status::malformed_genesis,
                "commit: genesis carries transactions");
        // Rejecting an undecodable config here keeps every later consumer of
        // store state on a well-formed chain.
        decode_genesis_config(b.config);
        store.has_genesis_ = true;
        store.height_ = 0;
        store.last_hash_ = rec.block_hash;
        rec.state_hash = store.state_hash();
        return rec;
    }

    require(store.has_genesis_, Status::sequence_gap, "commit: no genesis");
    require(b.seq == store.height_ + 1, Status::sequence_gap,
            "commit: sequence");
    require(flags.size() == b.transactions.size(), Status::config_error,
            "commit: flag count");

    for (size_t i = 0; i < b.transactions.size(); ++i) {
        const Transaction& tx = b.transactions[i];
        store.committed_proposals_.insert(proposal_digest(tx.proposal));
        if (!flags[i]) continue;
        Version version{b.seq, static_cast<uint32_t>(i)};
        for (const auto& w : tx.endorsements.front().write_set)
            store.entries_[w.key] = ValueEntry{w.value, version};
    }
    store.height_ = b.seq;
    store.last_hash_ = rec.block_hash;
    rec.state_hash = store.state_hash();
    return rec;
}

}  // namespace chainclave::ledger
