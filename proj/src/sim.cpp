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

#include "chainclave/sim.hpp"

#include <unistd.h>

#include <atomic>
#include <fstream>

namespace chainclave::sim {

namespace {

std::filesystem::path fresh_root() {
    static std::atomic<uint64_t> counter{0};
    auto n = counter.fetch_add(1);
    return std::filesystem::temp_directory_path() /
           ("chainclave-" + std::to_string(::getpid()) + "-" +
            std::to_string(n));
}

Bytes read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    require(in.good(), Status::config_error, "cannot read " + p.string());
    return Bytes(std::istreambuf_iterator<char>(in),
                 std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& p, ByteView data) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    require(out.good(), Status::config_error, "cannot write " + p.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

}  // namespace

// ---------------------------------------------------------------- Peer ----

Peer::Peer(SimNet& net, size_t index, std::string id, std::string platform,
           crypto::SigningKeyPair key, std::filesystem::path dir)
    : net_(&net),
      index_(index),
      id_(std::move(id)),
      platform_(std::move(platform)),
      key_(std::move(key)),
      dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

cce::CceClient& Peer::chaincode_enclave(const std::string& name) {
    auto it = cces_.find(name);
    require(it != cces_.end(), Status::config_error,
            id_ + " hosts no enclave for chaincode " + name);
    return it->second;
}

const cce::SetupResult& Peer::enclave_keys(const std::string& name) const {
    auto it = cce_keys_.find(name);
    require(it != cce_keys_.end(), Status::config_error,
            id_ + " has no enclave keys for chaincode " + name);
    return it->second;
}

const crypto::SealedBlob& Peer::sealed_identity(
    const std::string& name) const {
    auto it = cce_identities_.find(name);
    require(it != cce_identities_.end(), Status::config_error,
            id_ + " has no sealed identity for chaincode " + name);
    return it->second;
}

Bytes Peer::ocall(const std::string& channel, ByteView payload) {
    if (channel == cce::kChanGetState) {
        auto key = codec::decode_all(
            payload, [](codec::ByteReader& r) { return r.str(); });
        cce::StateValue sv;
        if (auto entry = store_.get(key)) {
            sv.present = true;
            sv.value = entry->value;
            sv.version = entry->version;
        }
        return cce::encode_state_value(sv);
    }
    if (channel == cce::kChanGetRange) {
        auto prefix = codec::decode_all(
            payload, [](codec::ByteReader& r) { return r.str(); });
        std::vector<cce::RangeItem> items;
        for (auto& [key, entry] : store_.range(prefix))
            items.push_back({key, entry.value, entry.version});
        return cce::encode_range_items(items);
    }
    if (channel == cce::kChanLedgerMeta) {
        require(le_.has_value(), Status::config_error,
                id_ + " has no running ledger enclave");
        return tee::encode_ecall_result(le_->raw(le::kGetMeta, payload));
    }
    raise(Status::config_error, "unknown ocall channel " + channel);
}

ledger::Endorsement Peer::endorse(const ledger::TransactionProposal& p) {
    const auto* policy = net_->config().find_chaincode(p.chaincode_id);
    require(policy != nullptr, Status::config_error,
            "no chaincode " + p.chaincode_id);
    if (policy->kind == ledger::ChaincodeKind::plain) {
        cce::PlainChaincodeHost host(net_->contract(p.chaincode_id),
                                     &net_->config());
        return host.endorse(p, store_, key_);
    }
    return chaincode_enclave(p.chaincode_id).invoke(p, this);
}

ledger::ValidationContext Peer::validation_context() const {
    ledger::ValidationContext ctx;
    ctx.config = &net_->config();
    ctx.enclave_policy = [this](const ledger::Transaction& tx,
                                const ledger::ChaincodePolicy& pol) {
        return registry::enclave_endorsements_valid(
            tx, pol, net_->config(),
            [this](const std::string& key) -> std::optional<Bytes> {
                auto entry = store_.get(key);
                if (!entry) return std::nullopt;
                return entry->value;
            });
    };
    return ctx;
}

std::vector<bool> Peer::deliver_block(const ledger::Block& b) {
    require(!halted_, Status::config_error, id_ + " halted: " + halt_reason_);
    require(le_.has_value(), Status::config_error,
            id_ + " has no running ledger enclave");

    std::vector<bool> flags = ledger::validate_block(store_, b,
                                                     validation_context());
    std::vector<bool> le_flags;
    try {
        le_flags = le_->process_block(b);
    } catch (const Error& e) {
        halt("ledger enclave rejected block " + std::to_string(b.seq) +
             ": " + e.what());
        throw;
    }
    if (flags != le_flags) {
        halt("validation crosscheck mismatch at block " +
             std::to_string(b.seq));
        raise(Status::crosscheck_mismatch, halt_reason_);
    }
    ledger::commit_block(store_, b, flags);
    persist_block(b, flags);
    uint64_t interval = net_->options().snapshot_interval;
    if (interval != 0 && b.seq % interval == 0) take_snapshot();
    return flags;
}

void Peer::persist_block(const ledger::Block& b,
                         const std::vector<bool>& flags) {
    codec::ByteWriter w;
    w.bytes(ledger::encode_block(b));
    w.list(flags, [](codec::ByteWriter& wr, bool f) {
        wr.u8(f ? 1 : 0);
    });
    Bytes payload = w.take();
    std::ofstream out(dir_ / "blocks.log",
                      std::ios::binary | std::ios::app);
    require(out.good(), Status::config_error, "cannot append block log");
    codec::ByteWriter frame;
    frame.bytes(payload);
    Bytes framed = frame.take();
    out.write(reinterpret_cast<const char*>(framed.data()),
              static_cast<std::streamsize>(framed.size()));
}

void Peer::take_snapshot() {
    require(le_.has_value(), Status::config_error,
            id_ + " has no running ledger enclave");
    crypto::SealedBlob blob = le_->snapshot();
    snapshots_.emplace_back(store_.height(), blob);
    write_file(dir_ / ("snapshot_" + std::to_string(store_.height()) +
                       ".sealed"),
               crypto::encode_sealed_blob(blob));
}

void Peer::halt(const std::string& reason) {
    halted_ = true;
    halt_reason_ = reason;
}

void Peer::start_enclaves() {
    le_.emplace(net_->tee(),
                net_->tee().create(platform_, net_->le_measurement()));
    le_->init(net_->genesis());

    for (const auto& policy : net_->config().chaincodes) {
        if (policy.kind != ledger::ChaincodeKind::enclave) continue;
        cce::CceClient client(net_->tee(),
                              net_->tee().create(platform_,
                                                 net_->cce_measurement()));
        cce::SetupResult keys = client.setup(net_->genesis(), policy.name,
                                             id_);
        cces_.emplace(policy.name, std::move(client));
        cce_keys_.emplace(policy.name, std::move(keys));
    }
}

void Peer::shutdown() {
    le_.reset();
    cces_.clear();
}

void Peer::recover() {
    // Latest sealed snapshot on disk wins.
    uint64_t best_seq = 0;
    std::filesystem::path best;
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("snapshot_", 0) != 0) continue;
        uint64_t seq = std::stoull(name.substr(9));
        if (best.empty() || seq >= best_seq) {
            best_seq = seq;
            best = entry.path();
        }
    }
    require(!best.empty(), Status::config_error,
            id_ + " has no snapshot to recover from");

    le_.emplace(net_->tee(),
                net_->tee().create(platform_, net_->le_measurement()));
    le::LedgerSummary summary =
        le_->restore(crypto::decode_sealed_blob(read_file(best)));

    // Rebuild the committed store from the persisted chain and replay the
    // tail past the snapshot through the ledger enclave.
    store_ = ledger::VersionedStore{};
    ledger::commit_block(store_, net_->genesis(), {});
    halted_ = false;
    halt_reason_.clear();

    std::filesystem::path log = dir_ / "blocks.log";
    if (std::filesystem::exists(log)) {
        Bytes raw = read_file(log);
        codec::ByteReader frames(raw);
        while (!frames.done()) {
            Bytes payload = frames.bytes();
            codec::ByteReader r(payload);
            ledger::Block b = ledger::decode_block(r.bytes());
            auto raw_flags = r.list<uint8_t>(
                [](codec::ByteReader& rr) { return rr.u8(); });
            r.expect_done();
            std::vector<bool> flags(raw_flags.begin(), raw_flags.end());
            ledger::commit_block(store_, b, flags);
            if (b.seq > summary.last_block_seq) {
                std::vector<bool> le_flags = le_->process_block(b);
                if (flags != le_flags) {
                    halt("crosscheck mismatch replaying block " +
                         std::to_string(b.seq));
                    raise(Status::crosscheck_mismatch, halt_reason_);
                }
            }
        }
    }

    // Chaincode enclaves resume from their sealed identities; no second
    // registration, no second attestation.
    cces_.clear();
    cce_keys_.clear();
    for (const auto& [name, blob] : cce_identities_) {
        cce::CceClient client(net_->tee(),
                              net_->tee().create(platform_,
                                                 net_->cce_measurement()));
        cce::SetupResult keys = client.restore(blob);
        cces_.emplace(name, std::move(client));
        cce_keys_.emplace(name, std::move(keys));
    }
}

// -------------------------------------------------------------- SimNet ----

SimNet::SimNet(SimOptions opt) : opt_(std::move(opt)), rng_(opt_.seed) {
    require(opt_.peers >= 1, Status::config_error, "at least one peer");
    require(opt_.block_size >= 1, Status::config_error, "block size");

    if (opt_.data_dir.empty()) {
        root_ = fresh_root();
        owns_root_ = true;
    } else {
        root_ = opt_.data_dir;
    }
    std::filesystem::create_directories(root_);

    DetRng service_rng = rng_.child("service");
    service_.emplace(crypto::sign_keygen(service_rng));
    tee_.emplace(rng_.child("tee"));
    admin_rng_ = rng_.child("admin");

    contracts_["ercc"] = std::make_shared<registry::RegistryChaincode>(
        &*service_, &config_);
    contracts_["auction"] = std::make_shared<auction::AuctionChaincode>();

    le_measurement_ =
        tee_->register_program(std::make_shared<le::LedgerEnclaveProgram>());
    cce_measurement_ = tee_->register_program(
        std::make_shared<cce::ChaincodeEnclaveProgram>(
            contracts_["auction"]));

    DetRng orderer_rng = rng_.child("orderer");
    crypto::SigningKeyPair orderer_key = crypto::sign_keygen(orderer_rng);

    std::vector<crypto::SigningKeyPair> peer_keys;
    for (size_t i = 0; i < opt_.peers; ++i) {
        DetRng r = rng_.child("peer/" + std::to_string(i));
        peer_keys.push_back(crypto::sign_keygen(r));
    }

    client_ids_ = {"admin", "auctioneer", "alice",  "bob",
                   "carol", "dave",       "mallory"};
    for (size_t i = 0; i < opt_.extra_clients; ++i)
        client_ids_.push_back("client" + std::to_string(i));
    for (const auto& id : client_ids_) {
        DetRng r = rng_.child("client/" + id);
        ClientIdentity c;
        c.id = id;
        c.sign = crypto::sign_keygen(r);
        c.box = crypto::box_keygen(r);
        c.data_key = crypto::random_key(r);
        c.rng = r.child("ops");
        clients_.emplace(id, std::move(c));
    }

    config_.orderer_public_key = orderer_key.public_key;
    for (size_t i = 0; i < opt_.peers; ++i)
        config_.peers.push_back(
            {"peer" + std::to_string(i), peer_keys[i].public_key});
    for (const auto& id : client_ids_)
        config_.clients.push_back({id, clients_.at(id).sign.public_key});
    config_.ledger_enclave_measurement = le_measurement_;
    config_.attestation_service_public_key = service_->public_key();

    ledger::ChaincodePolicy ercc_policy;
    ercc_policy.name = "ercc";
    ercc_policy.kind = ledger::ChaincodeKind::plain;
    ercc_policy.required_endorsements = 1;
    ercc_policy.encryption = ledger::StateEncryption::none;
    config_.chaincodes.push_back(ercc_policy);

    ledger::ChaincodePolicy auction_policy;
    auction_policy.name = "auction";
    auction_policy.kind = opt_.auction_kind;
    auction_policy.required_endorsements = opt_.required_endorsements;
    if (opt_.auction_kind == ledger::ChaincodeKind::enclave) {
        auction_policy.expected_measurement = cce_measurement_;
        auction_policy.encryption = opt_.encryption;
    }
    config_.chaincodes.push_back(auction_policy);

    genesis_ = ledger::make_genesis(config_);
    genesis_hash_ = ledger::block_hash(genesis_);
    orderer_.emplace(orderer_key, genesis_, opt_.block_size);

    for (size_t i = 0; i < opt_.peers; ++i) {
        std::string platform = "platform" + std::to_string(i);
        tee_->add_platform(platform, &*service_);
        peers_.push_back(std::unique_ptr<Peer>(
            new Peer(*this, i, "peer" + std::to_string(i), platform,
                     peer_keys[i], root_ / ("peer" + std::to_string(i)))));
    }
    auto_deliver_.assign(opt_.peers, true);
    pending_.resize(opt_.peers);

    bootstrap();
}

SimNet::~SimNet() {
    if (owns_root_) {
        std::error_code ec;
        std::filesystem::remove_all(root_, ec);
    }
}

void SimNet::bootstrap() {
    for (auto& p : peers_) {
        ledger::commit_block(p->store_, genesis_, {});
        p->start_enclaves();
    }

    if (opt_.auction_kind == ledger::ChaincodeKind::enclave) {
        // Register every chaincode enclave on the ledger itself, through
        // the ordinary pipeline.
        for (size_t i = 0; i < peers_.size(); ++i) {
            const cce::SetupResult& keys = peers_[i]->enclave_keys("auction");
            registry::RegistrationCandidate cand;
            cand.chaincode = "auction";
            cand.host_peer = peers_[i]->id();
            cand.signing_public_key = keys.signing_public_key;
            cand.encryption_public_key = keys.encryption_public_key;
            cand.report = keys.quote;

            cc::Operation op;
            op.function = "register";
            op.args.push_back(registry::encode_candidate(cand));
            submit(assemble(make_proposal("admin", "ercc", op), {i}));
        }
        size_t first = history_.size();
        size_t emitted = commit_pending().size();
        for (size_t bi = first; bi < first + emitted; ++bi)
            for (bool flag : history_[bi].second)
                require(flag, Status::config_error,
                        "bootstrap: enclave registration rejected");

        for (auto& p : peers_) {
            le::BindReport br = p->le_->bind_report();
            p->cces_.at("auction").bind(br);
        }

        if (opt_.encryption == ledger::StateEncryption::per_chaincode) {
            DetRng key_rng = rng_.child("statekey");
            state_key_ = crypto::random_key(key_rng);
            Bytes key_bytes(state_key_.bytes.begin(),
                            state_key_.bytes.end());
            for (auto& p : peers_) {
                crypto::Envelope env = crypto::hybrid_encrypt(
                    p->cce_keys_.at("auction").encryption_public_key,
                    key_bytes, admin_rng_);
                p->cces_.at("auction").provision_key(env);
            }
        }

        for (auto& p : peers_) {
            crypto::SealedBlob blob =
                p->cces_.at("auction").seal_identity();
            p->cce_identities_["auction"] = blob;
            write_file(p->dir_ / "cce_auction.sealed",
                       crypto::encode_sealed_blob(blob));
        }
    }

    for (auto& p : peers_) p->take_snapshot();
}

ClientIdentity& SimNet::client(const std::string& id) {
    auto it = clients_.find(id);
    require(it != clients_.end(), Status::config_error,
            "unknown client " + id);
    return it->second;
}

ledger::TransactionProposal SimNet::make_proposal(const std::string& client_id,
                                                  const std::string& chaincode,
                                                  cc::Operation op) {
    ClientIdentity& cl = client(client_id);
    const auto* policy = config_.find_chaincode(chaincode);
    require(policy != nullptr, Status::config_error,
            "no chaincode " + chaincode);

    std::optional<crypto::SymmetricKey> state_key;
    if (policy->kind == ledger::ChaincodeKind::enclave &&
        policy->encryption == ledger::StateEncryption::client_based)
        state_key = cl.data_key;

    cc::SignedOperation sop = cc::make_signed_operation(
        client_id, cl.sign.secret, chaincode, std::move(op), cl.rng,
        state_key);
    Bytes sop_bytes = cc::encode_signed_operation(sop);

    ledger::TransactionProposal p;
    p.client_id = client_id;
    p.chaincode_id = chaincode;
    p.proposal_nonce = cl.rng.bytes(16);
    if (policy->kind == ledger::ChaincodeKind::plain) {
        p.operation = std::move(sop_bytes);
    } else {
        // One envelope per hosting enclave, so any subset of peers can
        // endorse the same proposal.
        std::vector<crypto::Envelope> envelopes;
        for (auto& peer : peers_)
            envelopes.push_back(crypto::hybrid_encrypt(
                peer->enclave_keys(chaincode).encryption_public_key,
                sop_bytes, cl.rng));
        codec::ByteWriter w;
        w.list(envelopes, [](codec::ByteWriter& wr,
                             const crypto::Envelope& e) {
            crypto::write_envelope(wr, e);
        });
        p.operation = w.take();
        if (opt_.encrypt_results) p.result_key = cl.box.public_key;
    }
    return p;
}

ledger::Transaction SimNet::assemble(const ledger::TransactionProposal& p,
                                     const std::vector<size_t>& endorsers) {
    ledger::Transaction tx;
    tx.proposal = p;
    for (size_t idx : endorsers)
        tx.endorsements.push_back(peers_.at(idx)->endorse(p));
    return tx;
}

void SimNet::submit(ledger::Transaction tx) {
    submitted_wire_.push_back(ledger::encode_transaction(tx));
    orderer_->submit(std::move(tx));
}

std::vector<ledger::Block> SimNet::commit_pending() {
    std::vector<ledger::Block> blocks = orderer_->cut_all();
    for (const auto& b : blocks) {
        std::optional<std::vector<bool>> recorded;
        for (size_t i = 0; i < peers_.size(); ++i) {
            if (!auto_deliver_[i] || peers_[i]->halted()) {
                pending_[i].push_back(b);
                continue;
            }
            std::vector<bool> flags = peers_[i]->deliver_block(b);
            if (!recorded) recorded = flags;
        }
        history_.emplace_back(b, recorded.value_or(std::vector<bool>{}));
    }
    return blocks;
}

TxOutcome SimNet::run_op(const std::string& client_id,
                         const std::string& chaincode, cc::Operation op,
                         std::vector<size_t> endorsers) {
    std::string function = op.function;
    ledger::Transaction tx =
        assemble(make_proposal(client_id, chaincode, std::move(op)),
                 endorsers);
    submit(tx);
    commit_pending();
    return outcome_of(tx, function);
}

TxOutcome SimNet::outcome_of(const ledger::Transaction& tx,
                             const std::string& function) const {
    TxOutcome out;
    out.digest = ledger::proposal_digest(tx.proposal);
    for (const auto& [block, flags] : history_) {
        for (size_t t = 0; t < block.transactions.size(); ++t) {
            const ledger::Transaction& committed = block.transactions[t];
            if (ledger::proposal_digest(committed.proposal) != out.digest)
                continue;
            out.block_seq = block.seq;
            out.tx_index = static_cast<uint32_t>(t);
            out.valid = t < flags.size() && flags[t];
            if (!out.valid) {
                out.text = "invalid";
                return out;
            }
            require(!committed.endorsements.empty(), Status::config_error,
                    "committed transaction without endorsement");
            cc::Result r = decrypt_result(
                committed.proposal.client_id,
                committed.endorsements.front().result,
                !committed.proposal.result_key.empty());
            out.text = outcome_text(function, r);
            out.result = std::move(r);
            return out;
        }
    }
    raise(Status::config_error, "transaction not found in history");
}

void SimNet::set_auto_deliver(size_t peer, bool on) {
    auto_deliver_.at(peer) = on;
}

cc::Result SimNet::decrypt_result(const std::string& client_id,
                                  const Bytes& result_bytes,
                                  bool encrypted) const {
    if (!encrypted) return cc::decode_result(result_bytes);
    const ClientIdentity& cl = clients_.at(client_id);
    Bytes plain = crypto::hybrid_decrypt(
        cl.box.secret, crypto::decode_envelope(result_bytes));
    return cc::decode_result(plain);
}

std::string SimNet::outcome_text(const std::string& function,
                                 const cc::Result& r) {
    if (!r.ok) return "err:" + r.code;
    if (function == "evaluate")
        return "ok:" + auction::decode_outcome(r.payload).text();
    return "ok:" + to_string(r.payload);
}

std::vector<std::pair<std::string, Bytes>> SimNet::public_surfaces() const {
    std::vector<std::pair<std::string, Bytes>> out;
    for (const auto& b : orderer_->emitted())
        out.emplace_back("orderer/block" + std::to_string(b.seq),
                         ledger::encode_block(b));
    for (size_t i = 0; i < submitted_wire_.size(); ++i)
        out.emplace_back("submitted/tx" + std::to_string(i),
                         submitted_wire_[i]);
    for (const auto& p : peers_)
        for (const auto& [key, entry] : p->store().entries())
            out.emplace_back(p->id() + "/store/" + key, entry.value);
    return out;
}

}  // namespace chainclave::sim
