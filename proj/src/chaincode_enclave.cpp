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

#include "chainclave/chaincode_enclave.hpp"

#include <algorithm>

#include "chainclave/bench.hpp"
#include "chainclave/faults.hpp"
#include "chainclave/registry.hpp"

namespace chainclave::cce {

namespace {

struct CceState : tee::EnclaveState {
    bool setup_done = false;
    bool bound = false;
    std::string chaincode;
    std::string host_peer;
    ledger::GenesisConfig config;
    ledger::ChaincodePolicy policy;
    crypto::SigningKeyPair sign_key;
    crypto::BoxKeyPair box_key;
    Bytes le_public_key;
    std::optional<crypto::SymmetricKey> state_key;
};

CceState& as_cce(tee::EnclaveState& s) { return static_cast<CceState&>(s); }

void require_ready(const CceState& st) {
    require(st.setup_done, Status::not_initialized,
            "chaincode enclave not set up");
}

/*
 * The verified shim. Logical contract keys are namespaced with the
 * chaincode name before touching the ledger, so contracts cannot read or
 * write outside their own keyspace.
 */
class VerifiedShim : public cc::Shim {
  public:
    VerifiedShim(tee::EnclaveRuntime& rt, CceState& st,
                 std::optional<crypto::SymmetricKey> data_key,
                 std::string caller, crypto::Digest proposal_digest)
        : rt_(rt),
          st_(st),
          data_key_(data_key),
          caller_(std::move(caller)),
          proposal_digest_(proposal_digest),
          ns_(st.chaincode + "/") {}

    std::optional<Bytes> get_state(const std::string& key) override {
        std::string full = ns_ + key;
        auto pending = pending_.find(full);
        if (pending != pending_.end()) return pending->second;
        auto cached = cache_.find(full);
        if (cached != cache_.end()) return cached->second;

        StateValue sv;
        {
            bench::Span span(bench::Category::get_state);
            codec::ByteWriter w;
            w.str(full);
            sv = decode_state_value(rt_.ocall(kChanGetState, w.view()));
        }
        auto hashes = verified_hashes({full});
        const std::optional<crypto::Digest>& h = hashes.front();

        std::optional<Bytes> plaintext;
        {
            bench::Span span(bench::Category::get_state);
            require(sv.present == h.has_value(),
                    Status::state_verification_failure,
                    "host and ledger enclave disagree on presence of " +
                        full);
            if (sv.present) {
                require(crypto::sha256(sv.value) == *h,
                        Status::state_verification_failure,
                        "value hash mismatch for " + full);
                plaintext = decrypt(full, sv.value);
            }
        }
        reads_.push_back(
            {full, sv.present ? std::optional<ledger::Version>(sv.version)
                              : std::nullopt});
        cache_.emplace(full, plaintext);
        return plaintext;
    }

    void put_state(const std::string& key, ByteView value) override {
        pending_[ns_ + key] = Bytes(value.begin(), value.end());
    }

    std::vector<std::pair<std::string, Bytes>> get_range(
        const std::string& prefix) override {
        std::string full_prefix = ns_ + prefix;
        std::vector<RangeItem> items;
        {
            bench::Span span(bench::Category::get_state);
            codec::ByteWriter w;
            w.str(full_prefix);
            items = decode_range_items(rt_.ocall(kChanGetRange, w.view()));
        }
        std::vector<std::string> keys;
        keys.reserve(items.size());
        for (const auto& item : items) keys.push_back(item.key);
        require(std::is_sorted(keys.begin(), keys.end()) &&
                    std::adjacent_find(keys.begin(), keys.end()) ==
                        keys.end(),
                Status::state_verification_failure,
                "range result not sorted and distinct");
        for (const auto& k : keys)
            require(k.compare(0, full_prefix.size(), full_prefix) == 0,
                    Status::state_verification_failure,
                    "range result outside prefix: " + k);

        auto hashes = verified_hashes(keys);
        std::vector<std::pair<std::string, Bytes>> out;
        {
            bench::Span span(bench::Category::get_state);
            for (size_t i = 0; i < items.size(); ++i) {
                require(hashes[i].has_value(),
                        Status::state_verification_failure,
                        "range item not committed: " + items[i].key);
                require(crypto::sha256(items[i].value) == *hashes[i],
                        Status::state_verification_failure,
                        "value hash mismatch for " + items[i].key);
                Bytes plaintext = decrypt(items[i].key, items[i].value);
                reads_.push_back({items[i].key, items[i].version});
                cache_[items[i].key] = plaintext;
                out.emplace_back(items[i].key.substr(ns_.size()),
                                 std::move(plaintext));
            }
        }
        return out;
    }

    const std::string& caller() const override { return caller_; }

    const ledger::ReadSet& reads() const { return reads_; }

    void discard_writes() { pending_.clear(); }

    ledger::WriteSet build_write_set() const {
        ledger::WriteSet ws;
        for (const auto& [full, plaintext] : pending_) {
            Bytes stored =
                data_key_ ? encrypt_state_value(*data_key_, full,
                                                proposal_digest_, plaintext)
                          : plaintext;
            ws.push_back({full, std::move(stored)});
        }
        return ws;
    }

  private:
    // One nonce-challenged, signed metadata query for a batch of keys.
    std::vector<std::optional<crypto::Digest>> verified_hashes(
        const std::vector<std::string>& keys) {
        le::MetaResponse resp;
        Bytes nonce;
        {
            bench::Span span(bench::Category::meta_query);
            le::MetaRequest req;
            nonce = rt_.rng().bytes(16);
            req.nonce = nonce;
            req.keys = keys;
            Bytes raw =
                rt_.ocall(kChanLedgerMeta, le::encode_meta_request(req));
            tee::EcallResult relayed = tee::decode_ecall_result(raw);
            require(relayed.ok(), Status::state_verification_failure,
                    "ledger enclave refused metadata: " + relayed.message);
            resp = le::decode_meta_response(relayed.payload);
        }
        if (!faults().disable_meta_signature_check) {
            bench::Span span(bench::Category::verify);
            require(crypto::verify(st_.le_public_key,
                                   le::meta_response_signing_payload(resp),
                                   resp.signature),
                    Status::state_verification_failure,
                    "metadata response signature rejected");
        }
        require(resp.nonce == nonce, Status::state_verification_failure,
                "metadata response answers a different challenge");
        require(resp.entries.size() == keys.size(),
                Status::state_verification_failure,
                "metadata response entry count");
        std::vector<std::optional<crypto::Digest>> out;
        out.reserve(keys.size());
        for (size_t i = 0; i < keys.size(); ++i) {
            require(resp.entries[i].key == keys[i],
                    Status::state_verification_failure,
                    "metadata response key order");
            out.push_back(resp.entries[i].value_hash);
        }
        return out;
    }

    Bytes decrypt(const std::string& full_key, const Bytes& stored) {
        if (!data_key_) return stored;
        return decrypt_state_value(*data_key_, full_key, stored);
    }

    tee::EnclaveRuntime& rt_;
    CceState& st_;
    std::optional<crypto::SymmetricKey> data_key_;
    std::string caller_;
    crypto::Digest proposal_digest_;
    std::string ns_;
    ledger::ReadSet reads_;
    std::map<std::string, Bytes> pending_;
    std::map<std::string, std::optional<Bytes>> cache_;
};

Bytes identity_payload(const CceState& st) {
    codec::ByteWriter w;
    w.str(st.chaincode);
    w.str(st.host_peer);
    w.bytes(ledger::encode_genesis_config(st.config));
    w.bytes(st.sign_key.secret);
    w.bytes(st.sign_key.public_key);
    w.bytes(st.box_key.secret);
    w.bytes(st.box_key.public_key);
    w.flag(st.bound);
    w.bytes(st.le_public_key);
    w.opt(st.state_key,
          [](codec::ByteWriter& w2, const crypto::SymmetricKey& k) {
              w2.fixed(k.bytes);
          });
    return w.take();
}

void load_identity_payload(CceState& st, ByteView payload) {
    codec::ByteReader r(payload);
    st.chaincode = r.str();
    st.host_peer = r.str();
    st.config = ledger::decode_genesis_config(r.bytes());
    st.sign_key.secret = r.bytes();
    st.sign_key.public_key = r.bytes();
    st.box_key.secret = r.bytes();
    st.box_key.public_key = r.bytes();
    st.bound = r.flag();
    st.le_public_key = r.bytes();
    st.state_key = r.opt<crypto::SymmetricKey>([](codec::ByteReader& r2) {
        crypto::SymmetricKey k;
        k.bytes = r2.fixed<crypto::kSymKeySize>();
        return k;
    });
    r.expect_done();
    const ledger::ChaincodePolicy* policy =
        st.config.find_chaincode(st.chaincode);
    require(policy != nullptr, Status::unseal_authentication_failure,
            "sealed identity names an unknown chaincode");
    st.policy = *policy;
    st.setup_done = true;
}

SetupResult keys_of(const CceState& st) {
    SetupResult r;
    r.signing_public_key = st.sign_key.public_key;
    r.encryption_public_key = st.box_key.public_key;
    return r;
}

Bytes do_setup(tee::EnclaveRuntime& rt, CceState& st, ByteView args) {
    require(!st.setup_done, Status::already_setup,
            "chaincode enclave already set up");
    SetupArgs a = decode_setup_args(args);
    ledger::GenesisConfig config;
    try {
        ledger::Block genesis = ledger::decode_block(a.genesis_block);
        require(genesis.seq == 0, Status::malformed_genesis, "not block 0");
        config = ledger::decode_genesis_config(genesis.config);
    } catch (const Error& e) {
        raise(Status::malformed_genesis,
              std::string("genesis rejected: ") + e.what());
    }
    const ledger::ChaincodePolicy* policy =
        config.find_chaincode(a.chaincode);
    require(policy != nullptr &&
                policy->kind == ledger::ChaincodeKind::enclave,
            Status::malformed_genesis,
            "no enclave chaincode named " + a.chaincode);
    require(policy->expected_measurement == rt.measurement(),
            Status::measurement_mismatch,
            "genesis expects different chaincode enclave code");

    st.chaincode = a.chaincode;
    st.host_peer = a.host_peer;
    st.policy = *policy;
    st.sign_key = crypto::sign_keygen(rt.rng());
    st.box_key = crypto::box_keygen(rt.rng());
    st.config = std::move(config);
    st.setup_done = true;

    SetupResult result = keys_of(st);
    result.quote = rt.quote(registry::expected_report_data(
        result.signing_public_key, result.encryption_public_key));
    return encode_setup_result(result);
}

Bytes do_bind(tee::EnclaveRuntime& rt, CceState& st, ByteView args) {
    require_ready(st);
    le::BindReport br = le::decode_bind_report(args);
    require(rt.verify_local_report(br.report), Status::bind_rejected,
            "local report rejected");
    require(br.report.measurement == st.config.ledger_enclave_measurement,
            Status::bind_rejected,
            "report is not from the configured ledger enclave");
    require(br.report.report_data ==
                tee::report_data_from_digest(crypto::sha256(br.public_key)),
            Status::bind_rejected,
            "report does not bind the offered key");
    st.le_public_key = br.public_key;
    st.bound = true;
    return {};
}

Bytes do_provision_key(CceState& st, ByteView args) {
    require_ready(st);
    require(st.policy.encryption == ledger::StateEncryption::per_chaincode,
            Status::wrong_mode,
            "state key provisioning outside per-chaincode mode");
    require(!st.state_key.has_value(), Status::key_already_provisioned,
            "state key already provisioned");
    crypto::Envelope env = crypto::decode_envelope(args);
    Bytes key = crypto::hybrid_decrypt(st.box_key.secret, env);
    require(key.size() == crypto::kSymKeySize, Status::decryption_failure,
            "provisioned key has wrong size");
    crypto::SymmetricKey sk;
    std::copy(key.begin(), key.end(), sk.bytes.begin());
    st.state_key = sk;
    return {};
}

Bytes do_invoke(tee::EnclaveRuntime& rt, CceState& st,
                cc::ChaincodeProgram& contract, ByteView args) {
    require_ready(st);
    require(st.bound, Status::bind_rejected,
            "invoke before binding to a ledger enclave");
    ledger::TransactionProposal proposal = codec::decode_all(
        args,
        [](codec::ByteReader& r) { return ledger::read_proposal(r); });
    require(proposal.chaincode_id == st.chaincode, Status::config_error,
            "proposal targets chaincode " + proposal.chaincode_id);

    // The client wraps the operation once per endorsing enclave; pick the
    // envelope addressed to this one.
    Bytes op_plain;
    {
        bench::Span span(bench::Category::decrypt_tx);
        auto envelopes = codec::decode_all(
            proposal.operation, [](codec::ByteReader& r) {
                return r.list<crypto::Envelope>([](codec::ByteReader& rr) {
                    return crypto::read_envelope(rr);
                });
            });
        bool opened = false;
        for (const auto& env : envelopes) {
            try {
                op_plain = crypto::hybrid_decrypt(st.box_key.secret, env);
                opened = true;
                break;
            } catch (const Error& e) {
                if (e.status != Status::decryption_failure) throw;
            }
        }
        require(opened, Status::decryption_failure,
                "no operation envelope addressed to this enclave");
    }
    cc::SignedOperation sop = cc::decode_signed_operation(op_plain);
    require(sop.chaincode_id == st.chaincode &&
                sop.client_id == proposal.client_id,
            Status::authentication_failure,
            "signed operation does not match the proposal");
    const ledger::Identity* client = st.config.find_client(sop.client_id);
    require(client != nullptr, Status::authentication_failure,
            "unknown client " + sop.client_id);
    {
        bench::Span span(bench::Category::verify);
        require(crypto::verify(client->public_key,
                               cc::operation_signing_payload(sop),
                               sop.client_signature),
                Status::authentication_failure,
                "client signature rejected");
    }

    std::optional<crypto::SymmetricKey> data_key;
    switch (st.policy.encryption) {
        case ledger::StateEncryption::none:
            break;
        case ledger::StateEncryption::per_chaincode:
            require(st.state_key.has_value(), Status::key_not_provisioned,
                    "state key not provisioned");
            data_key = st.state_key;
            break;
        case ledger::StateEncryption::client_based:
            require(sop.state_key.has_value(), Status::key_not_provisioned,
                    "operation carries no client state key");
            data_key = sop.state_key;
            break;
    }

    crypto::Digest digest = ledger::proposal_digest(proposal);
    VerifiedShim shim(rt, st, data_key, sop.client_id, digest);

    cc::Result result;
    try {
        result.payload = contract.invoke(shim, sop.op);
        result.ok = true;
    } catch (const cc::ChaincodeAppError& e) {
        // Application failure: discard writes, endorse the error. The reads
        // stay in the endorsement so the failure is anchored to the state
        // it was computed on.
        shim.discard_writes();
        result.ok = false;
        result.code = e.code;
        result.payload = to_bytes(e.detail);
    }

    Bytes result_bytes = cc::encode_result(result);
    if (!proposal.result_key.empty())
        result_bytes = crypto::encode_envelope(crypto::hybrid_encrypt(
            proposal.result_key, result_bytes, rt.rng()));

    ledger::Endorsement e;
    e.proposal_digest = digest;
    e.read_set = shim.reads();
    e.write_set = shim.build_write_set();
    e.result = std::move(result_bytes);
    e.endorser_public_key = st.sign_key.public_key;
    {
        bench::Span span(bench::Category::sign);
        e.signature = crypto::sign(st.sign_key.secret,
                                   ledger::endorsement_signing_payload(e));
    }
    codec::ByteWriter w;
    ledger::write_endorsement(w, e);
    return w.take();
}

}  // namespace

Bytes encode_setup_args(const SetupArgs& a) {
    codec::ByteWriter w;
    w.bytes(a.genesis_block);
    w.str(a.chaincode);
    w.str(a.host_peer);
    return w.take();
}

SetupArgs decode_setup_args(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        SetupArgs a;
        a.genesis_block = r.bytes();
        a.chaincode = r.str();
        a.host_peer = r.str();
        return a;
    });
}

Bytes encode_setup_result(const SetupResult& r) {
    codec::ByteWriter w;
    w.bytes(r.signing_public_key);
    w.bytes(r.encryption_public_key);
    tee::write_report(w, r.quote);
    return w.take();
}

SetupResult decode_setup_result(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        SetupResult out;
        out.signing_public_key = r.bytes();
        out.encryption_public_key = r.bytes();
        out.quote = tee::read_report(r);
        return out;
    });
}

Bytes encode_state_value(const StateValue& v) {
    codec::ByteWriter w;
    w.flag(v.present);
    w.bytes(v.value);
    ledger::write_version(w, v.version);
    return w.take();
}

StateValue decode_state_value(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        StateValue v;
        v.present = r.flag();
        v.value = r.bytes();
        v.version = ledger::read_version(r);
        return v;
    });
}

Bytes encode_range_items(const std::vector<RangeItem>& items) {
    codec::ByteWriter w;
    w.list(items, [](codec::ByteWriter& w2, const RangeItem& item) {
        w2.str(item.key);
        w2.bytes(item.value);
        ledger::write_version(w2, item.version);
    });
    return w.take();
}

std::vector<RangeItem> decode_range_items(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        return r.list<RangeItem>([](codec::ByteReader& r2) {
            RangeItem item;
            item.key = r2.str();
            item.value = r2.bytes();
            item.version = ledger::read_version(r2);
            return item;
        });
    });
}

Bytes encrypt_state_value(const crypto::SymmetricKey& key,
                          const std::string& full_key,
                          const crypto::Digest& proposal_digest,
                          ByteView plaintext) {
    codec::ByteWriter seed;
    seed.str("chainclave/state-nonce/v1");
    crypto::write_digest(seed, proposal_digest);
    seed.str(full_key);
    seed.bytes(plaintext);
    crypto::MacTag tag = crypto::mac(key, seed.view());
    crypto::Nonce nonce;
    std::copy(tag.begin(), tag.begin() + nonce.size(), nonce.begin());
    crypto::AeadBox box =
        crypto::aead_encrypt(key, nonce, plaintext, to_bytes(full_key));
    codec::ByteWriter w;
    crypto::write_aead_box(w, box);
    return w.take();
}

Bytes decrypt_state_value(const crypto::SymmetricKey& key,
                          const std::string& full_key, ByteView stored) {
    crypto::AeadBox box = codec::decode_all(
        stored,
        [](codec::ByteReader& r) { return crypto::read_aead_box(r); });
    try {
        return crypto::aead_decrypt(key, box, to_bytes(full_key));
    } catch (const Error&) {
        raise(Status::decryption_failure,
              "state value for " + full_key + " rejected");
    }
}

std::unique_ptr<tee::EnclaveState> ChaincodeEnclaveProgram::create_state()
    const {
    return std::make_unique<CceState>();
}

Bytes ChaincodeEnclaveProgram::handle(tee::EnclaveRuntime& rt,
                                      tee::EnclaveState& state,
                                      const std::string& entry,
                                      ByteView args) {
    CceState& st = as_cce(state);
    if (entry == kSetup) return do_setup(rt, st, args);
    if (entry == kBind) return do_bind(rt, st, args);
    if (entry == kProvisionKey) return do_provision_key(st, args);
    if (entry == kInvoke) return do_invoke(rt, st, *contract_, args);
    if (entry == kSealIdentity) {
        require_ready(st);
        return crypto::encode_sealed_blob(rt.seal(identity_payload(st)));
    }
    if (entry == kRestore) {
        require(!st.setup_done, Status::already_setup,
                "restore on a set-up enclave");
        crypto::SealedBlob blob = crypto::decode_sealed_blob(args);
        Bytes payload = rt.unseal(blob);
        try {
            load_identity_payload(st, payload);
        } catch (const Error&) {
            raise(Status::unseal_authentication_failure,
                  "identity payload malformed");
        }
        return encode_setup_result(keys_of(st));
    }
    if (entry == kPublicKeys) {
        require_ready(st);
        return encode_setup_result(keys_of(st));
    }
    raise(Status::unknown_entry_point, "chaincode enclave: " + entry);
}

tee::EcallResult CceClient::raw(const std::string& entry, ByteView args,
                                tee::HostCallHandler* handler) {
    return host_->ecall(*instance_, entry, args, handler);
}

Bytes CceClient::expect_ok(const std::string& entry, ByteView args,
                           tee::HostCallHandler* handler) {
    tee::EcallResult r = raw(entry, args, handler);
    if (!r.ok()) raise(r.status, r.message);
    return std::move(r.payload);
}

SetupResult CceClient::setup(const ledger::Block& genesis,
                             const std::string& chaincode,
                             const std::string& host_peer) {
    SetupArgs a;
    a.genesis_block = ledger::encode_block(genesis);
    a.chaincode = chaincode;
    a.host_peer = host_peer;
    return decode_setup_result(expect_ok(kSetup, encode_setup_args(a)));
}

void CceClient::bind(const le::BindReport& report) {
    expect_ok(kBind, le::encode_bind_report(report));
}

void CceClient::provision_key(const crypto::Envelope& wrapped_key) {
    expect_ok(kProvisionKey, crypto::encode_envelope(wrapped_key));
}

ledger::Endorsement CceClient::invoke(
    const ledger::TransactionProposal& proposal,
    tee::HostCallHandler* state_access) {
    codec::ByteWriter w;
    ledger::write_proposal(w, proposal);
    Bytes payload = expect_ok(kInvoke, w.view(), state_access);
    return codec::decode_all(payload, [](codec::ByteReader& r) {
        return ledger::read_endorsement(r);
    });
}

crypto::SealedBlob CceClient::seal_identity() {
    return crypto::decode_sealed_blob(expect_ok(kSealIdentity, {}));
}

SetupResult CceClient::restore(const crypto::SealedBlob& blob) {
    return decode_setup_result(
        expect_ok(kRestore, crypto::encode_sealed_blob(blob)));
}

SetupResult CceClient::public_keys() {
    return decode_setup_result(expect_ok(kPublicKeys, {}));
}

namespace {

class PlainShim : public cc::Shim {
  public:
    PlainShim(const ledger::VersionedStore& store, std::string ns,
              std::string caller)
        : store_(store), ns_(std::move(ns)), caller_(std::move(caller)) {}

    std::optional<Bytes> get_state(const std::string& key) override {
        std::string full = ns_ + key;
        auto pending = pending_.find(full);
        if (pending != pending_.end()) return pending->second;
        auto cached = cache_.find(full);
        if (cached != cache_.end()) return cached->second;
        auto entry = store_.get(full);
        std::optional<Bytes> value;
        std::optional<ledger::Version> version;
        if (entry) {
            bench::Span span(bench::Category::get_state);
            value = entry->value;
            version = entry->version;
        }
        reads_.push_back({full, version});
        cache_.emplace(full, value);
        return value;
    }

    void put_state(const std::string& key, ByteView value) override {
        pending_[ns_ + key] = Bytes(value.begin(), value.end());
    }

    std::vector<std::pair<std::string, Bytes>> get_range(
        const std::string& prefix) override {
        bench::Span span(bench::Category::get_state);
        std::vector<std::pair<std::string, Bytes>> out;
        for (auto& [key, entry] : store_.range(ns_ + prefix)) {
            reads_.push_back({key, entry.version});
            cache_[key] = entry.value;
            out.emplace_back(key.substr(ns_.size()), entry.value);
        }
        return out;
    }

    const std::string& caller() const override { return caller_; }

    const ledger::ReadSet& reads() const { return reads_; }
    void discard_writes() { pending_.clear(); }
    ledger::WriteSet build_write_set() const {
        ledger::WriteSet ws;
        for (const auto& [full, value] : pending_) ws.push_back({full, value});
        return ws;
    }

  private:
    const ledger::VersionedStore& store_;
    std::string ns_;
    std::string caller_;
    ledger::ReadSet reads_;
    std::map<std::string, Bytes> pending_;
    std::map<std::string, std::optional<Bytes>> cache_;
};

}  // namespace

ledger::Endorsement PlainChaincodeHost::endorse(
    const ledger::TransactionProposal& proposal,
    const ledger::VersionedStore& store,
    const crypto::SigningKeyPair& peer_key) {
    require(config_ != nullptr, Status::config_error, "plain host: config");
    require(proposal.chaincode_id == contract_->name(), Status::config_error,
            "proposal targets chaincode " + proposal.chaincode_id);
    cc::SignedOperation sop =
        cc::decode_signed_operation(proposal.operation);
    require(sop.chaincode_id == proposal.chaincode_id &&
                sop.client_id == proposal.client_id,
            Status::authentication_failure,
            "signed operation does not match the proposal");
    const ledger::Identity* client = config_->find_client(sop.client_id);
    require(client != nullptr, Status::authentication_failure,
            "unknown client " + sop.client_id);
    {
        bench::Span span(bench::Category::verify);
        require(crypto::verify(client->public_key,
                               cc::operation_signing_payload(sop),
                               sop.client_signature),
                Status::authentication_failure, "client signature rejected");
    }

    PlainShim shim(store, contract_->name() + "/", sop.client_id);
    cc::Result result;
    try {
        result.payload = contract_->invoke(shim, sop.op);
        result.ok = true;
    } catch (const cc::ChaincodeAppError& e) {
        shim.discard_writes();
        result.ok = false;
        result.code = e.code;
        result.payload = to_bytes(e.detail);
    }

    ledger::Endorsement e;
    e.proposal_digest = ledger::proposal_digest(proposal);
    e.read_set = shim.reads();
    e.write_set = shim.build_write_set();
    e.result = cc::encode_result(result);
    e.endorser_public_key = peer_key.public_key;
    {
        bench::Span span(bench::Category::sign);
        e.signature = crypto::sign(peer_key.secret,
                                   ledger::endorsement_signing_payload(e));
    }
    return e;
}

}  // namespace chainclave::cce
