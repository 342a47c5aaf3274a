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

#include "chainclave/ledger_enclave.hpp"

#include "chainclave/faults.hpp"
#include "chainclave/registry.hpp"

namespace chainclave::le {

namespace {

struct MetaValue {
    crypto::Digest value_hash{};
    ledger::Version version;
};

struct LeState : tee::EnclaveState {
    bool initialized = false;
    crypto::SigningKeyPair identity;
    ledger::GenesisConfig config;
    crypto::Digest genesis_hash{};
    uint64_t last_seq = 0;
    crypto::Digest last_hash{};
    std::map<std::string, MetaValue> meta;
    std::map<std::string, Bytes> registry_values;
    std::set<crypto::Digest> committed_proposals;
    std::optional<Bytes> pending_transfer_nonce;
};

LeState& as_le(tee::EnclaveState& s) { return static_cast<LeState&>(s); }

const std::string kRegistryPrefix =
    std::string(registry::kChaincodeName) + "/";

void require_initialized(const LeState& st) {
    require(st.initialized, Status::not_initialized,
            "ledger enclave not initialized");
}

void write_meta_entry(codec::ByteWriter& w, const MetaEntry& e) {
    w.str(e.key);
    w.opt(e.value_hash, [](codec::ByteWriter& w2, const crypto::Digest& d) {
        crypto::write_digest(w2, d);
    });
}

MetaEntry read_meta_entry(codec::ByteReader& r) {
    MetaEntry e;
    e.key = r.str();
    e.value_hash = r.opt<crypto::Digest>(
        [](codec::ByteReader& r2) { return crypto::read_digest(r2); });
    return e;
}

Bytes state_snapshot_payload(const LeState& st) {
    codec::ByteWriter w;
    w.bytes(st.identity.secret);
    w.bytes(st.identity.public_key);
    w.bytes(ledger::encode_genesis_config(st.config));
    crypto::write_digest(w, st.genesis_hash);
    w.u64(st.last_seq);
    crypto::write_digest(w, st.last_hash);
    w.u32(static_cast<uint32_t>(st.meta.size()));
    for (const auto& [key, mv] : st.meta) {
        w.str(key);
        crypto::write_digest(w, mv.value_hash);
        ledger::write_version(w, mv.version);
    }
    w.u32(static_cast<uint32_t>(st.registry_values.size()));
    for (const auto& [key, value] : st.registry_values) {
        w.str(key);
        w.bytes(value);
    }
    w.u32(static_cast<uint32_t>(st.committed_proposals.size()));
    for (const auto& d : st.committed_proposals) crypto::write_digest(w, d);
    return w.take();
}

void load_snapshot_payload(LeState& st, ByteView payload) {
    codec::ByteReader r(payload);
    st.identity.secret = r.bytes();
    st.identity.public_key = r.bytes();
    st.config = ledger::decode_genesis_config(r.bytes());
    st.genesis_hash = crypto::read_digest(r);
    st.last_seq = r.u64();
    st.last_hash = crypto::read_digest(r);
    uint32_t n_meta = r.u32();
    st.meta.clear();
    for (uint32_t i = 0; i < n_meta; ++i) {
        std::string key = r.str();
        MetaValue mv;
        mv.value_hash = crypto::read_digest(r);
        mv.version = ledger::read_version(r);
        st.meta.emplace(std::move(key), mv);
    }
    uint32_t n_reg = r.u32();
    st.registry_values.clear();
    for (uint32_t i = 0; i < n_reg; ++i) {
        std::string key = r.str();
        st.registry_values.emplace(std::move(key), r.bytes());
    }
    uint32_t n_prop = r.u32();
    st.committed_proposals.clear();
    for (uint32_t i = 0; i < n_prop; ++i)
        st.committed_proposals.insert(crypto::read_digest(r));
    r.expect_done();
    st.initialized = true;
}

LedgerSummary summary_of(const LeState& st) {
    LedgerSummary s;
    s.last_block_seq = st.last_seq;
    s.last_block_hash = st.last_hash;
    s.genesis_hash = st.genesis_hash;
    s.public_key = st.identity.public_key;
    return s;
}

ledger::ValidationHooks metadata_hooks(const LeState& st) {
    ledger::ValidationHooks hooks;
    hooks.version_of =
        [&st](const std::string& key) -> std::optional<ledger::Version> {
        auto it = st.meta.find(key);
        if (it == st.meta.end()) return std::nullopt;
        return it->second.version;
    };
    hooks.seen_proposal = [&st](const crypto::Digest& d) {
        return st.committed_proposals.count(d) > 0;
    };
    hooks.enclave_policy = [&st](const ledger::Transaction& tx,
                                 const ledger::ChaincodePolicy& policy) {
        registry::RegistryLookup lookup =
            [&st](const std::string& key) -> std::optional<Bytes> {
            auto it = st.registry_values.find(key);
            if (it == st.registry_values.end()) return std::nullopt;
            return it->second;
        };
        return registry::enclave_endorsements_valid(tx, policy, st.config,
                                                    lookup);
    };
    return hooks;
}

Bytes do_init(tee::EnclaveRuntime& rt, LeState& st, ByteView args) {
    require(!st.initialized, Status::already_initialized,
            "ledger enclave already initialized");
    ledger::Block genesis;
    ledger::GenesisConfig config;
    try {
        genesis = ledger::decode_block(args);
        require(genesis.seq == 0 && genesis.transactions.empty() &&
                    genesis.orderer_signature.empty(),
                Status::malformed_genesis, "not a genesis block");
        config = ledger::decode_genesis_config(genesis.config);
    } catch (const Error& e) {
        raise(Status::malformed_genesis,
              std::string("genesis rejected: ") + e.what());
    }
    require(config.ledger_enclave_measurement == rt.measurement(),
            Status::measurement_mismatch,
            "genesis names a different ledger enclave");
    st.identity = crypto::sign_keygen(rt.rng());
    st.config = std::move(config);
    st.genesis_hash = ledger::block_hash(genesis);
    st.last_seq = 0;
    st.last_hash = st.genesis_hash;
    st.initialized = true;
    return st.identity.public_key;
}

Bytes do_process_block(LeState& st, ByteView args) {
    require_initialized(st);
    ledger::Block b = ledger::decode_block(args);
    if (!faults().disable_sequence_check) {
        require(b.seq == st.last_seq + 1, Status::sequence_gap,
                "ledger enclave expected seq " +
                    std::to_string(st.last_seq + 1) + ", got " +
                    std::to_string(b.seq));
        require(b.prev_hash == st.last_hash, Status::hash_chain_break,
                "ledger enclave: prev hash mismatch at seq " +
                    std::to_string(b.seq));
    }
    require(crypto::verify(st.config.orderer_public_key,
                           ledger::block_signing_payload(b),
                           b.orderer_signature),
            Status::bad_orderer_signature,
            "ledger enclave: orderer signature at seq " +
                std::to_string(b.seq));

    std::vector<bool> flags =
        ledger::validate_transactions(b, st.config, metadata_hooks(st));

    for (size_t i = 0; i < b.transactions.size(); ++i) {
        const ledger::Transaction& tx = b.transactions[i];
        st.committed_proposals.insert(ledger::proposal_digest(tx.proposal));
        if (!flags[i]) continue;
        ledger::Version version{b.seq, static_cast<uint32_t>(i)};
        for (const auto& wr : tx.endorsements.front().write_set) {
            st.meta[wr.key] =
                MetaValue{crypto::sha256(wr.value), version};
            if (wr.key.compare(0, kRegistryPrefix.size(), kRegistryPrefix) ==
                0)
                st.registry_values[wr.key] = wr.value;
        }
    }
    st.last_seq = b.seq;
    st.last_hash = ledger::block_hash(b);

    codec::ByteWriter w;
    w.list(flags, [](codec::ByteWriter& w2, bool f) { w2.flag(f); });
    return w.take();
}

Bytes do_get_meta(LeState& st, ByteView args) {
    require_initialized(st);
    MetaRequest req = decode_meta_request(args);
    MetaResponse resp;
    resp.nonce = req.nonce;
    resp.last_block_seq = st.last_seq;
    for (const auto& key : req.keys) {
        MetaEntry e;
        e.key = key;
        auto it = st.meta.find(key);
        if (it != st.meta.end()) e.value_hash = it->second.value_hash;
        resp.entries.push_back(std::move(e));
    }
    resp.signature = crypto::sign(st.identity.secret,
                                  meta_response_signing_payload(resp));
    return encode_meta_response(resp);
}

Bytes do_bind_report(tee::EnclaveRuntime& rt, LeState& st) {
    require_initialized(st);
    BindReport br;
    br.public_key = st.identity.public_key;
    br.report = rt.local_report(tee::report_data_from_digest(
        crypto::sha256(br.public_key)));
    return encode_bind_report(br);
}

Bytes do_transfer_request(tee::EnclaveRuntime& rt, LeState& st) {
    require_initialized(st);
    TransferRequest req;
    req.nonce = rt.rng().bytes(16);
    req.genesis_hash = st.genesis_hash;
    req.from_seq = st.last_seq;
    st.pending_transfer_nonce = req.nonce;
    return encode_transfer_request(req);
}

Bytes do_transfer_serve(tee::EnclaveRuntime& rt, LeState& st,
                        ByteView args) {
    require_initialized(st);
    TransferRequest req = decode_transfer_request(args);
    require(req.genesis_hash == st.genesis_hash, Status::foreign_blockchain,
            "transfer request from another blockchain");
    require(req.from_seq < st.last_seq, Status::stale_delta,
            "nothing newer than seq " + std::to_string(req.from_seq));

    TransferDelta delta;
    delta.genesis_hash = st.genesis_hash;
    delta.provider_public_key = st.identity.public_key;
    delta.nonce = req.nonce;
    delta.from_seq = req.from_seq;
    delta.to_seq = st.last_seq;
    delta.to_block_hash = st.last_hash;
    for (const auto& [key, mv] : st.meta) {
        if (mv.version.block_seq <= req.from_seq) continue;
        DeltaEntry e;
        e.key = key;
        e.value_hash = mv.value_hash;
        e.version = mv.version;
        auto rv = st.registry_values.find(key);
        if (rv != st.registry_values.end()) e.registry_value = rv->second;
        delta.entries.push_back(std::move(e));
    }
    delta.committed_proposals.assign(st.committed_proposals.begin(),
                                     st.committed_proposals.end());

    TransferOffer offer;
    offer.delta = encode_transfer_delta(delta);
    offer.signature = crypto::sign(st.identity.secret, offer.delta);
    offer.report = rt.quote(tee::report_data_from_digest(
        crypto::sha256(st.identity.public_key)));
    return encode_transfer_offer(offer);
}

Bytes do_transfer_apply(tee::EnclaveRuntime& rt, LeState& st,
                        ByteView args) {
    require_initialized(st);
    TransferOffer offer = decode_transfer_offer(args);
    TransferDelta delta = decode_transfer_delta(offer.delta);

    require(delta.genesis_hash == st.genesis_hash, Status::foreign_blockchain,
            "delta from another blockchain");
    require(st.pending_transfer_nonce &&
                delta.nonce == *st.pending_transfer_nonce,
            Status::stale_delta, "delta does not answer our challenge");
    require(delta.from_seq == st.last_seq && delta.to_seq > st.last_seq,
            Status::stale_delta,
            "delta base " + std::to_string(delta.from_seq) +
                " does not advance seq " + std::to_string(st.last_seq));

    // Channel evidence: the delta must be signed by a key that a genuine
    // ledger enclave of the same code proved via remote attestation.
    require(offer.verdict.has_value(), Status::invalid_attestation,
            "transfer offer lacks a verdict");
    require(offer.report.form == tee::ReportForm::remote &&
                tee::verdict_check(*offer.verdict,
                                   tee::report_digest(offer.report),
                                   st.config.attestation_service_public_key),
            Status::invalid_attestation, "transfer attestation rejected");
    require(offer.report.measurement == rt.measurement(),
            Status::measurement_mismatch,
            "transfer offer from a different program");
    require(offer.report.report_data ==
                tee::report_data_from_digest(
                    crypto::sha256(delta.provider_public_key)),
            Status::report_data_mismatch,
            "transfer report does not bind the provider key");
    for (const auto& e : delta.entries)
        require(!e.registry_value ||
                    crypto::sha256(*e.registry_value) == e.value_hash,
                Status::value_hash_mismatch,
                "delta value for " + e.key + " does not match its hash");
    require(crypto::verify(delta.provider_public_key, offer.delta,
                           offer.signature),
            Status::invalid_attestation, "transfer delta signature");

    for (const auto& e : delta.entries) {
        st.meta[e.key] = MetaValue{e.value_hash, e.version};
        if (e.registry_value) st.registry_values[e.key] = *e.registry_value;
    }
    for (const auto& d : delta.committed_proposals)
        st.committed_proposals.insert(d);
    st.last_seq = delta.to_seq;
    st.last_hash = delta.to_block_hash;
    st.pending_transfer_nonce.reset();
    return encode_summary(summary_of(st));
}

}  // namespace

Bytes encode_meta_request(const MetaRequest& m) {
    codec::ByteWriter w;
    w.bytes(m.nonce);
    w.list(m.keys,
           [](codec::ByteWriter& w2, const std::string& k) { w2.str(k); });
    return w.take();
}

MetaRequest decode_meta_request(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        MetaRequest m;
        m.nonce = r.bytes();
        m.keys = r.list<std::string>(
            [](codec::ByteReader& r2) { return r2.str(); });
        return m;
    });
}

Bytes meta_response_signing_payload(const MetaResponse& m) {
    codec::ByteWriter w;
    w.str("chainclave/meta/v1");
    w.bytes(m.nonce);
    w.u64(m.last_block_seq);
    w.list(m.entries, [](codec::ByteWriter& w2, const MetaEntry& e) {
        write_meta_entry(w2, e);
    });
    return w.take();
}

Bytes encode_meta_response(const MetaResponse& m) {
    codec::ByteWriter w;
    w.bytes(m.nonce);
    w.u64(m.last_block_seq);
    w.list(m.entries, [](codec::ByteWriter& w2, const MetaEntry& e) {
        write_meta_entry(w2, e);
    });
    w.bytes(m.signature);
    return w.take();
}

MetaResponse decode_meta_response(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        MetaResponse m;
        m.nonce = r.bytes();
        m.last_block_seq = r.u64();
        m.entries = r.list<MetaEntry>(
            [](codec::ByteReader& r2) { return read_meta_entry(r2); });
        m.signature = r.bytes();
        return m;
    });
}

Bytes encode_summary(const LedgerSummary& s) {
    codec::ByteWriter w;
    w.u64(s.last_block_seq);
    crypto::write_digest(w, s.last_block_hash);
    crypto::write_digest(w, s.genesis_hash);
    w.bytes(s.public_key);
    return w.take();
}

LedgerSummary decode_summary(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        LedgerSummary s;
        s.last_block_seq = r.u64();
        s.last_block_hash = crypto::read_digest(r);
        s.genesis_hash = crypto::read_digest(r);
        s.public_key = r.bytes();
        return s;
    });
}

Bytes encode_bind_report(const BindReport& b) {
    codec::ByteWriter w;
    tee::write_report(w, b.report);
    w.bytes(b.public_key);
    return w.take();
}

BindReport decode_bind_report(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        BindReport out;
        out.report = tee::read_report(r);
        out.public_key = r.bytes();
        return out;
    });
}

Bytes encode_transfer_request(const TransferRequest& t) {
    codec::ByteWriter w;
    w.bytes(t.nonce);
    crypto::write_digest(w, t.genesis_hash);
    w.u64(t.from_seq);
    return w.take();
}

TransferRequest decode_transfer_request(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        TransferRequest t;
        t.nonce = r.bytes();
        t.genesis_hash = crypto::read_digest(r);
        t.from_seq = r.u64();
        return t;
    });
}

Bytes encode_transfer_delta(const TransferDelta& d) {
    codec::ByteWriter w;
    crypto::write_digest(w, d.genesis_hash);
    w.bytes(d.provider_public_key);
    w.bytes(d.nonce);
    w.u64(d.from_seq);
    w.u64(d.to_seq);
    crypto::write_digest(w, d.to_block_hash);
    w.list(d.entries, [](codec::ByteWriter& w2, const DeltaEntry& e) {
        w2.str(e.key);
        crypto::write_digest(w2, e.value_hash);
        ledger::write_version(w2, e.version);
        w2.opt(e.registry_value,
               [](codec::ByteWriter& w3, const Bytes& v) { w3.bytes(v); });
    });
    w.list(d.committed_proposals,
           [](codec::ByteWriter& w2, const crypto::Digest& dg) {
               crypto::write_digest(w2, dg);
           });
    return w.take();
}

TransferDelta decode_transfer_delta(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        TransferDelta d;
        d.genesis_hash = crypto::read_digest(r);
        d.provider_public_key = r.bytes();
        d.nonce = r.bytes();
        d.from_seq = r.u64();
        d.to_seq = r.u64();
        d.to_block_hash = crypto::read_digest(r);
        d.entries = r.list<DeltaEntry>([](codec::ByteReader& r2) {
            DeltaEntry e;
            e.key = r2.str();
            e.value_hash = crypto::read_digest(r2);
            e.version = ledger::read_version(r2);
            e.registry_value = r2.opt<Bytes>(
                [](codec::ByteReader& r3) { return r3.bytes(); });
            return e;
        });
        d.committed_proposals = r.list<crypto::Digest>(
            [](codec::ByteReader& r2) { return crypto::read_digest(r2); });
        return d;
    });
}

Bytes encode_transfer_offer(const TransferOffer& o) {
    codec::ByteWriter w;
    w.bytes(o.delta);
    w.bytes(o.signature);
    tee::write_report(w, o.report);
    w.opt(o.verdict,
          [](codec::ByteWriter& w2, const tee::AttestationVerdict& v) {
              tee::write_verdict(w2, v);
          });
    return w.take();
}

TransferOffer decode_transfer_offer(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        TransferOffer o;
        o.delta = r.bytes();
        o.signature = r.bytes();
        o.report = tee::read_report(r);
        o.verdict = r.opt<tee::AttestationVerdict>(
            [](codec::ByteReader& r2) { return tee::read_verdict(r2); });
        return o;
    });
}

std::unique_ptr<tee::EnclaveState> LedgerEnclaveProgram::create_state()
    const {
    return std::make_unique<LeState>();
}

Bytes LedgerEnclaveProgram::handle(tee::EnclaveRuntime& rt,
                                   tee::EnclaveState& state,
                                   const std::string& entry, ByteView args) {
    LeState& st = as_le(state);
    if (entry == kInit) return do_init(rt, st, args);
    if (entry == kProcessBlock) return do_process_block(st, args);
    if (entry == kGetMeta) return do_get_meta(st, args);
    if (entry == kSnapshot) {
        require_initialized(st);
        return crypto::encode_sealed_blob(rt.seal(state_snapshot_payload(st)));
    }
    if (entry == kRestore) {
        require(!st.initialized, Status::already_initialized,
                "restore on an initialized enclave");
        crypto::SealedBlob blob = crypto::decode_sealed_blob(args);
        Bytes payload = rt.unseal(blob);
        try {
            load_snapshot_payload(st, payload);
        } catch (const Error&) {
            raise(Status::unseal_authentication_failure,
                  "snapshot payload malformed");
        }
        return encode_summary(summary_of(st));
    }
    if (entry == kSummary) {
        require_initialized(st);
        return encode_summary(summary_of(st));
    }
    if (entry == kBindReport) return do_bind_report(rt, st);
    if (entry == kTransferRequest) return do_transfer_request(rt, st);
    if (entry == kTransferServe) return do_transfer_serve(rt, st, args);
    if (entry == kTransferApply) return do_transfer_apply(rt, st, args);
    raise(Status::unknown_entry_point, "ledger enclave: " + entry);
}

tee::EcallResult LedgerEnclaveClient::raw(const std::string& entry,
                                          ByteView args) {
    return host_->ecall(*instance_, entry, args);
}

Bytes LedgerEnclaveClient::expect_ok(const std::string& entry,
                                     ByteView args) {
    tee::EcallResult r = raw(entry, args);
    if (!r.ok()) raise(r.status, r.message);
    return std::move(r.payload);
}

Bytes LedgerEnclaveClient::init(const ledger::Block& genesis) {
    return expect_ok(kInit, ledger::encode_block(genesis));
}

std::vector<bool> LedgerEnclaveClient::process_block(const ledger::Block& b) {
    Bytes payload = expect_ok(kProcessBlock, ledger::encode_block(b));
    return codec::decode_all(payload, [](codec::ByteReader& r) {
        return r.list<bool>(
            [](codec::ByteReader& r2) { return r2.flag(); });
    });
}

MetaResponse LedgerEnclaveClient::get_meta(const MetaRequest& req) {
    return decode_meta_response(
        expect_ok(kGetMeta, encode_meta_request(req)));
}

crypto::SealedBlob LedgerEnclaveClient::snapshot() {
    return crypto::decode_sealed_blob(expect_ok(kSnapshot, {}));
}

LedgerSummary LedgerEnclaveClient::restore(const crypto::SealedBlob& blob) {
    return decode_summary(
        expect_ok(kRestore, crypto::encode_sealed_blob(blob)));
}

LedgerSummary LedgerEnclaveClient::summary() {
    return decode_summary(expect_ok(kSummary, {}));
}

BindReport LedgerEnclaveClient::bind_report() {
    return decode_bind_report(expect_ok(kBindReport, {}));
}

TransferRequest LedgerEnclaveClient::transfer_request() {
    return decode_transfer_request(expect_ok(kTransferRequest, {}));
}

TransferOffer LedgerEnclaveClient::transfer_serve(
    const TransferRequest& req) {
    return decode_transfer_offer(
        expect_ok(kTransferServe, encode_transfer_request(req)));
}

LedgerSummary LedgerEnclaveClient::transfer_apply(
    const TransferOffer& offer) {
    return decode_summary(
        expect_ok(kTransferApply, encode_transfer_offer(offer)));
}

}  // namespace chainclave::le
