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
#include "chainclave/registry.hpp"
#include "doctest.h"

using namespace chainclave;
namespace lg = chainclave::ledger;

namespace {

/*
 * One-orderer, one-peer chain with the ledger enclave program registered on
 * two certified platforms and one plain chaincode "cc". Blocks are sealed by
 * hand so individual fields can be bent.
 */
struct Rig {
    DetRng rng{91};
    crypto::SigningKeyPair orderer_key = crypto::sign_keygen(rng);
    crypto::SigningKeyPair peer_key = crypto::sign_keygen(rng);
    crypto::SigningKeyPair service_key = crypto::sign_keygen(rng);
    tee::AttestationService service{service_key};
    tee::TeeHost host{DetRng(92)};
    crypto::Digest le_m;
    lg::GenesisConfig config;
    lg::Block genesis;

    Rig() {
        host.add_platform("plat-a", &service);
        host.add_platform("plat-b", &service);
        le_m = host.register_program(
            std::make_shared<le::LedgerEnclaveProgram>());
        config.orderer_public_key = orderer_key.public_key;
        config.peers = {{"peer0", peer_key.public_key}};
        config.clients = {{"c1", {}}};
        config.ledger_enclave_measurement = le_m;
        config.attestation_service_public_key = service_key.public_key;
        lg::ChaincodePolicy p;
        p.name = "cc";
        p.required_endorsements = 1;
        config.chaincodes.push_back(p);
        genesis = lg::make_genesis(config);
    }

    le::LedgerEnclaveClient spawn(const std::string& plat = "plat-a") {
        return {host, host.create(plat, le_m)};
    }

    le::LedgerEnclaveClient booted(const std::string& plat = "plat-a") {
        le::LedgerEnclaveClient c = spawn(plat);
        c.init(genesis);
        return c;
    }

    lg::Transaction tx(const std::string& tag, lg::ReadSet reads,
                       lg::WriteSet writes) {
        lg::Transaction t;
        t.proposal.client_id = "c1";
        t.proposal.chaincode_id = "cc";
        t.proposal.operation = to_bytes(tag);
        t.proposal.proposal_nonce = rng.bytes(16);
        lg::Endorsement e;
        e.proposal_digest = lg::proposal_digest(t.proposal);
        e.read_set = std::move(reads);
        e.write_set = std::move(writes);
        e.result = to_bytes("r");
        e.endorser_public_key = peer_key.public_key;
        e.signature = crypto::sign(peer_key.secret,
                                   lg::endorsement_signing_payload(e));
        t.endorsements.push_back(std::move(e));
        return t;
    }

    lg::Block seal(uint64_t seq, const crypto::Digest& prev,
                   std::vector<lg::Transaction> txs) {
        lg::Block b;
        b.seq = seq;
        b.prev_hash = prev;
        b.transactions = std::move(txs);
        b.orderer_signature =
            crypto::sign(orderer_key.secret, lg::block_signing_payload(b));
        return b;
    }
};

le::MetaRequest meta_req(Bytes nonce, std::vector<std::string> keys) {
    le::MetaRequest r;
    r.nonce = std::move(nonce);
    r.keys = std::move(keys);
    return r;
}

}  // namespace

TEST_CASE("init issues an identity and pins the chain origin") {
    Rig rig;
    le::LedgerEnclaveClient c = rig.spawn();

    // Nothing works before init.
    CHECK(c.raw(le::kGetMeta, le::encode_meta_request(meta_req({}, {})))
              .status == Status::not_initialized);
    CHECK(c.raw(le::kSummary, {}).status == Status::not_initialized);

    Bytes pk = c.init(rig.genesis);
    le::LedgerSummary s = c.summary();
    CHECK(s.public_key == pk);
    CHECK(s.last_block_seq == 0);
    CHECK(s.genesis_hash == lg::block_hash(rig.genesis));
    CHECK(s.last_block_hash == s.genesis_hash);

    CHECK(c.raw(le::kInit, lg::encode_block(rig.genesis)).status ==
          Status::already_initialized);

    // A sibling on the same platform gets its own key.
    le::LedgerEnclaveClient d = rig.spawn();
    CHECK(d.init(rig.genesis) != pk);
}

TEST_CASE("init screens the genesis block") {
    Rig rig;

    lg::Block bent = rig.genesis;
    bent.seq = 1;
    CHECK(rig.spawn().raw(le::kInit, lg::encode_block(bent)).status ==
          Status::malformed_genesis);

    bent = rig.genesis;
    bent.transactions.push_back(rig.tx("t", {}, {{"k", to_bytes("v")}}));
    CHECK(rig.spawn().raw(le::kInit, lg::encode_block(bent)).status ==
          Status::malformed_genesis);

    bent = rig.genesis;
    bent.orderer_signature = to_bytes("sig");
    CHECK(rig.spawn().raw(le::kInit, lg::encode_block(bent)).status ==
          Status::malformed_genesis);

    CHECK(rig.spawn().raw(le::kInit, to_bytes("not a block")).status ==
          Status::malformed_genesis);

    // A genesis naming some other program is not for this enclave.
    lg::GenesisConfig other = rig.config;
    other.ledger_enclave_measurement =
        crypto::sha256(std::string_view("someone else"));
    CHECK(rig.spawn()
              .raw(le::kInit, lg::encode_block(lg::make_genesis(other)))
              .status == Status::measurement_mismatch);
}

TEST_CASE("the block stream is gated by sequence, chain hash, and orderer "
          "signature") {
    Rig rig;
    le::LedgerEnclaveClient c = rig.booted();
    crypto::Digest g = lg::block_hash(rig.genesis);

    lg::Block b1 = rig.seal(1, g, {rig.tx("t1", {}, {{"k", to_bytes("v")}})});
    lg::Block b2 = rig.seal(2, lg::block_hash(b1),
                            {rig.tx("t2", {}, {{"k", to_bytes("w")}})});

    auto feed = [&](const lg::Block& b) {
        return c.raw(le::kProcessBlock, lg::encode_block(b)).status;
    };

    CHECK(feed(b2) == Status::sequence_gap);

    lg::Block fork = rig.seal(1, crypto::sha256(std::string_view("fork")),
                              {rig.tx("f", {}, {})});
    CHECK(feed(fork) == Status::hash_chain_break);

    lg::Block tampered = b1;
    tampered.transactions[0].endorsements[0].write_set[0].value =
        to_bytes("evil");
    CHECK(feed(tampered) == Status::bad_orderer_signature);

    lg::Block unsigned_b = b1;
    unsigned_b.orderer_signature.clear();
    CHECK(feed(unsigned_b) == Status::bad_orderer_signature);

    DetRng other_rng(7);
    crypto::SigningKeyPair stranger = crypto::sign_keygen(other_rng);
    lg::Block stranger_b = b1;
    stranger_b.orderer_signature = crypto::sign(
        stranger.secret, lg::block_signing_payload(stranger_b));
    CHECK(feed(stranger_b) == Status::bad_orderer_signature);

    CHECK(c.process_block(b1) == std::vector<bool>{true});
    CHECK(feed(b1) == Status::sequence_gap);  // replays do not rewind
    CHECK(c.process_block(b2) == std::vector<bool>{true});
    CHECK(c.summary().last_block_seq == 2);
    CHECK(c.summary().last_block_hash == lg::block_hash(b2));
}

TEST_CASE("enclave validation agrees with the peer on every flag") {
    Rig rig;
    le::LedgerEnclaveClient c = rig.booted();
    lg::VersionedStore store;
    lg::commit_block(store, rig.genesis, {});
    lg::ValidationContext ctx{&rig.config, {}};

    lg::Transaction t1 = rig.tx("t1", {}, {{"k1", to_bytes("v1")}});
    lg::Block b1 = rig.seal(1, lg::block_hash(rig.genesis), {t1});

    // Block 2 mixes a current read, a stale read, a duplicate of t1, and an
    // intra-block conflict behind a valid write.
    lg::Transaction fresh =
        rig.tx("fresh", {{"k1", lg::Version{1, 0}}}, {{"k1", to_bytes("v2")}});
    lg::Transaction stale =
        rig.tx("stale", {{"k1", std::nullopt}}, {{"k2", to_bytes("x")}});
    lg::Transaction trailing =
        rig.tx("trail", {{"k1", lg::Version{1, 0}}}, {{"k3", to_bytes("y")}});
    lg::Block b2 =
        rig.seal(2, lg::block_hash(b1), {fresh, stale, t1, trailing});

    for (const lg::Block& b : {b1, b2}) {
        std::vector<bool> peer_flags = lg::validate_block(store, b, ctx);
        std::vector<bool> enclave_flags = c.process_block(b);
        CHECK(enclave_flags == peer_flags);
        lg::commit_block(store, b, peer_flags);
    }
    CHECK(store.get("k1")->value == to_bytes("v2"));
    CHECK_FALSE(store.get("k2").has_value());
    CHECK_FALSE(store.get("k3").has_value());
}

TEST_CASE("metadata answers are nonce-bound, ordered, and signed") {
    Rig rig;
    le::LedgerEnclaveClient c = rig.spawn();
    Bytes pk = c.init(rig.genesis);
    lg::Block b1 = rig.seal(1, lg::block_hash(rig.genesis),
                            {rig.tx("t1", {}, {{"k1", to_bytes("v1")},
                                               {"k2", to_bytes("v2")}})});
    c.process_block(b1);

    Bytes nonce = rig.rng.bytes(16);
    le::MetaResponse resp =
        c.get_meta(meta_req(nonce, {"k2", "missing", "k1"}));
    CHECK(resp.nonce == nonce);
    CHECK(resp.last_block_seq == 1);
    REQUIRE(resp.entries.size() == 3);
    CHECK(resp.entries[0].key == "k2");
    CHECK(resp.entries[0].value_hash == crypto::sha256(to_bytes("v2")));
    CHECK(resp.entries[1].key == "missing");
    CHECK_FALSE(resp.entries[1].value_hash.has_value());
    CHECK(resp.entries[2].key == "k1");
    CHECK(resp.entries[2].value_hash == crypto::sha256(to_bytes("v1")));

    CHECK(crypto::verify(pk, le::meta_response_signing_payload(resp),
                         resp.signature));

    // The signature covers the height and the entries.
    le::MetaResponse bent = resp;
    bent.last_block_seq = 9;
    CHECK_FALSE(crypto::verify(pk, le::meta_response_signing_payload(bent),
                               bent.signature));
    bent = resp;
    bent.entries[1].value_hash = crypto::sha256(to_bytes("forged"));
    CHECK_FALSE(crypto::verify(pk, le::meta_response_signing_payload(bent),
                               bent.signature));

    // Overwrites move the hash along.
    lg::Block b2 = rig.seal(2, lg::block_hash(b1),
                            {rig.tx("t2", {{"k1", lg::Version{1, 0}}},
                                    {{"k1", to_bytes("v9")}})});
    c.process_block(b2);
    le::MetaResponse later = c.get_meta(meta_req(nonce, {"k1"}));
    CHECK(later.last_block_seq == 2);
    CHECK(later.entries[0].value_hash == crypto::sha256(to_bytes("v9")));
}

TEST_CASE("snapshots restore state and identity onto the same platform "
          "only") {
    Rig rig;
    le::LedgerEnclaveClient c = rig.spawn();
    Bytes pk = c.init(rig.genesis);
    lg::Block b1 = rig.seal(1, lg::block_hash(rig.genesis),
                            {rig.tx("t1", {}, {{"k1", to_bytes("v1")}})});
    c.process_block(b1);
    crypto::SealedBlob snap = c.snapshot();
    lg::Block b2 = rig.seal(2, lg::block_hash(b1),
                            {rig.tx("t2", {}, {{"k2", to_bytes("v2")}})});
    c.process_block(b2);

    // Fresh instance resumes from the snapshot and replays the suffix.
    le::LedgerEnclaveClient r = rig.spawn();
    le::LedgerSummary s = r.restore(snap);
    CHECK(s.public_key == pk);
    CHECK(s.last_block_seq == 1);
    CHECK(s.last_block_hash == lg::block_hash(b1));
    CHECK(r.process_block(b2) == std::vector<bool>{true});
    CHECK(r.summary().last_block_hash == c.summary().last_block_hash);

    // Ed25519 is deterministic, so the restored identity answers meta
    // queries with byte-identical signatures.
    Bytes nonce = rig.rng.bytes(16);
    le::MetaResponse a = c.get_meta(meta_req(nonce, {"k1", "k2"}));
    le::MetaResponse b = r.get_meta(meta_req(nonce, {"k1", "k2"}));
    CHECK(a.signature == b.signature);

    CHECK(r.raw(le::kRestore, crypto::encode_sealed_blob(snap)).status ==
          Status::already_initialized);

    crypto::SealedBlob bent = snap;
    bent.box.ciphertext[3] ^= 1;
    CHECK(rig.spawn()
              .raw(le::kRestore, crypto::encode_sealed_blob(bent))
              .status == Status::unseal_authentication_failure);

    CHECK(rig.spawn("plat-b")
              .raw(le::kRestore, crypto::encode_sealed_blob(snap))
              .status == Status::unseal_authentication_failure);
}

TEST_CASE("an old snapshot revives an old prefix, not old randomness") {
    Rig rig;
    le::LedgerEnclaveClient c = rig.spawn();
    c.init(rig.genesis);
    crypto::SealedBlob snap0 = c.snapshot();
    lg::Block b1 = rig.seal(1, lg::block_hash(rig.genesis),
                            {rig.tx("t1", {}, {{"k1", to_bytes("v1")}})});
    std::vector<bool> first = c.process_block(b1);

    le::LedgerEnclaveClient r = rig.spawn();
    r.restore(snap0);
    CHECK(r.summary().last_block_seq == 0);
    // The revived prefix accepts the same suffix again with the same
    // verdicts. That rollback window is inherent in sealing without
    // freshness and it is what probes exercise elsewhere.
    CHECK(r.process_block(b1) == first);
}

TEST_CASE("bind_report ties the ledger key to the measurement") {
    Rig rig;
    le::LedgerEnclaveClient c = rig.spawn();
    Bytes pk = c.init(rig.genesis);
    le::BindReport br = c.bind_report();
    CHECK(br.public_key == pk);
    CHECK(br.report.form == tee::ReportForm::local);
    CHECK(br.report.measurement == rig.le_m);
    CHECK(br.report.report_data ==
          tee::report_data_from_digest(crypto::sha256(pk)));
}

TEST_CASE("state transfer ships metadata, registry values, and duplicate "
          "evidence") {
    Rig rig;
    le::LedgerEnclaveClient a = rig.booted();
    lg::Transaction t1 = rig.tx("t1", {}, {{"ercc/cc2", to_bytes("entry")},
                                           {"plain/k", to_bytes("pv")}});
    lg::Block b1 = rig.seal(1, lg::block_hash(rig.genesis), {t1});
    a.process_block(b1);

    le::LedgerEnclaveClient b = rig.booted("plat-b");
    le::TransferRequest req = b.transfer_request();
    CHECK(req.genesis_hash == lg::block_hash(rig.genesis));
    CHECK(req.from_seq == 0);

    le::TransferOffer offer = a.transfer_serve(req);
    le::TransferDelta delta = le::decode_transfer_delta(offer.delta);
    CHECK(delta.from_seq == 0);
    CHECK(delta.to_seq == 1);
    CHECK(delta.to_block_hash == lg::block_hash(b1));
    REQUIRE(delta.entries.size() == 2);
    for (const le::DeltaEntry& e : delta.entries) {
        if (e.key == "ercc/cc2") {
            REQUIRE(e.registry_value.has_value());
            CHECK(*e.registry_value == to_bytes("entry"));
        } else {
            CHECK(e.key == "plain/k");
            CHECK_FALSE(e.registry_value.has_value());
            CHECK(e.value_hash == crypto::sha256(to_bytes("pv")));
        }
    }
    CHECK(delta.committed_proposals ==
          std::vector<crypto::Digest>{lg::proposal_digest(t1.proposal)});

    // The untrusted host fetches the verdict; the receiver checks offline.
    offer.verdict = rig.service.verify(offer.report);

    // A substituted registry value no longer matches its declared hash.
    le::TransferOffer bent = offer;
    le::TransferDelta bent_delta = le::decode_transfer_delta(offer.delta);
    for (le::DeltaEntry& e : bent_delta.entries)
        if (e.registry_value) *e.registry_value = to_bytes("swapped");
    bent.delta = le::encode_transfer_delta(bent_delta);
    CHECK(b.raw(le::kTransferApply, le::encode_transfer_offer(bent)).status ==
          Status::value_hash_mismatch);

    le::LedgerSummary s = b.transfer_apply(offer);
    CHECK(s.last_block_seq == 1);
    CHECK(s.last_block_hash == lg::block_hash(b1));

    // Replayed proposals arriving later are known to the receiver too.
    lg::Block b2 = rig.seal(2, lg::block_hash(b1), {t1});
    CHECK(b.process_block(b2) == std::vector<bool>{false});

    Bytes nonce = rig.rng.bytes(16);
    le::MetaResponse m = b.get_meta(meta_req(nonce, {"ercc/cc2"}));
    CHECK(m.entries[0].value_hash == crypto::sha256(to_bytes("entry")));
}

TEST_CASE("state transfer refuses stale, foreign, or unattested deltas") {
    Rig rig;
    le::LedgerEnclaveClient a = rig.booted();
    lg::Block b1 = rig.seal(1, lg::block_hash(rig.genesis),
                            {rig.tx("t1", {}, {{"k", to_bytes("v")}})});
    a.process_block(b1);
    le::LedgerEnclaveClient b = rig.booted("plat-b");

    // Serving peers refuse requests they cannot advance.
    le::TransferRequest flat = a.transfer_request();
    CHECK(a.raw(le::kTransferServe, le::encode_transfer_request(flat))
              .status == Status::stale_delta);
    le::TransferRequest foreign = b.transfer_request();
    foreign.genesis_hash = crypto::sha256(std::string_view("elsewhere"));
    CHECK(a.raw(le::kTransferServe, le::encode_transfer_request(foreign))
              .status == Status::foreign_blockchain);

    le::TransferRequest req = b.transfer_request();
    le::TransferOffer offer = a.transfer_serve(req);
    offer.verdict = rig.service.verify(offer.report);

    auto apply_status = [&](const le::TransferOffer& o) {
        return b.raw(le::kTransferApply, le::encode_transfer_offer(o)).status;
    };

    le::TransferOffer bent = offer;
    bent.verdict.reset();
    CHECK(apply_status(bent) == Status::invalid_attestation);

    // A verdict for some other report does not transfer.
    bent = offer;
    tee::AttestationReport other = offer.report;
    other.report_data[0] ^= 1;
    bent.verdict = rig.service.verify(other);
    CHECK(apply_status(bent) == Status::invalid_attestation);

    // Rewriting the delta breaks the provider signature.
    bent = offer;
    le::TransferDelta d = le::decode_transfer_delta(offer.delta);
    d.entries[0].value_hash = crypto::sha256(to_bytes("forged"));
    bent.delta = le::encode_transfer_delta(d);
    CHECK(apply_status(bent) == Status::invalid_attestation);

    // Pointing the report at a different key is caught by report data.
    bent = offer;
    d = le::decode_transfer_delta(offer.delta);
    DetRng rng2(5);
    d.provider_public_key = crypto::sign_keygen(rng2).public_key;
    bent.delta = le::encode_transfer_delta(d);
    CHECK(apply_status(bent) == Status::report_data_mismatch);

    bent = offer;
    d = le::decode_transfer_delta(offer.delta);
    d.genesis_hash = crypto::sha256(std::string_view("elsewhere"));
    bent.delta = le::encode_transfer_delta(d);
    CHECK(apply_status(bent) == Status::foreign_blockchain);

    // The first apply wins; the echoed challenge is spent.
    CHECK(b.transfer_apply(offer).last_block_seq == 1);
    CHECK(apply_status(offer) == Status::stale_delta);

    // And a receiver that never asked holds no challenge at all.
    CHECK(rig.booted("plat-b")
              .raw(le::kTransferApply, le::encode_transfer_offer(offer))
              .status == Status::stale_delta);
}
