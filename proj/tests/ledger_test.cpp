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
#include "doctest.h"

using namespace chainclave;
namespace lg = chainclave::ledger;

namespace {

/* One-orderer, two-peer world with a single plain chaincode "cc". */
struct World {
    DetRng rng{77};
    crypto::SigningKeyPair orderer_key = crypto::sign_keygen(rng);
    crypto::SigningKeyPair peer_a = crypto::sign_keygen(rng);
    crypto::SigningKeyPair peer_b = crypto::sign_keygen(rng);
    crypto::SigningKeyPair service = crypto::sign_keygen(rng);
    crypto::SigningKeyPair stranger = crypto::sign_keygen(rng);
    lg::GenesisConfig config;
    lg::Block genesis;

    explicit World(uint32_t required = 1) {
        config.orderer_public_key = orderer_key.public_key;
        config.peers = {{"peerA", peer_a.public_key},
                        {"peerB", peer_b.public_key}};
        config.clients = {{"c1", {}}};
        config.ledger_enclave_measurement =
            crypto::sha256(std::string_view("le-prog"));
        config.attestation_service_public_key = service.public_key;
        lg::ChaincodePolicy p;
        p.name = "cc";
        p.required_endorsements = required;
        config.chaincodes.push_back(p);
        genesis = lg::make_genesis(config);
    }

    lg::TransactionProposal proposal(const std::string& tag) {
        lg::TransactionProposal p;
        p.client_id = "c1";
        p.chaincode_id = "cc";
        p.operation = to_bytes(tag);
        p.proposal_nonce = rng.bytes(16);
        return p;
    }

    static lg::Endorsement endorse(const lg::TransactionProposal& p,
                                   lg::ReadSet reads, lg::WriteSet writes,
                                   const crypto::SigningKeyPair& signer,
                                   const std::string& result = "r") {
        lg::Endorsement e;
        e.proposal_digest = lg::proposal_digest(p);
        e.read_set = std::move(reads);
        e.write_set = std::move(writes);
        e.result = to_bytes(result);
        e.endorser_public_key = signer.public_key;
        e.signature = crypto::sign(signer.secret,
                                   lg::endorsement_signing_payload(e));
        return e;
    }

    lg::Transaction tx(const std::string& tag, lg::ReadSet reads,
                       lg::WriteSet writes) {
        lg::Transaction t;
        t.proposal = proposal(tag);
        t.endorsements.push_back(endorse(t.proposal, std::move(reads),
                                         std::move(writes), peer_a));
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

    lg::ValidationContext ctx() const { return {&config, {}}; }
};

}  // namespace

TEST_CASE("make_genesis insists on every required element") {
    World w;
    lg::GenesisConfig c = w.config;
    c.orderer_public_key.clear();
    CHECK_THROWS_AS(lg::make_genesis(c), Error);

    c = w.config;
    c.peers.clear();
    CHECK_THROWS_AS(lg::make_genesis(c), Error);

    c = w.config;
    c.ledger_enclave_measurement = crypto::Digest{};
    CHECK_THROWS_AS(lg::make_genesis(c), Error);

    c = w.config;
    c.attestation_service_public_key.clear();
    CHECK_THROWS_AS(lg::make_genesis(c), Error);

    c = w.config;
    c.chaincodes[0].required_endorsements = 0;
    CHECK_THROWS_AS(lg::make_genesis(c), Error);

    c = w.config;
    lg::ChaincodePolicy enclave_cc;
    enclave_cc.name = "ecc";
    enclave_cc.kind = lg::ChaincodeKind::enclave;
    c.chaincodes.push_back(enclave_cc);  // no expected measurement
    CHECK_THROWS_AS(lg::make_genesis(c), Error);
}

TEST_CASE("orderer cuts signed, hash-chained, bounded blocks") {
    World w;
    lg::Orderer ord(w.orderer_key, w.genesis, 2);
    ord.submit(w.tx("t1", {}, {{"k1", to_bytes("v1")}}));
    ord.submit(w.tx("t2", {}, {{"k2", to_bytes("v2")}}));
    ord.submit(w.tx("t3", {}, {{"k3", to_bytes("v3")}}));

    std::vector<lg::Block> blocks = ord.cut_all();
    REQUIRE(blocks.size() == 2);
    CHECK(blocks[0].transactions.size() == 2);
    CHECK(blocks[1].transactions.size() == 1);
    CHECK(blocks[0].seq == 1);
    CHECK(blocks[1].seq == 2);
    CHECK(blocks[0].prev_hash == lg::block_hash(w.genesis));
    CHECK(blocks[1].prev_hash == lg::block_hash(blocks[0]));
    for (const auto& b : blocks)
        CHECK(crypto::verify(w.orderer_key.public_key,
                             lg::block_signing_payload(b),
                             b.orderer_signature));

    CHECK(ord.pending() == 0);
    CHECK(ord.cut_block() == std::nullopt);
    // Everything emitted is retained, genesis included.
    CHECK(ord.emitted().size() == 3);
    CHECK(ord.emitted().front().seq == 0);
}

TEST_CASE("blocks and proposals encode canonically") {
    World w;
    lg::Orderer ord(w.orderer_key, w.genesis, 4);
    ord.submit(w.tx("t1", {{"r1", lg::Version{1, 0}}, {"gone", std::nullopt}},
                    {{"k1", to_bytes("v1")}}));
    lg::Block b = *ord.cut_block();

    Bytes enc = lg::encode_block(b);
    lg::Block back = lg::decode_block(enc);
    CHECK(lg::encode_block(back) == enc);
    CHECK(lg::block_hash(back) == lg::block_hash(b));

    Bytes trailing = enc;
    trailing.push_back(0);
    CHECK_THROWS_AS(lg::decode_block(trailing), Error);

    lg::TransactionProposal p1 = w.proposal("op");
    lg::TransactionProposal p2 = p1;
    CHECK(lg::proposal_digest(p1) == lg::proposal_digest(p2));
    p2.proposal_nonce = w.rng.bytes(16);
    CHECK(lg::proposal_digest(p1) != lg::proposal_digest(p2));
}

TEST_CASE("validate_block enforces sequence, chain, and orderer signature") {
    World w;
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});

    lg::Block b1 = w.seal(1, lg::block_hash(w.genesis),
                          {w.tx("t1", {}, {{"k", to_bytes("v")}})});
    std::vector<bool> flags = lg::validate_block(store, b1, w.ctx());
    lg::commit_block(store, b1, flags);
    CHECK(store.height() == 1);

    // The same block again: the chain has moved on.
    CHECK_THROWS_AS(lg::validate_block(store, b1, w.ctx()), Error);

    // Sequence continues but the chain hash points elsewhere.
    lg::Block fork = w.seal(2, lg::block_hash(w.genesis), {});
    CHECK_THROWS_WITH_AS(lg::validate_block(store, fork, w.ctx()),
                         doctest::Contains("prev hash"), Error);

    // Right position, wrong signer.
    lg::Block phony = w.seal(2, lg::block_hash(b1), {});
    phony.orderer_signature = crypto::sign(
        w.stranger.secret, lg::block_signing_payload(phony));
    CHECK_THROWS_AS(lg::validate_block(store, phony, w.ctx()), Error);

    // Tampered content under the genuine signature.
    lg::Block bent = w.seal(2, lg::block_hash(b1),
                            {w.tx("t2", {}, {{"k", to_bytes("x")}})});
    bent.transactions[0].endorsements[0].write_set[0].value[0] ^= 0xff;
    CHECK_THROWS_AS(lg::validate_block(store, bent, w.ctx()), Error);

    // Resubmitting genesis is just a stale sequence number.
    CHECK_THROWS_AS(lg::validate_block(store, w.genesis, w.ctx()), Error);
}

TEST_CASE("read versions must match committed state exactly") {
    World w;
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    lg::Block b1 = w.seal(1, lg::block_hash(w.genesis),
                          {w.tx("init", {}, {{"k", to_bytes("v0")}})});
    lg::commit_block(store, b1, lg::validate_block(store, b1, w.ctx()));

    lg::Transaction current =
        w.tx("upd", {{"k", lg::Version{1, 0}}}, {{"k", to_bytes("v1")}});
    lg::Transaction stale =
        w.tx("stale", {{"k", lg::Version{0, 0}}}, {{"k", to_bytes("v2")}});
    lg::Transaction phantom =
        w.tx("phantom", {{"k", std::nullopt}}, {{"k", to_bytes("v3")}});

    lg::Block b2 = w.seal(2, lg::block_hash(b1), {current, stale, phantom});
    std::vector<bool> flags = lg::validate_block(store, b2, w.ctx());
    CHECK(flags == std::vector<bool>{true, false, false});

    lg::commit_block(store, b2, flags);
    CHECK(to_string(store.get("k")->value) == "v1");
    CHECK(store.get("k")->version == lg::Version{2, 0});
}

TEST_CASE("an earlier valid transaction invalidates later readers in the "
          "same block") {
    World w;
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    lg::Block b1 = w.seal(1, lg::block_hash(w.genesis),
                          {w.tx("init", {}, {{"k", to_bytes("v0")}})});
    lg::commit_block(store, b1, lg::validate_block(store, b1, w.ctx()));

    lg::Transaction writer =
        w.tx("w", {{"k", lg::Version{1, 0}}}, {{"k", to_bytes("a")}});
    lg::Transaction reader =
        w.tx("r", {{"k", lg::Version{1, 0}}}, {{"other", to_bytes("b")}});

    lg::Block b2 = w.seal(2, lg::block_hash(b1), {writer, reader});
    CHECK(lg::validate_block(store, b2, w.ctx()) ==
          std::vector<bool>{true, false});

    // Reversed order, the reader sees the committed version and both pass.
    lg::Block alt = w.seal(2, lg::block_hash(b1), {reader, writer});
    CHECK(lg::validate_block(store, alt, w.ctx()) ==
          std::vector<bool>{true, true});
}

TEST_CASE("duplicate proposals are refused within and across blocks") {
    World w;
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});

    lg::Transaction t = w.tx("once", {}, {{"k", to_bytes("v")}});
    lg::Block b1 = w.seal(1, lg::block_hash(w.genesis), {t, t});
    std::vector<bool> flags = lg::validate_block(store, b1, w.ctx());
    CHECK(flags == std::vector<bool>{true, false});
    lg::commit_block(store, b1, flags);
    CHECK(store.seen_proposal(lg::proposal_digest(t.proposal)));

    lg::Block b2 = w.seal(2, lg::block_hash(b1), {t});
    CHECK(lg::validate_block(store, b2, w.ctx()) ==
          std::vector<bool>{false});
}

TEST_CASE("endorsements must agree on digest and read/write sets") {
    World w;
    lg::Transaction t;
    t.proposal = w.proposal("op");
    t.endorsements.push_back(World::endorse(
        t.proposal, {}, {{"k", to_bytes("v")}}, w.peer_a));
    t.endorsements.push_back(World::endorse(
        t.proposal, {}, {{"k", to_bytes("DIFFERENT")}}, w.peer_b));

    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    lg::Block b = w.seal(1, lg::block_hash(w.genesis), {t});
    CHECK(lg::validate_block(store, b, w.ctx()) ==
          std::vector<bool>{false});

    // No endorsements at all.
    lg::Transaction bare;
    bare.proposal = w.proposal("bare");
    lg::Block b2 = w.seal(1, lg::block_hash(w.genesis), {bare});
    CHECK(lg::validate_block(store, b2, w.ctx()) ==
          std::vector<bool>{false});
}

TEST_CASE("results may differ per endorser without breaking consistency") {
    World w(2);
    lg::Transaction t;
    t.proposal = w.proposal("op");
    t.endorsements.push_back(World::endorse(
        t.proposal, {}, {{"k", to_bytes("v")}}, w.peer_a, "result-for-a"));
    t.endorsements.push_back(World::endorse(
        t.proposal, {}, {{"k", to_bytes("v")}}, w.peer_b, "result-for-b"));

    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    lg::Block b = w.seal(1, lg::block_hash(w.genesis), {t});
    CHECK(lg::validate_block(store, b, w.ctx()) == std::vector<bool>{true});
}

TEST_CASE("plain endorsement policy counts distinct verified peers") {
    World w(2);
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    crypto::Digest prev = lg::block_hash(w.genesis);

    // One peer endorsing twice is still one peer.
    lg::Transaction twice;
    twice.proposal = w.proposal("twice");
    twice.endorsements.push_back(
        World::endorse(twice.proposal, {}, {{"k", to_bytes("v")}}, w.peer_a));
    twice.endorsements.push_back(
        World::endorse(twice.proposal, {}, {{"k", to_bytes("v")}}, w.peer_a));

    // A stranger's endorsement does not count toward the quorum.
    lg::Transaction outsider;
    outsider.proposal = w.proposal("outsider");
    outsider.endorsements.push_back(World::endorse(
        outsider.proposal, {}, {{"k", to_bytes("v")}}, w.peer_a));
    outsider.endorsements.push_back(World::endorse(
        outsider.proposal, {}, {{"k", to_bytes("v")}}, w.stranger));

    // A broken signature does not count either.
    lg::Transaction broken;
    broken.proposal = w.proposal("broken");
    broken.endorsements.push_back(World::endorse(
        broken.proposal, {}, {{"k", to_bytes("v")}}, w.peer_a));
    broken.endorsements.push_back(World::endorse(
        broken.proposal, {}, {{"k", to_bytes("v")}}, w.peer_b));
    broken.endorsements[1].signature[0] ^= 1;

    // Two distinct verified peers meet the quorum.
    lg::Transaction quorum;
    quorum.proposal = w.proposal("quorum");
    quorum.endorsements.push_back(World::endorse(
        quorum.proposal, {}, {{"k", to_bytes("v")}}, w.peer_a));
    quorum.endorsements.push_back(World::endorse(
        quorum.proposal, {}, {{"k", to_bytes("v")}}, w.peer_b));

    lg::Block b = w.seal(1, prev, {twice, outsider, broken, quorum});
    CHECK(lg::validate_block(store, b, w.ctx()) ==
          std::vector<bool>{false, false, false, true});
}

TEST_CASE("unknown chaincode ids never validate") {
    World w;
    lg::Transaction t = w.tx("op", {}, {{"k", to_bytes("v")}});
    t.proposal.chaincode_id = "nonesuch";
    t.endorsements[0] = World::endorse(t.proposal, {},
                                       {{"k", to_bytes("v")}}, w.peer_a);
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    lg::Block b = w.seal(1, lg::block_hash(w.genesis), {t});
    CHECK(lg::validate_block(store, b, w.ctx()) ==
          std::vector<bool>{false});
}

TEST_CASE("commit applies only flagged writes and advances the chain") {
    World w;
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    CHECK(store.height() == 0);
    crypto::Digest empty_state = store.state_hash();

    lg::Transaction good = w.tx("good", {}, {{"a/1", to_bytes("x")}});
    lg::Transaction bad = w.tx("bad", {{"a/1", lg::Version{9, 9}}},
                               {{"a/2", to_bytes("y")}});
    lg::Block b1 = w.seal(1, lg::block_hash(w.genesis), {good, bad});
    std::vector<bool> flags = lg::validate_block(store, b1, w.ctx());
    CHECK(flags == std::vector<bool>{true, false});
    lg::commit_block(store, b1, flags);

    CHECK(store.height() == 1);
    CHECK(store.last_block_hash() == lg::block_hash(b1));
    CHECK(store.get("a/1").has_value());
    CHECK_FALSE(store.get("a/2").has_value());
    CHECK(store.state_hash() != empty_state);

    // Same blocks, same state hash on an independent store.
    lg::VersionedStore other;
    lg::commit_block(other, w.genesis, {});
    lg::commit_block(other, b1, flags);
    CHECK(other.state_hash() == store.state_hash());
}

TEST_CASE("range returns exactly the prefixed keys in order") {
    World w;
    lg::VersionedStore store;
    lg::commit_block(store, w.genesis, {});
    lg::Transaction t = w.tx("setup", {},
                             {{"a/1", to_bytes("1")},
                              {"a/2", to_bytes("2")},
                              {"b/1", to_bytes("3")}});
    lg::Block b = w.seal(1, lg::block_hash(w.genesis), {t});
    lg::commit_block(store, b, lg::validate_block(store, b, w.ctx()));

    auto hits = store.range("a/");
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].first == "a/1");
    CHECK(hits[1].first == "a/2");
    CHECK(store.range("c/").empty());
    CHECK(store.range("").size() == 3);
}
