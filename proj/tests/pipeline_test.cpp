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

#include <algorithm>

#include "chainclave/model.hpp"
#include "chainclave/sim.hpp"
#include "doctest.h"

using namespace chainclave;

namespace {

cc::Operation op(std::string fn, std::vector<std::string> args = {}) {
    cc::Operation o;
    o.function = std::move(fn);
    for (auto& a : args) o.args.push_back(to_bytes(a));
    return o;
}

bool surface_contains(const sim::SimNet& net, const std::string& needle) {
    for (const auto& [label, bytes] : net.public_surfaces()) {
        auto it = std::search(bytes.begin(), bytes.end(), needle.begin(),
                              needle.end());
        if (it != bytes.end()) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("bootstrap registers every chaincode enclave on chain") {
    sim::SimNet net(sim::SimOptions{});
    REQUIRE(net.peer_count() == 3);
    for (size_t i = 0; i < net.peer_count(); ++i) {
        auto entries = net.peer(i).store().range("ercc/");
        CHECK(entries.size() == 3);
        for (auto& [key, entry] : entries) {
            auto reg = registry::decode_registry_entry(entry.value);
            Status reason = Status::ok;
            CHECK(registry::verify_registry_entry(
                reg, "auction", net.cce_measurement(),
                net.config().attestation_service_public_key, &reason));
        }
    }
    // all peers committed identical state
    auto h0 = net.peer(0).store().state_hash();
    CHECK(net.peer(1).store().state_hash() == h0);
    CHECK(net.peer(2).store().state_hash() == h0);
    // one attestation per enclave, during registration
    CHECK(net.service().verify_count() == 3);
}

TEST_CASE("auction round trip with encrypted state and results") {
    sim::SimNet net(sim::SimOptions{});

    auto created = net.run_op("auctioneer", "auction",
                              op("create", {"art1", "a painting"}));
    CHECK(created.valid);
    CHECK(created.text == "ok:art1");

    CHECK(net.run_op("alice", "auction", op("submit", {"art1", "bid:10"}))
              .text == "ok:accepted");
    CHECK(net.run_op("bob", "auction", op("submit", {"art1", "bid:25"}))
              .text == "ok:accepted");
    CHECK(net.run_op("carol", "auction", op("submit", {"art1", "bid:25"}))
              .text == "ok:accepted");

    // bids exist on every peer but never in cleartext
    CHECK(net.peer(0).store().get("auction/art1.alice").has_value());
    CHECK_FALSE(surface_contains(net, "bid:"));

    CHECK(net.run_op("auctioneer", "auction", op("close", {"art1"})).text ==
          "ok:closed");
    // tie at 25 goes to the lexicographically smaller bidder
    auto eval = net.run_op("auctioneer", "auction", op("evaluate", {"art1"}));
    CHECK(eval.text == "ok:winner=bob amount=25");

    // second evaluation is refused by the barrier state machine
    CHECK(net.run_op("auctioneer", "auction", op("evaluate", {"art1"}))
              .text == "err:AlreadyEvaluated");
}

TEST_CASE("pipeline outcomes match the reference model") {
    sim::SimNet net(sim::SimOptions{});
    std::vector<model::ClientOp> script = {
        {"auctioneer", "create", {"art1", "desc"}},
        {"alice", "submit", {"art1", "bid:7"}},
        {"bob", "submit", {"art1", "bid:7"}},
        {"alice", "submit", {"art1", "bid:9"}},
        {"mallory", "close", {"art1"}},       // not the auctioneer
        {"auctioneer", "close", {"art1"}},
        {"bob", "submit", {"art1", "bid:99"}},  // after the barrier
        {"auctioneer", "evaluate", {"art1"}},
    };
    model::AuctionModel m;
    for (const auto& step : script) {
        auto expected = model::apply(m, step);
        std::vector<std::string> args = step.args;
        auto got = net.run_op(step.client, "auction",
                              op(step.function, args));
        CHECK(got.valid);
        CHECK(got.text == expected.text());
    }
}

TEST_CASE("plaintext mode leaks bids and encrypted mode does not") {
    sim::SimOptions clear;
    clear.encryption = ledger::StateEncryption::none;
    clear.encrypt_results = false;
    sim::SimNet net(clear);
    net.run_op("auctioneer", "auction", op("create", {"art1", "d"}));
    net.run_op("alice", "auction", op("submit", {"art1", "bid:10"}));
    CHECK(surface_contains(net, "bid:10"));

    sim::SimNet sealed(sim::SimOptions{});
    sealed.run_op("auctioneer", "auction", op("create", {"art1", "d"}));
    sealed.run_op("alice", "auction", op("submit", {"art1", "bid:10"}));
    CHECK_FALSE(surface_contains(sealed, "bid:10"));
}

TEST_CASE("stale endorsement is invalidated at commit") {
    sim::SimNet net(sim::SimOptions{});
    net.run_op("auctioneer", "auction", op("create", {"art1", "d"}));

    // endorsed against the open auction, ordered after the close
    auto stale = net.assemble(
        net.make_proposal("alice", "auction", op("submit", {"art1", "bid:5"})),
        {0});
    net.run_op("auctioneer", "auction", op("close", {"art1"}));
    net.submit(stale);
    net.commit_pending();
    CHECK(net.outcome_of(stale, "submit").text == "invalid");

    // endorsed after the close: a valid transaction carrying the app error
    auto late = net.run_op("alice", "auction", op("submit", {"art1", "bid:6"}));
    CHECK(late.valid);
    CHECK(late.text == "err:Closed");
}

TEST_CASE("duplicate submission of one endorsed transaction commits once") {
    sim::SimNet net(sim::SimOptions{});
    auto tx = net.assemble(
        net.make_proposal("auctioneer", "auction", op("create", {"art1", "d"})),
        {0});
    net.submit(tx);
    net.commit_pending();
    CHECK(net.outcome_of(tx, "create").valid);

    net.submit(tx);
    net.commit_pending();
    CHECK(net.outcome_of(tx, "create").valid);  // first instance stands
    const auto& [block, flags] = net.history().back();
    REQUIRE(block.transactions.size() == 1);
    CHECK_FALSE(flags[0]);
}

TEST_CASE("concurrent creates in one block conflict") {
    sim::SimNet net(sim::SimOptions{});
    auto a = net.assemble(
        net.make_proposal("alice", "auction", op("create", {"art1", "a"})),
        {0});
    auto b = net.assemble(
        net.make_proposal("bob", "auction", op("create", {"art1", "b"})),
        {1});
    net.submit(a);
    net.submit(b);
    net.commit_pending();
    CHECK(net.outcome_of(a, "create").valid);
    CHECK(net.outcome_of(b, "create").text == "invalid");
}

TEST_CASE("two-peer endorsement policy") {
    sim::SimOptions opt;
    opt.required_endorsements = 2;
    sim::SimNet net(opt);

    auto two = net.run_op("auctioneer", "auction",
                          op("create", {"art1", "d"}), {0, 1});
    CHECK(two.valid);

    // one distinct registered endorser is below the threshold
    auto one = net.assemble(
        net.make_proposal("alice", "auction", op("submit", {"art1", "bid:3"})),
        {2});
    net.submit(one);
    net.commit_pending();
    CHECK(net.outcome_of(one, "submit").text == "invalid");
}

TEST_CASE("peer recovery resumes from sealed snapshot and block log") {
    sim::SimOptions opt;
    opt.snapshot_interval = 1;
    sim::SimNet net(opt);
    net.run_op("auctioneer", "auction", op("create", {"art1", "d"}));
    net.run_op("alice", "auction", op("submit", {"art1", "bid:10"}));
    net.run_op("bob", "auction", op("submit", {"art1", "bid:4"}));
    net.run_op("auctioneer", "auction", op("close", {"art1"}));

    size_t attestations = net.service().verify_count();
    auto expected_hash = net.peer(1).store().state_hash();

    net.peer(0).shutdown();
    net.peer(0).recover();
    CHECK(net.peer(0).store().state_hash() == expected_hash);
    CHECK_FALSE(net.peer(0).halted());
    // restart re-used the sealed identity; nobody re-attested
    CHECK(net.service().verify_count() == attestations);

    auto eval = net.run_op("auctioneer", "auction", op("evaluate", {"art1"}),
                           {0});
    CHECK(eval.text == "ok:winner=alice amount=10");
}

TEST_CASE("client-based keys confine state to one client") {
    sim::SimOptions opt;
    opt.encryption = ledger::StateEncryption::client_based;
    sim::SimNet net(opt);

    // one client driving its own auction works end to end
    CHECK(net.run_op("auctioneer", "auction", op("create", {"solo", "d"}))
              .valid);
    CHECK(net.run_op("auctioneer", "auction",
                     op("submit", {"solo", "bid:8"}))
              .text == "ok:accepted");
    CHECK(net.run_op("auctioneer", "auction", op("close", {"solo"})).text ==
          "ok:closed");
    CHECK(net.run_op("auctioneer", "auction", op("evaluate", {"solo"})).text ==
          "ok:winner=auctioneer amount=8");

    // another client cannot even read the record written under a foreign key
    auto p = net.make_proposal("alice", "auction",
                               op("submit", {"solo", "bid:9"}));
    CHECK_THROWS_AS(net.peer(0).endorse(p), Error);
}

TEST_CASE("plain chaincode kind runs the same contract without enclaves") {
    sim::SimOptions opt;
    opt.auction_kind = ledger::ChaincodeKind::plain;
    opt.encryption = ledger::StateEncryption::none;
    opt.encrypt_results = false;
    sim::SimNet net(opt);
    CHECK(net.run_op("auctioneer", "auction", op("create", {"art1", "d"}))
              .valid);
    CHECK(net.run_op("alice", "auction", op("submit", {"art1", "bid:12"}))
              .text == "ok:accepted");
    CHECK(net.run_op("auctioneer", "auction", op("close", {"art1"})).valid);
    CHECK(net.run_op("auctioneer", "auction", op("evaluate", {"art1"})).text ==
          "ok:winner=alice amount=12");
    // no enclaves, so bids sit in the clear
    CHECK(surface_contains(net, "bid:12"));
}

TEST_CASE("identical seeds replay identical histories") {
    auto run = [](uint64_t seed) {
        sim::SimOptions opt;
        opt.seed = seed;
        sim::SimNet net(opt);
        net.run_op("auctioneer", "auction", op("create", {"art1", "d"}));
        net.run_op("alice", "auction", op("submit", {"art1", "bid:10"}));
        net.run_op("auctioneer", "auction", op("close", {"art1"}));
        auto eval = net.run_op("auctioneer", "auction",
                               op("evaluate", {"art1"}));
        return std::pair{net.peer(0).store().state_hash(), eval.text};
    };
    auto a = run(42);
    auto b = run(42);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    auto c = run(7);
    CHECK(c.second == a.second);  // same outcomes under fresh keys
    CHECK(c.first != a.first);    // but different ciphertexts
}
