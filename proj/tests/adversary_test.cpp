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
#include <filesystem>
#include <fstream>

#include "chainclave/adversary.hpp"
#include "chainclave/faults.hpp"
#include "doctest.h"

using namespace chainclave;
namespace adv = chainclave::adversary;
using nlohmann::json;

namespace {

std::vector<std::filesystem::path> corpus_paths() {
    std::filesystem::path dir =
        std::filesystem::path(CHAINCLAVE_SOURCE_DIR) / "attacks";
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.path().extension() == ".json") out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

json load_script(const std::filesystem::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    return json::parse(in);
}

json find_script_for_fault(const std::string& fault) {
    for (const auto& p : corpus_paths()) {
        json s = load_script(p);
        if (s.value("targeted_fault", "") == fault) return s;
    }
    FAIL("no corpus script targets ", fault);
    return {};
}

// Honest trace whose outcomes come straight from the functionality.
using Trace = std::vector<std::pair<model::ClientOp, model::OpOutcome>>;

Trace reference_trace(const std::vector<model::ClientOp>& ops) {
    Trace t;
    model::AuctionModel s;
    for (const auto& op : ops) t.emplace_back(op, model::apply(s, op));
    return t;
}

adv::Observation probe_obs(size_t prefix, model::ClientOp op,
                           model::OpOutcome outcome) {
    adv::Observation o;
    o.kind = "probe";
    o.ok = true;
    o.probe = std::move(op);
    o.outcome = std::move(outcome);
    o.honest_prefix = prefix;
    return o;
}

struct FaultGuard {
    ~FaultGuard() { reset_faults(); }
};

}  // namespace

TEST_CASE("checker accepts outcomes reachable at some honest prefix") {
    Trace trace = reference_trace({
        {"auctioneer", "create", {"a", "lot"}},
        {"alice", "submit", {"a", "bid:10"}},
        {"auctioneer", "close", {"a"}},
    });
    adv::ObservationLog log;
    // Frozen pre-close view: the barrier refusal is the prefix-1 answer.
    log.entries.push_back(probe_obs(
        3, {"mallory", "evaluate", {"a"}}, {false, "BarrierAbsent", ""}));
    // Full-prefix answer.
    log.entries.push_back(probe_obs(3, {"mallory", "evaluate", {"a"}},
                                    {true, "", "winner=alice amount=10"}));
    // Empty-prefix answer.
    log.entries.push_back(probe_obs(
        3, {"mallory", "evaluate", {"a"}}, {false, "NoSuchAuction", ""}));

    adv::CheckResult res = adv::check_security_up_to_resets(log, trace);
    CHECK(res.secure);
    CHECK(res.checked_probes == 3);
    CHECK(res.detail.empty());
}

TEST_CASE("checker flags an outcome no honest prefix explains") {
    Trace trace = reference_trace({
        {"auctioneer", "create", {"a", "lot"}},
        {"alice", "submit", {"a", "bid:10"}},
        {"bob", "submit", {"a", "bid:25"}},
        {"auctioneer", "close", {"a"}},
    });
    adv::ObservationLog log;
    // Winner computed with bob's bid suppressed: never a prefix state.
    log.entries.push_back(probe_obs(4, {"mallory", "evaluate", {"a"}},
                                    {true, "", "winner=alice amount=10"}));

    adv::CheckResult res = adv::check_security_up_to_resets(log, trace);
    CHECK_FALSE(res.secure);
    CHECK(res.detail.find("winner=alice") != std::string::npos);
}

TEST_CASE("checker replays the honest trace and flags divergence") {
    Trace trace = reference_trace({
        {"auctioneer", "create", {"a", "lot"}},
        {"alice", "submit", {"a", "bid:10"}},
    });
    // A committed forgery surfaces as an honest outcome the functionality
    // cannot reproduce, even when no probe ran at all.
    trace[1].second = {false, "Closed", ""};

    adv::CheckResult res =
        adv::check_security_up_to_resets(adv::ObservationLog{}, trace);
    CHECK_FALSE(res.secure);
    CHECK(res.detail.find("honest") != std::string::npos);
}

TEST_CASE("checker rejects a probe taken at a longer prefix than claimed") {
    Trace trace = reference_trace({
        {"auctioneer", "create", {"a", "lot"}},
        {"alice", "submit", {"a", "bid:10"}},
        {"auctioneer", "close", {"a"}},
    });
    adv::ObservationLog log;
    // Recorded before anything committed, yet it knows the final winner:
    // only prefixes of the ops committed at probe time count.
    log.entries.push_back(probe_obs(0, {"mallory", "evaluate", {"a"}},
                                    {true, "", "winner=alice amount=10"}));
    adv::CheckResult res = adv::check_security_up_to_resets(log, trace);
    CHECK_FALSE(res.secure);
}

TEST_CASE("script options parse and reject unknown values") {
    json j = {{"seed", 9},       {"peers", 4},
              {"block_size", 2}, {"encryption", "client_based"},
              {"chaincode_kind", "plain"}};
    sim::SimOptions o = adv::options_from_json(j);
    CHECK(o.seed == 9);
    CHECK(o.peers == 4);
    CHECK(o.block_size == 2);
    CHECK(o.encryption == ledger::StateEncryption::client_based);
    CHECK(o.auction_kind == ledger::ChaincodeKind::plain);

    CHECK_THROWS_AS(adv::options_from_json(json{{"encryption", "rot13"}}),
                    Error);
    CHECK_THROWS_AS(adv::options_from_json(json{{"chaincode_kind", "wasm"}}),
                    Error);
}

TEST_CASE("attack corpus stays secure on the intact system") {
    reset_faults();
    for (const auto& p : corpus_paths()) {
        json script = load_script(p);
        CAPTURE(p.filename().string());
        adv::AttackHarness h(script);
        h.run();
        adv::CheckResult res = h.check();
        INFO("violation: ", res.detail);
        CHECK(res.secure);
        CHECK(res.checked_probes > 0);
    }
}

TEST_CASE("every probed refusal in the substitution script is a "
          "verification failure") {
    reset_faults();
    json script = load_script(std::filesystem::path(CHAINCLAVE_SOURCE_DIR) /
                              "attacks" / "stale_state_feed.json");
    adv::AttackHarness h(script);
    const adv::ObservationLog& log = h.run();

    size_t refused = 0, answered = 0;
    for (const auto& o : log.entries) {
        if (o.kind != "probe") continue;
        if (o.ok) {
            ++answered;
            REQUIRE(o.outcome.has_value());
            CHECK(o.outcome->text() == "ok:winner=alice amount=30");
        } else {
            ++refused;
            CHECK(o.status == status_name(Status::state_verification_failure));
            CHECK_FALSE(o.outcome.has_value());
        }
    }
    CHECK(refused == 3);
    CHECK(answered == 1);
    CHECK(h.check().secure);
}

TEST_CASE("disabled metadata signature check lets the forged barrier "
          "through") {
    json script = find_script_for_fault("disable_meta_signature_check");

    {
        reset_faults();
        adv::AttackHarness h(script);
        h.run();
        CHECK(h.check().secure);
    }
    {
        FaultGuard guard;
        faults().disable_meta_signature_check = true;
        adv::AttackHarness h(script);
        h.run();
        adv::CheckResult res = h.check();
        CHECK_FALSE(res.secure);
        CHECK(res.detail.find("winner=bob") != std::string::npos);
    }
}

TEST_CASE("disabled sequence check lets the skipped bid vanish") {
    json script = find_script_for_fault("disable_sequence_check");

    {
        reset_faults();
        adv::AttackHarness h(script);
        h.run();
        CHECK(h.check().secure);
    }
    {
        FaultGuard guard;
        faults().disable_sequence_check = true;
        adv::AttackHarness h(script);
        h.run();
        adv::CheckResult res = h.check();
        CHECK_FALSE(res.secure);
        CHECK(res.detail.find("winner=alice") != std::string::npos);
    }
}

TEST_CASE("disabled attestation check lets a rogue enclave close the "
          "auction") {
    json script = find_script_for_fault("disable_attestation_check");

    {
        reset_faults();
        adv::AttackHarness h(script);
        h.run();
        CHECK(h.check().secure);
    }
    {
        FaultGuard guard;
        faults().disable_attestation_check = true;
        adv::AttackHarness h(script);
        h.run();
        CHECK_FALSE(h.check().secure);
    }
}

TEST_CASE("observation log serializes every probe and verdict") {
    reset_faults();
    json script = load_script(std::filesystem::path(CHAINCLAVE_SOURCE_DIR) /
                              "attacks" / "collude_close_probe.json");
    adv::AttackHarness h(script);
    const adv::ObservationLog& log = h.run();
    json j = log.to_json();
    REQUIRE(j.is_array());
    CHECK(j.size() == log.entries.size());
    bool saw_probe = false;
    for (const auto& e : j) {
        CHECK(e.contains("kind"));
        CHECK(e.contains("detail"));
        if (e.value("kind", "") == "probe" && e.contains("outcome"))
            saw_probe = true;
    }
    CHECK(saw_probe);
}
