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
 * Reference functionality model: the auction as a pure state machine over
 * plain C++ values, written independently of the chaincode and the ledger
 * stack. It is the oracle the security checker measures the real system
 * against: a run is secure up to resets when everything the adversary
 * extracts equals the functionality applied to some prefix of the honest
 * committed operation sequence.
 */

#pragma once

#include <compare>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace chainclave::model {

struct ClientOp {
    std::string client;
    std::string function;
    std::vector<std::string> args;
    bool operator==(const ClientOp&) const = default;

    std::string text() const;
};

struct OpOutcome {
    bool ok = false;
    std::string code;    // application error code when !ok
    std::string output;  // textual result when ok
    auto operator<=>(const OpOutcome&) const = default;

    std::string text() const;
};

struct AuctionModel {
    struct Auction {
        std::string description;
        std::string auctioneer;
        int status = 0;  // 0 active, 1 closed, 2 evaluated
        std::map<std::string, uint64_t> bids;
        std::string result;  // outcome text once evaluated
        auto operator<=>(const Auction&) const = default;
    };
    std::map<std::string, Auction> auctions;
    auto operator<=>(const AuctionModel&) const = default;
};

// F(s, t): applies one operation. Failed operations leave s untouched.
OpOutcome apply(AuctionModel& s, const ClientOp& op);

// s_0 .. s_m for the given committed sequence.
std::vector<AuctionModel> prefix_states(const std::vector<ClientOp>& ops);

// Every outcome a reset adversary may legitimately extract for `probe`:
// one application per prefix state.
std::set<OpOutcome> allowed_outcomes(const std::vector<ClientOp>& committed,
                                     const ClientOp& probe);

}  // namespace chainclave::model
