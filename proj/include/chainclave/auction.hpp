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
 * Sealed-bid first-price auction contract with an explicit barrier.
 *
 * Bids are accepted only while the auction is active. close() is the
 * barrier: it flips the record to closed, which both stops new bids and
 * orders every bid before any evaluation. evaluate() refuses to run while
 * the auction is still active, so no partial result can leak, and refuses
 * to run twice. The winner is the highest bid; ties go to the smallest
 * client id. Served from a chaincode enclave with state encryption, bid
 * amounts never appear in cleartext outside the enclaves.
 *
 * Key layout under the chaincode namespace ("auction/..."):
 *   <name>            auction record
 *   <name>#bids       bid container placeholder, written at creation
 *   <name>.<client>   one bid per client, re-bidding overwrites
 *   <name>#result     evaluation outcome
 * The "." prefix scan picks up exactly the bid keys.
 */

#pragma once

#include "chainclave/chaincode.hpp"

namespace chainclave::auction {

inline constexpr const char* kChaincodeName = "auction";

enum class AuctionStatus : uint8_t { active = 0, closed = 1, evaluated = 2 };

struct AuctionRecord {
    std::string name;
    std::string description;
    std::string auctioneer;
    AuctionStatus status = AuctionStatus::active;
};

Bytes encode_auction_record(const AuctionRecord& r);
AuctionRecord decode_auction_record(ByteView b);

struct AuctionOutcome {
    bool has_winner = false;
    std::string winner;
    uint64_t amount = 0;

    std::string text() const;
};

Bytes encode_outcome(const AuctionOutcome& o);
AuctionOutcome decode_outcome(ByteView b);

// Bid values are stored as "bid:<decimal>"; the encrypted-state privacy
// scan greps for exactly this shape.
Bytes format_bid(uint64_t amount);
std::optional<uint64_t> parse_bid(ByteView value);

std::string record_key(const std::string& name);
std::string bid_key(const std::string& name, const std::string& client);
std::string bid_prefix(const std::string& name);
std::string result_key(const std::string& name);
std::string placeholder_key(const std::string& name);

/*
 * Functions: create(name, description?), submit(name, amount),
 * close(name), evaluate(name), noop(). The submitter of create becomes the
 * auctioneer; only the auctioneer may close.
 */
class AuctionChaincode : public cc::ChaincodeProgram {
  public:
    std::string name() const override { return kChaincodeName; }
    std::string version() const override { return "1"; }
    Bytes invoke(cc::Shim& shim, const cc::Operation& op) override;
};

}  // namespace chainclave::auction
