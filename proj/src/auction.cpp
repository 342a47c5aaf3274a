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

#include "chainclave/auction.hpp"

namespace chainclave::auction {

Bytes encode_auction_record(const AuctionRecord& r) {
    codec::ByteWriter w;
    w.str(r.name);
    w.str(r.description);
    w.str(r.auctioneer);
    w.u8(static_cast<uint8_t>(r.status));
    return w.take();
}

AuctionRecord decode_auction_record(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        AuctionRecord out;
        out.name = r.str();
        out.description = r.str();
        out.auctioneer = r.str();
        uint8_t status = r.u8();
        require(status <= 2, Status::codec_error, "bad auction status");
        out.status = static_cast<AuctionStatus>(status);
        return out;
    });
}

std::string AuctionOutcome::text() const {
    if (!has_winner) return "no-winner";
    return "winner=" + winner + " amount=" + std::to_string(amount);
}

Bytes encode_outcome(const AuctionOutcome& o) {
    codec::ByteWriter w;
    w.flag(o.has_winner);
    w.str(o.winner);
    w.u64(o.amount);
    return w.take();
}

AuctionOutcome decode_outcome(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        AuctionOutcome o;
        o.has_winner = r.flag();
        o.winner = r.str();
        o.amount = r.u64();
        return o;
    });
}

Bytes format_bid(uint64_t amount) {
    return to_bytes("bid:" + std::to_string(amount));
}

std::optional<uint64_t> parse_bid(ByteView value) {
    std::string s = chainclave::to_string(value);
    if (s.rfind("bid:", 0) != 0) return std::nullopt;
    std::string digits = s.substr(4);
    if (digits.empty() || digits.size() > 19) return std::nullopt;
    uint64_t amount = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') return std::nullopt;
        amount = amount * 10 + static_cast<uint64_t>(c - '0');
    }
    return amount;
}

std::string record_key(const std::string& name) { return name; }

std::string bid_key(const std::string& name, const std::string& client) {
    return name + "." + client;
}

std::string bid_prefix(const std::string& name) { return name + "."; }

std::string result_key(const std::string& name) { return name + "#result"; }

std::string placeholder_key(const std::string& name) {
    return name + "#bids";
}

namespace {

[[noreturn]] void app_fail(const std::string& code,
                           const std::string& detail) {
    throw cc::ChaincodeAppError{code, detail};
}

std::string need_name(const cc::Operation& op) {
    std::string name = op.arg_str(0);
    if (name.empty()) app_fail("BadRequest", "auction name required");
    // Names must stay clear of the key-layout separators.
    if (name.find('.') != std::string::npos ||
        name.find('#') != std::string::npos ||
        name.find('/') != std::string::npos)
        app_fail("BadRequest", "auction name contains reserved characters");
    return name;
}

AuctionRecord need_auction(cc::Shim& shim, const std::string& name) {
    auto raw = shim.get_state(record_key(name));
    if (!raw) app_fail("NoSuchAuction", "no auction named " + name);
    return decode_auction_record(*raw);
}

Bytes do_create(cc::Shim& shim, const cc::Operation& op) {
    std::string name = need_name(op);
    if (shim.get_state(record_key(name)).has_value())
        app_fail("AlreadyExists", "auction " + name + " already exists");
    AuctionRecord rec;
    rec.name = name;
    rec.description = op.arg_str(1);
    rec.auctioneer = shim.caller();
    rec.status = AuctionStatus::active;
    shim.put_state(record_key(name), encode_auction_record(rec));
    shim.put_state(placeholder_key(name), to_bytes("bids"));
    return to_bytes(name);
}

Bytes do_submit(cc::Shim& shim, const cc::Operation& op) {
    std::string name = need_name(op);
    AuctionRecord rec = need_auction(shim, name);
    if (rec.status != AuctionStatus::active)
        app_fail("Closed", "auction " + name + " no longer accepts bids");
    Bytes bid = to_bytes(op.arg_str(1));
    if (!parse_bid(bid)) app_fail("BadRequest", "malformed bid amount");
    shim.put_state(bid_key(name, shim.caller()), bid);
    return to_bytes("accepted");
}

Bytes do_close(cc::Shim& shim, const cc::Operation& op) {
    std::string name = need_name(op);
    AuctionRecord rec = need_auction(shim, name);
    if (rec.auctioneer != shim.caller())
        app_fail("NotAuctioneer", shim.caller() + " did not create " + name);
    if (rec.status != AuctionStatus::active)
        app_fail("NotActive", "auction " + name + " is not active");
    rec.status = AuctionStatus::closed;
    shim.put_state(record_key(name), encode_auction_record(rec));
    return to_bytes("closed");
}

Bytes do_evaluate(cc::Shim& shim, const cc::Operation& op) {
    std::string name = need_name(op);
    AuctionRecord rec = need_auction(shim, name);
    if (rec.status == AuctionStatus::active)
        app_fail("BarrierAbsent",
                 "auction " + name + " must be closed before evaluation");
    if (rec.status == AuctionStatus::evaluated)
        app_fail("AlreadyEvaluated", "auction " + name + " already decided");

    AuctionOutcome outcome;
    for (const auto& [key, value] : shim.get_range(bid_prefix(name))) {
        auto amount = parse_bid(value);
        if (!amount) continue;  // never written by this contract; skip
        std::string client = key.substr(bid_prefix(name).size());
        bool better = *amount > outcome.amount ||
                      (*amount == outcome.amount && outcome.has_winner &&
                       client < outcome.winner);
        if (!outcome.has_winner || better) {
            outcome.has_winner = true;
            outcome.winner = client;
            outcome.amount = *amount;
        }
    }

    rec.status = AuctionStatus::evaluated;
    shim.put_state(record_key(name), encode_auction_record(rec));
    shim.put_state(result_key(name), encode_outcome(outcome));
    return encode_outcome(outcome);
}

}  // namespace

Bytes AuctionChaincode::invoke(cc::Shim& shim, const cc::Operation& op) {
    if (op.function == "create") return do_create(shim, op);
    if (op.function == "submit" || op.function == "bid")
        return do_submit(shim, op);
    if (op.function == "close") return do_close(shim, op);
    if (op.function == "evaluate") return do_evaluate(shim, op);
    if (op.function == "noop") return to_bytes("ok");
    throw cc::ChaincodeAppError{"BadRequest",
                                "unknown function " + op.function};
}

}  // namespace chainclave::auction
