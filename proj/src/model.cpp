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

#include "chainclave/model.hpp"

#include <algorithm>
#include <cctype>

namespace chainclave::model {
namespace {

OpOutcome err(std::string code) {
    OpOutcome o;
    o.ok = false;
    o.code = std::move(code);
    return o;
}

OpOutcome good(std::string output) {
    OpOutcome o;
    o.ok = true;
    o.output = std::move(output);
    return o;
}

bool usable_name(const std::string& name) {
    if (name.empty()) return false;
    return name.find('.') == std::string::npos &&
           name.find('#') == std::string::npos &&
           name.find('/') == std::string::npos;
}

// Accepts the wire form "bid:<decimal>".
bool parse_amount(const std::string& s, uint64_t& out) {
    if (s.rfind("bid:", 0) != 0) return false;
    const std::string digits = s.substr(4);
    if (digits.empty() || digits.size() > 19) return false;
    uint64_t v = 0;
    for (char c : digits) {
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
        v = v * 10 + static_cast<uint64_t>(c - '0');
    }
    out = v;
    return true;
}

std::string arg_at(const ClientOp& op, size_t i) {
    return i < op.args.size() ? op.args[i] : std::string();
}

OpOutcome do_create(AuctionModel& s, const ClientOp& op) {
    const std::string name = arg_at(op, 0);
    if (!usable_name(name)) return err("BadRequest");
    if (s.auctions.count(name)) return err("AlreadyExists");
    AuctionModel::Auction a;
    a.description = arg_at(op, 1);
    a.auctioneer = op.client;
    s.auctions.emplace(name, std::move(a));
    return good(name);
}

OpOutcome do_submit(AuctionModel& s, const ClientOp& op) {
    const std::string name = arg_at(op, 0);
    if (!usable_name(name)) return err("BadRequest");
    auto it = s.auctions.find(name);
    if (it == s.auctions.end()) return err("NoSuchAuction");
    if (it->second.status != 0) return err("Closed");
    uint64_t amount = 0;
    if (!parse_amount(arg_at(op, 1), amount)) return err("BadRequest");
    it->second.bids[op.client] = amount;
    return good("accepted");
}

OpOutcome do_close(AuctionModel& s, const ClientOp& op) {
    const std::string name = arg_at(op, 0);
    if (!usable_name(name)) return err("BadRequest");
    auto it = s.auctions.find(name);
    if (it == s.auctions.end()) return err("NoSuchAuction");
    if (it->second.auctioneer != op.client) return err("NotAuctioneer");
    if (it->second.status != 0) return err("NotActive");
    it->second.status = 1;
    return good("closed");
}

OpOutcome do_evaluate(AuctionModel& s, const ClientOp& op) {
    const std::string name = arg_at(op, 0);
    if (!usable_name(name)) return err("BadRequest");
    auto it = s.auctions.find(name);
    if (it == s.auctions.end()) return err("NoSuchAuction");
    if (it->second.status == 0) return err("BarrierAbsent");
    if (it->second.status == 2) return err("AlreadyEvaluated");

    bool has_winner = false;
    std::string winner;
    uint64_t best = 0;
    for (const auto& [client, amount] : it->second.bids) {
        // map iteration is ordered by client id, so on a tie the first
        // (lexicographically smallest) bidder wins
        if (!has_winner || amount > best) {
            has_winner = true;
            winner = client;
            best = amount;
        }
    }
    std::string text = has_winner
                           ? "winner=" + winner + " amount=" + std::to_string(best)
                           : "no-winner";
    it->second.status = 2;
    it->second.result = text;
    return good(text);
}

}  // namespace

std::string ClientOp::text() const {
    std::string s = client + ":" + function;
    for (const auto& a : args) s += " " + a;
    return s;
}

std::string OpOutcome::text() const {
    return ok ? "ok:" + output : "err:" + code;
}

OpOutcome apply(AuctionModel& s, const ClientOp& op) {
    if (op.function == "create") return do_create(s, op);
    if (op.function == "submit" || op.function == "bid") return do_submit(s, op);
    if (op.function == "close") return do_close(s, op);
    if (op.function == "evaluate") return do_evaluate(s, op);
    if (op.function == "noop") return good("ok");
    return err("BadRequest");
}

std::vector<AuctionModel> prefix_states(const std::vector<ClientOp>& ops) {
    std::vector<AuctionModel> states;
    states.reserve(ops.size() + 1);
    AuctionModel s;
    states.push_back(s);
    for (const auto& op : ops) {
        apply(s, op);
        states.push_back(s);
    }
    return states;
}

std::set<OpOutcome> allowed_outcomes(const std::vector<ClientOp>& committed,
                                     const ClientOp& probe) {
    std::set<OpOutcome> out;
    for (auto& s : prefix_states(committed)) {
        AuctionModel scratch = s;
        out.insert(apply(scratch, probe));
    }
    return out;
}

}  // namespace chainclave::model
