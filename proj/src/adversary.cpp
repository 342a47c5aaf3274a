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

#include "chainclave/adversary.hpp"

#include <algorithm>

namespace chainclave::adversary {

namespace {

using nlohmann::json;

cc::Operation op_from_json(const json& s) {
    cc::Operation o;
    o.function = s.value("function", "");
    if (s.contains("args"))
        for (const auto& a : s.at("args"))
            o.args.push_back(to_bytes(a.get<std::string>()));
    return o;
}

model::ClientOp to_client_op(const std::string& client,
                             const cc::Operation& o) {
    model::ClientOp m;
    m.client = client;
    m.function = o.function;
    for (const auto& a : o.args) m.args.push_back(to_string(a));
    return m;
}

model::OpOutcome to_outcome(const std::string& function,
                            const cc::Result& r) {
    model::OpOutcome o;
    o.ok = r.ok;
    if (!r.ok) {
        o.code = r.code;
        return o;
    }
    if (function == "evaluate")
        o.output = auction::decode_outcome(r.payload).text();
    else
        o.output = to_string(r.payload);
    return o;
}

std::vector<size_t> endorsers_from(const json& s) {
    std::vector<size_t> out;
    if (s.contains("endorsers"))
        for (const auto& e : s.at("endorsers")) out.push_back(e.get<size_t>());
    if (out.empty()) out.push_back(0);
    return out;
}

bool starts_with(const std::string& s, const std::string& prefix) {
    return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

sim::SimOptions options_from_json(const json& j) {
    sim::SimOptions o;
    o.seed = j.value("seed", o.seed);
    o.peers = j.value("peers", o.peers);
    o.block_size = j.value("block_size", o.block_size);
    o.snapshot_interval = j.value("snapshot_interval", o.snapshot_interval);
    o.required_endorsements =
        j.value("required_endorsements", o.required_endorsements);
    o.encrypt_results = j.value("encrypt_results", o.encrypt_results);
    o.extra_clients = j.value("extra_clients", o.extra_clients);
    o.data_dir = j.value("data_dir", o.data_dir);
    if (j.contains("encryption")) {
        std::string e = j.at("encryption");
        if (e == "none")
            o.encryption = ledger::StateEncryption::none;
        else if (e == "per_chaincode")
            o.encryption = ledger::StateEncryption::per_chaincode;
        else if (e == "client_based")
            o.encryption = ledger::StateEncryption::client_based;
        else
            raise(Status::config_error, "unknown encryption mode " + e);
    }
    if (j.contains("chaincode_kind")) {
        std::string k = j.at("chaincode_kind");
        if (k == "plain")
            o.auction_kind = ledger::ChaincodeKind::plain;
        else if (k == "enclave")
            o.auction_kind = ledger::ChaincodeKind::enclave;
        else
            raise(Status::config_error, "unknown chaincode kind " + k);
    }
    return o;
}

json ObservationLog::to_json() const {
    json arr = json::array();
    for (const auto& e : entries) {
        json o{{"step", e.step},     {"kind", e.kind},
               {"detail", e.detail}, {"status", e.status},
               {"ok", e.ok},         {"honest_prefix", e.honest_prefix}};
        if (e.probe) o["probe"] = e.probe->text();
        if (e.outcome) o["outcome"] = e.outcome->text();
        arr.push_back(std::move(o));
    }
    return arr;
}

CheckResult check_security_up_to_resets(
    const ObservationLog& log,
    const std::vector<std::pair<model::ClientOp, model::OpOutcome>>&
        honest_trace) {
    CheckResult res;

    // The honestly committed trace itself must replay the functionality;
    // any committed rogue write shows up here as a divergence.
    model::AuctionModel m;
    for (size_t i = 0; i < honest_trace.size(); ++i) {
        model::OpOutcome expected = model::apply(m, honest_trace[i].first);
        if (expected != honest_trace[i].second) {
            res.secure = false;
            res.detail = "honest op " + std::to_string(i) + " (" +
                         honest_trace[i].first.text() + ") returned " +
                         honest_trace[i].second.text() +
                         " but the functionality says " + expected.text();
            return res;
        }
    }

    // Every extracted outcome must equal the functionality applied to some
    // prefix of the operations committed before the probe.
    for (const auto& obs : log.entries) {
        if (!obs.outcome || !obs.probe) continue;
        ++res.checked_probes;
        std::vector<model::ClientOp> prefix;
        for (size_t i = 0; i < obs.honest_prefix && i < honest_trace.size();
             ++i)
            prefix.push_back(honest_trace[i].first);
        auto allowed = model::allowed_outcomes(prefix, *obs.probe);
        if (!allowed.count(*obs.outcome)) {
            res.secure = false;
            res.detail = "step " + std::to_string(obs.step) + ": probe " +
                         obs.probe->text() + " extracted " +
                         obs.outcome->text() +
                         ", which no honest prefix can produce";
            return res;
        }
    }
    return res;
}

AttackHarness::AttackHarness(json script) {
    name_ = script.value("name", "unnamed");
    targeted_fault_ = script.value("targeted_fault", "");
    expect_violation_ = script.value("expect", "secure") == "violation";
    steps_ = script.value("steps", json::array());
    net_ = std::make_unique<sim::SimNet>(
        options_from_json(script.value("options", json::object())));
    mal_ = net_->peer_count() - 1;
    archive_store();
}

const ObservationLog& AttackHarness::run() {
    for (const auto& s : steps_) {
        run_step(s);
        ++step_index_;
    }
    return log_;
}

void AttackHarness::run_step(const json& s) {
    std::string op = s.value("op", "");
    if (op == "honest") return step_honest(s);
    if (op == "delivery_mode") return step_delivery_mode(s);
    if (op == "deliver") return step_deliver(s);
    if (op == "snapshot") return step_snapshot(s);
    if (op == "rollback_le") return step_rollback_le(s);
    if (op == "restart_cce") return step_restart_cce(s);
    if (op == "serve_height") return step_serve_height(s);
    if (op == "substitute_state") return step_substitute_state(s);
    if (op == "clear_substitutions") return step_clear_substitutions(s);
    if (op == "replay_meta") return step_replay_meta(s);
    if (op == "live_meta") return step_live_meta(s);
    if (op == "forge_meta") return step_forge_meta(s);
    if (op == "probe") return step_probe(s);
    if (op == "feed_block") return step_feed_block(s);
    if (op == "forge_endorsement") return step_forge_endorsement(s);
    if (op == "register_rogue") return step_register_rogue(s);
    if (op == "bind_cross_platform") return step_bind_cross_platform(s);
    if (op == "transfer") return step_transfer(s);
    raise(Status::config_error, "unknown attack step \"" + op + "\"");
}

void AttackHarness::archive_store() {
    sim::Peer& p = net_->peer(mal_);
    store_archive_[p.store().height()] = p.store().entries();
}

const std::map<std::string, ledger::ValueEntry>&
AttackHarness::served_entries() {
    if (served_height_) {
        auto it = store_archive_.find(*served_height_);
        require(it != store_archive_.end(), Status::config_error,
                "no archived store at height " +
                    std::to_string(*served_height_));
        return it->second;
    }
    return net_->peer(mal_).store().entries();
}

void AttackHarness::note(Observation obs) {
    log_.entries.push_back(std::move(obs));
}

Observation AttackHarness::base_obs(const std::string& kind,
                                    std::string detail) {
    Observation o;
    o.step = step_index_;
    o.kind = kind;
    o.detail = std::move(detail);
    o.status = status_name(Status::ok);
    o.ok = true;
    o.honest_prefix = honest_trace_.size();
    return o;
}

Bytes AttackHarness::ocall(const std::string& channel, ByteView payload) {
    if (channel == cce::kChanGetState) {
        auto key = codec::decode_all(
            payload, [](codec::ByteReader& r) { return r.str(); });
        cce::StateValue sv;
        auto ov = overrides_.find(key);
        if (ov != overrides_.end()) {
            if (ov->second) sv = *ov->second;
        } else {
            const auto& entries = served_entries();
            auto it = entries.find(key);
            if (it != entries.end())
                sv = {true, it->second.value, it->second.version};
        }
        return cce::encode_state_value(sv);
    }
    if (channel == cce::kChanGetRange) {
        auto prefix = codec::decode_all(
            payload, [](codec::ByteReader& r) { return r.str(); });
        std::map<std::string, cce::StateValue> merged;
        for (const auto& [k, e] : served_entries())
            if (starts_with(k, prefix))
                merged[k] = {true, e.value, e.version};
        for (const auto& [k, ov] : overrides_) {
            if (!starts_with(k, prefix)) continue;
            if (!ov || !ov->present)
                merged.erase(k);
            else
                merged[k] = *ov;
        }
        std::vector<cce::RangeItem> items;
        for (auto& [k, sv] : merged)
            items.push_back({k, sv.value, sv.version});
        return cce::encode_range_items(items);
    }
    if (channel == cce::kChanLedgerMeta) {
        if (replay_meta_) {
            require(*replay_meta_ < meta_archive_.size(),
                    Status::config_error, "no archived metadata response");
            return meta_archive_[*replay_meta_];
        }
        if (forge_meta_) {
            // The request travels through the host, so the nonce can be
            // echoed back.  Entries are hashed from whatever this handler
            // would serve, and the signature is junk: only a disabled
            // signature check lets this through.
            le::MetaRequest req = le::decode_meta_request(payload);
            le::MetaResponse resp;
            resp.nonce = req.nonce;
            resp.last_block_seq = net_->peer(mal_).store().height();
            for (const auto& key : req.keys) {
                le::MetaEntry e;
                e.key = key;
                std::optional<cce::StateValue> sv;
                auto ov = overrides_.find(key);
                if (ov != overrides_.end()) {
                    if (ov->second && ov->second->present) sv = *ov->second;
                } else {
                    const auto& entries = served_entries();
                    auto it = entries.find(key);
                    if (it != entries.end())
                        sv = cce::StateValue{true, it->second.value,
                                             it->second.version};
                }
                if (sv) e.value_hash = crypto::sha256(sv->value);
                resp.entries.push_back(std::move(e));
            }
            resp.signature = Bytes(64, 0x5a);
            tee::EcallResult fake{Status::ok, "", le::encode_meta_response(resp)};
            return tee::encode_ecall_result(fake);
        }
        Bytes out = tee::encode_ecall_result(
            net_->peer(mal_).ledger_enclave().raw(le::kGetMeta, payload));
        meta_archive_.push_back(out);
        return out;
    }
    raise(Status::config_error, "unknown ocall channel " + channel);
}

// ---------------------------------------------------------------- steps ----

void AttackHarness::step_honest(const json& s) {
    std::string client = s.value("client", "alice");
    std::string chaincode = s.value("chaincode", "auction");
    cc::Operation o = op_from_json(s);
    std::string function = o.function;
    sim::TxOutcome out =
        net_->run_op(client, chaincode, o, endorsers_from(s));
    Observation obs =
        base_obs("honest", client + ":" + function + " -> " + out.text);
    obs.ok = out.valid;
    if (out.valid && out.result && chaincode == "auction")
        honest_trace_.emplace_back(to_client_op(client, o),
                                   to_outcome(function, *out.result));
    note(std::move(obs));
    archive_store();
}

void AttackHarness::step_delivery_mode(const json& s) {
    std::string mode = s.value("mode", "auto");
    net_->set_auto_deliver(mal_, mode == "auto");
    note(base_obs("delivery_mode", mode));
}

void AttackHarness::step_deliver(const json& s) {
    auto& queue = net_->pending_for(mal_);
    size_t index = s.value("index", queue.empty() ? 0 : queue.size() - 1);
    require(index < queue.size(), Status::config_error,
            "no pending block at index " + std::to_string(index));
    ledger::Block b = queue[index];
    Observation obs =
        base_obs("deliver", "block seq " + std::to_string(b.seq));
    try {
        net_->peer(mal_).deliver_block(b);
        obs.detail += " committed";
    } catch (const Error& e) {
        obs.ok = false;
        obs.status = status_name(e.status);
        obs.detail += std::string(" refused: ") + e.what();
    }
    note(std::move(obs));
    archive_store();
}

void AttackHarness::step_snapshot(const json&) {
    sim::Peer& p = net_->peer(mal_);
    Observation obs = base_obs("snapshot", "");
    try {
        p.take_snapshot();
        obs.detail =
            "sealed at height " + std::to_string(p.snapshots().back().first);
    } catch (const Error& e) {
        obs.ok = false;
        obs.status = status_name(e.status);
        obs.detail = e.what();
    }
    note(std::move(obs));
}

void AttackHarness::step_rollback_le(const json& s) {
    sim::Peer& p = net_->peer(mal_);
    uint64_t height = s.value("height", uint64_t{0});
    const crypto::SealedBlob* blob = nullptr;
    for (const auto& [seq, snap] : p.snapshots())
        if (seq == height) blob = &snap;
    require(blob != nullptr, Status::config_error,
            "no sealed snapshot at height " + std::to_string(height));
    Observation obs =
        base_obs("rollback_le", "to height " + std::to_string(height));
    try {
        p.ledger_enclave().swap_instance(
            net_->tee().create(p.platform(), net_->le_measurement()));
        le::LedgerSummary sum = p.ledger_enclave().restore(*blob);
        obs.detail += ", enclave resumed at seq " +
                      std::to_string(sum.last_block_seq);
    } catch (const Error& e) {
        obs.ok = false;
        obs.status = status_name(e.status);
        obs.detail += std::string(" failed: ") + e.what();
    }
    note(std::move(obs));
}

void AttackHarness::step_restart_cce(const json&) {
    sim::Peer& p = net_->peer(mal_);
    Observation obs = base_obs("restart_cce", "from sealed identity");
    try {
        auto& enclave = p.chaincode_enclave("auction");
        enclave.swap_instance(
            net_->tee().create(p.platform(), net_->cce_measurement()));
        enclave.restore(p.sealed_identity("auction"));
    } catch (const Error& e) {
        obs.ok = false;
        obs.status = status_name(e.status);
        obs.detail += std::string(" failed: ") + e.what();
    }
    note(std::move(obs));
}

void AttackHarness::step_serve_height(const json& s) {
    if (s.value("live", false)) {
        served_height_.reset();
        note(base_obs("serve_height", "live"));
        return;
    }
    served_height_ = s.value("height", uint64_t{0});
    note(base_obs("serve_height",
                  "archived height " + std::to_string(*served_height_)));
}

void AttackHarness::step_substitute_state(const json& s) {
    if (s.contains("close_record_of")) {
        // Rewrite a committed auction record to "closed" in place. Only
        // meaningful when state is plaintext; an encrypted record cannot be
        // decoded, let alone re-encoded, from outside the enclave.
        std::string name = s.at("close_record_of");
        std::string key = "auction/" + name;
        const auto& entries = served_entries();
        auto it = entries.find(key);
        require(it != entries.end(), Status::config_error,
                "no committed record for " + name);
        auction::AuctionRecord rec =
            auction::decode_auction_record(it->second.value);
        rec.status = auction::AuctionStatus::closed;
        cce::StateValue sv{true, auction::encode_auction_record(rec),
                           it->second.version};
        overrides_[key] = sv;
        note(base_obs("substitute_state", key + " rewritten to closed"));
        return;
    }
    std::string key = s.at("key");
    if (s.value("absent", false)) {
        overrides_[key] = std::nullopt;
        note(base_obs("substitute_state", key + " suppressed"));
        return;
    }
    cce::StateValue sv;
    sv.present = true;
    if (s.contains("copy_of")) {
        // Serve one key's genuine committed value under a different key.
        std::string src = s.at("copy_of");
        const auto& entries = served_entries();
        auto it = entries.find(src);
        require(it != entries.end(), Status::config_error,
                "no committed value for " + src);
        sv.value = it->second.value;
        sv.version = it->second.version;
    } else if (s.contains("from_block_seq")) {
        // Reuse a genuine committed value, lifted straight out of an
        // ordered block the host kept a copy of.
        uint64_t seq = s.at("from_block_seq");
        const ledger::Block* blk = nullptr;
        for (const auto& b : net_->orderer().emitted())
            if (b.seq == seq) blk = &b;
        require(blk != nullptr, Status::config_error,
                "orderer never emitted seq " + std::to_string(seq));
        bool found = false;
        for (size_t i = 0; i < blk->transactions.size() && !found; ++i)
            for (const auto& w :
                 blk->transactions[i].endorsements.front().write_set)
                if (w.key == key) {
                    sv.value = w.value;
                    sv.version = {seq, static_cast<uint32_t>(i)};
                    found = true;
                    break;
                }
        require(found, Status::config_error,
                "block " + std::to_string(seq) + " never wrote " + key);
    } else if (s.contains("from_height")) {
        uint64_t h = s.at("from_height");
        auto it = store_archive_.find(h);
        require(it != store_archive_.end(), Status::config_error,
                "no archived store at height " + std::to_string(h));
        auto entry = it->second.find(key);
        if (entry == it->second.end()) {
            overrides_[key] = std::nullopt;
            note(base_obs("substitute_state",
                          key + " absent at height " + std::to_string(h)));
            return;
        }
        sv.value = entry->second.value;
        sv.version = entry->second.version;
    } else if (s.contains("value_hex")) {
        sv.value = from_hex(s.at("value_hex").get<std::string>());
    } else {
        sv.value = to_bytes(s.value("value_text", ""));
    }
    if (s.contains("version"))
        sv.version = {s.at("version").at(0).get<uint64_t>(),
                      s.at("version").at(1).get<uint32_t>()};
    overrides_[key] = sv;
    note(base_obs("substitute_state", key + " substituted"));
}

void AttackHarness::step_clear_substitutions(const json&) {
    overrides_.clear();
    note(base_obs("clear_substitutions", ""));
}

void AttackHarness::step_replay_meta(const json& s) {
    replay_meta_ = s.value("index", size_t{0});
    note(base_obs("replay_meta",
                  "archived response " + std::to_string(*replay_meta_) +
                      " of " + std::to_string(meta_archive_.size())));
}

void AttackHarness::step_live_meta(const json&) {
    replay_meta_.reset();
    note(base_obs("live_meta", ""));
}

void AttackHarness::step_forge_meta(const json& s) {
    forge_meta_ = s.value("enabled", true);
    note(base_obs("forge_meta", forge_meta_ ? "on" : "off"));
}

void AttackHarness::step_probe(const json& s) {
    std::string client = s.value("client", "mallory");
    cc::Operation o = op_from_json(s);
    std::string function = o.function;
    ledger::TransactionProposal proposal =
        net_->make_proposal(client, "auction", o);
    codec::ByteWriter w;
    ledger::write_proposal(w, proposal);

    auto& enclave = net_->peer(mal_).chaincode_enclave("auction");
    tee::EcallResult res = enclave.raw(cce::kInvoke, w.view(), this);

    Observation obs = base_obs("probe", client + ":" + function);
    obs.probe = to_client_op(client, o);
    obs.status = status_name(res.status);
    obs.ok = res.ok();
    if (res.ok()) {
        ledger::Endorsement e = codec::decode_all(
            res.payload,
            [](codec::ByteReader& r) { return ledger::read_endorsement(r); });
        cc::Result r = net_->decrypt_result(client, e.result,
                                            !proposal.result_key.empty());
        obs.outcome = to_outcome(function, r);
        obs.detail += " -> " + obs.outcome->text();
        if (s.value("submit", false)) {
            ledger::Transaction tx;
            tx.proposal = proposal;
            tx.endorsements.push_back(std::move(e));
            net_->submit(tx);
            net_->commit_pending();
            sim::TxOutcome out = net_->outcome_of(tx, function);
            obs.detail += out.valid ? ", committed valid"
                                    : ", flagged invalid at commit";
        }
    } else {
        obs.detail += " refused: " + res.message;
    }
    note(std::move(obs));
}

void AttackHarness::step_feed_block(const json& s) {
    uint64_t seq = s.at("seq");
    const std::vector<ledger::Block>& emitted = net_->orderer().emitted();
    const ledger::Block* found = nullptr;
    for (const auto& b : emitted)
        if (b.seq == seq) found = &b;
    require(found != nullptr, Status::config_error,
            "orderer never emitted seq " + std::to_string(seq));
    ledger::Block b = *found;

    std::string tamper = s.value("tamper", "none");
    DetRng& rng = net_->client("mallory").rng;
    if (tamper == "value") {
        require(!b.transactions.empty() &&
                    !b.transactions[0].endorsements.empty() &&
                    !b.transactions[0].endorsements[0].write_set.empty(),
                Status::config_error, "block has no write to tamper with");
        b.transactions[0].endorsements[0].write_set[0].value[0] ^= 0xff;
    } else if (tamper == "signature") {
        b.orderer_signature = rng.bytes(crypto::kSignatureSize);
    } else if (tamper == "strip_signature") {
        b.orderer_signature.clear();
    } else if (tamper == "reseq") {
        b.seq = s.value("new_seq", b.seq + 1);
    } else {
        require(tamper == "none", Status::config_error,
                "unknown tamper mode " + tamper);
    }

    Observation obs = base_obs(
        "feed_block", "seq " + std::to_string(b.seq) + " tamper=" + tamper);
    if (s.value("via_peer", false)) {
        try {
            net_->peer(mal_).deliver_block(b);
            obs.detail += " accepted by peer";
        } catch (const Error& e) {
            obs.ok = false;
            obs.status = status_name(e.status);
            obs.detail += std::string(" refused by peer: ") + e.what();
        }
    } else {
        tee::EcallResult res = net_->peer(mal_).ledger_enclave().raw(
            le::kProcessBlock, ledger::encode_block(b));
        obs.status = status_name(res.status);
        obs.ok = res.ok();
        obs.detail += res.ok() ? " accepted by ledger enclave"
                               : " refused by ledger enclave: " + res.message;
    }
    note(std::move(obs));
    archive_store();
}

void AttackHarness::step_forge_endorsement(const json& s) {
    std::string client = s.value("client", "mallory");
    std::string signer = s.value("signer", "random");
    DetRng& rng = net_->client(client).rng;

    crypto::SigningKeyPair key;
    if (signer == "rogue") {
        require(rogue_sign_.has_value(), Status::config_error,
                "no rogue identity registered yet");
        key = *rogue_sign_;
    } else {
        key = crypto::sign_keygen(rng);
    }

    cc::Operation o = op_from_json(s);
    if (o.function.empty()) o.function = "forge";
    ledger::TransactionProposal proposal =
        net_->make_proposal(client, "auction", o);

    ledger::Endorsement e;
    e.proposal_digest = ledger::proposal_digest(proposal);
    if (s.contains("reads"))
        for (const auto& r : s.at("reads")) {
            ledger::ReadEntry re;
            re.key = r.at("key");
            if (r.contains("height"))
                re.version = ledger::Version{r.at("height").get<uint64_t>(),
                                             r.value("index", uint32_t{0})};
            e.read_set.push_back(std::move(re));
        }
    if (s.contains("writes"))
        for (const auto& w : s.at("writes")) {
            ledger::WriteEntry we;
            if (w.contains("close_record_of")) {
                std::string name = w.at("close_record_of");
                we.key = "auction/" + name;
                const auto& entries = net_->peer(mal_).store().entries();
                auto it = entries.find(we.key);
                require(it != entries.end(), Status::config_error,
                        "no committed record for " + name);
                auction::AuctionRecord rec =
                    auction::decode_auction_record(it->second.value);
                rec.status = auction::AuctionStatus::closed;
                we.value = auction::encode_auction_record(rec);
            } else {
                we.key = w.at("key");
                if (w.contains("value_hex"))
                    we.value = from_hex(w.at("value_hex").get<std::string>());
                else
                    we.value = to_bytes(w.value("value_text", ""));
            }
            e.write_set.push_back(std::move(we));
        }
    e.result = to_bytes(std::string("forged"));
    e.endorser_public_key = key.public_key;
    e.signature =
        crypto::sign(key.secret, ledger::endorsement_signing_payload(e));

    ledger::Transaction tx;
    tx.proposal = std::move(proposal);
    tx.endorsements.push_back(std::move(e));
    net_->submit(tx);
    net_->commit_pending();

    Observation obs = base_obs("forge_endorsement", "signer=" + signer);
    try {
        sim::TxOutcome out = net_->outcome_of(tx, o.function);
        obs.ok = out.valid;
        obs.detail += out.valid ? ", committed valid" : ", flagged invalid";
    } catch (const Error& err) {
        // Commit succeeded but the fabricated result bytes do not decode.
        obs.ok = true;
        obs.detail += std::string(", committed valid, result undecodable: ") +
                      err.what();
    }
    note(std::move(obs));
    archive_store();
}

void AttackHarness::step_register_rogue(const json& s) {
    std::string variant = s.value("variant", "self_keys");
    DetRng& rng = net_->client("mallory").rng;
    rogue_sign_ = crypto::sign_keygen(rng);
    rogue_box_ = crypto::box_keygen(rng);

    sim::Peer& p = net_->peer(mal_);
    registry::RegistrationCandidate cand;
    cand.chaincode = "auction";
    cand.host_peer = p.id();
    cand.signing_public_key = rogue_sign_->public_key;
    cand.encryption_public_key = rogue_box_->public_key;

    const tee::AttestationReport& genuine = p.enclave_keys("auction").quote;
    if (variant == "splice_keys") {
        // A genuine quote of the real enclave, claimed for adversary keys.
        cand.report = genuine;
    } else {
        // Self-made report: right measurement and key binding, but evidence
        // no platform ever signed.
        cand.report = genuine;
        cand.report.report_data = registry::expected_report_data(
            cand.signing_public_key, cand.encryption_public_key);
        cand.report.evidence = rng.bytes(crypto::kSignatureSize);
    }

    cc::Operation o;
    o.function = "register";
    o.args.push_back(registry::encode_candidate(cand));

    Observation obs = base_obs("register_rogue", "variant=" + variant);
    try {
        ledger::Transaction tx = net_->assemble(
            net_->make_proposal("mallory", "ercc", o), {mal_});
        net_->submit(tx);
        net_->commit_pending();
        sim::TxOutcome out = net_->outcome_of(tx, "register");
        obs.ok = out.valid;
        obs.detail += out.valid ? ", rogue entry committed"
                                : ", flagged invalid at commit";
    } catch (const Error& e) {
        obs.ok = false;
        obs.status = status_name(e.status);
        obs.detail += std::string(", endorsement refused: ") + e.what();
    }
    note(std::move(obs));
    archive_store();
}

void AttackHarness::step_bind_cross_platform(const json&) {
    sim::Peer& p = net_->peer(mal_);
    Observation obs =
        base_obs("bind_cross_platform",
                 "bind report from " + net_->peer(0).platform() + " on " +
                     p.platform());
    try {
        cce::CceClient rogue(net_->tee(), net_->tee().create(
                                              p.platform(),
                                              net_->cce_measurement()));
        rogue.setup(net_->genesis(), "auction", p.id());
        le::BindReport br = net_->peer(0).ledger_enclave().bind_report();
        tee::EcallResult res =
            rogue.raw(cce::kBind, le::encode_bind_report(br));
        obs.status = status_name(res.status);
        obs.ok = res.ok();
        obs.detail += res.ok() ? ", bound" : ", refused: " + res.message;
    } catch (const Error& e) {
        obs.ok = false;
        obs.status = status_name(e.status);
        obs.detail += std::string(", failed: ") + e.what();
    }
    note(std::move(obs));
}

void AttackHarness::step_transfer(const json& s) {
    size_t provider = s.value("provider", size_t{0});
    std::string tamper = s.value("tamper", "none");
    sim::Peer& p = net_->peer(mal_);
    Observation obs = base_obs(
        "transfer", "from peer " + std::to_string(provider) +
                        " tamper=" + tamper);
    try {
        le::TransferRequest req;
        if (tamper == "skip_request") {
            // Unsolicited delta: nonce the requester never issued.
            req.nonce = net_->client("mallory").rng.bytes(16);
            req.genesis_hash = net_->genesis_hash();
            req.from_seq = p.ledger_enclave().summary().last_block_seq;
        } else {
            req = p.ledger_enclave().transfer_request();
        }
        le::TransferOffer offer =
            net_->peer(provider).ledger_enclave().transfer_serve(req);
        if (tamper != "drop_verdict")
            offer.verdict = net_->service().verify(offer.report);
        if (tamper == "delta" && !offer.delta.empty())
            offer.delta[offer.delta.size() / 2] ^= 0x01;

        tee::EcallResult res = p.ledger_enclave().raw(
            le::kTransferApply, le::encode_transfer_offer(offer));
        obs.status = status_name(res.status);
        obs.ok = res.ok();
        if (res.ok()) {
            le::LedgerSummary sum = le::decode_summary(res.payload);
            obs.detail += ", enclave now at seq " +
                          std::to_string(sum.last_block_seq);
        } else {
            obs.detail += ", refused: " + res.message;
        }
    } catch (const Error& e) {
        obs.ok = false;
        obs.status = status_name(e.status);
        obs.detail += std::string(", failed: ") + e.what();
    }
    note(std::move(obs));
}

}  // namespace chainclave::adversary
