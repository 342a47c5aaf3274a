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
 * Scripted infrastructure adversary. The harness plays a malicious host on
 * the last peer: it owns that peer's ocall surface, its block delivery, its
 * sealed snapshots, and a colluding client ("mallory") whose result key it
 * holds. Honest clients and the other peers stay untouched.
 *
 * Attacks are JSON step lists (see docs/attack-schema.md). Every step is
 * recorded as an observation; probe steps additionally decrypt whatever the
 * chaincode enclave was tricked into answering. The checker then decides
 * whether the run stayed inside the reset budget: each extracted outcome
 * must equal the functionality applied to some prefix of the honestly
 * committed operations, and the honest outcomes themselves must replay the
 * functionality exactly.
 */

#pragma once

#include "chainclave/model.hpp"
#include "chainclave/sim.hpp"
#include "json.hpp"

namespace chainclave::adversary {

struct Observation {
    size_t step = 0;
    std::string kind;
    std::string detail;
    std::string status;  // status name of what the attacked component said
    bool ok = false;
    std::optional<model::ClientOp> probe;
    std::optional<model::OpOutcome> outcome;  // decrypted probe answer
    size_t honest_prefix = 0;  // honest ops committed when this was taken
};

struct ObservationLog {
    std::vector<Observation> entries;
    nlohmann::json to_json() const;
};

struct CheckResult {
    bool secure = true;
    size_t checked_probes = 0;
    std::string detail;  // first violation, empty when secure
};

// Decides "secure up to resets" for one recorded run.
CheckResult check_security_up_to_resets(
    const ObservationLog& log,
    const std::vector<std::pair<model::ClientOp, model::OpOutcome>>&
        honest_trace);

sim::SimOptions options_from_json(const nlohmann::json& j);

class AttackHarness : public tee::HostCallHandler {
  public:
    explicit AttackHarness(nlohmann::json script);

    const ObservationLog& run();

    const ObservationLog& log() const { return log_; }
    const std::vector<std::pair<model::ClientOp, model::OpOutcome>>&
    honest_trace() const {
        return honest_trace_;
    }
    CheckResult check() const {
        return check_security_up_to_resets(log_, honest_trace_);
    }
    sim::SimNet& net() { return *net_; }
    const std::string& name() const { return name_; }
    const std::string& targeted_fault() const { return targeted_fault_; }
    bool expects_violation() const { return expect_violation_; }

    // Ocall surface served to the probed chaincode enclave: state from the
    // chosen store view (live, archived height, or substituted), metadata
    // live from the malicious peer's ledger enclave or replayed from the
    // archive.
    Bytes ocall(const std::string& channel, ByteView payload) override;

  private:
    void run_step(const nlohmann::json& step);
    void archive_store();
    const std::map<std::string, ledger::ValueEntry>& served_entries();
    void note(Observation obs);
    Observation base_obs(const std::string& kind, std::string detail);

    void step_honest(const nlohmann::json& s);
    void step_delivery_mode(const nlohmann::json& s);
    void step_deliver(const nlohmann::json& s);
    void step_snapshot(const nlohmann::json& s);
    void step_rollback_le(const nlohmann::json& s);
    void step_restart_cce(const nlohmann::json& s);
    void step_serve_height(const nlohmann::json& s);
    void step_substitute_state(const nlohmann::json& s);
    void step_clear_substitutions(const nlohmann::json& s);
    void step_replay_meta(const nlohmann::json& s);
    void step_live_meta(const nlohmann::json& s);
    void step_forge_meta(const nlohmann::json& s);
    void step_probe(const nlohmann::json& s);
    void step_feed_block(const nlohmann::json& s);
    void step_forge_endorsement(const nlohmann::json& s);
    void step_register_rogue(const nlohmann::json& s);
    void step_bind_cross_platform(const nlohmann::json& s);
    void step_transfer(const nlohmann::json& s);

    std::string name_;
    std::string targeted_fault_;
    bool expect_violation_ = false;
    nlohmann::json steps_;
    std::unique_ptr<sim::SimNet> net_;
    size_t mal_ = 0;  // index of the peer whose host the adversary plays

    ObservationLog log_;
    size_t step_index_ = 0;
    std::vector<std::pair<model::ClientOp, model::OpOutcome>> honest_trace_;

    // archives the malicious host accumulates
    std::map<uint64_t, std::map<std::string, ledger::ValueEntry>>
        store_archive_;
    std::vector<Bytes> meta_archive_;  // encoded ecall results, in order

    // current serving policy for probe ocalls
    std::optional<uint64_t> served_height_;
    std::map<std::string, std::optional<cce::StateValue>> overrides_;
    std::optional<size_t> replay_meta_;
    bool forge_meta_ = false;

    // rogue identity established by register_rogue
    std::optional<crypto::SigningKeyPair> rogue_sign_;
    std::optional<crypto::BoxKeyPair> rogue_box_;
};

}  // namespace chainclave::adversary
