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

#include "chainclave/registry.hpp"

#include "chainclave/faults.hpp"

namespace chainclave::registry {

Bytes encode_registry_entry(const RegistryEntry& e) {
    codec::ByteWriter w;
    w.str(e.chaincode);
    w.str(e.host_peer);
    w.bytes(e.signing_public_key);
    w.bytes(e.encryption_public_key);
    tee::write_report(w, e.report);
    tee::write_verdict(w, e.verdict);
    return w.take();
}

RegistryEntry decode_registry_entry(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        RegistryEntry e;
        e.chaincode = r.str();
        e.host_peer = r.str();
        e.signing_public_key = r.bytes();
        e.encryption_public_key = r.bytes();
        e.report = tee::read_report(r);
        e.verdict = tee::read_verdict(r);
        return e;
    });
}

Bytes encode_candidate(const RegistrationCandidate& c) {
    codec::ByteWriter w;
    w.str(c.chaincode);
    w.str(c.host_peer);
    w.bytes(c.signing_public_key);
    w.bytes(c.encryption_public_key);
    tee::write_report(w, c.report);
    return w.take();
}

RegistrationCandidate decode_candidate(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        RegistrationCandidate c;
        c.chaincode = r.str();
        c.host_peer = r.str();
        c.signing_public_key = r.bytes();
        c.encryption_public_key = r.bytes();
        c.report = tee::read_report(r);
        return c;
    });
}

std::string registry_key(const Bytes& signing_public_key) {
    return std::string(kChaincodeName) + "/" + to_hex(signing_public_key);
}

tee::ReportData expected_report_data(const Bytes& signing_public_key,
                                     const Bytes& encryption_public_key) {
    codec::ByteWriter w;
    w.bytes(signing_public_key);
    w.bytes(encryption_public_key);
    return tee::report_data_from_digest(crypto::sha256(w.view()));
}

namespace {

bool fail(Status s, Status* reason) {
    if (reason) *reason = s;
    return false;
}

}  // namespace

bool verify_registry_entry(const RegistryEntry& entry,
                           const std::string& chaincode_name,
                           const crypto::Digest& expected_measurement,
                           const Bytes& service_public_key, Status* reason) {
    if (reason) *reason = Status::ok;
    if (faults().disable_attestation_check) return true;

    if (entry.chaincode != chaincode_name)
        return fail(Status::invalid_attestation, reason);
    if (entry.report.form != tee::ReportForm::remote)
        return fail(Status::invalid_attestation, reason);
    if (!tee::verdict_check(entry.verdict, tee::report_digest(entry.report),
                            service_public_key))
        return fail(Status::invalid_verdict, reason);
    if (entry.report.measurement != expected_measurement)
        return fail(Status::measurement_mismatch, reason);
    if (entry.report.report_data !=
        expected_report_data(entry.signing_public_key,
                             entry.encryption_public_key))
        return fail(Status::report_data_mismatch, reason);
    return true;
}

bool enclave_endorsements_valid(const ledger::Transaction& tx,
                                const ledger::ChaincodePolicy& policy,
                                const ledger::GenesisConfig& config,
                                const RegistryLookup& lookup) {
    if (!policy.expected_measurement) return false;
    std::set<Bytes> distinct;
    for (const auto& e : tx.endorsements) {
        auto entry_bytes = lookup(registry_key(e.endorser_public_key));
        if (!entry_bytes) continue;
        RegistryEntry entry;
        try {
            entry = decode_registry_entry(*entry_bytes);
        } catch (const Error&) {
            continue;
        }
        if (entry.signing_public_key != e.endorser_public_key) continue;
        if (!verify_registry_entry(entry, policy.name,
                                   *policy.expected_measurement,
                                   config.attestation_service_public_key))
            continue;
        if (!crypto::verify(e.endorser_public_key,
                            ledger::endorsement_signing_payload(e),
                            e.signature))
            continue;
        distinct.insert(e.endorser_public_key);
    }
    return distinct.size() >= policy.required_endorsements;
}

bool client_verify_enclave(const RegistryEntry& entry,
                           const ledger::ChaincodePolicy& policy,
                           const Bytes& service_public_key, Status* reason) {
    if (!policy.expected_measurement) {
        if (reason) *reason = Status::config_error;
        return false;
    }
    return verify_registry_entry(entry, policy.name,
                                 *policy.expected_measurement,
                                 service_public_key, reason);
}

Bytes RegistryChaincode::invoke(cc::Shim& shim, const cc::Operation& op) {
    require(service_ != nullptr && config_ != nullptr, Status::config_error,
            "registry: not wired to service and config");
    if (op.function != "register")
        raise(Status::unknown_entry_point, "registry: " + op.function);
    require(op.args.size() == 1, Status::codec_error,
            "registry: register takes one argument");

    RegistrationCandidate cand = decode_candidate(op.args[0]);

    const ledger::ChaincodePolicy* policy =
        config_->find_chaincode(cand.chaincode);
    require(policy != nullptr &&
                policy->kind == ledger::ChaincodeKind::enclave,
            Status::invalid_attestation,
            "registry: no enclave chaincode named " + cand.chaincode);

    RegistryEntry entry;
    entry.chaincode = cand.chaincode;
    entry.host_peer = cand.host_peer;
    entry.signing_public_key = cand.signing_public_key;
    entry.encryption_public_key = cand.encryption_public_key;
    entry.report = cand.report;
    entry.verdict = service_->verify(cand.report);

    Status reason = Status::ok;
    require(verify_registry_entry(entry, policy->name,
                                  *policy->expected_measurement,
                                  config_->attestation_service_public_key,
                                  &reason),
            reason, "registry: candidate rejected");

    std::string key_tail = to_hex(entry.signing_public_key);
    if (shim.get_state(key_tail).has_value())
        throw cc::ChaincodeAppError{"AlreadyExists",
                                    "enclave key already registered"};
    shim.put_state(key_tail, encode_registry_entry(entry));
    return to_bytes(registry_key(entry.signing_public_key));
}

}  // namespace chainclave::registry
