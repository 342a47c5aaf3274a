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
 * Enclave endorser registry. Chaincode enclaves register their identities
 * (signing and encryption keys, attestation report, service verdict) on the
 * ledger itself through a plain chaincode, under "ercc/<signing key>". The
 * endorsement policy for enclave chaincodes then reduces to: enough distinct
 * registered enclaves of the expected measurement signed the response.
 *
 * verify_registry_entry is the one predicate everyone shares: the
 * registration chaincode when admitting an entry, transaction validation
 * (both peer-side and inside the ledger enclave's crosscheck), and clients
 * checking an enclave before trusting its results.
 */

#pragma once

#include <functional>

#include "chainclave/chaincode.hpp"
#include "chainclave/ledger.hpp"
#include "chainclave/tee.hpp"

namespace chainclave::registry {

inline constexpr std::string_view kChaincodeName = "ercc";

struct RegistryEntry {
    std::string chaincode;  // chaincode this enclave runs
    std::string host_peer;
    Bytes signing_public_key;
    Bytes encryption_public_key;
    tee::AttestationReport report;
    tee::AttestationVerdict verdict;
};

Bytes encode_registry_entry(const RegistryEntry& e);
RegistryEntry decode_registry_entry(ByteView b);

// Candidate submitted for registration: everything but the verdict, which
// the registration chaincode obtains from the attestation service itself.
struct RegistrationCandidate {
    std::string chaincode;
    std::string host_peer;
    Bytes signing_public_key;
    Bytes encryption_public_key;
    tee::AttestationReport report;
};

Bytes encode_candidate(const RegistrationCandidate& c);
RegistrationCandidate decode_candidate(ByteView b);

// Ledger key of an entry: "ercc/" followed by the hex signing key.
std::string registry_key(const Bytes& signing_public_key);

// What an honest enclave puts in its quote's report data: the hash of both
// public keys, zero padded. Splicing a report onto other keys trips this.
tee::ReportData expected_report_data(const Bytes& signing_public_key,
                                     const Bytes& encryption_public_key);

/*
 * The full acceptance chain for a registry entry:
 *   - remote-form report whose verdict is signed by the attestation service
 *     and positive, for exactly this report;
 *   - report measurement equals the expected chaincode measurement;
 *   - report data binds the entry's two public keys;
 *   - entry chaincode matches the policy it is evaluated under.
 * Pure and offline; never contacts the service. With the attestation fault
 * switch set it degenerates to accept-all (mutation testing only).
 */
bool verify_registry_entry(const RegistryEntry& entry,
                           const std::string& chaincode_name,
                           const crypto::Digest& expected_measurement,
                           const Bytes& service_public_key,
                           Status* reason = nullptr);

// Committed-state lookup, abstracted over VersionedStore (peer) and the
// ledger enclave's retained registry values.
using RegistryLookup =
    std::function<std::optional<Bytes>(const std::string& key)>;

// Endorsement-policy check for enclave chaincodes: each counted endorsement
// must come from a registered, verified enclave of this chaincode and carry
// a valid signature; distinct signers must reach the policy threshold.
bool enclave_endorsements_valid(const ledger::Transaction& tx,
                                const ledger::ChaincodePolicy& policy,
                                const ledger::GenesisConfig& config,
                                const RegistryLookup& lookup);

// Client-side trust decision before talking to an enclave; same predicate.
bool client_verify_enclave(const RegistryEntry& entry,
                           const ledger::ChaincodePolicy& policy,
                           const Bytes& service_public_key,
                           Status* reason = nullptr);

/*
 * The registration chaincode (plain kind). register_enclave validates the
 * candidate, fetches a verdict from the attestation service, and writes the
 * entry. Rejections are protocol errors (the endorsement fails), not signed
 * chaincode errors.
 */
class RegistryChaincode : public cc::ChaincodeProgram {
  public:
    RegistryChaincode(tee::AttestationService* service,
                      const ledger::GenesisConfig* config)
        : service_(service), config_(config) {}

    std::string name() const override { return std::string(kChaincodeName); }
    std::string version() const override { return "1"; }
    Bytes invoke(cc::Shim& shim, const cc::Operation& op) override;

  private:
    tee::AttestationService* service_;
    const ledger::GenesisConfig* config_;
};

}  // namespace chainclave::registry
