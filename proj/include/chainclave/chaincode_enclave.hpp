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
 * Chaincode enclave: runs one contract behind an encrypted, authenticated
 * proposal interface, with all state reads verified against the ledger
 * enclave it is bound to.
 *
 * The shim it gives the contract fetches state through host ocalls, then
 * challenges the ledger enclave with a fresh nonce and checks the signed
 * value hash before the contract ever sees a byte. Reads of the enclave's
 * own pending writes are served locally and do not enter the readset. Range
 * reads verify every returned pair the same way in one signed batch; a host
 * can still withhold keys from a range, which is the one residual gap of
 * hash-based verification without an authenticated index.
 *
 * State confidentiality is a per-chaincode choice: values stored in clear,
 * under one provisioned chaincode key, or under keys the clients attach to
 * their operations. State ciphertexts are derived deterministically from
 * (key, proposal, plaintext), so independent enclaves endorsing the same
 * operation produce byte-identical write sets.
 */

#pragma once

#include "chainclave/chaincode.hpp"
#include "chainclave/ledger.hpp"
#include "chainclave/ledger_enclave.hpp"
#include "chainclave/tee.hpp"

namespace chainclave::cce {

// entry points
inline constexpr const char* kSetup = "setup";
inline constexpr const char* kBind = "bind";
inline constexpr const char* kProvisionKey = "provision_key";
inline constexpr const char* kInvoke = "invoke";
inline constexpr const char* kSealIdentity = "seal_identity";
inline constexpr const char* kRestore = "restore";
inline constexpr const char* kPublicKeys = "public_keys";

// host ocall channels
inline constexpr const char* kChanGetState = "get_state";
inline constexpr const char* kChanGetRange = "get_range";
inline constexpr const char* kChanLedgerMeta = "ledger_meta";

struct SetupArgs {
    Bytes genesis_block;  // canonical block 0
    std::string chaincode;
    std::string host_peer;
};

Bytes encode_setup_args(const SetupArgs& a);
SetupArgs decode_setup_args(ByteView b);

struct SetupResult {
    Bytes signing_public_key;
    Bytes encryption_public_key;
    tee::AttestationReport quote;
};

Bytes encode_setup_result(const SetupResult& r);
SetupResult decode_setup_result(ByteView b);

// get_state ocall answer from the host.
struct StateValue {
    bool present = false;
    Bytes value;
    ledger::Version version;
};

Bytes encode_state_value(const StateValue& v);
StateValue decode_state_value(ByteView b);

struct RangeItem {
    std::string key;
    Bytes value;
    ledger::Version version;
};

Bytes encode_range_items(const std::vector<RangeItem>& items);
std::vector<RangeItem> decode_range_items(ByteView b);

// Deterministic state-value encryption: AES-GCM under the data key with a
// nonce derived from the proposal digest, the full ledger key, and the
// plaintext; the ledger key is the associated data.
Bytes encrypt_state_value(const crypto::SymmetricKey& key,
                          const std::string& full_key,
                          const crypto::Digest& proposal_digest,
                          ByteView plaintext);
Bytes decrypt_state_value(const crypto::SymmetricKey& key,
                          const std::string& full_key, ByteView stored);

class ChaincodeEnclaveProgram : public tee::EnclaveProgram {
  public:
    explicit ChaincodeEnclaveProgram(
        std::shared_ptr<cc::ChaincodeProgram> contract)
        : contract_(std::move(contract)) {}

    std::string code_identity() const override {
        return "chaincode-enclave/" + contract_->name() + "/" +
               contract_->version();
    }
    std::unique_ptr<tee::EnclaveState> create_state() const override;
    Bytes handle(tee::EnclaveRuntime& rt, tee::EnclaveState& state,
                 const std::string& entry, ByteView args) override;

  private:
    std::shared_ptr<cc::ChaincodeProgram> contract_;
};

// Typed host-side wrapper; throws Error on enclave rejection.
class CceClient {
  public:
    CceClient(tee::TeeHost& host, tee::InstancePtr instance)
        : host_(&host), instance_(std::move(instance)) {}

    tee::EcallResult raw(const std::string& entry, ByteView args,
                         tee::HostCallHandler* handler = nullptr);

    SetupResult setup(const ledger::Block& genesis,
                      const std::string& chaincode,
                      const std::string& host_peer);
    void bind(const le::BindReport& report);
    void provision_key(const crypto::Envelope& wrapped_key);
    ledger::Endorsement invoke(const ledger::TransactionProposal& proposal,
                               tee::HostCallHandler* state_access);
    crypto::SealedBlob seal_identity();
    SetupResult restore(const crypto::SealedBlob& blob);
    SetupResult public_keys();

    const tee::InstancePtr& instance() const { return instance_; }
    void swap_instance(tee::InstancePtr fresh) {
        instance_ = std::move(fresh);
    }

  private:
    Bytes expect_ok(const std::string& entry, ByteView args,
                    tee::HostCallHandler* handler = nullptr);

    tee::TeeHost* host_;
    tee::InstancePtr instance_;
};

/*
 * Endorser for plain (non-enclave) chaincodes: runs the contract directly
 * against the peer's committed store and signs with the peer key. Same shim
 * semantics, no verification or encryption. Client result keys are ignored;
 * plain chaincode state is public anyway.
 */
class PlainChaincodeHost {
  public:
    PlainChaincodeHost(std::shared_ptr<cc::ChaincodeProgram> contract,
                       const ledger::GenesisConfig* config)
        : contract_(std::move(contract)), config_(config) {}

    ledger::Endorsement endorse(const ledger::TransactionProposal& proposal,
                                const ledger::VersionedStore& store,
                                const crypto::SigningKeyPair& peer_key);

  private:
    std::shared_ptr<cc::ChaincodeProgram> contract_;
    const ledger::GenesisConfig* config_;
};

}  // namespace chainclave::cce
