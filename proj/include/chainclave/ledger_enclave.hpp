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
 * Ledger enclave: the trusted validation sidecar of a peer. It consumes the
 * ordered block stream under strict sequence and hash-chain rules, runs the
 * same per-transaction validation as the peer (a commit goes through only
 * when both agree), and maintains integrity metadata: for every key, the
 * hash of the committed value and its version. On request it answers
 * nonce-challenged, signed metadata queries, which is what lets a chaincode
 * enclave detect a host serving stale or forged state.
 *
 * For registry keys ("ercc/...") it keeps the full committed value, not
 * just the hash, so its endorsement-policy crosscheck does not depend on
 * the untrusted host for registry lookups.
 *
 * Snapshots seal the entire internal state (including the signing identity)
 * to the platform; a restarted instance resumes from the latest snapshot
 * plus replayed blocks without re-attestation. Sealed snapshots carry no
 * freshness, so a malicious host can revive an older prefix of the chain;
 * that reset is exactly the leakage budget the security definition grants.
 * State transfer ships a signed metadata delta between ledger enclaves,
 * gated by mutual chain identity (genesis hash) and remote attestation.
 */

#pragma once

#include "chainclave/ledger.hpp"
#include "chainclave/tee.hpp"

namespace chainclave::le {

inline constexpr const char* kCodeIdentity = "ledger-enclave/1";

// entry points
inline constexpr const char* kInit = "init";
inline constexpr const char* kProcessBlock = "process_block";
inline constexpr const char* kGetMeta = "get_meta";
inline constexpr const char* kSnapshot = "snapshot";
inline constexpr const char* kRestore = "restore";
inline constexpr const char* kSummary = "summary";
inline constexpr const char* kBindReport = "bind_report";
inline constexpr const char* kTransferRequest = "transfer_request";
inline constexpr const char* kTransferServe = "transfer_serve";
inline constexpr const char* kTransferApply = "transfer_apply";

struct MetaEntry {
    std::string key;
    std::optional<crypto::Digest> value_hash;  // nullopt: key absent
};

struct MetaRequest {
    Bytes nonce;
    std::vector<std::string> keys;
};

// Signed response: the signature covers the nonce, the entries, and the
// block height it speaks for, under the enclave's ledger key.
struct MetaResponse {
    Bytes nonce;
    uint64_t last_block_seq = 0;
    std::vector<MetaEntry> entries;
    Bytes signature;
};

Bytes encode_meta_request(const MetaRequest& m);
MetaRequest decode_meta_request(ByteView b);
Bytes meta_response_signing_payload(const MetaResponse& m);
Bytes encode_meta_response(const MetaResponse& m);
MetaResponse decode_meta_response(ByteView b);

struct LedgerSummary {
    uint64_t last_block_seq = 0;
    crypto::Digest last_block_hash{};
    crypto::Digest genesis_hash{};
    Bytes public_key;
};

Bytes encode_summary(const LedgerSummary& s);
LedgerSummary decode_summary(ByteView b);

struct BindReport {
    tee::AttestationReport report;
    Bytes public_key;
};

Bytes encode_bind_report(const BindReport& b);
BindReport decode_bind_report(ByteView b);

struct TransferRequest {
    Bytes nonce;
    crypto::Digest genesis_hash{};
    uint64_t from_seq = 0;
};

Bytes encode_transfer_request(const TransferRequest& t);
TransferRequest decode_transfer_request(ByteView b);

struct DeltaEntry {
    std::string key;
    crypto::Digest value_hash{};
    ledger::Version version;
    std::optional<Bytes> registry_value;  // full value for "ercc/" keys
};

struct TransferDelta {
    crypto::Digest genesis_hash{};
    Bytes provider_public_key;
    Bytes nonce;  // echo of the requester's challenge
    uint64_t from_seq = 0;
    uint64_t to_seq = 0;
    crypto::Digest to_block_hash{};
    std::vector<DeltaEntry> entries;
    std::vector<crypto::Digest> committed_proposals;
};

Bytes encode_transfer_delta(const TransferDelta& d);
TransferDelta decode_transfer_delta(ByteView b);

// Delta plus channel evidence: the provider signs the delta with its ledger
// key and proves that key belongs to a genuine ledger enclave with a quote
// (report data = hash of the key). The verdict is fetched by the untrusted
// host and checked offline inside the receiving enclave.
struct TransferOffer {
    Bytes delta;  // canonical TransferDelta
    Bytes signature;
    tee::AttestationReport report;
    std::optional<tee::AttestationVerdict> verdict;
};

Bytes encode_transfer_offer(const TransferOffer& o);
TransferOffer decode_transfer_offer(ByteView b);

class LedgerEnclaveProgram : public tee::EnclaveProgram {
  public:
    std::string code_identity() const override { return kCodeIdentity; }
    std::unique_ptr<tee::EnclaveState> create_state() const override;
    Bytes handle(tee::EnclaveRuntime& rt, tee::EnclaveState& state,
                 const std::string& entry, ByteView args) override;
};

/*
 * Typed host-side wrapper over the raw ecall surface. Each call either
 * returns the decoded payload or throws Error carrying the enclave's
 * rejection status. The adversary bypasses this and speaks raw ecalls.
 */
class LedgerEnclaveClient {
  public:
    LedgerEnclaveClient(tee::TeeHost& host, tee::InstancePtr instance)
        : host_(&host), instance_(std::move(instance)) {}

    tee::EcallResult raw(const std::string& entry, ByteView args);

    Bytes init(const ledger::Block& genesis);
    std::vector<bool> process_block(const ledger::Block& b);
    MetaResponse get_meta(const MetaRequest& req);
    crypto::SealedBlob snapshot();
    LedgerSummary restore(const crypto::SealedBlob& blob);
    LedgerSummary summary();
    BindReport bind_report();
    TransferRequest transfer_request();
    TransferOffer transfer_serve(const TransferRequest& req);
    LedgerSummary transfer_apply(const TransferOffer& offer);

    const tee::InstancePtr& instance() const { return instance_; }
    void swap_instance(tee::InstancePtr fresh) {
        instance_ = std::move(fresh);
    }

  private:
    Bytes expect_ok(const std::string& entry, ByteView args);

    tee::TeeHost* host_;
    tee::InstancePtr instance_;
};

}  // namespace chainclave::le
