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
 * Simulated trusted execution substrate.
 *
 * An enclave program is measured code: its measurement is the hash of its
 * code identity string. Instances hold opaque state reachable only through
 * entry-point dispatch (ecall); the host never sees instance internals, it
 * only passes bytes in and out. During a call the program may reach back to
 * its host through ocalls, which the host (including a malicious one) fully
 * mediates.
 *
 * Attestation follows the usual split: local reports carry an HMAC under a
 * per-platform secret, so only enclaves on the same platform can verify
 * them; quotes are signed with a per-platform attestation key whose
 * certificate is issued by the attestation service, and anyone holding the
 * service public key can check the service's signed verdict offline.
 *
 * Report data is always chosen by the enclave code itself, never by the
 * host; a host that could pick report contents could impersonate any
 * enclave identity. For the same reason seal/unseal exist only on the
 * in-enclave runtime: a host-facing unseal would hand out sealed secrets.
 * Sealing keys are derived from (platform secret, measurement), so sealed
 * state survives restarts of the same code on the same platform and nothing
 * else. Sealed blobs carry no freshness; rolling back to an older blob is
 * undetectable at this layer by design.
 */

#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "chainclave/crypto.hpp"
#include "chainclave/errors.hpp"

namespace chainclave::tee {

inline constexpr size_t kReportDataSize = 64;
using ReportData = std::array<uint8_t, kReportDataSize>;

// Packs a digest into the fixed-size report data field, zero padded.
ReportData report_data_from_digest(const crypto::Digest& d);

enum class ReportForm : uint8_t { local = 0, remote = 1 };

struct AttestationReport {
    ReportForm form = ReportForm::local;
    std::string platform_id;
    crypto::Digest measurement{};
    ReportData report_data{};
    Bytes platform_public_key;   // remote form only
    Bytes platform_certificate;  // remote form only
    Bytes evidence;              // HMAC tag (local) or signature (remote)
};

Bytes report_signing_payload(const AttestationReport& r);
crypto::Digest report_digest(const AttestationReport& r);
void write_report(codec::ByteWriter& w, const AttestationReport& r);
AttestationReport read_report(codec::ByteReader& r);
Bytes encode_report(const AttestationReport& r);
AttestationReport decode_report(ByteView b);

struct AttestationVerdict {
    crypto::Digest report_digest{};
    bool valid = false;
    Bytes service_signature;
};

void write_verdict(codec::ByteWriter& w, const AttestationVerdict& v);
AttestationVerdict read_verdict(codec::ByteReader& r);

// Offline check of a service verdict: signature under the service key, over
// this report digest, with a positive outcome.
bool verdict_check(const AttestationVerdict& v,
                   const crypto::Digest& report_digest,
                   const Bytes& service_public_key);

/*
 * In-process stand-in for the remote attestation service. It certifies
 * platform attestation keys and turns quotes into signed verdicts. Verdicts
 * are verifiable offline, so relying parties contact the service once per
 * report, not per validation.
 */
class AttestationService {
  public:
    explicit AttestationService(crypto::SigningKeyPair key);

    const Bytes& public_key() const { return key_.public_key; }

    Bytes certify_platform(const std::string& platform_id,
                           const Bytes& platform_public_key);
    AttestationVerdict verify(const AttestationReport& report);

    // Number of verify calls served; recovery tests pin this to prove that
    // restarts do not re-attest.
    size_t verify_count() const { return verify_count_; }

  private:
    crypto::SigningKeyPair key_;
    size_t verify_count_ = 0;
};

struct EcallResult {
    Status status = Status::ok;
    std::string message;
    Bytes payload;

    bool ok() const { return status == Status::ok; }
};

Bytes encode_ecall_result(const EcallResult& r);
EcallResult decode_ecall_result(ByteView b);

// Base for program-defined instance state. Lives behind the instance
// boundary; only the owning program's handle() ever sees it.
class EnclaveState {
  public:
    virtual ~EnclaveState() = default;
};

class HostCallHandler {
  public:
    virtual ~HostCallHandler() = default;
    virtual Bytes ocall(const std::string& channel, ByteView payload) = 0;
};

class Instance;
class TeeHost;

/*
 * Capabilities available to program code during an ecall. Everything that
 * touches platform secrets (sealing, report generation and verification)
 * goes through here, so the secrets never appear outside the tee module.
 */
class EnclaveRuntime {
  public:
    const crypto::Digest& measurement() const;
    const std::string& platform_id() const;
    DetRng& rng();

    bool has_host() const { return host_ != nullptr; }
    // Relays to the current host handler. Throws Error{config_error} when the
    // call was made without one.
    Bytes ocall(const std::string& channel, ByteView payload);

    crypto::SealedBlob seal(ByteView payload);
    // Throws Error{unseal_authentication_failure} for blobs from another
    // measurement or another platform, or tampered ones.
    Bytes unseal(const crypto::SealedBlob& blob);

    AttestationReport local_report(const ReportData& data);
    bool verify_local_report(const AttestationReport& report) const;
    // Throws Error{uncertified_platform} when the platform holds no
    // certificate from the attestation service.
    AttestationReport quote(const ReportData& data);

  private:
    friend class TeeHost;
    EnclaveRuntime(TeeHost& host_env, Instance& instance,
                   HostCallHandler* host)
        : env_(host_env), instance_(instance), host_(host) {}

    TeeHost& env_;
    Instance& instance_;
    HostCallHandler* host_;
};

class EnclaveProgram {
  public:
    virtual ~EnclaveProgram() = default;
    // Stable identity of the code, e.g. "ledger-enclave/1". The measurement
    // is the hash of this string.
    virtual std::string code_identity() const = 0;
    virtual std::unique_ptr<EnclaveState> create_state() const = 0;
    // Protocol rejections are thrown as Error and surface as the EcallResult
    // status; the returned bytes become the result payload.
    virtual Bytes handle(EnclaveRuntime& rt, EnclaveState& state,
                         const std::string& entry, ByteView args) = 0;
};

class Instance {
  public:
    const crypto::Digest& measurement() const { return measurement_; }
    const std::string& platform_id() const { return platform_id_; }
    uint64_t instance_id() const { return instance_id_; }

    Instance(const Instance&) = delete;
    Instance& operator=(const Instance&) = delete;

  private:
    friend class TeeHost;
    friend class EnclaveRuntime;
    Instance(crypto::Digest m, std::string platform, uint64_t id,
             std::shared_ptr<EnclaveProgram> program, DetRng rng)
        : measurement_(m),
          platform_id_(std::move(platform)),
          instance_id_(id),
          program_(std::move(program)),
          rng_(rng),
          state_(program_->create_state()) {}

    crypto::Digest measurement_;
    std::string platform_id_;
    uint64_t instance_id_;
    std::shared_ptr<EnclaveProgram> program_;
    DetRng rng_;
    std::unique_ptr<EnclaveState> state_;
    std::mutex call_mutex_;
};

using InstancePtr = std::shared_ptr<Instance>;

crypto::Digest measure(const EnclaveProgram& program);

class TeeHost {
  public:
    explicit TeeHost(DetRng rng);

    // service == nullptr leaves the platform uncertified: local attestation
    // and sealing still work, quotes are refused.
    void add_platform(const std::string& platform_id,
                      AttestationService* service);

    crypto::Digest register_program(std::shared_ptr<EnclaveProgram> program);

    // Throws Error{measurement_mismatch} for an unregistered measurement and
    // Error{config_error} for an unknown platform.
    InstancePtr create(const std::string& platform_id,
                       const crypto::Digest& measurement);

    // Dispatches one entry call. Error thrown by the program (or by runtime
    // services it used) is folded into the result status; anything else is a
    // bug and propagates.
    EcallResult ecall(Instance& instance, const std::string& entry,
                      ByteView args, HostCallHandler* host = nullptr);

  private:
    friend class EnclaveRuntime;

    struct Platform {
        crypto::SymmetricKey secret;
        crypto::SigningKeyPair attestation_key;
        Bytes certificate;  // empty when uncertified
    };

    Platform& platform_of(const Instance& instance);

    DetRng rng_;
    std::map<std::string, Platform> platforms_;
    std::map<crypto::Digest, std::shared_ptr<EnclaveProgram>> programs_;
    uint64_t next_instance_id_ = 0;
};

}  // namespace chainclave::tee
