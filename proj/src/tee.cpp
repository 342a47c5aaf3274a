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

#include "chainclave/tee.hpp"

namespace chainclave::tee {

ReportData report_data_from_digest(const crypto::Digest& d) {
    ReportData out{};
    std::copy(d.bytes.begin(), d.bytes.end(), out.begin());
    return out;
}

void write_report(codec::ByteWriter& w, const AttestationReport& r) {
    w.u8(static_cast<uint8_t>(r.form));
    w.str(r.platform_id);
    crypto::write_digest(w, r.measurement);
    w.fixed(r.report_data);
    w.bytes(r.platform_public_key);
    w.bytes(r.platform_certificate);
    w.bytes(r.evidence);
}

AttestationReport read_report(codec::ByteReader& r) {
    AttestationReport out;
    uint8_t form = r.u8();
    require(form <= 1, Status::codec_error, "bad report form");
    out.form = static_cast<ReportForm>(form);
    out.platform_id = r.str();
    out.measurement = crypto::read_digest(r);
    out.report_data = r.fixed<kReportDataSize>();
    out.platform_public_key = r.bytes();
    out.platform_certificate = r.bytes();
    out.evidence = r.bytes();
    return out;
}

Bytes encode_report(const AttestationReport& r) {
    codec::ByteWriter w;
    write_report(w, r);
    return w.take();
}

AttestationReport decode_report(ByteView b) {
    return codec::decode_all(
        b, [](codec::ByteReader& r) { return read_report(r); });
}

Bytes report_signing_payload(const AttestationReport& r) {
    AttestationReport unsigned_report = r;
    unsigned_report.evidence.clear();
    return encode_report(unsigned_report);
}

crypto::Digest report_digest(const AttestationReport& r) {
    return crypto::sha256(encode_report(r));
}

void write_verdict(codec::ByteWriter& w, const AttestationVerdict& v) {
    crypto::write_digest(w, v.report_digest);
    w.flag(v.valid);
    w.bytes(v.service_signature);
}

AttestationVerdict read_verdict(codec::ByteReader& r) {
    AttestationVerdict v;
    v.report_digest = crypto::read_digest(r);
    v.valid = r.flag();
    v.service_signature = r.bytes();
    return v;
}

namespace {

Bytes verdict_signing_payload(const crypto::Digest& report_digest,
                              bool valid) {
    codec::ByteWriter w;
    w.str("chainclave/verdict/v1");
    crypto::write_digest(w, report_digest);
    w.flag(valid);
    return w.take();
}

Bytes certificate_payload(const std::string& platform_id,
                          const Bytes& platform_public_key) {
    codec::ByteWriter w;
    w.str("chainclave/platform-cert/v1");
    w.str(platform_id);
    w.bytes(platform_public_key);
    return w.take();
}

}  // namespace

bool verdict_check(const AttestationVerdict& v,
                   const crypto::Digest& report_digest,
                   const Bytes& service_public_key) {
    if (v.report_digest != report_digest) return false;
    if (!v.valid) return false;
    return crypto::verify(service_public_key,
                          verdict_signing_payload(v.report_digest, v.valid),
                          v.service_signature);
}

AttestationService::AttestationService(crypto::SigningKeyPair key)
    : key_(std::move(key)) {}

Bytes AttestationService::certify_platform(const std::string& platform_id,
                                           const Bytes& platform_public_key) {
    return crypto::sign(key_.secret,
                        certificate_payload(platform_id, platform_public_key));
}

AttestationVerdict AttestationService::verify(
    const AttestationReport& report) {
    ++verify_count_;
    bool valid = report.form == ReportForm::remote;
    if (valid)
        valid = crypto::verify(
            key_.public_key,
            certificate_payload(report.platform_id,
                                report.platform_public_key),
            report.platform_certificate);
    if (valid)
        valid = crypto::verify(report.platform_public_key,
                               report_signing_payload(report),
                               report.evidence);
    AttestationVerdict v;
    v.report_digest = report_digest(report);
    v.valid = valid;
    v.service_signature = crypto::sign(
        key_.secret, verdict_signing_payload(v.report_digest, v.valid));
    return v;
}

Bytes encode_ecall_result(const EcallResult& r) {
    codec::ByteWriter w;
    w.u16(static_cast<uint16_t>(r.status));
    w.str(r.message);
    w.bytes(r.payload);
    return w.take();
}

EcallResult decode_ecall_result(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        EcallResult out;
        out.status = static_cast<Status>(r.u16());
        out.message = r.str();
        out.payload = r.bytes();
        return out;
    });
}

crypto::Digest measure(const EnclaveProgram& program) {
    return crypto::sha256("enclave-program:" + program.code_identity());
}

TeeHost::TeeHost(DetRng rng) : rng_(rng) {}

void TeeHost::add_platform(const std::string& platform_id,
                           AttestationService* service) {
    require(!platforms_.count(platform_id), Status::config_error,
            "platform already exists: " + platform_id);
    Platform p;
    DetRng platform_rng = rng_.child("platform/" + platform_id);
    p.secret = crypto::random_key(platform_rng);
    p.attestation_key = crypto::sign_keygen(platform_rng);
    if (service)
        p.certificate = service->certify_platform(
            platform_id, p.attestation_key.public_key);
    platforms_.emplace(platform_id, std::move(p));
}

crypto::Digest TeeHost::register_program(
    std::shared_ptr<EnclaveProgram> program) {
    crypto::Digest m = measure(*program);
    programs_[m] = std::move(program);
    return m;
}

InstancePtr TeeHost::create(const std::string& platform_id,
                            const crypto::Digest& measurement) {
    require(platforms_.count(platform_id) > 0, Status::config_error,
            "unknown platform: " + platform_id);
    auto it = programs_.find(measurement);
    require(it != programs_.end(), Status::measurement_mismatch,
            "no program with measurement " + measurement.hex());
    uint64_t id = next_instance_id_++;
    DetRng instance_rng =
        rng_.child("instance/" + platform_id + "/" + std::to_string(id));
    // make_shared cannot reach the private constructor
    return InstancePtr(
        new Instance(measurement, platform_id, id, it->second, instance_rng));
}

EcallResult TeeHost::ecall(Instance& instance, const std::string& entry,
                           ByteView args, HostCallHandler* host) {
    std::lock_guard<std::mutex> lock(instance.call_mutex_);
    EnclaveRuntime rt(*this, instance, host);
    try {
        Bytes payload =
            instance.program_->handle(rt, *instance.state_, entry, args);
        return EcallResult{Status::ok, "", std::move(payload)};
    } catch (const Error& e) {
        return EcallResult{e.status, e.what(), {}};
    }
}

TeeHost::Platform& TeeHost::platform_of(const Instance& instance) {
    auto it = platforms_.find(instance.platform_id());
    require(it != platforms_.end(), Status::config_error,
            "platform vanished: " + instance.platform_id());
    return it->second;
}

const crypto::Digest& EnclaveRuntime::measurement() const {
    return instance_.measurement_;
}

const std::string& EnclaveRuntime::platform_id() const {
    return instance_.platform_id_;
}

DetRng& EnclaveRuntime::rng() { return instance_.rng_; }

Bytes EnclaveRuntime::ocall(const std::string& channel, ByteView payload) {
    require(host_ != nullptr, Status::config_error,
            "ocall without a host handler: " + channel);
    return host_->ocall(channel, payload);
}

crypto::SealedBlob EnclaveRuntime::seal(ByteView payload) {
    TeeHost::Platform& platform = env_.platform_of(instance_);
    crypto::SymmetricKey key =
        crypto::derive_seal_key(platform.secret, instance_.measurement_);
    crypto::SealedBlob blob;
    blob.producer_measurement = instance_.measurement_;
    blob.box = crypto::aead_encrypt(key, crypto::random_nonce(instance_.rng_),
                                    payload, instance_.measurement_.bytes);
    return blob;
}

Bytes EnclaveRuntime::unseal(const crypto::SealedBlob& blob) {
    require(blob.producer_measurement == instance_.measurement_,
            Status::unseal_authentication_failure,
            "sealed blob from another measurement");
    TeeHost::Platform& platform = env_.platform_of(instance_);
    crypto::SymmetricKey key =
        crypto::derive_seal_key(platform.secret, instance_.measurement_);
    try {
        return crypto::aead_decrypt(key, blob.box,
                                    instance_.measurement_.bytes);
    } catch (const Error&) {
        raise(Status::unseal_authentication_failure,
              "sealed blob rejected");
    }
}

AttestationReport EnclaveRuntime::local_report(const ReportData& data) {
    TeeHost::Platform& platform = env_.platform_of(instance_);
    AttestationReport r;
    r.form = ReportForm::local;
    r.platform_id = instance_.platform_id_;
    r.measurement = instance_.measurement_;
    r.report_data = data;
    crypto::SymmetricKey mac_key = crypto::hkdf_key(
        platform.secret, to_bytes("chainclave/local-report/v1"));
    crypto::MacTag tag = crypto::mac(mac_key, report_signing_payload(r));
    r.evidence.assign(tag.begin(), tag.end());
    return r;
}

bool EnclaveRuntime::verify_local_report(
    const AttestationReport& report) const {
    if (report.form != ReportForm::local) return false;
    if (report.evidence.size() != crypto::kMacTagSize) return false;
    TeeHost::Platform& platform = env_.platform_of(instance_);
    crypto::SymmetricKey mac_key = crypto::hkdf_key(
        platform.secret, to_bytes("chainclave/local-report/v1"));
    crypto::MacTag tag;
    std::copy(report.evidence.begin(), report.evidence.end(), tag.begin());
    return crypto::mac_verify(mac_key, report_signing_payload(report), tag);
}

AttestationReport EnclaveRuntime::quote(const ReportData& data) {
    TeeHost::Platform& platform = env_.platform_of(instance_);
    require(!platform.certificate.empty(), Status::uncertified_platform,
            "platform has no attestation certificate");
    AttestationReport r;
    r.form = ReportForm::remote;
    r.platform_id = instance_.platform_id_;
    r.measurement = instance_.measurement_;
    r.report_data = data;
    r.platform_public_key = platform.attestation_key.public_key;
    r.platform_certificate = platform.certificate;
    r.evidence = crypto::sign(platform.attestation_key.secret,
                              report_signing_payload(r));
    return r;
}

}  // namespace chainclave::tee
