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
#include "doctest.h"

using namespace chainclave;

namespace {

/*
 * Minimal test program: a vault that keeps one secret byte string, seals and
 * unseals it, produces reports over a digest of its own choosing, and talks
 * back to the host over an echo ocall.
 */
struct VaultState : tee::EnclaveState {
    Bytes secret;
};

class VaultProgram : public tee::EnclaveProgram {
  public:
    explicit VaultProgram(std::string identity = "vault/1")
        : identity_(std::move(identity)) {}

    std::string code_identity() const override { return identity_; }

    std::unique_ptr<tee::EnclaveState> create_state() const override {
        return std::make_unique<VaultState>();
    }

    Bytes handle(tee::EnclaveRuntime& rt, tee::EnclaveState& state,
                 const std::string& entry, ByteView args) override {
        auto& st = static_cast<VaultState&>(state);
        if (entry == "put") {
            st.secret = Bytes(args.begin(), args.end());
            return {};
        }
        if (entry == "get") return st.secret;
        if (entry == "seal")
            return crypto::encode_sealed_blob(rt.seal(st.secret));
        if (entry == "unseal") {
            st.secret = rt.unseal(crypto::decode_sealed_blob(args));
            return st.secret;
        }
        if (entry == "report") {
            // Report data is derived in here; the host only picks the tag.
            tee::ReportData data = tee::report_data_from_digest(
                crypto::sha256(concat(to_bytes("vault-report:"), args)));
            return tee::encode_report(rt.local_report(data));
        }
        if (entry == "check_report") {
            tee::AttestationReport r = tee::decode_report(args);
            Bytes out{static_cast<uint8_t>(
                rt.verify_local_report(r) ? 1 : 0)};
            return out;
        }
        if (entry == "quote") {
            tee::ReportData data = tee::report_data_from_digest(
                crypto::sha256(concat(to_bytes("vault-quote:"), args)));
            return tee::encode_report(rt.quote(data));
        }
        if (entry == "echo") return rt.ocall("echo", args);
        if (entry == "fail") raise(Status::chaincode_error, "deliberate");
        raise(Status::unknown_entry_point, "vault: " + entry);
    }

  private:
    std::string identity_;
};

struct Echoer : tee::HostCallHandler {
    std::vector<std::string> channels;
    Bytes ocall(const std::string& channel, ByteView payload) override {
        channels.push_back(channel);
        Bytes out = to_bytes("echo:");
        out.insert(out.end(), payload.begin(), payload.end());
        return out;
    }
};

struct Rig {
    DetRng rng{31};
    crypto::SigningKeyPair service_key = crypto::sign_keygen(rng);
    tee::AttestationService service{service_key};
    tee::TeeHost host{DetRng(32)};
    crypto::Digest vault_m;

    Rig() {
        host.add_platform("plat-a", &service);
        host.add_platform("plat-b", &service);
        host.add_platform("plat-naked", nullptr);
        vault_m = host.register_program(std::make_shared<VaultProgram>());
    }

    Bytes call(tee::Instance& inst, const std::string& entry, ByteView args,
               tee::HostCallHandler* h = nullptr) {
        tee::EcallResult r = host.ecall(inst, entry, args, h);
        REQUIRE_MESSAGE(r.ok(), r.message);
        return r.payload;
    }
};

}  // namespace

TEST_CASE("measurement is the digest of the code identity") {
    VaultProgram p;
    CHECK(tee::measure(p) ==
          crypto::sha256(std::string_view("enclave-program:vault/1")));
    CHECK(tee::measure(VaultProgram("vault/2")) != tee::measure(p));
}

TEST_CASE("instances are created per platform from registered measurements") {
    Rig rig;
    tee::InstancePtr inst = rig.host.create("plat-a", rig.vault_m);
    CHECK(inst->measurement() == rig.vault_m);
    CHECK(inst->platform_id() == "plat-a");

    CHECK_THROWS_AS(rig.host.create("plat-a", crypto::sha256(
                                                  std::string_view("nope"))),
                    Error);
    CHECK_THROWS_AS(rig.host.create("no-such-platform", rig.vault_m), Error);
}

TEST_CASE("state is opaque and reachable only through entry points") {
    Rig rig;
    tee::InstancePtr inst = rig.host.create("plat-a", rig.vault_m);
    rig.call(*inst, "put", to_bytes("top secret"));
    CHECK(to_string(rig.call(*inst, "get", {})) == "top secret");

    // A second instance of the same program shares nothing.
    tee::InstancePtr other = rig.host.create("plat-a", rig.vault_m);
    CHECK(rig.call(*other, "get", {}).empty());

    tee::EcallResult r = rig.host.ecall(*inst, "no-entry", {});
    CHECK(r.status == Status::unknown_entry_point);
}

TEST_CASE("program errors fold into the ecall result") {
    Rig rig;
    tee::InstancePtr inst = rig.host.create("plat-a", rig.vault_m);
    tee::EcallResult r = rig.host.ecall(*inst, "fail", {});
    CHECK_FALSE(r.ok());
    CHECK(r.status == Status::chaincode_error);
    CHECK(r.message == "deliberate");

    // The failed call left the instance usable.
    rig.call(*inst, "put", to_bytes("x"));
    CHECK(to_string(rig.call(*inst, "get", {})) == "x");
}

TEST_CASE("ocalls reach the handler supplied for this call only") {
    Rig rig;
    tee::InstancePtr inst = rig.host.create("plat-a", rig.vault_m);
    Echoer h;
    Bytes out = rig.call(*inst, "echo", to_bytes("ping"), &h);
    CHECK(to_string(out) == "echo:ping");
    CHECK(h.channels == std::vector<std::string>{"echo"});

    // Without a handler the runtime refuses the ocall.
    tee::EcallResult r = rig.host.ecall(*inst, "echo", to_bytes("ping"));
    CHECK_FALSE(r.ok());
}

TEST_CASE("sealimage round-trips only for same program and platform") {
    Rig rig;
    tee::InstancePtr a1 = rig.host.create("plat-a", rig.vault_m);
    rig.call(*a1, "put", to_bytes("sealed payload"));
    Bytes blob = rig.call(*a1, "seal", {});

    // Fresh instance, same program, same platform: opens.
    tee::InstancePtr a2 = rig.host.create("plat-a", rig.vault_m);
    CHECK(to_string(rig.call(*a2, "unseal", blob)) == "sealed payload");

    // Same program on another platform: refused.
    tee::InstancePtr b1 = rig.host.create("plat-b", rig.vault_m);
    tee::EcallResult cross = rig.host.ecall(*b1, "unseal", blob);
    CHECK(cross.status == Status::unseal_authentication_failure);

    // Different program on the same platform: refused.
    crypto::Digest other_m =
        rig.host.register_program(std::make_shared<VaultProgram>("vault/2"));
    tee::InstancePtr o1 = rig.host.create("plat-a", other_m);
    tee::EcallResult other = rig.host.ecall(*o1, "unseal", blob);
    CHECK(other.status == Status::unseal_authentication_failure);

    // Tampered ciphertext: refused.
    crypto::SealedBlob bent = crypto::decode_sealed_blob(blob);
    bent.box.ciphertext[0] ^= 1;
    tee::EcallResult t =
        rig.host.ecall(*a2, "unseal", crypto::encode_sealed_blob(bent));
    CHECK(t.status == Status::unseal_authentication_failure);
}

TEST_CASE("local reports verify on their own platform only") {
    Rig rig;
    tee::InstancePtr a = rig.host.create("plat-a", rig.vault_m);
    tee::InstancePtr a2 = rig.host.create("plat-a", rig.vault_m);
    tee::InstancePtr b = rig.host.create("plat-b", rig.vault_m);

    Bytes report = rig.call(*a, "report", to_bytes("t1"));
    CHECK(rig.call(*a2, "check_report", report) == Bytes{1});
    CHECK(rig.call(*b, "check_report", report) == Bytes{0});

    // The report pins measurement and enclave-chosen data.
    tee::AttestationReport r = tee::decode_report(report);
    CHECK(r.form == tee::ReportForm::local);
    CHECK(r.measurement == rig.vault_m);
    CHECK(r.report_data ==
          tee::report_data_from_digest(
              crypto::sha256(std::string_view("vault-report:t1"))));

    tee::AttestationReport bent = r;
    bent.report_data[0] ^= 1;
    CHECK(rig.call(*a2, "check_report", tee::encode_report(bent)) ==
          Bytes{0});
}

TEST_CASE("quotes carry certified platform keys and service verdicts "
          "verify offline") {
    Rig rig;
    tee::InstancePtr a = rig.host.create("plat-a", rig.vault_m);
    tee::AttestationReport quote =
        tee::decode_report(rig.call(*a, "quote", to_bytes("q1")));
    CHECK(quote.form == tee::ReportForm::remote);
    CHECK(quote.platform_id == "plat-a");

    size_t before = rig.service.verify_count();
    tee::AttestationVerdict v = rig.service.verify(quote);
    CHECK(rig.service.verify_count() == before + 1);
    CHECK(v.valid);

    // Offline check needs only the service public key.
    CHECK(tee::verdict_check(v, tee::report_digest(quote),
                             rig.service.public_key()));

    // The verdict is bound to this exact report.
    tee::AttestationReport other = quote;
    other.report_data[0] ^= 1;
    CHECK_FALSE(tee::verdict_check(v, tee::report_digest(other),
                                   rig.service.public_key()));

    // A verdict signed by some other key is worthless.
    DetRng rng(55);
    crypto::SigningKeyPair fake = crypto::sign_keygen(rng);
    tee::AttestationVerdict forged = v;
    forged.service_signature = crypto::sign(fake.secret, to_bytes("junk"));
    CHECK_FALSE(tee::verdict_check(forged, tee::report_digest(quote),
                                   rig.service.public_key()));

    // Tampered quotes get a negative verdict.
    tee::AttestationVerdict neg = rig.service.verify(other);
    CHECK_FALSE(neg.valid);
}

TEST_CASE("uncertified platforms cannot quote but still seal") {
    Rig rig;
    tee::InstancePtr n = rig.host.create("plat-naked", rig.vault_m);
    tee::EcallResult r = rig.host.ecall(*n, "quote", to_bytes("q"));
    CHECK(r.status == Status::uncertified_platform);

    rig.call(*n, "put", to_bytes("local-only"));
    Bytes blob = rig.call(*n, "seal", {});
    tee::InstancePtr n2 = rig.host.create("plat-naked", rig.vault_m);
    CHECK(to_string(rig.call(*n2, "unseal", blob)) == "local-only");
}

TEST_CASE("report data packs a digest zero padded") {
    crypto::Digest d = crypto::sha256(std::string_view("x"));
    tee::ReportData rd = tee::report_data_from_digest(d);
    for (size_t i = 0; i < crypto::kDigestSize; ++i)
        CHECK(rd[i] == d.bytes[i]);
    for (size_t i = crypto::kDigestSize; i < tee::kReportDataSize; ++i)
        CHECK(rd[i] == 0);
}

TEST_CASE("ecall results and reports survive the codec") {
    tee::EcallResult r{Status::sequence_gap, "gap at 7", to_bytes("pay")};
    tee::EcallResult back =
        tee::decode_ecall_result(tee::encode_ecall_result(r));
    CHECK(back.status == Status::sequence_gap);
    CHECK(back.message == "gap at 7");
    CHECK(back.payload == r.payload);

    Rig rig;
    tee::InstancePtr a = rig.host.create("plat-a", rig.vault_m);
    Bytes enc = rig.call(*a, "report", to_bytes("z"));
    Bytes trailing = enc;
    trailing.push_back(0);
    CHECK_THROWS_AS(tee::decode_report(trailing), Error);
}
