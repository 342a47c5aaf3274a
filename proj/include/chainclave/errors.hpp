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

#pragma once

#include <stdexcept>
#include <string>

namespace chainclave {

// Protocol-level rejection codes. Functions that can reject well-formed but
// unacceptable input return these (usually wrapped in an EcallResult); truly
// exceptional conditions (malformed bytes, broken invariants) throw Error.
enum class Status : uint16_t {
    ok = 0,

    // codec / config
    codec_error,
    config_error,
    missing_field,
    script_reference_error,

    // crypto
    authentication_failure,
    decryption_failure,
    nonce_reuse,

    // tee
    unknown_entry_point,
    uncertified_platform,
    unseal_authentication_failure,
    measurement_mismatch,
    report_data_mismatch,
    invalid_attestation,

    // ledger / validation
    bad_orderer_signature,
    sequence_gap,
    hash_chain_break,
    malformed_genesis,
    foreign_blockchain,
    invalid_verdict,
    value_hash_mismatch,
    stale_delta,
    crosscheck_mismatch,

    // enclave lifecycle
    already_initialized,
    already_setup,
    not_initialized,
    bind_rejected,
    wrong_mode,
    key_already_provisioned,
    key_not_provisioned,

    // chaincode execution
    state_verification_failure,
    chaincode_error,
};

const char* status_name(Status s);

struct Error : std::runtime_error {
    Status status;
    Error(Status s, const std::string& what)
        : std::runtime_error(what), status(s) {}
};

[[noreturn]] inline void raise(Status s, const std::string& what) {
    throw Error(s, what);
}

inline void require(bool cond, Status s, const std::string& what) {
    if (!cond) raise(s, what);
}

}  // namespace chainclave
