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

#include "chainclave/errors.hpp"

namespace chainclave {

const char* status_name(Status s) {
    switch (s) {
        case Status::ok: return "Ok";
        case Status::codec_error: return "CodecError";
        case Status::config_error: return "ConfigError";
        case Status::missing_field: return "MissingField";
        case Status::script_reference_error: return "ScriptReferenceError";
        case Status::authentication_failure: return "AuthenticationFailure";
        case Status::decryption_failure: return "DecryptionFailure";
        case Status::nonce_reuse: return "NonceReuse";
        case Status::unknown_entry_point: return "UnknownEntryPoint";
        case Status::uncertified_platform: return "UncertifiedPlatform";
        case Status::unseal_authentication_failure:
            return "UnsealAuthenticationFailure";
        case Status::measurement_mismatch: return "MeasurementMismatch";
        case Status::report_data_mismatch: return "ReportDataMismatch";
        case Status::invalid_attestation: return "InvalidAttestation";
        case Status::bad_orderer_signature: return "BadOrdererSignature";
        case Status::sequence_gap: return "SequenceGap";
        case Status::hash_chain_break: return "HashChainBreak";
        case Status::malformed_genesis: return "MalformedGenesis";
        case Status::foreign_blockchain: return "ForeignBlockchain";
        case Status::invalid_verdict: return "InvalidVerdict";
        case Status::value_hash_mismatch: return "ValueHashMismatch";
        case Status::stale_delta: return "StaleDelta";
        case Status::crosscheck_mismatch: return "CrosscheckMismatch";
        case Status::already_initialized: return "AlreadyInitialized";
        case Status::already_setup: return "AlreadySetup";
        case Status::not_initialized: return "NotInitialized";
        case Status::bind_rejected: return "BindRejected";
        case Status::wrong_mode: return "WrongMode";
        case Status::key_already_provisioned: return "KeyAlreadyProvisioned";
        case Status::key_not_provisioned: return "KeyNotProvisioned";
        case Status::state_verification_failure:
            return "StateVerificationFailure";
        case Status::chaincode_error: return "ChaincodeError";
    }
    return "Unknown";
}

}  // namespace chainclave
