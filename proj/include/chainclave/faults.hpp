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

namespace chainclave {

/*
 * Deliberate-weakening switches for mutation testing. Each one disables a
 * protection that the attack corpus is expected to catch: with a switch on,
 * at least one corpus script must flip the security oracle to FAIL. They are
 * wired through test code only; the CLI never touches them.
 */
struct FaultFlags {
    bool disable_meta_signature_check = false;  // chaincode enclave trusts
                                                // unsigned metadata responses
    bool disable_sequence_check = false;        // ledger enclave accepts any
                                                // block sequence or prev hash
    bool disable_attestation_check = false;     // registry and validators skip
                                                // attestation evidence checks
};

FaultFlags& faults();
void reset_faults();

}  // namespace chainclave
