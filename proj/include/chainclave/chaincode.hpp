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
 * Chaincode programming interface, shared by plain chaincodes executed
 * directly by a peer and chaincodes executed inside a chaincode enclave. A
 * program sees the same shim either way; state verification and encryption
 * are properties of the shim, not of the program.
 */

#pragma once

#include <memory>

#include "chainclave/crypto.hpp"

namespace chainclave::cc {

struct Operation {
    std::string function;
    std::vector<Bytes> args;

    std::string arg_str(size_t i) const {
        return i < args.size() ? chainclave::to_string(args[i]) : "";
    }
};

void write_operation(codec::ByteWriter& w, const Operation& op);
Operation read_operation(codec::ByteReader& r);

/*
 * A client-authenticated operation. The signature covers the operation, the
 * nonce, and the target chaincode, so an operation cannot be replayed
 * against a different contract. For client-based state encryption the
 * client attaches its data key; the key travels only inside the encrypted
 * proposal envelope.
 */
struct SignedOperation {
    std::string client_id;
    std::string chaincode_id;
    Operation op;
    Bytes nonce;
    std::optional<crypto::SymmetricKey> state_key;
    Bytes client_signature;
};

Bytes operation_signing_payload(const SignedOperation& s);
Bytes encode_signed_operation(const SignedOperation& s);
SignedOperation decode_signed_operation(ByteView b);

SignedOperation make_signed_operation(const std::string& client_id,
                                      const Bytes& client_secret,
                                      const std::string& chaincode_id,
                                      Operation op, DetRng& rng,
                                      std::optional<crypto::SymmetricKey>
                                          state_key = std::nullopt);

// Application-level chaincode failure. The shim turns it into a signed
// error result; reads stay endorsed, writes are discarded.
struct ChaincodeAppError {
    std::string code;
    std::string detail;
};

struct Result {
    bool ok = false;
    std::string code;  // app error code when !ok
    Bytes payload;
};

Bytes encode_result(const Result& r);
Result decode_result(ByteView b);

class Shim {
  public:
    virtual ~Shim() = default;

    // Reads committed state; pending writes of this invocation shadow it
    // (and shadowed reads do not enter the readset).
    virtual std::optional<Bytes> get_state(const std::string& key) = 0;
    virtual void put_state(const std::string& key, ByteView value) = 0;
    // Committed keys under prefix, sorted; does not see pending writes.
    virtual std::vector<std::pair<std::string, Bytes>> get_range(
        const std::string& prefix) = 0;
    // Authenticated submitter of the operation.
    virtual const std::string& caller() const = 0;
};

class ChaincodeProgram {
  public:
    virtual ~ChaincodeProgram() = default;
    virtual std::string name() const = 0;
    virtual std::string version() const = 0;
    // Throws ChaincodeAppError for application failures; returns the result
    // payload otherwise.
    virtual Bytes invoke(Shim& shim, const Operation& op) = 0;
};

}  // namespace chainclave::cc
