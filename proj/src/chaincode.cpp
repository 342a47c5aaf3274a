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

#include "chainclave/chaincode.hpp"

namespace chainclave::cc {

void write_operation(codec::ByteWriter& w, const Operation& op) {
    w.str(op.function);
    w.list(op.args,
           [](codec::ByteWriter& w2, const Bytes& a) { w2.bytes(a); });
}

Operation read_operation(codec::ByteReader& r) {
    Operation op;
    op.function = r.str();
    op.args = r.list<Bytes>([](codec::ByteReader& r2) { return r2.bytes(); });
    return op;
}

namespace {

void write_signed_operation_body(codec::ByteWriter& w,
                                 const SignedOperation& s) {
    w.str(s.client_id);
    w.str(s.chaincode_id);
    write_operation(w, s.op);
    w.bytes(s.nonce);
    w.opt(s.state_key,
          [](codec::ByteWriter& w2, const crypto::SymmetricKey& k) {
              w2.fixed(k.bytes);
          });
}

}  // namespace

Bytes operation_signing_payload(const SignedOperation& s) {
    codec::ByteWriter w;
    w.str("chainclave/op/v1");
    write_signed_operation_body(w, s);
    return w.take();
}

Bytes encode_signed_operation(const SignedOperation& s) {
    codec::ByteWriter w;
    write_signed_operation_body(w, s);
    w.bytes(s.client_signature);
    return w.take();
}

SignedOperation decode_signed_operation(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        SignedOperation s;
        s.client_id = r.str();
        s.chaincode_id = r.str();
        s.op = read_operation(r);
        s.nonce = r.bytes();
        s.state_key = r.opt<crypto::SymmetricKey>([](codec::ByteReader& r2) {
            crypto::SymmetricKey k;
            k.bytes = r2.fixed<crypto::kSymKeySize>();
            return k;
        });
        s.client_signature = r.bytes();
        return s;
    });
}

SignedOperation make_signed_operation(
    const std::string& client_id, const Bytes& client_secret,
    const std::string& chaincode_id, Operation op, DetRng& rng,
    std::optional<crypto::SymmetricKey> state_key) {
    SignedOperation s;
    s.client_id = client_id;
    s.chaincode_id = chaincode_id;
    s.op = std::move(op);
    s.nonce = rng.bytes(16);
    s.state_key = state_key;
    s.client_signature =
        crypto::sign(client_secret, operation_signing_payload(s));
    return s;
}

Bytes encode_result(const Result& r) {
    codec::ByteWriter w;
    w.flag(r.ok);
    w.str(r.code);
    w.bytes(r.payload);
    return w.take();
}

Result decode_result(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        Result out;
        out.ok = r.flag();
        out.code = r.str();
        out.payload = r.bytes();
        return out;
    });
}

}  // namespace chainclave::cc
