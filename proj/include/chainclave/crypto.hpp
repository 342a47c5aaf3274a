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
 * Cryptographic primitives, backed by OpenSSL's libcrypto:
 *
 *   hash     SHA-256
 *   sign     Ed25519 (deterministic; secret keys are 32-byte seeds)
 *   aead     AES-128-GCM (12-byte nonce, 16-byte tag)
 *   hybrid   X25519 ephemeral agreement + HKDF-SHA256 + AES-128-GCM
 *   mac      HMAC-SHA256
 *   kdf      HKDF-SHA256 (seal keys, local-report keys)
 *
 * All key generation draws from an injected DetRng; nothing here touches an
 * entropy source of its own, so simulations replay exactly.
 */

#pragma once

#include <array>
#include <compare>
#include <optional>

#include "chainclave/bytes.hpp"
#include "chainclave/codec.hpp"
#include "chainclave/rng.hpp"

namespace chainclave::crypto {

inline constexpr size_t kDigestSize = 32;
inline constexpr size_t kSymKeySize = 16;
inline constexpr size_t kNonceSize = 12;
inline constexpr size_t kAeadTagSize = 16;
inline constexpr size_t kMacTagSize = 32;
inline constexpr size_t kPublicKeySize = 32;
inline constexpr size_t kSecretKeySize = 32;
inline constexpr size_t kSignatureSize = 64;

struct Digest {
    std::array<uint8_t, kDigestSize> bytes{};
    auto operator<=>(const Digest&) const = default;
    std::string hex() const { return to_hex(bytes); }
};

struct SymmetricKey {
    std::array<uint8_t, kSymKeySize> bytes{};
    auto operator<=>(const SymmetricKey&) const = default;
};

using Nonce = std::array<uint8_t, kNonceSize>;
using AeadTag = std::array<uint8_t, kAeadTagSize>;
using MacTag = std::array<uint8_t, kMacTagSize>;

struct AeadBox {
    Nonce nonce{};
    Bytes ciphertext;
    AeadTag tag{};
};

// Hybrid ciphertext: ephemeral X25519 public key plus AEAD box; the AEAD key
// is HKDF(X25519(eph, recipient)) and the ephemeral public key rides as
// associated data, so a swapped envelope fails authentication.
struct Envelope {
    Bytes ephemeral_public;
    AeadBox box;
};

struct SealedBlob {
    Digest producer_measurement{};
    AeadBox box;
};

struct SigningKeyPair {
    Bytes secret;      // 32-byte Ed25519 seed
    Bytes public_key;  // 32 bytes
};

struct BoxKeyPair {
    Bytes secret;      // 32-byte X25519 scalar
    Bytes public_key;  // 32 bytes
};

Digest sha256(ByteView data);
Digest sha256(std::string_view data);

SigningKeyPair sign_keygen(DetRng& rng);
Bytes sign(const Bytes& secret, ByteView message);
bool verify(const Bytes& public_key, ByteView message, ByteView signature);

SymmetricKey random_key(DetRng& rng);
Nonce random_nonce(DetRng& rng);

AeadBox aead_encrypt(const SymmetricKey& key, const Nonce& nonce,
                     ByteView plaintext, ByteView associated_data);
// Throws Error{authentication_failure} when the tag does not verify.
Bytes aead_decrypt(const SymmetricKey& key, const AeadBox& box,
                   ByteView associated_data);

BoxKeyPair box_keygen(DetRng& rng);
Envelope hybrid_encrypt(const Bytes& recipient_public, ByteView plaintext,
                        DetRng& rng);
// Throws Error{decryption_failure} for a wrong key or tampered envelope.
Bytes hybrid_decrypt(const Bytes& recipient_secret, const Envelope& env);

MacTag mac(const SymmetricKey& key, ByteView message);
bool mac_verify(const SymmetricKey& key, ByteView message, const MacTag& tag);

SymmetricKey hkdf_key(const SymmetricKey& secret, ByteView info);
SymmetricKey derive_seal_key(const SymmetricKey& platform_secret,
                             const Digest& measurement);

/*
 * Debug guard against (key, nonce) reuse under the AEAD. Off by default;
 * tests switch it on to prove the simulator never reuses a pair. When armed,
 * aead_encrypt throws Error{nonce_reuse} on a repeat.
 */
void set_nonce_reuse_detection(bool enabled);
void clear_nonce_registry();

// codec helpers
void write_digest(codec::ByteWriter& w, const Digest& d);
Digest read_digest(codec::ByteReader& r);
void write_aead_box(codec::ByteWriter& w, const AeadBox& b);
AeadBox read_aead_box(codec::ByteReader& r);
void write_envelope(codec::ByteWriter& w, const Envelope& e);
Envelope read_envelope(codec::ByteReader& r);
void write_sealed_blob(codec::ByteWriter& w, const SealedBlob& b);
SealedBlob read_sealed_blob(codec::ByteReader& r);

Bytes encode_envelope(const Envelope& e);
Envelope decode_envelope(ByteView b);
Bytes encode_sealed_blob(const SealedBlob& b);
SealedBlob decode_sealed_blob(ByteView b);

}  // namespace chainclave::crypto
