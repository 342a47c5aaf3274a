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

#include "chainclave/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>
#include <openssl/kdf.h>

#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>

namespace chainclave::crypto {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* c) const { EVP_MD_CTX_free(c); }
};
struct CipherCtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
struct PkeyCtxDeleter {
    void operator()(EVP_PKEY_CTX* c) const { EVP_PKEY_CTX_free(c); }
};

using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;
using CipherCtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CipherCtxDeleter>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, PkeyCtxDeleter>;

void ossl_check(int ok, const char* what) {
    if (ok != 1) throw std::runtime_error(std::string("openssl: ") + what);
}

PkeyPtr ed25519_secret(const Bytes& seed) {
    if (seed.size() != kSecretKeySize)
        throw std::invalid_argument("bad signing secret size");
    PkeyPtr p(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                           seed.data(), seed.size()));
    if (!p) throw std::runtime_error("openssl: ed25519 private key");
    return p;
}

// Debug nonce-reuse registry (see header).
std::mutex g_nonce_mutex;
bool g_nonce_detection = false;
std::set<std::array<uint8_t, kDigestSize>> g_nonce_seen;

void note_nonce_use(const SymmetricKey& key, const Nonce& nonce) {
    std::lock_guard<std::mutex> lock(g_nonce_mutex);
    if (!g_nonce_detection) return;
    codec::ByteWriter w;
    w.fixed(key.bytes);
    w.fixed(nonce);
    Digest d = sha256(w.view());
    if (!g_nonce_seen.insert(d.bytes).second)
        raise(Status::nonce_reuse, "aead nonce reused under the same key");
}

}  // namespace

Digest sha256(ByteView data) {
    Digest out;
    unsigned int len = 0;
    ossl_check(EVP_Digest(data.data(), data.size(), out.bytes.data(), &len,
                          EVP_sha256(), nullptr),
               "sha256");
    return out;
}

Digest sha256(std::string_view data) {
    return sha256(ByteView(reinterpret_cast<const uint8_t*>(data.data()),
                           data.size()));
}

SigningKeyPair sign_keygen(DetRng& rng) {
    SigningKeyPair kp;
    kp.secret = rng.bytes(kSecretKeySize);
    PkeyPtr p = ed25519_secret(kp.secret);
    size_t len = kPublicKeySize;
    kp.public_key.resize(len);
    ossl_check(EVP_PKEY_get_raw_public_key(p.get(), kp.public_key.data(), &len),
               "ed25519 public key");
    return kp;
}

Bytes sign(const Bytes& secret, ByteView message) {
    PkeyPtr p = ed25519_secret(secret);
    MdCtxPtr ctx(EVP_MD_CTX_new());
    ossl_check(
        EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, p.get()),
        "sign init");
    size_t len = kSignatureSize;
    Bytes sig(len);
    ossl_check(EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(),
                              message.size()),
               "sign");
    sig.resize(len);
    return sig;
}

bool verify(const Bytes& public_key, ByteView message, ByteView signature) {
    if (public_key.size() != kPublicKeySize ||
        signature.size() != kSignatureSize)
        return false;
    PkeyPtr p(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                          public_key.data(),
                                          public_key.size()));
    if (!p) return false;
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr, p.get()) !=
        1)
        return false;
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                            message.data(), message.size()) == 1;
}

SymmetricKey random_key(DetRng& rng) {
    SymmetricKey key;
    rng.fill(key.bytes);
    return key;
}

Nonce random_nonce(DetRng& rng) {
    Nonce nonce;
    rng.fill(nonce);
    return nonce;
}

AeadBox aead_encrypt(const SymmetricKey& key, const Nonce& nonce,
                     ByteView plaintext, ByteView associated_data) {
    note_nonce_use(key, nonce);
    CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
    ossl_check(EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr,
                                  nullptr, nullptr),
               "gcm init");
    ossl_check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                                   kNonceSize, nullptr),
               "gcm ivlen");
    ossl_check(EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr,
                                  key.bytes.data(), nonce.data()),
               "gcm key");
    int len = 0;
    if (!associated_data.empty())
        ossl_check(EVP_EncryptUpdate(ctx.get(), nullptr, &len,
                                     associated_data.data(),
                                     static_cast<int>(associated_data.size())),
                   "gcm aad");
    AeadBox box;
    box.nonce = nonce;
    box.ciphertext.resize(plaintext.size());
    if (!plaintext.empty())
        ossl_check(EVP_EncryptUpdate(ctx.get(), box.ciphertext.data(), &len,
                                     plaintext.data(),
                                     static_cast<int>(plaintext.size())),
                   "gcm encrypt");
    ossl_check(
        EVP_EncryptFinal_ex(ctx.get(), box.ciphertext.data() + len, &len),
        "gcm final");
    ossl_check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG,
                                   kAeadTagSize, box.tag.data()),
               "gcm tag");
    return box;
}

Bytes aead_decrypt(const SymmetricKey& key, const AeadBox& box,
                   ByteView associated_data) {
    CipherCtxPtr ctx(EVP_CIPHER_CTX_new());
    ossl_check(EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr,
                                  nullptr, nullptr),
               "gcm init");
    ossl_check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN,
                                   kNonceSize, nullptr),
               "gcm ivlen");
    ossl_check(EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr,
                                  key.bytes.data(), box.nonce.data()),
               "gcm key");
    int len = 0;
    if (!associated_data.empty())
        ossl_check(EVP_DecryptUpdate(ctx.get(), nullptr, &len,
                                     associated_data.data(),
                                     static_cast<int>(associated_data.size())),
                   "gcm aad");
    Bytes plaintext(box.ciphertext.size());
    if (!box.ciphertext.empty())
        ossl_check(EVP_DecryptUpdate(ctx.get(), plaintext.data(), &len,
                                     box.ciphertext.data(),
                                     static_cast<int>(box.ciphertext.size())),
                   "gcm decrypt");
    AeadTag tag = box.tag;
    ossl_check(EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG,
                                   kAeadTagSize, tag.data()),
               "gcm set tag");
    int tail = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), plaintext.data() + len, &tail) != 1)
        raise(Status::authentication_failure, "aead tag mismatch");
    return plaintext;
}

BoxKeyPair box_keygen(DetRng& rng) {
    BoxKeyPair kp;
    kp.secret = rng.bytes(kSecretKeySize);
    PkeyPtr p(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                           kp.secret.data(),
                                           kp.secret.size()));
    if (!p) throw std::runtime_error("openssl: x25519 private key");
    size_t len = kPublicKeySize;
    kp.public_key.resize(len);
    ossl_check(EVP_PKEY_get_raw_public_key(p.get(), kp.public_key.data(), &len),
               "x25519 public key");
    return kp;
}

namespace {

Bytes x25519_shared(const Bytes& secret, const Bytes& peer_public) {
    if (secret.size() != kSecretKeySize ||
        peer_public.size() != kPublicKeySize)
        raise(Status::decryption_failure, "bad x25519 key size");
    PkeyPtr sk(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                            secret.data(), secret.size()));
    PkeyPtr pk(EVP_PKEY_new_raw_public_key(EVP_PKEY_X25519, nullptr,
                                           peer_public.data(),
                                           peer_public.size()));
    if (!sk || !pk) raise(Status::decryption_failure, "bad x25519 key");
    PkeyCtxPtr ctx(EVP_PKEY_CTX_new(sk.get(), nullptr));
    ossl_check(EVP_PKEY_derive_init(ctx.get()), "x25519 derive init");
    ossl_check(EVP_PKEY_derive_set_peer(ctx.get(), pk.get()), "x25519 peer");
    size_t len = 0;
    ossl_check(EVP_PKEY_derive(ctx.get(), nullptr, &len), "x25519 size");
    Bytes shared(len);
    ossl_check(EVP_PKEY_derive(ctx.get(), shared.data(), &len), "x25519");
    shared.resize(len);
    return shared;
}

SymmetricKey hkdf_expand(ByteView secret, ByteView info) {
    PkeyCtxPtr ctx(EVP_PKEY_CTX_new_id(EVP_PKEY_HKDF, nullptr));
    ossl_check(EVP_PKEY_derive_init(ctx.get()), "hkdf init");
    ossl_check(EVP_PKEY_CTX_set_hkdf_md(ctx.get(), EVP_sha256()), "hkdf md");
    ossl_check(EVP_PKEY_CTX_set1_hkdf_key(ctx.get(), secret.data(),
                                          static_cast<int>(secret.size())),
               "hkdf key");
    ossl_check(EVP_PKEY_CTX_add1_hkdf_info(ctx.get(), info.data(),
                                           static_cast<int>(info.size())),
               "hkdf info");
    SymmetricKey out;
    size_t len = out.bytes.size();
    ossl_check(EVP_PKEY_derive(ctx.get(), out.bytes.data(), &len), "hkdf");
    return out;
}

SymmetricKey hybrid_session_key(ByteView shared, const Bytes& eph_public,
                                const Bytes& recipient_public) {
    codec::ByteWriter info;
    info.str("chainclave/hybrid/v1");
    info.bytes(eph_public);
    info.bytes(recipient_public);
    return hkdf_expand(shared, info.view());
}

}  // namespace

Envelope hybrid_encrypt(const Bytes& recipient_public, ByteView plaintext,
                        DetRng& rng) {
    Envelope env;
    BoxKeyPair eph = box_keygen(rng);
    env.ephemeral_public = eph.public_key;
    Bytes shared = x25519_shared(eph.secret, recipient_public);
    SymmetricKey key =
        hybrid_session_key(shared, eph.public_key, recipient_public);
    env.box = aead_encrypt(key, random_nonce(rng), plaintext,
                           env.ephemeral_public);
    return env;
}

Bytes hybrid_decrypt(const Bytes& recipient_secret, const Envelope& env) {
    PkeyPtr sk(EVP_PKEY_new_raw_private_key(EVP_PKEY_X25519, nullptr,
                                            recipient_secret.data(),
                                            recipient_secret.size()));
    if (!sk) raise(Status::decryption_failure, "bad recipient secret");
    size_t len = kPublicKeySize;
    Bytes my_public(len);
    ossl_check(EVP_PKEY_get_raw_public_key(sk.get(), my_public.data(), &len),
               "x25519 public key");
    Bytes shared = x25519_shared(recipient_secret, env.ephemeral_public);
    SymmetricKey key =
        hybrid_session_key(shared, env.ephemeral_public, my_public);
    try {
        return aead_decrypt(key, env.box, env.ephemeral_public);
    } catch (const Error&) {
        raise(Status::decryption_failure, "hybrid envelope rejected");
    }
}

MacTag mac(const SymmetricKey& key, ByteView message) {
    MacTag tag{};
    unsigned int len = 0;
    if (HMAC(EVP_sha256(), key.bytes.data(),
             static_cast<int>(key.bytes.size()), message.data(),
             message.size(), tag.data(), &len) == nullptr)
        throw std::runtime_error("openssl: hmac");
    return tag;
}

bool mac_verify(const SymmetricKey& key, ByteView message, const MacTag& tag) {
    MacTag expected = mac(key, message);
    // Constant-time compare; timing is not part of the simulated threat model
    // but there is no reason to be sloppy.
    uint8_t diff = 0;
    for (size_t i = 0; i < expected.size(); ++i) diff |= expected[i] ^ tag[i];
    return diff == 0;
}

SymmetricKey hkdf_key(const SymmetricKey& secret, ByteView info) {
    return hkdf_expand(secret.bytes, info);
}

SymmetricKey derive_seal_key(const SymmetricKey& platform_secret,
                             const Digest& measurement) {
    codec::ByteWriter info;
    info.str("chainclave/seal/v1");
    info.fixed(measurement.bytes);
    return hkdf_key(platform_secret, info.view());
}

void set_nonce_reuse_detection(bool enabled) {
    std::lock_guard<std::mutex> lock(g_nonce_mutex);
    g_nonce_detection = enabled;
}

void clear_nonce_registry() {
    std::lock_guard<std::mutex> lock(g_nonce_mutex);
    g_nonce_seen.clear();
}

void write_digest(codec::ByteWriter& w, const Digest& d) { w.fixed(d.bytes); }

Digest read_digest(codec::ByteReader& r) {
    Digest d;
    d.bytes = r.fixed<kDigestSize>();
    return d;
}

void write_aead_box(codec::ByteWriter& w, const AeadBox& b) {
    w.fixed(b.nonce);
    w.bytes(b.ciphertext);
    w.fixed(b.tag);
}

AeadBox read_aead_box(codec::ByteReader& r) {
    AeadBox b;
    b.nonce = r.fixed<kNonceSize>();
    b.ciphertext = r.bytes();
    b.tag = r.fixed<kAeadTagSize>();
    return b;
}

void write_envelope(codec::ByteWriter& w, const Envelope& e) {
    w.bytes(e.ephemeral_public);
    write_aead_box(w, e.box);
}

Envelope read_envelope(codec::ByteReader& r) {
    Envelope e;
    e.ephemeral_public = r.bytes();
    e.box = read_aead_box(r);
    return e;
}

void write_sealed_blob(codec::ByteWriter& w, const SealedBlob& b) {
    write_digest(w, b.producer_measurement);
    write_aead_box(w, b.box);
}

SealedBlob read_sealed_blob(codec::ByteReader& r) {
    SealedBlob b;
    b.producer_measurement = read_digest(r);
    b.box = read_aead_box(r);
    return b;
}

Bytes encode_envelope(const Envelope& e) {
    codec::ByteWriter w;
    write_envelope(w, e);
    return w.take();
}

Envelope decode_envelope(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        return read_envelope(r);
    });
}

Bytes encode_sealed_blob(const SealedBlob& b) {
    codec::ByteWriter w;
    write_sealed_blob(w, b);
    return w.take();
}

SealedBlob decode_sealed_blob(ByteView b) {
    return codec::decode_all(b, [](codec::ByteReader& r) {
        return read_sealed_blob(r);
    });
}

}  // namespace chainclave::crypto
