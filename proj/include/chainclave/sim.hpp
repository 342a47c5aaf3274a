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
 * Deterministic single-process network simulation: an attestation service,
 * a TEE host with one platform per peer, a solo orderer, peers that each run
 * a ledger enclave and (for enclave chaincodes) a chaincode enclave, and a
 * set of signing clients.
 *
 * Construction performs the full bootstrap: genesis on every peer, ledger
 * enclave initialization, chaincode enclave setup, on-chain registration of
 * every chaincode enclave through the registry chaincode, local binding of
 * each chaincode enclave to its peer's ledger enclave, and state-key
 * provisioning when the chaincode uses a shared state key. Everything a peer
 * needs across a restart (block log, sealed snapshots, sealed enclave
 * identities) lands in a per-peer directory.
 *
 * The bootstrap is an administrative act: enclaves register under an
 * attestation service the admin chose, exactly once. The adversary the rest
 * of the code defends against shows up afterwards, controlling hosts and
 * schedulers but not the bootstrap itself.
 */

#pragma once

#include <filesystem>

#include "chainclave/auction.hpp"
#include "chainclave/chaincode_enclave.hpp"
#include "chainclave/ledger.hpp"
#include "chainclave/ledger_enclave.hpp"
#include "chainclave/registry.hpp"
#include "chainclave/tee.hpp"

namespace chainclave::sim {

struct SimOptions {
    uint64_t seed = 42;
    size_t peers = 3;
    size_t block_size = 10;
    // A sealed ledger-enclave snapshot is taken whenever the committed
    // height is a multiple of this; 0 disables the cadence. The bootstrap
    // always leaves one baseline snapshot.
    uint64_t snapshot_interval = 10;
    uint32_t required_endorsements = 1;
    ledger::ChaincodeKind auction_kind = ledger::ChaincodeKind::enclave;
    ledger::StateEncryption encryption =
        ledger::StateEncryption::per_chaincode;
    bool encrypt_results = true;
    size_t extra_clients = 0;  // adds client0..clientN-1 bidders
    std::string data_dir;      // empty: fresh directory under the temp path
};

struct ClientIdentity {
    std::string id;
    crypto::SigningKeyPair sign;
    crypto::BoxKeyPair box;       // result decryption
    crypto::SymmetricKey data_key{};  // client-based state encryption
    DetRng rng{0};
};

// Where a submitted transaction ended up, as seen by an honest peer.
struct TxOutcome {
    crypto::Digest digest{};
    uint64_t block_seq = 0;
    uint32_t tx_index = 0;
    bool valid = false;
    std::optional<cc::Result> result;  // decoded, decrypted
    std::string text;  // "ok:<output>", "err:<code>", or "invalid"
};

class SimNet;

class Peer : public tee::HostCallHandler {
  public:
    // State access the chaincode enclave reaches through ocalls: get_state
    // and get_range from this peer's committed store, metadata challenges
    // relayed verbatim to this peer's ledger enclave.
    Bytes ocall(const std::string& channel, ByteView payload) override;

    const std::string& id() const { return id_; }
    const std::string& platform() const { return platform_; }
    size_t index() const { return index_; }
    const std::filesystem::path& dir() const { return dir_; }

    ledger::VersionedStore& store() { return store_; }
    const ledger::VersionedStore& store() const { return store_; }
    le::LedgerEnclaveClient& ledger_enclave() { return *le_; }
    cce::CceClient& chaincode_enclave(const std::string& name);
    bool has_enclave(const std::string& name) const {
        return cces_.count(name) > 0;
    }
    const cce::SetupResult& enclave_keys(const std::string& name) const;
    const crypto::SigningKeyPair& signing_key() const { return key_; }

    bool halted() const { return halted_; }
    const std::string& halt_reason() const { return halt_reason_; }

    ledger::Endorsement endorse(const ledger::TransactionProposal& p);

    // Full commit pipeline: peer-side validation, ledger-enclave validation,
    // crosscheck, commit, persistence, snapshot cadence. A flag mismatch
    // between peer and ledger enclave halts the peer.
    std::vector<bool> deliver_block(const ledger::Block& b);

    // Restart simulation. Shutdown drops the live enclave instances;
    // recover builds fresh ones from sealed snapshots plus the block log,
    // without re-attestation.
    void shutdown();
    void recover();

    const std::vector<std::pair<uint64_t, crypto::SealedBlob>>& snapshots()
        const {
        return snapshots_;
    }
    void take_snapshot();
    const crypto::SealedBlob& sealed_identity(const std::string& name) const;

    // Exactly what deliver_block evaluates blocks with.
    ledger::ValidationContext validation_context() const;

    Peer(const Peer&) = delete;
    Peer& operator=(const Peer&) = delete;

  private:
    friend class SimNet;
    Peer(SimNet& net, size_t index, std::string id, std::string platform,
         crypto::SigningKeyPair key, std::filesystem::path dir);

    void start_enclaves();
    void persist_block(const ledger::Block& b, const std::vector<bool>& flags);
    void halt(const std::string& reason);

    SimNet* net_;
    size_t index_;
    std::string id_;
    std::string platform_;
    crypto::SigningKeyPair key_;
    std::filesystem::path dir_;
    ledger::VersionedStore store_;
    std::optional<le::LedgerEnclaveClient> le_;
    std::map<std::string, cce::CceClient> cces_;
    std::map<std::string, cce::SetupResult> cce_keys_;
    std::map<std::string, crypto::SealedBlob> cce_identities_;
    std::vector<std::pair<uint64_t, crypto::SealedBlob>> snapshots_;
    bool halted_ = false;
    std::string halt_reason_;
};

class SimNet {
  public:
    explicit SimNet(SimOptions opt);
    ~SimNet();
    SimNet(const SimNet&) = delete;
    SimNet& operator=(const SimNet&) = delete;

    // client pipeline
    ledger::TransactionProposal make_proposal(const std::string& client,
                                              const std::string& chaincode,
                                              cc::Operation op);
    ledger::Transaction assemble(const ledger::TransactionProposal& p,
                                 const std::vector<size_t>& endorsers);
    void submit(ledger::Transaction tx);
    // Cuts every pending block and delivers to all auto-delivery peers.
    std::vector<ledger::Block> commit_pending();
    // One operation end to end on a fresh block.
    TxOutcome run_op(const std::string& client, const std::string& chaincode,
                     cc::Operation op, std::vector<size_t> endorsers = {0});
    // Looks a committed transaction up in the delivered history.
    TxOutcome outcome_of(const ledger::Transaction& tx,
                         const std::string& function) const;

    // delivery control, used by the adversary to starve one peer
    void set_auto_deliver(size_t peer, bool on);
    std::vector<ledger::Block>& pending_for(size_t peer) {
        return pending_[peer];
    }
    const std::vector<std::pair<ledger::Block, std::vector<bool>>>& history()
        const {
        return history_;
    }

    const SimOptions& options() const { return opt_; }
    const ledger::GenesisConfig& config() const { return config_; }
    const ledger::Block& genesis() const { return genesis_; }
    const crypto::Digest& genesis_hash() const { return genesis_hash_; }
    ledger::Orderer& orderer() { return *orderer_; }
    tee::TeeHost& tee() { return *tee_; }
    tee::AttestationService& service() { return *service_; }
    Peer& peer(size_t i) { return *peers_.at(i); }
    size_t peer_count() const { return peers_.size(); }
    ClientIdentity& client(const std::string& id);
    const std::vector<std::string>& client_ids() const { return client_ids_; }
    const crypto::SymmetricKey& chaincode_state_key() const {
        return state_key_;
    }
    const crypto::Digest& le_measurement() const { return le_measurement_; }
    const crypto::Digest& cce_measurement() const { return cce_measurement_; }
    std::shared_ptr<cc::ChaincodeProgram> contract(const std::string& name) {
        return contracts_.at(name);
    }
    DetRng& admin_rng() { return admin_rng_; }
    const std::filesystem::path& root() const { return root_; }

    cc::Result decrypt_result(const std::string& client,
                              const Bytes& result_bytes,
                              bool encrypted) const;
    static std::string outcome_text(const std::string& function,
                                    const cc::Result& r);

    // Every byte surface outside the enclaves: emitted blocks, submitted
    // transactions, committed store contents. Privacy checks scan these.
    std::vector<std::pair<std::string, Bytes>> public_surfaces() const;

  private:
    friend class Peer;
    void bootstrap();

    SimOptions opt_;
    DetRng rng_;
    std::optional<tee::AttestationService> service_;
    std::optional<tee::TeeHost> tee_;
    crypto::Digest le_measurement_{};
    crypto::Digest cce_measurement_{};
    std::map<std::string, std::shared_ptr<cc::ChaincodeProgram>> contracts_;
    ledger::GenesisConfig config_;
    ledger::Block genesis_;
    crypto::Digest genesis_hash_{};
    std::optional<ledger::Orderer> orderer_;
    std::vector<std::unique_ptr<Peer>> peers_;
    std::vector<std::string> client_ids_;
    std::map<std::string, ClientIdentity> clients_;
    crypto::SymmetricKey state_key_{};
    DetRng admin_rng_{0};
    std::filesystem::path root_;
    bool owns_root_ = false;
    std::vector<bool> auto_deliver_;
    std::vector<std::vector<ledger::Block>> pending_;
    std::vector<std::pair<ledger::Block, std::vector<bool>>> history_;
    std::vector<Bytes> submitted_wire_;
};

}  // namespace chainclave::sim
