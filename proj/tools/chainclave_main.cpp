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
 * Command-line driver for the simulator. Modes:
 *
 *   --scenario FILE   seeded workload run, writes report.json
 *   --attack FILE     scripted-adversary run, verdict plus observation log
 *   --auction LIST    sealed-bid auction demo through the full pipeline
 *   --bench           endorsement latency and throughput, writes bench.csv
 *
 * Reports are byte-identical for a fixed seed and config. The measured
 * timings in bench.csv are the one non-deterministic output; the bench
 * schedule itself (clients, amounts, batching) is still seeded.
 */

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chainclave/adversary.hpp"
#include "chainclave/auction.hpp"
#include "chainclave/bench.hpp"
#include "chainclave/errors.hpp"
#include "chainclave/rng.hpp"
#include "chainclave/sim.hpp"

namespace chainclave::cli {
namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), Status::config_error, "cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        size_t line = 1;
        size_t col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        raise(Status::config_error,
              path.string() + ":" + std::to_string(line) + ":" +
                  std::to_string(col) + ": " + e.what());
    }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(out.good(), Status::config_error, "cannot write " + path.string());
    out << text;
}

const char* encryption_name(ledger::StateEncryption e) {
    switch (e) {
        case ledger::StateEncryption::none: return "none";
        case ledger::StateEncryption::per_chaincode: return "per_chaincode";
        case ledger::StateEncryption::client_based: return "client_based";
    }
    return "unknown";
}

json echo_options(const sim::SimOptions& o) {
    return {
        {"seed", o.seed},
        {"peers", o.peers},
        {"block_size", o.block_size},
        {"snapshot_interval", o.snapshot_interval},
        {"required_endorsements", o.required_endorsements},
        {"chaincode_kind",
         o.auction_kind == ledger::ChaincodeKind::plain ? "plain" : "enclave"},
        {"encryption", encryption_name(o.encryption)},
        {"encrypt_results", o.encrypt_results},
        {"extra_clients", o.extra_clients},
    };
}

// Seeded honest workload over a handful of auctions. The op mix leans on
// bids but keeps every application error class reachable so run reports
// show the full outcome vocabulary.
json run_scenario(const json& scenario) {
    sim::SimOptions opt = adversary::options_from_json(scenario);
    json workload = scenario.value("workload", json::object());
    uint64_t txs = workload.value("txs", uint64_t{60});
    uint64_t auctions =
        std::max<uint64_t>(1, workload.value("auctions", uint64_t{2}));
    std::vector<std::string> bidders = workload.value(
        "bidders", std::vector<std::string>{"alice", "bob", "carol", "dave"});
    require(!bidders.empty(), Status::config_error, "empty bidder list");

    sim::SimNet net(opt);
    DetRng rng = DetRng(opt.seed).child("scenario-workload");
    std::vector<size_t> endorsers;
    for (size_t i = 0; i < opt.peers && endorsers.size() <
                                            std::max<uint32_t>(
                                                1, opt.required_endorsements);
         ++i)
        endorsers.push_back(i);

    json tx_log = json::array();
    auto run = [&](const std::string& client, cc::Operation op) {
        std::string fn = op.function;
        json args = json::array();
        for (const Bytes& a : op.args) args.push_back(to_string(a));
        sim::TxOutcome out =
            net.run_op(client, "auction", std::move(op), endorsers);
        tx_log.push_back({{"client", client},
                          {"function", fn},
                          {"args", args},
                          {"block_seq", out.block_seq},
                          {"tx_index", out.tx_index},
                          {"valid", out.valid},
                          {"text", out.text}});
    };
    auto auction_name = [](uint64_t i) {
        return "auction" + std::to_string(i);
    };

    for (uint64_t a = 0; a < auctions && tx_log.size() < txs; ++a)
        run("auctioneer", {"create", {to_bytes(auction_name(a)),
                                      to_bytes("scenario sale")}});
    while (tx_log.size() < txs) {
        const std::string& bidder = bidders[rng.below(bidders.size())];
        std::string name = auction_name(rng.below(auctions));
        uint64_t roll = rng.below(100);
        if (roll < 55) {
            run(bidder,
                {"submit", {to_bytes(name),
                            to_bytes("bid:" +
                                     std::to_string(1 + rng.below(999)))}});
        } else if (roll < 65) {
            run(bidder, {"noop", {}});
        } else if (roll < 68) {
            run("auctioneer", {"close", {to_bytes(name)}});
        } else if (roll < 75) {
            run(bidder, {"close", {to_bytes(name)}});
        } else if (roll < 85) {
            run(bidder, {"evaluate", {to_bytes(name)}});
        } else if (roll < 94) {
            run(bidder, {"submit", {to_bytes("ghost"), to_bytes("bid:5")}});
        } else {
            run(bidder, {"submit", {to_bytes(name), to_bytes("17")}});
        }
    }
    // Decide every auction so evaluate outcomes always appear in the log.
    for (uint64_t a = 0; a < auctions; ++a) {
        run("auctioneer", {"close", {to_bytes(auction_name(a))}});
        run("auctioneer", {"evaluate", {to_bytes(auction_name(a))}});
    }

    json report;
    report["mode"] = "run";
    report["config"] = echo_options(opt);
    report["workload"] = {
        {"txs", txs}, {"auctions", auctions}, {"bidders", bidders}};
    report["committed_height"] =
        net.history().empty() ? uint64_t{0} : net.history().back().first.seq;
    json hashes = json::object();
    json halted = json::array();
    for (size_t i = 0; i < net.peer_count(); ++i) {
        hashes[net.peer(i).id()] = net.peer(i).store().state_hash().hex();
        if (net.peer(i).halted()) halted.push_back(net.peer(i).id());
    }
    report["state_hashes"] = hashes;
    report["halted"] = halted;
    report["transactions"] = tx_log;
    return report;
}

json run_attack(json script) {
    adversary::AttackHarness harness(std::move(script));
    harness.run();
    adversary::CheckResult verdict = harness.check();
    json honest = json::array();
    for (const auto& [op, out] : harness.honest_trace())
        honest.push_back({{"op", op.text()}, {"outcome", out.text()}});
    json report;
    report["mode"] = "attack";
    report["attack"] = harness.name();
    report["targeted_fault"] = harness.targeted_fault();
    report["expect_violation"] = harness.expects_violation();
    report["verdict"] = {{"secure", verdict.secure},
                         {"checked_probes", verdict.checked_probes},
                         {"detail", verdict.detail}};
    report["honest_trace"] = honest;
    report["observations"] = harness.log().to_json();
    return report;
}

std::vector<uint64_t> parse_amounts(const std::string& list) {
    std::vector<uint64_t> out;
    size_t pos = 0;
    while (pos <= list.size()) {
        size_t comma = list.find(',', pos);
        std::string token = list.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        while (!token.empty() && token.front() == ' ') token.erase(0, 1);
        while (!token.empty() && token.back() == ' ') token.pop_back();
        if (!token.empty()) {
            require(token.find_first_not_of("0123456789") == std::string::npos,
                    Status::config_error, "bad bid amount \"" + token + "\"");
            out.push_back(std::stoull(token));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int cmd_auction(const std::vector<uint64_t>& amounts, uint64_t seed,
                const std::filesystem::path& out_dir) {
    sim::SimOptions opt;
    opt.seed = seed;
    opt.extra_clients = amounts.size();
    sim::SimNet net(opt);

    json phases = json::array();
    auto phase = [&](const std::string& label, const std::string& client,
                     cc::Operation op) {
        sim::TxOutcome out = net.run_op(client, "auction", std::move(op));
        std::cout << label << ": tx=" << out.digest.hex().substr(0, 16)
                  << " block=" << out.block_seq << " " << out.text << "\n";
        phases.push_back({{"phase", label},
                          {"tx", out.digest.hex()},
                          {"block_seq", out.block_seq},
                          {"valid", out.valid},
                          {"text", out.text}});
        return out;
    };

    phase("create", "auctioneer",
          {"create", {to_bytes("demo"), to_bytes("sealed-bid demo")}});
    for (size_t i = 0; i < amounts.size(); ++i) {
        std::string bidder = "client" + std::to_string(i);
        phase("bid " + bidder, bidder,
              {"submit", {to_bytes("demo"),
                          to_bytes("bid:" + std::to_string(amounts[i]))}});
    }
    phase("close", "auctioneer", {"close", {to_bytes("demo")}});
    sim::TxOutcome ev =
        phase("evaluate", "auctioneer", {"evaluate", {to_bytes("demo")}});

    // Highest amount wins; ties go to the lexicographically smallest client.
    std::string expected = "ok:no-winner";
    if (!amounts.empty()) {
        uint64_t best = *std::max_element(amounts.begin(), amounts.end());
        std::string winner;
        for (size_t i = 0; i < amounts.size(); ++i) {
            if (amounts[i] != best) continue;
            std::string id = "client" + std::to_string(i);
            if (winner.empty() || id < winner) winner = id;
        }
        expected = "ok:winner=" + winner + " amount=" + std::to_string(best);
    }
    bool match = ev.valid && ev.text == expected;
    std::cout << "winner check: expected " << expected
              << (match ? " (match)" : " (MISMATCH)") << "\n";

    json report;
    report["mode"] = "auction";
    report["config"] = echo_options(opt);
    report["bids"] = amounts;
    report["phases"] = phases;
    report["result"] = ev.text;
    report["expected"] = expected;
    report["match"] = match;
    write_file(out_dir / "report.json", report.dump(2) + "\n");
    std::cout << "report: " << (out_dir / "report.json").string() << "\n";
    return match ? 0 : 1;
}

struct BenchProbe : bench::Probe {
    std::array<uint64_t, bench::kCategoryCount> ns{};
    void charge(bench::Category c, uint64_t v) override {
        ns[static_cast<size_t>(c)] += v;
    }
};

struct BenchRow {
    std::string workload;
    std::string mode;
    size_t clients = 0;
    size_t txs = 0;
    double mean_us = 0;
    double std_us = 0;
    double min_us = 0;
    double max_us = 0;
    std::array<double, bench::kCategoryCount> cat_mean_us{};
    double tps = 0;
};

std::string csv_header() {
    std::string h = "workload,mode,clients,txs,mean_us,std_us,min_us,max_us";
    for (size_t c = 0; c < bench::kCategoryCount; ++c) {
        h += ',';
        h += bench::category_name(static_cast<bench::Category>(c));
        h += "_us";
    }
    return h + ",throughput_tps";
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// One workload phase against a live net. Latency is the assemble call
// (endorsement round trip on peer zero); proposal construction, ordering
// and commit stay outside the per-transaction clock but inside the phase
// clock that throughput is computed from.
BenchRow run_phase(sim::SimNet& net, const std::string& workload,
                   const std::string& mode, size_t clients, size_t txs,
                   size_t bids_per_auction, DetRng& rng) {
    std::vector<std::string> ids;
    ids.reserve(clients);
    for (size_t i = 0; i < clients; ++i)
        ids.push_back("client" + std::to_string(i));

    if (workload == "submit")
        net.run_op("auctioneer", "auction",
                   {"create", {to_bytes("bench"), to_bytes("benchmark sale")}});

    BenchProbe probe;
    bench::set_probe(&probe);
    std::vector<double> total_us;
    total_us.reserve(txs);
    std::array<uint64_t, bench::kCategoryCount> cat_ns{};
    std::vector<std::pair<ledger::Transaction, std::string>> submitted;
    submitted.reserve(txs);

    auto start = std::chrono::steady_clock::now();
    size_t batch = 0;
    for (size_t i = 0; i < txs; ++i) {
        const std::string& client = ids[i % ids.size()];
        cc::Operation op;
        if (workload == "noop") {
            op = {"noop", {}};
        } else if (workload == "submit") {
            op = {"submit",
                  {to_bytes("bench"),
                   to_bytes("bid:" + std::to_string(1 + rng.below(100000)))}};
        } else {
            std::string name = "sale" + std::to_string(i);
            net.run_op("auctioneer", "auction", {"create", {to_bytes(name)}});
            for (size_t b = 0; b < bids_per_auction; ++b)
                net.run_op(
                    ids[(i + b) % ids.size()], "auction",
                    {"submit",
                     {to_bytes(name),
                      to_bytes("bid:" +
                               std::to_string(1 + rng.below(100000)))}});
            net.run_op("auctioneer", "auction", {"close", {to_bytes(name)}});
            op = {"evaluate", {to_bytes(name)}};
        }
        std::string fn = op.function;
        ledger::TransactionProposal proposal =
            net.make_proposal(client, "auction", std::move(op));

        probe.ns.fill(0);
        auto t0 = std::chrono::steady_clock::now();
        ledger::Transaction tx = net.assemble(proposal, {0});
        auto t1 = std::chrono::steady_clock::now();
        total_us.push_back(
            std::chrono::duration<double, std::micro>(t1 - t0).count());
        for (size_t c = 0; c < bench::kCategoryCount; ++c)
            cat_ns[c] += probe.ns[c];

        net.submit(tx);
        submitted.emplace_back(std::move(tx), std::move(fn));
        if (++batch >= net.options().block_size) {
            net.commit_pending();
            batch = 0;
        }
    }
    net.commit_pending();
    auto stop = std::chrono::steady_clock::now();
    bench::set_probe(nullptr);

    size_t invalid = 0;
    for (const auto& [tx, fn] : submitted)
        if (!net.outcome_of(tx, fn).valid) ++invalid;
    require(invalid == 0, Status::config_error,
            workload + "/" + mode + ": " + std::to_string(invalid) +
                " measured transactions failed validation");

    BenchRow row;
    row.workload = workload;
    row.mode = mode;
    row.clients = clients;
    row.txs = txs;
    double sum = std::accumulate(total_us.begin(), total_us.end(), 0.0);
    row.mean_us = sum / static_cast<double>(txs);
    double var = 0;
    for (double v : total_us) var += (v - row.mean_us) * (v - row.mean_us);
    row.std_us = std::sqrt(var / static_cast<double>(txs));
    row.min_us = *std::min_element(total_us.begin(), total_us.end());
    row.max_us = *std::max_element(total_us.begin(), total_us.end());
    for (size_t c = 0; c < bench::kCategoryCount; ++c)
        row.cat_mean_us[c] =
            static_cast<double>(cat_ns[c]) / 1000.0 / static_cast<double>(txs);
    double secs = std::chrono::duration<double>(stop - start).count();
    row.tps = secs > 0 ? static_cast<double>(txs) / secs : 0;
    return row;
}

int cmd_bench(size_t peers, size_t clients, size_t block_size, size_t txs,
              size_t bids_per_auction, uint64_t seed,
              const std::filesystem::path& out_dir) {
    require(peers > 0 && clients > 0 && txs > 0, Status::config_error,
            "bench needs at least one peer, client and transaction");
    size_t n_noop = std::max<size_t>(1, txs / 4);
    size_t n_eval = std::max<size_t>(1, txs / 4);
    size_t n_submit = std::max<size_t>(1, txs - n_noop - n_eval);

    std::vector<BenchRow> rows;
    for (const char* mode : {"enclave", "native"}) {
        sim::SimOptions opt;
        opt.seed = seed;
        opt.peers = peers;
        opt.block_size = block_size;
        opt.required_endorsements = 1;
        opt.extra_clients = clients;
        if (std::string(mode) == "native") {
            opt.auction_kind = ledger::ChaincodeKind::plain;
            opt.encryption = ledger::StateEncryption::none;
            opt.encrypt_results = false;
        }
        sim::SimNet net(opt);
        DetRng rng = DetRng(seed).child(std::string("bench-") + mode);
        rows.push_back(
            run_phase(net, "noop", mode, clients, n_noop, bids_per_auction,
                      rng));
        rows.push_back(
            run_phase(net, "submit", mode, clients, n_submit,
                      bids_per_auction, rng));
        rows.push_back(
            run_phase(net, "evaluate", mode, clients, n_eval,
                      bids_per_auction, rng));
    }

    std::string csv = csv_header() + "\n";
    for (const BenchRow& r : rows) {
        csv += r.workload + "," + r.mode + "," + std::to_string(r.clients) +
               "," + std::to_string(r.txs) + "," + fmt(r.mean_us) + "," +
               fmt(r.std_us) + "," + fmt(r.min_us) + "," + fmt(r.max_us);
        for (double v : r.cat_mean_us) csv += "," + fmt(v);
        csv += "," + fmt(r.tps) + "\n";
    }
    write_file(out_dir / "bench.csv", csv);
    std::cout << csv;

    auto find_row = [&](const std::string& w,
                        const std::string& m) -> const BenchRow& {
        for (const BenchRow& r : rows)
            if (r.workload == w && r.mode == m) return r;
        raise(Status::config_error, "missing bench row " + w + "/" + m);
    };
    for (const char* w : {"noop", "submit", "evaluate"}) {
        const BenchRow& e = find_row(w, "enclave");
        const BenchRow& n = find_row(w, "native");
        double latency = n.mean_us > 0 ? e.mean_us / n.mean_us : 0;
        double throughput = n.tps > 0 ? e.tps / n.tps : 0;
        std::cout << "overhead " << w << ": enclave/native latency "
                  << fmt(latency) << "x, throughput " << fmt(throughput)
                  << "x\n";
    }
    std::cout << "bench: " << (out_dir / "bench.csv").string() << "\n";
    return 0;
}

}  // namespace
}  // namespace chainclave::cli

int main(int argc, char** argv) {
    using namespace chainclave;
    using nlohmann::json;

    CLI::App app{"enclave-backed chaincode simulator"};
    std::string scenario_path;
    std::string attack_path;
    std::string auction_bids;
    uint64_t auction_random = 0;
    bool bench_mode = false;
    uint64_t seed = 42;
    size_t peers = 3;
    size_t clients = 16;
    size_t block_size = 10;
    size_t txs = 1000;
    size_t bids = 8;
    std::string out_dir = ".";

    app.add_option("--scenario", scenario_path,
                   "scenario file (JSON), writes report.json");
    app.add_option("--attack", attack_path, "attack script (JSON)");
    CLI::Option* auction_opt = app.add_option(
        "--auction", auction_bids,
        "auction demo with these comma-separated bids (may be empty)");
    app.add_option("--auction-random", auction_random,
                   "auction demo with N seeded random bids");
    app.add_flag("--bench", bench_mode, "endorsement benchmark");
    CLI::Option* seed_opt = app.add_option("--seed", seed, "workload seed");
    app.add_option("--clients", clients, "bench: simulated bidder clients");
    app.add_option("--peers", peers, "bench: peer count");
    app.add_option("--block-size", block_size,
                   "bench: transactions per block");
    app.add_option("--txs", txs, "bench: measured transactions per mode");
    app.add_option("--bids", bids, "bench: bids per evaluated auction");
    app.add_option("--out", out_dir, "output directory");
    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::path out(out_dir);
        std::filesystem::create_directories(out);

        if (bench_mode)
            return cli::cmd_bench(peers, clients, block_size, txs, bids, seed,
                                  out);

        if (auction_opt->count() > 0 || auction_random > 0) {
            std::vector<uint64_t> amounts;
            if (auction_opt->count() > 0) {
                amounts = cli::parse_amounts(auction_bids);
            } else {
                DetRng rng = DetRng(seed).child("auction-demo");
                for (uint64_t i = 0; i < auction_random; ++i)
                    amounts.push_back(1 + rng.below(1000));
            }
            return cli::cmd_auction(amounts, seed, out);
        }

        if (scenario_path.empty() && attack_path.empty()) {
            std::cerr << app.help();
            return 2;
        }

        json report;
        if (!scenario_path.empty()) {
            json scenario = cli::load_json(scenario_path);
            if (seed_opt->count() > 0) scenario["seed"] = seed;
            std::string attack_ref = attack_path;
            if (attack_ref.empty() && scenario.contains("attack"))
                attack_ref = scenario.at("attack").get<std::string>();
            if (!attack_ref.empty()) {
                std::filesystem::path ap(attack_ref);
                if (ap.is_relative() && attack_path.empty())
                    ap = std::filesystem::path(scenario_path).parent_path() /
                         ap;
                json script = cli::load_json(ap);
                // Scenario body supplies option defaults; the script wins.
                json opts = scenario;
                opts.erase("workload");
                opts.erase("attack");
                opts.update(script.value("options", json::object()));
                script["options"] = std::move(opts);
                report = cli::run_attack(std::move(script));
            } else {
                report = cli::run_scenario(scenario);
            }
        } else {
            json script = cli::load_json(attack_path);
            if (seed_opt->count() > 0) script["options"]["seed"] = seed;
            report = cli::run_attack(std::move(script));
        }

        cli::write_file(out / "report.json", report.dump(2) + "\n");

        int rc = 0;
        if (report["mode"] == "attack") {
            bool secure = report["verdict"]["secure"].get<bool>();
            std::cout << "attack " << report["attack"].get<std::string>()
                      << ": secure=" << (secure ? "true" : "false")
                      << " checked_probes="
                      << report["verdict"]["checked_probes"].get<size_t>()
                      << "\n";
            std::string detail = report["verdict"]["detail"];
            if (!detail.empty()) std::cout << "  " << detail << "\n";
            std::string fault = report["targeted_fault"];
            if (!fault.empty())
                std::cout << "note: targeted fault \"" << fault
                          << "\" stays off outside the test harness\n";
            rc = secure ? 0 : 1;
        } else {
            size_t valid = 0;
            for (const auto& t : report["transactions"])
                if (t["valid"].get<bool>()) ++valid;
            std::cout << "committed height "
                      << report["committed_height"].get<uint64_t>() << ", "
                      << report["transactions"].size() << " transactions ("
                      << valid << " valid), state "
                      << report["state_hashes"].begin()
                             ->get<std::string>()
                             .substr(0, 16)
                      << "\n";
            if (!report["halted"].empty()) {
                std::cout << "halted peers: " << report["halted"].dump()
                          << "\n";
                rc = 1;
            }
        }
        std::cout << "report: " << (out / "report.json").string() << "\n";
        return rc;
    } catch (const Error& e) {
        std::cerr << "error (" << status_name(e.status) << "): " << e.what()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
