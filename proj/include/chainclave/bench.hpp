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

#include <chrono>
#include <cstdint>

namespace chainclave::bench {

// Latency breakdown buckets along the endorsement path.
enum class Category : uint8_t {
    decrypt_tx = 0,  // proposal envelope decryption
    get_state = 1,   // state fetch, hash check, state decryption
    meta_query = 2,  // ledger enclave metadata round trip
    verify = 3,      // signature verifications
    sign = 4,        // response signing
};

inline constexpr size_t kCategoryCount = 5;
const char* category_name(Category c);

class Probe {
  public:
    virtual ~Probe() = default;
    virtual void charge(Category c, uint64_t measured_ns) = 0;
};

// Process-global probe used by instrumented code paths; nullptr (default)
// disables accounting entirely.
Probe* probe();
void set_probe(Probe* p);

// Measures a scope with the steady clock and charges the active probe.
class Span {
  public:
    explicit Span(Category c) : category_(c) {
        if (probe()) start_ = std::chrono::steady_clock::now();
    }
    ~Span() {
        Probe* p = probe();
        if (!p) return;
        auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now() - start_)
                      .count();
        p->charge(category_, static_cast<uint64_t>(ns));
    }
    Span(const Span&) = delete;
    Span& operator=(const Span&) = delete;

  private:
    Category category_;
    std::chrono::steady_clock::time_point start_{};
};

}  // namespace chainclave::bench
