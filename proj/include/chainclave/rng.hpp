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

#include <random>
#include <string_view>

#include "chainclave/bytes.hpp"

namespace chainclave {

/*
 * Deterministic random source. Every component that needs randomness takes a
 * DetRng (or a child stream of one) so that a whole simulation replays
 * byte-identically from a single seed. child() derives an independent stream
 * from a label; derivation consumes one draw from the parent, so the order of
 * child() calls matters and is fixed by construction order in the simulator.
 */
class DetRng {
  public:
    explicit DetRng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    uint32_t next_u32() { return static_cast<uint32_t>(gen_()); }

    // Uniform in [0, bound), bound > 0.
    uint64_t below(uint64_t bound) {
        return std::uniform_int_distribution<uint64_t>(0, bound - 1)(gen_);
    }

    void fill(std::span<uint8_t> out) {
        size_t i = 0;
        while (i < out.size()) {
            uint64_t v = gen_();
            for (size_t j = 0; j < 8 && i < out.size(); ++j, ++i)
                out[i] = static_cast<uint8_t>(v >> (8 * j));
        }
    }

    Bytes bytes(size_t n) {
        Bytes out(n);
        fill(out);
        return out;
    }

    DetRng child(std::string_view label) {
        return DetRng(mix(label) ^ gen_());
    }

  private:
    static uint64_t mix(std::string_view label) {
        // FNV-1a, enough to separate labeled streams.
        uint64_t h = 1469598103934665603ull;
        for (char c : label) {
            h ^= static_cast<uint8_t>(c);
            h *= 1099511628211ull;
        }
        return h;
    }

    std::mt19937_64 gen_;
};

}  // namespace chainclave
