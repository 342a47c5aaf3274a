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

#include "chainclave/bench.hpp"

namespace chainclave::bench {

const char* category_name(Category c) {
    switch (c) {
        case Category::decrypt_tx: return "decrypt_tx";
        case Category::get_state: return "get_state";
        case Category::meta_query: return "meta_query";
        case Category::verify: return "verify";
        case Category::sign: return "sign";
    }
    return "unknown";
}

namespace {
Probe* g_probe = nullptr;
}

Probe* probe() { return g_probe; }

void set_probe(Probe* p) { g_probe = p; }

}  // namespace chainclave::bench
