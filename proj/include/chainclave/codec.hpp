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
 * Canonical byte encoding used for every hashed, signed, or transported
 * structure. The rules are fixed (see docs/encoding.md):
 *
 *   - unsigned integers: little-endian, fixed width
 *   - byte strings and text: u32 length prefix, then raw bytes
 *   - lists: u32 element count, then elements in order
 *   - optionals: u8 presence flag (0/1), then the value if present
 *   - fixed-size arrays (digests, keys, nonces, tags): raw bytes, no prefix
 *
 * Encoding is total; decoding rejects trailing bytes and truncation.
 */

#pragma once

#include <array>
#include <cstring>
#include <optional>

#include "chainclave/bytes.hpp"
#include "chainclave/errors.hpp"

namespace chainclave::codec {

class ByteWriter {
  public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) { append_le(v); }
    void u32(uint32_t v) { append_le(v); }
    void u64(uint64_t v) { append_le(v); }

    void raw(ByteView b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    template <size_t N>
    void fixed(const std::array<uint8_t, N>& a) {
        buf_.insert(buf_.end(), a.begin(), a.end());
    }

    void bytes(ByteView b) {
        u32(static_cast<uint32_t>(b.size()));
        raw(b);
    }

    void str(std::string_view s) {
        u32(static_cast<uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    void flag(bool b) { u8(b ? 1 : 0); }

    template <typename T, typename Fn>
    void list(const std::vector<T>& items, Fn&& write_one) {
        u32(static_cast<uint32_t>(items.size()));
        for (const auto& item : items) write_one(*this, item);
    }

    template <typename T, typename Fn>
    void opt(const std::optional<T>& v, Fn&& write_one) {
        flag(v.has_value());
        if (v) write_one(*this, *v);
    }

    const Bytes& view() const { return buf_; }
    Bytes take() { return std::move(buf_); }

  private:
    template <typename T>
    void append_le(T v) {
        for (size_t i = 0; i < sizeof(T); ++i)
            buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    Bytes buf_;
};

class ByteReader {
  public:
    explicit ByteReader(ByteView b) : data_(b) {}

    uint8_t u8() { return read_le<uint8_t>(); }
    uint16_t u16() { return read_le<uint16_t>(); }
    uint32_t u32() { return read_le<uint32_t>(); }
    uint64_t u64() { return read_le<uint64_t>(); }

    Bytes raw(size_t n) {
        need(n);
        Bytes out(data_.begin() + pos_, data_.begin() + pos_ + n);
        pos_ += n;
        return out;
    }

    template <size_t N>
    std::array<uint8_t, N> fixed() {
        need(N);
        std::array<uint8_t, N> out;
        std::memcpy(out.data(), data_.data() + pos_, N);
        pos_ += N;
        return out;
    }

    Bytes bytes() { return raw(u32()); }

    std::string str() {
        Bytes b = bytes();
        return std::string(b.begin(), b.end());
    }

    bool flag() {
        uint8_t v = u8();
        require(v <= 1, Status::codec_error, "bad presence flag");
        return v == 1;
    }

    template <typename T, typename Fn>
    std::vector<T> list(Fn&& read_one) {
        uint32_t n = u32();
        // Guards against absurd counts in hostile input before allocating.
        require(n <= remaining(), Status::codec_error, "list count exceeds input");
        std::vector<T> out;
        out.reserve(n);
        for (uint32_t i = 0; i < n; ++i) out.push_back(read_one(*this));
        return out;
    }

    template <typename T, typename Fn>
    std::optional<T> opt(Fn&& read_one) {
        if (!flag()) return std::nullopt;
        return read_one(*this);
    }

    size_t remaining() const { return data_.size() - pos_; }
    bool done() const { return pos_ == data_.size(); }

    void expect_done() const {
        require(done(), Status::codec_error, "trailing bytes after decode");
    }

  private:
    template <typename T>
    T read_le() {
        need(sizeof(T));
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(data_[pos_ + i]) << (8 * i);
        pos_ += sizeof(T);
        return v;
    }

    void need(size_t n) const {
        require(remaining() >= n, Status::codec_error, "truncated input");
    }

    ByteView data_;
    size_t pos_ = 0;
};

// Decodes a whole buffer with `read_one` and rejects trailing bytes.
template <typename Fn>
auto decode_all(ByteView b, Fn&& read_one) {
    ByteReader r(b);
    auto v = read_one(r);
    r.expect_done();
    return v;
}

}  // namespace chainclave::codec
