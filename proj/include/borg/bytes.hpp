#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace borg {

// Append-only writer for the canonical byte layouts used in hash preimages
// and digests. Integers are big-endian; variable-length fields are preceded
// by a 32-bit length so no two distinct field sequences share an encoding.
class ByteWriter {
  public:
    void u32(std::uint32_t v) {
        buf_.push_back(static_cast<std::uint8_t>(v >> 24));
        buf_.push_back(static_cast<std::uint8_t>(v >> 16));
        buf_.push_back(static_cast<std::uint8_t>(v >> 8));
        buf_.push_back(static_cast<std::uint8_t>(v));
    }

    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v));
    }

    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }

    // Raw bytes, no length prefix. Use when the field has a fixed width in
    // the surrounding context (group elements, digests).
    void raw(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }

    // Length-prefixed bytes, for variable-width fields.
    void bytes(std::span<const std::uint8_t> b) {
        u32(static_cast<std::uint32_t>(b.size()));
        raw(b);
    }

    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.insert(buf_.end(), s.begin(), s.end());
    }

    const std::vector<std::uint8_t>& out() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }

  private:
    std::vector<std::uint8_t> buf_;
};

inline std::vector<std::uint8_t> to_bytes(std::string_view s) {
    return {s.begin(), s.end()};
}

}  // namespace borg
