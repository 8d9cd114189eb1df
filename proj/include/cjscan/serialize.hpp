#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cjscan {

struct TruncatedTransaction : std::runtime_error {
    explicit TruncatedTransaction(std::size_t offset)
        : std::runtime_error("truncated transaction at offset " + std::to_string(offset)) {}
};

struct VarintOverflow : std::runtime_error {
    explicit VarintOverflow(std::uint64_t value)
        : std::runtime_error("varint exceeds 2^53: " + std::to_string(value)) {}
};

/// Cursor over a byte span with little-endian primitive reads.
class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> data, std::size_t offset = 0)
        : data_(data), pos_(offset) {}

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }
    bool exhausted() const { return pos_ >= data_.size(); }

    std::uint8_t peek() const {
        require(1);
        return data_[pos_];
    }

    std::uint8_t read_u8() {
        require(1);
        return data_[pos_++];
    }

    std::uint16_t read_u16le() { return static_cast<std::uint16_t>(read_le(2)); }
    std::uint32_t read_u32le() { return static_cast<std::uint32_t>(read_le(4)); }
    std::uint64_t read_u64le() { return read_le(8); }

    std::span<const std::uint8_t> read_bytes(std::size_t n) {
        require(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    /// Bitcoin compact-size integer. Rejects values above 2^53.
    std::uint64_t read_varint() {
        std::uint8_t tag = read_u8();
        std::uint64_t v;
        if (tag < 0xfd) {
            v = tag;
        } else if (tag == 0xfd) {
            v = read_u16le();
        } else if (tag == 0xfe) {
            v = read_u32le();
        } else {
            v = read_u64le();
        }
        if (v > (1ULL << 53)) throw VarintOverflow(v);
        return v;
    }

private:
    void require(std::size_t n) const {
        if (data_.size() - pos_ < n) throw TruncatedTransaction(pos_);
    }

    std::uint64_t read_le(std::size_t n) {
        require(n);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += n;
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_;
};

/// Growable little-endian byte sink, mirror of ByteReader.
class ByteWriter {
public:
    const std::vector<std::uint8_t>& bytes() const { return buf_; }
    std::vector<std::uint8_t> take() { return std::move(buf_); }
    std::size_t size() const { return buf_.size(); }

    void write_u8(std::uint8_t v) { buf_.push_back(v); }
    void write_u16le(std::uint16_t v) { write_le(v, 2); }
    void write_u32le(std::uint32_t v) { write_le(v, 4); }
    void write_u64le(std::uint64_t v) { write_le(v, 8); }

    void write_bytes(std::span<const std::uint8_t> data) {
        buf_.insert(buf_.end(), data.begin(), data.end());
    }

    void write_varint(std::uint64_t v) {
        if (v < 0xfd) {
            write_u8(static_cast<std::uint8_t>(v));
        } else if (v <= 0xffff) {
            write_u8(0xfd);
            write_u16le(static_cast<std::uint16_t>(v));
        } else if (v <= 0xffffffff) {
            write_u8(0xfe);
            write_u32le(static_cast<std::uint32_t>(v));
        } else {
            write_u8(0xff);
            write_u64le(v);
        }
    }

private:
    void write_le(std::uint64_t v, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }

    std::vector<std::uint8_t> buf_;
};

}  // namespace cjscan
