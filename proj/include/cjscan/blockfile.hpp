#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cjscan/hash.hpp"
#include "cjscan/serialize.hpp"
#include "cjscan/transaction.hpp"

namespace cjscan {

constexpr std::uint32_t kMainnetMagic = 0xD9B4BEF9;  // on-disk bytes F9 BE B4 D9

struct BlockHeader {
    std::int32_t version = 1;
    Hash256 prev_block_hash{};
    Hash256 merkle_root{};
    std::uint32_t time = 0;
    std::uint32_t bits = 0;
    std::uint32_t nonce = 0;
};

/// Where a block's payload lives on disk, so it can be re-read later.
struct FilePosition {
    std::string file;
    std::uint64_t offset = 0;  // start of the block payload (after magic+length)
    std::uint32_t length = 0;
};

struct RawBlock {
    BlockHeader header;
    Hash256 block_hash{};  // double SHA-256 of the 80 header bytes
    std::vector<RawTransaction> transactions;
    FilePosition position;
};

struct MalformedBlock {
    std::string file;
    std::uint64_t offset = 0;
    std::string reason;
};

inline std::vector<std::uint8_t> serialize_block_header(const BlockHeader& h) {
    ByteWriter w;
    w.write_u32le(static_cast<std::uint32_t>(h.version));
    w.write_bytes(h.prev_block_hash);
    w.write_bytes(h.merkle_root);
    w.write_u32le(h.time);
    w.write_u32le(h.bits);
    w.write_u32le(h.nonce);
    return w.take();
}

inline Hash256 block_hash_of(const BlockHeader& h) {
    return double_sha256(serialize_block_header(h));
}

/// Block payload: header + varint tx count + transactions.
inline std::vector<std::uint8_t> serialize_block(const BlockHeader& header,
                                                 const std::vector<RawTransaction>& txs) {
    ByteWriter w;
    w.write_bytes(serialize_block_header(header));
    w.write_varint(txs.size());
    for (const auto& tx : txs) w.write_bytes(serialize_transaction(tx));
    return w.take();
}

/// Parse one block payload (no magic/length framing).
inline RawBlock parse_block(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes);
    RawBlock block;
    auto header_bytes = r.read_bytes(80);
    {
        ByteReader hr(header_bytes);
        block.header.version = static_cast<std::int32_t>(hr.read_u32le());
        auto prev = hr.read_bytes(32);
        std::copy(prev.begin(), prev.end(), block.header.prev_block_hash.begin());
        auto merkle = hr.read_bytes(32);
        std::copy(merkle.begin(), merkle.end(), block.header.merkle_root.begin());
        block.header.time = hr.read_u32le();
        block.header.bits = hr.read_u32le();
        block.header.nonce = hr.read_u32le();
    }
    block.block_hash = double_sha256(header_bytes);

    std::uint64_t tx_count = r.read_varint();
    block.transactions.reserve(tx_count);
    for (std::uint64_t i = 0; i < tx_count; ++i) {
        auto [tx, consumed] = parse_transaction(bytes, r.position());
        block.transactions.push_back(std::move(tx));
        r.read_bytes(consumed);  // advance
    }
    return block;
}

/// Frame a block payload for a blk file: [magic][length][payload].
inline void append_framed_block(std::vector<std::uint8_t>& file, std::uint32_t magic,
                                std::span<const std::uint8_t> payload) {
    ByteWriter w;
    w.write_u32le(magic);
    w.write_u32le(static_cast<std::uint32_t>(payload.size()));
    file.insert(file.end(), w.bytes().begin(), w.bytes().end());
    file.insert(file.end(), payload.begin(), payload.end());
}

/// Streams blocks out of a single blk file image. Zero-padding gaps and
/// malformed records are skipped by scanning forward for the next magic;
/// each failure is recorded rather than thrown.
class BlockFileParser {
public:
    BlockFileParser(std::span<const std::uint8_t> data, std::uint32_t magic,
                    std::string file_name = "")
        : data_(data), magic_(magic), file_(std::move(file_name)) {}

    std::optional<RawBlock> next() {
        while (true) {
            if (!seek_magic()) return std::nullopt;
            std::uint64_t record_start = pos_;
            ByteReader r(data_, pos_);
            r.read_u32le();  // magic
            std::uint32_t length;
            try {
                length = r.read_u32le();
            } catch (const TruncatedTransaction&) {
                pos_ = data_.size();
                return std::nullopt;
            }
            if (length == 0 || r.remaining() < length) {
                errors_.push_back({file_, record_start, "length prefix past end of file"});
                pos_ = record_start + 1;
                continue;
            }
            std::uint64_t payload_start = r.position();
            try {
                RawBlock block = parse_block(data_.subspan(payload_start, length));
                block.position = FilePosition{file_, payload_start, length};
                pos_ = payload_start + length;
                return block;
            } catch (const std::exception& e) {
                errors_.push_back({file_, record_start, e.what()});
                pos_ = record_start + 1;
            }
        }
    }

    const std::vector<MalformedBlock>& errors() const { return errors_; }

private:
    bool seek_magic() {
        const std::uint8_t m0 = static_cast<std::uint8_t>(magic_);
        const std::uint8_t m1 = static_cast<std::uint8_t>(magic_ >> 8);
        const std::uint8_t m2 = static_cast<std::uint8_t>(magic_ >> 16);
        const std::uint8_t m3 = static_cast<std::uint8_t>(magic_ >> 24);
        while (pos_ + 4 <= data_.size()) {
            if (data_[pos_] == m0 && data_[pos_ + 1] == m1 && data_[pos_ + 2] == m2 &&
                data_[pos_ + 3] == m3) {
                return true;
            }
            ++pos_;
        }
        return false;
    }

    std::span<const std::uint8_t> data_;
    std::uint32_t magic_;
    std::string file_;
    std::uint64_t pos_ = 0;
    std::vector<MalformedBlock> errors_;
};

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

/// The blk*.dat files of a blocks directory, sorted by name.
inline std::vector<std::filesystem::path> list_block_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.starts_with("blk") && name.ends_with(".dat")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

/// Parse every blk file under `dir`, invoking `sink` per block in file order.
inline std::vector<MalformedBlock> parse_block_dir(
    const std::filesystem::path& dir, std::uint32_t magic,
    const std::function<void(RawBlock&&)>& sink) {
    std::vector<MalformedBlock> errors;
    for (const auto& path : list_block_files(dir)) {
        auto bytes = read_file_bytes(path);
        BlockFileParser parser(bytes, magic, path.string());
        while (auto block = parser.next()) sink(std::move(*block));
        errors.insert(errors.end(), parser.errors().begin(), parser.errors().end());
    }
    return errors;
}

}  // namespace cjscan
