#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace roomnet {

using Bytes = std::vector<uint8_t>;

// Explicit little-endian packing; file formats are byte-exact contracts.
class ByteWriter {
  public:
    const Bytes& data() const { return buf_; }
    Bytes take() { return std::move(buf_); }

    void u8(uint8_t v) { buf_.push_back(v); }

    void u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void u64(uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    void f32(float v) {
        uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }

    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }

    void magic(const char tag[5]) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<uint8_t>(tag[i]));
    }

  private:
    Bytes buf_;
};

class ByteReader {
  public:
    explicit ByteReader(const Bytes& b) : buf_(b) {}

    bool done() const { return pos_ == buf_.size(); }
    std::size_t remaining() const { return buf_.size() - pos_; }

    uint8_t u8() {
        need(1);
        return buf_[pos_++];
    }

    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(buf_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }

    float f32() {
        const uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }

    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    void magic(const char tag[5]) {
        need(4);
        for (int i = 0; i < 4; ++i) {
            if (buf_[pos_ + i] != static_cast<uint8_t>(tag[i]))
                throw std::runtime_error(std::string("bad magic, expected ") + tag);
        }
        pos_ += 4;
    }

  private:
    void need(std::size_t n) const {
        if (pos_ + n > buf_.size()) throw std::runtime_error("truncated input");
    }

    const Bytes& buf_;
    std::size_t pos_ = 0;
};

inline void save_bytes(const std::string& path, const Bytes& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Bytes load_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot open: " + path);
    const auto size = in.tellg();
    in.seekg(0);
    Bytes data(static_cast<std::size_t>(size));
    in.read(reinterpret_cast<char*>(data.data()), size);
    if (!in) throw std::runtime_error("read failed: " + path);
    return data;
}

inline uint64_t fnv1a64(const Bytes& data, uint64_t h = 0xCBF29CE484222325ULL) {
    for (uint8_t b : data) {
        h ^= b;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace roomnet
