#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "roomnet/frame.hpp"
#include "roomnet/io.hpp"

namespace roomnet {

// Label byte for frames recorded while crossing a doorway.
inline constexpr uint8_t kTransitLabel = 0xFF;

struct EpisodeRecord {
    Frame frame;
    uint8_t label = 0;                      // room id or kTransitLabel
    std::array<float, 3> pose{0, 0, 0};     // ground truth x, y, theta
};

struct Episode {
    std::vector<EpisodeRecord> records;
    uint64_t world_hash = 0;
    uint64_t seed = 0;  // generation metadata, not persisted
};

inline Bytes serialize_episode(const Episode& ep) {
    ByteWriter w;
    w.magic("RNEP");
    w.u64(ep.world_hash);
    for (const auto& rec : ep.records) {
        write_frame(w, rec.frame);
        w.u8(rec.label);
        for (float p : rec.pose) w.f32(p);
    }
    return w.take();
}

inline Episode parse_episode(const Bytes& data, std::size_t descriptor_dim = kDescriptorDim) {
    ByteReader r(data);
    r.magic("RNEP");
    Episode ep;
    ep.world_hash = r.u64();
    while (!r.done()) {
        EpisodeRecord rec;
        rec.frame = read_frame(r, descriptor_dim);
        rec.label = r.u8();
        for (auto& p : rec.pose) p = r.f32();
        ep.records.push_back(std::move(rec));
    }
    return ep;
}

inline void save_episode(const std::string& path, const Episode& ep) {
    save_bytes(path, serialize_episode(ep));
}

inline Episode load_episode(const std::string& path,
                            std::size_t descriptor_dim = kDescriptorDim) {
    return parse_episode(load_bytes(path), descriptor_dim);
}

inline void validate_episode(const Episode& ep, int room_count) {
    double prev_t = -1.0;
    for (const auto& rec : ep.records) {
        if (rec.frame.timestamp <= prev_t)
            throw std::invalid_argument("episode timestamps not strictly increasing");
        prev_t = rec.frame.timestamp;
        if (rec.label != kTransitLabel && rec.label >= room_count)
            throw std::invalid_argument("episode label outside room range");
    }
}

}  // namespace roomnet
