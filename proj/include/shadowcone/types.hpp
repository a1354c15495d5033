#pragma once

#include <cstdint>
#include <utility>

namespace shadowcone {

using NodeId = std::uint32_t;
using IdPair = std::pair<NodeId, NodeId>;
using Edge = IdPair;  // (u, v) encodes u preceding v: v lies in u's cone

inline std::uint64_t edge_key(Edge e) {
    return (static_cast<std::uint64_t>(e.first) << 32) | e.second;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Stream-mixing for deriving independent deterministic seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream + 0x51ed2700));
}

}  // namespace shadowcone
