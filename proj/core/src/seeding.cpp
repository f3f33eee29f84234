#include "pem/seeding.hpp"

namespace pem {

namespace {

constexpr std::uint64_t kMul1 = 0xff51afd7ed558ccdULL;
constexpr std::uint64_t kMul2 = 0xc4ceb9fe1a85ec53ULL;
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer; full-avalanche bit mixer.
std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 33;
    x *= kMul1;
    x ^= x >> 33;
    x *= kMul2;
    x ^= x >> 33;
    return x;
}

std::uint64_t absorb(std::uint64_t state, std::uint64_t word) {
    return mix(state ^ (word + kGolden + (state << 6) + (state >> 2)));
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label,
                          std::uint64_t index) {
    std::uint64_t h = mix(master_seed + kGolden);
    for (unsigned char ch : stream_label) {
        h = absorb(h, ch);
    }
    h = absorb(h, stream_label.size());
    h = absorb(h, index);
    return mix(h);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view stream_label,
                          std::uint64_t index0, std::uint64_t index1) {
    return mix(absorb(derive_seed(master_seed, stream_label, index0), index1));
}

}  // namespace pem
