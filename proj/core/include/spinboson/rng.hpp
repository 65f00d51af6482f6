#pragma once

#include <cstdint>
#include <random>

namespace spinboson {

// splitmix64 finalizer; good avalanche, used only for seed derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed for an independent stream, a pure function of (master, stream).
// Trajectory k of a run always sees the same stream no matter how
// trajectories are distributed over workers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(mix64(master) ^ mix64(0x517cc1b727220a95ULL * (stream + 1)));
}

class TrajectoryRng {
public:
    TrajectoryRng(std::uint64_t master_seed, std::uint64_t stream)
        : engine_(derive_seed(master_seed, stream)) {}

    double normal() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace spinboson
