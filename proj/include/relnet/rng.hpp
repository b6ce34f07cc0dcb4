#pragma once

// Counter-based random numbers: every draw is a pure function of
// (seed, sample index, draw index), so sampling can be partitioned across
// threads in any order and still reproduce bit-identical streams.
// Algorithm name recorded in reports: "splitmix64/box-muller v1".

#include <cmath>
#include <cstdint>
#include <numbers>

namespace relnet {

inline constexpr char kPrngName[] = "splitmix64/box-muller v1";

inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed + (index + 1) * 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// draw stream for one Monte Carlo sample
class SampleRng {
  public:
    SampleRng(std::uint64_t seed, std::uint64_t sample)
        : key_(splitmix64_at(seed, sample)) {}

    // uniform in [0, 1)
    double uniform() {
        return double(splitmix64_at(key_, ctr_++) >> 11) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; draws two uniforms per pair
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the log finite
        const double u1 =
            double((splitmix64_at(key_, ctr_++) >> 11) + 1) * 0x1.0p-53;
        const double u2 =
            double(splitmix64_at(key_, ctr_++) >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace relnet
