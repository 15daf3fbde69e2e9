#pragma once

#include <cstdint>
#include <random>

namespace sdcalc {

// Seeded RNG with a fixed mapping to doubles. mt19937_64 output is specified
// by the standard, so identical seeds give identical streams everywhere,
// which the CLI determinism contract relies on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

}  // namespace sdcalc
