#pragma once
// Seeded RNG helpers with our own distributions. std::mt19937 is portable but
// the standard distributions are not, and golden-file tests need bit-stable
// draws everywhere.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace conflictforge {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint32_t next_u32() { return gen_(); }

    // Uniform in [0, 1).
    double uniform() {
        std::uint64_t hi = gen_();
        std::uint64_t lo = gen_();
        std::uint64_t bits = (hi << 21) ^ lo;  // 53 significant bits
        return static_cast<double>(bits & ((1ull << 53) - 1)) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
    }

    int integer(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(index(static_cast<std::size_t>(hi - lo + 1)));
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 1e-300) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 2.0 * M_PI * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return mean + stddev * r * std::cos(theta);
    }

    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace conflictforge
