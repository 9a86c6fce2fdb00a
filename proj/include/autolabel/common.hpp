#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>

namespace autolabel {

// Bad data fed to an operation (non-finite coords, mismatched sizes, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters outside their documented ranges.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed file contents; message carries byte offset / record index.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TooFewPoints : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptyFrustum : ValidationError {
    using ValidationError::ValidationError;
};

struct EmptyDistribution : ValidationError {
    using ValidationError::ValidationError;
};

namespace rng {

// splitmix64 finalizer; the basis of the counter generator below.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// FNV-1a, used to key streams by frame/location ids.
inline uint64_t hash_string(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t make_key(std::initializer_list<uint64_t> parts) {
    uint64_t k = 0x8f1bbcdcbfa53e0bULL;
    for (uint64_t p : parts) k = mix(k, p);
    return k;
}

// Stateless counter-based generator. Output depends only on (key, counter),
// so draws are identical no matter how work is sharded across threads.
class CounterRng {
public:
    explicit CounterRng(uint64_t key) : key_(key) {}
    CounterRng(std::initializer_list<uint64_t> parts) : key_(make_key(parts)) {}

    uint64_t next_u64() { return splitmix64(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

    // [0, 1)
    double next_uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform_in(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    // Box-Muller; consumes two uniforms.
    double next_gaussian() {
        double u1 = 1.0 - next_uniform();  // (0, 1]
        double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Integer in [lo, hi] inclusive.
    int64_t int_in(int64_t lo, int64_t hi) {
        return lo + int64_t(next_u64() % uint64_t(hi - lo + 1));
    }

private:
    uint64_t key_;
    uint64_t ctr_ = 0;
};

}  // namespace rng

void set_worker_threads(int n);  // n <= 0 leaves the OpenMP default
int worker_threads();

}  // namespace autolabel
