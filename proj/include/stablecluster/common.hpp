#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace stablecluster {

// Relative comparison tolerance for distances and costs. Generators emit
// grid-aligned values so planted-instance checks never depend on it.
inline constexpr double kRelTol = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double cmp_tol(double a, double b) {
    return kRelTol * std::max({1.0, std::fabs(a), std::fabs(b)});
}

inline bool approx_leq(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a <= b;
    return a <= b + cmp_tol(a, b);
}

inline bool approx_eq(double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::fabs(a - b) <= cmp_tol(a, b);
}

// splitmix64; used for all seeded choices so results are portable across
// standard library implementations.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, m) by rejection.
    std::uint64_t below(std::uint64_t m) {
        if (m == 0) throw std::invalid_argument("SplitMix64::below: m == 0");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % m;
        std::uint64_t v;
        do {
            v = next();
        } while (v >= limit);
        return v % m;
    }

    double unit() { return double(next() >> 11) * 0x1.0p-53; }
};

// Fixed-size bit set over point indices.
class Bitset {
public:
    Bitset() = default;
    explicit Bitset(int n) : n_(n), w_((n + 63) / 64, 0) {}

    int size() const { return n_; }

    bool test(int i) const { return (w_[i >> 6] >> (i & 63)) & 1ULL; }
    void set(int i) { w_[i >> 6] |= 1ULL << (i & 63); }
    void reset(int i) { w_[i >> 6] &= ~(1ULL << (i & 63)); }

    void clear() { std::fill(w_.begin(), w_.end(), 0); }

    void set_all() {
        std::fill(w_.begin(), w_.end(), ~0ULL);
        trim();
    }

    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    int count() const {
        int c = 0;
        for (auto w : w_) c += std::popcount(w);
        return c;
    }

    bool subset_of(const Bitset& o) const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i] & ~o.w_[i]) return false;
        return true;
    }

    Bitset& operator|=(const Bitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    Bitset& operator&=(const Bitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    Bitset& and_not(const Bitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= ~o.w_[i];
        return *this;
    }

    int count_and(const Bitset& o) const {
        int c = 0;
        for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
        return c;
    }

    bool operator==(const Bitset& o) const = default;

    int first_set() const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return int(i * 64 + std::countr_zero(w_[i]));
        return -1;
    }

    // Lowest set index satisfying pred, or -1.
    template <typename P>
    int first_where(P pred) const {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            std::uint64_t w = w_[i];
            while (w) {
                const int idx = int(i * 64 + std::countr_zero(w));
                if (pred(idx)) return idx;
                w &= w - 1;
            }
        }
        return -1;
    }

    template <typename F>
    void for_each(F f) const {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            std::uint64_t w = w_[i];
            while (w) {
                f(int(i * 64 + std::countr_zero(w)));
                w &= w - 1;
            }
        }
    }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(count());
        for_each([&](int i) { out.push_back(i); });
        return out;
    }

private:
    void trim() {
        if (n_ % 64) w_.back() &= (1ULL << (n_ % 64)) - 1;
    }

    int n_ = 0;
    std::vector<std::uint64_t> w_;
};

// C(n, k) saturating at cap.
inline std::uint64_t binomial_capped(int n, int k,
                                     std::uint64_t cap = std::numeric_limits<std::uint64_t>::max()) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * (unsigned __int128)(n - k + i) / (unsigned __int128)i;
        if (r > cap) return cap;
    }
    return std::uint64_t(r);
}

// Advance a sorted k-combination of {0..n-1} in lexicographic order.
inline bool next_combination(std::vector<int>& c, int n) {
    const int k = int(c.size());
    for (int i = k - 1; i >= 0; --i) {
        if (c[i] < n - k + i) {
            ++c[i];
            for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Lexicographic unranking of a k-combination of {0..n-1}.
inline std::vector<int> unrank_combination(std::uint64_t rank, int n, int k) {
    std::vector<int> c(k);
    int x = 0;
    for (int i = 0; i < k; ++i) {
        while (true) {
            std::uint64_t block = binomial_capped(n - x - 1, k - i - 1);
            if (rank < block) break;
            rank -= block;
            ++x;
        }
        c[i] = x++;
    }
    return c;
}

inline int log_star(double n) {
    int c = 0;
    while (n > 1.0) {
        n = std::log2(n);
        ++c;
    }
    return c;
}

// Snap to the 2^-10 grid used by the generators so files round-trip exactly.
inline double snap_to_grid(double x) { return std::round(x * 1024.0) / 1024.0; }
inline double snap_up_to_grid(double x) { return std::ceil(x * 1024.0) / 1024.0; }

}  // namespace stablecluster
