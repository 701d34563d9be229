#ifndef MMS_COMMON_HPP
#define MMS_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mms {

/// Integer count vector (attribute counts, multiplicities).
using Vec = std::vector<int>;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid instance or malformed input.
struct ValidationError : Error {
    using Error::Error;
};

/// Search node budget or state-space cap exceeded. Distinct from a negative
/// answer: the caller cannot conclude anything about feasibility.
struct BudgetError : Error {
    using Error::Error;
};

/// A sampler exhausted its restart allowance.
struct SamplingError : Error {
    using Error::Error;
};

inline long long l1_norm(const Vec& v) {
    long long s = 0;
    for (int e : v) s += e < 0 ? -static_cast<long long>(e) : e;
    return s;
}

inline long long sum(const Vec& v) {
    long long s = 0;
    for (int e : v) s += e;
    return s;
}

inline bool leq_elementwise(const Vec& a, const Vec& b) {
    for (size_t j = 0; j < a.size(); ++j)
        if (a[j] > b[j]) return false;
    return true;
}

inline bool is_zero(const Vec& v) {
    for (int e : v)
        if (e != 0) return false;
    return true;
}

/// Lexicographic comparison used wherever a deterministic order over
/// multiplicity vectors or columns is needed.
inline bool lex_less(const Vec& a, const Vec& b) {
    return a < b;
}

/// FNV-1a, used for hashing integer vectors and deriving per-block seeds.
inline uint64_t fnv1a64(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = seed;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline uint64_t hash_vec(const Vec& v) {
    return fnv1a64(v.data(), v.size() * sizeof(int));
}

inline uint64_t hash_string(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

struct VecHash {
    size_t operator()(const Vec& v) const { return static_cast<size_t>(hash_vec(v)); }
};

/// Kahan compensated accumulator; keeps reductions order-insensitive to ~1e-16.
class KahanSum {
  public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace mms

#endif  // MMS_COMMON_HPP
