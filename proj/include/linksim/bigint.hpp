#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace linksim {

/// Minimal unsigned big integer: exactly the operations the constant
/// composition matcher needs (add, sub, compare, mul/div by machine word).
class BigUint {
  public:
    BigUint() : limbs_{0} {}
    explicit BigUint(std::uint64_t v) : limbs_{v} {}

    static BigUint zero() { return BigUint(0); }
    static BigUint one() { return BigUint(1); }

    bool is_zero() const { return limbs_.size() == 1 && limbs_[0] == 0; }

    int compare(const BigUint& o) const {
        if (limbs_.size() != o.limbs_.size())
            return limbs_.size() < o.limbs_.size() ? -1 : 1;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            if (limbs_[i] != o.limbs_[i]) return limbs_[i] < o.limbs_[i] ? -1 : 1;
        }
        return 0;
    }
    bool operator<(const BigUint& o) const { return compare(o) < 0; }
    bool operator>=(const BigUint& o) const { return compare(o) >= 0; }
    bool operator==(const BigUint& o) const { return compare(o) == 0; }

    void add(const BigUint& o) {
        if (o.limbs_.size() > limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
        unsigned __int128 carry = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            unsigned __int128 s = carry + limbs_[i];
            if (i < o.limbs_.size()) s += o.limbs_[i];
            limbs_[i] = static_cast<std::uint64_t>(s);
            carry = s >> 64;
        }
        if (carry) limbs_.push_back(static_cast<std::uint64_t>(carry));
    }

    /// this -= o; requires this >= o.
    void sub(const BigUint& o) {
        if (compare(o) < 0) throw std::invalid_argument("BigUint::sub underflow");
        std::int64_t borrow = 0;
        for (std::size_t i = 0; i < limbs_.size(); ++i) {
            unsigned __int128 lhs = limbs_[i];
            unsigned __int128 rhs = (i < o.limbs_.size() ? o.limbs_[i] : 0);
            rhs += static_cast<std::uint64_t>(borrow);
            if (lhs >= rhs) {
                limbs_[i] = static_cast<std::uint64_t>(lhs - rhs);
                borrow = 0;
            } else {
                limbs_[i] = static_cast<std::uint64_t>((((unsigned __int128)1 << 64) + lhs) - rhs);
                borrow = 1;
            }
        }
        trim();
    }

    void mul_small(std::uint64_t m) {
        unsigned __int128 carry = 0;
        for (auto& l : limbs_) {
            unsigned __int128 p = (unsigned __int128)l * m + carry;
            l = static_cast<std::uint64_t>(p);
            carry = p >> 64;
        }
        while (carry) {
            limbs_.push_back(static_cast<std::uint64_t>(carry));
            carry >>= 64;
        }
        trim();
    }

    /// this /= d, returns remainder.
    std::uint64_t div_small(std::uint64_t d) {
        if (d == 0) throw std::invalid_argument("BigUint::div_small by zero");
        unsigned __int128 rem = 0;
        for (std::size_t i = limbs_.size(); i-- > 0;) {
            unsigned __int128 cur = (rem << 64) | limbs_[i];
            limbs_[i] = static_cast<std::uint64_t>(cur / d);
            rem = cur % d;
        }
        trim();
        return static_cast<std::uint64_t>(rem);
    }

    std::size_t bit_length() const {
        std::uint64_t top = limbs_.back();
        if (top == 0) return 0;  // canonical zero
        std::size_t bits = (limbs_.size() - 1) * 64;
        while (top) {
            ++bits;
            top >>= 1;
        }
        return bits;
    }

    bool bit(std::size_t i) const {
        std::size_t limb = i / 64, off = i % 64;
        if (limb >= limbs_.size()) return false;
        return (limbs_[limb] >> off) & 1;
    }

    void set_bit(std::size_t i) {
        std::size_t limb = i / 64, off = i % 64;
        if (limb >= limbs_.size()) limbs_.resize(limb + 1, 0);
        limbs_[limb] |= (std::uint64_t{1} << off);
    }

  private:
    void trim() {
        while (limbs_.size() > 1 && limbs_.back() == 0) limbs_.pop_back();
    }
    std::vector<std::uint64_t> limbs_;  // little-endian
};

}  // namespace linksim
