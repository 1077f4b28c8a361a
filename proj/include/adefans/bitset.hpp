#pragma once

#include <bit>
#include <cstdint>
#include <vector>

namespace adefans {

class DynBitset {
public:
    DynBitset() = default;
    explicit DynBitset(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

    std::size_t size() const { return n_; }
    void set(std::size_t i) { w_[i >> 6] |= std::uint64_t(1) << (i & 63); }
    void reset(std::size_t i) { w_[i >> 6] &= ~(std::uint64_t(1) << (i & 63)); }
    bool test(std::size_t i) const { return w_[i >> 6] >> (i & 63) & 1; }

    // Clears every bit with index below i.
    void clear_below(std::size_t i) {
        for (std::size_t k = 0; k < w_.size() && k * 64 < i; ++k)
            w_[k] = (k + 1) * 64 <= i ? 0 : w_[k] & (~std::uint64_t(0) << (i - k * 64));
    }

    bool any() const {
        for (auto x : w_)
            if (x) return true;
        return false;
    }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto x : w_) c += std::popcount(x);
        return c;
    }

    DynBitset& operator&=(const DynBitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }
    DynBitset& operator|=(const DynBitset& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }
    DynBitset operator&(const DynBitset& o) const {
        DynBitset r(*this);
        r &= o;
        return r;
    }
    DynBitset minus(const DynBitset& o) const {
        DynBitset r(*this);
        for (std::size_t i = 0; i < w_.size(); ++i) r.w_[i] &= ~o.w_[i];
        return r;
    }

    std::size_t and_count(const DynBitset& o) const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < w_.size(); ++i) c += std::popcount(w_[i] & o.w_[i]);
        return c;
    }

    template <class F>
    void for_each(F&& f) const {
        for (std::size_t k = 0; k < w_.size(); ++k) {
            std::uint64_t x = w_[k];
            while (x) {
                f(k * 64 + std::countr_zero(x));
                x &= x - 1;
            }
        }
    }

    bool operator==(const DynBitset&) const = default;

private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

}  // namespace adefans
