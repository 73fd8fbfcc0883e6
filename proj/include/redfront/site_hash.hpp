#pragma once

#include <cstdint>
#include <vector>

namespace redfront {

inline uint64_t mix64(uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
}

/// Open-addressing map from packed site keys to int32 values (linear probe,
/// power-of-two capacity). Keys always have the top bit clear, so ~0 marks
/// an empty slot. Entries are never erased; emptied occupancy lists simply
/// keep a -1 head, which stays correct and avoids tombstones.
class SiteMap {
public:
    explicit SiteMap(std::size_t expected = 16) { rehash(capacity_for(expected)); }

    int32_t* find(uint64_t key) {
        std::size_t i = mix64(key) & mask_;
        while (true) {
            if (keys_[i] == key) return &vals_[i];
            if (keys_[i] == kEmpty) return nullptr;
            i = (i + 1) & mask_;
        }
    }

    const int32_t* find(uint64_t key) const { return const_cast<SiteMap*>(this)->find(key); }

    /// Returns the slot for key, inserting `init` if absent.
    int32_t& at_or_insert(uint64_t key, int32_t init) {
        if ((size_ + 1) * 10 >= keys_.size() * 7) rehash(keys_.size() * 2);
        std::size_t i = mix64(key) & mask_;
        while (true) {
            if (keys_[i] == key) return vals_[i];
            if (keys_[i] == kEmpty) {
                keys_[i] = key;
                vals_[i] = init;
                ++size_;
                return vals_[i];
            }
            i = (i + 1) & mask_;
        }
    }

    std::size_t size() const { return size_; }

    void clear() {
        keys_.assign(keys_.size(), kEmpty);
        size_ = 0;
    }

private:
    static constexpr uint64_t kEmpty = ~0ull;

    static std::size_t capacity_for(std::size_t n) {
        std::size_t c = 16;
        while (c * 7 < n * 10) c *= 2;
        return c;
    }

    void rehash(std::size_t cap) {
        std::vector<uint64_t> old_keys = std::move(keys_);
        std::vector<int32_t> old_vals = std::move(vals_);
        keys_.assign(cap, kEmpty);
        vals_.assign(cap, 0);
        mask_ = cap - 1;
        size_ = 0;
        for (std::size_t i = 0; i < old_keys.size(); ++i) {
            if (old_keys[i] == kEmpty) continue;
            std::size_t j = mix64(old_keys[i]) & mask_;
            while (keys_[j] != kEmpty) j = (j + 1) & mask_;
            keys_[j] = old_keys[i];
            vals_[j] = old_vals[i];
            ++size_;
        }
    }

    std::vector<uint64_t> keys_;
    std::vector<int32_t> vals_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

/// Open-addressing set of packed site keys.
class SiteSet {
public:
    explicit SiteSet(std::size_t expected = 16) { rehash(capacity_for(expected)); }

    bool contains(uint64_t key) const {
        std::size_t i = mix64(key) & mask_;
        while (true) {
            if (keys_[i] == key) return true;
            if (keys_[i] == kEmpty) return false;
            i = (i + 1) & mask_;
        }
    }

    /// Returns true if the key was newly inserted.
    bool insert(uint64_t key) {
        if ((size_ + 1) * 10 >= keys_.size() * 7) rehash(keys_.size() * 2);
        std::size_t i = mix64(key) & mask_;
        while (true) {
            if (keys_[i] == key) return false;
            if (keys_[i] == kEmpty) {
                keys_[i] = key;
                ++size_;
                return true;
            }
            i = (i + 1) & mask_;
        }
    }

    std::size_t size() const { return size_; }

    template <typename F>
    void for_each(F&& f) const {
        for (uint64_t k : keys_)
            if (k != kEmpty) f(k);
    }

private:
    static constexpr uint64_t kEmpty = ~0ull;

    static std::size_t capacity_for(std::size_t n) {
        std::size_t c = 16;
        while (c * 7 < n * 10) c *= 2;
        return c;
    }

    void rehash(std::size_t cap) {
        std::vector<uint64_t> old = std::move(keys_);
        keys_.assign(cap, kEmpty);
        mask_ = cap - 1;
        size_ = 0;
        for (uint64_t k : old) {
            if (k == kEmpty) continue;
            std::size_t j = mix64(k) & mask_;
            while (keys_[j] != kEmpty) j = (j + 1) & mask_;
            keys_[j] = k;
            ++size_;
        }
    }

    std::vector<uint64_t> keys_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
};

}  // namespace redfront
