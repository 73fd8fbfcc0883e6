#pragma once

#include <cstdint>
#include <vector>

namespace redfront {

/// Indexed binary min-heap of (time, id) with deterministic tie-break by id.
/// Every live mobile particle holds at most one pending event.
class EventHeap {
public:
    void reserve(std::size_t n) {
        heap_.reserve(n);
        time_.reserve(n);
        pos_.reserve(n);
    }

    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

    bool contains(uint32_t id) const { return id < pos_.size() && pos_[id] >= 0; }
    double time_of(uint32_t id) const { return time_[id]; }

    uint32_t top() const { return heap_[0]; }
    double top_time() const { return time_[heap_[0]]; }

    void push(uint32_t id, double t) {
        grow(id);
        time_[id] = t;
        pos_[id] = int32_t(heap_.size());
        heap_.push_back(id);
        sift_up(heap_.size() - 1);
    }

    void pop() {
        const uint32_t id = heap_[0];
        pos_[id] = -1;
        const uint32_t last = heap_.back();
        heap_.pop_back();
        if (!heap_.empty() && last != id) {
            heap_[0] = last;
            pos_[last] = 0;
            sift_down(0);
        }
    }

    /// Reschedule an existing event or insert a new one.
    void update(uint32_t id, double t) {
        grow(id);
        if (pos_[id] < 0) {
            push(id, t);
            return;
        }
        const double old = time_[id];
        time_[id] = t;
        const std::size_t i = std::size_t(pos_[id]);
        if (t < old)
            sift_up(i);
        else
            sift_down(i);
    }

private:
    void grow(uint32_t id) {
        if (id >= pos_.size()) {
            pos_.resize(id + 1, -1);
            time_.resize(id + 1, 0.0);
        }
    }

    bool before(uint32_t a, uint32_t b) const {
        return time_[a] < time_[b] || (time_[a] == time_[b] && a < b);
    }

    void sift_up(std::size_t i) {
        const uint32_t id = heap_[i];
        while (i > 0) {
            const std::size_t p = (i - 1) / 2;
            if (!before(id, heap_[p])) break;
            heap_[i] = heap_[p];
            pos_[heap_[i]] = int32_t(i);
            i = p;
        }
        heap_[i] = id;
        pos_[id] = int32_t(i);
    }

    void sift_down(std::size_t i) {
        const uint32_t id = heap_[i];
        const std::size_t n = heap_.size();
        while (true) {
            std::size_t c = 2 * i + 1;
            if (c >= n) break;
            if (c + 1 < n && before(heap_[c + 1], heap_[c])) ++c;
            if (!before(heap_[c], id)) break;
            heap_[i] = heap_[c];
            pos_[heap_[i]] = int32_t(i);
            i = c;
        }
        heap_[i] = id;
        pos_[id] = int32_t(i);
    }

    std::vector<uint32_t> heap_;
    std::vector<double> time_;
    std::vector<int32_t> pos_;
};

}  // namespace redfront
