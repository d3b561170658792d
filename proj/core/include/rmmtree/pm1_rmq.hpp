#ifndef RMMTREE_PM1_RMQ_HPP
#define RMMTREE_PM1_RMQ_HPP

#include <cstdint>
#include <span>
#include <stdexcept>

#include "rmmtree/static_rmm.hpp"

namespace rmm {

/// Range min/max queries over an integer array whose consecutive entries
/// differ by exactly +-1. Only the delta bitmap is kept (plus one base
/// value); values are recovered as base + excess.
class pm1_array {
  public:
    static pm1_array from_values(std::span<const int64_t> values,
                                 static_rmm::config cfg = {}) {
        if (values.empty()) throw std::invalid_argument("pm1_array: empty input");
        paren_bitvector d;
        d.push_back(true);
        for (size_t i = 1; i < values.size(); ++i) {
            int64_t step = values[i] - values[i - 1];
            if (step != 1 && step != -1)
                throw std::invalid_argument("pm1_array: adjacent difference is not +-1");
            d.push_back(step == 1);
        }
        return pm1_array(std::move(d), values[0] - 1, cfg);
    }

    static pm1_array from_deltas(paren_bitvector deltas, int64_t base = 0,
                                 static_rmm::config cfg = {}) {
        return pm1_array(std::move(deltas), base, cfg);
    }

    uint64_t size() const { return rmm_.size(); }
    int64_t base() const { return base_; }
    const static_rmm& rmm() const { return rmm_; }

    int64_t value_at(uint64_t i) const { return base_ + rmm_.excess(i); }

    /// Leftmost argmin / argmax over [i, j].
    uint64_t rmq(uint64_t i, uint64_t j) const { return rmm_.rmqi(i, j).pos; }
    uint64_t rMq(uint64_t i, uint64_t j) const { return rmm_.rMqi(i, j).pos; }

    uint64_t space_bytes() const { return sizeof(*this) - sizeof(static_rmm) + rmm_.space_bytes(); }

  private:
    pm1_array(paren_bitvector deltas, int64_t base, static_rmm::config cfg)
        : rmm_(std::move(deltas), cfg), base_(base) {}

    static_rmm rmm_;
    int64_t base_;
};

}  // namespace rmm

#endif
