#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "m2v/rng.hpp"

namespace m2v {

// Vose alias table: O(n) build, O(1) sampling from a discrete distribution.
class AliasTable {
  public:
    AliasTable() = default;

    explicit AliasTable(std::span<const double> weights) { build(weights); }

    void build(std::span<const double> weights) {
        size_t n = weights.size();
        if (n == 0) throw std::invalid_argument("alias table: empty weight vector");
        prob_.assign(n, 0.0f);
        alias_.assign(n, 0);
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("alias table: negative weight");
            total += w;
        }
        if (total <= 0.0) throw std::invalid_argument("alias table: zero total weight");

        std::vector<double> scaled(n);
        for (size_t i = 0; i < n; ++i) scaled[i] = weights[i] * n / total;

        std::vector<uint32_t> small, large;
        small.reserve(n);
        large.reserve(n);
        for (size_t i = 0; i < n; ++i) {
            (scaled[i] < 1.0 ? small : large).push_back(static_cast<uint32_t>(i));
        }
        while (!small.empty() && !large.empty()) {
            uint32_t s = small.back();
            small.pop_back();
            uint32_t l = large.back();
            large.pop_back();
            prob_[s] = static_cast<float>(scaled[s]);
            alias_[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            (scaled[l] < 1.0 ? small : large).push_back(l);
        }
        while (!large.empty()) {
            prob_[large.back()] = 1.0f;
            large.pop_back();
        }
        while (!small.empty()) {
            prob_[small.back()] = 1.0f;
            small.pop_back();
        }
    }

    size_t size() const { return prob_.size(); }
    bool empty() const { return prob_.empty(); }

    uint32_t sample(Rng& rng) const {
        uint32_t i = static_cast<uint32_t>(rng.next_below(prob_.size()));
        return rng.next_double() < prob_[i] ? i : alias_[i];
    }

  private:
    std::vector<float> prob_;
    std::vector<uint32_t> alias_;
};

}  // namespace m2v
