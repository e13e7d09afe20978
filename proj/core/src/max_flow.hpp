#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

namespace fabtwin::detail {

// Dinic's algorithm on integer capacities.
class MaxFlow {
  public:
    static constexpr std::uint64_t kInfinite = std::numeric_limits<std::uint64_t>::max() / 4;

    explicit MaxFlow(std::uint32_t vertices) : head_(vertices, -1), level_(vertices), cursor_(vertices) {}

    void add_directed(std::uint32_t from, std::uint32_t to, std::uint64_t capacity) { add_pair(from, to, capacity, 0); }
    void add_undirected(std::uint32_t a, std::uint32_t b, std::uint64_t capacity) { add_pair(a, b, capacity, capacity); }

    std::uint64_t run(std::uint32_t source, std::uint32_t sink) {
        std::uint64_t total = 0;
        while (levels(source, sink)) {
            for (std::size_t v = 0; v < head_.size(); ++v) cursor_[v] = head_[v];
            while (auto pushed = augment(source, sink, kInfinite)) total += pushed;
        }
        return total;
    }

  private:
    struct Arc {
        std::uint32_t to;
        std::int64_t next;
        std::uint64_t residual;
    };

    void add_pair(std::uint32_t a, std::uint32_t b, std::uint64_t forward, std::uint64_t backward) {
        arcs_.push_back({b, head_[a], forward});
        head_[a] = static_cast<std::int64_t>(arcs_.size() - 1);
        arcs_.push_back({a, head_[b], backward});
        head_[b] = static_cast<std::int64_t>(arcs_.size() - 1);
    }

    bool levels(std::uint32_t source, std::uint32_t sink) {
        std::fill(level_.begin(), level_.end(), -1);
        level_[source] = 0;
        std::queue<std::uint32_t> queue;
        queue.push(source);
        while (!queue.empty()) {
            const auto v = queue.front();
            queue.pop();
            for (auto a = head_[v]; a != -1; a = arcs_[a].next) {
                const auto& arc = arcs_[a];
                if (arc.residual == 0 || level_[arc.to] != -1) continue;
                level_[arc.to] = level_[v] + 1;
                queue.push(arc.to);
            }
        }
        return level_[sink] != -1;
    }

    std::uint64_t augment(std::uint32_t v, std::uint32_t sink, std::uint64_t limit) {
        if (v == sink) return limit;
        for (auto& a = cursor_[v]; a != -1; a = arcs_[a].next) {
            auto& arc = arcs_[a];
            if (arc.residual == 0 || level_[arc.to] != level_[v] + 1) continue;
            if (auto pushed = augment(arc.to, sink, std::min(limit, arc.residual))) {
                arc.residual -= pushed;
                arcs_[a ^ 1].residual += pushed;
                return pushed;
            }
        }
        return 0;
    }

    std::vector<Arc> arcs_;
    std::vector<std::int64_t> head_;
    std::vector<int> level_;
    std::vector<std::int64_t> cursor_;
};

}  // namespace fabtwin::detail
