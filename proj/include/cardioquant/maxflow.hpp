#pragma once

#include <deque>
#include <vector>

namespace cq {

// s-t max-flow / min-cut with real capacities by augmenting paths over two
// search trees grown from the terminals (Boykov-Kolmogorov). After solve(),
// nodes still attached to the source tree form the source side of a minimum
// cut. Not thread-safe; one instance per solve.
class MaxFlow {
public:
    explicit MaxFlow(int node_count);

    int node_count() const noexcept { return static_cast<int>(nodes_.size()); }

    // Adds capacities source->i and i->sink. Repeated calls accumulate.
    void add_terminal_weights(int i, double cap_source, double cap_sink);

    // Adds arc i->j with capacity `cap` and j->i with `rev_cap`.
    void add_edge(int i, int j, double cap, double rev_cap);

    double solve();

    double flow() const noexcept { return flow_; }
    bool in_source_side(int i) const { return nodes_[i].tree == Tree::source; }

private:
    enum class Tree : unsigned char { free, source, sink };
    static constexpr int kNone = -1;
    static constexpr int kTerminal = -2;
    static constexpr int kOrphan = -3;

    struct Arc {
        int head;
        int next;  // next arc out of the same tail
        double residual;
    };
    struct Node {
        int first = -1;
        int parent = kNone;  // arc from this node towards its parent, or a marker
        Tree tree = Tree::free;
        double terminal = 0.0;  // > 0: residual from source, < 0: residual to sink
        bool active = false;
    };

    static int sister(int a) noexcept { return a ^ 1; }

    void activate(int i);
    int grow(int i);
    void augment(int middle);
    bool rooted(int i) const;
    void adopt();

    std::vector<Node> nodes_;
    std::vector<Arc> arcs_;
    std::deque<int> active_;
    std::vector<int> orphans_;
    double flow_ = 0.0;
};

}  // namespace cq
