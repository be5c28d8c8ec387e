#include "cardioquant/maxflow.hpp"

#include "cardioquant/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cq {

MaxFlow::MaxFlow(int node_count)
{
    require(node_count >= 0, ErrorKind::invalid_argument, "MaxFlow: negative node count");
    nodes_.resize(static_cast<std::size_t>(node_count));
}

void MaxFlow::add_terminal_weights(int i, double cap_source, double cap_sink)
{
    require(cap_source >= 0.0 && cap_sink >= 0.0 && std::isfinite(cap_source) && std::isfinite(cap_sink),
            ErrorKind::invalid_argument, "MaxFlow: terminal capacities must be finite and non-negative");
    Node& n = nodes_.at(static_cast<std::size_t>(i));
    const double residual = n.terminal;
    if (residual > 0.0)
        cap_source += residual;
    else
        cap_sink -= residual;
    // Flow that can go straight source -> i -> sink is pushed immediately.
    flow_ += std::min(cap_source, cap_sink);
    n.terminal = cap_source - cap_sink;
}

void MaxFlow::add_edge(int i, int j, double cap, double rev_cap)
{
    require(cap >= 0.0 && rev_cap >= 0.0 && std::isfinite(cap) && std::isfinite(rev_cap),
            ErrorKind::invalid_argument, "MaxFlow: edge capacities must be finite and non-negative");
    require(i != j, ErrorKind::invalid_argument, "MaxFlow: self loop");
    const int a = static_cast<int>(arcs_.size());
    arcs_.push_back({j, nodes_.at(static_cast<std::size_t>(i)).first, cap});
    arcs_.push_back({i, nodes_.at(static_cast<std::size_t>(j)).first, rev_cap});
    nodes_[i].first = a;
    nodes_[j].first = a + 1;
}

void MaxFlow::activate(int i)
{
    if (nodes_[i].active) return;
    nodes_[i].active = true;
    active_.push_back(i);
}

// Expands the tree containing i by one layer. Returns an arc from a source-tree
// node to a sink-tree node when the trees touch, or kNone.
int MaxFlow::grow(int i)
{
    const Node& n = nodes_[i];
    for (int a = n.first; a != kNone; a = arcs_[a].next) {
        const int j = arcs_[a].head;
        if (n.tree == Tree::source) {
            if (arcs_[a].residual <= 0.0) continue;
            if (nodes_[j].tree == Tree::free) {
                nodes_[j].tree = Tree::source;
                nodes_[j].parent = sister(a);
                activate(j);
            } else if (nodes_[j].tree == Tree::sink) {
                return a;
            }
        } else {
            if (arcs_[sister(a)].residual <= 0.0) continue;
            if (nodes_[j].tree == Tree::free) {
                nodes_[j].tree = Tree::sink;
                nodes_[j].parent = sister(a);
                activate(j);
            } else if (nodes_[j].tree == Tree::source) {
                return sister(a);
            }
        }
    }
    return kNone;
}

void MaxFlow::augment(int middle)
{
    const int s_end = arcs_[sister(middle)].head;
    const int t_end = arcs_[middle].head;

    double bottleneck = arcs_[middle].residual;
    for (int i = s_end;;) {
        const int p = nodes_[i].parent;
        if (p == kTerminal) {
            bottleneck = std::min(bottleneck, nodes_[i].terminal);
            break;
        }
        bottleneck = std::min(bottleneck, arcs_[sister(p)].residual);
        i = arcs_[p].head;
    }
    for (int i = t_end;;) {
        const int p = nodes_[i].parent;
        if (p == kTerminal) {
            bottleneck = std::min(bottleneck, -nodes_[i].terminal);
            break;
        }
        bottleneck = std::min(bottleneck, arcs_[p].residual);
        i = arcs_[p].head;
    }

    arcs_[middle].residual -= bottleneck;
    arcs_[sister(middle)].residual += bottleneck;

    for (int i = s_end;;) {
        const int p = nodes_[i].parent;
        if (p == kTerminal) {
            nodes_[i].terminal -= bottleneck;
            if (nodes_[i].terminal <= 0.0) {
                nodes_[i].terminal = 0.0;
                nodes_[i].parent = kOrphan;
                orphans_.push_back(i);
            }
            break;
        }
        arcs_[p].residual += bottleneck;
        arcs_[sister(p)].residual -= bottleneck;
        const int next = arcs_[p].head;
        if (arcs_[sister(p)].residual <= 0.0) {
            nodes_[i].parent = kOrphan;
            orphans_.push_back(i);
        }
        i = next;
    }
    for (int i = t_end;;) {
        const int p = nodes_[i].parent;
        if (p == kTerminal) {
            nodes_[i].terminal += bottleneck;
            if (nodes_[i].terminal >= 0.0) {
                nodes_[i].terminal = 0.0;
                nodes_[i].parent = kOrphan;
                orphans_.push_back(i);
            }
            break;
        }
        arcs_[sister(p)].residual += bottleneck;
        arcs_[p].residual -= bottleneck;
        const int next = arcs_[p].head;
        if (arcs_[p].residual <= 0.0) {
            nodes_[i].parent = kOrphan;
            orphans_.push_back(i);
        }
        i = next;
    }
    flow_ += bottleneck;
}

bool MaxFlow::rooted(int i) const
{
    for (;;) {
        const int p = nodes_[i].parent;
        if (p == kTerminal) return true;
        if (p < 0) return false;
        i = arcs_[p].head;
    }
}

void MaxFlow::adopt()
{
    while (!orphans_.empty()) {
        const int i = orphans_.back();
        orphans_.pop_back();
        Node& n = nodes_[i];
        const Tree tree = n.tree;

        int new_parent = kNone;
        for (int a = n.first; a != kNone; a = arcs_[a].next) {
            const int j = arcs_[a].head;
            if (nodes_[j].tree != tree) continue;
            const double cap = tree == Tree::source ? arcs_[sister(a)].residual : arcs_[a].residual;
            if (cap > 0.0 && rooted(j)) {
                new_parent = a;
                break;
            }
        }
        if (new_parent != kNone) {
            n.parent = new_parent;
            continue;
        }

        for (int a = n.first; a != kNone; a = arcs_[a].next) {
            const int j = arcs_[a].head;
            Node& m = nodes_[j];
            if (m.tree != tree) continue;
            const double cap = tree == Tree::source ? arcs_[sister(a)].residual : arcs_[a].residual;
            if (cap > 0.0) activate(j);
            if (m.parent >= 0 && arcs_[m.parent].head == i) {
                m.parent = kOrphan;
                orphans_.push_back(j);
            }
        }
        n.tree = Tree::free;
        n.parent = kNone;
    }
}

double MaxFlow::solve()
{
    active_.clear();
    for (int i = 0; i < node_count(); ++i) {
        Node& n = nodes_[i];
        n.active = false;
        if (n.terminal > 0.0) {
            n.tree = Tree::source;
            n.parent = kTerminal;
            activate(i);
        } else if (n.terminal < 0.0) {
            n.tree = Tree::sink;
            n.parent = kTerminal;
            activate(i);
        } else {
            n.tree = Tree::free;
            n.parent = kNone;
        }
    }

    while (!active_.empty()) {
        const int i = active_.front();
        if (nodes_[i].tree == Tree::free) {
            active_.pop_front();
            nodes_[i].active = false;
            continue;
        }
        const int middle = grow(i);
        if (middle == kNone) {
            active_.pop_front();
            nodes_[i].active = false;
            continue;
        }
        augment(middle);
        adopt();
    }
    return flow_;
}

}  // namespace cq
