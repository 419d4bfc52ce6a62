#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "secmatch/graph.hpp"

namespace secmatch::detail {

/// Maximum-weight perfect matching on the complete graph over a changing
/// vertex set, warm-started from the previous optimum. Inserting a vertex
/// gives it the smallest feasible dual; erasing one dissolves every blossom
/// containing it (moving the blossom dual onto its leaves) and unmatches any
/// edge that stopped being tight. A solve then needs only as many augmenting
/// stages as there are exposed vertices.
///
/// Intended for graphs whose pairs all carry positive weight: with exactly
/// tied optima the matching returned may depend on the insertion history.
class IncrementalPerfectMatcher {
public:
    explicit IncrementalPerfectMatcher(const WeightedGraph& g);

    void insert(Vertex v);
    void erase(Vertex v);
    bool contains(Vertex v) const { return present_flag_[v]; }
    std::size_t size() const { return present_.size(); }

    /// Restores a perfect matching. Requires an even vertex count.
    void solve();

    std::optional<Vertex> partner(Vertex v) const;
    std::vector<Edge> matching() const;

private:
    int key(int a, int b) const { return a < b ? a * n_ + b : b * n_ + a; }
    int endpoint(int p) const { return (p & 1) ? (p >> 1) % n_ : (p >> 1) / n_; }
    int toward(int from, int to) const { return 2 * key(from, to) + (to > from ? 1 : 0); }
    double edge_weight(int k) const { return g_->weight(static_cast<Vertex>(k / n_), static_cast<Vertex>(k % n_)); }
    double slack(int k) const { return dual_[k / n_] + dual_[k % n_] - 2.0 * edge_weight(k); }
    bool allowed(int k) const { return allow_epoch_[k] == epoch_; }
    void allow(int k) { allow_epoch_[k] = epoch_; }

    template <class Fn>
    void for_leaves(int b, Fn&& fn) const {
        if (b < n_) {
            fn(b);
            return;
        }
        for (int t : childs_[b]) for_leaves(t, fn);
    }

    bool stage();
    void dissolve(int b);
    void assign_label(int w, int t, int p);
    int scan_blossom(int v, int w);
    void add_blossom(int base, int k);
    void expand_blossom(int b, bool endstage);
    void augment_blossom(int b, int v);
    void augment_matching(int k);

    const WeightedGraph* g_;
    int n_;
    std::vector<int> present_;  // sorted
    std::vector<bool> present_flag_;
    std::vector<int> mate_;     // endpoint code of partner, -1 if exposed
    std::vector<int> label_;
    std::vector<int> labelend_;
    std::vector<int> inblossom_;
    std::vector<int> parent_;
    std::vector<std::vector<int>> childs_;
    std::vector<int> base_;
    std::vector<std::vector<int>> endps_;
    std::vector<int> bestedge_;
    std::vector<std::vector<int>> bestedges_;
    std::vector<bool> has_bestedges_;
    std::vector<int> unused_;
    std::vector<double> dual_;
    std::vector<std::uint32_t> allow_epoch_;
    std::uint32_t epoch_ = 0;
    std::vector<int> queue_;
};

}  // namespace secmatch::detail
