#include "secmatch/incremental_matching.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

#include "secmatch/errors.hpp"

namespace secmatch::detail {

IncrementalPerfectMatcher::IncrementalPerfectMatcher(const WeightedGraph& g)
    : g_(&g), n_(static_cast<int>(g.size())) {
    present_flag_.assign(n_, false);
    mate_.assign(n_, -1);
    label_.assign(2 * n_, 0);
    labelend_.assign(2 * n_, -1);
    inblossom_.resize(n_);
    for (int i = 0; i < n_; ++i) inblossom_[i] = i;
    parent_.assign(2 * n_, -1);
    childs_.assign(2 * n_, {});
    base_.assign(2 * n_, -1);
    for (int i = 0; i < n_; ++i) base_[i] = i;
    endps_.assign(2 * n_, {});
    bestedge_.assign(2 * n_, -1);
    bestedges_.assign(2 * n_, {});
    has_bestedges_.assign(2 * n_, false);
    for (int b = 2 * n_ - 1; b >= n_; --b) unused_.push_back(b);
    dual_.assign(2 * n_, 0.0);
    allow_epoch_.assign(static_cast<std::size_t>(n_) * n_, 0);
}

void IncrementalPerfectMatcher::insert(Vertex v) {
    const int x = static_cast<int>(v);
    if (x < 0 || x >= n_) throw InputError("vertex out of range");
    if (present_flag_[x]) throw InputError("vertex already present");
    double d = present_.empty() ? 0.0 : -std::numeric_limits<double>::infinity();
    for (int y : present_) d = std::max(d, 2.0 * g_->weight(v, static_cast<Vertex>(y)) - dual_[y]);
    dual_[x] = d;
    mate_[x] = -1;
    inblossom_[x] = x;
    parent_[x] = -1;
    present_flag_[x] = true;
    present_.insert(std::lower_bound(present_.begin(), present_.end(), x), x);
}

void IncrementalPerfectMatcher::erase(Vertex v) {
    const int r = static_cast<int>(v);
    if (r < 0 || r >= n_ || !present_flag_[r]) throw InputError("vertex not present");
    while (inblossom_[r] != r) dissolve(inblossom_[r]);
    if (mate_[r] != -1) {
        mate_[endpoint(mate_[r])] = -1;
        mate_[r] = -1;
    }
    present_flag_[r] = false;
    present_.erase(std::lower_bound(present_.begin(), present_.end(), r));
}

// Removes top-level blossom b. Leaves absorb its dual so inner slacks are unchanged.
void IncrementalPerfectMatcher::dissolve(int b) {
    const double z = dual_[b];
    for_leaves(b, [&](int leaf) { dual_[leaf] += z; });
    for (int s : childs_[b]) {
        parent_[s] = -1;
        for_leaves(s, [&](int leaf) { inblossom_[leaf] = s; });
    }
    const int base = base_[b];
    if (z != 0.0 && mate_[base] != -1) {
        mate_[endpoint(mate_[base])] = -1;
        mate_[base] = -1;
    }
    childs_[b].clear();
    endps_[b].clear();
    base_[b] = -1;
    dual_[b] = 0.0;
    bestedges_[b].clear();
    has_bestedges_[b] = false;
    unused_.push_back(b);
}

void IncrementalPerfectMatcher::solve() {
    if (present_.size() % 2 != 0) throw InputError("perfect matching needs an even vertex count");
    for (;;) {
        bool exposed = false;
        for (int v : present_)
            if (mate_[v] == -1) {
                exposed = true;
                break;
            }
        if (!exposed) return;
        if (!stage()) throw InvariantError("no augmenting path in a complete graph");
    }
}

bool IncrementalPerfectMatcher::stage() {
    std::fill(label_.begin(), label_.end(), 0);
    std::fill(bestedge_.begin(), bestedge_.end(), -1);
    for (int b = n_; b < 2 * n_; ++b) {
        bestedges_[b].clear();
        has_bestedges_[b] = false;
    }
    if (++epoch_ == 0) {
        std::fill(allow_epoch_.begin(), allow_epoch_.end(), 0);
        epoch_ = 1;
    }
    queue_.clear();
    for (int v : present_)
        if (mate_[v] == -1 && label_[inblossom_[v]] == 0) assign_label(v, 1, -1);

    bool augmented = false;
    for (;;) {
        while (!queue_.empty() && !augmented) {
            const int v = queue_.back();
            queue_.pop_back();
            for (int w : present_) {
                if (w == v || inblossom_[v] == inblossom_[w]) continue;
                const int p = toward(v, w);
                const int k = p >> 1;
                double kslack = 0.0;
                if (!allowed(k)) {
                    kslack = slack(k);
                    if (kslack <= 0.0) allow(k);
                }
                if (allowed(k)) {
                    if (label_[inblossom_[w]] == 0) {
                        assign_label(w, 2, p ^ 1);
                    } else if (label_[inblossom_[w]] == 1) {
                        const int base = scan_blossom(v, w);
                        if (base >= 0) {
                            add_blossom(base, k);
                        } else {
                            augment_matching(k);
                            augmented = true;
                            break;
                        }
                    } else if (label_[w] == 0) {
                        label_[w] = 2;
                        labelend_[w] = p ^ 1;
                    }
                } else if (label_[inblossom_[w]] == 1) {
                    const int b = inblossom_[v];
                    if (bestedge_[b] == -1 || kslack < slack(bestedge_[b])) bestedge_[b] = k;
                } else if (label_[w] == 0) {
                    if (bestedge_[w] == -1 || kslack < slack(bestedge_[w])) bestedge_[w] = k;
                }
            }
        }
        if (augmented) break;

        int deltatype = -1;
        double delta = 0.0;
        int deltaedge = -1;
        int deltablossom = -1;
        for (int v : present_) {
            if (label_[inblossom_[v]] == 0 && bestedge_[v] != -1) {
                const double d = slack(bestedge_[v]);
                if (deltatype == -1 || d < delta) {
                    delta = d;
                    deltatype = 2;
                    deltaedge = bestedge_[v];
                }
            }
        }
        for (int b = 0; b < 2 * n_; ++b) {
            if (b < n_ && !present_flag_[b]) continue;
            if (parent_[b] == -1 && label_[b] == 1 && bestedge_[b] != -1 && (b < n_ || base_[b] >= 0)) {
                const double d = slack(bestedge_[b]) / 2.0;
                if (deltatype == -1 || d < delta) {
                    delta = d;
                    deltatype = 3;
                    deltaedge = bestedge_[b];
                }
            }
        }
        for (int b = n_; b < 2 * n_; ++b) {
            if (base_[b] >= 0 && parent_[b] == -1 && label_[b] == 2 &&
                (deltatype == -1 || dual_[b] < delta)) {
                delta = dual_[b];
                deltatype = 4;
                deltablossom = b;
            }
        }
        if (deltatype == -1) return false;
        delta = std::max(delta, 0.0);

        for (int v : present_) {
            const int l = label_[inblossom_[v]];
            if (l == 1)
                dual_[v] -= delta;
            else if (l == 2)
                dual_[v] += delta;
        }
        for (int b = n_; b < 2 * n_; ++b) {
            if (base_[b] >= 0 && parent_[b] == -1) {
                if (label_[b] == 1)
                    dual_[b] += delta;
                else if (label_[b] == 2)
                    dual_[b] -= delta;
            }
        }

        if (deltatype == 2) {
            allow(deltaedge);
            int i = deltaedge / n_;
            int j = deltaedge % n_;
            if (label_[inblossom_[i]] == 0) std::swap(i, j);
            queue_.push_back(i);
        } else if (deltatype == 3) {
            allow(deltaedge);
            queue_.push_back(deltaedge / n_);
        } else {
            expand_blossom(deltablossom, false);
        }
    }
    for (int b = n_; b < 2 * n_; ++b) {
        if (parent_[b] == -1 && base_[b] >= 0 && label_[b] == 1 && dual_[b] == 0.0)
            expand_blossom(b, true);
    }
    return true;
}

void IncrementalPerfectMatcher::assign_label(int w, int t, int p) {
    const int b = inblossom_[w];
    label_[w] = label_[b] = t;
    labelend_[w] = labelend_[b] = p;
    bestedge_[w] = bestedge_[b] = -1;
    if (t == 1) {
        for_leaves(b, [&](int v) { queue_.push_back(v); });
    } else if (t == 2) {
        const int base = base_[b];
        assign_label(endpoint(mate_[base]), 1, mate_[base] ^ 1);
    }
}

int IncrementalPerfectMatcher::scan_blossom(int v, int w) {
    std::vector<int> path;
    int base = -1;
    while (v != -1 || w != -1) {
        int b = inblossom_[v];
        if (label_[b] & 4) {
            base = base_[b];
            break;
        }
        path.push_back(b);
        label_[b] = 5;
        if (labelend_[b] == -1) {
            v = -1;
        } else {
            v = endpoint(labelend_[b]);
            b = inblossom_[v];
            v = endpoint(labelend_[b]);
        }
        if (w != -1) std::swap(v, w);
    }
    for (int b : path) label_[b] = 1;
    return base;
}

void IncrementalPerfectMatcher::add_blossom(int base, int k) {
    int v = k / n_;
    int w = k % n_;
    const int bb = inblossom_[base];
    int bv = inblossom_[v];
    int bw = inblossom_[w];
    const int b = unused_.back();
    unused_.pop_back();
    base_[b] = base;
    parent_[b] = -1;
    parent_[bb] = b;
    auto& path = childs_[b];
    auto& endps = endps_[b];
    path.clear();
    endps.clear();
    while (bv != bb) {
        parent_[bv] = b;
        path.push_back(bv);
        endps.push_back(labelend_[bv]);
        v = endpoint(labelend_[bv]);
        bv = inblossom_[v];
    }
    path.push_back(bb);
    std::reverse(path.begin(), path.end());
    std::reverse(endps.begin(), endps.end());
    endps.push_back(2 * k);
    while (bw != bb) {
        parent_[bw] = b;
        path.push_back(bw);
        endps.push_back(labelend_[bw] ^ 1);
        w = endpoint(labelend_[bw]);
        bw = inblossom_[w];
    }
    label_[b] = 1;
    labelend_[b] = labelend_[bb];
    dual_[b] = 0.0;
    for_leaves(b, [&](int leaf) {
        if (label_[inblossom_[leaf]] == 2) queue_.push_back(leaf);
        inblossom_[leaf] = b;
    });

    std::vector<int> bestedgeto(2 * n_, -1);
    for (int sub : path) {
        auto consider = [&](int kk) {
            int i = kk / n_;
            int j = kk % n_;
            if (inblossom_[j] == b) std::swap(i, j);
            const int bj = inblossom_[j];
            if (bj != b && label_[bj] == 1 &&
                (bestedgeto[bj] == -1 || slack(kk) < slack(bestedgeto[bj])))
                bestedgeto[bj] = kk;
        };
        if (!has_bestedges_[sub]) {
            for_leaves(sub, [&](int leaf) {
                for (int y : present_)
                    if (y != leaf) consider(key(leaf, y));
            });
        } else {
            for (int kk : bestedges_[sub]) consider(kk);
        }
        bestedges_[sub].clear();
        has_bestedges_[sub] = false;
        bestedge_[sub] = -1;
    }
    auto& best = bestedges_[b];
    best.clear();
    for (int kk : bestedgeto)
        if (kk != -1) best.push_back(kk);
    has_bestedges_[b] = true;
    bestedge_[b] = -1;
    for (int kk : best)
        if (bestedge_[b] == -1 || slack(kk) < slack(bestedge_[b])) bestedge_[b] = kk;
}

void IncrementalPerfectMatcher::expand_blossom(int b, bool endstage) {
    const std::vector<int> childs = childs_[b];
    for (int s : childs) {
        parent_[s] = -1;
        if (s < n_) {
            inblossom_[s] = s;
        } else if (endstage && dual_[s] == 0.0) {
            expand_blossom(s, endstage);
        } else {
            for_leaves(s, [&](int leaf) { inblossom_[leaf] = s; });
        }
    }
    if (!endstage && label_[b] == 2) {
        const auto& ch = childs_[b];
        const auto& ep = endps_[b];
        const int len = static_cast<int>(ch.size());
        auto at = [len](int j) { return ((j % len) + len) % len; };
        const int entrychild = inblossom_[endpoint(labelend_[b] ^ 1)];
        int j = static_cast<int>(std::find(ch.begin(), ch.end(), entrychild) - ch.begin());
        int jstep;
        int endptrick;
        if (j & 1) {
            j -= len;
            jstep = 1;
            endptrick = 0;
        } else {
            jstep = -1;
            endptrick = 1;
        }
        int p = labelend_[b];
        while (j != 0) {
            label_[endpoint(p ^ 1)] = 0;
            label_[endpoint(ep[at(j - endptrick)] ^ endptrick ^ 1)] = 0;
            assign_label(endpoint(p ^ 1), 2, p);
            allow(ep[at(j - endptrick)] >> 1);
            j += jstep;
            p = ep[at(j - endptrick)] ^ endptrick;
            allow(p >> 1);
            j += jstep;
        }
        int bv = ch[at(j)];
        label_[endpoint(p ^ 1)] = label_[bv] = 2;
        labelend_[endpoint(p ^ 1)] = labelend_[bv] = p;
        bestedge_[bv] = -1;
        j += jstep;
        while (ch[at(j)] != entrychild) {
            bv = ch[at(j)];
            if (label_[bv] == 1) {
                j += jstep;
                continue;
            }
            int found = -1;
            for_leaves(bv, [&](int leaf) {
                if (found == -1 && label_[leaf] != 0) found = leaf;
            });
            if (found != -1) {
                label_[found] = 0;
                label_[endpoint(mate_[base_[bv]])] = 0;
                assign_label(found, 2, labelend_[found]);
            }
            j += jstep;
        }
    }
    label_[b] = labelend_[b] = -1;
    childs_[b].clear();
    endps_[b].clear();
    base_[b] = -1;
    dual_[b] = 0.0;
    bestedges_[b].clear();
    has_bestedges_[b] = false;
    bestedge_[b] = -1;
    unused_.push_back(b);
}

void IncrementalPerfectMatcher::augment_blossom(int b, int v) {
    int t = v;
    while (parent_[t] != b) t = parent_[t];
    if (t >= n_) augment_blossom(t, v);
    auto& ch = childs_[b];
    auto& ep = endps_[b];
    const int len = static_cast<int>(ch.size());
    auto at = [len](int j) { return ((j % len) + len) % len; };
    const int i = static_cast<int>(std::find(ch.begin(), ch.end(), t) - ch.begin());
    int j = i;
    int jstep;
    int endptrick;
    if (i & 1) {
        j -= len;
        jstep = 1;
        endptrick = 0;
    } else {
        jstep = -1;
        endptrick = 1;
    }
    while (j != 0) {
        j += jstep;
        t = ch[at(j)];
        const int p = ep[at(j - endptrick)] ^ endptrick;
        if (t >= n_) augment_blossom(t, endpoint(p));
        j += jstep;
        t = ch[at(j)];
        if (t >= n_) augment_blossom(t, endpoint(p ^ 1));
        mate_[endpoint(p)] = p ^ 1;
        mate_[endpoint(p ^ 1)] = p;
    }
    std::rotate(ch.begin(), ch.begin() + i, ch.end());
    std::rotate(ep.begin(), ep.begin() + i, ep.end());
    base_[b] = base_[ch[0]];
    assert(base_[b] == v);
}

void IncrementalPerfectMatcher::augment_matching(int k) {
    const int v0 = k / n_;
    const int w0 = k % n_;
    const int starts[2][2] = {{v0, 2 * k + 1}, {w0, 2 * k}};
    for (const auto& sp : starts) {
        int s = sp[0];
        int p = sp[1];
        for (;;) {
            const int bs = inblossom_[s];
            if (bs >= n_) augment_blossom(bs, s);
            mate_[s] = p;
            if (labelend_[bs] == -1) break;
            const int t = endpoint(labelend_[bs]);
            const int bt = inblossom_[t];
            s = endpoint(labelend_[bt]);
            const int j = endpoint(labelend_[bt] ^ 1);
            if (bt >= n_) augment_blossom(bt, j);
            mate_[j] = labelend_[bt];
            p = labelend_[bt] ^ 1;
        }
    }
}

std::optional<Vertex> IncrementalPerfectMatcher::partner(Vertex v) const {
    const int x = static_cast<int>(v);
    if (x < 0 || x >= n_ || !present_flag_[x] || mate_[x] == -1) return std::nullopt;
    return static_cast<Vertex>(endpoint(mate_[x]));
}

std::vector<Edge> IncrementalPerfectMatcher::matching() const {
    std::vector<Edge> out;
    for (int v : present_)
        if (mate_[v] != -1 && endpoint(mate_[v]) > v)
            out.push_back(Edge{static_cast<Vertex>(v), static_cast<Vertex>(endpoint(mate_[v]))});
    return out;
}

}  // namespace secmatch::detail
