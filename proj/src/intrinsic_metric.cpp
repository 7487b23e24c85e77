#include "reeb/intrinsic_metric.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "reeb/union_find.hpp"

namespace reeb {

namespace {

// Truncated-graph connectivity: cells are vertices, edges, and the query
// points; an edge piece reaches an endpoint only if the endpoint value lies
// in the window.
struct Truncation {
    const ReebGraph& g;
    std::map<VertexId, int> vidx;
    std::map<EdgeId, int> eidx;
    int nv, ne;

    explicit Truncation(const ReebGraph& gg) : g(gg) {
        for (const auto& v : g.vertices) vidx.emplace(v.id, (int)vidx.size());
        for (const auto& e : g.edges) eidx.emplace(e.id, (int)eidx.size());
        nv = (int)vidx.size();
        ne = (int)eidx.size();
    }

    // Component label of every cell for the closed window [a, b]; -1 = absent.
    std::vector<int> labels(const Rat& a, const Rat& b) const {
        std::vector<char> v_in(nv, 0), e_in(ne, 0);
        for (int i = 0; i < nv; ++i) {
            const Rat& val = g.vertices[i].value;
            v_in[i] = a <= val && val <= b;
        }
        for (int i = 0; i < ne; ++i) {
            Rat lo = g.value_of(g.edges[i].lower), hi = g.value_of(g.edges[i].upper);
            e_in[i] = lo <= b && hi >= a;
        }
        UnionFind uf(nv + ne);
        for (int i = 0; i < ne; ++i) {
            if (!e_in[i]) continue;
            for (VertexId end : {g.edges[i].lower, g.edges[i].upper}) {
                int vi = vidx.at(end);
                if (v_in[vi]) uf.unite(nv + i, vi);
            }
        }
        std::vector<int> lab(nv + ne, -1);
        for (int i = 0; i < nv + ne; ++i)
            if (i < nv ? v_in[i] : e_in[i - nv]) lab[i] = uf.find(i);
        return lab;
    }

    int cell_of_point(const GraphPoint& p) const {
        return p.on_edge ? nv + eidx.at(p.edge) : vidx.at(p.vertex);
    }
};

} // namespace

std::optional<Rat> path_height_distance(const ReebGraph& g, const GraphPoint& p,
                                        const GraphPoint& q) {
    if (!point_exists(g, p) || !point_exists(g, q))
        throw std::invalid_argument("path_height_distance: invalid graph point");
    Rat fp = value_at(g, p), fq = value_at(g, q);
    Rat vmin = rat_min(fp, fq), vmax = rat_max(fp, fq);
    if (p == q) return Rat(0);

    Truncation tr(g);
    std::vector<Rat> lows{vmin}, highs{vmax};
    for (const auto& v : g.vertices) {
        if (v.value < vmin) lows.push_back(v.value);
        if (v.value > vmax) highs.push_back(v.value);
    }
    std::sort(lows.begin(), lows.end());
    std::sort(highs.begin(), highs.end());
    lows.erase(std::unique(lows.begin(), lows.end()), lows.end());
    highs.erase(std::unique(highs.begin(), highs.end()), highs.end());

    auto connected = [&](const Rat& a, const Rat& b) {
        auto lab = tr.labels(a, b);
        int cp = lab[tr.cell_of_point(p)], cq = lab[tr.cell_of_point(q)];
        return cp >= 0 && cp == cq;
    };

    // Feasibility is monotone in interval inclusion, so as the lower end a
    // decreases, the least feasible upper end never increases.
    std::optional<Rat> best;
    int k = (int)highs.size(); // index of least feasible b for the current a; size() = none yet
    for (int ai = (int)lows.size() - 1; ai >= 0; --ai) {
        const Rat& a = lows[ai];
        if (k == (int)highs.size()) {
            int t = 0;
            while (t < (int)highs.size() && !connected(a, highs[t])) ++t;
            k = t;
        } else {
            while (k > 0 && connected(a, highs[k - 1])) --k;
        }
        if (k < (int)highs.size()) {
            Rat width = highs[k] - a;
            if (!best || width < *best) best = width;
        }
    }
    return best;
}

std::vector<std::vector<std::optional<Rat>>>
path_height_matrix(const ReebGraph& g, const std::vector<GraphPoint>& points) {
    size_t n = points.size();
    std::vector<std::vector<std::optional<Rat>>> dist(n, std::vector<std::optional<Rat>>(n));
    for (size_t i = 0; i < n; ++i) dist[i][i] = Rat(0);
    if (n == 0) return dist;

    Truncation tr(g);
    std::vector<Rat> values;
    for (const auto& v : g.vertices) values.push_back(v.value);
    for (const auto& p : points) values.push_back(value_at(g, p));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<Rat> pval(n);
    std::vector<int> pcell(n);
    for (size_t i = 0; i < n; ++i) {
        pval[i] = value_at(g, points[i]);
        pcell[i] = tr.cell_of_point(points[i]);
    }

    // Enumerate candidate windows in increasing width; the first window that
    // connects a pair (and covers both its values) settles that pair.
    struct Cand {
        Rat width;
        int a, b;
    };
    std::vector<Cand> cands;
    for (int a = 0; a < (int)values.size(); ++a)
        for (int b = a; b < (int)values.size(); ++b)
            cands.push_back({values[b] - values[a], a, b});
    std::sort(cands.begin(), cands.end(),
              [](const Cand& x, const Cand& y) { return x.width < y.width; });

    size_t unresolved = n * (n - 1) / 2;
    for (const auto& c : cands) {
        if (unresolved == 0) break;
        const Rat& a = values[c.a];
        const Rat& b = values[c.b];
        auto lab = tr.labels(a, b);
        for (size_t i = 0; i < n; ++i) {
            if (pval[i] < a || pval[i] > b || lab[pcell[i]] < 0) continue;
            for (size_t j = i + 1; j < n; ++j) {
                if (dist[i][j]) continue;
                if (pval[j] < a || pval[j] > b) continue;
                if (lab[pcell[i]] == lab[pcell[j]]) {
                    dist[i][j] = dist[j][i] = c.width;
                    --unresolved;
                }
            }
        }
    }
    return dist;
}

} // namespace reeb
