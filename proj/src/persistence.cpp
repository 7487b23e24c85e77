#include "reeb/persistence.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace reeb {

namespace {

// Cells of the extended filtration.  The first N columns are the ascending
// copies (sublevel order), the next N the descending cone copies (superlevel
// order).  Rows use the same indexing.
struct ExtendedFiltration {
    const ReebGraph& g;
    int nv, ne, n;
    std::vector<int> asc_order;  // cell -> column position among ascending
    std::vector<int> desc_order; // cell -> column position among descending

    // cell ids: vertices [0, nv), edges [nv, nv+ne)
    Rat asc_key(int cell) const {
        if (cell < nv) return g.vertices[cell].value;
        const auto& e = g.edges[cell - nv];
        return g.value_of(e.upper);
    }
    Rat desc_key(int cell) const {
        if (cell < nv) return g.vertices[cell].value;
        const auto& e = g.edges[cell - nv];
        return g.value_of(e.lower);
    }
    int dim(int cell) const { return cell < nv ? 0 : 1; }

    explicit ExtendedFiltration(const ReebGraph& gg) : g(gg) {
        nv = (int)g.vertices.size();
        ne = (int)g.edges.size();
        n = nv + ne;
        std::vector<int> cells(n);
        for (int i = 0; i < n; ++i) cells[i] = i;
        auto asc = cells, desc = cells;
        std::sort(asc.begin(), asc.end(), [&](int a, int b) {
            Rat ka = asc_key(a), kb = asc_key(b);
            if (ka != kb) return ka < kb;
            if (dim(a) != dim(b)) return dim(a) < dim(b);
            return a < b;
        });
        std::sort(desc.begin(), desc.end(), [&](int a, int b) {
            Rat ka = desc_key(a), kb = desc_key(b);
            if (ka != kb) return kb < ka; // descending sweep
            if (dim(a) != dim(b)) return dim(a) < dim(b);
            return a < b;
        });
        asc_order.resize(n);
        desc_order.resize(n);
        for (int pos = 0; pos < n; ++pos) asc_order[asc[pos]] = pos;
        for (int pos = 0; pos < n; ++pos) desc_order[desc[pos]] = pos;
    }

    int asc_row(int cell) const { return asc_order[cell]; }
    int desc_row(int cell) const { return n + desc_order[cell]; }
};

} // namespace

ExtendedDiagrams extended_diagrams(const ReebGraph& g) {
    ExtendedDiagrams out;
    ExtendedFiltration f(g);
    int n = f.n;
    if (n == 0) return out;

    std::map<VertexId, int> vcell;
    for (int i = 0; i < f.nv; ++i) vcell.emplace(g.vertices[i].id, i);

    // columns over Z/2 as sorted row-index sets
    int total = 2 * n;
    std::vector<std::set<int>> col(total);
    std::vector<int> col_cell(total, -1); // column position -> cell id
    for (int cell = 0; cell < n; ++cell) {
        col_cell[f.asc_row(cell)] = cell;
        col_cell[f.desc_row(cell)] = cell;
    }
    for (int cell = 0; cell < n; ++cell) {
        int ac = f.asc_row(cell), dc = f.desc_row(cell);
        if (cell < f.nv) {
            // ascending vertex: empty; cone edge over the vertex: its base copy
            col[dc] = {f.asc_row(cell)};
        } else {
            const auto& e = g.edges[cell - f.nv];
            int lo = vcell.at(e.lower), hi = vcell.at(e.upper);
            col[ac] = {f.asc_row(lo), f.asc_row(hi)};
            col[dc] = {f.asc_row(cell), f.desc_row(lo), f.desc_row(hi)};
        }
    }

    // standard left-to-right reduction
    std::vector<int> low_owner(total, -1); // row -> column with that low
    std::vector<std::pair<int, int>> pairs; // (row position, column position)
    for (int c = 0; c < total; ++c) {
        while (!col[c].empty()) {
            int low = *col[c].rbegin();
            int other = low_owner[low];
            if (other < 0) break;
            // symmetric difference with the earlier column
            for (int r : col[other]) {
                auto it = col[c].find(r);
                if (it != col[c].end())
                    col[c].erase(it);
                else
                    col[c].insert(r);
            }
        }
        if (!col[c].empty()) {
            int low = *col[c].rbegin();
            low_owner[low] = c;
            pairs.push_back({low, c});
        }
    }

    auto row_is_asc = [&](int pos) { return pos < n; };
    for (auto [rpos, cpos] : pairs) {
        int rcell = col_cell[rpos], ccell = col_cell[cpos];
        bool r_asc = row_is_asc(rpos), c_asc = cpos < n;
        if (r_asc && c_asc) {
            // ordinary: component born at a vertex dies at an edge
            Rat birth = f.asc_key(rcell), death = f.asc_key(ccell);
            if (birth != death)
                out.dg0.points.push_back({birth, death, 0, PairKind::ordinary});
        } else if (r_asc && !c_asc && f.dim(rcell) == 0 && f.dim(ccell) == 0) {
            // extended dimension 0: (component min, component max)
            out.dg0.points.push_back(
                {f.asc_key(rcell), f.desc_key(ccell), 0, PairKind::extended});
        } else if (r_asc && !c_asc && f.dim(rcell) == 1 && f.dim(ccell) == 1) {
            // extended dimension 1: one point per independent cycle
            out.exdg1.points.push_back(
                {f.asc_key(rcell), f.desc_key(ccell), 1, PairKind::extended});
        }
        // remaining pairs (descending row, descending column) are the relative
        // dimension-1 points of the superlevel sweep; not part of either output
    }
    return out;
}

namespace {

Rat inf_dist(const PersistencePoint& a, const PersistencePoint& b) {
    return rat_max((a.birth - b.birth).abs(), (a.death - b.death).abs());
}

Rat diag_cost(const PersistencePoint& p) { return (p.death - p.birth).abs() / Rat(2); }

// Perfect-matching feasibility at cost threshold lambda, on the standard
// augmented bipartite graph: left = A + diagonal copies of B, right = B +
// diagonal copies of A; diagonal copies pair with each other for free.
struct MatchingTest {
    const std::vector<PersistencePoint>& A;
    const std::vector<PersistencePoint>& B;
    int nl, nr;
    std::vector<int> match_r; // right node -> left node
    std::vector<char> visited;

    MatchingTest(const std::vector<PersistencePoint>& a, const std::vector<PersistencePoint>& b)
        : A(a), B(b), nl((int)(a.size() + b.size())), nr(nl) {}

    bool edge_ok(int l, int r, const Rat& lambda) const {
        int na = (int)A.size(), nb = (int)B.size();
        if (l < na) {
            if (r < nb) return inf_dist(A[l], B[r]) <= lambda; // point-point
            return r - nb == l && diag_cost(A[l]) <= lambda;   // A_l to its projection
        }
        int j = l - na; // diagonal copy of B_j
        if (r < nb) return r == j && diag_cost(B[j]) <= lambda;
        return true; // diagonal-diagonal, free
    }

    bool augment(int l, const Rat& lambda) {
        for (int r = 0; r < nr; ++r) {
            if (visited[r] || !edge_ok(l, r, lambda)) continue;
            visited[r] = 1;
            if (match_r[r] < 0 || augment(match_r[r], lambda)) {
                match_r[r] = l;
                return true;
            }
        }
        return false;
    }

    bool feasible(const Rat& lambda) {
        match_r.assign(nr, -1);
        for (int l = 0; l < nl; ++l) {
            visited.assign(nr, 0);
            if (!augment(l, lambda)) return false;
        }
        return true;
    }
};

} // namespace

Rat bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b) {
    if (a.points.empty() && b.points.empty()) return Rat(0);
    std::vector<Rat> cands{Rat(0)};
    for (const auto& p : a.points) cands.push_back(diag_cost(p));
    for (const auto& p : b.points) cands.push_back(diag_cost(p));
    for (const auto& p : a.points)
        for (const auto& q : b.points) cands.push_back(inf_dist(p, q));
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    MatchingTest mt(a.points, b.points);
    // smallest feasible candidate; feasibility is monotone in lambda
    size_t lo = 0, hi = cands.size() - 1;
    if (mt.feasible(cands[lo])) return cands[lo];
    while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (mt.feasible(cands[mid]))
            hi = mid;
        else
            lo = mid;
    }
    return cands[hi];
}

} // namespace reeb
