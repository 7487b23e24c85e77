#include "reeb/smoothing.hpp"

#include <map>
#include <stdexcept>

#include "reeb/union_find.hpp"

namespace reeb {

PLComplex smoothing_complex(const ReebGraph& g, const Rat& epsilon, bool flip_diagonal) {
    // Subdivide each graph edge at its midpoint first so that parallel edges
    // yield disjoint prisms (the complex is keyed by vertex pairs).
    struct SubEdge {
        VertexId lo, hi;
    };
    std::vector<std::pair<VertexId, Rat>> nodes; // (fresh id, value)
    std::vector<SubEdge> sub_edges;
    VertexId next = 0;
    std::map<VertexId, VertexId> orig_to_node;
    for (const auto& v : g.vertices) {
        orig_to_node[v.id] = next;
        nodes.push_back({next++, v.value});
    }
    for (const auto& e : g.edges) {
        Rat lo = g.value_of(e.lower), hi = g.value_of(e.upper);
        Rat mid = (lo + hi) / Rat(2);
        VertexId mid_id = next;
        nodes.push_back({next++, mid});
        sub_edges.push_back({orig_to_node[e.lower], mid_id});
        sub_edges.push_back({mid_id, orig_to_node[e.upper]});
    }

    // Two copies of every node (bottom/top of the thickening), a vertical
    // edge between them, and per sub-edge the quad with one diagonal.
    PLComplex k;
    auto bot = [](VertexId n) { return 2 * n; };
    auto top = [](VertexId n) { return 2 * n + 1; };
    auto add_edge = [&k](VertexId a, VertexId b) {
        k.edges.push_back(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
    };
    for (const auto& [id, val] : nodes) {
        k.vertices.push_back({bot(id), val - epsilon});
        k.vertices.push_back({top(id), val + epsilon});
        if (epsilon > Rat(0)) add_edge(bot(id), top(id));
    }
    for (const auto& se : sub_edges) {
        add_edge(bot(se.lo), bot(se.hi));
        add_edge(top(se.lo), top(se.hi));
        if (epsilon > Rat(0)) {
            if (!flip_diagonal) {
                add_edge(bot(se.lo), top(se.hi));
                k.triangles.push_back({bot(se.lo), bot(se.hi), top(se.hi)});
                k.triangles.push_back({bot(se.lo), top(se.lo), top(se.hi)});
            } else {
                add_edge(top(se.lo), bot(se.hi));
                k.triangles.push_back({top(se.lo), bot(se.hi), bot(se.lo)});
                k.triangles.push_back({top(se.lo), bot(se.hi), top(se.hi)});
            }
        }
    }
    if (epsilon == Rat(0)) {
        // Degenerate thickening: bottom and top coincide; drop the top copies.
        PLComplex flat;
        for (const auto& [id, val] : nodes) flat.vertices.push_back({id, val});
        for (const auto& se : sub_edges)
            flat.edges.push_back(se.lo < se.hi ? std::make_pair(se.lo, se.hi)
                                               : std::make_pair(se.hi, se.lo));
        return flat;
    }
    return k;
}

ReebGraph smooth(const ReebGraph& g, const Rat& epsilon) {
    if (epsilon < Rat(0)) throw std::invalid_argument("smooth: negative epsilon");
    if (g.vertices.empty()) return g;
    return reeb_of_complex(smoothing_complex(g, epsilon));
}

FiberComponents fiber_components_oracle(const ReebGraph& g, const Rat& epsilon, const Rat& level) {
    Rat lo = level - epsilon, hi = level + epsilon;
    // Cells: vertices with value in [lo, hi]; edges whose closed span meets
    // [lo, hi].  An edge piece reaches an endpoint only if the endpoint value
    // itself lies in the window, so edge-endpoint unions require both present.
    int nv = (int)g.vertices.size(), ne = (int)g.edges.size();
    std::map<VertexId, int> vidx;
    for (const auto& v : g.vertices) vidx.emplace(v.id, (int)vidx.size());
    std::vector<char> v_in(nv, 0), e_in(ne, 0);
    for (int i = 0; i < nv; ++i)
        v_in[i] = g.vertices[i].value >= lo && g.vertices[i].value <= hi;
    for (int i = 0; i < ne; ++i) {
        Rat a = g.value_of(g.edges[i].lower), b = g.value_of(g.edges[i].upper);
        e_in[i] = a <= hi && b >= lo;
    }
    UnionFind uf(nv + ne);
    for (int i = 0; i < ne; ++i) {
        if (!e_in[i]) continue;
        for (VertexId end : {g.edges[i].lower, g.edges[i].upper}) {
            int vi = vidx.at(end);
            if (v_in[vi]) uf.unite(nv + i, vi);
        }
    }
    std::map<int, int> root_to_comp;
    FiberComponents out;
    auto comp_index = [&](int cell) {
        int r = uf.find(cell);
        auto [it, fresh] = root_to_comp.emplace(r, (int)out.components.size());
        if (fresh) out.components.emplace_back();
        return it->second;
    };
    for (int i = 0; i < nv; ++i)
        if (v_in[i]) out.components[comp_index(i)].vertices.push_back(g.vertices[i].id);
    for (int i = 0; i < ne; ++i)
        if (e_in[i]) out.components[comp_index(nv + i)].edges.push_back(g.edges[i].id);
    return out;
}

} // namespace reeb
