#include "reeb/reeb_graph.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "reeb/union_find.hpp"

namespace reeb {

const ReebGraph::Vertex* ReebGraph::find_vertex(VertexId id) const {
    for (const auto& v : vertices)
        if (v.id == id) return &v;
    return nullptr;
}

const ReebGraph::Edge* ReebGraph::find_edge(EdgeId id) const {
    for (const auto& e : edges)
        if (e.id == id) return &e;
    return nullptr;
}

Rat ReebGraph::value_of(VertexId id) const {
    const Vertex* v = find_vertex(id);
    if (!v) throw std::out_of_range("no vertex with id " + std::to_string(id));
    return v->value;
}

Rat ReebGraph::min_value() const {
    if (vertices.empty()) throw std::logic_error("min_value of empty graph");
    Rat m = vertices[0].value;
    for (const auto& v : vertices) m = rat_min(m, v.value);
    return m;
}

Rat ReebGraph::max_value() const {
    if (vertices.empty()) throw std::logic_error("max_value of empty graph");
    Rat m = vertices[0].value;
    for (const auto& v : vertices) m = rat_max(m, v.value);
    return m;
}

size_t ReebGraph::in_degree(VertexId id) const {
    size_t n = 0;
    for (const auto& e : edges)
        if (e.upper == id) ++n;
    return n;
}

size_t ReebGraph::out_degree(VertexId id) const {
    size_t n = 0;
    for (const auto& e : edges)
        if (e.lower == id) ++n;
    return n;
}

int64_t ReebGraph::component_count() const {
    std::unordered_map<VertexId, int> idx;
    for (const auto& v : vertices) idx.emplace(v.id, (int)idx.size());
    UnionFind uf(vertices.size());
    for (const auto& e : edges) uf.unite(idx.at(e.lower), idx.at(e.upper));
    return uf.component_count();
}

int64_t ReebGraph::first_betti() const {
    if (vertices.empty()) return 0;
    return (int64_t)edges.size() - (int64_t)vertices.size() + component_count();
}

Rat value_at(const ReebGraph& g, const GraphPoint& p) {
    if (!p.on_edge) return g.value_of(p.vertex);
    const ReebGraph::Edge* e = g.find_edge(p.edge);
    if (!e) throw std::out_of_range("no edge with id " + std::to_string(p.edge));
    Rat lo = g.value_of(e->lower), hi = g.value_of(e->upper);
    return lo * (Rat(1) - p.param) + hi * p.param;
}

bool point_exists(const ReebGraph& g, const GraphPoint& p) {
    if (!p.on_edge) return g.find_vertex(p.vertex) != nullptr;
    if (!g.find_edge(p.edge)) return false;
    return p.param > Rat(0) && p.param < Rat(1);
}

ValidationReport validate(const ReebGraph& g) {
    ValidationReport rep;
    std::set<VertexId> vids;
    for (const auto& v : g.vertices) {
        if (!vids.insert(v.id).second)
            rep.violations.push_back({"duplicate-vertex-id",
                "vertex id " + std::to_string(v.id) + " declared more than once", v.id});
    }
    std::set<EdgeId> eids;
    for (const auto& e : g.edges) {
        if (!eids.insert(e.id).second)
            rep.violations.push_back({"duplicate-edge-id",
                "edge id " + std::to_string(e.id) + " declared more than once", e.id});
        bool dangling = false;
        for (VertexId end : {e.lower, e.upper}) {
            if (!vids.count(end)) {
                rep.violations.push_back({"dangling reference",
                    "edge " + std::to_string(e.id) + " references absent vertex " +
                        std::to_string(end), e.id});
                dangling = true;
            }
        }
        if (dangling) continue;
        if (e.lower == e.upper) {
            rep.violations.push_back({"self-loop",
                "edge " + std::to_string(e.id) + " joins vertex " +
                    std::to_string(e.lower) + " to itself", e.id});
            continue;
        }
        Rat lo = g.value_of(e.lower), hi = g.value_of(e.upper);
        if (!(lo < hi))
            rep.violations.push_back({"non-monotone edge",
                "edge " + std::to_string(e.id) + " has value(lower) = " +
                    lo.to_decimal_string() + " >= value(upper) = " + hi.to_decimal_string(),
                e.id});
    }
    return rep;
}

CanonicalizeResult canonicalize(const ReebGraph& g) {
    CanonicalizeResult res;

    // Pre-check: everything except zero-height edges must already hold.
    {
        ValidationReport rep = validate(g);
        for (const auto& v : rep.violations) {
            bool zero_height = false;
            if (v.rule == "non-monotone edge") {
                const ReebGraph::Edge* e = g.find_edge(v.offending_id);
                if (e && g.value_of(e->lower) == g.value_of(e->upper)) zero_height = true;
            }
            if (!zero_height)
                throw std::invalid_argument("canonicalize: invalid input graph: " + v.message);
        }
    }

    std::unordered_map<VertexId, int> idx;
    for (const auto& v : g.vertices) idx.emplace(v.id, (int)idx.size());

    // 1. Contract zero-height edges.
    UnionFind uf(g.vertices.size());
    for (const auto& e : g.edges) {
        if (g.value_of(e.lower) == g.value_of(e.upper)) {
            if (!uf.unite(idx.at(e.lower), idx.at(e.upper)))
                res.warnings.push_back(
                    "zero-height loop collapsed at value " +
                    g.value_of(e.lower).to_decimal_string() + " (edge " +
                    std::to_string(e.id) + ")");
        }
    }
    // Class representative: smallest original vertex id in the class.
    std::vector<VertexId> rep_id(g.vertices.size(), -1);
    for (const auto& v : g.vertices) {
        int r = uf.find(idx.at(v.id));
        if (rep_id[r] < 0 || v.id < rep_id[r]) rep_id[r] = v.id;
    }

    struct WorkVertex {
        VertexId id;
        Rat value;
        bool alive = true;
    };
    struct WorkEdge {
        EdgeId id;
        VertexId lower, upper;
        bool alive = true;
    };
    std::map<VertexId, WorkVertex> verts;
    std::vector<WorkEdge> work_edges;
    for (const auto& v : g.vertices) {
        VertexId r = rep_id[uf.find(idx.at(v.id))];
        if (!verts.count(r)) verts[r] = {r, v.value, true};
    }
    for (const auto& e : g.edges) {
        if (g.value_of(e.lower) == g.value_of(e.upper)) continue; // contracted
        VertexId lo = rep_id[uf.find(idx.at(e.lower))];
        VertexId hi = rep_id[uf.find(idx.at(e.upper))];
        work_edges.push_back({e.id, lo, hi, true});
    }

    // 2. Remove regular vertices (exactly one incoming, one outgoing edge).
    auto degrees = [&](VertexId v) {
        int in = 0, out = 0, in_e = -1, out_e = -1;
        for (int i = 0; i < (int)work_edges.size(); ++i) {
            if (!work_edges[i].alive) continue;
            if (work_edges[i].upper == v) { ++in; in_e = i; }
            if (work_edges[i].lower == v) { ++out; out_e = i; }
        }
        return std::tuple<int, int, int, int>(in, out, in_e, out_e);
    };
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [vid, wv] : verts) {
            if (!wv.alive) continue;
            auto [in, out, in_e, out_e] = degrees(vid);
            if (in == 1 && out == 1) {
                // merge: (a -> v) and (v -> b) become (a -> b)
                work_edges[in_e].upper = work_edges[out_e].upper;
                work_edges[out_e].alive = false;
                wv.alive = false;
                changed = true;
            }
        }
    }

    // 3. Renumber deterministically: vertices by (value, original id), edges
    //    by (new lower, new upper, original id).
    std::vector<WorkVertex> alive;
    for (auto& [vid, wv] : verts)
        if (wv.alive) alive.push_back(wv);
    std::sort(alive.begin(), alive.end(), [](const WorkVertex& a, const WorkVertex& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.id < b.id;
    });
    std::unordered_map<VertexId, VertexId> renum;
    for (size_t i = 0; i < alive.size(); ++i) {
        renum[alive[i].id] = (VertexId)i;
        res.graph.vertices.push_back({(VertexId)i, alive[i].value});
    }
    std::vector<WorkEdge> live_edges;
    for (const auto& e : work_edges)
        if (e.alive) live_edges.push_back(e);
    std::sort(live_edges.begin(), live_edges.end(), [&](const WorkEdge& a, const WorkEdge& b) {
        auto ka = std::tuple(renum.at(a.lower), renum.at(a.upper), a.id);
        auto kb = std::tuple(renum.at(b.lower), renum.at(b.upper), b.id);
        return ka < kb;
    });
    for (size_t i = 0; i < live_edges.size(); ++i)
        res.graph.edges.push_back({(EdgeId)i, renum.at(live_edges[i].lower),
                                   renum.at(live_edges[i].upper)});
    return res;
}

namespace {

struct IsoSearch {
    const ReebGraph& a;
    const ReebGraph& b;
    Rat tol;
    std::vector<VertexId> a_order;              // a's vertex ids, by value
    std::unordered_map<VertexId, VertexId> fwd; // a -> b
    std::unordered_map<VertexId, VertexId> rev; // b -> a
    // edge multiplicity keyed by (lower, upper)
    std::map<std::pair<VertexId, VertexId>, std::vector<EdgeId>> a_mult, b_mult;

    bool values_close(const Rat& x, const Rat& y) const { return (x - y).abs() <= tol; }

    size_t mult(const std::map<std::pair<VertexId, VertexId>, std::vector<EdgeId>>& m,
                VertexId lo, VertexId hi) const {
        auto it = m.find({lo, hi});
        return it == m.end() ? 0 : it->second.size();
    }

    bool extend(size_t k) {
        if (k == a_order.size()) return true;
        VertexId av = a_order[k];
        Rat aval = a.value_of(av);
        for (const auto& bv : b.vertices) {
            if (rev.count(bv.id)) continue;
            if (!values_close(aval, bv.value)) continue;
            if (a.in_degree(av) != b.in_degree(bv.id)) continue;
            if (a.out_degree(av) != b.out_degree(bv.id)) continue;
            // multiplicities to already-mapped neighbors must agree
            bool ok = true;
            for (const auto& [au, bu] : fwd) {
                if (mult(a_mult, au, av) != mult(b_mult, bu, bv.id) ||
                    mult(a_mult, av, au) != mult(b_mult, bv.id, bu)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            fwd[av] = bv.id;
            rev[bv.id] = av;
            if (extend(k + 1)) return true;
            fwd.erase(av);
            rev.erase(bv.id);
        }
        return false;
    }
};

} // namespace

IsoResult is_isomorphic(const ReebGraph& a, const ReebGraph& b, const Rat& value_tolerance) {
    IsoResult out;
    if (a.vertices.size() != b.vertices.size() || a.edges.size() != b.edges.size())
        return out;

    IsoSearch s{a, b, value_tolerance, {}, {}, {}, {}, {}};
    for (const auto& v : a.vertices) s.a_order.push_back(v.id);
    std::sort(s.a_order.begin(), s.a_order.end(), [&](VertexId x, VertexId y) {
        Rat vx = a.value_of(x), vy = a.value_of(y);
        if (vx != vy) return vx < vy;
        return x < y;
    });
    for (const auto& e : a.edges) s.a_mult[{e.lower, e.upper}].push_back(e.id);
    for (const auto& e : b.edges) s.b_mult[{e.lower, e.upper}].push_back(e.id);

    if (!s.extend(0)) return out;

    out.isomorphic = true;
    Isomorphism wit;
    wit.vertex_map = s.fwd;
    // Pair up parallel edges between corresponding endpoints in id order.
    for (auto& [key, a_edges] : s.a_mult) {
        auto b_key = std::make_pair(s.fwd.at(key.first), s.fwd.at(key.second));
        auto& b_edges = s.b_mult.at(b_key);
        std::vector<EdgeId> as = a_edges, bs = b_edges;
        std::sort(as.begin(), as.end());
        std::sort(bs.begin(), bs.end());
        for (size_t i = 0; i < as.size(); ++i) wit.edge_map[as[i]] = bs[i];
    }
    out.witness = std::move(wit);
    return out;
}

int64_t points_at_level(const ReebGraph& g, const Rat& level) {
    int64_t n = 0;
    for (const auto& v : g.vertices)
        if (v.value == level) ++n;
    for (const auto& e : g.edges)
        if (g.value_of(e.lower) < level && level < g.value_of(e.upper)) ++n;
    return n;
}

} // namespace reeb
