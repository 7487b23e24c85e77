#include "reeb/distortion.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "reeb/cosheaf.hpp"
#include "reeb/intrinsic_metric.hpp"
#include "reeb/persistence.hpp"

namespace reeb {

namespace {

// Two points joinable inside a single closed edge (or equal).
bool elementarily_joined(const ReebGraph& g, const GraphPoint& p, const GraphPoint& q) {
    if (p == q) return true;
    if (p.on_edge && q.on_edge) return p.edge == q.edge;
    if (!p.on_edge && !q.on_edge) {
        for (const auto& e : g.edges)
            if ((e.lower == p.vertex && e.upper == q.vertex) ||
                (e.lower == q.vertex && e.upper == p.vertex))
                return true;
        return false;
    }
    const GraphPoint& v = p.on_edge ? q : p;
    const GraphPoint& on = p.on_edge ? p : q;
    const ReebGraph::Edge* e = g.find_edge(on.edge);
    return e && (e->lower == v.vertex || e->upper == v.vertex);
}

void check_map(const ReebGraph& X, const ReebGraph& Y, const SubdividedMap& m,
               const char* name) {
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument(std::string(name) + ": " + why);
    };
    if (m.assignment.size() != m.source_nodes.size()) fail("assignment size mismatch");
    if (m.routes.size() != m.source_cells.size()) fail("route table size mismatch");
    for (const auto& p : m.source_nodes)
        if (!point_exists(X, p)) fail("source node is not a point of the source graph");
    for (const auto& p : m.target_nodes)
        if (!point_exists(Y, p)) fail("target node is not a point of the target graph");
    for (int t : m.assignment)
        if (t < 0 || t >= (int)m.target_nodes.size()) fail("assignment out of range");
    for (size_t c = 0; c < m.source_cells.size(); ++c) {
        auto [a, b] = m.source_cells[c];
        if (a < 0 || b < 0 || a >= (int)m.source_nodes.size() || b >= (int)m.source_nodes.size())
            fail("cell endpoint out of range");
        const auto& route = m.routes[c];
        if (route.empty()) fail("empty route");
        if (route.front() != m.assignment[a] || route.back() != m.assignment[b])
            fail("route endpoints disagree with the assignment");
        for (size_t i = 0; i + 1 < route.size(); ++i) {
            if (route[i] < 0 || route[i] >= (int)m.target_nodes.size())
                fail("route node out of range");
            if (!elementarily_joined(Y, m.target_nodes[route[i]], m.target_nodes[route[i + 1]]))
                fail("discontinuous assignment: route step leaves the edge");
        }
    }
}

Rat route_height(const ReebGraph& Y, const SubdividedMap& m, const std::vector<int>& route) {
    Rat lo = value_at(Y, m.target_nodes[route[0]]);
    Rat hi = lo;
    for (int t : route) {
        Rat v = value_at(Y, m.target_nodes[t]);
        lo = rat_min(lo, v);
        hi = rat_max(hi, v);
    }
    return hi - lo;
}

Rat map_slack(const ReebGraph& X, const ReebGraph& Y, const SubdividedMap& m) {
    Rat slack(0);
    for (size_t c = 0; c < m.source_cells.size(); ++c) {
        Rat cell_height = (value_at(X, m.source_nodes[m.source_cells[c].first]) -
                           value_at(X, m.source_nodes[m.source_cells[c].second]))
                              .abs();
        slack = rat_max(slack, cell_height + route_height(Y, m, m.routes[c]));
    }
    return slack;
}

} // namespace

PairEvaluation evaluate_map_pair(const ReebGraph& X, const ReebGraph& Y,
                                 const SubdividedMap& phi, const SubdividedMap& psi) {
    check_map(X, Y, phi, "phi");
    check_map(Y, X, psi, "psi");

    // point universes: the source mesh of one map plus the target set of the other
    std::vector<GraphPoint> xs = phi.source_nodes;
    xs.insert(xs.end(), psi.target_nodes.begin(), psi.target_nodes.end());
    std::vector<GraphPoint> ys = psi.source_nodes;
    ys.insert(ys.end(), phi.target_nodes.begin(), phi.target_nodes.end());
    auto dX = path_height_matrix(X, xs);
    auto dY = path_height_matrix(Y, ys);

    PairEvaluation out;
    out.distortion = Rat(0);
    out.sup_fg = Rat(0);
    out.sup_gf = Rat(0);

    size_t a = phi.source_nodes.size();
    size_t c = psi.source_nodes.size();
    // correspondence samples (x index into xs, y index into ys)
    std::vector<std::pair<size_t, size_t>> samples;
    for (size_t i = 0; i < a; ++i) {
        samples.push_back({i, c + (size_t)phi.assignment[i]});
        Rat gap = (value_at(X, phi.source_nodes[i]) -
                   value_at(Y, phi.target_nodes[phi.assignment[i]]))
                      .abs();
        out.sup_fg = rat_max(out.sup_fg, gap);
    }
    for (size_t j = 0; j < c; ++j) {
        samples.push_back({a + (size_t)psi.assignment[j], j});
        Rat gap = (value_at(Y, psi.source_nodes[j]) -
                   value_at(X, psi.target_nodes[psi.assignment[j]]))
                      .abs();
        out.sup_gf = rat_max(out.sup_gf, gap);
    }

    for (size_t s = 0; s < samples.size(); ++s)
        for (size_t t = s + 1; t < samples.size(); ++t) {
            const auto& fx = dX[samples[s].first][samples[t].first];
            const auto& fy = dY[samples[s].second][samples[t].second];
            if (fx && fy) {
                out.distortion = rat_max(out.distortion, (*fx - *fy).abs() / Rat(2));
            } else if (fx.has_value() != fy.has_value()) {
                out.infinite_distortion = true;
            }
            // both disconnected: the pair constrains nothing
        }

    out.mesh_error = rat_max(map_slack(X, Y, phi), map_slack(Y, X, psi));
    out.objective = rat_max(out.distortion, rat_max(out.sup_fg, out.sup_gf));
    return out;
}

SubdividedMap mesh_skeleton(const ReebGraph& source, const Rat& mesh_size) {
    if (!(mesh_size > Rat(0))) throw std::invalid_argument("mesh size must be positive");
    SubdividedMap m;
    for (const auto& v : source.vertices) m.source_nodes.push_back(GraphPoint::at_vertex(v.id));
    std::map<VertexId, int> vnode;
    for (size_t i = 0; i < source.vertices.size(); ++i) vnode[source.vertices[i].id] = (int)i;
    for (const auto& e : source.edges) {
        Rat height = source.value_of(e.upper) - source.value_of(e.lower);
        int64_t pieces = (height / mesh_size).floor_int();
        if (Rat(pieces) * mesh_size < height) ++pieces;
        if (pieces < 1) pieces = 1;
        int prev = vnode.at(e.lower);
        for (int64_t k = 1; k < pieces; ++k) {
            int node = (int)m.source_nodes.size();
            m.source_nodes.push_back(GraphPoint::on(e.id, Rat(k, pieces)));
            m.source_cells.push_back({prev, node});
            prev = node;
        }
        m.source_cells.push_back({prev, vnode.at(e.upper)});
    }
    return m;
}

namespace {

// Adjacency among the nodes of a mesh skeleton (interior nodes chained along
// their edge, end nodes linked to the edge's vertices).
std::vector<std::vector<int>> mesh_adjacency(const SubdividedMap& m) {
    std::vector<std::vector<int>> adj(m.source_nodes.size());
    for (const auto& [a, b] : m.source_cells) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

// Minimum-height route between two nodes of a mesh, as a node path.  Returns
// false when they lie in different components.
bool route_between(const ReebGraph& g, const SubdividedMap& mesh,
                   const std::vector<std::vector<int>>& adj, int from, int to,
                   std::vector<int>& route) {
    route.clear();
    if (from == to) {
        route = {from};
        return true;
    }
    int n = (int)mesh.source_nodes.size();
    std::vector<Rat> val(n);
    for (int i = 0; i < n; ++i) val[i] = value_at(g, mesh.source_nodes[i]);
    Rat vmin = rat_min(val[from], val[to]), vmax = rat_max(val[from], val[to]);

    std::vector<Rat> values = val;
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    struct Window {
        Rat width, a, b;
    };
    std::vector<Window> windows;
    for (const Rat& a : values) {
        if (a > vmin) continue;
        for (const Rat& b : values) {
            if (b < vmax) continue;
            windows.push_back({b - a, a, b});
        }
    }
    std::sort(windows.begin(), windows.end(), [](const Window& x, const Window& y) {
        return x.width < y.width;
    });

    for (const auto& w : windows) {
        // BFS within the window
        std::vector<int> parent(n, -2);
        std::vector<int> queue{from};
        parent[from] = -1;
        for (size_t h = 0; h < queue.size(); ++h) {
            int u = queue[h];
            for (int v : adj[u]) {
                if (parent[v] != -2 || val[v] < w.a || val[v] > w.b) continue;
                parent[v] = u;
                queue.push_back(v);
            }
        }
        if (parent[to] == -2) continue;
        for (int u = to; u != -1; u = parent[u]) route.push_back(u);
        std::reverse(route.begin(), route.end());
        return true;
    }
    return false;
}

// The target side of a constructed map is always the target's own mesh, so
// a candidate assignment evaluates against cached distance matrices.
struct SearchSide {
    SubdividedMap mesh; // source mesh of this side's map; targets = other side's mesh nodes
    std::vector<Rat> value;
    std::vector<std::vector<std::optional<Rat>>> dist;
    std::vector<std::vector<int>> adj;
};

struct CandidatePair {
    std::vector<int> phi_assign, psi_assign;
    std::vector<std::vector<int>> phi_routes, psi_routes;
};

// evaluates a candidate using the cached matrices; mirrors evaluate_map_pair
struct CandidateEval {
    Rat certified;
    PairEvaluation eval;
    bool valid = false;
};

CandidateEval eval_candidate(const SearchSide& sx, const SearchSide& sy,
                             const CandidatePair& cand) {
    CandidateEval out;
    PairEvaluation& ev = out.eval;
    ev.distortion = ev.sup_fg = ev.sup_gf = Rat(0);

    size_t a = sx.mesh.source_nodes.size(), b = sy.mesh.source_nodes.size();
    std::vector<std::pair<size_t, size_t>> samples;
    for (size_t i = 0; i < a; ++i) {
        samples.push_back({i, (size_t)cand.phi_assign[i]});
        ev.sup_fg = rat_max(ev.sup_fg, (sx.value[i] - sy.value[cand.phi_assign[i]]).abs());
    }
    for (size_t j = 0; j < b; ++j) {
        samples.push_back({(size_t)cand.psi_assign[j], j});
        ev.sup_gf = rat_max(ev.sup_gf, (sy.value[j] - sx.value[cand.psi_assign[j]]).abs());
    }
    for (size_t s = 0; s < samples.size(); ++s)
        for (size_t t = s + 1; t < samples.size(); ++t) {
            const auto& fx = sx.dist[samples[s].first][samples[t].first];
            const auto& fy = sy.dist[samples[s].second][samples[t].second];
            if (fx && fy)
                ev.distortion = rat_max(ev.distortion, (*fx - *fy).abs() / Rat(2));
            else if (fx.has_value() != fy.has_value())
                ev.infinite_distortion = true;
        }

    auto slack_of = [](const SearchSide& src, const SearchSide& dst,
                       const std::vector<std::vector<int>>& routes) {
        Rat slack(0);
        for (size_t c = 0; c < src.mesh.source_cells.size(); ++c) {
            auto [p, q] = src.mesh.source_cells[c];
            Rat cell_h = (src.value[p] - src.value[q]).abs();
            Rat lo = dst.value[routes[c][0]], hi = lo;
            for (int t : routes[c]) {
                lo = rat_min(lo, dst.value[t]);
                hi = rat_max(hi, dst.value[t]);
            }
            slack = rat_max(slack, cell_h + (hi - lo));
        }
        return slack;
    };
    ev.mesh_error = rat_max(slack_of(sx, sy, cand.phi_routes), slack_of(sy, sx, cand.psi_routes));
    ev.objective = rat_max(ev.distortion, rat_max(ev.sup_fg, ev.sup_gf));
    out.certified = ev.objective + ev.mesh_error;
    out.valid = !ev.infinite_distortion;
    return out;
}

// nearest node of `side` by value, preferring the smallest index on ties
int nearest_by_value(const SearchSide& side, const Rat& v) {
    int best = 0;
    Rat best_gap = (side.value[0] - v).abs();
    for (int i = 1; i < (int)side.value.size(); ++i) {
        Rat gap = (side.value[i] - v).abs();
        if (gap < best_gap) {
            best = i;
            best_gap = gap;
        }
    }
    return best;
}

bool rebuild_routes(const ReebGraph& target_graph, const SearchSide& src, const SearchSide& dst,
                    const std::vector<int>& assign, std::vector<std::vector<int>>& routes) {
    routes.assign(src.mesh.source_cells.size(), {});
    for (size_t c = 0; c < src.mesh.source_cells.size(); ++c) {
        auto [p, q] = src.mesh.source_cells[c];
        if (!route_between(target_graph, dst.mesh, dst.adj, assign[p], assign[q], routes[c]))
            return false;
    }
    return true;
}

SubdividedMap finish_map(const SearchSide& src, const SearchSide& dst,
                         const std::vector<int>& assign,
                         const std::vector<std::vector<int>>& routes) {
    SubdividedMap m = src.mesh;
    m.target_nodes = dst.mesh.source_nodes;
    m.assignment = assign;
    m.routes = routes;
    return m;
}

} // namespace

UpperBound distortion_upper_bound(const ReebGraph& X, const ReebGraph& Y, const Rat& mesh_size,
                                  int64_t budget, uint64_t seed) {
    if (X.vertices.empty() || Y.vertices.empty())
        throw std::invalid_argument("distortion_upper_bound: empty graph");

    UpperBound out;

    auto iso = is_isomorphic(X, Y, Rat(0));
    if (iso.isomorphic) {
        // d_FD = 0 exactly: the isomorphism pair has a vanishing objective.
        SubdividedMap phi, psi;
        for (const auto& v : X.vertices) phi.source_nodes.push_back(GraphPoint::at_vertex(v.id));
        for (const auto& v : Y.vertices) psi.source_nodes.push_back(GraphPoint::at_vertex(v.id));
        phi.target_nodes = psi.source_nodes;
        psi.target_nodes = phi.source_nodes;
        std::map<VertexId, int> xi, yi;
        for (size_t i = 0; i < X.vertices.size(); ++i) xi[X.vertices[i].id] = (int)i;
        for (size_t i = 0; i < Y.vertices.size(); ++i) yi[Y.vertices[i].id] = (int)i;
        phi.assignment.resize(X.vertices.size());
        psi.assignment.resize(Y.vertices.size());
        for (const auto& [xv, yv] : iso.witness->vertex_map) {
            phi.assignment[xi[xv]] = yi[yv];
            psi.assignment[yi[yv]] = xi[xv];
        }
        for (const auto& e : X.edges) {
            phi.source_cells.push_back({xi[e.lower], xi[e.upper]});
            phi.routes.push_back({phi.assignment[xi[e.lower]], phi.assignment[xi[e.upper]]});
        }
        for (const auto& e : Y.edges) {
            psi.source_cells.push_back({yi[e.lower], yi[e.upper]});
            psi.routes.push_back({psi.assignment[yi[e.lower]], psi.assignment[yi[e.upper]]});
        }
        out.hi = Rat(0);
        out.provenance = "function-preserving isomorphism";
        out.phi = phi;
        out.psi = psi;
        out.eval = evaluate_map_pair(X, Y, phi, psi);
        return out;
    }

    SearchSide sx, sy;
    sx.mesh = mesh_skeleton(X, mesh_size);
    sy.mesh = mesh_skeleton(Y, mesh_size);
    for (const auto& p : sx.mesh.source_nodes) sx.value.push_back(value_at(X, p));
    for (const auto& p : sy.mesh.source_nodes) sy.value.push_back(value_at(Y, p));
    sx.dist = path_height_matrix(X, sx.mesh.source_nodes);
    sy.dist = path_height_matrix(Y, sy.mesh.source_nodes);
    sx.adj = mesh_adjacency(sx.mesh);
    sy.adj = mesh_adjacency(sy.mesh);

    Rat gx_min = Y.min_value(), gx_max = Y.max_value();
    Rat gy_min = X.min_value(), gy_max = X.max_value();
    auto clamp = [](const Rat& v, const Rat& lo, const Rat& hi) {
        return rat_max(lo, rat_min(hi, v));
    };

    CandidatePair best_cand;
    CandidateEval best;
    auto consider = [&](const CandidatePair& cand) {
        CandidateEval ev = eval_candidate(sx, sy, cand);
        if (!ev.valid) return false;
        if (!best.valid || ev.certified < best.certified) {
            best = ev;
            best_cand = cand;
            return true;
        }
        return false;
    };

    // seed: value-matched assignment both ways
    {
        CandidatePair cand;
        cand.phi_assign.resize(sx.value.size());
        for (size_t i = 0; i < sx.value.size(); ++i)
            cand.phi_assign[i] = nearest_by_value(sy, clamp(sx.value[i], gx_min, gx_max));
        cand.psi_assign.resize(sy.value.size());
        for (size_t j = 0; j < sy.value.size(); ++j)
            cand.psi_assign[j] = nearest_by_value(sx, clamp(sy.value[j], gy_min, gy_max));
        if (rebuild_routes(Y, sx, sy, cand.phi_assign, cand.phi_routes) &&
            rebuild_routes(X, sy, sx, cand.psi_assign, cand.psi_routes))
            consider(cand);
    }

    // seed: collapse onto a monotone spine of the other graph
    auto spine_nodes = [](const ReebGraph& g, const SearchSide& side) {
        // greedy monotone walk from the global minimum vertex
        std::vector<int> chain;
        VertexId at = g.vertices[0].id;
        for (const auto& v : g.vertices)
            if (v.value < g.value_of(at)) at = v.id;
        for (;;) {
            const ReebGraph::Edge* next = nullptr;
            for (const auto& e : g.edges)
                if (e.lower == at && (!next || e.id < next->id)) next = &e;
            if (!next) break;
            at = next->upper;
            // collect the side nodes on this edge, in parameter order
            for (int i = 0; i < (int)side.mesh.source_nodes.size(); ++i) {
                const GraphPoint& p = side.mesh.source_nodes[i];
                if (p.on_edge && p.edge == next->id) chain.push_back(i);
            }
        }
        // vertices are valid spine stops too
        for (int i = 0; i < (int)side.mesh.source_nodes.size(); ++i)
            if (!side.mesh.source_nodes[i].on_edge) chain.push_back(i);
        return chain;
    };
    {
        CandidatePair cand;
        std::vector<int> spine_y = spine_nodes(Y, sy), spine_x = spine_nodes(X, sx);
        if (!spine_y.empty() && !spine_x.empty()) {
            auto nearest_in = [&](const SearchSide& side, const std::vector<int>& pool,
                                  const Rat& v) {
                int bestn = pool[0];
                Rat bg = (side.value[pool[0]] - v).abs();
                for (int i : pool) {
                    Rat gp = (side.value[i] - v).abs();
                    if (gp < bg || (gp == bg && i < bestn)) {
                        bestn = i;
                        bg = gp;
                    }
                }
                return bestn;
            };
            cand.phi_assign.resize(sx.value.size());
            for (size_t i = 0; i < sx.value.size(); ++i)
                cand.phi_assign[i] = nearest_in(sy, spine_y, clamp(sx.value[i], gx_min, gx_max));
            cand.psi_assign.resize(sy.value.size());
            for (size_t j = 0; j < sy.value.size(); ++j)
                cand.psi_assign[j] = nearest_in(sx, spine_x, clamp(sy.value[j], gy_min, gy_max));
            if (rebuild_routes(Y, sx, sy, cand.phi_assign, cand.phi_routes) &&
                rebuild_routes(X, sy, sx, cand.psi_assign, cand.psi_routes))
                consider(cand);
        }
    }

    if (!best.valid) {
        out.infinite = true;
        out.provenance = "no finite-distortion pair found (disconnected correspondence)";
        out.hi = Rat(0);
        return out;
    }

    // randomized single-node reassignment among level-compatible target
    // points, with greedy acceptance
    Rat window = mesh_size * Rat(2);
    auto compatible = [&](const SearchSide& dst, const Rat& level) {
        std::vector<int> pool;
        for (int i = 0; i < (int)dst.value.size(); ++i)
            if ((dst.value[i] - level).abs() <= window) pool.push_back(i);
        if (pool.empty())
            for (int i = 0; i < (int)dst.value.size(); ++i) pool.push_back(i);
        return pool;
    };
    std::mt19937_64 rng(seed);
    for (int64_t step = 0; step < budget; ++step) {
        CandidatePair cand = best_cand;
        bool phi_side = (rng() & 1) == 0;
        if (phi_side && sx.value.empty()) continue;
        if (!phi_side && sy.value.empty()) continue;
        if (phi_side) {
            size_t node = rng() % sx.value.size();
            auto pool = compatible(sy, clamp(sx.value[node], gx_min, gx_max));
            int fresh = pool[rng() % pool.size()];
            if (cand.phi_assign[node] == fresh) continue;
            cand.phi_assign[node] = fresh;
            if (!rebuild_routes(Y, sx, sy, cand.phi_assign, cand.phi_routes)) continue;
        } else {
            size_t node = rng() % sy.value.size();
            auto pool = compatible(sx, clamp(sy.value[node], gy_min, gy_max));
            int fresh = pool[rng() % pool.size()];
            if (cand.psi_assign[node] == fresh) continue;
            cand.psi_assign[node] = fresh;
            if (!rebuild_routes(X, sy, sx, cand.psi_assign, cand.psi_routes)) continue;
        }
        consider(cand);
    }

    out.hi = best.certified;
    out.provenance = "best explored pair: objective " + best.eval.objective.to_decimal_string() +
                     " + mesh error " + best.eval.mesh_error.to_decimal_string();
    out.phi = finish_map(sx, sy, best_cand.phi_assign, best_cand.phi_routes);
    out.psi = finish_map(sy, sx, best_cand.psi_assign, best_cand.psi_routes);
    out.eval = best.eval;
    return out;
}

LowerBound distortion_lower_bound(const ReebGraph& X, const ReebGraph& Y,
                                  const Rat& interleaving_tolerance,
                                  uint64_t interleaving_budget) {
    LowerBound out;
    out.lo = Rat(0);
    out.provenance = "trivial";

    auto dgx = extended_diagrams(X), dgy = extended_diagrams(Y);
    Rat db0 = bottleneck_distance(dgx.dg0, dgy.dg0);
    Rat db1 = bottleneck_distance(dgx.exdg1, dgy.exdg1);
    if (db0 > out.lo) {
        out.lo = db0;
        out.provenance = "bottleneck distance of the dimension-0 diagrams";
    }
    if (db1 / Rat(3) > out.lo) {
        out.lo = db1 / Rat(3);
        out.provenance = "bottleneck distance of the cycle diagrams over 3";
    }

    BoundInterval di = interleaving_bounds(cosheaf_of(X), cosheaf_of(Y), interleaving_tolerance,
                                           interleaving_budget);
    if (di.unbounded) {
        out.unbounded = true;
        out.provenance = "interleaving: component counts differ, no finite distance";
        return out;
    }
    if (di.undecided) {
        out.undecided = true; // term dropped from the max, flagged for the caller
    } else if (di.lo > out.lo) {
        out.lo = di.lo;
        out.provenance = "interleaving distance lower bound";
    }
    return out;
}

} // namespace reeb
