#include "reeb/cosheaf.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "reeb/union_find.hpp"

namespace reeb {

// ---------------------------------------------------------------------------
// Cosheaf structure
// ---------------------------------------------------------------------------

Interval ConstructibleCosheaf::stratum_interval(int i) const {
    int m = criticals();
    Interval iv;
    if (i == 0) {
        if (m == 0) return Interval::whole();
        return Interval::below(critical[0]);
    }
    if (i == m) return Interval::above(critical[m - 1]);
    return Interval::open(critical[i - 1], critical[i]);
}

Interval ConstructibleCosheaf::band_interval(int j) const {
    int m = criticals();
    bool lo_inf = j == 0, hi_inf = j == m - 1;
    Interval iv;
    iv.lo_inf = lo_inf;
    iv.hi_inf = hi_inf;
    if (!lo_inf) iv.lo = critical[j - 1];
    if (!hi_inf) iv.hi = critical[j + 1];
    return iv;
}

void ConstructibleCosheaf::check() const {
    int m = criticals();
    auto fail = [](const std::string& why) {
        throw std::invalid_argument("malformed cosheaf: " + why);
    };
    for (int j = 0; j + 1 < m; ++j)
        if (!(critical[j] < critical[j + 1])) fail("critical values not strictly sorted");
    if ((int)stratum_size.size() != m + 1 && !(m == 0 && stratum_size.size() <= 1))
        fail("stratum_size has wrong length");
    if ((int)band_size.size() != m) fail("band_size has wrong length");
    if ((int)up_map.size() != m || (int)down_map.size() != m) fail("map tables have wrong length");
    if (m == 0) return;
    if (stratum_size[0] != 0 || stratum_size[m] != 0)
        fail("outer strata must be empty");
    for (int i = 0; i <= m; ++i)
        if (stratum_size[i] < 0) fail("negative stratum size");
    for (int j = 0; j < m; ++j) {
        if ((int)up_map[j].size() != stratum_size[j]) fail("up_map length mismatch");
        if ((int)down_map[j].size() != stratum_size[j + 1]) fail("down_map length mismatch");
        for (int v : up_map[j])
            if (v < 0 || v >= band_size[j]) fail("up_map value out of range");
        for (int v : down_map[j])
            if (v < 0 || v >= band_size[j]) fail("down_map value out of range");
    }
}

namespace {

// Linear ids over all cell elements: strata blocks first, then band blocks.
struct CellIds {
    std::vector<int> stratum_off, band_off;
    int total = 0;

    explicit CellIds(const ConstructibleCosheaf& cs) {
        int m = cs.criticals();
        stratum_off.resize(m + 2, 0);
        for (int i = 0; i <= m; ++i)
            stratum_off[i + 1] = stratum_off[i] + (i < (int)cs.stratum_size.size() ? cs.stratum_size[i] : 0);
        band_off.resize(m + 1, stratum_off[m + 1]);
        for (int j = 0; j < m; ++j) band_off[j + 1] = band_off[j] + cs.band_size[j];
        total = band_off[m];
    }
    int stratum_elem(int i, int k) const { return stratum_off[i] + k; }
    int band_elem(int j, int k) const { return band_off[j] + k; }
};

} // namespace

int Evaluation::component_of_stratum_elem(const ConstructibleCosheaf& cs, int i, int k) const {
    return comp_of[CellIds(cs).stratum_elem(i, k)];
}

int Evaluation::component_of_band_elem(const ConstructibleCosheaf& cs, int j, int k) const {
    return comp_of[CellIds(cs).band_elem(j, k)];
}

Evaluation evaluate(const ConstructibleCosheaf& cs, const Interval& I) {
    Evaluation ev;
    ev.interval = I;
    int m = cs.criticals();
    CellIds ids(cs);
    ev.comp_of.assign(ids.total, -1);
    if (m == 0 || I.empty()) return ev;

    std::vector<char> s_in(m + 1, 0), b_in(m, 0);
    for (int i = 0; i <= m; ++i)
        s_in[i] = cs.stratum_size[i] > 0 && cs.stratum_interval(i).meets(I);
    for (int j = 0; j < m; ++j) b_in[j] = I.contains(cs.critical[j]);

    UnionFind uf(ids.total);
    for (int j = 0; j < m; ++j) {
        if (!b_in[j]) continue;
        for (int k = 0; k < cs.stratum_size[j]; ++k)
            uf.unite(ids.stratum_elem(j, k), ids.band_elem(j, cs.up_map[j][k]));
        for (int k = 0; k < cs.stratum_size[j + 1]; ++k)
            uf.unite(ids.stratum_elem(j + 1, k), ids.band_elem(j, cs.down_map[j][k]));
    }

    std::map<int, int> root_to_comp;
    auto place = [&](int id) {
        int r = uf.find(id);
        auto [it, fresh] = root_to_comp.emplace(r, ev.n_components);
        if (fresh) {
            ++ev.n_components;
            ev.exemplar.push_back(id);
        }
        ev.comp_of[id] = it->second;
    };
    for (int i = 0; i <= m; ++i)
        if (s_in[i])
            for (int k = 0; k < cs.stratum_size[i]; ++k) place(ids.stratum_elem(i, k));
    for (int j = 0; j < m; ++j)
        if (b_in[j])
            for (int k = 0; k < cs.band_size[j]; ++k) place(ids.band_elem(j, k));
    // exemplars hold the smallest member id because placement scans ids in order
    return ev;
}

std::vector<int> corestrict(const ConstructibleCosheaf& cs, const Evaluation& from,
                            const Evaluation& to) {
    if (!to.interval.contains_interval(from.interval))
        throw std::logic_error("corestrict: target interval does not contain source");
    std::vector<int> out(from.n_components, -1);
    for (size_t id = 0; id < from.comp_of.size(); ++id) {
        int fc = from.comp_of[id];
        if (fc < 0) continue;
        int tc = to.comp_of[id];
        if (tc < 0) throw std::logic_error("corestrict: cell missing from superinterval");
        if (out[fc] >= 0 && out[fc] != tc)
            throw std::logic_error("corestrict: inconsistent component map");
        out[fc] = tc;
    }
    (void)cs;
    return out;
}

// ---------------------------------------------------------------------------
// cosheaf_of / realize
// ---------------------------------------------------------------------------

ConstructibleCosheaf cosheaf_of(const ReebGraph& g) {
    ConstructibleCosheaf cs;
    std::vector<Rat> vals;
    for (const auto& v : g.vertices) vals.push_back(v.value);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    cs.critical = vals;
    int m = (int)vals.size();
    cs.stratum_size.assign(m + 1, 0);
    cs.band_size.assign(m, 0);
    cs.up_map.assign(m, {});
    cs.down_map.assign(m, {});
    if (m == 0) return cs;

    auto val = [&](VertexId v) { return g.value_of(v); };

    // strata: edges spanning each open gap, in edge order
    std::vector<std::vector<int>> stratum_edges(m + 1);
    for (int i = 1; i < m; ++i) {
        for (int e = 0; e < (int)g.edges.size(); ++e)
            if (val(g.edges[e].lower) <= vals[i - 1] && val(g.edges[e].upper) >= vals[i])
                stratum_edges[i].push_back(e);
        cs.stratum_size[i] = (int)stratum_edges[i].size();
    }

    // bands: clusters of vertices at the critical value with their incident
    // edges, plus pass-through edges as singletons
    for (int j = 0; j < m; ++j) {
        Interval band = cs.band_interval(j);
        std::vector<int> verts_here; // indices into g.vertices
        for (int v = 0; v < (int)g.vertices.size(); ++v)
            if (g.vertices[v].value == vals[j]) verts_here.push_back(v);
        std::vector<int> edges_here; // indices into g.edges
        std::map<int, int> edge_local;
        for (int e = 0; e < (int)g.edges.size(); ++e) {
            Rat lo = val(g.edges[e].lower), hi = val(g.edges[e].upper);
            // closed segment [lo, hi] meets the open band iff hi > band.lo and lo < band.hi
            bool meets = (band.lo_inf || hi > band.lo) && (band.hi_inf || lo < band.hi);
            if (meets) {
                edge_local[e] = (int)edges_here.size();
                edges_here.push_back(e);
            }
        }
        int nl = (int)verts_here.size(), ne = (int)edges_here.size();
        UnionFind uf(nl + ne);
        std::map<VertexId, int> vert_local;
        for (int k = 0; k < nl; ++k) vert_local[g.vertices[verts_here[k]].id] = k;
        for (int k = 0; k < ne; ++k) {
            const auto& e = g.edges[edges_here[k]];
            for (VertexId end : {e.lower, e.upper}) {
                auto it = vert_local.find(end);
                if (it != vert_local.end()) uf.unite(nl + k, it->second);
            }
        }
        std::map<int, int> root_to_comp;
        std::vector<int> comp_of(nl + ne);
        for (int c = 0; c < nl + ne; ++c) {
            auto [it, fresh] = root_to_comp.emplace(uf.find(c), (int)root_to_comp.size());
            comp_of[c] = it->second;
        }
        cs.band_size[j] = (int)root_to_comp.size();
        cs.up_map[j].resize(cs.stratum_size[j]);
        for (int k = 0; k < cs.stratum_size[j]; ++k)
            cs.up_map[j][k] = comp_of[nl + edge_local.at(stratum_edges[j][k])];
        cs.down_map[j].resize(cs.stratum_size[j + 1]);
        for (int k = 0; k < cs.stratum_size[j + 1]; ++k)
            cs.down_map[j][k] = comp_of[nl + edge_local.at(stratum_edges[j + 1][k])];
    }
    return cs;
}

ReebGraph realize(const ConstructibleCosheaf& cs) {
    cs.check();
    ReebGraph g;
    int m = cs.criticals();
    if (m == 0) return g;
    if (cs.stratum_size[0] != 0 || cs.stratum_size[m] != 0)
        throw std::invalid_argument("realize: unbounded stratum element has no attachment");

    std::vector<VertexId> band_base(m);
    VertexId next_v = 0;
    for (int j = 0; j < m; ++j) {
        band_base[j] = next_v;
        for (int k = 0; k < cs.band_size[j]; ++k) g.vertices.push_back({next_v++, cs.critical[j]});
    }
    EdgeId next_e = 0;
    for (int i = 1; i < m; ++i)
        for (int k = 0; k < cs.stratum_size[i]; ++k)
            g.edges.push_back({next_e++, band_base[i - 1] + cs.down_map[i - 1][k],
                               band_base[i] + cs.up_map[i][k]});
    return canonicalize(g).graph;
}

// ---------------------------------------------------------------------------
// shift
// ---------------------------------------------------------------------------

namespace {

// Re-expression of (a delta-shift of) a cosheaf over a critical grid: the
// cell evaluations plus the corestriction maps between adjacent cells.
struct ReExpr {
    const ConstructibleCosheaf* base;
    Rat delta;
    std::vector<Rat> grid;
    std::vector<Evaluation> strata; // grid.size() + 1
    std::vector<Evaluation> bands;  // grid.size()
    std::vector<std::vector<int>> up, down;

    int cells() const { return (int)grid.size(); }

    Interval stratum_interval(int i) const {
        int p = (int)grid.size();
        Interval iv;
        iv.lo_inf = i == 0;
        iv.hi_inf = i == p;
        if (!iv.lo_inf) iv.lo = grid[i - 1];
        if (!iv.hi_inf) iv.hi = grid[i];
        return iv;
    }
    Interval band_interval(int j) const {
        int p = (int)grid.size();
        Interval iv;
        iv.lo_inf = j == 0;
        iv.hi_inf = j == p - 1;
        if (!iv.lo_inf) iv.lo = grid[j - 1];
        if (!iv.hi_inf) iv.hi = grid[j + 1];
        return iv;
    }
};

ReExpr build_reexpr(const ConstructibleCosheaf& base, const Rat& delta,
                    const std::vector<Rat>& grid) {
    ReExpr re{&base, delta, grid, {}, {}, {}, {}};
    int p = (int)grid.size();
    re.strata.reserve(p + 1);
    for (int i = 0; i <= p; ++i)
        re.strata.push_back(evaluate(base, re.stratum_interval(i).thicken(delta)));
    re.bands.reserve(p);
    for (int j = 0; j < p; ++j)
        re.bands.push_back(evaluate(base, re.band_interval(j).thicken(delta)));
    re.up.resize(p);
    re.down.resize(p);
    for (int j = 0; j < p; ++j) {
        re.up[j] = corestrict(base, re.strata[j], re.bands[j]);
        re.down[j] = corestrict(base, re.strata[j + 1], re.bands[j]);
    }
    return re;
}

ConstructibleCosheaf reexpr_to_cosheaf(const ReExpr& re) {
    ConstructibleCosheaf out;
    out.critical = re.grid;
    int p = (int)re.grid.size();
    out.stratum_size.resize(p + 1);
    for (int i = 0; i <= p; ++i) out.stratum_size[i] = re.strata[i].n_components;
    out.band_size.resize(p);
    for (int j = 0; j < p; ++j) out.band_size[j] = re.bands[j].n_components;
    out.up_map = re.up;
    out.down_map = re.down;
    return out;
}

bool is_bijection(const std::vector<int>& map, int target_size) {
    if ((int)map.size() != target_size) return false;
    std::vector<char> hit(target_size, 0);
    for (int v : map) {
        if (v < 0 || v >= target_size || hit[v]) return false;
        hit[v] = 1;
    }
    return true;
}

} // namespace

ConstructibleCosheaf shift(const ConstructibleCosheaf& cs, const Rat& eps) {
    if (eps < Rat(0)) throw std::invalid_argument("shift: negative epsilon");
    cs.check();
    if (eps == Rat(0) || cs.criticals() == 0) return cs;

    std::vector<Rat> grid;
    for (const Rat& c : cs.critical) {
        grid.push_back(c - eps);
        grid.push_back(c + eps);
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    // Prune candidate critical values whose flanking maps are isomorphisms.
    for (;;) {
        ReExpr re = build_reexpr(cs, eps, grid);
        int degenerate = -1;
        for (int j = 0; j < (int)grid.size() && degenerate < 0; ++j)
            if (is_bijection(re.up[j], re.bands[j].n_components) &&
                is_bijection(re.down[j], re.bands[j].n_components))
                degenerate = j;
        if (degenerate < 0) {
            ConstructibleCosheaf out = reexpr_to_cosheaf(re);
            out.check();
            return out;
        }
        grid.erase(grid.begin() + degenerate);
    }
}

// ---------------------------------------------------------------------------
// Interleaving decision
// ---------------------------------------------------------------------------

namespace {

// Atomic data of a natural transformation between re-expressed cosheaves on
// a shared grid: one component map per grid cell.
struct Nat {
    const ReExpr* dom; // delta must be 0
    const ReExpr* cod;
    std::vector<std::vector<int>> strata_map, bands_map;
};

bool squares_hold(const Nat& nt) {
    int p = nt.dom->cells();
    for (int j = 0; j < p; ++j) {
        for (int c = 0; c < nt.dom->strata[j].n_components; ++c)
            if (nt.bands_map[j][nt.dom->up[j][c]] != nt.cod->up[j][nt.strata_map[j][c]])
                return false;
        for (int c = 0; c < nt.dom->strata[j + 1].n_components; ++c)
            if (nt.bands_map[j][nt.dom->down[j][c]] != nt.cod->down[j][nt.strata_map[j + 1][c]])
                return false;
    }
    return true;
}

// Decodes a linear cell-element id of a base cosheaf.
struct BaseCell {
    bool band;
    int index; // stratum or band index
};

BaseCell decode_cell(const ConstructibleCosheaf& cs, int linear_id) {
    CellIds ids(cs);
    int m = cs.criticals();
    for (int i = 0; i <= m; ++i)
        if (linear_id < ids.stratum_off[i + 1]) return {false, i};
    for (int j = 0; j < m; ++j)
        if (linear_id < ids.band_off[j + 1]) return {true, j};
    throw std::logic_error("decode_cell: id out of range");
}

// How one component of a dom-side evaluation determines the image component
// on the cod side, for every possible value of the unknown transformation:
// the component is traced through a small exact window K around one of its
// member cells; K lies inside a single grid cell, where the cod-side
// corestriction out of K is a bijection.  `probe` is that grid cell,
// `dom_elem` the component of the dom re-expression there whose value the
// transformation consumes, and `cod_map[y]` the resulting component of E_cod
// when the transformation's value at the probe is y.  The trace does not
// depend on the transformation, only on the frame, so it is precomputed.
struct ElementTrace {
    bool probe_band = false;
    int probe_index = 0;
    int dom_elem = 0;
    std::vector<int> cod_map;
};

ElementTrace trace_element(const ReExpr& dom, const ReExpr& cod, const Evaluation& E_dom,
                           const Evaluation& E_cod, int exemplar_id) {
    const ConstructibleCosheaf& dom_base = *dom.base;
    const ConstructibleCosheaf& cod_base = *cod.base;
    const std::vector<Rat>& grid = dom.grid;
    const Interval& J = E_dom.interval;

    ElementTrace tr;
    BaseCell cell = decode_cell(dom_base, exemplar_id);
    Interval K;
    if (cell.band) {
        const Rat& sigma = dom_base.critical[cell.index];
        int gj = (int)(std::lower_bound(grid.begin(), grid.end(), sigma) - grid.begin());
        if (gj >= (int)grid.size() || grid[gj] != sigma)
            throw std::logic_error("trace_element: base critical value missing from grid");
        std::vector<Rat> halves;
        if (!J.lo_inf) halves.push_back((sigma - J.lo) / Rat(2));
        if (!J.hi_inf) halves.push_back((J.hi - sigma) / Rat(2));
        if (gj > 0) halves.push_back((sigma - grid[gj - 1]) / Rat(2));
        if (gj + 1 < (int)grid.size()) halves.push_back((grid[gj + 1] - sigma) / Rat(2));
        Rat gamma = halves.empty() ? Rat(1) : halves[0];
        for (const Rat& h : halves) gamma = rat_min(gamma, h);
        K = Interval::open(sigma - gamma, sigma + gamma);
        tr.probe_band = true;
        tr.probe_index = gj;
    } else {
        Interval support = dom_base.stratum_interval(cell.index);
        Interval O;
        O.lo_inf = support.lo_inf && J.lo_inf;
        O.hi_inf = support.hi_inf && J.hi_inf;
        if (!O.lo_inf)
            O.lo = support.lo_inf ? J.lo : (J.lo_inf ? support.lo : rat_max(support.lo, J.lo));
        if (!O.hi_inf)
            O.hi = support.hi_inf ? J.hi : (J.hi_inf ? support.hi : rat_min(support.hi, J.hi));
        // first grid value strictly inside O, if any
        std::optional<Rat> g1;
        for (const Rat& t : grid)
            if (O.contains(t)) {
                g1 = t;
                break;
            }
        if (g1) {
            Rat lo = (!O.lo_inf) ? O.lo : (*g1 - Rat(1));
            K = Interval::open(lo, *g1);
        } else if (!O.lo_inf && !O.hi_inf) {
            K = Interval::open(O.lo, O.hi);
        } else if (!O.hi_inf) {
            K = Interval::open(O.hi - Rat(1), O.hi);
        } else if (!O.lo_inf) {
            K = Interval::open(O.lo, O.lo + Rat(1));
        } else {
            K = Interval::open(Rat(0), Rat(1));
        }
        // the grid stratum containing K (no grid value lies inside K)
        int s = 0;
        while (s < (int)grid.size() && grid[s] <= K.lo) ++s;
        tr.probe_band = false;
        tr.probe_index = s;
    }

    const Evaluation& cell_dom = tr.probe_band ? dom.bands[tr.probe_index]
                                               : dom.strata[tr.probe_index];
    const Evaluation& cell_cod = tr.probe_band ? cod.bands[tr.probe_index]
                                               : cod.strata[tr.probe_index];

    Evaluation EK_dom = evaluate(dom_base, K);
    int xK = EK_dom.comp_of[exemplar_id];
    if (xK < 0) throw std::logic_error("trace_element: exemplar missing from probe window");
    tr.dom_elem = corestrict(dom_base, EK_dom, cell_dom)[xK];

    Evaluation EK_cod = evaluate(cod_base, K.thicken(cod.delta));
    std::vector<int> up = corestrict(cod_base, EK_cod, cell_cod);
    if (EK_cod.n_components != cell_cod.n_components)
        throw std::logic_error("trace_element: probe corestriction not bijective");
    std::vector<int> inv(cell_cod.n_components, -1);
    for (int c = 0; c < EK_cod.n_components; ++c) {
        if (inv[up[c]] >= 0) throw std::logic_error("trace_element: probe corestriction not injective");
        inv[up[c]] = c;
    }
    std::vector<int> down = corestrict(cod_base, EK_cod, E_cod);
    tr.cod_map.resize(cell_cod.n_components);
    for (int y = 0; y < cell_cod.n_components; ++y) tr.cod_map[y] = down[inv[y]];
    return tr;
}

// The unique natural extension of `nt` evaluated at the interval of E_dom,
// as a component map E_dom -> E_cod; per-element application of the traces.
std::vector<int> nat_apply(const Nat& nt, const Evaluation& E_dom, const Evaluation& E_cod) {
    std::vector<int> out(E_dom.n_components, -1);
    for (int x = 0; x < E_dom.n_components; ++x) {
        ElementTrace tr = trace_element(*nt.dom, *nt.cod, E_dom, E_cod, E_dom.exemplar[x]);
        const std::vector<int>& cell_map =
            tr.probe_band ? nt.bands_map[tr.probe_index] : nt.strata_map[tr.probe_index];
        out[x] = tr.cod_map[cell_map[tr.dom_elem]];
    }
    return out;
}

// Per-element candidate masks over the codomain components of every grid
// cell; the composite-with-inclusion conditions compile into these.
struct UnaryMasks {
    std::vector<std::vector<std::vector<char>>> strata, bands;

    static UnaryMasks full(const ReExpr& dom, const ReExpr& cod) {
        UnaryMasks m;
        int p = dom.cells();
        m.strata.resize(p + 1);
        m.bands.resize(p);
        for (int i = 0; i <= p; ++i)
            m.strata[i].assign(dom.strata[i].n_components,
                               std::vector<char>(cod.strata[i].n_components, 1));
        for (int j = 0; j < p; ++j)
            m.bands[j].assign(dom.bands[j].n_components,
                              std::vector<char>(cod.bands[j].n_components, 1));
        return m;
    }

    bool row_nonempty(const std::vector<char>& row) const {
        for (char c : row)
            if (c) return true;
        return false;
    }

    bool feasible() const {
        for (const auto& cell : strata)
            for (const auto& row : cell)
                if (!row_nonempty(row)) return false;
        for (const auto& cell : bands)
            for (const auto& row : cell)
                if (!row_nonempty(row)) return false;
        return true;
    }
};

// Assignment observer: vetoes candidate values and is unwound on backtrack.
struct SearchHooks {
    // (is_band, cell index, element, chosen value) -> false to veto
    virtual bool assign(bool is_band, int cell, int elem, int value) = 0;
    virtual void undo() = 0; // pops exactly one assign
    virtual ~SearchHooks() = default;
};

// Backtracking enumeration of natural transformations dom => cod on the
// shared grid.  Cells are swept left to right (stratum 0, band 0, stratum 1,
// ...); band elements hit from below are forced by the square with the
// stratum to their left, stratum elements are filtered by the square with
// the band to their left, elements that the inclusion into the 2-eps shift
// keeps distinct must stay distinct, and optional unary masks restrict each
// element's candidates (both are consequences of the composite identities).
struct NatSearch {
    const ReExpr& dom;
    const ReExpr& cod;
    const std::vector<std::vector<int>>& incl_strata; // dom cell -> 2eps-shift cell
    const std::vector<std::vector<int>>& incl_bands;
    const UnaryMasks* masks = nullptr;
    SearchHooks* hooks = nullptr;
    uint64_t& nodes;
    uint64_t budget;
    bool out_of_budget = false;

    Nat nt;

    NatSearch(const ReExpr& d, const ReExpr& c, const std::vector<std::vector<int>>& is,
              const std::vector<std::vector<int>>& ib, uint64_t& n, uint64_t b,
              const UnaryMasks* um = nullptr, SearchHooks* hk = nullptr)
        : dom(d), cod(c), incl_strata(is), incl_bands(ib), masks(um), hooks(hk), nodes(n),
          budget(b) {
        nt.dom = &d;
        nt.cod = &c;
        int p = d.cells();
        nt.strata_map.resize(p + 1);
        nt.bands_map.resize(p);
        for (int i = 0; i <= p; ++i) nt.strata_map[i].assign(d.strata[i].n_components, -1);
        for (int j = 0; j < p; ++j) nt.bands_map[j].assign(d.bands[j].n_components, -1);
    }

    // enumerate in cell order; within a cell, element by element
    template <class Yield>
    bool run(Yield&& yield) {
        return assign_stratum(0, 0, yield);
    }

    template <class Yield>
    bool assign_stratum(int i, int k, Yield&& yield) {
        int p = dom.cells();
        if (k == dom.strata[i].n_components) {
            if (i == p) return yield(nt);
            return assign_band(i, 0, yield);
        }
        if (cod.strata[i].n_components == 0) return false; // no map can exist
        for (int v = 0; v < cod.strata[i].n_components; ++v) {
            if (++nodes > budget) {
                out_of_budget = true;
                return false;
            }
            if (masks && !masks->strata[i][k][v]) continue;
            // square with the band on the left (already assigned)
            if (i > 0 && nt.bands_map[i - 1][dom.down[i - 1][k]] != cod.down[i - 1][v]) continue;
            bool ok = true;
            for (int k2 = 0; k2 < k && ok; ++k2) {
                // inclusion-distinctness within the cell
                if (nt.strata_map[i][k2] == v && incl_strata[i][k2] != incl_strata[i][k]) ok = false;
                // elements sharing a band target above must map coherently
                if (i < p && dom.up[i][k2] == dom.up[i][k] &&
                    cod.up[i][nt.strata_map[i][k2]] != cod.up[i][v])
                    ok = false;
            }
            if (!ok) continue;
            nt.strata_map[i][k] = v;
            bool vetoed = hooks && !hooks->assign(false, i, k, v);
            if (!vetoed && assign_stratum(i, k + 1, yield)) return true;
            if (hooks) hooks->undo();
            if (out_of_budget) break;
        }
        nt.strata_map[i][k] = -1;
        return false;
    }

    template <class Yield>
    bool assign_band(int j, int k, Yield&& yield) {
        if (k == dom.bands[j].n_components) return assign_stratum(j + 1, 0, yield);
        if (cod.bands[j].n_components == 0) return false;
        // forced values from the stratum below
        int forced = -1;
        for (int c = 0; c < dom.strata[j].n_components; ++c) {
            if (dom.up[j][c] != k) continue;
            int want = cod.up[j][nt.strata_map[j][c]];
            if (forced >= 0 && forced != want) return false; // inconsistent: dead branch
            forced = want;
        }
        for (int v = 0; v < cod.bands[j].n_components; ++v) {
            if (forced >= 0 && v != forced) continue;
            if (++nodes > budget) {
                out_of_budget = true;
                return false;
            }
            if (masks && !masks->bands[j][k][v]) continue;
            bool ok = true;
            for (int k2 = 0; k2 < k && ok; ++k2)
                if (nt.bands_map[j][k2] == v && incl_bands[j][k2] != incl_bands[j][k]) ok = false;
            if (!ok) continue;
            nt.bands_map[j][k] = v;
            bool vetoed = hooks && !hooks->assign(true, j, k, v);
            if (!vetoed && assign_band(j, k + 1, yield)) return true;
            if (hooks) hooks->undo();
            if (out_of_budget) break;
        }
        nt.bands_map[j][k] = -1;
        return false;
    }
};

std::vector<Rat> refinement_grid(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                                 const Rat& eps) {
    std::vector<Rat> grid;
    for (const auto* cs : {&F, &G})
        for (const Rat& c : cs->critical)
            for (const Rat& d : {Rat(0), eps, eps * Rat(2)}) {
                grid.push_back(c - d);
                grid.push_back(c + d);
            }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

struct Frame {
    ReExpr F0, Feps, F2, G0, Geps, G2;
    std::vector<std::vector<int>> inclF_strata, inclF_bands, inclG_strata, inclG_bands;
    // traces of phi's codomain elements through the shifted psi (cells x
    // Geps-components), and symmetrically; precomputed once per decision
    std::vector<std::vector<ElementTrace>> psi_tr_strata, psi_tr_bands;
    std::vector<std::vector<ElementTrace>> phi_tr_strata, phi_tr_bands;
};

Frame build_frame(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G, const Rat& eps,
                  const std::vector<Rat>& grid, bool with_traces) {
    Frame fr{build_reexpr(F, Rat(0), grid), build_reexpr(F, eps, grid),
             build_reexpr(F, eps * Rat(2), grid), build_reexpr(G, Rat(0), grid),
             build_reexpr(G, eps, grid), build_reexpr(G, eps * Rat(2), grid),
             {}, {}, {}, {}, {}, {}, {}, {}};
    int p = (int)grid.size();
    auto incl = [&](const ReExpr& a, const ReExpr& b, std::vector<std::vector<int>>& str,
                    std::vector<std::vector<int>>& bnd) {
        str.resize(p + 1);
        bnd.resize(p);
        for (int i = 0; i <= p; ++i) str[i] = corestrict(*a.base, a.strata[i], b.strata[i]);
        for (int j = 0; j < p; ++j) bnd[j] = corestrict(*a.base, a.bands[j], b.bands[j]);
    };
    incl(fr.F0, fr.F2, fr.inclF_strata, fr.inclF_bands);
    incl(fr.G0, fr.G2, fr.inclG_strata, fr.inclG_bands);
    if (!with_traces) return fr;

    auto traces = [&](const ReExpr& dom, const ReExpr& cod, const ReExpr& through,
                      const ReExpr& into, std::vector<std::vector<ElementTrace>>& str,
                      std::vector<std::vector<ElementTrace>>& bnd) {
        // dom/cod: the transformation being traced; through/into: the
        // evaluation pair (E_dom over through's cells, E_cod over into's)
        str.resize(p + 1);
        bnd.resize(p);
        for (int i = 0; i <= p; ++i) {
            const Evaluation& ed = through.strata[i];
            str[i].reserve(ed.n_components);
            for (int v = 0; v < ed.n_components; ++v)
                str[i].push_back(trace_element(dom, cod, ed, into.strata[i], ed.exemplar[v]));
        }
        for (int j = 0; j < p; ++j) {
            const Evaluation& ed = through.bands[j];
            bnd[j].reserve(ed.n_components);
            for (int v = 0; v < ed.n_components; ++v)
                bnd[j].push_back(trace_element(dom, cod, ed, into.bands[j], ed.exemplar[v]));
        }
    };
    // psi evaluated at thickened cells consumes Geps elements and lands in F2
    traces(fr.G0, fr.Feps, fr.Geps, fr.F2, fr.psi_tr_strata, fr.psi_tr_bands);
    // phi evaluated at thickened cells consumes Feps elements and lands in G2
    traces(fr.F0, fr.Geps, fr.Feps, fr.G2, fr.phi_tr_strata, fr.phi_tr_bands);
    return fr;
}

bool trace_hits(const ElementTrace& tr, int want) {
    for (int y : tr.cod_map)
        if (y == want) return true;
    return false;
}

bool composites_hold(const Frame& fr, const Nat& phi, const Nat& psi) {
    int p = (int)fr.F0.grid.size();
    for (int i = 0; i <= p + p; ++i) {
        bool is_band = i >= p + 1;
        int idx = is_band ? i - (p + 1) : i;
        const Evaluation& F0c = is_band ? fr.F0.bands[idx] : fr.F0.strata[idx];
        const Evaluation& Gec = is_band ? fr.Geps.bands[idx] : fr.Geps.strata[idx];
        const Evaluation& F2c = is_band ? fr.F2.bands[idx] : fr.F2.strata[idx];
        const Evaluation& G0c = is_band ? fr.G0.bands[idx] : fr.G0.strata[idx];
        const Evaluation& Fec = is_band ? fr.Feps.bands[idx] : fr.Feps.strata[idx];
        const Evaluation& G2c = is_band ? fr.G2.bands[idx] : fr.G2.strata[idx];
        const std::vector<int>& phi_map = is_band ? phi.bands_map[idx] : phi.strata_map[idx];
        const std::vector<int>& psi_map = is_band ? psi.bands_map[idx] : psi.strata_map[idx];
        const std::vector<int>& inclF = is_band ? fr.inclF_bands[idx] : fr.inclF_strata[idx];
        const std::vector<int>& inclG = is_band ? fr.inclG_bands[idx] : fr.inclG_strata[idx];

        if (F0c.n_components > 0) {
            std::vector<int> psi_shift = nat_apply(psi, Gec, F2c);
            for (int u = 0; u < F0c.n_components; ++u)
                if (psi_shift[phi_map[u]] != inclF[u]) return false;
        }
        if (G0c.n_components > 0) {
            std::vector<int> phi_shift = nat_apply(phi, Fec, G2c);
            for (int u = 0; u < G0c.n_components; ++u)
                if (phi_shift[psi_map[u]] != inclG[u]) return false;
        }
    }
    return true;
}

// Maintains the psi candidate masks implied by the partial phi assignment,
// with trail-based undo.  Assigning phi(u) = v pins psi's value at v's trace
// probe (first composite identity) and, wherever v is consumed by a trace of
// some psi candidate w, eliminates w against mismatching inclusion images
// (second identity).  Emptying any row vetoes the phi prefix: constraints
// only accumulate along a branch, so the veto is sound.
struct PsiMaskTracker : SearchHooks {
    const Frame& fr;
    UnaryMasks masks;
    std::vector<std::vector<int>> alive_strata, alive_bands;
    struct Zeroed {
        bool band;
        int cell, elem, cand;
    };
    std::vector<Zeroed> trail;
    std::vector<size_t> frames;
    struct Dep {
        bool a_band;
        int a, w;
    };
    std::map<std::tuple<bool, int, int>, std::vector<Dep>> deps; // phi position -> traces using it

    explicit PsiMaskTracker(const Frame& f) : fr(f), masks(UnaryMasks::full(f.G0, f.Feps)) {
        int p = (int)fr.F0.grid.size();
        alive_strata.resize(p + 1);
        alive_bands.resize(p);
        for (int i = 0; i <= p; ++i)
            for (const auto& row : masks.strata[i]) alive_strata[i].push_back((int)row.size());
        for (int j = 0; j < p; ++j)
            for (const auto& row : masks.bands[j]) alive_bands[j].push_back((int)row.size());
        for (int i = 0; i <= p; ++i)
            for (int w = 0; w < (int)fr.phi_tr_strata[i].size(); ++w) {
                const ElementTrace& tr = fr.phi_tr_strata[i][w];
                deps[{tr.probe_band, tr.probe_index, tr.dom_elem}].push_back({false, i, w});
            }
        for (int j = 0; j < p; ++j)
            for (int w = 0; w < (int)fr.phi_tr_bands[j].size(); ++w) {
                const ElementTrace& tr = fr.phi_tr_bands[j][w];
                deps[{tr.probe_band, tr.probe_index, tr.dom_elem}].push_back({true, j, w});
            }
    }

    bool zero(bool band, int cell, int elem, int cand) {
        auto& row = band ? masks.bands[cell][elem] : masks.strata[cell][elem];
        if (!row[cand]) return true;
        row[cand] = 0;
        trail.push_back({band, cell, elem, cand});
        int& alive = band ? alive_bands[cell][elem] : alive_strata[cell][elem];
        return --alive > 0;
    }

    bool assign(bool is_band, int cell, int elem, int value) override {
        frames.push_back(trail.size());
        bool ok = true;
        const ElementTrace& tr =
            is_band ? fr.psi_tr_bands[cell][value] : fr.psi_tr_strata[cell][value];
        int want = is_band ? fr.inclF_bands[cell][elem] : fr.inclF_strata[cell][elem];
        for (int y = 0; y < (int)tr.cod_map.size(); ++y)
            if (tr.cod_map[y] != want)
                ok = zero(tr.probe_band, tr.probe_index, tr.dom_elem, y) && ok;
        auto it = deps.find({is_band, cell, elem});
        if (it != deps.end()) {
            for (const Dep& d : it->second) {
                const ElementTrace& tr2 =
                    d.a_band ? fr.phi_tr_bands[d.a][d.w] : fr.phi_tr_strata[d.a][d.w];
                int val = tr2.cod_map[value];
                const std::vector<int>& inclG =
                    d.a_band ? fr.inclG_bands[d.a] : fr.inclG_strata[d.a];
                int n_u = (d.a_band ? fr.G0.bands[d.a] : fr.G0.strata[d.a]).n_components;
                for (int u = 0; u < n_u; ++u)
                    if (val != inclG[u]) ok = zero(d.a_band, d.a, u, d.w) && ok;
            }
        }
        return ok;
    }

    void undo() override {
        size_t mark = frames.back();
        frames.pop_back();
        while (trail.size() > mark) {
            const Zeroed& z = trail.back();
            (z.band ? masks.bands[z.cell][z.elem] : masks.strata[z.cell][z.elem])[z.cand] = 1;
            ++(z.band ? alive_bands[z.cell][z.elem] : alive_strata[z.cell][z.elem]);
            trail.pop_back();
        }
    }
};

InterleavingCertificate make_certificate(const Rat& eps, const std::vector<Rat>& grid,
                                         const Nat& phi, const Nat& psi) {
    InterleavingCertificate cert;
    cert.epsilon = eps;
    cert.grid = grid;
    cert.phi_strata = phi.strata_map;
    cert.phi_bands = phi.bands_map;
    cert.psi_strata = psi.strata_map;
    cert.psi_bands = psi.bands_map;
    return cert;
}

} // namespace

InterleavingDecision decide_interleaving(const ConstructibleCosheaf& F,
                                         const ConstructibleCosheaf& G, const Rat& eps,
                                         uint64_t budget) {
    if (eps < Rat(0)) throw std::invalid_argument("decide_interleaving: negative epsilon");
    F.check();
    G.check();
    InterleavingDecision result;
    if (F.criticals() == 0 && G.criticals() == 0) {
        result.outcome = Decision::yes;
        result.certificate = InterleavingCertificate{eps, {}, {}, {}, {}, {}};
        return result;
    }
    if (F.criticals() == 0 || G.criticals() == 0) {
        result.outcome = Decision::no; // a map from a nonempty set into the empty set
        return result;
    }

    std::vector<Rat> grid = refinement_grid(F, G, eps);
    Frame fr = build_frame(F, G, eps, grid, true);
    int p = (int)grid.size();

    // Static unary mask on phi: assigning v to element u requires some psi
    // value to send v's trace onto u's inclusion image.
    UnaryMasks phi_masks = UnaryMasks::full(fr.F0, fr.Geps);
    for (int i = 0; i <= p; ++i)
        for (int u = 0; u < fr.F0.strata[i].n_components; ++u)
            for (int v = 0; v < fr.Geps.strata[i].n_components; ++v)
                phi_masks.strata[i][u][v] =
                    trace_hits(fr.psi_tr_strata[i][v], fr.inclF_strata[i][u]);
    for (int j = 0; j < p; ++j)
        for (int u = 0; u < fr.F0.bands[j].n_components; ++u)
            for (int v = 0; v < fr.Geps.bands[j].n_components; ++v)
                phi_masks.bands[j][u][v] = trace_hits(fr.psi_tr_bands[j][v], fr.inclF_bands[j][u]);
    if (!phi_masks.feasible()) {
        result.outcome = Decision::no;
        return result;
    }

    uint64_t nodes = 0;
    // Both composite identities are folded into psi candidate masks as phi is
    // assigned: the first pins psi's value at each assigned element's trace
    // probe, the second eliminates psi candidates whose traces consume the
    // new phi value incompatibly.  A phi prefix that empties a row is cut off
    // immediately.
    PsiMaskTracker tracker(fr);
    NatSearch phi_search(fr.F0, fr.Geps, fr.inclF_strata, fr.inclF_bands, nodes, budget,
                         &phi_masks, &tracker);
    bool found = phi_search.run([&](const Nat& phi) {
        NatSearch psi_search(fr.G0, fr.Feps, fr.inclG_strata, fr.inclG_bands, nodes, budget,
                             &tracker.masks);
        bool ok = psi_search.run([&](const Nat& psi) {
            if (!composites_hold(fr, phi, psi)) return false; // masks should preclude this
            result.certificate = make_certificate(eps, grid, phi, psi);
            return true;
        });
        if (psi_search.out_of_budget) phi_search.out_of_budget = true;
        return ok;
    });
    result.nodes = nodes;
    if (found) {
        result.outcome = Decision::yes;
    } else if (phi_search.out_of_budget) {
        result.outcome = Decision::undecided;
    } else {
        result.outcome = Decision::no;
    }
    return result;
}

bool verify_certificate(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                        const InterleavingCertificate& cert) {
    if (F.criticals() == 0 && G.criticals() == 0) return true;
    if (F.criticals() == 0 || G.criticals() == 0) return false;
    std::vector<Rat> grid = refinement_grid(F, G, cert.epsilon);
    if (grid != cert.grid) return false;
    Frame fr = build_frame(F, G, cert.epsilon, grid, false);
    int p = (int)grid.size();

    auto sizes_ok = [p](const std::vector<std::vector<int>>& strata,
                        const std::vector<std::vector<int>>& bands, const ReExpr& dom,
                        const ReExpr& cod) {
        if ((int)strata.size() != p + 1 || (int)bands.size() != p) return false;
        for (int i = 0; i <= p; ++i) {
            if ((int)strata[i].size() != dom.strata[i].n_components) return false;
            for (int v : strata[i])
                if (v < 0 || v >= cod.strata[i].n_components) return false;
        }
        for (int j = 0; j < p; ++j) {
            if ((int)bands[j].size() != dom.bands[j].n_components) return false;
            for (int v : bands[j])
                if (v < 0 || v >= cod.bands[j].n_components) return false;
        }
        return true;
    };
    if (!sizes_ok(cert.phi_strata, cert.phi_bands, fr.F0, fr.Geps)) return false;
    if (!sizes_ok(cert.psi_strata, cert.psi_bands, fr.G0, fr.Feps)) return false;

    Nat phi{&fr.F0, &fr.Geps, cert.phi_strata, cert.phi_bands};
    Nat psi{&fr.G0, &fr.Feps, cert.psi_strata, cert.psi_bands};
    if (!squares_hold(phi) || !squares_hold(psi)) return false;
    return composites_hold(fr, phi, psi);
}

BoundInterval interleaving_bounds(const ConstructibleCosheaf& F, const ConstructibleCosheaf& G,
                                  const Rat& tolerance, uint64_t budget) {
    if (!(tolerance > Rat(0)))
        throw std::invalid_argument("interleaving_bounds: tolerance must be positive");
    F.check();
    G.check();
    BoundInterval out;
    out.lo = Rat(0);
    out.lo_provenance = "trivial lower bound";

    if (F.criticals() == 0 && G.criticals() == 0) {
        out.hi = Rat(0);
        out.hi_provenance = "both cosheaves empty";
        return out;
    }
    // Components never merge under shifting and the composite conditions pin
    // each component to itself, so differing component counts rule out an
    // interleaving at every eps.
    auto comp_count = [](const ConstructibleCosheaf& cs) {
        return evaluate(cs, Interval::whole()).n_components;
    };
    if (F.criticals() == 0 || G.criticals() == 0 || comp_count(F) != comp_count(G)) {
        out.unbounded = true;
        out.lo_provenance = "component counts differ";
        out.hi_provenance = "no interleaving at any epsilon";
        return out;
    }

    std::vector<Rat> all;
    for (const auto* cs : {&F, &G})
        for (const Rat& c : cs->critical) all.push_back(c);
    Rat span = *std::max_element(all.begin(), all.end()) -
               *std::min_element(all.begin(), all.end());
    if (span == Rat(0)) span = tolerance; // degenerate: all values equal

    std::map<Rat, Decision> memo;
    bool undecided = false;
    auto probe = [&](const Rat& eps) {
        auto it = memo.find(eps);
        if (it != memo.end()) return it->second;
        InterleavingDecision d = decide_interleaving(F, G, eps, budget);
        if (d.outcome == Decision::undecided) undecided = true;
        memo.emplace(eps, d.outcome);
        return d.outcome;
    };

    // candidate probes: pairwise gaps and half-gaps of the critical values
    std::vector<Rat> cands{Rat(0), span};
    for (size_t i = 0; i < all.size(); ++i)
        for (size_t j = i + 1; j < all.size(); ++j) {
            Rat d = (all[i] - all[j]).abs();
            if (d > Rat(0) && d <= span) cands.push_back(d);
            Rat h = d / Rat(2);
            if (h > Rat(0) && h <= span) cands.push_back(h);
        }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());

    // widest probe first: it is expected to succeed
    Decision top = probe(span);
    if (top == Decision::undecided) {
        out.undecided = true;
        out.hi = span;
        out.hi_provenance = "undecided at span; interval widened";
        return out;
    }
    if (top == Decision::no) {
        // mathematically unreachable for equal component counts; report honestly
        out.undecided = true;
        out.hi = span;
        out.lo = span;
        out.lo_provenance = "no interleaving found below span";
        out.hi_provenance = "search anomaly: no at span";
        return out;
    }

    if (probe(Rat(0)) == Decision::yes) {
        out.lo = Rat(0);
        out.hi = Rat(0);
        out.lo_provenance = "decision yes at 0";
        out.hi_provenance = "isomorphic: decision yes at 0";
        return out;
    }

    // binary search over the candidate list (decisions are monotone in eps)
    size_t lo_i = 0, hi_i = cands.size() - 1; // cands[0]=0 is a no, cands.back()=span a yes
    while (hi_i - lo_i > 1 && !undecided) {
        size_t mid = (lo_i + hi_i) / 2;
        Decision d = probe(cands[mid]);
        if (d == Decision::yes)
            hi_i = mid;
        else if (d == Decision::no)
            lo_i = mid;
        else
            break;
    }
    Rat lo = cands[lo_i], hi = cands[hi_i];

    // refine by bisection on a snapped grid so denominators stay small
    Rat step = tolerance / Rat(4);
    while (!undecided && hi - lo > tolerance) {
        int64_t k = (((hi - lo) / Rat(2)) / step).floor_int();
        if (k < 1) k = 1;
        Rat mid = lo + step * Rat(k);
        if (!(mid < hi)) mid = lo + (hi - lo) / Rat(2);
        Decision d = probe(mid);
        if (d == Decision::yes)
            hi = mid;
        else if (d == Decision::no)
            lo = mid;
        else
            break;
    }

    out.lo = lo;
    out.hi = hi;
    out.lo_provenance = "largest probe deciding no: " + lo.to_decimal_string();
    out.hi_provenance = "smallest probe deciding yes: " + hi.to_decimal_string();
    out.undecided = undecided;
    return out;
}

} // namespace reeb
