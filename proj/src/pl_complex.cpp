#include "reeb/pl_complex.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "reeb/union_find.hpp"

namespace reeb {

const PLComplex::Vertex* PLComplex::find_vertex(VertexId id) const {
    for (const auto& v : vertices)
        if (v.id == id) return &v;
    return nullptr;
}

Rat PLComplex::value_of(VertexId id) const {
    const Vertex* v = find_vertex(id);
    if (!v) throw std::out_of_range("no vertex with id " + std::to_string(id));
    return v->value;
}

namespace {

struct Token {
    std::string text;
    int column;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    size_t i = 0;
    while (i < line.size()) {
        if (isspace((unsigned char)line[i])) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        size_t j = i;
        while (j < line.size() && !isspace((unsigned char)line[j])) ++j;
        out.push_back({line.substr(i, j - i), (int)i + 1});
        i = j;
    }
    return out;
}

int64_t parse_uint(const Token& t, int line) {
    for (char c : t.text)
        if (c < '0' || c > '9') throw ParseError(line, t.column, "expected integer id, got '" + t.text + "'");
    if (t.text.size() > 18) throw ParseError(line, t.column, "id out of range");
    return std::stoll(t.text);
}

std::pair<VertexId, VertexId> norm_edge(VertexId a, VertexId b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

std::array<VertexId, 3> norm_tri(VertexId a, VertexId b, VertexId c) {
    std::array<VertexId, 3> t{a, b, c};
    std::sort(t.begin(), t.end());
    return t;
}

} // namespace

PLComplex parse_complex(std::string_view text, FaceClosure mode) {
    PLComplex k;
    std::set<VertexId> vids;
    std::set<std::pair<VertexId, VertexId>> edge_set;
    std::set<std::array<VertexId, 3>> tri_set;

    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto toks = tokenize(line);
        if (toks.empty()) continue;
        const std::string& kind = toks[0].text;
        auto need = [&](size_t n, const char* what) {
            if (toks.size() != n + 1)
                throw ParseError(lineno, toks[0].column,
                                 std::string(what) + " expects " + std::to_string(n) + " arguments");
        };
        auto check_ref = [&](VertexId id, const Token& t) {
            if (!vids.count(id))
                throw ParseError(lineno, t.column,
                                 "dangling reference: vertex " + std::to_string(id) + " not declared");
        };
        if (kind == "v") {
            need(2, "v");
            VertexId id = parse_uint(toks[1], lineno);
            if (vids.count(id))
                throw ParseError(lineno, toks[1].column,
                                 "duplicate vertex id " + std::to_string(id));
            Rat val;
            try {
                val = Rat::from_decimal(toks[2].text);
            } catch (const std::invalid_argument& e) {
                throw ParseError(lineno, toks[2].column, e.what());
            }
            vids.insert(id);
            k.vertices.push_back({id, val});
        } else if (kind == "f") {
            need(2, "f");
            VertexId a = parse_uint(toks[1], lineno), b = parse_uint(toks[2], lineno);
            check_ref(a, toks[1]);
            check_ref(b, toks[2]);
            if (a == b)
                throw ParseError(lineno, toks[1].column, "degenerate edge: equal endpoints");
            auto key = norm_edge(a, b);
            if (!edge_set.insert(key).second)
                throw ParseError(lineno, toks[0].column, "duplicate edge");
            k.edges.push_back(key);
        } else if (kind == "t") {
            need(3, "t");
            VertexId a = parse_uint(toks[1], lineno), b = parse_uint(toks[2], lineno),
                     c = parse_uint(toks[3], lineno);
            check_ref(a, toks[1]);
            check_ref(b, toks[2]);
            check_ref(c, toks[3]);
            if (a == b || b == c || a == c)
                throw ParseError(lineno, toks[1].column, "degenerate triangle: repeated vertex");
            auto key = norm_tri(a, b, c);
            if (!tri_set.insert(key).second)
                throw ParseError(lineno, toks[0].column, "duplicate triangle");
            for (auto [x, y] : {std::pair(a, b), std::pair(b, c), std::pair(a, c)}) {
                auto ek = norm_edge(x, y);
                if (!edge_set.count(ek)) {
                    if (mode == FaceClosure::strict)
                        throw ParseError(lineno, toks[0].column,
                                         "face-closure violation: edge " + std::to_string(ek.first) +
                                             "-" + std::to_string(ek.second) + " of triangle not declared");
                    edge_set.insert(ek);
                    k.edges.push_back(ek);
                }
            }
            k.triangles.push_back(key);
        } else {
            throw ParseError(lineno, toks[0].column, "unknown directive '" + kind + "'");
        }
    }
    return k;
}

std::string write_complex(const PLComplex& k) {
    std::string out;
    for (const auto& v : k.vertices)
        out += "v " + std::to_string(v.id) + " " + v.value.to_decimal_string() + "\n";
    for (const auto& e : k.edges)
        out += "f " + std::to_string(e.first) + " " + std::to_string(e.second) + "\n";
    for (const auto& t : k.triangles)
        out += "t " + std::to_string(t[0]) + " " + std::to_string(t[1]) + " " +
               std::to_string(t[2]) + "\n";
    return out;
}

namespace {

// Cells of the complex in a fixed linear order: vertices, then edges, then
// triangles.  Each cell knows the min/max of the function over it.
struct CellTable {
    const PLComplex& k;
    std::map<VertexId, int> vidx;
    std::map<std::pair<VertexId, VertexId>, int> eidx;
    int n_v, n_e, n_t;

    explicit CellTable(const PLComplex& kk) : k(kk) {
        for (const auto& v : k.vertices) vidx.emplace(v.id, (int)vidx.size());
        for (const auto& e : k.edges) eidx.emplace(e, (int)eidx.size());
        n_v = (int)k.vertices.size();
        n_e = (int)k.edges.size();
        n_t = (int)k.triangles.size();
    }

    int total() const { return n_v + n_e + n_t; }
    int vertex_cell(VertexId v) const { return vidx.at(v); }
    int edge_cell(int e) const { return n_v + e; }
    int tri_cell(int t) const { return n_v + n_e + t; }

    std::pair<Rat, Rat> range(int cell) const {
        if (cell < n_v) {
            Rat v = k.vertices[cell].value;
            return {v, v};
        }
        if (cell < n_v + n_e) {
            const auto& e = k.edges[cell - n_v];
            Rat a = k.value_of(e.first), b = k.value_of(e.second);
            return {rat_min(a, b), rat_max(a, b)};
        }
        const auto& t = k.triangles[cell - n_v - n_e];
        Rat m = k.value_of(t[0]), M = m;
        for (int i = 1; i < 3; ++i) {
            Rat v = k.value_of(t[i]);
            m = rat_min(m, v);
            M = rat_max(M, v);
        }
        return {m, M};
    }
};

// Path components of the preimage of an open interval.  The preimage meets a
// simplex in a convex (hence connected) piece, and any two pieces intersect
// through a common face, so union-find over present cells joined across
// present facets computes pi_0 exactly.  Bounds may be absent (unbounded).
struct BandComponents {
    std::vector<int> comp_of_cell; // -1 when the cell misses the interval
    int count = 0;

    BandComponents(const CellTable& ct, const std::optional<Rat>& lo, const std::optional<Rat>& hi) {
        const PLComplex& k = ct.k;
        int n = ct.total();
        comp_of_cell.assign(n, -1);
        std::vector<char> present(n, 0);
        for (int c = 0; c < n; ++c) {
            auto [m, M] = ct.range(c);
            bool in = (!lo || M > *lo) && (!hi || m < *hi);
            present[c] = in;
        }
        UnionFind uf(n);
        for (int e = 0; e < ct.n_e; ++e) {
            if (!present[ct.edge_cell(e)]) continue;
            for (VertexId v : {k.edges[e].first, k.edges[e].second})
                if (present[ct.vertex_cell(v)]) uf.unite(ct.edge_cell(e), ct.vertex_cell(v));
        }
        for (int t = 0; t < ct.n_t; ++t) {
            if (!present[ct.tri_cell(t)]) continue;
            const auto& tri = k.triangles[t];
            for (auto [x, y] : {std::pair(tri[0], tri[1]), std::pair(tri[1], tri[2]),
                                std::pair(tri[0], tri[2])}) {
                auto key = x < y ? std::make_pair(x, y) : std::make_pair(y, x);
                int ec = ct.n_v + ct.eidx.at(key);
                if (present[ec]) uf.unite(ct.tri_cell(t), ec);
            }
        }
        std::map<int, int> root_to_comp;
        for (int c = 0; c < n; ++c) {
            if (!present[c]) continue;
            int r = uf.find(c);
            auto [it, fresh] = root_to_comp.emplace(r, count);
            if (fresh) ++count;
            comp_of_cell[c] = it->second;
        }
    }
};

} // namespace

ReebGraph reeb_of_complex(const PLComplex& k) {
    ReebGraph g;
    if (k.vertices.empty()) return g;

    CellTable ct(k);
    std::vector<Rat> levels;
    for (const auto& v : k.vertices) levels.push_back(v.value);
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    int m = (int)levels.size();

    auto opt = [&](int idx) -> std::optional<Rat> {
        if (idx < 0 || idx >= m) return std::nullopt;
        return levels[idx];
    };

    // Bands around each event value and slabs between consecutive events.
    std::vector<BandComponents> bands, slabs;
    bands.reserve(m);
    for (int j = 0; j < m; ++j) bands.emplace_back(ct, opt(j - 1), opt(j + 1));
    slabs.reserve(m - 1);
    for (int i = 0; i + 1 < m; ++i) slabs.emplace_back(ct, opt(i), opt(i + 1));

    // One graph vertex per band component, one edge per slab component.
    std::vector<int> band_base(m, 0);
    VertexId next_v = 0;
    for (int j = 0; j < m; ++j) {
        band_base[j] = (int)next_v;
        for (int c = 0; c < bands[j].count; ++c)
            g.vertices.push_back({next_v++, levels[j]});
    }
    EdgeId next_e = 0;
    for (int i = 0; i + 1 < m; ++i) {
        // representative cell per slab component
        std::vector<int> rep(slabs[i].count, -1);
        for (int c = 0; c < ct.total(); ++c) {
            int sc = slabs[i].comp_of_cell[c];
            if (sc >= 0 && rep[sc] < 0) rep[sc] = c;
        }
        for (int sc = 0; sc < slabs[i].count; ++sc) {
            int cell = rep[sc];
            int lo_comp = bands[i].comp_of_cell[cell];
            int hi_comp = bands[i + 1].comp_of_cell[cell];
            if (lo_comp < 0 || hi_comp < 0)
                throw std::logic_error("slab component not attached to its bounding bands");
            g.edges.push_back({next_e++, band_base[i] + lo_comp, band_base[i + 1] + hi_comp});
        }
    }
    return canonicalize(g).graph;
}

} // namespace reeb
