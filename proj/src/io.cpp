#include "reeb/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace reeb {

using nlohmann::json;

ReebGraph read_reeb(std::string_view text) {
    ReebGraph g;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    std::set<VertexId> vids;
    EdgeId next_edge = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comment
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string kind;
        if (!(ls >> kind)) continue;
        if (kind == "v") {
            std::string id_s, val_s;
            if (!(ls >> id_s >> val_s)) throw ParseError(lineno, 1, "v expects <id> <value>");
            VertexId id;
            try {
                id = std::stoll(id_s);
            } catch (...) {
                throw ParseError(lineno, 3, "bad vertex id '" + id_s + "'");
            }
            if (id < 0) throw ParseError(lineno, 3, "vertex id must be nonnegative");
            if (!vids.insert(id).second)
                throw ParseError(lineno, 3, "duplicate vertex id " + std::to_string(id));
            Rat val;
            try {
                val = Rat::from_decimal(val_s);
            } catch (const std::invalid_argument& e) {
                throw ParseError(lineno, 3, e.what());
            }
            g.vertices.push_back({id, val});
        } else if (kind == "e") {
            std::string lo_s, hi_s;
            if (!(ls >> lo_s >> hi_s)) throw ParseError(lineno, 1, "e expects <lower-id> <upper-id>");
            VertexId lo, hi;
            try {
                lo = std::stoll(lo_s);
                hi = std::stoll(hi_s);
            } catch (...) {
                throw ParseError(lineno, 3, "bad edge endpoints");
            }
            for (VertexId end : {lo, hi})
                if (!vids.count(end))
                    throw ParseError(lineno, 3,
                                     "dangling reference: vertex " + std::to_string(end) +
                                         " not declared");
            if (!(g.value_of(lo) < g.value_of(hi)))
                throw ParseError(lineno, 3,
                                 "non-monotone edge: value(" + std::to_string(lo) +
                                     ") must be strictly below value(" + std::to_string(hi) + ")");
            g.edges.push_back({next_edge++, lo, hi});
        } else {
            throw ParseError(lineno, 1, "unknown directive '" + kind + "'");
        }
        std::string extra;
        if (ls >> extra) throw ParseError(lineno, 1, "trailing tokens on line");
    }
    return g;
}

std::string write_reeb(const ReebGraph& g) {
    std::string out;
    for (const auto& v : g.vertices)
        out += "v " + std::to_string(v.id) + " " + v.value.to_decimal_string() + "\n";
    // edge lines in edge-id order so parallel edges stay distinguishable
    std::vector<ReebGraph::Edge> edges = g.edges;
    std::sort(edges.begin(), edges.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& e : edges)
        out += "e " + std::to_string(e.lower) + " " + std::to_string(e.upper) + "\n";
    return out;
}

ReebGraph load_reeb_file(const std::string& path) { return read_reeb(load_file(path)); }

std::string load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void save_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
}

Rat rat_from_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return Rat::from_decimal(std::string_view(buf, res.ptr - buf));
}

namespace {

const char* kind_name(PairKind k) {
    switch (k) {
        case PairKind::ordinary: return "ord";
        case PairKind::extended: return "ext";
        case PairKind::relative: return "rel";
    }
    return "ord";
}

PairKind kind_from(const std::string& s) {
    if (s == "ord") return PairKind::ordinary;
    if (s == "ext") return PairKind::extended;
    if (s == "rel") return PairKind::relative;
    throw std::invalid_argument("unknown pair kind '" + s + "'");
}

json point_to_json(const PersistencePoint& p) {
    return json{{"dim", p.dimension},
                {"kind", kind_name(p.kind)},
                {"birth", p.birth.to_double()},
                {"death", p.death.to_double()}};
}

} // namespace

std::string write_diagrams_json(const ExtendedDiagrams& d) {
    json points = json::array();
    for (const auto& p : d.dg0.points) points.push_back(point_to_json(p));
    for (const auto& p : d.exdg1.points) points.push_back(point_to_json(p));
    return json{{"points", points}}.dump(2) + "\n";
}

PersistenceDiagram read_diagram_json(std::string_view text) {
    json j = json::parse(text);
    PersistenceDiagram d;
    for (const auto& p : j.at("points")) {
        PersistencePoint pt;
        pt.dimension = p.at("dim").get<int>();
        pt.kind = kind_from(p.at("kind").get<std::string>());
        pt.birth = rat_from_double(p.at("birth").get<double>());
        pt.death = rat_from_double(p.at("death").get<double>());
        d.points.push_back(pt);
    }
    return d;
}

PersistenceDiagram select_class(const PersistenceDiagram& d, const std::string& cls) {
    PersistenceDiagram out;
    for (const auto& p : d.points) {
        if (cls == "dim0" && p.dimension == 0) out.points.push_back(p);
        if (cls == "ext1" && p.dimension == 1 && p.kind == PairKind::extended)
            out.points.push_back(p);
    }
    if (cls != "dim0" && cls != "ext1")
        throw std::invalid_argument("unknown diagram class '" + cls + "' (dim0 or ext1)");
    return out;
}

std::string write_certificate_json(const InterleavingCertificate& cert) {
    json j;
    j["epsilon"] = cert.epsilon.to_fraction_string();
    json grid = json::array();
    for (const Rat& t : cert.grid) grid.push_back(t.to_fraction_string());
    j["grid"] = grid;
    j["phi"] = {{"strata", cert.phi_strata}, {"bands", cert.phi_bands}};
    j["psi"] = {{"strata", cert.psi_strata}, {"bands", cert.psi_bands}};
    return j.dump(2) + "\n";
}

InterleavingCertificate read_certificate_json(std::string_view text) {
    json j = json::parse(text);
    InterleavingCertificate cert;
    cert.epsilon = Rat::from_fraction_string(j.at("epsilon").get<std::string>());
    for (const auto& t : j.at("grid"))
        cert.grid.push_back(Rat::from_fraction_string(t.get<std::string>()));
    cert.phi_strata = j.at("phi").at("strata").get<std::vector<std::vector<int>>>();
    cert.phi_bands = j.at("phi").at("bands").get<std::vector<std::vector<int>>>();
    cert.psi_strata = j.at("psi").at("strata").get<std::vector<std::vector<int>>>();
    cert.psi_bands = j.at("psi").at("bands").get<std::vector<std::vector<int>>>();
    return cert;
}

namespace {

json point_json(const ReebGraph& g, const GraphPoint& p) {
    if (!p.on_edge) return json{{"v", p.vertex}};
    (void)g;
    return json{{"e", p.edge}, {"s", p.param.to_fraction_string()}};
}

json map_json(const ReebGraph& src, const ReebGraph& dst, const SubdividedMap& m) {
    json j;
    json nodes = json::array();
    for (const auto& p : m.source_nodes) nodes.push_back(point_json(src, p));
    j["source_nodes"] = nodes;
    j["source_cells"] = m.source_cells;
    json targets = json::array();
    for (const auto& p : m.target_nodes) targets.push_back(point_json(dst, p));
    j["target_nodes"] = targets;
    j["assignment"] = m.assignment;
    j["routes"] = m.routes;
    return j;
}

} // namespace

std::string write_map_pair_json(const ReebGraph& X, const ReebGraph& Y, const SubdividedMap& phi,
                                const SubdividedMap& psi, const PairEvaluation& eval) {
    json j;
    j["phi"] = map_json(X, Y, phi);
    j["psi"] = map_json(Y, X, psi);
    j["distortion"] = eval.distortion.to_fraction_string();
    j["sup_fg"] = eval.sup_fg.to_fraction_string();
    j["sup_gf"] = eval.sup_gf.to_fraction_string();
    j["objective"] = eval.objective.to_fraction_string();
    j["mesh_error"] = eval.mesh_error.to_fraction_string();
    return j.dump(2) + "\n";
}

} // namespace reeb
