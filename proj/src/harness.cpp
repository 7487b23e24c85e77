#include "reeb/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <random>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "reeb/cosheaf.hpp"
#include "reeb/distortion.hpp"
#include "reeb/io.hpp"
#include "reeb/persistence.hpp"

namespace reeb {

ReebGraph generate_random_reeb(int n_vertices, int n_loops, uint64_t seed) {
    if (n_vertices < 2) throw std::invalid_argument("generate_random_reeb: need at least 2 vertices");
    if (n_loops < 0) throw std::invalid_argument("generate_random_reeb: negative loop count");
    int64_t max_pairs = (int64_t)n_vertices * (n_vertices - 1) / 2;
    if (n_loops > max_pairs)
        throw std::invalid_argument("generate_random_reeb: more loops than vertex pairs");

    std::mt19937_64 rng(seed);
    ReebGraph g;
    std::set<int64_t> used;
    for (int i = 0; i < n_vertices; ++i) {
        int64_t grid;
        do {
            grid = 1 + (int64_t)(rng() % 4095);
        } while (!used.insert(grid).second);
        g.vertices.push_back({i, Rat(grid, 4096)});
    }
    std::sort(g.vertices.begin(), g.vertices.end(),
              [](const auto& a, const auto& b) { return a.value < b.value; });
    for (int i = 0; i < n_vertices; ++i) g.vertices[i].id = i;

    EdgeId e = 0;
    for (int i = 1; i < n_vertices; ++i)
        g.edges.push_back({e++, (VertexId)(rng() % i), (VertexId)i});
    for (int l = 0; l < n_loops; ++l) {
        int i = (int)(rng() % n_vertices);
        int j = (int)(rng() % (n_vertices - 1));
        if (j >= i) ++j;
        if (i > j) std::swap(i, j); // values are sorted by index
        g.edges.push_back({e++, (VertexId)i, (VertexId)j});
    }
    return canonicalize(g).graph;
}

namespace {

int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

const Rat kSlack(1, 1000000000);

} // namespace

std::vector<SandwichRow> sandwich_report(const std::vector<std::pair<ReebGraph, ReebGraph>>& pairs,
                                         const SandwichParams& params) {
    std::vector<SandwichRow> rows;
    rows.reserve(pairs.size());
    for (size_t p = 0; p < pairs.size(); ++p) {
        const auto& [X, Y] = pairs[p];
        SandwichRow row;
        char buf[32];
        snprintf(buf, sizeof(buf), "pair-%03zu", p);
        row.pair_id = buf;
        row.seed = params.seed;

        int64_t t0 = now_ms();
        row.dI = interleaving_bounds(cosheaf_of(X), cosheaf_of(Y), params.tolerance,
                                     params.decide_budget);
        int64_t t1 = now_ms();

        auto dgx = extended_diagrams(X), dgy = extended_diagrams(Y);
        row.dB0 = bottleneck_distance(dgx.dg0, dgy.dg0);
        row.dB1 = bottleneck_distance(dgx.exdg1, dgy.exdg1);
        int64_t t2 = now_ms();

        UpperBound ub = distortion_upper_bound(X, Y, params.mesh, params.budget,
                                               params.seed + p);
        row.dFD.hi = ub.hi;
        row.dFD.hi_provenance = ub.provenance;
        row.dFD.unbounded = ub.infinite;
        // lower bound from bottleneck stability plus the interleaving enclosure
        row.dFD.lo = rat_max(row.dB0, row.dB1 / Rat(3));
        row.dFD.lo_provenance = row.dB0 >= row.dB1 / Rat(3)
                                    ? "bottleneck distance of the dimension-0 diagrams"
                                    : "bottleneck distance of the cycle diagrams over 3";
        if (!row.dI.undecided && !row.dI.unbounded && row.dI.lo > row.dFD.lo) {
            row.dFD.lo = row.dI.lo;
            row.dFD.lo_provenance = "interleaving distance lower bound";
        }
        row.dFD.undecided = row.dI.undecided;
        int64_t t3 = now_ms();

        if (params.timed) {
            row.ms_dI = t1 - t0;
            row.ms_dB = t2 - t1;
            row.ms_dFD = t3 - t2;
        }

        if (row.dI.unbounded || row.dFD.unbounded) {
            // no finite distance on either side: every inequality holds vacuously
            row.c1 = row.c2 = row.c3 = row.c4 = row.c5 = true;
            row.status = row.dI.unbounded == row.dFD.unbounded ? "ok" : "undecided";
        } else {
            row.c1 = row.dI.lo <= row.dFD.hi + kSlack;
            row.c2 = row.dFD.lo <= Rat(7) * row.dI.hi + kSlack;
            row.c3 = row.dB0 <= row.dFD.hi + kSlack;
            row.c4 = row.dB1 <= Rat(3) * row.dFD.hi + kSlack;
            row.c5 = row.dB0 <= Rat(7) * row.dI.hi + kSlack &&
                     row.dB1 <= Rat(21) * row.dI.hi + kSlack;
            row.status = row.dI.undecided ? "undecided" : "ok";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sandwich_csv(const std::vector<SandwichRow>& rows, bool timestamp) {
    std::string out;
    if (timestamp) {
        auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[64];
        std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
        out += std::string("# generated ") + buf + "Z\n";
    }
    out += "pair,dI_lo,dI_hi,dFD_lo,dFD_hi,dB0,dB1,c1,c2,c3,c4,c5,status,seed,ms_dI,ms_dFD,ms_dB\n";
    for (const auto& r : rows) {
        auto num = [](const Rat& v, bool unbounded) {
            return unbounded ? std::string("inf") : v.to_decimal_string();
        };
        out += r.pair_id + "," + num(r.dI.lo, false) + "," + num(r.dI.hi, r.dI.unbounded) + "," +
               num(r.dFD.lo, false) + "," + num(r.dFD.hi, r.dFD.unbounded) + "," +
               r.dB0.to_decimal_string() + "," + r.dB1.to_decimal_string() + "," +
               std::to_string(r.c1) + "," + std::to_string(r.c2) + "," + std::to_string(r.c3) +
               "," + std::to_string(r.c4) + "," + std::to_string(r.c5) + "," + r.status + "," +
               std::to_string(r.seed) + "," + std::to_string(r.ms_dI) + "," +
               std::to_string(r.ms_dFD) + "," + std::to_string(r.ms_dB) + "\n";
    }
    return out;
}

std::string sandwich_json(const std::vector<SandwichRow>& rows,
                          const std::vector<std::pair<ReebGraph, ReebGraph>>& pairs,
                          const SandwichParams& params) {
    nlohmann::json j = nlohmann::json::array();
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        nlohmann::json row;
        row["pair"] = r.pair_id;
        row["dI"] = {{"lo", r.dI.lo.to_fraction_string()},
                     {"hi", r.dI.hi.to_fraction_string()},
                     {"lo_provenance", r.dI.lo_provenance},
                     {"hi_provenance", r.dI.hi_provenance},
                     {"undecided", r.dI.undecided},
                     {"unbounded", r.dI.unbounded}};
        row["dFD"] = {{"lo", r.dFD.lo.to_fraction_string()},
                      {"hi", r.dFD.hi.to_fraction_string()},
                      {"lo_provenance", r.dFD.lo_provenance},
                      {"hi_provenance", r.dFD.hi_provenance},
                      {"undecided", r.dFD.undecided},
                      {"unbounded", r.dFD.unbounded}};
        row["dB0"] = r.dB0.to_fraction_string();
        row["dB1"] = r.dB1.to_fraction_string();
        row["checks"] = {{"c1", r.c1}, {"c2", r.c2}, {"c3", r.c3}, {"c4", r.c4}, {"c5", r.c5}};
        row["status"] = r.status;
        if (!r.all_checks() && i < pairs.size()) {
            // falsification candidate: attach full certificates for replay
            const auto& [X, Y] = pairs[i];
            UpperBound ub =
                distortion_upper_bound(X, Y, params.mesh, params.budget, params.seed + i);
            row["distortion_pair"] = nlohmann::json::parse(
                write_map_pair_json(X, Y, ub.phi, ub.psi, ub.eval));
            if (!r.dI.unbounded) {
                auto d = decide_interleaving(cosheaf_of(X), cosheaf_of(Y), r.dI.hi,
                                             params.decide_budget);
                if (d.certificate)
                    row["interleaving_certificate"] =
                        nlohmann::json::parse(write_certificate_json(*d.certificate));
            }
        }
        j.push_back(row);
    }
    return j.dump(2) + "\n";
}

bool has_falsification(const std::vector<SandwichRow>& rows) {
    for (const auto& r : rows)
        if (!r.all_checks()) return true;
    return false;
}

bool has_undecided(const std::vector<SandwichRow>& rows) {
    for (const auto& r : rows)
        if (r.status == "undecided") return true;
    return false;
}

} // namespace reeb
