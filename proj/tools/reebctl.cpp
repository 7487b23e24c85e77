// reebctl: command-line front end for the Reeb graph distance toolkit.

#include <algorithm>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "reeb/cosheaf.hpp"
#include "reeb/distortion.hpp"
#include "reeb/harness.hpp"
#include "reeb/intrinsic_metric.hpp"
#include "reeb/io.hpp"
#include "reeb/persistence.hpp"
#include "reeb/pl_complex.hpp"
#include "reeb/smoothing.hpp"

using namespace reeb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitFalsified = 3;

GraphPoint parse_point(const ReebGraph& g, const std::string& text) {
    if (text.size() < 2) throw std::invalid_argument("bad point '" + text + "'");
    if (text[0] == 'v') {
        GraphPoint p = GraphPoint::at_vertex(std::stoll(text.substr(1)));
        if (!point_exists(g, p)) throw std::invalid_argument("no vertex " + text.substr(1));
        return p;
    }
    if (text[0] == 'e') {
        size_t colon = text.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("edge point must look like e<id>:<s>");
        EdgeId id = std::stoll(text.substr(1, colon - 1));
        Rat s = Rat::from_decimal(text.substr(colon + 1));
        GraphPoint p = GraphPoint::on(id, s);
        if (!point_exists(g, p))
            throw std::invalid_argument("no edge point " + text + " (parameter must be in (0,1))");
        return p;
    }
    throw std::invalid_argument("point must look like v<id> or e<id>:<s>");
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reeb graph distances: smoothing, interleavings, functional distortion,\n"
                 "extended persistence, and the inequality-sandwich experiment."};
    app.require_subcommand(1);

    // validate
    std::string val_file;
    auto* cmd_validate = app.add_subcommand("validate", "check a .reeb or .plc file");
    cmd_validate->add_option("file", val_file)->required();

    // reeb
    std::string reeb_in, reeb_out;
    bool lenient = false;
    auto* cmd_reeb = app.add_subcommand("reeb", "Reeb graph of a PL complex");
    cmd_reeb->add_option("input", reeb_in)->required();
    cmd_reeb->add_option("-o,--output", reeb_out)->required();
    cmd_reeb->add_flag("--lenient", lenient, "auto-complete missing faces");

    // smooth
    std::string smooth_in, smooth_out, smooth_eps;
    auto* cmd_smooth = app.add_subcommand("smooth", "epsilon-smoothing of a Reeb graph");
    cmd_smooth->add_option("input", smooth_in)->required();
    cmd_smooth->add_option("--epsilon", smooth_eps)->required();
    cmd_smooth->add_option("-o,--output", smooth_out)->required();

    // df
    std::string df_in, df_from, df_to;
    auto* cmd_df = app.add_subcommand("df", "path-height distance between two points");
    cmd_df->add_option("input", df_in)->required();
    cmd_df->add_option("--from", df_from)->required();
    cmd_df->add_option("--to", df_to)->required();

    // diagram
    std::string diag_in, diag_out;
    auto* cmd_diag = app.add_subcommand("diagram", "extended persistence diagrams");
    cmd_diag->add_option("input", diag_in)->required();
    cmd_diag->add_option("-o,--output", diag_out)->required();

    // bottleneck
    std::string bn_a, bn_b, bn_class = "dim0";
    auto* cmd_bn = app.add_subcommand("bottleneck", "bottleneck distance of two diagram files");
    cmd_bn->add_option("a", bn_a)->required();
    cmd_bn->add_option("b", bn_b)->required();
    cmd_bn->add_option("--class", bn_class, "dim0 or ext1")->capture_default_str();

    // interleave
    std::string il_a, il_b, il_eps, il_tol, il_cert;
    uint64_t il_budget = 10000000;
    auto* cmd_il = app.add_subcommand("interleave", "decide or enclose the interleaving distance");
    cmd_il->add_option("a", il_a)->required();
    cmd_il->add_option("b", il_b)->required();
    auto* il_eps_opt = cmd_il->add_option("--epsilon", il_eps, "decide at this epsilon");
    auto* il_tol_opt = cmd_il->add_option("--tol", il_tol, "enclose to this width");
    il_eps_opt->excludes(il_tol_opt);
    cmd_il->add_option("--budget", il_budget, "search-node budget")->capture_default_str();
    cmd_il->add_option("--certificate", il_cert, "write the witness tables as JSON");

    // fdd
    std::string fdd_a, fdd_b, fdd_mesh = "0.25", fdd_tol = "0.001", fdd_out;
    int64_t fdd_budget = 200;
    uint64_t fdd_seed = 0, fdd_decide_budget = 10000000;
    auto* cmd_fdd = app.add_subcommand("fdd", "certified bounds on the functional distortion distance");
    cmd_fdd->add_option("a", fdd_a)->required();
    cmd_fdd->add_option("b", fdd_b)->required();
    cmd_fdd->add_option("--mesh", fdd_mesh)->capture_default_str();
    cmd_fdd->add_option("--budget", fdd_budget)->capture_default_str();
    cmd_fdd->add_option("--seed", fdd_seed)->capture_default_str();
    cmd_fdd->add_option("--tol", fdd_tol, "interleaving tolerance for the lower bound")
        ->capture_default_str();
    cmd_fdd->add_option("--decide-budget", fdd_decide_budget)->capture_default_str();
    cmd_fdd->add_option("-o,--output", fdd_out, "write the certifying map pair as JSON");

    // gen
    int gen_vertices = 6, gen_loops = 1;
    uint64_t gen_seed = 0;
    std::string gen_out;
    auto* cmd_gen = app.add_subcommand("gen", "generate a random Reeb graph");
    cmd_gen->add_option("--vertices", gen_vertices)->capture_default_str();
    cmd_gen->add_option("--loops", gen_loops)->capture_default_str();
    cmd_gen->add_option("--seed", gen_seed)->capture_default_str();
    cmd_gen->add_option("-o,--output", gen_out)->required();

    // sandwich
    int sw_trials = 10, sw_max_vertices = 8, sw_max_loops = 2;
    uint64_t sw_seed = 0, sw_decide_budget = 10000000;
    std::string sw_tol = "0.001", sw_mesh = "0.25", sw_out, sw_json;
    int64_t sw_budget = 200;
    bool sw_no_timestamp = false;
    auto* cmd_sw = app.add_subcommand("sandwich", "inequality-sandwich experiment on random pairs");
    cmd_sw->add_option("--trials", sw_trials)->capture_default_str();
    cmd_sw->add_option("--seed", sw_seed)->capture_default_str();
    cmd_sw->add_option("--tol", sw_tol)->capture_default_str();
    cmd_sw->add_option("--mesh", sw_mesh)->capture_default_str();
    cmd_sw->add_option("--budget", sw_budget)->capture_default_str();
    cmd_sw->add_option("--decide-budget", sw_decide_budget)->capture_default_str();
    cmd_sw->add_option("--max-vertices", sw_max_vertices)->capture_default_str();
    cmd_sw->add_option("--max-loops", sw_max_loops)->capture_default_str();
    cmd_sw->add_option("-o,--output", sw_out, "CSV report path")->required();
    cmd_sw->add_option("--json", sw_json, "JSON certificate sidecar path");
    cmd_sw->add_flag("--no-timestamp", sw_no_timestamp,
                     "suppress the timestamp header and runtime columns (byte-identical reruns)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_validate) {
            if (ends_with(val_file, ".plc")) {
                parse_complex(load_file(val_file));
                std::cout << "ok\n";
                return kExitOk;
            }
            ReebGraph g = read_reeb(load_file(val_file));
            auto rep = validate(g);
            if (rep.ok()) {
                std::cout << "ok\n";
                return kExitOk;
            }
            for (const auto& v : rep.violations)
                std::cout << v.rule << ": " << v.message << "\n";
            return kExitInput;
        }
        if (*cmd_reeb) {
            auto k = parse_complex(load_file(reeb_in),
                                   lenient ? FaceClosure::lenient : FaceClosure::strict);
            save_file(reeb_out, write_reeb(reeb_of_complex(k)));
            return kExitOk;
        }
        if (*cmd_smooth) {
            ReebGraph g = canonicalize(load_reeb_file(smooth_in)).graph;
            save_file(smooth_out, write_reeb(smooth(g, Rat::from_decimal(smooth_eps))));
            return kExitOk;
        }
        if (*cmd_df) {
            ReebGraph g = load_reeb_file(df_in);
            auto d = path_height_distance(g, parse_point(g, df_from), parse_point(g, df_to));
            std::cout << (d ? d->to_decimal_string() : "disconnected") << "\n";
            return kExitOk;
        }
        if (*cmd_diag) {
            ReebGraph g = canonicalize(load_reeb_file(diag_in)).graph;
            save_file(diag_out, write_diagrams_json(extended_diagrams(g)));
            return kExitOk;
        }
        if (*cmd_bn) {
            auto a = select_class(read_diagram_json(load_file(bn_a)), bn_class);
            auto b = select_class(read_diagram_json(load_file(bn_b)), bn_class);
            std::cout << bottleneck_distance(a, b).to_decimal_string() << "\n";
            return kExitOk;
        }
        if (*cmd_il) {
            auto F = cosheaf_of(canonicalize(load_reeb_file(il_a)).graph);
            auto G = cosheaf_of(canonicalize(load_reeb_file(il_b)).graph);
            if (!il_eps.empty()) {
                auto d = decide_interleaving(F, G, Rat::from_decimal(il_eps), il_budget);
                switch (d.outcome) {
                    case Decision::yes:
                        std::cout << "yes\n";
                        if (!il_cert.empty())
                            save_file(il_cert, write_certificate_json(*d.certificate));
                        return kExitOk;
                    case Decision::no:
                        std::cout << "no\n";
                        return kExitOk;
                    case Decision::undecided:
                        std::cout << "undecided: budget exceeded\n";
                        return kExitUndecided;
                }
            }
            if (il_tol.empty()) {
                std::cerr << "interleave: one of --epsilon or --tol is required\n";
                return kExitInput;
            }
            auto b = interleaving_bounds(F, G, Rat::from_decimal(il_tol), il_budget);
            if (b.unbounded) {
                std::cout << "dI = infinity (" << b.lo_provenance << ")\n";
                return kExitOk;
            }
            std::cout << "dI in [" << b.lo.to_decimal_string() << ", "
                      << b.hi.to_decimal_string() << "]\n";
            if (!il_cert.empty()) {
                auto d = decide_interleaving(F, G, b.hi, il_budget);
                if (d.certificate) save_file(il_cert, write_certificate_json(*d.certificate));
            }
            return b.undecided ? kExitUndecided : kExitOk;
        }
        if (*cmd_fdd) {
            ReebGraph X = canonicalize(load_reeb_file(fdd_a)).graph;
            ReebGraph Y = canonicalize(load_reeb_file(fdd_b)).graph;
            auto lb = distortion_lower_bound(X, Y, Rat::from_decimal(fdd_tol), fdd_decide_budget);
            auto ub = distortion_upper_bound(X, Y, Rat::from_decimal(fdd_mesh), fdd_budget,
                                             fdd_seed);
            if (lb.unbounded || ub.infinite) {
                std::cout << "dFD = infinity (" << lb.provenance << ")\n";
                return kExitOk;
            }
            std::cout << "dFD in [" << lb.lo.to_decimal_string() << ", "
                      << ub.hi.to_decimal_string() << "]\n";
            std::cout << "lower: " << lb.provenance << "\n";
            std::cout << "upper: " << ub.provenance << "\n";
            if (!fdd_out.empty())
                save_file(fdd_out, write_map_pair_json(X, Y, ub.phi, ub.psi, ub.eval));
            return lb.undecided ? kExitUndecided : kExitOk;
        }
        if (*cmd_gen) {
            save_file(gen_out, write_reeb(generate_random_reeb(gen_vertices, gen_loops, gen_seed)));
            return kExitOk;
        }
        if (*cmd_sw) {
            std::mt19937_64 rng(sw_seed);
            std::vector<std::pair<ReebGraph, ReebGraph>> pairs;
            for (int t = 0; t < sw_trials; ++t) {
                auto draw = [&]() {
                    int nv = 2 + (int)(rng() % (uint64_t)(sw_max_vertices - 1));
                    int nl = (int)(rng() % (uint64_t)(sw_max_loops + 1));
                    nl = std::min(nl, nv * (nv - 1) / 2);
                    uint64_t sub_seed = rng();
                    return generate_random_reeb(nv, nl, sub_seed);
                };
                auto a = draw(), b = draw();
                pairs.push_back({a, b});
            }
            SandwichParams params;
            params.tolerance = Rat::from_decimal(sw_tol);
            params.mesh = Rat::from_decimal(sw_mesh);
            params.budget = sw_budget;
            params.decide_budget = sw_decide_budget;
            params.seed = sw_seed;
            params.timed = !sw_no_timestamp;
            auto rows = sandwich_report(pairs, params);
            save_file(sw_out, sandwich_csv(rows, !sw_no_timestamp));
            if (!sw_json.empty()) save_file(sw_json, sandwich_json(rows, pairs, params));
            int64_t bad = 0, undecided = 0;
            for (const auto& r : rows) {
                if (!r.all_checks()) ++bad;
                if (r.status == "undecided") ++undecided;
            }
            std::cout << rows.size() << " pairs, " << bad << " falsification rows, " << undecided
                      << " undecided\n";
            if (bad > 0) return kExitFalsified;
            if (undecided > 0) return kExitUndecided;
            return kExitOk;
        }
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
