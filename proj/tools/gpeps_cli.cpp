#include "gpeps/analysis.hpp"
#include "gpeps/bp.hpp"
#include "gpeps/checkpoint.hpp"
#include "gpeps/errors.hpp"
#include "gpeps/oracle.hpp"
#include "gpeps/peps.hpp"
#include "gpeps/svgplot.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

using namespace gpeps;

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot open " + path + " for writing");
    out << content;
    if (!out) throw InvalidArgument("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<double> parse_thetas(const std::vector<std::string>& specs) {
    std::vector<double> out;
    for (const auto& s : specs) {
        if (s.rfind("grid:", 0) == 0) {
            for (double t : theta_grid(std::stoi(s.substr(5)))) out.push_back(t);
        } else {
            out.push_back(std::stod(s));
        }
    }
    return out;
}

Graph graph_for(const std::string& size) {
    if (size == "eagle127") return build_heavy_hex(HeavyHexSize::Eagle127);
    if (size == "osprey433") return build_heavy_hex(HeavyHexSize::Osprey433);
    if (size == "condor1121") return build_heavy_hex(HeavyHexSize::Condor1121);
    if (size.rfind("fixture:", 0) == 0) return fixture(size.substr(8));
    throw InvalidArgument("unknown or non-finite size: " + size);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::istringstream in(read_file(path));
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw InvalidArgument("bad config line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const auto end = s.find(sep, pos);
        const std::string item = s.substr(pos, end == std::string::npos ? end : end - pos);
        if (!item.empty()) out.push_back(item);
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return out;
}

/// Extract a (theta, value) series from result rows after filtering.
Series series_from(const std::vector<ResultRecord>& rows, const std::string& obs,
                   std::size_t chi) {
    Series out;
    for (const auto& r : rows) {
        if (!obs.empty() && r.observable != obs) continue;
        if (chi != 0 && r.chi != chi) continue;
        out.push_back({r.theta_h, r.value});
    }
    if (out.empty()) throw InvalidArgument("no rows left after filtering");
    return out;
}

int cmd_lattice(const std::string& size, const std::string& out_path) {
    Graph g = graph_for(size);
    const std::string text = export_edge_list(g);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
    std::cerr << "n=" << g.n << " m=" << g.edges.size() << " max_degree=" << max_degree(g)
              << " girth=" << girth(g) << "\n";
    return 0;
}

int cmd_simulate(SweepPlan plan, const std::string& out_csv, const std::string& out_json) {
    // validate everything before computing
    for (const auto& o : plan.observables) (void)parse_observable(o);
    if (plan.thetas.empty()) throw InvalidArgument("no theta values given");
    if (plan.chis.empty()) throw InvalidArgument("no chi values given");
    if (plan.observables.empty()) throw InvalidArgument("no observables given");

    const auto records = run_sweep(plan);
    const std::uint64_t hash = config_hash(plan);
    const std::string csv = to_csv(records, hash);
    if (out_csv.empty())
        std::cout << csv;
    else
        write_file(out_csv, csv);
    if (!out_json.empty()) write_file(out_json, to_json(records, hash));
    for (const auto& r : records)
        if (r.failed) {
            std::cerr << "point failed: theta=" << format_double(r.theta_h) << " chi=" << r.chi
                      << " obs=" << r.observable << ": " << r.error << "\n";
        }
    return std::any_of(records.begin(), records.end(),
                       [](const ResultRecord& r) { return r.failed; })
               ? 1
               : 0;
}

int cmd_compare(const std::string& test_path, const std::string& ref_path, const std::string& obs,
                std::size_t chi, const std::string& out_path) {
    const Series test = series_from(parse_result_csv(read_file(test_path)), obs, chi);
    Series ref;
    const std::string ref_text = read_file(ref_path);
    try {
        ref = series_from(parse_result_csv(ref_text), obs, 0);
    } catch (const InvalidArgument&) {
        ref = parse_xy_csv(ref_text); // plain theta_h,value reference
    }
    const Series err = abs_error_curve(test, ref);
    std::ostringstream out;
    out << "theta_h,abs_error\n";
    double mx = 0.0, mean = 0.0;
    for (const auto& [t, e] : err) {
        out << format_double(t) << ',' << format_double(e) << "\n";
        mx = std::max(mx, e);
        mean += e;
    }
    mean /= double(err.size());
    if (out_path.empty())
        std::cout << out.str();
    else
        write_file(out_path, out.str());
    std::cout << "summary max=" << format_double(mx) << " mean=" << format_double(mean) << "\n";
    return 0;
}

int cmd_extrapolate(const std::string& path, int k, const std::string& obs, double theta,
                    bool has_theta, const std::string& svg_path) {
    const auto rows = parse_result_csv(read_file(path));
    std::map<std::size_t, double> by_chi;
    for (const auto& r : rows) {
        if (!obs.empty() && r.observable != obs) continue;
        if (has_theta && std::abs(r.theta_h - theta) > 1e-12) continue;
        if (r.failed) continue;
        if (by_chi.count(r.chi)) throw InvalidArgument("duplicate chi after filtering; add --obs/--theta filters");
        by_chi[r.chi] = r.value;
    }
    ChiSeries series;
    for (const auto& [c, v] : by_chi) series.points.push_back({c, v});
    const ChiFit fit = extrapolate_chi(series, k);
    std::cout << "intercept=" << format_double(fit.intercept)
              << " slope=" << format_double(fit.slope)
              << " residual=" << format_double(fit.residual) << "\n";
    if (!svg_path.empty()) {
        PlotSeries pts{"data", {}, false}, line{"fit", {}, true};
        for (const auto& [c, v] : series.points) pts.points.push_back({1.0 / double(c), v});
        line.points.push_back({0.0, fit.intercept});
        const double xmax = 1.0 / double(series.points.front().first);
        line.points.push_back({xmax, fit.intercept + fit.slope * xmax});
        write_file(svg_path, render_svg({pts, line}, "finite-entanglement scaling", "1/chi", "value"));
    }
    return 0;
}

int cmd_plot(const std::string& path, const std::string& x_col, const std::string& y_col,
             const std::string& out_path) {
    if (x_col != "theta_h" && x_col != "inv_chi") throw InvalidArgument("unknown x column: " + x_col);
    if (y_col != "value" && y_col != "max_trunc_err") throw InvalidArgument("unknown y column: " + y_col);
    const auto rows = parse_result_csv(read_file(path));
    std::map<std::string, PlotSeries> groups;
    for (const auto& r : rows) {
        if (r.failed) continue;
        std::string key = r.size + " chi=" + std::to_string(r.chi) + " " + r.observable;
        auto& s = groups[key];
        s.label = key;
        const double x = x_col == "theta_h" ? r.theta_h : 1.0 / double(r.chi);
        s.points.push_back({x, y_col == "value" ? r.value : r.max_trunc_err});
    }
    std::vector<PlotSeries> series;
    for (auto& [k, s] : groups) series.push_back(std::move(s));
    write_file(out_path, render_svg(series, "gpeps results", x_col, y_col));
    return 0;
}

int cmd_oracle(const std::string& size, const std::vector<std::string>& theta_specs, int steps,
               const std::vector<std::string>& obs, const std::string& out_path) {
    Graph g = graph_for(size);
    std::vector<Observable> parsed;
    for (const auto& o : obs) parsed.push_back(parse_observable(o));
    std::vector<ResultRecord> records;
    for (double theta : parse_thetas(theta_specs)) {
        StateVector sv = evolve_exact(g, theta, steps, Direction::Forward);
        for (std::size_t i = 0; i < parsed.size(); ++i) {
            const Observable& ob = parsed[i];
            ResultRecord r;
            r.size = size;
            r.theta_h = theta;
            r.steps = steps;
            r.chi = 0; // exact
            r.observable = obs[i];
            switch (ob.kind) {
                case Observable::Kind::AverageZ: {
                    double s = 0.0;
                    for (int v = 0; v < g.n; ++v) s += expect_pauli(sv, {{v, Pauli::Z}});
                    r.value = s / g.n;
                    break;
                }
                case Observable::Kind::SingleZ:
                    r.site = ob.site;
                    r.value = expect_pauli(sv, {{ob.site, Pauli::Z}});
                    break;
                case Observable::Kind::SingleX:
                    r.site = ob.site;
                    r.value = expect_pauli(sv, {{ob.site, Pauli::X}});
                    break;
                case Observable::Kind::SingleY:
                    r.site = ob.site;
                    r.value = expect_pauli(sv, {{ob.site, Pauli::Y}});
                    break;
                case Observable::Kind::PauliStr:
                    r.value = expect_pauli(sv, ob.string);
                    break;
                case Observable::Kind::CliffordWeightN:
                    throw InvalidArgument(
                        "weight-N anchors are not defined on oracle-sized graphs; use pauli: or "
                        "z@SITE");
            }
            records.push_back(std::move(r));
        }
    }
    const std::string csv = to_csv(records, 0);
    if (out_path.empty())
        std::cout << csv;
    else
        write_file(out_path, csv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph PEPS simulator for kicked-Ising dynamics on heavy-hexagon lattices"};
    app.require_subcommand(1);

    // lattice
    auto* lat = app.add_subcommand("lattice", "export a coupling graph as an edge list");
    std::string lat_size = "eagle127", lat_out;
    lat->add_option("--size", lat_size, "eagle127|osprey433|condor1121|fixture:<name>");
    lat->add_option("--out", lat_out, "output path (stdout when omitted)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "evolve and measure with the gPEPS engine");
    std::string sim_config, sim_out, sim_json;
    std::vector<std::string> sim_thetas, sim_obs;
    SweepPlan plan;
    sim->add_option("--config", sim_config, "key=value config file; flags override");
    auto* o_size = sim->add_option("--size", plan.size, "lattice size token");
    auto* o_theta =
        sim->add_option("--theta", sim_thetas, "theta value(s) or grid:<count>")->delimiter(',');
    auto* o_steps = sim->add_option("--steps", plan.steps, "trotter steps");
    auto* o_chi = sim->add_option("--chi", plan.chis, "bond dimension(s)")->delimiter(',');
    auto* o_obs = sim->add_option("--obs", sim_obs, "observables (repeatable)");
    auto* o_bp = sim->add_flag("--bp", plan.bp, "re-gauge with belief propagation each step");
    auto* o_bp_tol = sim->add_option("--bp-tol", plan.bp_tol, "BP convergence tolerance");
    auto* o_bp_iters = sim->add_option("--bp-iters", plan.bp_iters, "BP iteration cap");
    auto* o_threads = sim->add_option("--threads", plan.threads, "parallel sweep points");
    sim->add_option("--out", sim_out, "CSV output path (stdout when omitted)");
    sim->add_option("--json", sim_json, "JSON mirror output path");

    // compare
    auto* cmp = app.add_subcommand("compare", "absolute error curve between two result files");
    std::string cmp_test, cmp_ref, cmp_obs, cmp_out;
    std::size_t cmp_chi = 0;
    cmp->add_option("--test", cmp_test)->required();
    cmp->add_option("--reference", cmp_ref)->required();
    cmp->add_option("--obs", cmp_obs, "restrict both files to one observable");
    cmp->add_option("--chi", cmp_chi, "restrict the test file to one chi");
    cmp->add_option("--out", cmp_out, "error-curve CSV path (stdout when omitted)");

    // extrapolate
    auto* ext = app.add_subcommand("extrapolate", "linear fit of value against 1/chi");
    std::string ext_in, ext_obs, ext_svg;
    int ext_k = 5;
    double ext_theta = 0.0;
    ext->add_option("--input", ext_in)->required();
    ext->add_option("--k", ext_k, "fit window: k largest chi");
    ext->add_option("--obs", ext_obs, "observable filter");
    auto* o_ext_theta = ext->add_option("--theta", ext_theta, "theta filter");
    ext->add_option("--svg", ext_svg, "optional SVG output");

    // plot
    auto* plt = app.add_subcommand("plot", "static SVG plot of a result CSV");
    std::string plt_in, plt_x = "theta_h", plt_y = "value", plt_out;
    plt->add_option("--input", plt_in)->required();
    plt->add_option("--x", plt_x, "theta_h|inv_chi");
    plt->add_option("--y", plt_y, "value|max_trunc_err");
    plt->add_option("--out", plt_out)->required();

    // oracle
    auto* orc = app.add_subcommand("oracle", "exact statevector reference on small graphs");
    std::string orc_size, orc_out;
    std::vector<std::string> orc_thetas, orc_obs;
    int orc_steps = 1;
    orc->add_option("--size", orc_size)->required();
    orc->add_option("--theta", orc_thetas)->required()->delimiter(',');
    orc->add_option("--steps", orc_steps);
    orc->add_option("--obs", orc_obs, "observables (repeatable)")->required();
    orc->add_option("--out", orc_out, "CSV output path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (lat->parsed()) return cmd_lattice(lat_size, lat_out);
        if (sim->parsed()) {
            if (!sim_config.empty()) {
                const auto kv = read_config_file(sim_config);
                auto want = [&](const char* key, const CLI::Option* opt) {
                    return kv.count(key) && opt->count() == 0;
                };
                if (want("size", o_size)) plan.size = kv.at("size");
                if (want("theta", o_theta)) sim_thetas = split_list(kv.at("theta"));
                if (want("steps", o_steps)) plan.steps = std::stoi(kv.at("steps"));
                if (want("chi", o_chi)) {
                    plan.chis.clear();
                    for (const auto& c : split_list(kv.at("chi"))) plan.chis.push_back(std::stoull(c));
                }
                if (want("obs", o_obs)) sim_obs = split_list(kv.at("obs"), ';');
                if (want("bp", o_bp)) plan.bp = kv.at("bp") == "on" || kv.at("bp") == "true";
                if (want("bp_tol", o_bp_tol)) plan.bp_tol = std::stod(kv.at("bp_tol"));
                if (want("bp_iters", o_bp_iters)) plan.bp_iters = std::stoi(kv.at("bp_iters"));
                if (want("threads", o_threads)) plan.threads = std::stoi(kv.at("threads"));
            }
            if (sim_thetas.empty()) sim_thetas = {"grid:17"};
            plan.thetas = parse_thetas(sim_thetas);
            plan.observables = sim_obs;
            return cmd_simulate(std::move(plan), sim_out, sim_json);
        }
        if (cmp->parsed()) return cmd_compare(cmp_test, cmp_ref, cmp_obs, cmp_chi, cmp_out);
        if (ext->parsed())
            return cmd_extrapolate(ext_in, ext_k, ext_obs, ext_theta, o_ext_theta->count() > 0,
                                   ext_svg);
        if (plt->parsed()) return cmd_plot(plt_in, plt_x, plt_y, plt_out);
        if (orc->parsed()) return cmd_oracle(orc_size, orc_thetas, orc_steps, orc_obs, orc_out);
    } catch (const InvalidArgument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const UndefinedObservable& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
