#include "gpeps/analysis.hpp"
#include "gpeps/bp.hpp"
#include "gpeps/errors.hpp"
#include "gpeps/peps.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

namespace gpeps {

namespace {

constexpr const char* kCsvHeader = "size,theta_h,steps,chi,observable,site,value,max_trunc_err,wall_time_s";

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a_str(std::uint64_t h, const std::string& s) {
    return fnv1a(h, s.data(), s.size() + 1); // include terminator as separator
}

struct ResolvedSize {
    Incidence inc;
    bool has_tag = false;
    SizeTag tag = SizeTag::Eagle127;
};

ResolvedSize resolve_size(const std::string& size) {
    ResolvedSize r;
    if (size == "eagle127") {
        r.inc = build_heavy_hex(HeavyHexSize::Eagle127).incidence();
        r.has_tag = true;
        r.tag = SizeTag::Eagle127;
    } else if (size == "osprey433") {
        r.inc = build_heavy_hex(HeavyHexSize::Osprey433).incidence();
        r.has_tag = true;
        r.tag = SizeTag::Osprey433;
    } else if (size == "condor1121") {
        r.inc = build_heavy_hex(HeavyHexSize::Condor1121).incidence();
        r.has_tag = true;
        r.tag = SizeTag::Condor1121;
    } else if (size == "infinite") {
        r.inc = build_unit_cell().incidence();
        r.has_tag = true;
        r.tag = SizeTag::Infinite;
    } else if (size.rfind("fixture:", 0) == 0) {
        r.inc = fixture(size.substr(8)).incidence();
    } else {
        throw InvalidArgument("unknown size: " + size);
    }
    return r;
}

double evaluate(const PepsState& state, const ResolvedSize& rs, const Observable& obs, int* site) {
    switch (obs.kind) {
        case Observable::Kind::AverageZ: return state.average_magnetization();
        case Observable::Kind::SingleZ: *site = obs.site; return state.measure_site(obs.site, Pauli::Z);
        case Observable::Kind::SingleX: *site = obs.site; return state.measure_site(obs.site, Pauli::X);
        case Observable::Kind::SingleY: *site = obs.site; return state.measure_site(obs.site, Pauli::Y);
        case Observable::Kind::PauliStr: return state.measure_string(obs.string);
        case Observable::Kind::CliffordWeightN: {
            if (!rs.has_tag)
                throw UndefinedObservable("weight-N anchors are defined only for the named lattice sizes");
            const int anchor = anchor_site(rs.tag, obs.weight);
            *site = anchor;
            return state.clifford_weight_measure(obs.n_back, anchor);
        }
    }
    throw InvalidArgument("unhandled observable kind");
}

} // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

ChiFit extrapolate_chi(const ChiSeries& series, int k) {
    if (k < 2) throw InvalidArgument("extrapolate_chi: k must be at least 2");
    if (static_cast<int>(series.points.size()) < k)
        throw InvalidArgument("extrapolate_chi: fewer than k points");
    for (std::size_t i = 1; i < series.points.size(); ++i)
        if (series.points[i].first <= series.points[i - 1].first)
            throw InvalidArgument("extrapolate_chi: chi must be strictly ascending");

    const std::size_t start = series.points.size() - k;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < series.points.size(); ++i) {
        const double x = 1.0 / double(series.points[i].first);
        const double y = series.points[i].second;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = double(k);
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) throw NumericError("extrapolate_chi: degenerate design matrix");
    ChiFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double ss = 0.0;
    for (std::size_t i = start; i < series.points.size(); ++i) {
        const double x = 1.0 / double(series.points[i].first);
        const double r = series.points[i].second - (fit.intercept + fit.slope * x);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

Series abs_error_curve(const Series& test, const Series& reference) {
    if (test.size() != reference.size())
        throw InvalidArgument("abs_error_curve: series lengths differ");
    Series out;
    out.reserve(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        if (std::abs(test[i].first - reference[i].first) > 1e-12)
            throw InvalidArgument("abs_error_curve: theta grids differ at index " +
                                  std::to_string(i));
        out.push_back({test[i].first, std::abs(test[i].second - reference[i].second)});
    }
    return out;
}

std::vector<double> theta_grid(int count) {
    if (count < 1) throw InvalidArgument("theta grid needs at least one point");
    std::vector<double> g(count);
    if (count == 1) {
        g[0] = 0.0;
        return g;
    }
    for (int i = 0; i < count; ++i) g[i] = (M_PI / 2.0) * double(i) / double(count - 1);
    return g;
}

std::uint64_t config_hash(const SweepPlan& plan) {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv1a_str(h, "gpeps-sweep-v1");
    h = fnv1a_str(h, plan.size);
    for (double t : plan.thetas) h = fnv1a_str(h, format_double(t));
    h = fnv1a(h, &plan.steps, sizeof(plan.steps));
    for (std::size_t c : plan.chis) h = fnv1a(h, &c, sizeof(c));
    for (const auto& o : plan.observables) h = fnv1a_str(h, o);
    h = fnv1a_str(h, format_double(plan.lambda_floor));
    const unsigned char bp = plan.bp ? 1 : 0;
    h = fnv1a(h, &bp, 1);
    if (plan.bp) {
        h = fnv1a_str(h, format_double(plan.bp_tol));
        h = fnv1a(h, &plan.bp_iters, sizeof(plan.bp_iters));
    }
    return h;
}

std::vector<ResultRecord> run_sweep(const SweepPlan& plan) {
    if (plan.steps < 0) throw InvalidArgument("steps must be nonnegative");
    if (plan.thetas.empty() || plan.chis.empty() || plan.observables.empty())
        throw InvalidArgument("sweep needs at least one theta, chi, and observable");
    const ResolvedSize rs = resolve_size(plan.size);
    std::vector<Observable> parsed;
    for (const auto& o : plan.observables) parsed.push_back(parse_observable(o));

    struct Point {
        double theta;
        std::size_t chi;
    };
    std::vector<Point> points;
    for (double t : plan.thetas)
        for (std::size_t c : plan.chis) points.push_back({t, c});

    std::vector<std::vector<ResultRecord>> per_point(points.size());
    auto work = [&](std::size_t i) {
        const auto& [theta, chi] = points[i];
        const auto t0 = std::chrono::steady_clock::now();
        PepsState state(rs.inc, {.chi_max = chi, .lambda_floor = plan.lambda_floor});
        std::string evolve_error;
        try {
            for (int s = 0; s < plan.steps; ++s) {
                state.trotter_step(theta, Direction::Forward);
                if (plan.bp) bp_gauge(state, plan.bp_tol, plan.bp_iters);
            }
        } catch (const std::exception& e) {
            evolve_error = e.what();
        }
        const double t_evolve = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - t0).count();

        for (std::size_t o = 0; o < parsed.size(); ++o) {
            ResultRecord rec;
            rec.size = plan.size;
            rec.theta_h = theta;
            rec.steps = plan.steps;
            rec.chi = chi;
            rec.observable = plan.observables[o];
            rec.max_trunc_err = state.max_truncation_error();
            const auto m0 = std::chrono::steady_clock::now();
            if (!evolve_error.empty()) {
                rec.failed = true;
                rec.error = evolve_error;
                rec.value = std::nan("");
            } else {
                try {
                    rec.value = evaluate(state, rs, parsed[o], &rec.site);
                } catch (const std::exception& e) {
                    rec.failed = true;
                    rec.error = e.what();
                    rec.value = std::nan("");
                }
            }
            rec.wall_time_s = t_evolve + std::chrono::duration<double>(
                std::chrono::steady_clock::now() - m0).count();
            per_point[i].push_back(std::move(rec));
        }
    };

    const int nt = std::max(1, std::min<int>(plan.threads, int(points.size())));
    if (nt <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nt; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < points.size(); i += nt) work(i);
            });
        for (auto& th : pool) th.join();
    }

    std::vector<ResultRecord> records;
    for (auto& v : per_point)
        for (auto& r : v) records.push_back(std::move(r));
    std::stable_sort(records.begin(), records.end(), [](const ResultRecord& a, const ResultRecord& b) {
        if (a.theta_h != b.theta_h) return a.theta_h < b.theta_h;
        if (a.chi != b.chi) return a.chi < b.chi;
        return a.observable < b.observable;
    });
    return records;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace

std::string to_csv(const std::vector<ResultRecord>& records, std::uint64_t hash) {
    std::ostringstream out;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    out << "# config_hash=" << hex << " version=" << engine_version() << "\n";
    out << kCsvHeader << "\n";
    for (const auto& r : records) {
        out << csv_field(r.size) << ',' << format_double(r.theta_h) << ',' << r.steps << ','
            << r.chi << ',' << csv_field(r.observable) << ',' << r.site << ','
            << format_double(r.value) << ',' << format_double(r.max_trunc_err) << ','
            << format_double(r.wall_time_s) << "\n";
    }
    return out.str();
}

std::string to_json(const std::vector<ResultRecord>& records, std::uint64_t hash) {
    nlohmann::json j;
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
    j["config_hash"] = hex;
    j["version"] = engine_version();
    j["records"] = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json row{{"size", r.size},
                           {"theta_h", r.theta_h},
                           {"steps", r.steps},
                           {"chi", r.chi},
                           {"observable", r.observable},
                           {"site", r.site},
                           {"value", std::isnan(r.value) ? nlohmann::json() : nlohmann::json(r.value)},
                           {"max_trunc_err", r.max_trunc_err},
                           {"wall_time_s", r.wall_time_s}};
        if (r.failed) row["error"] = r.error;
        j["records"].push_back(std::move(row));
    }
    return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == sep) {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (quoted) throw InvalidArgument("unterminated quote in CSV row: " + line);
    out.push_back(std::move(cur));
    return out;
}

} // namespace

std::vector<ResultRecord> parse_result_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<ResultRecord> out;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            if (line != kCsvHeader) throw InvalidArgument("unexpected CSV header: " + line);
            saw_header = true;
            continue;
        }
        const auto f = split(line, ',');
        if (f.size() != 9) throw InvalidArgument("bad CSV row: " + line);
        ResultRecord r;
        r.size = f[0];
        r.theta_h = std::stod(f[1]);
        r.steps = std::stoi(f[2]);
        r.chi = std::stoull(f[3]);
        r.observable = f[4];
        r.site = std::stoi(f[5]);
        r.value = std::stod(f[6]);
        r.max_trunc_err = std::stod(f[7]);
        r.wall_time_s = std::stod(f[8]);
        r.failed = std::isnan(r.value);
        out.push_back(std::move(r));
    }
    if (!saw_header) throw InvalidArgument("CSV has no header");
    return out;
}

Series parse_xy_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Series out;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto f = split(line, ',');
        if (f.size() < 2) throw InvalidArgument("bad reference row: " + line);
        try {
            out.push_back({std::stod(f[0]), std::stod(f[1])});
        } catch (const std::exception&) {
            if (out.empty()) continue; // header line
            throw InvalidArgument("bad reference row: " + line);
        }
    }
    if (out.empty()) throw InvalidArgument("reference CSV has no data rows");
    return out;
}

} // namespace gpeps
