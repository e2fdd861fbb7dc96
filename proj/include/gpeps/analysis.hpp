#pragma once

#include "gpeps/circuit.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gpeps {

inline const char* engine_version() { return "0.1.0"; }

struct ResultRecord {
    std::string size;       // eagle127 | osprey433 | condor1121 | infinite | fixture:<name>
    double theta_h = 0.0;
    int steps = 0;
    std::size_t chi = 0;
    std::string observable; // text form as parsed by parse_observable
    int site = -1;          // -1 when not site-resolved
    double value = 0.0;
    double max_trunc_err = 0.0;
    double wall_time_s = 0.0;
    bool failed = false;    // value is NaN in outputs when set
    std::string error;
};

struct ChiSeries {
    std::vector<std::pair<std::size_t, double>> points; // (chi, value), chi strictly ascending
};

struct ChiFit {
    double intercept = 0.0; // chi -> infinity estimate
    double slope = 0.0;     // coefficient of 1/chi
    double residual = 0.0;  // rms residual over the fit window
};

/// Ordinary least squares of value against 1/chi over the k largest chi.
ChiFit extrapolate_chi(const ChiSeries& series, int k);

using Series = std::vector<std::pair<double, double>>; // (theta_h, value)

/// Pointwise |test - reference|; grids must match within 1e-12.
Series abs_error_curve(const Series& test, const Series& reference);

struct SweepPlan {
    std::string size = "eagle127";
    std::vector<double> thetas;
    int steps = 1;
    std::vector<std::size_t> chis;
    std::vector<std::string> observables;
    double lambda_floor = 1e-12;
    bool bp = false;
    double bp_tol = 1e-10;
    int bp_iters = 500;
    int threads = 1; // sweep points run concurrently; excluded from the config hash
};

/// theta grid helper: count evenly spaced points on [0, pi/2].
std::vector<double> theta_grid(int count);

/// Cartesian product theta x chi x observable, sorted by (theta, chi,
/// observable).  A failing point is recorded with `failed` set and the sweep
/// continues.
std::vector<ResultRecord> run_sweep(const SweepPlan& plan);

/// FNV-1a over the deterministic fields of the plan.
std::uint64_t config_hash(const SweepPlan& plan);

std::string to_csv(const std::vector<ResultRecord>& records, std::uint64_t hash);
std::string to_json(const std::vector<ResultRecord>& records, std::uint64_t hash);

std::vector<ResultRecord> parse_result_csv(const std::string& text);

/// Two-column `theta_h,value` reference series (header optional).
Series parse_xy_csv(const std::string& text);

std::string format_double(double v); // %.17g

} // namespace gpeps
