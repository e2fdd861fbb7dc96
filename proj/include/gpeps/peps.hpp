#pragma once

#include "gpeps/circuit.hpp"
#include "gpeps/graph.hpp"
#include "gpeps/tensor.hpp"

#include <cstddef>
#include <vector>

namespace gpeps {

struct PepsOptions {
    std::size_t chi_max = 64;
    double lambda_floor = 1e-12;
    int threads = 1;
};

/// One trotter step as recorded in a state's history.
struct StepRecord {
    double theta_h = 0.0;
    Direction direction = Direction::Forward;
};

/// Graph-based PEPS: one tensor per vertex (physical axis 0 of dimension 2,
/// then one virtual axis per incident edge, ascending edge id) plus a
/// positive weight vector per edge, sorted descending with max exactly 1.
/// Expectation values close every virtual bond with diag(lambda^2) and
/// divide by the same closure of the identity (mean-field).
class PepsState {
  public:
    PepsState(Incidence g, PepsOptions opts = {});

    const Incidence& graph() const { return g_; }
    const PepsOptions& options() const { return opts_; }
    int num_sites() const { return g_.n; }

    Tensor& site_tensor(int v) { return tensors_[v]; }
    const Tensor& site_tensor(int v) const { return tensors_[v]; }
    std::vector<double>& bond_weights(int e) { return lambdas_[e]; }
    const std::vector<double>& bond_weights(int e) const { return lambdas_[e]; }

    /// Axis of site v's tensor that carries edge e (axis 0 is physical).
    std::size_t bond_axis(int v, int e) const;

    void apply_single_site(int site, const Tensor& gate);

    /// Simple update across one edge; returns the truncation error.
    double apply_two_site(int eid, const Tensor& gate);

    /// X layer then ZZ layer (forward) or the reverse (adjoint); returns the
    /// max truncation error of the step.
    double trotter_step(double theta_h, Direction dir);

    double measure_site(int site, Pauli p) const;

    /// Mean-field product of single-site expectations.
    double measure_string(const PauliString& p) const;

    double average_magnetization() const;

    /// Deep-copies the state, applies n_back adjoint steps at theta = pi/2,
    /// and measures Z at the anchor; *this is untouched.
    double clifford_weight_measure(int n_back, int anchor) const;

    std::size_t max_bond_dim() const;
    double max_truncation_error() const { return max_trunc_; }
    void set_max_truncation_error(double x) { max_trunc_ = x; }
    const std::vector<StepRecord>& history() const { return history_; }
    std::vector<StepRecord>& history() { return history_; }

  private:
    Incidence g_;
    PepsOptions opts_;
    std::vector<Tensor> tensors_;
    std::vector<std::vector<double>> lambdas_;
    std::vector<StepRecord> history_;
    double max_trunc_ = 0.0;
};

inline PepsState init_product_state(const Incidence& g, PepsOptions opts = {}) {
    return PepsState(g, opts);
}

/// Deterministic greedy partition of the edges into vertex-disjoint classes,
/// ascending edge id within each class.
std::vector<std::vector<int>> edge_color_classes(const Incidence& g);

/// Exact amplitudes by full contraction (finite graphs only, <= 26 sites);
/// qubit q is bit q of the index.  Unnormalized.
std::vector<cplx> to_amplitudes(const PepsState& s);

Tensor pauli_matrix(Pauli p);

} // namespace gpeps
