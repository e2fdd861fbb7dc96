#pragma once

#include "gpeps/peps.hpp"

namespace gpeps {

/// One positive semidefinite, trace-1 matrix per directed edge;
/// msg[2*e + d] flows from ends[e][d] to the opposite endpoint.
struct BpMessages {
    std::vector<Tensor> msg;

    const Tensor& from(int e, int endpoint_index) const { return msg[2 * e + endpoint_index]; }
};

struct BpReport {
    int iterations = 0;
    double residual = 0.0;
};

/// Iterate messages on the lambda-dressed network until the max elementwise
/// change drops below tol.  On a tree in the simple-update gauge the fixed
/// point is diag(lambda^2) on every directed edge.
BpMessages bp_messages(const PepsState& s, double tol = 1e-10, int max_iters = 500,
                       BpReport* report = nullptr);

/// Re-gauge the state using converged BP messages.  The represented state is
/// unchanged up to a global factor; bond weights become the new fixed-point
/// spectra, normalized to max 1.
BpReport bp_gauge(PepsState& s, double tol = 1e-10, int max_iters = 500);

} // namespace gpeps
