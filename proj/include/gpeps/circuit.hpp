#pragma once

#include "gpeps/graph.hpp"
#include "gpeps/tensor.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gpeps {

enum class Pauli { X, Y, Z };
enum class Direction { Forward, Adjoint };

using PauliString = std::map<int, Pauli>;

/// Diagonal exp(i pi/4 Z Z) as a (2,2,2,2) tensor [a', b', a, b].
Tensor zz_gate();

/// exp(-i theta/2 X) as a (2,2) tensor.
Tensor x_rotation(double theta_h);

Tensor dagger_1q(const Tensor& g);
Tensor dagger_2q(const Tensor& g);

/// One kicked-Ising Trotter step: an X-rotation on every site followed by
/// a ZZ phase on every edge.  The adjoint schedule conjugates every gate
/// and runs the ZZ layer first.
struct TrotterSchedule {
    std::vector<std::pair<int, Tensor>> x_layer;   // (site, 2x2)
    std::vector<std::pair<int, Tensor>> zz_layer;  // (edge id, (2,2,2,2)), ascending edge id
    Direction direction = Direction::Forward;
};

TrotterSchedule build_schedule(const Incidence& g, double theta_h, Direction dir);

enum class SizeTag { Eagle127, Osprey433, Condor1121, Infinite };

/// Weight-10 and weight-17 Pauli strings on the 127-site lattice.
std::pair<PauliString, PauliString> w_observables_127();

/// Single-site anchor used to evaluate the weight-10 (P) and weight-17 (Q)
/// observables through back-propagation at the Clifford point.
int anchor_site(SizeTag size, int weight);

/// Conjugate Z_anchor by n Clifford steps, U^n(pi/2) Z U^dag^n(pi/2),
/// yielding sign * (product of the returned letters).
struct BackPropagated {
    PauliString string;
    double sign = 1.0;
};
BackPropagated clifford_backpropagated_z(const Graph& g, int anchor, int n);

/// Measurement requests accepted by the engine and the CLI.
/// Text forms: avg_z | z@SITE | x@SITE | y@SITE | w10@nK | w17@nK |
/// pauli:X13,Y9,Z8,...
struct Observable {
    enum class Kind { SingleZ, SingleX, SingleY, AverageZ, PauliStr, CliffordWeightN };
    Kind kind = Kind::AverageZ;
    int site = -1;
    int weight = 0;
    int n_back = 0;
    PauliString string;
    std::string spec;
};

Observable parse_observable(const std::string& text);

} // namespace gpeps
