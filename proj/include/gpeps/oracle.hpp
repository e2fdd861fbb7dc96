#pragma once

#include "gpeps/circuit.hpp"
#include "gpeps/graph.hpp"

#include <vector>

namespace gpeps {

/// Brute-force statevector simulator; exact ground truth on small graphs.
/// Qubit q maps to bit q of the amplitude index, |0...0> is index 0.
class StateVector {
  public:
    static constexpr int kMaxQubits = 22;

    explicit StateVector(int num_qubits); // |0...0>

    int num_qubits() const { return m_; }
    std::vector<cplx>& amplitudes() { return amp_; }
    const std::vector<cplx>& amplitudes() const { return amp_; }

    double norm() const;

    void apply_1q(int site, const Tensor& gate);           // (2,2)
    void apply_2q(int a, int b, const Tensor& gate);       // (2,2,2,2) [a'b'ab]
    void apply_pauli(int site, Pauli p);

    void apply_schedule(const TrotterSchedule& sched, const Incidence& g);

    cplx overlap(const StateVector& other) const; // <this|other>

  private:
    int m_;
    std::vector<cplx> amp_;
};

StateVector evolve_exact(const Graph& g, double theta_h, int n, Direction dir);

/// Continue evolving an existing state by n more Trotter steps.
void evolve_steps(StateVector& sv, const Graph& g, double theta_h, int n, Direction dir);

double expect_pauli(const StateVector& sv, const PauliString& p);

/// <psi(theta,n)| U^n(pi/2) Z_anchor U^dag^n(pi/2) |psi(theta,n)>
double expect_omega_protocol(const Graph& g, double theta_h, int n, int anchor);

} // namespace gpeps
