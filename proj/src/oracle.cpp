#include "gpeps/oracle.hpp"
#include "gpeps/errors.hpp"

#include <cmath>

namespace gpeps {

StateVector::StateVector(int num_qubits) : m_(num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits)
        throw CapacityError("statevector limited to 1.." + std::to_string(kMaxQubits) +
                            " qubits, got " + std::to_string(num_qubits));
    amp_.assign(std::size_t(1) << m_, cplx(0.0));
    amp_[0] = 1.0;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const cplx& a : amp_) s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::apply_1q(int site, const Tensor& gate) {
    const std::size_t bit = std::size_t(1) << site;
    const cplx g00 = gate.at({0, 0}), g01 = gate.at({0, 1});
    const cplx g10 = gate.at({1, 0}), g11 = gate.at({1, 1});
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if (i & bit) continue;
        const cplx a0 = amp_[i], a1 = amp_[i | bit];
        amp_[i] = g00 * a0 + g01 * a1;
        amp_[i | bit] = g10 * a0 + g11 * a1;
    }
}

void StateVector::apply_2q(int a, int b, const Tensor& gate) {
    const std::size_t ba = std::size_t(1) << a, bb = std::size_t(1) << b;
    cplx g[4][4];
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            g[r][c] = gate.at({r >> 1, r & 1, c >> 1, c & 1});
    for (std::size_t i = 0; i < amp_.size(); ++i) {
        if ((i & ba) || (i & bb)) continue;
        const std::size_t idx[4] = {i, i | bb, i | ba, i | ba | bb}; // |ab> = |00>,|01>,|10>,|11>
        cplx in[4], out[4];
        for (int k = 0; k < 4; ++k) in[k] = amp_[idx[k]];
        for (int r = 0; r < 4; ++r) {
            out[r] = 0.0;
            for (int c = 0; c < 4; ++c) out[r] += g[r][c] * in[c];
        }
        for (int k = 0; k < 4; ++k) amp_[idx[k]] = out[k];
    }
}

void StateVector::apply_pauli(int site, Pauli p) {
    const std::size_t bit = std::size_t(1) << site;
    switch (p) {
        case Pauli::Z:
            for (std::size_t i = 0; i < amp_.size(); ++i)
                if (i & bit) amp_[i] = -amp_[i];
            break;
        case Pauli::X:
            for (std::size_t i = 0; i < amp_.size(); ++i)
                if (!(i & bit)) std::swap(amp_[i], amp_[i | bit]);
            break;
        case Pauli::Y:
            for (std::size_t i = 0; i < amp_.size(); ++i)
                if (!(i & bit)) {
                    const cplx a0 = amp_[i];
                    amp_[i] = cplx(0.0, -1.0) * amp_[i | bit];
                    amp_[i | bit] = cplx(0.0, 1.0) * a0;
                }
            break;
    }
}

void StateVector::apply_schedule(const TrotterSchedule& sched, const Incidence& g) {
    auto run_x = [&] {
        for (const auto& [site, gate] : sched.x_layer) apply_1q(site, gate);
    };
    auto run_zz = [&] {
        for (const auto& [eid, gate] : sched.zz_layer)
            apply_2q(g.ends[eid][0], g.ends[eid][1], gate);
    };
    if (sched.direction == Direction::Forward) {
        run_x();
        run_zz();
    } else {
        run_zz();
        run_x();
    }
}

cplx StateVector::overlap(const StateVector& other) const {
    if (m_ != other.m_) throw InvalidArgument("overlap: qubit count mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * other.amp_[i];
    return s;
}

StateVector evolve_exact(const Graph& g, double theta_h, int n, Direction dir) {
    StateVector sv(g.n);
    evolve_steps(sv, g, theta_h, n, dir);
    return sv;
}

void evolve_steps(StateVector& sv, const Graph& g, double theta_h, int n, Direction dir) {
    if (sv.num_qubits() != g.n) throw InvalidArgument("state/graph size mismatch");
    const Incidence inc = g.incidence();
    const TrotterSchedule sched = build_schedule(inc, theta_h, dir);
    for (int step = 0; step < n; ++step) sv.apply_schedule(sched, inc);
}

double expect_pauli(const StateVector& sv, const PauliString& p) {
    StateVector tmp = sv;
    for (const auto& [site, letter] : p) {
        if (site < 0 || site >= sv.num_qubits()) throw InvalidArgument("pauli site out of range");
        tmp.apply_pauli(site, letter);
    }
    return sv.overlap(tmp).real();
}

double expect_omega_protocol(const Graph& g, double theta_h, int n, int anchor) {
    if (anchor < 0 || anchor >= g.n) throw InvalidArgument("anchor out of range");
    StateVector omega = evolve_exact(g, theta_h, n, Direction::Forward);
    evolve_steps(omega, g, M_PI / 2.0, n, Direction::Adjoint);
    PauliString z{{anchor, Pauli::Z}};
    return expect_pauli(omega, z);
}

} // namespace gpeps
