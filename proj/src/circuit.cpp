#include "gpeps/circuit.hpp"
#include "gpeps/errors.hpp"

#include <cmath>
#include <complex>

namespace gpeps {

Tensor zz_gate() {
    Tensor g({2, 2, 2, 2});
    const cplx plus = std::polar(1.0, M_PI / 4.0);
    const cplx minus = std::conj(plus);
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b) g.at({a, b, a, b}) = (a == b) ? plus : minus;
    return g;
}

Tensor x_rotation(double theta_h) {
    const double c = std::cos(theta_h / 2.0), s = std::sin(theta_h / 2.0);
    Tensor g({2, 2});
    g.at({0, 0}) = c;
    g.at({1, 1}) = c;
    g.at({0, 1}) = cplx(0.0, -s);
    g.at({1, 0}) = cplx(0.0, -s);
    return g;
}

Tensor dagger_1q(const Tensor& g) {
    Tensor out({2, 2});
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out.at({i, j}) = std::conj(g.at({j, i}));
    return out;
}

Tensor dagger_2q(const Tensor& g) {
    Tensor out({2, 2, 2, 2});
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t b = 0; b < 2; ++b)
            for (std::size_t c = 0; c < 2; ++c)
                for (std::size_t d = 0; d < 2; ++d)
                    out.at({a, b, c, d}) = std::conj(g.at({c, d, a, b}));
    return out;
}

TrotterSchedule build_schedule(const Incidence& g, double theta_h, Direction dir) {
    TrotterSchedule sched;
    sched.direction = dir;
    Tensor x = x_rotation(theta_h);
    Tensor zz = zz_gate();
    if (dir == Direction::Adjoint) {
        x = dagger_1q(x);
        zz = dagger_2q(zz);
    }
    for (int v = 0; v < g.n; ++v) sched.x_layer.emplace_back(v, x);
    for (std::size_t e = 0; e < g.ends.size(); ++e)
        sched.zz_layer.emplace_back(static_cast<int>(e), zz);
    return sched;
}

std::pair<PauliString, PauliString> w_observables_127() {
    PauliString w10, w17;
    for (int s : {13, 29, 31}) w10[s] = Pauli::X;
    for (int s : {9, 30}) w10[s] = Pauli::Y;
    for (int s : {8, 12, 17, 28, 32}) w10[s] = Pauli::Z;
    for (int s : {37, 41, 52, 56, 57, 58, 62, 79}) w17[s] = Pauli::X;
    w17[75] = Pauli::Y;
    for (int s : {38, 40, 42, 63, 72, 80, 90, 91}) w17[s] = Pauli::Z;
    return {w10, w17};
}

int anchor_site(SizeTag size, int weight) {
    if (weight == 10) {
        switch (size) {
            case SizeTag::Eagle127: return 13;
            case SizeTag::Osprey433: return 25;
            case SizeTag::Condor1121: return 41;
            case SizeTag::Infinite:
                throw UndefinedObservable("weight-10 anchor is undefined for the infinite lattice");
        }
    }
    if (weight == 17) {
        switch (size) {
            case SizeTag::Eagle127: return 62;
            case SizeTag::Osprey433: return 181;
            case SizeTag::Condor1121: return 505;
            case SizeTag::Infinite: return 2;
        }
    }
    throw UndefinedObservable("no anchor for weight " + std::to_string(weight));
}

namespace {

// Phase-tracked single-site Pauli algebra, phases restricted to {1,i,-1,-i}
// represented as an exponent of i.
struct SitePauli {
    bool x = false, z = false;
};

// p * q = i^k r
int pauli_mul(SitePauli p, SitePauli q, SitePauli& r) {
    auto code = [](SitePauli s) { return (s.x ? 1 : 0) + (s.z ? 2 : 0); };
    // k = power of i in p*q = i^k r.  Codes: 0=I 1=X 2=Z 3=Y
    static const int kmul[4][4] = {
        {0, 0, 0, 0},
        {0, 0, 3, 1},  // X*X=I, X*Z=-iY, X*Y=iZ
        {0, 1, 0, 3},  // Z*X=iY,  Z*Z=I,  Z*Y=-iX
        {0, 3, 1, 0},  // Y*X=-iZ, Y*Z=iX, Y*Y=I
    };
    r.x = p.x ^ q.x;
    r.z = p.z ^ q.z;
    return kmul[code(p)][code(q)];
}

} // namespace

BackPropagated clifford_backpropagated_z(const Graph& g, int anchor, int n) {
    if (anchor < 0 || anchor >= g.n) throw InvalidArgument("anchor out of range");
    std::vector<SitePauli> op(g.n);
    int iphase = 0; // power of i
    op[anchor] = {false, true};

    for (int step = 0; step < n; ++step) {
        // Conjugate by the X layer at theta = pi/2: X->X, Y->Z, Z->-Y.
        for (auto& p : op) {
            if (p.x && p.z) {
                p = {false, true};
            } else if (!p.x && p.z) {
                p = {true, true};
                iphase = (iphase + 2) % 4;
            }
        }
        // Conjugate by every ZZ gate: X1 -> -Y1 Z2, Y1 -> X1 Z2.  Both
        // endpoint letters transform from their pre-gate values, so the
        // edge is handled jointly: conj(P_u P_v) = conj(P_u I) conj(I P_v).
        for (const auto& [u, v] : g.edges) {
            if (!op[u].x && !op[v].x) continue; // I and Z commute with ZZ
            auto lift = [&](SitePauli p, SitePauli& self, SitePauli& other) {
                if (!p.x) {
                    self = p;
                    other = {false, false};
                    return 0;
                }
                self = p.z ? SitePauli{true, false} : SitePauli{true, true}; // Y->X, X->Y
                other = {false, true};
                return p.z ? 0 : 2; // X picks up the -1
            };
            SitePauli au, bv, cu, dv;
            int k = lift(op[u], au, bv) + lift(op[v], dv, cu);
            SitePauli nu, nv;
            k += pauli_mul(au, cu, nu);
            k += pauli_mul(bv, dv, nv);
            iphase = (iphase + k) % 4;
            op[u] = nu;
            op[v] = nv;
        }
    }

    BackPropagated result;
    for (int s = 0; s < g.n; ++s) {
        if (!op[s].x && !op[s].z) continue;
        if (op[s].x && op[s].z)
            result.string[s] = Pauli::Y;
        else if (op[s].x)
            result.string[s] = Pauli::X;
        else
            result.string[s] = Pauli::Z;
    }
    if (iphase % 2 != 0) throw NumericError("back-propagated string has non-real phase");
    result.sign = iphase == 0 ? 1.0 : -1.0;
    return result;
}

Observable parse_observable(const std::string& text) {
    Observable obs;
    obs.spec = text;
    if (text == "avg_z") {
        obs.kind = Observable::Kind::AverageZ;
        return obs;
    }
    auto site_form = [&](char c, Observable::Kind kind) {
        std::string prefix = std::string(1, c) + "@";
        if (text.rfind(prefix, 0) != 0) return false;
        obs.kind = kind;
        obs.site = std::stoi(text.substr(2));
        if (obs.site < 0) throw InvalidArgument("bad site in observable: " + text);
        return true;
    };
    if (site_form('z', Observable::Kind::SingleZ) || site_form('x', Observable::Kind::SingleX) ||
        site_form('y', Observable::Kind::SingleY))
        return obs;
    if (text.rfind("w10@n", 0) == 0 || text.rfind("w17@n", 0) == 0) {
        obs.kind = Observable::Kind::CliffordWeightN;
        obs.weight = std::stoi(text.substr(1, 2));
        obs.n_back = std::stoi(text.substr(5));
        if (obs.n_back < 0) throw InvalidArgument("bad step count in observable: " + text);
        return obs;
    }
    if (text.rfind("pauli:", 0) == 0) {
        obs.kind = Observable::Kind::PauliStr;
        std::string rest = text.substr(6);
        std::size_t pos = 0;
        while (pos < rest.size()) {
            std::size_t end = rest.find(',', pos);
            if (end == std::string::npos) end = rest.size();
            std::string item = rest.substr(pos, end - pos);
            if (item.size() < 2) throw InvalidArgument("bad pauli item: " + item);
            Pauli p;
            switch (item[0]) {
                case 'X': p = Pauli::X; break;
                case 'Y': p = Pauli::Y; break;
                case 'Z': p = Pauli::Z; break;
                default: throw InvalidArgument("bad pauli letter in: " + item);
            }
            int site = std::stoi(item.substr(1));
            if (obs.string.count(site)) throw InvalidArgument("repeated site in pauli string");
            obs.string[site] = p;
            pos = end + 1;
        }
        if (obs.string.empty()) throw InvalidArgument("empty pauli string");
        return obs;
    }
    throw InvalidArgument("unrecognized observable: " + text);
}

} // namespace gpeps
