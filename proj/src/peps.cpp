#include "gpeps/peps.hpp"
#include "gpeps/errors.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace gpeps {

namespace {

/// Multiply every slice along the given axis by the matching weight.
void scale_axis(Tensor& t, std::size_t axis, const std::vector<double>& w) {
    const auto& shape = t.shape();
    if (w.size() != shape[axis]) throw InvalidArgument("scale_axis: weight length mismatch");
    std::size_t stride = 1;
    for (std::size_t a = axis + 1; a < shape.size(); ++a) stride *= shape[a];
    const std::size_t block = stride * shape[axis];
    cplx* d = t.data();
    for (std::size_t base = 0; base < t.size(); base += block)
        for (std::size_t i = 0; i < shape[axis]; ++i) {
            const double wi = w[i];
            cplx* p = d + base + i * stride;
            for (std::size_t j = 0; j < stride; ++j) p[j] *= wi;
        }
}

std::vector<double> pseudo_inverse(const std::vector<double>& lam, double floor) {
    double mx = 0.0;
    for (double x : lam) mx = std::max(mx, x);
    std::vector<double> inv(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i)
        inv[i] = lam[i] < floor * mx ? 0.0 : 1.0 / lam[i];
    return inv;
}

Tensor reshape(const Tensor& t, std::vector<std::size_t> shape) {
    return Tensor(std::move(shape), std::vector<cplx>(t.data(), t.data() + t.size()));
}

} // namespace

Tensor pauli_matrix(Pauli p) {
    Tensor m({2, 2});
    switch (p) {
        case Pauli::X:
            m.at({0, 1}) = 1.0;
            m.at({1, 0}) = 1.0;
            break;
        case Pauli::Y:
            m.at({0, 1}) = cplx(0.0, -1.0);
            m.at({1, 0}) = cplx(0.0, 1.0);
            break;
        case Pauli::Z:
            m.at({0, 0}) = 1.0;
            m.at({1, 1}) = -1.0;
            break;
    }
    return m;
}

PepsState::PepsState(Incidence g, PepsOptions opts) : g_(std::move(g)), opts_(opts) {
    if (g_.n < 1) throw InvalidArgument("empty graph");
    if (opts_.chi_max < 1) throw InvalidArgument("chi_max must be positive");
    if (opts_.lambda_floor <= 0.0) throw InvalidArgument("lambda_floor must be positive");
    tensors_.reserve(g_.n);
    for (int v = 0; v < g_.n; ++v) {
        std::vector<std::size_t> shape(1 + g_.incident[v].size(), 1);
        shape[0] = 2;
        Tensor t(shape);
        t[0] = 1.0; // |0>
        tensors_.push_back(std::move(t));
    }
    lambdas_.assign(g_.ends.size(), {1.0});
}

std::size_t PepsState::bond_axis(int v, int e) const {
    const auto& inc = g_.incident[v];
    auto it = std::lower_bound(inc.begin(), inc.end(), e);
    if (it == inc.end() || *it != e) throw InvalidArgument("edge not incident to site");
    return 1 + static_cast<std::size_t>(it - inc.begin());
}

void PepsState::apply_single_site(int site, const Tensor& gate) {
    if (site < 0 || site >= g_.n) throw InvalidArgument("site out of range");
    tensors_[site] = contract(gate, tensors_[site], {{1, 0}});
}

double PepsState::apply_two_site(int eid, const Tensor& gate) {
    if (eid < 0 || static_cast<std::size_t>(eid) >= g_.ends.size())
        throw InvalidArgument("edge out of range");
    const int a = g_.ends[eid][0], b = g_.ends[eid][1];

    // Absorb the full environment weights plus the bond weight (once).
    auto absorbed = [&](int v, bool with_bond) {
        Tensor t = tensors_[v];
        for (int e : g_.incident[v]) {
            if (e == eid && !with_bond) continue;
            scale_axis(t, bond_axis(v, e), lambdas_[e]);
        }
        return t;
    };
    Tensor ta = absorbed(a, true);
    Tensor tb = absorbed(b, false);

    auto env_axes = [&](int v) {
        std::vector<std::size_t> axes;
        const std::size_t skip = bond_axis(v, eid);
        for (std::size_t ax = 1; ax < tensors_[v].rank(); ++ax)
            if (ax != skip) axes.push_back(ax);
        return axes;
    };
    const auto env_a = env_axes(a), env_b = env_axes(b);
    Reduction qa = reduce_left(ta, env_a);
    Reduction qb = reduce_left(tb, env_b);
    const std::size_t chi_ab = lambdas_[eid].size();
    Tensor ra = reshape(qa.r(), {qa.rank_kept(), 2, chi_ab});
    Tensor rb = reshape(qb.r(), {qb.rank_kept(), 2, chi_ab});

    Tensor theta = contract(ra, rb, {{2, 2}});             // [ra, pa, rb, pb]
    theta = contract(theta, gate, {{1, 2}, {3, 3}});       // [ra, rb, pa', pb']
    theta = permute(theta, {0, 2, 1, 3});                  // [ra, pa', rb, pb']
    if (!theta.all_finite()) throw NumericError("non-finite tensor in simple update");

    SvdResult svd = svd_truncate(theta, {0, 1}, opts_.chi_max, opts_.lambda_floor);
    const std::size_t k = svd.singular_values.size();
    std::vector<double> lam(k);
    for (std::size_t i = 0; i < k; ++i) lam[i] = svd.singular_values[i] / svd.singular_values[0];

    // Rebuild a site tensor from Q * block and restore the environment gauge.
    auto rebuild = [&](int v, const Reduction& q, Tensor block) {
        // block: [rank, 2, k] -> [env dims..., 2, k]
        Tensor t = q.apply_left(reshape(block, {q.rank_kept(), 2 * k}));
        std::vector<std::size_t> shape(t.shape().begin(), t.shape().end() - 1);
        shape.push_back(2);
        shape.push_back(k);
        t = reshape(t, std::move(shape));
        // reorder to (phys, virtual axes ascending edge id)
        const auto env = env_axes(v);
        const std::size_t bond = bond_axis(v, eid);
        std::vector<std::size_t> perm(t.rank());
        perm[0] = env.size(); // phys
        for (std::size_t ax = 1; ax < t.rank(); ++ax) {
            if (ax == bond)
                perm[ax] = env.size() + 1;
            else
                perm[ax] = static_cast<std::size_t>(
                    std::lower_bound(env.begin(), env.end(), ax) - env.begin());
        }
        t = permute(t, perm);
        for (int e : g_.incident[v])
            if (e != eid)
                scale_axis(t, bond_axis(v, e), pseudo_inverse(lambdas_[e], opts_.lambda_floor));
        return t;
    };

    tensors_[a] = rebuild(a, qa, svd.left);
    tensors_[b] = rebuild(b, qb, permute(svd.right, {1, 2, 0})); // [rb, 2, k]
    lambdas_[eid] = std::move(lam);
    max_trunc_ = std::max(max_trunc_, svd.truncation_error);
    return svd.truncation_error;
}

std::vector<std::vector<int>> edge_color_classes(const Incidence& g) {
    std::vector<int> color(g.ends.size(), -1);
    int num_colors = 0;
    for (std::size_t e = 0; e < g.ends.size(); ++e) {
        std::vector<bool> used(num_colors + 1, false);
        for (int v : g.ends[e])
            for (int f : g.incident[v])
                if (color[f] >= 0) used[color[f]] = true;
        int c = 0;
        while (used[c]) ++c;
        color[e] = c;
        num_colors = std::max(num_colors, c + 1);
    }
    std::vector<std::vector<int>> classes(num_colors);
    for (std::size_t e = 0; e < g.ends.size(); ++e) classes[color[e]].push_back(int(e));
    return classes;
}

double PepsState::trotter_step(double theta_h, Direction dir) {
    const TrotterSchedule sched = build_schedule(g_, theta_h, dir);
    double step_max = 0.0;

    auto run_x = [&] {
        for (const auto& [site, gate] : sched.x_layer) apply_single_site(site, gate);
    };
    auto run_zz = [&] {
        const auto classes = edge_color_classes(g_);
        std::vector<const Tensor*> gate_of(g_.ends.size(), nullptr);
        for (const auto& [eid, gate] : sched.zz_layer) gate_of[eid] = &gate;
        for (const auto& cls : classes) {
            // Edges in one class are vertex-disjoint, so they may run
            // concurrently; the per-edge result is order-independent.
            const int nt = std::min<int>(opts_.threads, int(cls.size()));
            if (nt <= 1) {
                for (int eid : cls) step_max = std::max(step_max, apply_two_site(eid, *gate_of[eid]));
            } else {
                std::vector<double> worst(nt, 0.0);
                std::vector<std::thread> pool;
                for (int w = 0; w < nt; ++w)
                    pool.emplace_back([&, w] {
                        for (std::size_t i = w; i < cls.size(); i += nt)
                            worst[w] = std::max(worst[w], apply_two_site(cls[i], *gate_of[cls[i]]));
                    });
                for (auto& th : pool) th.join();
                for (double x : worst) step_max = std::max(step_max, x);
            }
        }
    };

    if (dir == Direction::Forward) {
        run_x();
        run_zz();
    } else {
        run_zz();
        run_x();
    }
    history_.push_back({theta_h, dir});
    return step_max;
}

double PepsState::measure_site(int site, Pauli p) const {
    if (site < 0 || site >= g_.n) throw InvalidArgument("site out of range");
    Tensor a = tensors_[site];
    for (int e : g_.incident[site]) scale_axis(a, bond_axis(site, e), lambdas_[e]);
    const Tensor b = contract(pauli_matrix(p), a, {{1, 0}});
    cplx num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::conj(a[i]) * b[i];
        den += std::norm(a[i]);
    }
    if (!(den > 0.0) || !std::isfinite(den)) throw NumericError("mean-field norm is not positive");
    return (num / den).real();
}

double PepsState::measure_string(const PauliString& p) const {
    double r = 1.0;
    for (const auto& [site, letter] : p) r *= measure_site(site, letter);
    return r;
}

double PepsState::average_magnetization() const {
    double s = 0.0;
    for (int v = 0; v < g_.n; ++v) s += measure_site(v, Pauli::Z);
    return s / g_.n;
}

double PepsState::clifford_weight_measure(int n_back, int anchor) const {
    if (n_back < 0) throw InvalidArgument("n_back must be nonnegative");
    PepsState copy = *this;
    for (int i = 0; i < n_back; ++i) copy.trotter_step(M_PI / 2.0, Direction::Adjoint);
    return copy.measure_site(anchor, Pauli::Z);
}

std::size_t PepsState::max_bond_dim() const {
    std::size_t mx = 1;
    for (const auto& lam : lambdas_) mx = std::max(mx, lam.size());
    return mx;
}

std::vector<cplx> to_amplitudes(const PepsState& s) {
    const Incidence& g = s.graph();
    if (g.n > 26) throw CapacityError("exact contraction limited to 26 sites");
    for (std::size_t e = 0; e < g.ends.size(); ++e)
        if (g.ends[e][0] == g.ends[e][1])
            throw InvalidArgument("exact contraction needs a finite graph");

    struct AxisTag {
        bool phys;
        int id; // site or edge
    };
    Tensor acc = Tensor::scalar(1.0);
    std::vector<AxisTag> tags;

    for (int v = 0; v < g.n; ++v) {
        Tensor t = s.site_tensor(v);
        for (int e : g.incident[v]) {
            std::vector<double> root(s.bond_weights(e).size());
            for (std::size_t i = 0; i < root.size(); ++i)
                root[i] = std::sqrt(s.bond_weights(e)[i]);
            scale_axis(t, s.bond_axis(v, e), root);
        }
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        std::vector<bool> open(t.rank(), true);
        for (std::size_t j = 1; j < t.rank(); ++j) {
            const int e = g.incident[v][j - 1];
            for (std::size_t i = 0; i < tags.size(); ++i)
                if (!tags[i].phys && tags[i].id == e) {
                    pairs.push_back({i, j});
                    open[j] = false;
                }
        }
        acc = contract(acc, t, pairs);
        std::vector<AxisTag> next;
        std::vector<bool> consumed(tags.size(), false);
        for (const auto& [i, j] : pairs) consumed[i] = true;
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (!consumed[i]) next.push_back(tags[i]);
        next.push_back({true, v});
        for (std::size_t j = 1; j < t.rank(); ++j)
            if (open[j]) next.push_back({false, g.incident[v][j - 1]});
        tags = std::move(next);
    }

    std::vector<std::size_t> perm(tags.size());
    for (std::size_t i = 0; i < tags.size(); ++i) perm[tags[i].id] = i;
    acc = permute(acc, perm);

    std::vector<cplx> amp(std::size_t(1) << g.n);
    for (std::size_t j = 0; j < amp.size(); ++j) {
        std::size_t i = 0;
        for (int v = 0; v < g.n; ++v)
            if (j & (std::size_t(1) << (g.n - 1 - v))) i |= std::size_t(1) << v;
        amp[i] = acc[j];
    }
    return amp;
}

} // namespace gpeps
