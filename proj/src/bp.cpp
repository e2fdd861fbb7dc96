#include "gpeps/bp.hpp"
#include "gpeps/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gpeps {

namespace {

void scale_axis(Tensor& t, std::size_t axis, const std::vector<double>& w) {
    const auto& shape = t.shape();
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

std::vector<double> pow_weights(const std::vector<double>& lam, double exponent, double floor) {
    double mx = 0.0;
    for (double x : lam) mx = std::max(mx, x);
    std::vector<double> out(lam.size());
    for (std::size_t i = 0; i < lam.size(); ++i)
        out[i] = (exponent < 0.0 && lam[i] < floor * mx) ? 0.0 : std::pow(lam[i], exponent);
    return out;
}

/// Message from v along edge eid, given the current incoming messages.
Tensor one_message(const PepsState& s, int v, int eid, const BpMessages& in) {
    const Incidence& g = s.graph();
    Tensor x = s.site_tensor(v);
    const Tensor b = conj(x);

    // Close every environment bond of the ket with its incoming message.
    // Each contraction drops one original axis and appends the message's
    // bra-side axis at the end; incident edges are processed ascending, so
    // an original axis shifts left once per previously closed smaller axis.
    std::vector<std::size_t> partner_axes; // axes of b paired with the appended axes of x
    for (int e : g.incident[v]) {
        if (e == eid) continue;
        const std::size_t ax = s.bond_axis(v, e);
        const int side = g.ends[e][0] == v ? 1 : 0; // message flowing toward v
        std::size_t cur = ax - partner_axes.size();
        x = contract(x, in.from(e, side), {{cur, 0}});
        partner_axes.push_back(ax);
    }

    std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 0}}; // physical
    for (std::size_t i = 0; i < partner_axes.size(); ++i)
        pairs.push_back({2 + i, partner_axes[i]});
    Tensor m = contract(x, b, pairs); // [ket bond, bra bond]

    const std::vector<double> lam = s.bond_weights(eid);
    scale_axis(m, 0, lam);
    scale_axis(m, 1, lam);

    // hermitize and normalize to unit trace
    const std::size_t n = m.dim(0);
    double tr = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const cplx h = 0.5 * (m[i * n + j] + std::conj(m[j * n + i]));
            m[i * n + j] = h;
            m[j * n + i] = std::conj(h);
            if (i == j) tr += h.real();
        }
    if (!(tr > 0.0) || !std::isfinite(tr)) throw NumericError("BP message has non-positive trace");
    m *= cplx(1.0 / tr);
    return m;
}

/// Hermitian PSD square root.
Tensor herm_sqrt(const Tensor& m) {
    std::vector<double> d;
    Tensor u;
    eigh(m, d, u);
    const std::size_t n = m.dim(0);
    Tensor su = u; // columns scaled by sqrt(d)
    for (std::size_t j = 0; j < n; ++j) {
        const double root = std::sqrt(std::max(0.0, d[j]));
        for (std::size_t i = 0; i < n; ++i) su[i * n + j] *= root;
    }
    // su * u^H
    Tensor uh({n, n});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) uh[i * n + j] = std::conj(u[j * n + i]);
    return matmul(su, uh);
}

Tensor transpose(const Tensor& m) {
    const std::size_t r = m.dim(0), c = m.dim(1);
    Tensor out({c, r});
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) out[j * r + i] = m[i * c + j];
    return out;
}

} // namespace

BpMessages bp_messages(const PepsState& s, double tol, int max_iters, BpReport* report) {
    const Incidence& g = s.graph();
    BpMessages cur;
    cur.msg.resize(2 * g.ends.size());
    for (std::size_t e = 0; e < g.ends.size(); ++e) {
        const std::size_t n = s.bond_weights(int(e)).size();
        Tensor id({n, n});
        for (std::size_t i = 0; i < n; ++i) id[i * n + i] = 1.0 / double(n);
        cur.msg[2 * e] = id;
        cur.msg[2 * e + 1] = id;
    }

    double residual = 0.0;
    for (int it = 1; it <= max_iters; ++it) {
        BpMessages next;
        next.msg.resize(cur.msg.size());
        residual = 0.0;
        for (std::size_t e = 0; e < g.ends.size(); ++e)
            for (int d = 0; d < 2; ++d) {
                Tensor m = one_message(s, g.ends[e][d], int(e), cur);
                for (std::size_t i = 0; i < m.size(); ++i)
                    residual = std::max(residual, std::abs(m[i] - cur.msg[2 * e + d][i]));
                next.msg[2 * e + d] = std::move(m);
            }
        cur = std::move(next);
        if (residual < tol) {
            if (report) *report = {it, residual};
            return cur;
        }
    }
    throw ConvergenceError("BP did not converge in " + std::to_string(max_iters) + " iterations",
                           residual);
}

BpReport bp_gauge(PepsState& s, double tol, int max_iters) {
    const Incidence& g = s.graph();
    BpReport report;
    const BpMessages msgs = bp_messages(s, tol, max_iters, &report);
    const double floor = s.options().lambda_floor;

    // sqrt(lambda)-convention tensors, computed before touching any weights
    std::vector<Tensor> dressed(g.n);
    for (int v = 0; v < g.n; ++v) {
        Tensor t = s.site_tensor(v);
        for (int e : g.incident[v])
            scale_axis(t, s.bond_axis(v, e), pow_weights(s.bond_weights(e), 0.5, floor));
        dressed[v] = std::move(t);
    }

    // per edge: gauge pair (G for ends[0], H for ends[1]) and new weights
    std::vector<Tensor> gauge(2 * g.ends.size());
    std::vector<std::vector<double>> new_lam(g.ends.size());
    for (std::size_t e = 0; e < g.ends.size(); ++e) {
        const std::vector<double> lam = s.bond_weights(int(e));
        const std::vector<double> inv_root = pow_weights(lam, -0.5, floor);
        auto tilde = [&](int d) {
            Tensor m = msgs.from(int(e), d);
            scale_axis(m, 0, inv_root);
            scale_axis(m, 1, inv_root);
            return m;
        };
        const Tensor x = herm_sqrt(tilde(0));
        const Tensor y = herm_sqrt(tilde(1));
        SvdResult svd = svd_truncate(matmul(transpose(y), x), {0}, lam.size(), 1e-12);
        const std::size_t k = svd.singular_values.size(), n = lam.size();
        std::vector<double> inv_sigma_root(k);
        for (std::size_t i = 0; i < k; ++i) inv_sigma_root[i] = 1.0 / std::sqrt(svd.singular_values[i]);

        Tensor pc = conj(svd.left);       // [n, k]
        scale_axis(pc, 1, inv_sigma_root);
        Tensor q({n, k});                 // right = Q^H
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < n; ++j) q[j * k + i] = std::conj(svd.right[i * n + j]);
        scale_axis(q, 1, inv_sigma_root);

        gauge[2 * e] = matmul(y, pc);     // applies to ends[0]'s bond axis
        gauge[2 * e + 1] = matmul(x, q);  // applies to ends[1]'s bond axis
        std::vector<double> nl(k);
        for (std::size_t i = 0; i < k; ++i) nl[i] = svd.singular_values[i] / svd.singular_values[0];
        new_lam[e] = std::move(nl);
    }

    for (int v = 0; v < g.n; ++v) {
        Tensor t = std::move(dressed[v]);
        for (int e : g.incident[v]) {
            const std::size_t ax = s.bond_axis(v, e);
            const int side = g.ends[e][0] == v ? 0 : 1;
            t = contract(t, gauge[2 * e + side], {{ax, 0}});
            // contracted axis is appended last; rotate it back into place
            std::vector<std::size_t> perm(t.rank());
            for (std::size_t i = 0, src = 0; i < t.rank(); ++i)
                perm[i] = (i == ax) ? t.rank() - 1 : src++;
            t = permute(t, perm);
            scale_axis(t, ax, pow_weights(new_lam[e], -0.5, floor));
        }
        s.site_tensor(v) = std::move(t);
    }
    for (std::size_t e = 0; e < g.ends.size(); ++e) s.bond_weights(int(e)) = new_lam[e];
    return report;
}

} // namespace gpeps
