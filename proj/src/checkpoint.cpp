#include "gpeps/checkpoint.hpp"
#include "gpeps/errors.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace gpeps {

namespace {

constexpr char kMagic[8] = {'G', 'P', 'E', 'P', 'S', 'C', 'K', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw InvalidArgument("checkpoint: truncated stream");
    return v;
}

} // namespace

void save_checkpoint(const PepsState& s, std::ostream& out) {
    const Incidence& g = s.graph();
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, 1); // version
    put<std::int32_t>(out, g.n);
    put<std::uint64_t>(out, g.ends.size());
    for (const auto& e : g.ends) {
        put<std::int32_t>(out, e[0]);
        put<std::int32_t>(out, e[1]);
    }
    put<std::uint64_t>(out, graph_hash(g));
    put<std::uint64_t>(out, s.options().chi_max);
    put<double>(out, s.options().lambda_floor);
    put<std::int32_t>(out, s.options().threads);
    put<double>(out, s.max_truncation_error());
    put<std::uint64_t>(out, s.history().size());
    for (const StepRecord& r : s.history()) {
        put<double>(out, r.theta_h);
        put<std::uint8_t>(out, r.direction == Direction::Adjoint ? 1 : 0);
    }
    for (std::size_t e = 0; e < g.ends.size(); ++e) {
        const auto& lam = s.bond_weights(int(e));
        put<std::uint64_t>(out, lam.size());
        out.write(reinterpret_cast<const char*>(lam.data()),
                  std::streamsize(lam.size() * sizeof(double)));
    }
    for (int v = 0; v < g.n; ++v) {
        const Tensor& t = s.site_tensor(v);
        put<std::uint64_t>(out, t.rank());
        for (std::size_t a = 0; a < t.rank(); ++a) put<std::uint64_t>(out, t.dim(a));
        out.write(reinterpret_cast<const char*>(t.data()), std::streamsize(t.size() * sizeof(cplx)));
    }
    if (!out) throw InvalidArgument("checkpoint: write failed");
}

void save_checkpoint(const PepsState& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("checkpoint: cannot open " + path + " for writing");
    save_checkpoint(s, out);
}

PepsState load_checkpoint(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw InvalidArgument("checkpoint: bad magic");
    if (get<std::uint32_t>(in) != 1) throw InvalidArgument("checkpoint: unsupported version");

    Incidence g;
    g.n = get<std::int32_t>(in);
    const std::uint64_t m = get<std::uint64_t>(in);
    if (g.n < 1 || m > (1u << 24)) throw InvalidArgument("checkpoint: implausible graph size");
    g.incident.resize(g.n);
    for (std::uint64_t e = 0; e < m; ++e) {
        const int a = get<std::int32_t>(in), b = get<std::int32_t>(in);
        if (a < 0 || a >= g.n || b < 0 || b >= g.n)
            throw InvalidArgument("checkpoint: edge endpoint out of range");
        g.ends.push_back({a, b});
        g.incident[a].push_back(int(e));
        if (b != a) g.incident[b].push_back(int(e));
    }
    if (get<std::uint64_t>(in) != graph_hash(g))
        throw InvalidArgument("checkpoint: graph hash mismatch");

    PepsOptions opts;
    opts.chi_max = get<std::uint64_t>(in);
    opts.lambda_floor = get<double>(in);
    opts.threads = get<std::int32_t>(in);
    const double max_trunc = get<double>(in);

    PepsState s(g, opts);
    s.set_max_truncation_error(max_trunc);
    const std::uint64_t steps = get<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < steps; ++i) {
        StepRecord r;
        r.theta_h = get<double>(in);
        r.direction = get<std::uint8_t>(in) ? Direction::Adjoint : Direction::Forward;
        s.history().push_back(r);
    }
    for (std::uint64_t e = 0; e < m; ++e) {
        std::vector<double> lam(get<std::uint64_t>(in));
        in.read(reinterpret_cast<char*>(lam.data()), std::streamsize(lam.size() * sizeof(double)));
        if (!in) throw InvalidArgument("checkpoint: truncated stream");
        s.bond_weights(int(e)) = std::move(lam);
    }
    for (int v = 0; v < g.n; ++v) {
        std::vector<std::size_t> shape(get<std::uint64_t>(in));
        if (shape.size() != 1 + g.incident[v].size())
            throw InvalidArgument("checkpoint: tensor rank mismatch");
        for (auto& d : shape) d = get<std::uint64_t>(in);
        Tensor t(shape);
        in.read(reinterpret_cast<char*>(t.data()), std::streamsize(t.size() * sizeof(cplx)));
        if (!in) throw InvalidArgument("checkpoint: truncated stream");
        s.site_tensor(v) = std::move(t);
    }
    return s;
}

PepsState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("checkpoint: cannot open " + path);
    return load_checkpoint(in);
}

} // namespace gpeps
