#include "lrnn/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "lrnn/container.hpp"
#include "lrnn/parallel.hpp"

namespace lrnn {

double OdeSystem::param(std::string_view key) const {
    for (const auto& p : params)
        if (p.name == key) return p.value;
    throw std::out_of_range("system " + name + " has no parameter " + std::string(key));
}

std::string OdeSystem::params_string() const {
    std::string out;
    char buf[64];
    for (const auto& p : params) {
        std::snprintf(buf, sizeof buf, "%.10g", p.value);
        if (!out.empty()) out += ',';
        out += p.name + "=" + buf;
    }
    return out;
}

Trajectory rk4_integrate(const OdeSystem& system, const RVector& input) {
    if (input.size() != system.horizon)
        throw ShapeError("input of length " + std::to_string(input.size()) + " for horizon " +
                         std::to_string(system.horizon));
    if (system.z0.size() != system.state_dim) throw ShapeError("initial state does not match state dimension");
    if (!(system.delta > 0.0)) throw DomainError("step size must be positive");

    const double h = system.delta;
    std::vector<double> values;
    for (const auto& p : system.params) values.push_back(p.value);
    const std::span<const double> params_view(values);

    Trajectory out{RMatrix(system.state_dim, system.horizon), RVector(system.horizon)};
    RVector z = system.z0;
    RVector k1(system.state_dim), k2(system.state_dim), k3(system.state_dim), k4(system.state_dim);
    for (Index k = 0; k < system.horizon; ++k) {
        const double v = input(k);
        system.rhs(z, v, params_view, k1);
        system.rhs(z + 0.5 * h * k1, v, params_view, k2);
        system.rhs(z + 0.5 * h * k2, v, params_view, k3);
        system.rhs(z + h * k3, v, params_view, k4);
        z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!all_finite(z) || z.cwiseAbs().maxCoeff() > kBlowUpBound)
            throw TrajectoryRejected(system.name + " trajectory left |z| <= 1e6 at step " + std::to_string(k + 1));
        out.states.col(k) = z;
        out.outputs(k) = z(system.readout);
    }
    return out;
}

OdeSystem pt_system() {
    OdeSystem s;
    s.name = "pt";
    s.state_dim = 5;
    s.params = {{"k1", 0.07}, {"k2", 0.6}, {"k3", 0.05}, {"k4", 0.3}, {"V", 0.017}, {"Km", 0.3}};
    s.rhs = [](const RVector& z, double v, std::span<const double> p, RVector& dz) {
        const double k1 = p[0], k2 = p[1], k3 = p[2], k4 = p[3], vmax = p[4], km = p[5];
        const double binding = k2 * z(0) * z(2);
        const double mm = vmax * z(4) / (km + z(4));
        dz(0) = -k1 * z(0) - binding + k3 * z(3) + v;
        dz(1) = k1 * z(0);
        dz(2) = -binding + k3 * z(3) + mm;
        dz(3) = binding - (k3 + k4) * z(3);
        dz(4) = k4 * z(3) - mm;
    };
    s.readout = 0;
    s.z0 = (RVector(5) << 1.0, 0.0, 1.0, 0.0, 0.0).finished();
    s.delta = 0.01;
    s.horizon = 2048;
    return s;
}

OdeSystem lv_system() {
    OdeSystem s;
    s.name = "lv";
    s.state_dim = 2;
    s.params = {{"a", 1.0}, {"b", 0.6}, {"c", 1.0}, {"d", 0.7}};
    s.rhs = [](const RVector& z, double v, std::span<const double> p, RVector& dz) {
        dz(0) = z(0) * (p[0] - p[1] * z(1));
        dz(1) = -z(1) * (p[2] - p[3] * z(0)) + v;
    };
    s.readout = 0;
    s.z0 = (RVector(2) << 1.0, 0.5).finished();
    s.delta = 0.01;
    s.horizon = 2048;
    return s;
}

OdeSystem lorenz_system() {
    OdeSystem s;
    s.name = "lorenz";
    s.state_dim = 3;
    s.params = {{"sigma", 10.0}, {"r", 26.0}, {"b", 8.0 / 3.0}};
    s.rhs = [](const RVector& z, double v, std::span<const double> p, RVector& dz) {
        dz(0) = p[0] * (z(1) - z(0));
        dz(1) = (p[1] - z(2)) * z(0) - z(1) + v;
        dz(2) = z(1) * z(0) - p[2] * z(2);
    };
    s.readout = 0;
    s.z0 = (RVector(3) << -0.89229143, 1.08417925, 2.34322702).finished();
    s.delta = 0.002;
    s.horizon = 512;
    return s;
}

OdeSystem ode_system(std::string_view name) {
    if (name == "pt") return pt_system();
    if (name == "lv") return lv_system();
    if (name == "lorenz") return lorenz_system();
    throw std::invalid_argument("unknown ODE system '" + std::string(name) + "' (expected pt, lv or lorenz)");
}

RMatrix low_frequency_basis(Index length, Index n_basis, LowFrequencyFamily family) {
    if (n_basis < 1 || n_basis > length) throw DomainError("basis size must lie in [1, length]");
    if (family == LowFrequencyFamily::haar) return haar_basis(length, n_basis).psi;
    RMatrix phi(length, n_basis);
    for (Index j = 0; j < n_basis; ++j) {
        const double scale = j == 0 ? std::sqrt(1.0 / double(length)) : std::sqrt(2.0 / double(length));
        for (Index t = 0; t < length; ++t)
            phi(t, j) = scale * std::cos(std::numbers::pi * double(j) * (double(t) + 0.5) / double(length));
    }
    return phi;
}

RVector smooth_input_sampler(Index length, Rng& rng, Index n_basis, LowFrequencyFamily family) {
    const RMatrix phi = low_frequency_basis(length, n_basis, family);
    RVector c(n_basis);
    for (Index j = 0; j < n_basis; ++j) c(j) = rng.normal();
    RVector v = phi * c;
    const double peak = v.cwiseAbs().maxCoeff();
    if (peak > 0.0) v /= peak;
    return v;
}

TrajectoryDataset make_ode_dataset(const OdeSystem& system, const OdeDatasetConfig& config) {
    if (config.samples < 1) throw DomainError("dataset needs at least one sample");
    const auto n = std::size_t(config.samples);
    TrajectoryDataset out;
    out.inputs.resize(n);
    out.targets.resize(n);
    std::vector<std::uint64_t> rejected(n, 0);
    const RMatrix phi = low_frequency_basis(system.horizon, config.n_basis, config.family);
    const std::string label = "ode/" + system.name;

    parallel_for(std::ptrdiff_t(n), config.jobs, [&](std::ptrdiff_t i) {
        Rng rng(config.seed, label, std::uint64_t(i));
        for (;;) {
            RVector c(config.n_basis);
            for (Index j = 0; j < config.n_basis; ++j) c(j) = rng.normal();
            RVector v = phi * c;
            const double peak = v.cwiseAbs().maxCoeff();
            if (peak > 0.0) v /= peak;
            try {
                const auto traj = rk4_integrate(system, v);
                out.inputs[std::size_t(i)] = v.transpose();
                out.targets[std::size_t(i)] = traj.outputs.transpose();
                return;
            } catch (const TrajectoryRejected&) {
                ++rejected[std::size_t(i)];
            }
        }
    });
    out.meta.generator = system.name;
    out.meta.seed = config.seed;
    out.meta.params = system.params_string();
    for (auto r : rejected) out.meta.rejected += r;
    return out;
}

RMatrix sparse_signal_sampler(const SparseBasis& basis, Rng& rng, Index n) {
    RMatrix alpha(basis.size(), n);
    for (Index s = 0; s < n; ++s)
        for (Index j = 0; j < basis.size(); ++j) alpha(j, s) = rng.normal();
    return (basis.psi * alpha).transpose();
}

namespace {

std::uint32_t read_be32(std::string_view bytes, std::size_t offset) {
    if (bytes.size() < offset + 4)
        throw FormatError("IDX header truncated at byte offset " + std::to_string(offset), offset);
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
    return v;
}

} // namespace

RMatrix parse_idx_images(std::string_view bytes) {
    const std::uint32_t magic = read_be32(bytes, 0);
    if (magic == 0x00000801)
        throw FormatError("IDX magic 0x00000801 is a label file; expected an image file with magic 0x00000803", 0);
    if (magic != 0x00000803) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "0x%08x", magic);
        throw FormatError(std::string("bad IDX magic ") + buf + " at byte offset 0; expected 0x00000803", 0);
    }
    const std::uint32_t n = read_be32(bytes, 4);
    const std::uint32_t rows = read_be32(bytes, 8);
    const std::uint32_t cols = read_be32(bytes, 12);
    const std::size_t pixels = std::size_t(rows) * cols;
    const std::size_t header = 16;
    const std::size_t needed = header + std::size_t(n) * pixels;
    if (bytes.size() < needed)
        throw FormatError("IDX image data truncated at byte offset " + std::to_string(bytes.size()) + "; expected " +
                              std::to_string(needed) + " bytes",
                          bytes.size());
    RMatrix out(n, Index(pixels));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = 0; p < pixels; ++p)
            out(Index(i), Index(p)) = double(static_cast<unsigned char>(bytes[header + i * pixels + p])) / 255.0;
    return out;
}

RMatrix load_idx_images(const std::filesystem::path& path) { return parse_idx_images(read_file(path)); }

RMatrix synthetic_digits(Index n, Rng& rng) {
    constexpr Index side = 28;
    RMatrix out = RMatrix::Zero(n, side * side);
    for (Index s = 0; s < n; ++s) {
        const Index blobs = 1 + Index(rng.below(3));
        for (Index b = 0; b < blobs; ++b) {
            const double cx = rng.uniform(7.0, 21.0);
            const double cy = rng.uniform(7.0, 21.0);
            const double sx = rng.uniform(1.5, 4.0);
            const double sy = rng.uniform(1.5, 4.0);
            const double angle = rng.uniform(0.0, std::numbers::pi);
            const double amp = rng.uniform(0.6, 1.0);
            const double ca = std::cos(angle), sa = std::sin(angle);
            for (Index r = 0; r < side; ++r)
                for (Index c = 0; c < side; ++c) {
                    const double dx = double(c) - cx, dy = double(r) - cy;
                    const double u = ca * dx + sa * dy;
                    const double w = -sa * dx + ca * dy;
                    out(s, r * side + c) += amp * std::exp(-0.5 * (u * u / (sx * sx) + w * w / (sy * sy)));
                }
        }
    }
    return out.cwiseMin(1.0);
}

RMatrix center_crop(const RMatrix& sequences, Index length) {
    if (length < 1 || length > sequences.cols())
        throw ShapeError("cannot crop sequences of length " + std::to_string(sequences.cols()) + " to " +
                         std::to_string(length));
    return sequences.middleCols((sequences.cols() - length) / 2, length);
}

namespace {
constexpr std::uint32_t kDatasetVersion = 1;

void write_matrices(BinaryWriter& w, const std::vector<RMatrix>& ms) {
    for (const auto& m : ms) {
        w.u32(std::uint32_t(m.rows()));
        w.u32(std::uint32_t(m.cols()));
        w.matrix(m);
    }
}

std::vector<RMatrix> read_matrices(BinaryReader& r, std::uint64_t n) {
    std::vector<RMatrix> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const auto rows = r.u32();
        const auto cols = r.u32();
        out.push_back(r.matrix(rows, cols));
    }
    return out;
}
} // namespace

void save_dataset(const std::filesystem::path& path, const TrajectoryDataset& data) {
    BinaryWriter w;
    w.bytes("DATA");
    w.u32(kDatasetVersion);
    w.str(data.meta.generator);
    w.u64(data.meta.seed);
    w.str(data.meta.params);
    w.u64(data.meta.rejected);
    w.u64(data.size());
    write_matrices(w, data.inputs);
    write_matrices(w, data.targets);
    w.save(path);
}

TrajectoryDataset load_dataset(const std::filesystem::path& path) {
    auto r = BinaryReader::open(path);
    if (r.bytes(4) != "DATA") throw FormatError("not a dataset container (missing DATA magic)", 0);
    if (const auto v = r.u32(); v != kDatasetVersion)
        throw FormatError("unsupported dataset version " + std::to_string(v), 4);
    TrajectoryDataset d;
    d.meta.generator = r.str();
    d.meta.seed = r.u64();
    d.meta.params = r.str();
    d.meta.rejected = r.u64();
    const auto n = r.u64();
    d.inputs = read_matrices(r, n);
    d.targets = read_matrices(r, n);
    if (!r.at_end()) throw FormatError("trailing bytes after dataset", r.offset());
    return d;
}

} // namespace lrnn
