#pragma once

#include "heatframe/dyadic.hpp"
#include "heatframe/frame.hpp"
#include "heatframe/grid.hpp"
#include "heatframe/operators.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace heatframe {

static_assert(std::endian::native == std::endian::little,
              "file formats are little-endian; byte-swapped hosts are not supported");

/// Lossless float64 text (17 significant digits).
inline std::string fmt_f64(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

namespace detail {

inline void write_bytes(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}
inline void read_bytes(std::istream& in, void* p, std::size_t n) {
    if (!in.read(static_cast<char*>(p), static_cast<std::streamsize>(n)))
        throw std::runtime_error("unexpected end of file");
}
template <typename T>
void write_pod(std::ostream& out, T v) {
    write_bytes(out, &v, sizeof(T));
}
template <typename T>
T read_pod(std::istream& in) {
    T v;
    read_bytes(in, &v, sizeof(T));
    return v;
}

} // namespace detail

// ---- grid function files: magic "HFGF", u32 dim, u32 n, then (re, im) f64 pairs

inline void write_grid_function(const std::string& path, const GridFunction& f) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("HFGF", 4);
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(f.domain.dim));
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(f.domain.n));
    for (int i = 0; i < f.values.size(); ++i) {
        detail::write_pod<double>(out, f.values[i].real());
        detail::write_pod<double>(out, f.values[i].imag());
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GridFunction read_grid_function(const std::string& path, double side = 1.0) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    char magic[4];
    detail::read_bytes(in, magic, 4);
    if (std::memcmp(magic, "HFGF", 4) != 0)
        throw std::runtime_error(path + ": not a grid-function file (bad magic)");
    auto dim = detail::read_pod<std::uint32_t>(in);
    auto n = detail::read_pod<std::uint32_t>(in);
    GridDomain dom(static_cast<int>(dim), static_cast<int>(n), side);
    Vec values(dom.total_points());
    for (int i = 0; i < values.size(); ++i) {
        double re = detail::read_pod<double>(in);
        double im = detail::read_pod<double>(in);
        values[i] = Complex(re, im);
    }
    return GridFunction(dom, std::move(values));
}

// ---- coefficient CSV: header then one "j,tau,re,im" row per cube

inline void write_coefficients_csv(const std::string& path, const FrameCoefficients& coeffs) {
    std::ofstream out(path, std::ios::binary); // binary keeps LF endings everywhere
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "j,tau,re,im\n";
    for (int j = coeffs.params.j_min; j <= coeffs.params.j_max; ++j) {
        const Vec& e = coeffs.entries[static_cast<size_t>(j - coeffs.params.j_min)];
        for (int tau = 0; tau < e.size(); ++tau)
            out << j << ',' << tau << ',' << fmt_f64(e[tau].real()) << ','
                << fmt_f64(e[tau].imag()) << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Reads coefficients and checks the key set matches the net exactly.
inline FrameCoefficients read_coefficients_csv(const std::string& path, const DyadicNet& net) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    FrameCoefficients coeffs;
    coeffs.params = net.params;
    std::vector<std::vector<bool>> seen;
    for (const auto& sn : net.scales) {
        coeffs.entries.emplace_back(Vec::Zero(static_cast<Eigen::Index>(sn.cubes.size())));
        seen.emplace_back(sn.cubes.size(), false);
    }
    std::string line;
    if (!std::getline(in, line) || line.rfind("j,tau,re,im", 0) != 0)
        throw std::runtime_error(path + ": missing coefficient CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        int j = 0, tau = 0;
        double re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &j, &tau, &re, &im) != 4)
            throw std::runtime_error(path + ": bad coefficient row: " + line);
        if (j < net.params.j_min || j > net.params.j_max)
            throw std::runtime_error(path + ": scale out of range in row: " + line);
        auto& sn = net.scale(j);
        if (tau < 0 || tau >= static_cast<int>(sn.cubes.size()))
            throw std::runtime_error(path + ": cube index out of range in row: " + line);
        coeffs.at(j, tau) = Complex(re, im);
        seen[static_cast<size_t>(j - net.params.j_min)][static_cast<size_t>(tau)] = true;
    }
    for (size_t s = 0; s < seen.size(); ++s)
        for (bool b : seen[s])
            if (!b)
                throw std::runtime_error(path + ": coefficient set does not cover the net");
    return coeffs;
}

// ---- spectral cache: magic "HFRM", version, dim, n, kind, parameter hash,
//      then eigenvalues and row-major eigenvectors

inline std::uint64_t operator_parameter_hash(const OperatorModel& op) {
    std::uint64_t h = fnv1a64(to_string(op.kind));
    double side = op.domain.side;
    h = fnv1a64(&side, sizeof(side), h);
    if (op.field.size() > 0)
        h = fnv1a64(op.field.data(), static_cast<std::size_t>(op.field.size()) * sizeof(double), h);
    if (op.kind == OperatorKind::custom)
        h = fnv1a64(op.matrix.data(),
                    static_cast<std::size_t>(op.matrix.size()) * sizeof(double), h);
    return h;
}

inline std::string spectral_cache_path(const std::string& dir, const OperatorModel& op) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(operator_parameter_hash(op)));
    return dir + "/op-" + std::to_string(op.domain.dim) + "-" + std::to_string(op.domain.n) +
           "-" + buf + ".hfrm";
}

inline void save_spectral_cache(const std::string& path, const OperatorModel& op) {
    const SpectralData& sd = spectral_decompose(op);
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out.write("HFRM", 4);
    detail::write_pod<std::uint32_t>(out, 1u); // version
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(op.domain.dim));
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(op.domain.n));
    detail::write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(op.kind));
    detail::write_pod<std::uint64_t>(out, operator_parameter_hash(op));
    const int m = op.domain.total_points();
    for (int i = 0; i < m; ++i) detail::write_pod<double>(out, sd.eigenvalues[i]);
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) detail::write_pod<double>(out, sd.eigenvectors(r, c));
    if (!out) throw std::runtime_error("write failed: " + path);
}

/// Loads the cached decomposition into the model if the file matches it;
/// returns false (untouched model) otherwise.
inline bool load_spectral_cache(const std::string& path, const OperatorModel& op) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[4];
    try {
        detail::read_bytes(in, magic, 4);
        if (std::memcmp(magic, "HFRM", 4) != 0) return false;
        if (detail::read_pod<std::uint32_t>(in) != 1u) return false;
        if (detail::read_pod<std::uint32_t>(in) != static_cast<std::uint32_t>(op.domain.dim))
            return false;
        if (detail::read_pod<std::uint32_t>(in) != static_cast<std::uint32_t>(op.domain.n))
            return false;
        if (detail::read_pod<std::uint32_t>(in) != static_cast<std::uint32_t>(op.kind))
            return false;
        if (detail::read_pod<std::uint64_t>(in) != operator_parameter_hash(op)) return false;
        const int m = op.domain.total_points();
        auto data = std::make_shared<SpectralData>();
        data->eigenvalues.resize(m);
        data->eigenvectors.resize(m, m);
        for (int i = 0; i < m; ++i) data->eigenvalues[i] = detail::read_pod<double>(in);
        for (int r = 0; r < m; ++r)
            for (int c = 0; c < m; ++c) data->eigenvectors(r, c) = detail::read_pod<double>(in);
        op.spectral = data;
        return true;
    } catch (const std::runtime_error&) {
        return false;
    }
}

} // namespace heatframe
