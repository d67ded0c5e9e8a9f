#pragma once

// Serialization: the binary .pss symbol format, JSON dumps of symbols, forms,
// Gaussians, functionals and reports, and CSV rows for seminorm tables.
//
// .pss layout (little-endian): 16-byte magic "PHASESPACESYM\0\0\0", u32 dim,
// dim x u32 N_i, dim x f64 L_i, then prod N_i complex values as interleaved
// f64 (re, im), row-major.

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "grid.hpp"
#include "gsnorm.hpp"
#include "moyal.hpp"
#include "oracle.hpp"
#include "symplectic.hpp"
#include "twisted.hpp"

namespace moyalkit::io {

using json = nlohmann::json;

inline constexpr std::array<char, 16> pss_magic = {'P', 'H', 'A', 'S', 'E', 'S', 'P', 'A',
                                                   'C', 'E', 'S', 'Y', 'M', '\0', '\0', '\0'};

namespace detail {

template <class T>
void put_le(std::ostream& os, T value) {
    std::array<unsigned char, sizeof(T)> bytes;
    std::memcpy(bytes.data(), &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    os.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    std::array<unsigned char, sizeof(T)> bytes;
    if (!is.read(reinterpret_cast<char*>(bytes.data()), sizeof(T)))
        throw Error(ErrorKind::FormatError, "truncated .pss stream");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    T value;
    std::memcpy(&value, bytes.data(), sizeof(T));
    return value;
}

}  // namespace detail

inline void write_pss(std::ostream& os, const SampledSymbol& f) {
    const PhaseGrid& g = f.grid();
    os.write(pss_magic.data(), pss_magic.size());
    detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
    for (int n : g.points()) detail::put_le<std::uint32_t>(os, static_cast<std::uint32_t>(n));
    for (double l : g.half_extent()) detail::put_le<double>(os, l);
    for (const cd& v : f.values()) {
        detail::put_le<double>(os, v.real());
        detail::put_le<double>(os, v.imag());
    }
}

inline SampledSymbol read_pss(std::istream& is) {
    std::array<char, 16> magic{};
    if (!is.read(magic.data(), magic.size()) || magic != pss_magic)
        throw Error(ErrorKind::FormatError, "missing .pss magic");
    const auto dim = detail::get_le<std::uint32_t>(is);
    if (dim == 0 || dim > static_cast<std::uint32_t>(max_grid_dim))
        throw Error(ErrorKind::FormatError, ".pss dimension out of range");
    std::vector<int> points(dim);
    std::vector<double> extent(dim);
    for (auto& n : points) n = static_cast<int>(detail::get_le<std::uint32_t>(is));
    for (auto& l : extent) l = detail::get_le<double>(is);
    PhaseGrid grid;
    try {
        grid = PhaseGrid(extent, points);
    } catch (const Error& e) {
        throw Error(ErrorKind::FormatError, std::string(".pss header: ") + e.what());
    }
    std::vector<cd> values(grid.size());
    for (auto& v : values) {
        const double re = detail::get_le<double>(is);
        const double im = detail::get_le<double>(is);
        v = {re, im};
    }
    return {grid, std::move(values)};
}

inline void save_pss(const std::filesystem::path& path, const SampledSymbol& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::FormatError, "cannot open " + path.string() + " for writing");
    write_pss(os, f);
}

inline SampledSymbol load_pss(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
    return read_pss(is);
}

// ---------------------------------------------------------------------------
// JSON

inline json complex_to_json(cd z) { return json::array({z.real(), z.imag()}); }

inline cd complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2) throw Error(ErrorKind::FormatError, "complex value must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json grid_to_json(const PhaseGrid& g) {
    return {{"dim", g.dim()}, {"points", g.points()}, {"half_extent", g.half_extent()}};
}

inline PhaseGrid grid_from_json(const json& j) {
    try {
        return {j.at("half_extent").get<std::vector<double>>(), j.at("points").get<std::vector<int>>()};
    } catch (const json::exception& e) {
        throw Error(ErrorKind::FormatError, std::string("grid: ") + e.what());
    }
}

inline json symbol_to_json(const SampledSymbol& f) {
    json values = json::array();
    for (const cd& v : f.values()) values.push_back(complex_to_json(v));
    json j = grid_to_json(f.grid());
    j["values"] = std::move(values);
    return j;
}

inline SampledSymbol symbol_from_json(const json& j) {
    const PhaseGrid grid = grid_from_json(j);
    const json& vals = j.at("values");
    if (!vals.is_array() || vals.size() != grid.size())
        throw Error(ErrorKind::FormatError, "symbol value count does not match the grid");
    std::vector<cd> values;
    values.reserve(grid.size());
    for (const auto& v : vals) values.push_back(complex_from_json(v));
    return {grid, std::move(values)};
}

inline json form_to_json(const SkewForm& f) { return {{"dim", f.dim()}, {"upper", f.upper()}}; }

inline SkewForm form_from_json(const json& j) {
    try {
        return {j.at("dim").get<int>(), j.at("upper").get<std::vector<double>>()};
    } catch (const json::exception& e) {
        throw Error(ErrorKind::FormatError, std::string("form: ") + e.what());
    }
}

inline json gaussian_to_json(const GaussianSymbol& g) {
    json a = json::array(), b = json::array();
    for (const cd& z : g.upper()) a.push_back(complex_to_json(z));
    for (Eigen::Index i = 0; i < g.b().size(); ++i) b.push_back(complex_to_json(g.b()[i]));
    return {{"A_upper", a}, {"b", b}, {"c", complex_to_json(g.c())}};
}

inline GaussianSymbol gaussian_from_json(const json& j) {
    const json& b = j.at("b");
    const int d = static_cast<int>(b.size());
    std::vector<cd> upper;
    for (const auto& z : j.at("A_upper")) upper.push_back(complex_from_json(z));
    CVec bv(d);
    for (int i = 0; i < d; ++i) bv[i] = complex_from_json(b[i]);
    return GaussianSymbol::from_upper(d, upper, bv, complex_from_json(j.at("c")));
}

inline json vec_to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vec vec_from_json(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Regular functionals are written with their source path only; an empty
// path means the samples were never stored and the caller must save them.
inline json functional_to_json(const Functional& v) {
    return std::visit(
        [](const auto& x) -> json {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Delta>) {
                return {{"kind", "delta"}, {"location", vec_to_json(x.location)}};
            } else if constexpr (std::is_same_v<T, PointMasses>) {
                json masses = json::array();
                for (const auto& m : x.masses)
                    masses.push_back({{"location", vec_to_json(m.location)}, {"weight", complex_to_json(m.weight)}});
                return {{"kind", "pointmasses"}, {"masses", masses}};
            } else {
                return {{"kind", "regular"}, {"path", x.source_path}, {"growth_exponent", x.growth_exponent}};
            }
        },
        v.value());
}

// Relative .pss paths resolve against base_dir.
inline Functional functional_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "delta") return Functional::delta(vec_from_json(j.at("location")));
        if (kind == "pointmasses") {
            std::vector<PointMass> masses;
            for (const auto& m : j.at("masses"))
                masses.push_back({vec_from_json(m.at("location")), complex_from_json(m.at("weight"))});
            return Functional::point_masses(std::move(masses));
        }
        if (kind == "regular") {
            std::filesystem::path p = j.at("path").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            return Functional::regular(load_pss(p), j.value("growth_exponent", 0.0), p.string());
        }
        throw Error(ErrorKind::FormatError, "unknown functional kind '" + kind + "'");
    } catch (const json::exception& e) {
        throw Error(ErrorKind::FormatError, std::string("functional: ") + e.what());
    }
}

inline json series_report_to_json(const SeriesReport& r) {
    json ratios = json::array();
    for (double x : r.ratios) ratios.push_back(std::isfinite(x) ? json(x) : json("inf"));
    return {{"order", r.order_reached},
            {"term_norms", r.term_norms},
            {"ratios", ratios},
            {"converged", r.converged},
            {"derivatives", {to_string(r.method1), to_string(r.method2)}},
            {"grid", grid_to_json(r.partial.grid())}};
}

inline json seminorm_report_to_json(const SeminormSpec& s, const SeminormReport& r) {
    return {{"N", s.N},
            {"B", s.B},
            {"beta", s.beta},
            {"K", s.K},
            {"value", r.value},
            {"argmax_node", r.argmax_node},
            {"argmax_kappa", r.argmax_kappa},
            {"per_order", r.per_order}};
}

inline std::string seminorm_csv_header() { return "N,B,beta,K,value,argmax_node,argmax_kappa"; }

inline std::string seminorm_csv_row(const SeminormSpec& s, const SeminormReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << s.N << ',' << s.B << ',' << s.beta << ',' << s.K << ',' << r.value << ',' << r.argmax_node << ',';
    for (std::size_t i = 0; i < r.argmax_kappa.size(); ++i) os << (i ? ";" : "") << r.argmax_kappa[i];
    return os.str();
}

}  // namespace moyalkit::io
