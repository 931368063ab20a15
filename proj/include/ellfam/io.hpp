#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "lattice.hpp"
#include "rational_family.hpp"
#include "sheets.hpp"
#include "torus_family.hpp"

namespace ellfam
{

using json = nlohmann::json;

inline constexpr int schema_version = 1;

/// Result of load_family_config().
using FamilyConfig = std::variant<RationalFamilySpec, TorusFamilySpec>;

/// Periods and tolerance for the lattice commands.
struct LatticeConfig
{
    Lattice lattice;
    double tol = 1e-12;
};

namespace detail
{

inline std::string read_text(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "' for reading");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void require_keys(const json &j, const std::string &where, std::initializer_list<const char *> required,
                         std::initializer_list<const char *> optional = {})
{
    if (!j.is_object()) {
        throw SchemaError(where + " must be a JSON object");
    }
    std::set<std::string> known;
    for (const char *k : required) {
        known.insert(k);
        if (!j.contains(k)) {
            throw SchemaError(where + ": missing field '" + k + "'");
        }
    }
    for (const char *k : optional) {
        known.insert(k);
    }
    for (const auto &item : j.items()) {
        if (!known.count(item.key())) {
            throw SchemaError(where + ": unknown field '" + item.key() + "'");
        }
    }
}

inline double get_number(const json &j, const std::string &where)
{
    if (!j.is_number()) {
        throw SchemaError(where + " must be a number");
    }
    return j.get<double>();
}

inline int get_int(const json &j, const std::string &where)
{
    if (!j.is_number_integer()) {
        throw SchemaError(where + " must be an integer");
    }
    return j.get<int>();
}

inline cplx get_complex(const json &j, const std::string &where)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw SchemaError(where + " must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline std::vector<cplx> get_complex_list(const json &j, const std::string &where)
{
    if (!j.is_array()) {
        throw SchemaError(where + " must be an array of [re, im] pairs");
    }
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_complex(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline std::vector<int> get_int_list(const json &j, const std::string &where)
{
    if (!j.is_array()) {
        throw SchemaError(where + " must be an array of integers");
    }
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(get_int(j[i], where + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline std::vector<TargetPath> get_paths(const json &j)
{
    if (!j.is_array()) {
        throw SchemaError("paths must be an array");
    }
    std::vector<TargetPath> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string where = "paths[" + std::to_string(i) + "]";
        require_keys(j[i], where, {"start", "delta"});
        out.push_back({get_complex(j[i]["start"], where + ".start"), get_complex(j[i]["delta"], where + ".delta")});
    }
    return out;
}

inline void check_version(const json &j)
{
    if (!j.contains("v")) {
        throw SchemaError("missing schema version field 'v'");
    }
    if (!j["v"].is_number_integer() || j["v"].get<int>() != schema_version) {
        throw SchemaError("unsupported schema version (expected \"v\": 1)");
    }
}

}

inline json to_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

inline json to_json(const std::vector<cplx> &v)
{
    json out = json::array();
    for (const cplx z : v) {
        out.push_back(to_json(z));
    }
    return out;
}

inline json to_json(const std::vector<TargetPath> &paths)
{
    json out = json::array();
    for (const auto &p : paths) {
        out.push_back({{"start", to_json(p.start)}, {"delta", to_json(p.delta)}});
    }
    return out;
}

/// Parses text as JSON; throws ParseError on malformed input.
inline json parse_json(const std::string &text, const std::string &source = "input")
{
    try {
        return json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(source + ": " + e.what());
    }
}

/// Builds and validates a family spec from a parsed configuration document.
inline FamilyConfig parse_family_config(const json &j)
{
    if (!j.is_object()) {
        throw SchemaError("configuration must be a JSON object");
    }
    detail::check_version(j);
    if (!j.contains("family") || !j["family"].is_string()) {
        throw SchemaError("missing string field 'family'");
    }
    const std::string family = j["family"].get<std::string>();
    if (family == "rational") {
        detail::require_keys(j, "rational config", {"v", "family", "m", "n", "a0", "b0", "paths"});
        RationalFamilySpec spec;
        spec.m = detail::get_int_list(j["m"], "m");
        spec.n = detail::get_int_list(j["n"], "n");
        spec.a0 = detail::get_complex_list(j["a0"], "a0");
        spec.b0 = detail::get_complex_list(j["b0"], "b0");
        spec.paths = detail::get_paths(j["paths"]);
        validate(spec);
        return spec;
    }
    if (family == "torus") {
        detail::require_keys(j, "torus config", {"v", "family", "n", "initial", "paths"});
        TorusFamilySpec spec;
        spec.n = detail::get_int(j["n"], "n");
        const json &init = j["initial"];
        if (init.is_string()) {
            if (init.get<std::string>() != "p2m4p") {
                throw SchemaError("unknown initial preset '" + init.get<std::string>() + "'");
            }
            spec.initial = torus_initial_p2m4p();
        } else {
            detail::require_keys(init, "initial", {"a", "c", "omega2"});
            spec.initial.a = detail::get_complex_list(init["a"], "initial.a");
            spec.initial.c = detail::get_complex(init["c"], "initial.c");
            spec.initial.omega2 = detail::get_complex(init["omega2"], "initial.omega2");
        }
        spec.paths = detail::get_paths(j["paths"]);
        validate(spec);
        return spec;
    }
    throw SchemaError("family must be \"rational\" or \"torus\"");
}

/// Reads a family configuration file (schema version 1).
inline FamilyConfig load_family_config(const std::string &path)
{
    return parse_family_config(parse_json(detail::read_text(path), path));
}

inline json family_config_to_json(const RationalFamilySpec &spec)
{
    return {{"v", schema_version}, {"family", "rational"}, {"m", spec.m}, {"n", spec.n},
            {"a0", to_json(spec.a0)}, {"b0", to_json(spec.b0)}, {"paths", to_json(spec.paths)}};
}

inline json family_config_to_json(const TorusFamilySpec &spec)
{
    json init = {{"a", to_json(spec.initial.a)}, {"c", to_json(spec.initial.c)},
                 {"omega2", to_json(spec.initial.omega2)}};
    return {{"v", schema_version}, {"family", "torus"}, {"n", spec.n}, {"initial", init},
            {"paths", to_json(spec.paths)}};
}

inline LatticeConfig parse_lattice_config(const json &j)
{
    detail::check_version(j);
    detail::require_keys(j, "lattice config", {"v", "omega1", "omega2"}, {"tol"});
    LatticeConfig cfg;
    cfg.lattice = make_lattice(detail::get_complex(j["omega1"], "omega1"), detail::get_complex(j["omega2"], "omega2"));
    if (j.contains("tol")) {
        cfg.tol = detail::get_number(j["tol"], "tol");
        if (!(cfg.tol > 0.0)) {
            throw ValidationError("tolerance must be positive");
        }
    }
    return cfg;
}

inline LatticeConfig load_lattice_config(const std::string &path)
{
    return parse_lattice_config(parse_json(detail::read_text(path), path));
}

/// Writes \p text to \p path, replacing any existing file.
inline void write_text(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

namespace detail
{

inline std::string fmt15(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

inline std::string fmt_coord(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    std::string s = buf;
    return s == "-0.000000" ? "0.000000" : s;
}

inline void csv_columns(std::string &header, const std::string &name, std::size_t count, std::size_t first)
{
    for (std::size_t i = 0; i < count; ++i) {
        const std::string idx = name + "_" + std::to_string(i + first);
        header += ",re(" + idx + "),im(" + idx + ")";
    }
}

inline void csv_values(std::string &row, const std::vector<cplx> &v)
{
    for (const cplx z : v) {
        row += "," + fmt15(z.real()) + "," + fmt15(z.imag());
    }
}

}

/// CSV with columns t, re(a_1), im(a_1), ..., re(b_N), im(b_N); 15 significant digits.
inline std::string trajectory_csv(const std::vector<RationalFamilyState> &states, std::size_t M, std::size_t N)
{
    std::string out = "t";
    detail::csv_columns(out, "a", M, 1);
    detail::csv_columns(out, "b", N, 1);
    out += "\n";
    for (const auto &s : states) {
        std::string row = detail::fmt15(s.t);
        detail::csv_values(row, s.a);
        detail::csv_values(row, s.b);
        out += row + "\n";
    }
    return out;
}

/// CSV with columns t, a_0..a_n, c, omega2 as real/imaginary pairs.
inline std::string trajectory_csv(const std::vector<TorusFamilyState> &states, std::size_t n)
{
    std::string out = "t";
    detail::csv_columns(out, "a", n + 1, 0);
    out += ",re(c),im(c),re(omega2),im(omega2)\n";
    for (const auto &s : states) {
        std::string row = detail::fmt15(s.t);
        detail::csv_values(row, s.a);
        detail::csv_values(row, {s.c, s.omega2});
        out += row + "\n";
    }
    return out;
}

inline json trajectory_json(const std::vector<RationalFamilyState> &states)
{
    json pts = json::array();
    for (const auto &s : states) {
        pts.push_back({{"t", s.t}, {"a", to_json(s.a)}, {"b", to_json(s.b)}});
    }
    return {{"v", schema_version}, {"family", "rational"}, {"checkpoints", pts}};
}

inline json trajectory_json(const std::vector<TorusFamilyState> &states)
{
    json pts = json::array();
    for (const auto &s : states) {
        pts.push_back({{"t", s.t}, {"a", to_json(s.a)}, {"c", to_json(s.c)}, {"omega2", to_json(s.omega2)}});
    }
    return {{"v", schema_version}, {"family", "torus"}, {"checkpoints", pts}};
}

/// Standard base64 with padding.
inline std::string base64_encode(const std::vector<std::uint8_t> &bytes)
{
    static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 2 < bytes.size(); i += 3) {
        const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += table[(v >> 6) & 63];
        out += table[v & 63];
    }
    if (i + 1 == bytes.size()) {
        const unsigned v = bytes[i] << 16;
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += "==";
    } else if (i + 2 == bytes.size()) {
        const unsigned v = (bytes[i] << 16) | (bytes[i + 1] << 8);
        out += table[(v >> 18) & 63];
        out += table[(v >> 12) & 63];
        out += table[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string &text)
{
    auto value = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<std::uint8_t> out;
    unsigned acc = 0;
    int bits = 0;
    for (char c : text) {
        if (c == '=') {
            break;
        }
        const int v = value(c);
        if (v < 0) {
            throw ParseError("invalid base64 character");
        }
        acc = (acc << 6) | static_cast<unsigned>(v);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xff));
        }
    }
    return out;
}

/// JSON form of a sheet field: bounds, grid size, base64 labels and contour coordinates.
inline json sheet_field_json(const SheetField &f, double alpha)
{
    json contours = json::object();
    static constexpr std::array<const char *, 3> names{"gamma01", "gamma02", "gamma12"};
    for (std::size_t p = 0; p < 3; ++p) {
        json lines = json::array();
        for (const auto &line : f.contours[p]) {
            lines.push_back(to_json(line));
        }
        contours[names[p]] = lines;
    }
    return {{"v", schema_version},
            {"alpha", alpha},
            {"bounds", {f.bounds.x0, f.bounds.x1, f.bounds.y0, f.bounds.y1}},
            {"nx", f.nx},
            {"ny", f.ny},
            {"labels", base64_encode(f.labels)},
            {"contours", contours}};
}

/// SVG picture of a sheet field: filled label runs plus the three contour families.
/**
 * The y axis is flipped so that the picture has the usual orientation; the viewBox covers the
 * grid bounds exactly.
 */
inline std::string sheet_field_svg(const SheetField &f)
{
    using detail::fmt_coord;
    static constexpr std::array<const char *, 3> fills{"#f4d35e", "#9ad1d4", "#ee964b"};
    static constexpr std::array<const char *, 3> strokes{"#3d5a80", "#7b2cbf", "#c1121f"};
    const double w = f.bounds.x1 - f.bounds.x0, h = f.bounds.y1 - f.bounds.y0;
    const double dx = w / static_cast<double>(f.nx - 1), dy = h / static_cast<double>(f.ny - 1);
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << fmt_coord(f.bounds.x0) << ' '
        << fmt_coord(-f.bounds.y1) << ' ' << fmt_coord(w) << ' ' << fmt_coord(h) << "\" width=\"800\" height=\""
        << static_cast<int>(std::lround(800.0 * h / w)) << "\">\n";
    for (std::size_t label = 0; label < 3; ++label) {
        out << "<g id=\"S" << label << "\" fill=\"" << fills[label] << "\" stroke=\"none\">\n";
        for (std::size_t j = 0; j < f.ny; ++j) {
            std::size_t i = 0;
            while (i < f.nx) {
                if (f.label(i, j) != label) {
                    ++i;
                    continue;
                }
                std::size_t k = i;
                while (k < f.nx && f.label(k, j) == label) {
                    ++k;
                }
                const double x = std::max(f.bounds.x0, f.bounds.x0 + (static_cast<double>(i) - 0.5) * dx);
                const double xe = std::min(f.bounds.x1, f.bounds.x0 + (static_cast<double>(k) - 0.5) * dx);
                const double y = std::min(f.bounds.y1, f.bounds.y0 + (static_cast<double>(j) + 0.5) * dy);
                const double ye = std::max(f.bounds.y0, f.bounds.y0 + (static_cast<double>(j) - 0.5) * dy);
                out << "<rect x=\"" << fmt_coord(x) << "\" y=\"" << fmt_coord(-y) << "\" width=\""
                    << fmt_coord(xe - x) << "\" height=\"" << fmt_coord(y - ye) << "\"/>\n";
                i = k;
            }
        }
        out << "</g>\n";
    }
    static constexpr std::array<const char *, 3> ids{"gamma01", "gamma02", "gamma12"};
    for (std::size_t p = 0; p < 3; ++p) {
        out << "<g id=\"" << ids[p] << "\" fill=\"none\" stroke=\"" << strokes[p]
            << "\" stroke-width=\"" << fmt_coord(std::max(dx, dy)) << "\">\n";
        for (const auto &line : f.contours[p]) {
            out << "<polyline points=\"";
            for (std::size_t q = 0; q < line.size(); ++q) {
                out << (q ? " " : "") << fmt_coord(line[q].real()) << ',' << fmt_coord(-line[q].imag());
            }
            out << "\"/>\n";
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}
