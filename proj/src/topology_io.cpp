#include "topobias/topology_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "topobias/number_format.hpp"

namespace topobias {

namespace {

constexpr std::string_view kMagic = "# topobias-topology v1,";

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path.string() + ": line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

void check_label(const std::string& label) {
    if (label.empty()) throw std::invalid_argument("generator label must not be empty");
    if (label.find(',') != std::string::npos || label.find('\n') != std::string::npos)
        throw std::invalid_argument("generator label must not contain ',' or newline");
}

double parse_coord(const std::filesystem::path& path, std::size_t line, std::string_view field) {
    double v = 0.0;
    if (!parse_double(field, v))
        fail(path, line, "invalid number '" + std::string(field) + "'");
    return v;
}

}  // namespace

std::string topology_csv_string(const Topology& t) {
    check_label(t.generator_label);
    std::string out;
    out.reserve(32 + t.node_count() * 24);
    out += kMagic;
    out += "D=";
    out += format_double(t.area_side);
    out += ",generator=";
    out += t.generator_label;
    out += ",seed=";
    out += t.seed ? std::to_string(*t.seed) : std::string("none");
    out += "\nid,x,y\n";
    char buf[64];
    for (std::size_t i = 0; i < t.node_count(); ++i) {
        const int len = std::snprintf(buf, sizeof(buf), "%zu,%.6f,%.6f\n", i, t.nodes[i].x,
                                      t.nodes[i].y);
        out.append(buf, static_cast<std::size_t>(len));
    }
    return out;
}

void write_topology_csv(const Topology& t, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << topology_csv_string(t);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Topology read_topology_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    Topology t;
    std::string line;
    std::size_t lineno = 1;

    if (!std::getline(in, line)) fail(path, 1, "empty file");
    std::string_view header = strip_cr(line);
    if (header.substr(0, kMagic.size()) != kMagic)
        fail(path, 1, "missing 'topobias-topology v1' header");
    header.remove_prefix(kMagic.size());
    const auto fields = split_fields(header);
    if (fields.size() != 3 || fields[0].substr(0, 2) != "D=" ||
        fields[1].substr(0, 10) != "generator=" || fields[2].substr(0, 5) != "seed=")
        fail(path, 1, "header must carry D=, generator= and seed= fields");
    if (!parse_double(fields[0].substr(2), t.area_side) || !(t.area_side > 0.0))
        fail(path, 1, "invalid area side '" + std::string(fields[0].substr(2)) + "'");
    t.generator_label = std::string(fields[1].substr(10));
    if (t.generator_label.empty()) fail(path, 1, "empty generator label");
    const std::string_view seed_field = fields[2].substr(5);
    if (seed_field == "none") {
        t.seed.reset();
    } else {
        std::uint64_t seed = 0;
        if (!parse_u64(seed_field, seed))
            fail(path, 1, "invalid seed '" + std::string(seed_field) + "'");
        t.seed = seed;
    }

    ++lineno;
    if (!std::getline(in, line) || strip_cr(line) != "id,x,y")
        fail(path, 2, "expected column header 'id,x,y'");

    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = strip_cr(line);
        if (row.empty()) continue;  // tolerate a trailing blank line
        const auto f = split_fields(row);
        if (f.size() != 3)
            fail(path, lineno, "expected 3 fields, found " + std::to_string(f.size()));
        std::size_t id = 0;
        if (!parse_size(f[0], id)) fail(path, lineno, "invalid id '" + std::string(f[0]) + "'");
        if (id != t.node_count())
            fail(path, lineno, "ids must be contiguous from 0; expected " +
                                   std::to_string(t.node_count()) + ", found " + std::to_string(id));
        Point p;
        p.x = parse_coord(path, lineno, f[1]);
        p.y = parse_coord(path, lineno, f[2]);
        t.nodes.push_back(p);
    }
    t.id = path.stem().string();
    return t;
}

Topology import_topology(const std::filesystem::path& path, double area_side,
                         const std::string& label, bool headerless) {
    check_label(label);
    if (!(area_side > 0.0)) throw std::invalid_argument("import: area_side must be positive");

    Topology t;
    if (headerless) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        t.area_side = area_side;
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string_view row = strip_cr(line);
            if (row.empty()) continue;
            const auto f = split_fields(row);
            if (f.size() != 2)
                fail(path, lineno, "expected 2 fields, found " + std::to_string(f.size()));
            Point p;
            p.x = parse_coord(path, lineno, f[0]);
            p.y = parse_coord(path, lineno, f[1]);
            t.nodes.push_back(p);
        }
        t.id = path.stem().string();
    } else {
        t = read_topology_csv(path);
        if (t.area_side != area_side)
            throw std::runtime_error(path.string() + ": file declares D=" +
                                     format_double(t.area_side) + " but the import expects D=" +
                                     format_double(area_side));
    }

    t.generator_label = label;
    t.seed.reset();
    if (t.nodes.empty()) throw std::runtime_error(path.string() + ": no nodes");

    const ValidationResult v = validate_topology(t);
    if (!v.ok())
        throw std::runtime_error(path.string() + ": " + v.violations.front() +
                                 (v.violations.size() > 1
                                      ? " (+" + std::to_string(v.violations.size() - 1) + " more)"
                                      : ""));
    return t;
}

}  // namespace topobias
