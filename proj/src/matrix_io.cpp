#include "topobias/matrix_io.hpp"

#include <fstream>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "topobias/number_format.hpp"

namespace topobias {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line, const std::string& what) {
    throw std::runtime_error(path.string() + ": line " + std::to_string(line) + ": " + what);
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(start));
            return fields;
        }
        fields.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

}  // namespace

std::string features_csv_string(const FeatureMatrix& m) {
    std::string out = "topology_id,generator";
    for (const FeatureDescriptor& d : m.catalogue.slots()) {
        out += ',';
        out += d.name;
    }
    out += '\n';
    for (const FeatureRow& row : m.rows) {
        if (row.values.size() != m.catalogue.size())
            throw std::runtime_error("features row '" + row.topology_id + "' has " +
                                     std::to_string(row.values.size()) + " values, catalogue has " +
                                     std::to_string(m.catalogue.size()));
        out += row.topology_id;
        out += ',';
        out += row.generator_label;
        for (double v : row.values) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

void write_features_csv(const FeatureMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << features_csv_string(m);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

FeatureMatrix read_features_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) fail(path, 1, "empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header = split(line);
    if (header.size() < 3 || header[0] != "topology_id" || header[1] != "generator")
        fail(path, 1, "header must start with 'topology_id,generator'");
    header.erase(header.begin(), header.begin() + 2);

    FeatureMatrix m;
    m.catalogue = FeatureCatalogue::from_names(header);

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::vector<std::string> fields = split(line);
        if (fields.size() != m.catalogue.size() + 2)
            fail(path, lineno, "expected " + std::to_string(m.catalogue.size() + 2) +
                                   " fields, found " + std::to_string(fields.size()));
        FeatureRow row;
        row.topology_id = fields[0];
        row.generator_label = fields[1];
        if (row.topology_id.empty()) fail(path, lineno, "empty topology id");
        if (row.generator_label.empty()) fail(path, lineno, "empty generator label");
        row.values.reserve(m.catalogue.size());
        for (std::size_t i = 2; i < fields.size(); ++i) {
            double v = 0.0;
            if (!parse_double(fields[i], v))
                fail(path, lineno, "invalid number '" + fields[i] + "'");
            row.values.push_back(v);
        }
        m.rows.push_back(std::move(row));
    }
    return m;
}

}  // namespace topobias
