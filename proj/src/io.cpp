#include "subdiag/io.hpp"

#include <fstream>

namespace subdiag {

namespace {

using nlohmann::json;

std::vector<std::vector<double>> parse_grid(const json& j, const std::string& field, int n) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw ParseError(field, "expected an array of " + std::to_string(n) + " rows");
    std::vector<std::vector<double>> rows;
    rows.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        const std::string rf = field + "[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ParseError(rf, "expected a row of " + std::to_string(n) + " numbers");
        std::vector<double> vals;
        vals.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const json& cell = row[static_cast<std::size_t>(k)];
            if (!cell.is_number())
                throw ParseError(rf + "[" + std::to_string(k) + "]", "expected a number");
            vals.push_back(cell.get<double>());
        }
        rows.push_back(std::move(vals));
    }
    return rows;
}

}  // namespace

MatrixFile matrix_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("(root)", "expected a JSON object");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw ParseError("n", "expected an integer dimension");
    const int n = j["n"].get<int>();
    if (n < 1) throw ParseError("n", "dimension must be positive");

    std::vector<int> blocks;
    if (j.contains("blocks")) {
        if (!j["blocks"].is_array()) throw ParseError("blocks", "expected an array of integers");
        int sum = 0;
        for (std::size_t i = 0; i < j["blocks"].size(); ++i) {
            const json& b = j["blocks"][i];
            if (!b.is_number_integer() || b.get<int>() < 1)
                throw ParseError("blocks[" + std::to_string(i) + "]", "expected a positive integer");
            blocks.push_back(b.get<int>());
            sum += blocks.back();
        }
        if (sum != n) throw ParseError("blocks", "block sizes must sum to n");
    } else {
        blocks.assign(static_cast<std::size_t>(n), 1);
    }

    if (!j.contains("matrix") || !j["matrix"].is_object())
        throw ParseError("matrix", "expected an object with re / im grids");
    const json& jm = j["matrix"];
    if (!jm.contains("re")) throw ParseError("matrix.re", "missing");
    const auto re = parse_grid(jm["re"], "matrix.re", n);
    std::vector<std::vector<double>> im;
    if (jm.contains("im")) im = parse_grid(jm["im"], "matrix.im", n);

    CMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
            m(i, k) = Complex(re[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                              im.empty() ? 0.0
                                         : im[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
    if (!m.allFinite()) throw ParseError("matrix", "entries must be finite");
    return MatrixFile{BlockStructure(std::move(blocks)), std::move(m)};
}

MatrixFile read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, "cannot open file");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(path, std::string("invalid JSON: ") + e.what());
    }
    return matrix_from_json(j);
}

nlohmann::json matrix_to_json(const CMatrix& m, const BlockStructure& bs) {
    const int n = bs.dim();
    json re = json::array(), im = json::array();
    for (int i = 0; i < n; ++i) {
        json rrow = json::array(), irow = json::array();
        for (int k = 0; k < n; ++k) {
            rrow.push_back(m(i, k).real());
            irow.push_back(m(i, k).imag());
        }
        re.push_back(std::move(rrow));
        im.push_back(std::move(irow));
    }
    return json{{"n", n}, {"blocks", bs.sizes()}, {"matrix", {{"re", re}, {"im", im}}}};
}

void write_matrix_file(const std::string& path, const CMatrix& m, const BlockStructure& bs) {
    std::ofstream out(path);
    if (!out) throw ParseError(path, "cannot open file for writing");
    out << matrix_to_json(m, bs).dump(2) << "\n";
}

}  // namespace subdiag
