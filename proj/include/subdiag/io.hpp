#pragma once

#include <string>

#include <json.hpp>

#include "subdiag/block_structure.hpp"
#include "subdiag/matrix.hpp"

namespace subdiag {

/// Malformed input; `field` names the offending JSON path.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& field, const std::string& msg)
        : std::runtime_error(field + ": " + msg), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct MatrixFile {
    BlockStructure blocks;
    CMatrix matrix;
};

/// Schema: {"n": int, "blocks": [int,...], "matrix": {"re": [[...]], "im": [[...]]}}
/// Row-major; "im" optional (zeros). Doubles round-trip exactly.
MatrixFile read_matrix_file(const std::string& path);
MatrixFile matrix_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const CMatrix& m, const BlockStructure& bs);
void write_matrix_file(const std::string& path, const CMatrix& m, const BlockStructure& bs);

}  // namespace subdiag
