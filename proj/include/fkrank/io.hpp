#pragma once

// JSON interchange for matrices, maps, forms, regions, measures and
// decomposition results; CSV for grid measures.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fkrank/decomp.hpp"
#include "fkrank/fkdet.hpp"
#include "fkrank/maps.hpp"
#include "fkrank/region.hpp"

namespace fkrank::io {

using json = nlohmann::json;

/// {"n": n, "data": [[re, im], ...]} with n^2 entries, row-major.
json to_json(const CMatrix& x);
CMatrix matrix_from_json(const json& j);

/// {"n": n, "kind": "linear"|"conjugate", "op": [[re, im] x n^4]} row-major over op.
json to_json(const MatrixMap& f);
MatrixMap map_from_json(const json& j);

/// {"a": matrix, "b": matrix, "jordan": "identity"|"transpose", "conjugated": bool}
json to_json(const MapForm& form);
MapForm form_from_json(const json& j);

/// {"kind": "disk", "center": [re, im], "radius": r}, {"kind": "halfplane",
/// "normal": [re, im], "offset": c}, {"kind": "singleton", "point": [re, im],
/// "tolerance": t}, {"kind": "complement", "child": region} and
/// {"kind": "union"|"intersection", "children": [region, ...]}.
json to_json(const RegionPredicate& region);
RegionPredicate region_from_json(const json& j);

/// {"atoms": [{"loc": [re, im], "num": k, "den": n}, ...]}
json to_json(const BrownMeasure& mu);
BrownMeasure measure_from_json(const json& j);

json to_json(const DecompositionResult& r);

/// Rows "re,im,mass" for every cell, 15 significant digits.
void write_grid_csv(std::ostream& out, const GridMeasure& g);

json to_json_complex(Complex z);
Complex complex_from_json(const json& j);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

/// "%.15g"
std::string format_number(double v);

}  // namespace fkrank::io
