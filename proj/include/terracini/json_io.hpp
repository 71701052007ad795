#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "terracini/cones.hpp"
#include "terracini/errors.hpp"
#include "terracini/hyperbolic.hpp"
#include "terracini/neighborly.hpp"
#include "terracini/recovery.hpp"
#include "terracini/tangent.hpp"
#include "terracini/veronese.hpp"

// JSON encodings shared by the command-line tool and the tests. Matrices are
// arrays of rows; polyhedral generators are given as an array of generators.
namespace terracini::io {

using nlohmann::json;

json to_json(const Vec& v);
json to_json(const Mat& m);
Vec vec_from_json(const json& j);
Mat mat_from_json(const json& j);

// "psd:d", "orthant:d", "square-cone", "veronese:n:2d", "esym:d:l",
// "hankel-det:d".
ConeModel builtin_cone(const std::string& name);
// {"kind": "polyhedral", "generators": [[...], ...]} | {"kind": "orthant", "d"}
// | {"kind": "psd", "d"} | {"kind": "veronese", "n", "two_d"}
// | {"kind": "hyperbolicity", "poly": "x1*x2", "e": [...]}
// | {"kind": "linear_image", "base": {...}, "map": [[...], ...]}
// A bare string is looked up as a built-in name.
ConeModel cone_from_json(const json& j);
json cone_to_json(const ConeModel& c);

// Array of coordinate arrays, or a named dataset ("blekherman-s").
std::vector<Vec> points_from_json(const json& j);

json to_json(const TerraciniVerdict& v);
json to_json(const NeighborlinessVerdict& v);
json to_json(const HyperbolicSpectrum& s);
json to_json(const Subspace& s);
json to_json(const TangentDerivativeReport& r);
json to_json(const RecoveryTrial& t);
json to_json(const RecoveryReport& r);
json to_json(const StudyReport& r);
json to_json(const GrowthCertificate& g);
json to_json(const KwCertificate& k);

json error_json(ErrorKind kind, const std::string& detail);

// Flattens scalars to "path,value" lines (arrays of numbers joined by ';').
std::string to_csv(const json& j);

}  // namespace terracini::io
