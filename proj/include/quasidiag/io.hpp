#pragma once

#include <string>
#include <utility>

#include <json.hpp>

#include "quasidiag/criteria.hpp"
#include "quasidiag/reductions.hpp"
#include "quasidiag/usd.hpp"

namespace quasidiag {

using Json = nlohmann::ordered_json;

/// A parsed instance file: two weighted states plus whatever metadata the
/// file carried (label, seed, generator parameters).
struct ParsedInstance {
  WeightedState g1;
  WeightedState g2;
  Json metadata;
};

// Complex entries serialize as [re, im]; matrices as row-major arrays of
// rows. Parsing is strict: square, the declared dimension, two-element
// number pairs.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json instance_to_json(const WeightedState& g1, const WeightedState& g2,
                      const Json& metadata = Json::object());

/// Validates dimensions, Hermiticity, positivity and the total-trace bound;
/// throws InvalidInput on violation and Json exceptions on malformed data.
ParsedInstance parse_instance(const Json& j, const Tolerances& tol = {});

ParsedInstance load_instance_file(const std::string& path, const Tolerances& tol = {});

Json tolerances_to_json(const Tolerances& tol);
Json criterion_report_to_json(const CriterionReport& r);
Json reduction_step_to_json(const ReductionStep& s);
Json validation_report_to_json(const ValidationReport& v);

std::string dump_json(const Json& j, bool compact = false);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace quasidiag
