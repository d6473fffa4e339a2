#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "qre/characterize.hpp"
#include "qre/empirics.hpp"
#include "qre/games.hpp"
#include "qre/strategy.hpp"
#include "qre/verify.hpp"

namespace qre {

// Insertion-ordered JSON keeps CLI output byte-stable across runs.
using Json = nlohmann::ordered_json;

Json strategy_to_json(const Strategy& s);                  // {"knots": [[t,p],...]}
Strategy strategy_from_json(const Json& j);
std::string strategy_to_csv(const Strategy& s);            // two columns t,p
Strategy strategy_from_csv(std::istream& in);

Json game_to_json(const GameSpec& g);                      // {"game":"vd","params":{...}}
GameSpec game_from_json(const Json& j);

Json type_set_to_json(const TypeSet& s);
Json ne_to_json(const NeDescription& ne);
Json report_to_json(const VerificationReport& rep);
Json curve_to_json(const QuantalResponseCurve& c);
std::string curve_to_csv(const QuantalResponseCurve& c);   // two columns d,q
Json trace_to_json(const SymmetricConstructionTrace& tr);
Json test_result_to_json(const TestResult& r);
Json kernel_to_json(const KernelEstimate& est);
std::string kernel_to_csv(const KernelEstimate& est);      // s, sigma_hat, count
Json monotonicity_to_json(const MonotonicityReport& rep);
Json symmetry_checks_to_json(const CompromiseSymmetryReport& rep);

} // namespace qre
