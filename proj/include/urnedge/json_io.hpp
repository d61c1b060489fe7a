#pragma once

#include "urnedge/catalog.hpp"
#include "urnedge/decomposable.hpp"
#include "urnedge/diagnostics.hpp"
#include "urnedge/edgeworth.hpp"
#include "urnedge/oracle.hpp"
#include "urnedge/urn_models.hpp"

#include <json.hpp>

#include <string>

namespace urnedge {

using json = nlohmann::json;

// {"family": "poisson"|"binomial"|"negbinomial", "shapes": [..], "n": int}
// An optional "nu" selects make_gum instead of calibrate.
GumSpec gum_from_json(const json& j);
json gum_to_json(const GumSpec& gum);

// {"builtin": "power", "k": 2} | {"builtin": "indicator", "r": 0}
// | {"tables": [[..], ..]} | {"compound": [{"support": [..], "probs": [..]}, ..]}
Kernel kernel_from_json(const json& j);
json kernel_to_json(const Kernel& kernel);

json to_json(const ExpansionResult& r);
json to_json(const BoundReport& r);
json to_json(const ExactDist& d);
json to_json(const ChiSqParams& p);
json to_json(const SampleSumParams& p);
json to_json(const DixonParams& p);
json to_json(const DiffReport& r);

// Locale-free shortest round-trip formatting with 17 significant digits.
std::string format_double(double v);

// "value,prob" rows with a header line.
std::string exact_dist_csv(const ExactDist& d);

} // namespace urnedge
