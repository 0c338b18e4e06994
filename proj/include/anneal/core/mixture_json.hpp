#pragma once

#include <json.hpp>

#include "anneal/core/mixture.hpp"

namespace anneal {

// {"weights":[...],"means":[[...]],"covariances":[[[...]]]}. A covariance
// given as a flat vector is read as a diagonal; a scalar as isotropic.
Mixture mixture_from_json(const nlohmann::json& j);
nlohmann::json mixture_to_json(const Mixture& gmm);

Gaussian gaussian_from_json(const nlohmann::json& j);
nlohmann::json gaussian_to_json(const Gaussian& g);

}  // namespace anneal
