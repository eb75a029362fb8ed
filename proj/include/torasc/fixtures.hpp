#pragma once

#include <cstddef>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "torasc/funcspec.hpp"

namespace torasc {

struct Fixture {
  std::string name;
  std::string description;
  FunctionSpec f;
};

const std::vector<Fixture>& builtin_fixtures();
// Throws InputError for an unknown name.
const Fixture& builtin_fixture(const std::string& name);

// {"name", "description", "n", "terms"}; dump(2) of it is byte-stable.
nlohmann::json fixture_json(const Fixture& fx);

// Four monomials with exponents in 0..6 and coefficients in 1..5, redrawn
// until the origin is outside the Newton polyhedron.
FunctionSpec random_polynomial_phase(std::size_t n, std::mt19937_64& rng);

}  // namespace torasc
