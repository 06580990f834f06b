#pragma once

#include <random>
#include <vector>

#include "incnls/field.hpp"

namespace incnls_test {

// Deterministic corpus of smooth, rapidly decaying complex radial fields
// (sums of Gaussian bumps within r < 20).
std::vector<incnls::RadialField> make_corpus(const incnls::GridPtr& g, int count,
                                             unsigned seed);

}  // namespace incnls_test
