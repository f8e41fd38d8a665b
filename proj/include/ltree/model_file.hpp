#pragma once

#include <iosfwd>
#include <string>

#include "ltree/latent_model.hpp"

namespace ltree {

/// Plain-text model description, one statement per line, '#' comments:
///
///   leaf X1 3            observed variable with 3 states
///   hidden H1 2          hidden variable with 2 states
///   edge X1 H1
///   root H1              optional; defaults to the first hidden node
///   marginal H1          followed by one line of root probabilities
///   cpt X1 H1            P(X1 | H1): followed by one line per X1 state,
///                        one column per H1 state
///
/// Leaves become sample columns in declaration order. Columns off by at
/// most 1e-6 from summing to one are renormalized; anything else, and any
/// structural problem, throws DataError naming the line.
LatentModel read_model(std::istream& in);
LatentModel read_model_file(const std::string& path);

void write_model(std::ostream& out, const LatentModel& model);
void write_model_file(const std::string& path, const LatentModel& model);

} // namespace ltree
