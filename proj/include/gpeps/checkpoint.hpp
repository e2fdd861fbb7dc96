#pragma once

#include "gpeps/peps.hpp"

#include <iosfwd>
#include <string>

namespace gpeps {

/// Binary state container: graph, options, bond weights, site tensors,
/// step history, truncation bookkeeping.  Round-trips bit-exactly.
void save_checkpoint(const PepsState& s, std::ostream& out);
void save_checkpoint(const PepsState& s, const std::string& path);

PepsState load_checkpoint(std::istream& in);
PepsState load_checkpoint(const std::string& path);

} // namespace gpeps
