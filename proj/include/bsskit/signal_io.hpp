#pragma once

// Plain-text matrix files: a `rows cols` header line, then one
// whitespace-separated row per line.

#include <iosfwd>
#include <string>

#include "bsskit/linalg.hpp"

namespace bsskit {

void write_matrix(std::ostream& out, const Matrix& m);
Matrix read_matrix(std::istream& in);

void save_matrix(const std::string& path, const Matrix& m);
Matrix load_matrix(const std::string& path);

}  // namespace bsskit
