#pragma once

#include <string>

#include "nearcomm/approx.hpp"
#include "nearcomm/complex_matrix.hpp"

namespace nearcomm {

// {"dim": n, "re": [[...]], "im": [[...]]} with row-major nested arrays.
// Numbers carry 17 significant digits, so write/read round-trips are exact
// and the emitted text is deterministic byte for byte.
std::string matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Matrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const Matrix& m);

// {"eps","delta_eps","dX","dOmega","residual","bound_dX","bound_dOmega",
//  "C","scale_factor","params":{"delta_exp","beta_exp"}}
std::string certificate_to_json(const ApproxCertificate& cert);
ApproxCertificate certificate_from_json(const std::string& text);

}  // namespace nearcomm
