#pragma once

#include "cgvariants/sparse_matrix.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cgv {

struct ParseError : std::runtime_error {
    enum class Code {
        MalformedHeader,
        NotSquare,
        NonRealField,
        PatternField,
        UnsupportedSymmetry,
        IndexOutOfBounds,
        NotSymmetric,
        Malformed,
    };

    ParseError(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
    Code code;
};

/// Parses Matrix Market text (coordinate or array, real, general or
/// symmetric). Symmetric storage is expanded to full storage, duplicate
/// coordinate entries are summed, and explicit zeros are dropped. The result
/// is validated to be square and symmetric.
SparseMatrix parse_matrix_market(std::string_view text);

SparseMatrix read_matrix_market_file(const std::filesystem::path& path);

/// Writes coordinate/real/general with full storage and round-trip precision:
/// parsing the output reproduces the CSR arrays bit-for-bit.
std::string write_matrix_market(const SparseMatrix& a);

} // namespace cgv
