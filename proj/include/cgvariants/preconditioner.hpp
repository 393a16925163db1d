#pragma once

#include "cgvariants/sparse_matrix.hpp"
#include "cgvariants/types.hpp"

#include <span>
#include <string_view>

namespace cgv {

/// Positive definite operator applied as a map. Identity returns its input
/// bit-exactly; Jacobi multiplies elementwise by 1/diag(A).
struct Preconditioner {
    enum class Kind { Identity, Jacobi };

    Kind kind = Kind::Identity;
    std::vector<double> inv_diag; // Jacobi only

    static Preconditioner identity();

    /// Throws std::invalid_argument if any diagonal entry is missing or <= 0.
    static Preconditioner jacobi(const SparseMatrix& a);

    void apply(std::span<const double> in, std::span<double> out) const;
    DenseVector apply(const DenseVector& in) const;

    bool is_identity() const { return kind == Kind::Identity; }
};

std::string_view preconditioner_name(Preconditioner::Kind k);

} // namespace cgv
