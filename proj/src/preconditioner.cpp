#include "cgvariants/preconditioner.hpp"

#include <algorithm>
#include <stdexcept>

namespace cgv {

Preconditioner Preconditioner::identity() {
    return Preconditioner{};
}

Preconditioner Preconditioner::jacobi(const SparseMatrix& a) {
    Preconditioner m;
    m.kind = Kind::Jacobi;
    m.inv_diag.assign(static_cast<std::size_t>(a.n), 0.0);
    for (Index i = 0; i < a.n; ++i) {
        double d = 0.0;
        bool found = false;
        for (Index k = a.row_ptr[i]; k < a.row_ptr[i + 1]; ++k) {
            if (a.col_idx[k] == i) {
                d = a.values[k];
                found = true;
                break;
            }
        }
        if (!found || d <= 0.0)
            throw std::invalid_argument("Jacobi preconditioner needs a positive diagonal");
        m.inv_diag[i] = 1.0 / d;
    }
    return m;
}

void Preconditioner::apply(std::span<const double> in, std::span<double> out) const {
    if (in.size() != out.size()) throw std::invalid_argument("preconditioner dimension mismatch");
    if (kind == Kind::Identity) {
        std::copy(in.begin(), in.end(), out.begin());
        return;
    }
    if (in.size() != inv_diag.size())
        throw std::invalid_argument("preconditioner dimension mismatch");
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = inv_diag[i] * in[i];
}

DenseVector Preconditioner::apply(const DenseVector& in) const {
    DenseVector out(in.size());
    apply(in, out);
    return out;
}

std::string_view preconditioner_name(Preconditioner::Kind k) {
    return k == Preconditioner::Kind::Identity ? "none" : "jacobi";
}

} // namespace cgv
