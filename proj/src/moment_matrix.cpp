#include "psaa/moment_matrix.hpp"

#include <stdexcept>

namespace psaa {

MatrixLayout localizing_layout(const SparsePoly &p, int n, int d) {
    if (p.vars() != n) throw std::invalid_argument("localizing_layout: variable count mismatch");
    if (p.degree() > 2 * d) throw std::invalid_argument("localizing_layout: deg(p) exceeds 2d");
    const int t = d - (p.degree() + 1) / 2;

    MatrixLayout layout;
    layout.n = n;
    layout.row_labels = monomial_basis(n, t);
    layout.side = static_cast<int>(layout.row_labels.size());
    layout.entries.resize(static_cast<std::size_t>(layout.side) * (layout.side + 1) / 2);
    for (int j = 0; j < layout.side; ++j) {
        for (int i = 0; i <= j; ++i) {
            const MultiIndex pair_deg = layout.row_labels[static_cast<std::size_t>(i)].plus(
                layout.row_labels[static_cast<std::size_t>(j)]);
            auto &terms = layout.entries[layout.upper_index(i, j)];
            terms.reserve(p.terms().size());
            for (const auto &[gamma, c] : p.terms()) {
                terms.push_back({c, grlex_rank(gamma.plus(pair_deg))});
            }
        }
    }
    return layout;
}

MatrixLayout moment_layout(int n, int d) { return localizing_layout(SparsePoly::constant(n, 1.0), n, d); }

Eigen::MatrixXd assemble(const MatrixLayout &layout, const Tms &y) {
    const std::int64_t dim = static_cast<std::int64_t>(y.values().size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(layout.side, layout.side);
    for (int j = 0; j < layout.side; ++j) {
        for (int i = 0; i <= j; ++i) {
            double v = 0.0;
            for (const LayoutTerm &t : layout.entries[layout.upper_index(i, j)]) {
                if (t.y_rank >= dim) throw std::out_of_range("assemble: y rank out of bounds");
                v += t.coefficient * y[t.y_rank];
            }
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    return m;
}

ConeSpec cone_spec(const std::vector<SparsePoly> &g, int n, int d) {
    ConeSpec spec;
    spec.n = n;
    spec.d = d;
    spec.moment = moment_layout(n, d);
    spec.localizers.reserve(g.size());
    for (const auto &gi : g) spec.localizers.emplace_back(gi, localizing_layout(gi, n, d));
    return spec;
}

} // namespace psaa
