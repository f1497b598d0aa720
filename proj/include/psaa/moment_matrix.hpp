#ifndef PSAA_MOMENT_MATRIX_HPP
#define PSAA_MOMENT_MATRIX_HPP

#include <Eigen/Dense>
#include <vector>

#include "psaa/tms.hpp"

namespace psaa {

/// One linear functional of y: sum of coefficient * y[rank] terms.
struct LayoutTerm {
    double coefficient;
    std::int64_t y_rank;
};

/// A moment-type matrix as a linear map over a tms. Only the upper triangle
/// (i <= j) is stored; entry (i,j) lives at upper_index(i, j).
struct MatrixLayout {
    int n = 0;
    int side = 0;
    std::vector<MultiIndex> row_labels;
    std::vector<std::vector<LayoutTerm>> entries;

    std::size_t upper_index(int i, int j) const {
        // Column-major upper triangle: (i, j) with i <= j.
        return static_cast<std::size_t>(j) * (static_cast<std::size_t>(j) + 1) / 2 + static_cast<std::size_t>(i);
    }
    const std::vector<LayoutTerm> &entry(int i, int j) const {
        return entries[i <= j ? upper_index(i, j) : upper_index(j, i)];
    }
};

/// The d-th localizing matrix of p: entry (i,j) carries R_y(p * x^bi * x^bj),
/// with row labels the monomials of degree <= d - ceil(deg(p)/2).
MatrixLayout localizing_layout(const SparsePoly &p, int n, int d);

/// Moment matrix M_d[y]: the localizing matrix of the constant 1.
MatrixLayout moment_layout(int n, int d);

/// Numeric instantiation of a layout at a given tms.
Eigen::MatrixXd assemble(const MatrixLayout &layout, const Tms &y);

/// Membership machinery for the cone S(g)_{2d}: the moment block plus one
/// localizing block per constraint.
struct ConeSpec {
    int n = 0;
    int d = 0;
    MatrixLayout moment;
    std::vector<std::pair<SparsePoly, MatrixLayout>> localizers;
};

ConeSpec cone_spec(const std::vector<SparsePoly> &g, int n, int d);

} // namespace psaa

#endif
