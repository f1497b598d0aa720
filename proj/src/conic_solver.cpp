#include "psaa/conic_program.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace psaa::conic {

namespace {

struct SvecEntry {
    int r;
    int c;
    double value; // matrix units (svec scaling removed)
};

struct ProperBlock {
    ConeKind kind;
    int size;   // vector dim, or matrix side for Psd
    int rows;   // row count in the proper section
    int offset; // row offset in the proper section
};

template <typename Scalar> int svec_dim_of(int side) { return side * (side + 1) / 2; }

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mat_to_svec_t(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &m) {
    const int k = static_cast<int>(m.rows());
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(k * (k + 1) / 2);
    const Scalar rt2 = std::sqrt(Scalar(2));
    int idx = 0;
    for (int c = 0; c < k; ++c)
        for (int r = 0; r <= c; ++r, ++idx) v[idx] = r == c ? m(r, c) : rt2 * m(r, c);
    return v;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
svec_to_mat_t(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> &v, int side) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m(side, side);
    const Scalar inv_rt2 = Scalar(1) / std::sqrt(Scalar(2));
    int idx = 0;
    for (int c = 0; c < side; ++c) {
        for (int r = 0; r <= c; ++r, ++idx) {
            const Scalar x = r == c ? v[idx] : v[idx] * inv_rt2;
            m(r, c) = x;
            m(c, r) = x;
        }
    }
    return m;
}

/// One homogeneous self-dual interior-point run at a fixed scalar precision.
/// Nesterov-Todd scaling on all cones, Mehrotra predictor-corrector, and a
/// Cholesky-based reduction of the Newton systems.
template <typename Scalar> class SolverImpl {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    struct SparseCols {
        int rows = 0;
        int cols = 0;
        std::vector<std::vector<std::pair<int, Scalar>>> col;

        Vec multiply(const Vec &x) const {
            Vec y = Vec::Zero(rows);
            for (int j = 0; j < cols; ++j)
                for (const auto &[r, v] : col[static_cast<std::size_t>(j)]) y[r] += v * x[j];
            return y;
        }
        Vec multiply_transpose(const Vec &y) const {
            Vec x = Vec::Zero(cols);
            for (int j = 0; j < cols; ++j) {
                Scalar acc = 0;
                for (const auto &[r, v] : col[static_cast<std::size_t>(j)]) acc += v * y[r];
                x[j] = acc;
            }
            return x;
        }
    };

    struct BlockScaling {
        Vec w;          // Nonneg: W = diag(w)
        Scalar eta = 1; // SecondOrder: W = eta (2 v v' - J)
        Vec v;
        Mat R, Rinv, U; // Psd: W(u) = svec(R' mat(u) R), U = (R R')^{-1}
    };

  public:
    SolverImpl(const ConicProgram &prog, const SolverSettings &settings) : prog_(prog), st_(settings) {
        prepare();
    }

    ConicSolution run();

  private:
    void prepare();
    void compute_scalings();
    void build_reduced_matrix();
    static bool modified_cholesky(const Mat &a, Mat &l);
    void kkt_solve(const Vec &r1, const Vec &r2, const Vec &r3, Vec &dx, Vec &dy, Vec &dz) const;

    Vec apply_W(const Vec &u) const;
    Vec apply_Wt(const Vec &u) const;
    Vec apply_Winft(const Vec &u) const;
    Vec apply_WtW(const Vec &u) const;
    Vec apply_WtW_inv(const Vec &u) const;
    Vec jordan_product(const Vec &u, const Vec &v) const;
    Vec jordan_divide_by_lambda(const Vec &d) const;
    Vec cone_identity() const;
    Scalar max_step(const Vec &u, const Vec &du) const;
    Scalar min_cone_eig(const Vec &u) const;
    bool strictly_interior(const Vec &u) const;

    ConicSolution finish(SolveStatus status);

    const ConicProgram &prog_;
    SolverSettings st_;

    int n_ = 0;
    int p_ = 0;
    int m_ = 0;
    Scalar nu_ = 0;

    SparseCols E_, G_;
    Vec be_, h_, c_;
    Mat edense_;
    // Ruiz-style equilibration scales (cone-safe: per-row on Zero/Nonneg,
    // uniform per SecondOrder block, diagonal congruence per Psd block).
    Vec dcol_, re_, rg_;
    std::vector<ProperBlock> blocks_;
    std::vector<std::vector<std::vector<SvecEntry>>> psd_patterns_;
    std::vector<std::vector<int>> psd_support_;

    std::vector<BlockScaling> scal_;
    Vec lambda_;

    Mat hl_; // Cholesky factor of H = G'(W'W)^{-1} G (+ pivot repair)
    Mat sl_; // Cholesky factor of E H^{-1} E'
    bool factor_ok_ = false;

    Vec x_, y_, z_, s_;
    Scalar tau_ = 1, kappa_ = 1;
    int iterations_ = 0;
};

template <typename Scalar> void SolverImpl<Scalar>::prepare() {
    n_ = prog_.num_vars;
    const int total_rows = prog_.num_rows();
    if (static_cast<int>(prog_.b.size()) != total_rows || static_cast<int>(prog_.c.size()) != n_)
        throw std::invalid_argument("conic::solve: inconsistent program dimensions");

    std::vector<int> dest_offset(prog_.cones.size());
    std::vector<bool> is_eq(prog_.cones.size());
    for (std::size_t bi = 0; bi < prog_.cones.size(); ++bi) {
        const auto &blk = prog_.cones[bi];
        if (blk.size <= 0) throw std::invalid_argument("conic::solve: empty cone block");
        is_eq[bi] = blk.kind == ConeKind::Zero;
        if (is_eq[bi]) {
            dest_offset[bi] = p_;
            p_ += blk.rows();
        } else {
            dest_offset[bi] = m_;
            blocks_.push_back({blk.kind, blk.size, blk.rows(), m_});
            m_ += blk.rows();
            nu_ += blk.kind == ConeKind::Nonneg ? blk.size : (blk.kind == ConeKind::SecondOrder ? 1 : blk.size);
        }
    }

    std::vector<int> row_section(static_cast<std::size_t>(total_rows));
    std::vector<int> row_local(static_cast<std::size_t>(total_rows));
    int orig = 0;
    for (std::size_t bi = 0; bi < prog_.cones.size(); ++bi) {
        for (int r = 0; r < prog_.cones[bi].rows(); ++r) {
            row_section[static_cast<std::size_t>(orig + r)] = is_eq[bi] ? 0 : 1;
            row_local[static_cast<std::size_t>(orig + r)] = dest_offset[bi] + r;
        }
        orig += prog_.cones[bi].rows();
    }

    E_.rows = p_;
    E_.cols = n_;
    E_.col.assign(static_cast<std::size_t>(n_), {});
    G_.rows = m_;
    G_.cols = n_;
    G_.col.assign(static_cast<std::size_t>(n_), {});
    be_ = Vec::Zero(p_);
    h_ = Vec::Zero(m_);
    c_ = prog_.c.template cast<Scalar>();
    for (int r = 0; r < total_rows; ++r) {
        if (row_section[static_cast<std::size_t>(r)] == 0)
            be_[row_local[static_cast<std::size_t>(r)]] = static_cast<Scalar>(prog_.b[r]);
        else
            h_[row_local[static_cast<std::size_t>(r)]] = static_cast<Scalar>(prog_.b[r]);
    }
    for (const auto &t : prog_.a) {
        if (t.row < 0 || t.row >= total_rows || t.col < 0 || t.col >= n_)
            throw std::invalid_argument("conic::solve: triplet out of range");
        if (t.value == 0.0) continue;
        if (row_section[static_cast<std::size_t>(t.row)] == 0)
            E_.col[static_cast<std::size_t>(t.col)].push_back(
                {row_local[static_cast<std::size_t>(t.row)], static_cast<Scalar>(t.value)});
        else
            G_.col[static_cast<std::size_t>(t.col)].push_back(
                {row_local[static_cast<std::size_t>(t.row)], static_cast<Scalar>(t.value)});
    }
    // Equilibrate in double so both precisions solve the identical problem.
    {
        std::vector<double> d(static_cast<std::size_t>(n_), 1.0);
        std::vector<double> re(static_cast<std::size_t>(p_), 1.0);
        std::vector<double> rg(static_cast<std::size_t>(m_), 1.0);
        std::vector<double> rownorm_e(static_cast<std::size_t>(p_));
        std::vector<double> rownorm_g(static_cast<std::size_t>(m_));
        for (int pass = 0; pass < 15; ++pass) {
            std::fill(rownorm_e.begin(), rownorm_e.end(), 0.0);
            std::fill(rownorm_g.begin(), rownorm_g.end(), 0.0);
            for (int j = 0; j < n_; ++j) {
                for (const auto &[r, v] : E_.col[static_cast<std::size_t>(j)])
                    rownorm_e[static_cast<std::size_t>(r)] = std::max(
                        rownorm_e[static_cast<std::size_t>(r)],
                        std::abs(static_cast<double>(v)) * d[static_cast<std::size_t>(j)] * re[static_cast<std::size_t>(r)]);
                for (const auto &[r, v] : G_.col[static_cast<std::size_t>(j)])
                    rownorm_g[static_cast<std::size_t>(r)] = std::max(
                        rownorm_g[static_cast<std::size_t>(r)],
                        std::abs(static_cast<double>(v)) * d[static_cast<std::size_t>(j)] * rg[static_cast<std::size_t>(r)]);
            }
            for (int r = 0; r < p_; ++r)
                if (rownorm_e[static_cast<std::size_t>(r)] > 0.0)
                    re[static_cast<std::size_t>(r)] /= std::sqrt(rownorm_e[static_cast<std::size_t>(r)]);
            for (const auto &blk : blocks_) {
                if (blk.kind == ConeKind::Nonneg) {
                    for (int r = blk.offset; r < blk.offset + blk.rows; ++r)
                        if (rownorm_g[static_cast<std::size_t>(r)] > 0.0)
                            rg[static_cast<std::size_t>(r)] /= std::sqrt(rownorm_g[static_cast<std::size_t>(r)]);
                } else if (blk.kind == ConeKind::SecondOrder) {
                    double mx = 0.0;
                    for (int r = blk.offset; r < blk.offset + blk.rows; ++r)
                        mx = std::max(mx, rownorm_g[static_cast<std::size_t>(r)]);
                    if (mx > 0.0)
                        for (int r = blk.offset; r < blk.offset + blk.rows; ++r)
                            rg[static_cast<std::size_t>(r)] /= std::sqrt(mx);
                } else if (blk.kind == ConeKind::Psd) {
                    // Symmetric Ruiz on the side x side norm profile; row (i,j)
                    // carries the product scale e_i e_j.
                    std::vector<double> mi(static_cast<std::size_t>(blk.size), 0.0);
                    for (int c = 0, k = 0; c < blk.size; ++c) {
                        for (int r = 0; r <= c; ++r, ++k) {
                            const double nv = rownorm_g[static_cast<std::size_t>(blk.offset + k)];
                            mi[static_cast<std::size_t>(r)] = std::max(mi[static_cast<std::size_t>(r)], nv);
                            mi[static_cast<std::size_t>(c)] = std::max(mi[static_cast<std::size_t>(c)], nv);
                        }
                    }
                    std::vector<double> ei(static_cast<std::size_t>(blk.size), 1.0);
                    for (int i = 0; i < blk.size; ++i)
                        if (mi[static_cast<std::size_t>(i)] > 0.0)
                            ei[static_cast<std::size_t>(i)] = 1.0 / std::sqrt(mi[static_cast<std::size_t>(i)]);
                    for (int c = 0, k = 0; c < blk.size; ++c)
                        for (int r = 0; r <= c; ++r, ++k)
                            rg[static_cast<std::size_t>(blk.offset + k)] *=
                                std::sqrt(ei[static_cast<std::size_t>(r)] * ei[static_cast<std::size_t>(c)]);
                }
            }
            std::vector<double> colnorm(static_cast<std::size_t>(n_), 0.0);
            for (int j = 0; j < n_; ++j) {
                for (const auto &[r, v] : E_.col[static_cast<std::size_t>(j)])
                    colnorm[static_cast<std::size_t>(j)] = std::max(
                        colnorm[static_cast<std::size_t>(j)],
                        std::abs(static_cast<double>(v)) * d[static_cast<std::size_t>(j)] * re[static_cast<std::size_t>(r)]);
                for (const auto &[r, v] : G_.col[static_cast<std::size_t>(j)])
                    colnorm[static_cast<std::size_t>(j)] = std::max(
                        colnorm[static_cast<std::size_t>(j)],
                        std::abs(static_cast<double>(v)) * d[static_cast<std::size_t>(j)] * rg[static_cast<std::size_t>(r)]);
                if (colnorm[static_cast<std::size_t>(j)] > 0.0)
                    d[static_cast<std::size_t>(j)] /= std::sqrt(colnorm[static_cast<std::size_t>(j)]);
            }
        }
        dcol_ = Vec(n_);
        re_ = Vec(p_);
        rg_ = Vec(m_);
        for (int j = 0; j < n_; ++j) dcol_[j] = static_cast<Scalar>(d[static_cast<std::size_t>(j)]);
        for (int r = 0; r < p_; ++r) re_[r] = static_cast<Scalar>(re[static_cast<std::size_t>(r)]);
        for (int r = 0; r < m_; ++r) rg_[r] = static_cast<Scalar>(rg[static_cast<std::size_t>(r)]);
        for (int j = 0; j < n_; ++j) {
            for (auto &[r, v] : E_.col[static_cast<std::size_t>(j)]) v *= re_[r] * dcol_[j];
            for (auto &[r, v] : G_.col[static_cast<std::size_t>(j)]) v *= rg_[r] * dcol_[j];
            c_[j] *= dcol_[j];
        }
        be_.array() *= re_.array();
        h_.array() *= rg_.array();
    }

    edense_ = Mat::Zero(p_, n_);
    for (int j = 0; j < n_; ++j)
        for (const auto &[r, v] : E_.col[static_cast<std::size_t>(j)]) edense_(r, j) = v;

    psd_patterns_.assign(blocks_.size(), {});
    psd_support_.assign(blocks_.size(), {});
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        if (blocks_[bi].kind != ConeKind::Psd) continue;
        psd_patterns_[bi].assign(static_cast<std::size_t>(n_), {});
        const int off = blocks_[bi].offset;
        const int rows = blocks_[bi].rows;
        const int side = blocks_[bi].size;
        std::vector<std::pair<int, int>> rc(static_cast<std::size_t>(rows));
        for (int c = 0, k = 0; c < side; ++c)
            for (int r = 0; r <= c; ++r, ++k) rc[static_cast<std::size_t>(k)] = {r, c};
        for (int j = 0; j < n_; ++j) {
            for (const auto &[row, v] : G_.col[static_cast<std::size_t>(j)]) {
                if (row < off || row >= off + rows) continue;
                auto [r, c] = rc[static_cast<std::size_t>(row - off)];
                const double mv = r == c ? static_cast<double>(v) : static_cast<double>(v) / std::numbers::sqrt2;
                psd_patterns_[bi][static_cast<std::size_t>(j)].push_back({r, c, mv});
            }
            if (!psd_patterns_[bi][static_cast<std::size_t>(j)].empty()) psd_support_[bi].push_back(j);
        }
    }
}

template <typename Scalar> auto SolverImpl<Scalar>::cone_identity() const -> Vec {
    Vec e = Vec::Zero(m_);
    for (const auto &blk : blocks_) {
        switch (blk.kind) {
        case ConeKind::Nonneg:
            e.segment(blk.offset, blk.rows).setOnes();
            break;
        case ConeKind::SecondOrder:
            e[blk.offset] = 1;
            break;
        case ConeKind::Psd:
            for (int c = 0, k = 0; c < blk.size; ++c)
                for (int r = 0; r <= c; ++r, ++k)
                    if (r == c) e[blk.offset + k] = 1;
            break;
        default:
            break;
        }
    }
    return e;
}

template <typename Scalar> Scalar SolverImpl<Scalar>::min_cone_eig(const Vec &u) const {
    Scalar m = std::numeric_limits<Scalar>::infinity();
    for (const auto &blk : blocks_) {
        const Vec seg = u.segment(blk.offset, blk.rows);
        switch (blk.kind) {
        case ConeKind::Nonneg:
            m = std::min(m, seg.minCoeff());
            break;
        case ConeKind::SecondOrder:
            m = std::min<Scalar>(m, seg[0] - seg.tail(blk.rows - 1).norm());
            break;
        case ConeKind::Psd: {
            Eigen::SelfAdjointEigenSolver<Mat> es(svec_to_mat_t<Scalar>(seg, blk.size), Eigen::EigenvaluesOnly);
            m = std::min(m, es.eigenvalues().minCoeff());
            break;
        }
        default:
            break;
        }
    }
    return m;
}

template <typename Scalar> bool SolverImpl<Scalar>::strictly_interior(const Vec &u) const {
    for (const auto &blk : blocks_) {
        const Vec seg = u.segment(blk.offset, blk.rows);
        switch (blk.kind) {
        case ConeKind::Nonneg:
            if (!(seg.minCoeff() > Scalar(0))) return false;
            break;
        case ConeKind::SecondOrder:
            if (!(seg[0] > seg.tail(blk.rows - 1).norm())) return false;
            break;
        case ConeKind::Psd: {
            Eigen::LLT<Mat> llt(svec_to_mat_t<Scalar>(seg, blk.size));
            if (llt.info() != Eigen::Success) return false;
            break;
        }
        default:
            break;
        }
    }
    return true;
}

template <typename Scalar> void SolverImpl<Scalar>::compute_scalings() {
    scal_.assign(blocks_.size(), {});
    lambda_ = Vec::Zero(m_);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &blk = blocks_[bi];
        const Vec s = s_.segment(blk.offset, blk.rows);
        const Vec z = z_.segment(blk.offset, blk.rows);
        auto &sc = scal_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg:
            sc.w = (s.array() / z.array()).sqrt();
            lambda_.segment(blk.offset, blk.rows) = (s.array() * z.array()).sqrt();
            break;
        case ConeKind::SecondOrder: {
            Vec Js = s;
            Js.tail(blk.rows - 1) *= Scalar(-1);
            Vec Jz = z;
            Jz.tail(blk.rows - 1) *= Scalar(-1);
            const Scalar rho2 = s.dot(Js);
            const Scalar delta2 = z.dot(Jz);
            if (!(rho2 > Scalar(0)) || !(delta2 > Scalar(0)))
                throw std::runtime_error("soc scaling: point left the cone");
            const Scalar rho = std::sqrt(rho2);
            const Scalar delta = std::sqrt(delta2);
            const Vec sbar = s / rho;
            const Vec zbar = z / delta;
            const Scalar gamma = std::sqrt((Scalar(1) + sbar.dot(zbar)) / Scalar(2));
            Vec wbar = zbar;
            wbar.tail(blk.rows - 1) *= Scalar(-1);
            wbar = (sbar + wbar) / (Scalar(2) * gamma);
            Vec v = wbar;
            v[0] += Scalar(1);
            v /= std::sqrt(Scalar(2) * (wbar[0] + Scalar(1)));
            sc.eta = std::sqrt(rho / delta);
            sc.v = v;
            Vec Wz = Scalar(2) * v * v.dot(z) - Jz;
            lambda_.segment(blk.offset, blk.rows) = sc.eta * Wz;
            break;
        }
        case ConeKind::Psd: {
            const Mat S = svec_to_mat_t<Scalar>(s, blk.size);
            const Mat Z = svec_to_mat_t<Scalar>(z, blk.size);
            Eigen::LLT<Mat> lltS(S), lltZ(Z);
            if (lltS.info() != Eigen::Success || lltZ.info() != Eigen::Success)
                throw std::runtime_error("psd scaling: point left the cone");
            const Mat L1 = lltS.matrixL();
            const Mat L2 = lltZ.matrixL();
            Eigen::BDCSVD<Mat> svd(L2.transpose() * L1, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const Vec sig = svd.singularValues();
            if (!(sig.minCoeff() > Scalar(0))) throw std::runtime_error("psd scaling: singular NT factor");
            const Vec isqrt = sig.array().rsqrt();
            sc.R = L1 * svd.matrixV() * isqrt.asDiagonal();
            sc.Rinv = isqrt.asDiagonal() * svd.matrixU().transpose() * L2.transpose();
            sc.U = sc.Rinv.transpose() * sc.Rinv;
            Mat lam = Mat::Zero(blk.size, blk.size);
            lam.diagonal() = sig;
            lambda_.segment(blk.offset, blk.rows) = mat_to_svec_t<Scalar>(lam);
            break;
        }
        default:
            break;
        }
    }
}

template <typename Scalar> auto SolverImpl<Scalar>::apply_W(const Vec &u) const -> Vec {
    Vec out = Vec::Zero(m_);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &blk = blocks_[bi];
        const Vec seg = u.segment(blk.offset, blk.rows);
        const auto &sc = scal_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg:
            out.segment(blk.offset, blk.rows) = sc.w.array() * seg.array();
            break;
        case ConeKind::SecondOrder: {
            Vec Ju = seg;
            Ju.tail(blk.rows - 1) *= Scalar(-1);
            out.segment(blk.offset, blk.rows) = sc.eta * (Scalar(2) * sc.v * sc.v.dot(seg) - Ju);
            break;
        }
        case ConeKind::Psd:
            out.segment(blk.offset, blk.rows) =
                mat_to_svec_t<Scalar>(sc.R.transpose() * svec_to_mat_t<Scalar>(seg, blk.size) * sc.R);
            break;
        default:
            break;
        }
    }
    return out;
}

template <typename Scalar> auto SolverImpl<Scalar>::apply_Wt(const Vec &u) const -> Vec {
    Vec out = Vec::Zero(m_);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &blk = blocks_[bi];
        const Vec seg = u.segment(blk.offset, blk.rows);
        const auto &sc = scal_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg:
            out.segment(blk.offset, blk.rows) = sc.w.array() * seg.array();
            break;
        case ConeKind::SecondOrder: {
            Vec Ju = seg;
            Ju.tail(blk.rows - 1) *= Scalar(-1);
            out.segment(blk.offset, blk.rows) = sc.eta * (Scalar(2) * sc.v * sc.v.dot(seg) - Ju);
            break;
        }
        case ConeKind::Psd:
            out.segment(blk.offset, blk.rows) =
                mat_to_svec_t<Scalar>(sc.R * svec_to_mat_t<Scalar>(seg, blk.size) * sc.R.transpose());
            break;
        default:
            break;
        }
    }
    return out;
}

template <typename Scalar> auto SolverImpl<Scalar>::apply_Winft(const Vec &u) const -> Vec {
    Vec out = Vec::Zero(m_);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &blk = blocks_[bi];
        const Vec seg = u.segment(blk.offset, blk.rows);
        const auto &sc = scal_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg:
            out.segment(blk.offset, blk.rows) = seg.array() / sc.w.array();
            break;
        case ConeKind::SecondOrder: {
            Vec q = sc.v;
            q.tail(blk.rows - 1) *= Scalar(-1);
            Vec Ju = seg;
            Ju.tail(blk.rows - 1) *= Scalar(-1);
            out.segment(blk.offset, blk.rows) = (Scalar(2) * q * q.dot(seg) - Ju) / sc.eta;
            break;
        }
        case ConeKind::Psd:
            out.segment(blk.offset, blk.rows) =
                mat_to_svec_t<Scalar>(sc.Rinv * svec_to_mat_t<Scalar>(seg, blk.size) * sc.Rinv.transpose());
            break;
        default:
            break;
        }
    }
    return out;
}

template <typename Scalar> auto SolverImpl<Scalar>::apply_WtW(const Vec &u) const -> Vec {
    Vec out = Vec::Zero(m_);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &blk = blocks_[bi];
        const Vec seg = u.segment(blk.offset, blk.rows);
        const auto &sc = scal_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg:
            out.segment(blk.offset, blk.rows) = seg.array() * sc.w.array().square();
            break;
        case ConeKind::SecondOrder: {
            auto reflect = [&](const Vec &in) {
                Vec Ju = in;
                Ju.tail(blk.rows - 1) *= Scalar(-1);
                return Vec(Scalar(2) * sc.v * sc.v.dot(in) - Ju);
            };
            out.segment(blk.offset, blk.rows) = sc.eta * sc.eta * reflect(reflect(seg));
            break;
        }
        case ConeKind::Psd: {
            const Mat T = sc.R * sc.R.transpose();
            out.segment(blk.offset, blk.rows) = mat_to_svec_t<Scalar>(T * svec_to_mat_t<Scalar>(seg, blk.size) * T);
            break;
        }
        default:
            break;
        }
    }
    return out;
}

template <typename Scalar> auto SolverImpl<Scalar>::apply_WtW_inv(const Vec &u) const -> Vec {
    Vec out = Vec::Zero(m_);
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &blk = blocks_[bi];
        const Vec seg = u.segment(blk.offset, blk.rows);
        const auto &sc = scal_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg:
            out.segment(blk.offset, blk.rows) = seg.array() / sc.w.array().square();
            break;
        case ConeKind::SecondOrder: {
            Vec q = sc.v;
            q.tail(blk.rows - 1) *= Scalar(-1);
            auto reflect = [&](const Vec &in) {
                Vec Ju = in;
                Ju.tail(blk.rows - 1) *= Scalar(-1);
                return Vec(Scalar(2) * q * q.dot(in) - Ju);
            };
            out.segment(blk.offset, blk.rows) = reflect(reflect(seg)) / (sc.eta * sc.eta);
            break;
        }
        case ConeKind::Psd:
            out.segment(blk.offset, blk.rows) =
                mat_to_svec_t<Scalar>(sc.U * svec_to_mat_t<Scalar>(seg, blk.size) * sc.U);
            break;
        default:
            break;
        }
    }
    return out;
}

template <typename Scalar> auto SolverImpl<Scalar>::jordan_product(const Vec &u, const Vec &v) const -> Vec {
    Vec out = Vec::Zero(m_);
    for (const auto &blk : blocks_) {
        const Vec a = u.segment(blk.offset, blk.rows);
        const Vec b = v.segment(blk.offset, blk.rows);
        switch (blk.kind) {
        case ConeKind::Nonneg:
            out.segment(blk.offset, blk.rows) = a.array() * b.array();
            break;
        case ConeKind::SecondOrder:
            out[blk.offset] = a.dot(b);
            out.segment(blk.offset + 1, blk.rows - 1) = a[0] * b.tail(blk.rows - 1) + b[0] * a.tail(blk.rows - 1);
            break;
        case ConeKind::Psd: {
            const Mat A = svec_to_mat_t<Scalar>(a, blk.size);
            const Mat B = svec_to_mat_t<Scalar>(b, blk.size);
            out.segment(blk.offset, blk.rows) = mat_to_svec_t<Scalar>(Scalar(0.5) * (A * B + B * A));
            break;
        }
        default:
            break;
        }
    }
    return out;
}

template <typename Scalar> auto SolverImpl<Scalar>::jordan_divide_by_lambda(const Vec &d) const -> Vec {
    Vec out = Vec::Zero(m_);
    for (const auto &blk : blocks_) {
        const Vec lam = lambda_.segment(blk.offset, blk.rows);
        const Vec seg = d.segment(blk.offset, blk.rows);
        switch (blk.kind) {
        case ConeKind::Nonneg:
            out.segment(blk.offset, blk.rows) = seg.array() / lam.array();
            break;
        case ConeKind::SecondOrder: {
            const Scalar a = lam[0] * lam[0] - lam.tail(blk.rows - 1).squaredNorm();
            const Scalar w0 = (lam[0] * seg[0] - lam.tail(blk.rows - 1).dot(seg.tail(blk.rows - 1))) / a;
            out[blk.offset] = w0;
            out.segment(blk.offset + 1, blk.rows - 1) = (seg.tail(blk.rows - 1) - w0 * lam.tail(blk.rows - 1)) / lam[0];
            break;
        }
        case ConeKind::Psd: {
            // lambda is diagonal by construction of the NT scaling.
            const Mat L = svec_to_mat_t<Scalar>(lam, blk.size);
            const Mat D = svec_to_mat_t<Scalar>(seg, blk.size);
            Mat W(blk.size, blk.size);
            for (int i = 0; i < blk.size; ++i)
                for (int j = 0; j < blk.size; ++j) W(i, j) = Scalar(2) * D(i, j) / (L(i, i) + L(j, j));
            out.segment(blk.offset, blk.rows) = mat_to_svec_t<Scalar>(W);
            break;
        }
        default:
            break;
        }
    }
    return out;
}

template <typename Scalar> Scalar SolverImpl<Scalar>::max_step(const Vec &u, const Vec &du) const {
    Scalar alpha = std::numeric_limits<Scalar>::infinity();
    for (const auto &blk : blocks_) {
        const Vec a = u.segment(blk.offset, blk.rows);
        const Vec d = du.segment(blk.offset, blk.rows);
        switch (blk.kind) {
        case ConeKind::Nonneg:
            for (int i = 0; i < blk.rows; ++i)
                if (d[i] < Scalar(0)) alpha = std::min(alpha, -a[i] / d[i]);
            break;
        case ConeKind::SecondOrder: {
            const Scalar a0 = a[0], d0 = d[0];
            const Vec a1 = a.tail(blk.rows - 1), d1 = d.tail(blk.rows - 1);
            const Scalar qa = d0 * d0 - d1.squaredNorm();
            const Scalar qb = Scalar(2) * (a0 * d0 - a1.dot(d1));
            const Scalar qc = a0 * a0 - a1.squaredNorm();
            Scalar bound = std::numeric_limits<Scalar>::infinity();
            const Scalar disc = qb * qb - Scalar(4) * qa * qc;
            if (qa == Scalar(0)) {
                if (qb < Scalar(0)) bound = -qc / qb;
            } else if (disc >= Scalar(0)) {
                const Scalar sq = std::sqrt(disc);
                const Scalar r1 = (-qb - sq) / (Scalar(2) * qa);
                const Scalar r2 = (-qb + sq) / (Scalar(2) * qa);
                for (Scalar r : {std::min(r1, r2), std::max(r1, r2)}) {
                    if (r > Scalar(0) && a0 + r * d0 >= Scalar(0)) {
                        bound = r;
                        break;
                    }
                }
            }
            if (d0 < Scalar(0)) bound = std::min(bound, -a0 / d0);
            alpha = std::min(alpha, bound);
            break;
        }
        case ConeKind::Psd: {
            const Mat A = svec_to_mat_t<Scalar>(a, blk.size);
            const Mat D = svec_to_mat_t<Scalar>(d, blk.size);
            Mat M;
            Eigen::LLT<Mat> llt(A);
            if (llt.info() == Eigen::Success) {
                const Mat L = llt.matrixL();
                M = L.template triangularView<Eigen::Lower>().solve(D);
                M = L.template triangularView<Eigen::Lower>().solve(M.transpose().eval());
            } else {
                // Eigenvalue-clamped whitening when the block sits numerically
                // on the cone boundary.
                Eigen::SelfAdjointEigenSolver<Mat> esa(A);
                const Scalar lmax = std::max<Scalar>(esa.eigenvalues().maxCoeff(), Scalar(1e-300));
                const Vec lam = esa.eigenvalues().cwiseMax(Scalar(1e-14) * lmax);
                const Mat W = esa.eigenvectors() * lam.cwiseSqrt().cwiseInverse().asDiagonal();
                M = W.transpose() * D * W;
            }
            Eigen::SelfAdjointEigenSolver<Mat> es(Mat(Scalar(0.5) * (M + M.transpose())),
                                                  Eigen::EigenvaluesOnly);
            const Scalar lmin = es.eigenvalues().minCoeff();
            if (lmin < Scalar(0)) alpha = std::min(alpha, Scalar(-1) / lmin);
            break;
        }
        default:
            break;
        }
    }
    return alpha;
}

template <typename Scalar> bool SolverImpl<Scalar>::modified_cholesky(const Mat &a, Mat &l) {
    const int n = static_cast<int>(a.rows());
    if (n == 0) {
        l.resize(0, 0);
        return true;
    }
    const Scalar floor_pivot = Scalar(1e-13) * std::max<Scalar>(Scalar(1), a.diagonal().cwiseAbs().maxCoeff());
    l = a;
    for (int j = 0; j < n; ++j) {
        if (j > 0) l.col(j).tail(n - j).noalias() -= l.block(j, 0, n - j, j) * l.row(j).head(j).transpose();
        Scalar d = l(j, j);
        if (!std::isfinite(static_cast<double>(d))) return false;
        d = std::max(d, floor_pivot);
        const Scalar piv = std::sqrt(d);
        l(j, j) = piv;
        if (j + 1 < n) l.col(j).tail(n - j - 1) /= piv;
    }
    l.template triangularView<Eigen::StrictlyUpper>().setZero();
    return true;
}

template <typename Scalar> void SolverImpl<Scalar>::build_reduced_matrix() {
    Mat H = Mat::Zero(n_, n_);

    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        const auto &blk = blocks_[bi];
        const auto &sc = scal_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg: {
            std::vector<std::vector<std::pair<int, Scalar>>> rows(static_cast<std::size_t>(blk.rows));
            for (int j = 0; j < n_; ++j)
                for (const auto &[r, v] : G_.col[static_cast<std::size_t>(j)])
                    if (r >= blk.offset && r < blk.offset + blk.rows)
                        rows[static_cast<std::size_t>(r - blk.offset)].push_back({j, v});
            for (int r = 0; r < blk.rows; ++r) {
                const Scalar dvalue = Scalar(1) / (sc.w[r] * sc.w[r]);
                for (const auto &[j1, v1] : rows[static_cast<std::size_t>(r)])
                    for (const auto &[j2, v2] : rows[static_cast<std::size_t>(r)]) H(j1, j2) += dvalue * v1 * v2;
            }
            break;
        }
        case ConeKind::SecondOrder: {
            // (W'W)^{-1} = eta^{-2} (I + 4(u'u) uu' - 2u(Ju)' - 2(Ju)u'), u = Jv.
            Vec u = sc.v;
            u.tail(blk.rows - 1) *= Scalar(-1);
            const Vec &Ju = sc.v;
            const Scalar uu = u.squaredNorm();
            Vec a = Vec::Zero(n_);
            Vec bb = Vec::Zero(n_);
            std::vector<int> touched;
            for (int j = 0; j < n_; ++j) {
                Scalar au = 0, aj = 0;
                bool any = false;
                for (const auto &[r, v] : G_.col[static_cast<std::size_t>(j)]) {
                    if (r < blk.offset || r >= blk.offset + blk.rows) continue;
                    au += v * u[r - blk.offset];
                    aj += v * Ju[r - blk.offset];
                    any = true;
                }
                a[j] = au;
                bb[j] = aj;
                if (any) touched.push_back(j);
            }
            const Scalar inv_eta2 = Scalar(1) / (sc.eta * sc.eta);
            std::vector<std::vector<std::pair<int, Scalar>>> rows(static_cast<std::size_t>(blk.rows));
            for (int j : touched)
                for (const auto &[r, v] : G_.col[static_cast<std::size_t>(j)])
                    if (r >= blk.offset && r < blk.offset + blk.rows)
                        rows[static_cast<std::size_t>(r - blk.offset)].push_back({j, v});
            for (int r = 0; r < blk.rows; ++r)
                for (const auto &[j1, v1] : rows[static_cast<std::size_t>(r)])
                    for (const auto &[j2, v2] : rows[static_cast<std::size_t>(r)]) H(j1, j2) += inv_eta2 * v1 * v2;
            for (int j1 : touched)
                for (int j2 : touched)
                    H(j1, j2) += inv_eta2 * (Scalar(4) * uu * a[j1] * a[j2] - Scalar(2) * a[j1] * bb[j2] -
                                             Scalar(2) * bb[j1] * a[j2]);
            break;
        }
        case ConeKind::Psd: {
            const auto &support = psd_support_[bi];
            const auto &patterns = psd_patterns_[bi];
            Mat V(blk.size, blk.size);
            for (int j : support) {
                V.setZero();
                for (const auto &en : patterns[static_cast<std::size_t>(j)]) {
                    V.noalias() += Scalar(en.value) * sc.U.col(en.r) * sc.U.col(en.c).transpose();
                    if (en.r != en.c) V.noalias() += Scalar(en.value) * sc.U.col(en.c) * sc.U.col(en.r).transpose();
                }
                for (int i : support) {
                    if (i > j) break;
                    Scalar acc = 0;
                    for (const auto &en : patterns[static_cast<std::size_t>(i)])
                        acc += Scalar(en.value) * (en.r == en.c ? V(en.r, en.c) : V(en.r, en.c) + V(en.c, en.r));
                    H(i, j) += acc;
                    if (i != j) H(j, i) += acc;
                }
            }
            break;
        }
        default:
            break;
        }
    }

    factor_ok_ = modified_cholesky(H, hl_);
    if (!factor_ok_) return;
    if (p_ > 0) {
        // S = E H^{-1} E', one triangular solve pair per equality row.
        Mat rhsT = edense_.transpose();
        hl_.template triangularView<Eigen::Lower>().solveInPlace(rhsT);
        hl_.transpose().template triangularView<Eigen::Upper>().solveInPlace(rhsT);
        Mat S = edense_ * rhsT;
        factor_ok_ = modified_cholesky(S, sl_);
    }
}

template <typename Scalar>
void SolverImpl<Scalar>::kkt_solve(const Vec &r1, const Vec &r2, const Vec &r3, Vec &dx, Vec &dy,
                                   Vec &dz) const {
    auto hsolve = [this](Vec v) {
        hl_.template triangularView<Eigen::Lower>().solveInPlace(v);
        hl_.transpose().template triangularView<Eigen::Upper>().solveInPlace(v);
        return v;
    };
    auto reduced_solve = [this, &hsolve](const Vec &f1, const Vec &f2, const Vec &f3, Vec &ox, Vec &oy,
                                         Vec &oz) {
        const Vec r = f1 + G_.multiply_transpose(apply_WtW_inv(f3));
        const Vec w = hsolve(r);
        if (p_ > 0) {
            Vec rhs_y = edense_ * w - f2;
            sl_.template triangularView<Eigen::Lower>().solveInPlace(rhs_y);
            sl_.transpose().template triangularView<Eigen::Upper>().solveInPlace(rhs_y);
            oy = rhs_y;
            ox = w - hsolve(E_.multiply_transpose(oy));
        } else {
            oy.resize(0);
            ox = w;
        }
        oz = apply_WtW_inv(G_.multiply(ox) - f3);
    };

    reduced_solve(r1, r2, r3, dx, dy, dz);
    // Refine against the full 3x3 block system; keep the best iterate in case
    // a pass degrades the solution (possible near the central-path boundary).
    Scalar best = std::numeric_limits<Scalar>::infinity();
    Vec bx = dx, by = dy, bz = dz;
    for (int pass = 0; pass < 3; ++pass) {
        const Vec f1 = r1 - (E_.multiply_transpose(dy) + G_.multiply_transpose(dz));
        const Vec f2 = r2 - E_.multiply(dx);
        const Vec f3 = r3 - (G_.multiply(dx) - apply_WtW(dz));
        const Scalar resid = std::sqrt(f1.squaredNorm() + f2.squaredNorm() + f3.squaredNorm());
        if (resid < best) {
            best = resid;
            bx = dx;
            by = dy;
            bz = dz;
        }
        if (!(resid > Scalar(1e-14) * (Scalar(1) + std::sqrt(r1.squaredNorm() + r2.squaredNorm() +
                                                             r3.squaredNorm()))))
            break;
        Vec ex, ey, ez;
        reduced_solve(f1, f2, f3, ex, ey, ez);
        dx += ex;
        dy += ey;
        dz += ez;
    }
    {
        const Vec f1 = r1 - (E_.multiply_transpose(dy) + G_.multiply_transpose(dz));
        const Vec f2 = r2 - E_.multiply(dx);
        const Vec f3 = r3 - (G_.multiply(dx) - apply_WtW(dz));
        const Scalar resid = std::sqrt(f1.squaredNorm() + f2.squaredNorm() + f3.squaredNorm());
        if (resid >= best) {
            dx = bx;
            dy = by;
            dz = bz;
        }
    }
}

template <typename Scalar> ConicSolution SolverImpl<Scalar>::finish(SolveStatus status) {
    ConicSolution out;
    out.status = status;
    out.iterations = iterations_;
    Scalar scale = 1;
    if (status == SolveStatus::Optimal || status == SolveStatus::MaxIterations ||
        status == SolveStatus::NumericalFailure) {
        if (tau_ > Scalar(0)) scale = tau_;
    } else if (status == SolveStatus::PrimalInfeasible) {
        // Farkas certificate: normalize so b'y + h'z = -1.
        const Scalar denom = -(be_.dot(y_) + h_.dot(z_));
        if (denom > Scalar(0)) scale = denom;
        x_.setZero();
        s_.setZero();
    } else if (status == SolveStatus::DualInfeasible) {
        // Unbounded ray: normalize so c'x = -1.
        const Scalar denom = -c_.dot(x_);
        if (denom > Scalar(0)) scale = denom;
        y_.setZero();
        z_.setZero();
    }
    // Undo the equilibration before reporting.
    Vec xs = (x_ / scale).cwiseProduct(dcol_);
    Vec ss = (s_ / scale).cwiseQuotient(rg_);
    Vec zs = (z_ / scale).cwiseProduct(rg_);
    Vec ys = (y_ / scale).cwiseProduct(re_);
    out.x = xs.template cast<double>();
    out.s = Eigen::VectorXd::Zero(prog_.num_rows());
    out.z = Eigen::VectorXd::Zero(prog_.num_rows());
    int orig = 0, eq = 0, pr = 0;
    for (const auto &blk : prog_.cones) {
        const int rows = blk.rows();
        if (blk.kind == ConeKind::Zero) {
            out.z.segment(orig, rows) = ys.segment(eq, rows).template cast<double>();
            eq += rows;
        } else {
            out.s.segment(orig, rows) = ss.segment(pr, rows).template cast<double>();
            out.z.segment(orig, rows) = zs.segment(pr, rows).template cast<double>();
            pr += rows;
        }
        orig += rows;
    }
    out.primal_obj = prog_.c.dot(out.x);
    double by = 0.0;
    int off = 0;
    for (const auto &blk : prog_.cones) {
        by += prog_.b.segment(off, blk.rows()).dot(out.z.segment(off, blk.rows()));
        off += blk.rows();
    }
    out.dual_obj = -by;
    out.gap = std::abs(out.primal_obj - out.dual_obj);
    return out;
}

template <typename Scalar> ConicSolution SolverImpl<Scalar>::run() {
    if (m_ == 0) {
        // No proper cones: a pure equality-constrained linear objective.
        Mat Ed = edense_;
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(Ed);
        Vec x0 = cod.solve(be_);
        x_ = x0;
        y_ = Vec::Zero(p_);
        z_.resize(0);
        s_.resize(0);
        tau_ = 1;
        if ((Ed * x0 - be_).norm() > Scalar(st_.tol_feas) * (Scalar(1) + be_.norm()))
            return finish(SolveStatus::PrimalInfeasible);
        Eigen::CompleteOrthogonalDecomposition<Mat> codT(Ed.transpose());
        Vec yls = codT.solve(c_);
        if ((Ed.transpose() * yls - c_).norm() > Scalar(st_.tol_feas) * (Scalar(1) + c_.norm())) {
            // Unbounded ray: the component of -c orthogonal to the row space.
            x_ = -(c_ - Ed.transpose() * yls);
            return finish(SolveStatus::DualInfeasible);
        }
        y_ = -yls;
        return finish(SolveStatus::Optimal);
    }

    // Initialization: two solves with W = I, then a shift into the interior.
    scal_.assign(blocks_.size(), {});
    for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
        auto &sc = scal_[bi];
        const auto &blk = blocks_[bi];
        switch (blk.kind) {
        case ConeKind::Nonneg:
            sc.w = Vec::Ones(blk.rows);
            break;
        case ConeKind::SecondOrder:
            sc.eta = 1;
            sc.v = Vec::Zero(blk.rows);
            sc.v[0] = 1;
            break;
        case ConeKind::Psd:
            sc.R = Mat::Identity(blk.size, blk.size);
            sc.Rinv = sc.R;
            sc.U = sc.R;
            break;
        default:
            break;
        }
    }
    build_reduced_matrix();
    if (!factor_ok_) {
        x_ = Vec::Zero(n_);
        y_ = Vec::Zero(p_);
        z_ = Vec::Zero(m_);
        s_ = Vec::Zero(m_);
        return finish(SolveStatus::NumericalFailure);
    }

    Vec x1, y1, z1;
    kkt_solve(Vec::Zero(n_), be_, h_, x1, y1, z1);
    x_ = x1;
    s_ = h_ - G_.multiply(x_);
    Vec x2, y2, z2;
    kkt_solve(-c_, Vec::Zero(p_), Vec::Zero(m_), x2, y2, z2);
    y_ = y2;
    z_ = z2;

    const Vec e = cone_identity();
    const Scalar alpha_p = -min_cone_eig(s_);
    if (alpha_p > Scalar(-0.5)) s_ += (Scalar(1) + alpha_p) * e;
    const Scalar alpha_d = -min_cone_eig(z_);
    if (alpha_d > Scalar(-0.5)) z_ += (Scalar(1) + alpha_d) * e;
    tau_ = 1;
    kappa_ = 1;

    const Scalar resx0 = std::max<Scalar>(1, c_.norm());
    const Scalar resy0 = std::max<Scalar>(1, be_.norm());
    const Scalar resz0 = std::max<Scalar>(1, h_.norm());
    const Scalar feastol = Scalar(st_.tol_feas);
    const Scalar gaptol = Scalar(st_.tol_gap);

    SolveStatus fallback = SolveStatus::MaxIterations;
    int stalls = 0;
    Scalar best_merit = std::numeric_limits<Scalar>::infinity();
    Vec bx = x_, by = y_, bz = z_, bs = s_;
    Scalar btau = tau_, bkappa = kappa_;
    for (iterations_ = 0; iterations_ < st_.max_iter; ++iterations_) {
        const Vec hrx = E_.multiply_transpose(y_) + G_.multiply_transpose(z_);
        const Vec hry = E_.multiply(x_);
        const Vec hrz = G_.multiply(x_) + s_;
        const Vec rx = hrx + c_ * tau_;
        const Vec ry = hry - be_ * tau_;
        const Vec rz = hrz - h_ * tau_;
        const Scalar cx = c_.dot(x_);
        const Scalar byhz = be_.dot(y_) + h_.dot(z_);
        const Scalar rtau = cx + byhz + kappa_;

        const Scalar nx = x_.norm(), ny = y_.norm(), nz = z_.norm(), ns = s_.norm();
        const Scalar pobj = cx / tau_;
        const Scalar dobj = -byhz / tau_;
        const Scalar nry = p_ > 0 ? ry.norm() / std::max<Scalar>(resy0 + nx, 1) : Scalar(0);
        const Scalar nrz = rz.norm() / std::max<Scalar>(resz0 + nx + ns, 1);
        const Scalar pres = std::max(nry, nrz) / tau_;
        const Scalar dres = rx.norm() / std::max<Scalar>(resx0 + ny + nz, 1) / tau_;
        const Scalar gap = s_.dot(z_) / (tau_ * tau_);
        Scalar relgap = std::numeric_limits<Scalar>::infinity();
        if (pobj < Scalar(0))
            relgap = gap / -pobj;
        else if (dobj > Scalar(0))
            relgap = gap / dobj;

#ifdef PSAA_CONIC_SELF_CHECK
        fprintf(stderr,
                "it=%2d pres=%.2e dres=%.2e gap=%.2e relgap=%.2e tau=%.2e kap=%.2e pobj=% .6e dobj=% .6e\n",
                iterations_, (double)pres, (double)dres, (double)gap, (double)relgap, (double)tau_,
                (double)kappa_, (double)pobj, (double)dobj);
#endif
        const Scalar merit = std::max({pres, dres, std::min(std::abs(gap), relgap)});
        if (merit < best_merit) {
            best_merit = merit;
            bx = x_;
            by = y_;
            bz = z_;
            bs = s_;
            btau = tau_;
            bkappa = kappa_;
        }
        if (pres <= feastol && dres <= feastol && (std::abs(gap) <= gaptol || relgap <= gaptol))
            return finish(SolveStatus::Optimal);
        if (tau_ < kappa_) {
            if (byhz / std::max<Scalar>(ny + nz, 1) < -feastol) {
                const Scalar pinfres = hrx.norm() / std::max<Scalar>(ny + nz, 1);
                if (pinfres <= feastol) return finish(SolveStatus::PrimalInfeasible);
            }
            if (cx / std::max<Scalar>(nx, 1) < -feastol) {
                const Scalar dinfres =
                    std::max(hry.norm() / std::max<Scalar>(nx, 1), hrz.norm() / std::max<Scalar>(nx + ns, 1));
                if (dinfres <= feastol) return finish(SolveStatus::DualInfeasible);
            }
        }

        const Scalar mu = (s_.dot(z_) + tau_ * kappa_) / (nu_ + 1);
        try {
            compute_scalings();
        } catch (const std::runtime_error &) {
            return finish(SolveStatus::NumericalFailure);
        }
        build_reduced_matrix();
        if (!factor_ok_) return finish(SolveStatus::NumericalFailure);

        Vec sx, sy, sz;
        kkt_solve(-c_, be_, h_, sx, sy, sz);
        const Scalar static_tau_coef = c_.dot(sx) + be_.dot(sy) + h_.dot(sz) - kappa_ / tau_;
        if (!std::isfinite(static_cast<double>(static_tau_coef)) || static_tau_coef == Scalar(0))
            return finish(SolveStatus::NumericalFailure);

        auto direction = [&](const Vec &ds_target, Scalar dkappa_target, Scalar resid_scale, Vec &dx,
                             Vec &dy, Vec &dz, Vec &ds, Scalar &dtau, Scalar &dkappa) {
            const Vec lam_div = jordan_divide_by_lambda(ds_target);
            Vec vx, vy, vz;
            kkt_solve(-resid_scale * rx, -resid_scale * ry, Vec(-resid_scale * rz + apply_Wt(lam_div)),
                      vx, vy, vz);
            const Scalar num =
                -resid_scale * rtau + dkappa_target / tau_ - c_.dot(vx) - be_.dot(vy) - h_.dot(vz);
            dtau = num / static_tau_coef;
            dx = vx + dtau * sx;
            dy = vy + dtau * sy;
            dz = vz + dtau * sz;
            // Recover ds from the affine row so the feasibility residual
            // contracts exactly; solve error lands in the (soft)
            // complementarity equation instead.
            ds = -resid_scale * rz + h_ * dtau - G_.multiply(dx);
            dkappa = -(dkappa_target + kappa_ * dtau) / tau_;
        };

        Vec dxa, dya, dza, dsa;
        Scalar dtaua, dkappaa;
        const Vec lam_sq = jordan_product(lambda_, lambda_);
        direction(lam_sq, tau_ * kappa_, Scalar(1), dxa, dya, dza, dsa, dtaua, dkappaa);

        const Scalar inf = std::numeric_limits<Scalar>::infinity();
        const Scalar alpha_aff =
            std::min({max_step(s_, dsa), max_step(z_, dza), dtaua < Scalar(0) ? -tau_ / dtaua : inf,
                      dkappaa < Scalar(0) ? -kappa_ / dkappaa : inf, Scalar(1)});
        const Scalar sigma = std::min(Scalar(std::pow((double)(Scalar(1) - alpha_aff), 3)), Scalar(0.99));

        const Vec corr = jordan_product(apply_Winft(dsa), apply_W(dza));
        const Vec ds_target = lam_sq + corr - sigma * mu * e;
        const Scalar dkappa_target = tau_ * kappa_ + dtaua * dkappaa - sigma * mu;
        Vec dx, dy, dz, ds;
        Scalar dtau, dkappa;
        direction(ds_target, dkappa_target, Scalar(1) - sigma, dx, dy, dz, ds, dtau, dkappa);

        Scalar alpha = std::min({max_step(s_, ds), max_step(z_, dz), dtau < Scalar(0) ? -tau_ / dtau : inf,
                                 dkappa < Scalar(0) ? -kappa_ / dkappa : inf});
        alpha = std::min(Scalar(1), Scalar(st_.step_fraction) * alpha);

        // Back off if rounding pushed an iterate out of the cone interior.
        int backtracks = 0;
        while (backtracks < 40) {
            if (strictly_interior(s_ + alpha * ds) && strictly_interior(z_ + alpha * dz) &&
                tau_ + alpha * dtau > Scalar(0) && kappa_ + alpha * dkappa > Scalar(0))
                break;
            alpha *= Scalar(0.8);
            ++backtracks;
        }
        if (backtracks == 40) {
            fallback = SolveStatus::NumericalFailure;
            break;
        }
        if (alpha < Scalar(1e-7))
            ++stalls;
        else
            stalls = 0;
        if (stalls >= 3) break; // no usable progress left at this precision

        x_ += alpha * dx;
        y_ += alpha * dy;
        z_ += alpha * dz;
        s_ += alpha * ds;
        tau_ += alpha * dtau;
        kappa_ += alpha * dkappa;
    }
    // Hand back the best iterate seen, not wherever the stall left us.
    x_ = bx;
    y_ = by;
    z_ = bz;
    s_ = bs;
    tau_ = btau;
    kappa_ = bkappa;
    return finish(fallback);
}

double soc_residual_d(const Eigen::VectorXd &u) { return u[0] - u.tail(u.size() - 1).norm(); }

} // namespace

std::string status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::PrimalInfeasible:
        return "primal_infeasible";
    case SolveStatus::DualInfeasible:
        return "dual_infeasible";
    case SolveStatus::MaxIterations:
        return "max_iterations";
    case SolveStatus::NumericalFailure:
        return "numerical_failure";
    }
    return "unknown";
}

int svec_dim(int side) { return side * (side + 1) / 2; }

Eigen::VectorXd mat_to_svec(const Eigen::MatrixXd &m) { return mat_to_svec_t<double>(m); }

Eigen::MatrixXd svec_to_mat(const Eigen::VectorXd &v, int side) { return svec_to_mat_t<double>(v, side); }

ConicSolution solve(const ConicProgram &prog, const SolverSettings &settings) {
    ConicSolution sol = SolverImpl<double>(prog, settings).run();
    if (sol.status == SolveStatus::MaxIterations || sol.status == SolveStatus::NumericalFailure) {
        // Degenerate instances can exhaust double precision short of the
        // requested tolerances; retry the whole run in extended precision.
        sol = SolverImpl<long double>(prog, settings).run();
    }
    return sol;
}

std::string to_debug_json(const ConicProgram &prog) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"num_vars\":" << prog.num_vars << ",\"objective\":[";
    for (int i = 0; i < prog.num_vars; ++i) os << (i ? "," : "") << prog.c[i];
    os << "],\"a\":[";
    for (std::size_t i = 0; i < prog.a.size(); ++i) {
        const auto &t = prog.a[i];
        os << (i ? "," : "") << "[" << t.row << "," << t.col << "," << t.value << "]";
    }
    os << "],\"b\":[";
    for (int i = 0; i < prog.b.size(); ++i) os << (i ? "," : "") << prog.b[i];
    os << "],\"cones\":[";
    for (std::size_t i = 0; i < prog.cones.size(); ++i) {
        const auto &blk = prog.cones[i];
        const char *kind = blk.kind == ConeKind::Zero          ? "zero"
                           : blk.kind == ConeKind::Nonneg      ? "nonneg"
                           : blk.kind == ConeKind::SecondOrder ? "second_order"
                                                               : "psd";
        os << (i ? "," : "") << "{\"kind\":\"" << kind << "\",\"size\":" << blk.size << "}";
    }
    os << "]}";
    return os.str();
}

ResidualReport certify_solution(const ConicProgram &prog, const ConicSolution &sol,
                                const SolverSettings &settings) {
    ResidualReport rep;
    const int m = prog.num_rows();
    Eigen::VectorXd ax = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd atz = Eigen::VectorXd::Zero(prog.num_vars);
    for (const auto &t : prog.a) {
        ax[t.row] += t.value * sol.x[t.col];
        atz[t.col] += t.value * sol.z[t.row];
    }
    rep.primal_residual = (ax + sol.s - prog.b).lpNorm<Eigen::Infinity>();
    rep.dual_residual = (atz + prog.c).lpNorm<Eigen::Infinity>();
    rep.comp_gap = std::abs(sol.s.dot(sol.z));

    int offset = 0;
    for (const auto &blk : prog.cones) {
        const int rows = blk.rows();
        if (blk.kind != ConeKind::Zero) {
            auto min_eig = [&](const Eigen::VectorXd &u) {
                const Eigen::VectorXd seg = u.segment(offset, rows);
                if (blk.kind == ConeKind::Nonneg) return seg.minCoeff();
                if (blk.kind == ConeKind::SecondOrder) return soc_residual_d(seg);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(svec_to_mat(seg, blk.size),
                                                                  Eigen::EigenvaluesOnly);
                return es.eigenvalues().minCoeff();
            };
            rep.min_eig_s.push_back(min_eig(sol.s));
            rep.min_eig_z.push_back(min_eig(sol.z));
        }
        offset += rows;
    }

    const double pscale = 1.0 + prog.b.lpNorm<Eigen::Infinity>();
    const double dscale = 1.0 + prog.c.lpNorm<Eigen::Infinity>();
    const double gscale = 1.0 + std::abs(sol.primal_obj);
    bool eig_ok = true;
    for (double e : rep.min_eig_s) eig_ok = eig_ok && e >= -10.0 * settings.tol_feas * pscale;
    for (double e : rep.min_eig_z) eig_ok = eig_ok && e >= -10.0 * settings.tol_feas * dscale;
    rep.pass = rep.primal_residual <= 10.0 * settings.tol_feas * pscale &&
               rep.dual_residual <= 10.0 * settings.tol_feas * dscale &&
               std::abs(sol.primal_obj - sol.dual_obj) <= 10.0 * settings.tol_gap * gscale && eig_ok;
    return rep;
}

} // namespace psaa::conic
