#include "mmfem/assembly.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

#include "mmfem/errors.hpp"

namespace mmfem {

namespace {

// Rows of the feature matrix; K = sum_rows sign * row^T row.
struct FeatureRows {
    Eigen::MatrixXd pos, neg, curl;
    int npos = 0, nneg = 0, ncurl = 0;

    void reset(int rows, int cols, int curl_rows) {
        if (pos.rows() < rows || pos.cols() != cols) pos.resize(rows, cols);
        if (neg.rows() < rows || neg.cols() != cols) neg.resize(rows, cols);
        if (curl.rows() < curl_rows || curl.cols() != cols) curl.resize(std::max(curl_rows, 1), cols);
        npos = nneg = ncurl = 0;
    }
    // Zeroed row for a feature of the given weight; the caller scales by sqrt|weight| afterwards.
    auto row(double weight) {
        auto r = weight >= 0 ? pos.row(npos++) : neg.row(nneg++);
        r.setZero();
        return r;
    }
    auto curl_row() {
        auto r = curl.row(ncurl++);
        r.setZero();
        return r;
    }
};

void gram(const Eigen::MatrixXd& rows, int n, double sign, Eigen::MatrixXd& K) {
    if (n == 0) return;
    K.selfadjointView<Eigen::Lower>().rankUpdate(rows.topRows(n).transpose(), sign);
}

void symmetrize(Eigen::MatrixXd& K) { K.triangularView<Eigen::StrictlyUpper>() = K.transpose(); }

constexpr std::array<std::array<int, 2>, 3> kOffDiag{{{0, 1}, {0, 2}, {1, 2}}};

}  // namespace

int quadrature_degree(const Problem& problem) {
    if (problem.quad_degree > 0) return problem.quad_degree;
    return std::min(2 * problem.u_space.degree, kMaxQuadratureDegree);
}

Layout::Layout(const Problem& problem) : problem_(problem) {
    if (!problem.mesh) throw InvalidParam("problem without a mesh");
    const Mesh& mesh = *problem.mesh;
    if (problem.u_space.family != Family::h1) throw SpaceMismatch("displacement space must be H1");
    const bool two_d = problem.model == Model::antiplane;
    if ((two_d && mesh.dim != 2) || (!two_d && mesh.dim != 3))
        throw SpaceMismatch("model and mesh dimension disagree");
    if (problem.model != Model::cauchy) {
        if (problem.p_space.family == Family::h1) throw SpaceMismatch("microdistortion space must be H(curl)");
        if (problem.p_space.dim != mesh.dim) throw SpaceMismatch("microdistortion space dimension differs from the mesh");
        problem.params.validate();
    }
    const int ucomp = two_d ? 1 : 3;
    blocks_.push_back({DofMap(mesh, problem.u_space), ucomp, 0});
    total_ = ucomp * blocks_[0].map.size();
    local_ = ucomp * blocks_[0].map.local_size();
    if (problem.model != Model::cauchy) {
        const int pcomp = two_d ? 1 : 3;
        blocks_.push_back({DofMap(mesh, problem.p_space), pcomp, total_});
        total_ += pcomp * blocks_[1].map.size();
        local_ += pcomp * blocks_[1].map.local_size();
    }
}

void Layout::cell_dofs(int cell, std::span<int> out) const {
    int pos = 0;
    for (const auto& b : blocks_) {
        const int n = b.map.local_size();
        b.map.cell_dofs(cell, out.subspan(pos, n));
        for (int c = 1; c < b.components; ++c)
            for (int i = 0; i < n; ++i) out[pos + c * n + i] = out[pos + i] + c * b.map.size();
        for (int i = 0; i < n; ++i) out[pos + i] += b.offset;
        for (int c = 1; c < b.components; ++c)
            for (int i = 0; i < n; ++i) out[pos + c * n + i] += b.offset;
        pos += b.components * n;
    }
}

SpMat SparseSystem::matrix(double coefficient) const {
    SpMat K = K0;
    if (coefficient != 0.0 && Kc.nonZeros() > 0) {
        Eigen::Map<Eigen::VectorXd> v(K.valuePtr(), K.nonZeros());
        v += coefficient * Eigen::Map<const Eigen::VectorXd>(Kc.valuePtr(), Kc.nonZeros());
    }
    return K;
}

ElementKernel::ElementKernel(const Layout& layout) : layout_(&layout) {
    const Problem& pb = layout.problem();
    rule_ = &rule_for(layout.mesh().dim, quadrature_degree(pb));
    u_table_ = tabulate(pb.u_space, *rule_);
    if (layout.has_p()) p_table_ = tabulate(pb.p_space, *rule_);
}

void ElementKernel::compute(int cell, ElementSystem& out) const {
    const Problem& pb = layout_->problem();
    const Mesh& mesh = layout_->mesh();
    const AffineMap& map = mesh.maps[cell];
    const int dim = mesh.dim;
    const int nloc = layout_->local_size();
    const int nu = u_table_.n;
    const int np = layout_->has_p() ? p_table_.n : 0;
    const int ucomp = layout_->u().components;
    const int pbase = ucomp * nu;
    const int nq = rule_->size();
    const double adet = std::abs(map.det);
    const MaterialParams& mp = pb.params;

    thread_local FeatureRows fr;
    thread_local std::vector<Vec3> G, N, C;
    thread_local std::vector<double> Hval;
    G.resize(nu);
    Hval.resize(nu);
    N.resize(np);
    C.resize(np);

    const int feats = pb.model == Model::antiplane ? 4 : pb.model == Model::cauchy ? 7 : 17;
    const int curl_feats = pb.model == Model::antiplane ? 1 : pb.model == Model::cauchy ? 0 : 9;
    fr.reset(feats * nq, nloc, curl_feats * nq);
    out.K0.setZero(nloc, nloc);
    out.Kc.setZero(curl_feats ? nloc : 0, curl_feats ? nloc : 0);
    out.f.setZero(nloc);

    for (int q = 0; q < nq; ++q) {
        const double w = rule_->weights[q] * adet;
        for (int i = 0; i < nu; ++i) {
            G[i] = map_gradient(map, u_table_.vec[q * nu + i]);
            Hval[i] = u_table_.value[q * nu + i];
        }
        for (int m = 0; m < np; ++m) {
            N[m] = map_covariant(map, p_table_.vec[q * np + m]);
            C[m] = map_curl(dim, map, p_table_.curl[q * np + m]);
        }
        auto finish = [&](auto r, double weight) { r *= std::sqrt(std::abs(weight) * w); };
        const bool need_x = pb.loads.f_scalar || pb.loads.m || pb.loads.f || pb.loads.M;
        const Point x = need_x ? push_forward(mesh, cell, rule_->simplex_points[q]) : Point{};

        if (pb.model == Model::antiplane) {
            for (int k = 0; k < 2; ++k) {
                auto r = fr.row(mp.mu_e);
                for (int i = 0; i < nu; ++i) r(i) = G[i][k];
                for (int m = 0; m < np; ++m) r(pbase + m) = -N[m][k];
                finish(r, mp.mu_e);
            }
            for (int k = 0; k < 2; ++k) {
                auto r = fr.row(mp.mu_micro);
                for (int m = 0; m < np; ++m) r(pbase + m) = N[m][k];
                finish(r, mp.mu_micro);
            }
            auto rc = fr.curl_row();
            for (int m = 0; m < np; ++m) rc(pbase + m) = C[m][0];
            rc *= std::sqrt(w);
            if (pb.loads.f_scalar) {
                const double fv = pb.loads.f_scalar(x) * w;
                for (int i = 0; i < nu; ++i) out.f(i) += fv * Hval[i];
            }
            if (pb.loads.m) {
                const Vec3 mv = pb.loads.m(x);
                for (int m = 0; m < np; ++m) out.f(pbase + m) += w * (mv[0] * N[m][0] + mv[1] * N[m][1]);
            }
            continue;
        }

        // Strain-like tensor e = Du - P (P absent for the Cauchy model).
        const bool with_p = pb.model == Model::full3d;
        const LamePair outer = with_p ? LamePair{mp.mu_e, mp.lambda_e} : pb.cauchy;
        // sym e: diagonal
        for (int i = 0; i < 3; ++i) {
            const double wt = 2 * outer.mu;
            auto r = fr.row(wt);
            for (int n = 0; n < nu; ++n) r(i * nu + n) = G[n][i];
            if (with_p)
                for (int m = 0; m < np; ++m) r(pbase + i * np + m) = -N[m][i];
            finish(r, wt);
        }
        // sym e: off-diagonal, counted twice in the full contraction
        for (auto [i, j] : kOffDiag) {
            const double wt = 4 * outer.mu;
            auto r = fr.row(wt);
            for (int n = 0; n < nu; ++n) {
                r(i * nu + n) += 0.5 * G[n][j];
                r(j * nu + n) += 0.5 * G[n][i];
            }
            if (with_p)
                for (int m = 0; m < np; ++m) {
                    r(pbase + i * np + m) -= 0.5 * N[m][j];
                    r(pbase + j * np + m) -= 0.5 * N[m][i];
                }
            finish(r, wt);
        }
        if (outer.lambda != 0.0) {
            auto r = fr.row(outer.lambda);
            for (int i = 0; i < 3; ++i) {
                for (int n = 0; n < nu; ++n) r(i * nu + n) = G[n][i];
                if (with_p)
                    for (int m = 0; m < np; ++m) r(pbase + i * np + m) = -N[m][i];
            }
            finish(r, outer.lambda);
        }
        if (pb.loads.f) {
            const Vec3 fv = pb.loads.f(x);
            for (int i = 0; i < 3; ++i)
                for (int n = 0; n < nu; ++n) out.f(i * nu + n) += w * fv[i] * Hval[n];
        }
        if (!with_p) continue;

        if (mp.mu_c != 0.0)
            for (auto [i, j] : kOffDiag) {
                const double wt = 4 * mp.mu_c;
                auto r = fr.row(wt);
                for (int n = 0; n < nu; ++n) {
                    r(i * nu + n) += 0.5 * G[n][j];
                    r(j * nu + n) -= 0.5 * G[n][i];
                }
                for (int m = 0; m < np; ++m) {
                    r(pbase + i * np + m) -= 0.5 * N[m][j];
                    r(pbase + j * np + m) += 0.5 * N[m][i];
                }
                finish(r, wt);
            }
        for (int i = 0; i < 3; ++i) {
            const double wt = 2 * mp.mu_micro;
            auto r = fr.row(wt);
            for (int m = 0; m < np; ++m) r(pbase + i * np + m) = N[m][i];
            finish(r, wt);
        }
        for (auto [i, j] : kOffDiag) {
            const double wt = 4 * mp.mu_micro;
            auto r = fr.row(wt);
            for (int m = 0; m < np; ++m) {
                r(pbase + i * np + m) += 0.5 * N[m][j];
                r(pbase + j * np + m) += 0.5 * N[m][i];
            }
            finish(r, wt);
        }
        if (mp.lambda_micro != 0.0) {
            auto r = fr.row(mp.lambda_micro);
            for (int i = 0; i < 3; ++i)
                for (int m = 0; m < np; ++m) r(pbase + i * np + m) = N[m][i];
            finish(r, mp.lambda_micro);
        }
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) {
                auto r = fr.curl_row();
                for (int m = 0; m < np; ++m) r(pbase + i * np + m) = C[m][k];
                r *= std::sqrt(w);
            }
        if (pb.loads.M) {
            const Eigen::Matrix3d Mv = pb.loads.M(x);
            for (int i = 0; i < 3; ++i)
                for (int m = 0; m < np; ++m)
                    out.f(pbase + i * np + m) += w * (Mv(i, 0) * N[m][0] + Mv(i, 1) * N[m][1] + Mv(i, 2) * N[m][2]);
        }
    }

    gram(fr.pos, fr.npos, 1.0, out.K0);
    gram(fr.neg, fr.nneg, -1.0, out.K0);
    symmetrize(out.K0);
    if (curl_feats) {
        gram(fr.curl, fr.ncurl, 1.0, out.Kc);
        symmetrize(out.Kc);
    }
}

SpMat sparsity_pattern(const Layout& layout) {
    const int n = layout.size();
    const int nloc = layout.local_size();
    std::vector<std::vector<int>> cols(n);
    std::vector<std::size_t> clean(n, 0);
    std::vector<int> dofs(nloc);
    for (int c = 0; c < layout.mesh().num_cells(); ++c) {
        layout.cell_dofs(c, dofs);
        for (int a : dofs) {
            auto& col = cols[a];
            col.insert(col.end(), dofs.begin(), dofs.end());
            // Deduplicate lazily to bound the transient footprint.
            if (col.size() > 2 * clean[a] + 4 * std::size_t(nloc)) {
                std::sort(col.begin(), col.end());
                col.erase(std::unique(col.begin(), col.end()), col.end());
                clean[a] = col.size();
            }
        }
    }
    SpMat K(n, n);
    std::size_t nnz = 0;
    for (auto& col : cols) {
        std::sort(col.begin(), col.end());
        col.erase(std::unique(col.begin(), col.end()), col.end());
        nnz += col.size();
    }
    K.resizeNonZeros(static_cast<Eigen::Index>(nnz));
    int* outer = K.outerIndexPtr();
    int* inner = K.innerIndexPtr();
    double* values = K.valuePtr();
    std::size_t pos = 0;
    for (int j = 0; j < n; ++j) {
        outer[j] = static_cast<int>(pos);
        std::copy(cols[j].begin(), cols[j].end(), inner + pos);
        pos += cols[j].size();
        std::vector<int>().swap(cols[j]);
    }
    outer[n] = static_cast<int>(pos);
    std::fill(values, values + nnz, 0.0);
    return K;
}

namespace {

// Adds column b of an element matrix into the global column.
void scatter_column(SpMat& K, const Eigen::MatrixXd& Ke, std::span<const int> dofs, int b) {
    const int gb = dofs[b];
    const int* outer = K.outerIndexPtr();
    const int* begin = K.innerIndexPtr() + outer[gb];
    const int* end = K.innerIndexPtr() + outer[gb + 1];
    double* values = K.valuePtr();
    for (std::size_t a = 0; a < dofs.size(); ++a) {
        const int* it = std::lower_bound(begin, end, dofs[a]);
        values[it - K.innerIndexPtr()] += Ke(a, b);
    }
}

double curl_coefficient(const Problem& pb) {
    if (pb.model == Model::cauchy) return 0.0;
    return pb.params.mu_macro * pb.params.Lc * pb.params.Lc;
}

}  // namespace

SparseSystem assemble_serial(const Layout& layout) {
    SparseSystem sys;
    sys.K0 = sparsity_pattern(layout);
    const bool has_curl = layout.problem().model != Model::cauchy;
    if (has_curl) sys.Kc = sys.K0;
    sys.rhs.setZero(layout.size());
    sys.curl_coefficient = curl_coefficient(layout.problem());
    const ElementKernel kernel(layout);
    ElementSystem es;
    std::vector<int> dofs(layout.local_size());
    for (int c = 0; c < layout.mesh().num_cells(); ++c) {
        kernel.compute(c, es);
        layout.cell_dofs(c, dofs);
        for (int b = 0; b < layout.local_size(); ++b) {
            scatter_column(sys.K0, es.K0, dofs, b);
            if (has_curl) scatter_column(sys.Kc, es.Kc, dofs, b);
        }
        for (int a = 0; a < layout.local_size(); ++a) sys.rhs(dofs[a]) += es.f(a);
    }
    return sys;
}

SparseSystem assemble(const Layout& layout, int threads) {
    if (threads <= 0) threads = omp_get_max_threads();
    SparseSystem sys;
    sys.K0 = sparsity_pattern(layout);
    const bool has_curl = layout.problem().model != Model::cauchy;
    if (has_curl) sys.Kc = sys.K0;
    sys.rhs.setZero(layout.size());
    sys.curl_coefficient = curl_coefficient(layout.problem());
    const ElementKernel kernel(layout);
    const int ncells = layout.mesh().num_cells();
    const int nloc = layout.local_size();
    const int n = layout.size();

    // Column ranges of roughly equal nonzero counts, one per thread.
    std::vector<int> col_split(threads + 1, n);
    col_split[0] = 0;
    {
        const auto nnz = static_cast<double>(sys.K0.nonZeros());
        int t = 1;
        for (int j = 0; j < n && t < threads; ++j)
            if (sys.K0.outerIndexPtr()[j] >= nnz * t / threads) col_split[t++] = j;
    }

    const int block = std::max(16, 8 * threads);
    std::vector<ElementSystem> es(block);
    std::vector<int> dofs(std::size_t(block) * nloc);
    for (int start = 0; start < ncells; start += block) {
        const int count = std::min(block, ncells - start);
#pragma omp parallel for schedule(static) num_threads(threads)
        for (int k = 0; k < count; ++k) {
            kernel.compute(start + k, es[k]);
            layout.cell_dofs(start + k, std::span(dofs).subspan(std::size_t(k) * nloc, nloc));
        }
#pragma omp parallel num_threads(threads)
        {
            const int t = omp_get_thread_num();
            const int lo = col_split[t], hi = col_split[t + 1];
            for (int k = 0; k < count; ++k) {
                const auto cd = std::span<const int>(dofs).subspan(std::size_t(k) * nloc, nloc);
                for (int b = 0; b < nloc; ++b) {
                    if (cd[b] < lo || cd[b] >= hi) continue;
                    scatter_column(sys.K0, es[k].K0, cd, b);
                    if (has_curl) scatter_column(sys.Kc, es[k].Kc, cd, b);
                    // The owner of a column also owns the matching load entry.
                    sys.rhs(cd[b]) += es[k].f(b);
                }
            }
        }
    }
    return sys;
}

PointFields evaluate(const Layout& layout, const Eigen::VectorXd& x, int cell, const RefTable& ut,
                     const RefTable* pt, int q, const RefPoint& ref) {
    const Mesh& mesh = layout.mesh();
    const AffineMap& map = mesh.maps[cell];
    PointFields pf;
    pf.x = push_forward(mesh, cell, ref);
    const auto& ub = layout.u();
    thread_local std::vector<int> dofs;
    dofs.resize(ub.map.local_size());
    ub.map.cell_dofs(cell, dofs);
    for (int c = 0; c < ub.components; ++c)
        for (int i = 0; i < ut.n; ++i) {
            const double coef = x(ub.offset + c * ub.map.size() + dofs[i]);
            const Vec3 g = map_gradient(map, ut.vec[q * ut.n + i]);
            pf.u(c) += coef * ut.value[q * ut.n + i];
            for (int d = 0; d < 3; ++d) pf.Du(c, d) += coef * g[d];
        }
    if (layout.has_p() && pt) {
        const auto& pb = layout.p();
        dofs.resize(pb.map.local_size());
        pb.map.cell_dofs(cell, dofs);
        for (int r = 0; r < pb.components; ++r)
            for (int m = 0; m < pt->n; ++m) {
                const double coef = x(pb.offset + r * pb.map.size() + dofs[m]);
                const Vec3 v = map_covariant(map, pt->vec[q * pt->n + m]);
                const Vec3 cv = map_curl(mesh.dim, map, pt->curl[q * pt->n + m]);
                for (int d = 0; d < 3; ++d) {
                    pf.P(r, d) += coef * v[d];
                    pf.CurlP(r, d) += coef * cv[d];
                }
            }
    }
    return pf;
}

double compute_energy(const Layout& layout, const Eigen::VectorXd& x, std::optional<double> Lc) {
    const Problem& pb = layout.problem();
    const Mesh& mesh = layout.mesh();
    const QuadratureRule& rule = rule_for(mesh.dim, quadrature_degree(pb));
    const RefTable ut = tabulate(pb.u_space, rule);
    RefTable pt;
    if (layout.has_p()) pt = tabulate(pb.p_space, rule);
    const MaterialParams& mp = pb.params;
    const double lc = Lc.value_or(mp.Lc);
    double energy = 0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double adet = std::abs(mesh.maps[c].det);
        for (int q = 0; q < rule.size(); ++q) {
            const PointFields f = evaluate(layout, x, c, ut, layout.has_p() ? &pt : nullptr, q, rule.simplex_points[q]);
            double density = 0;
            if (pb.model == Model::antiplane) {
                const Eigen::Vector2d gu = f.Du.row(0).head<2>().transpose();
                const Eigen::Vector2d p = f.P.row(0).head<2>().transpose();
                density = mp.mu_e * (gu - p).squaredNorm() + mp.mu_micro * p.squaredNorm() +
                          mp.mu_macro * lc * lc * f.CurlP(0, 0) * f.CurlP(0, 0);
            } else if (pb.model == Model::cauchy) {
                const Eigen::Matrix3d e = sym(f.Du);
                density = e.cwiseProduct(apply_isotropic(pb.cauchy, e)).sum();
            } else {
                const Eigen::Matrix3d e = f.Du - f.P;
                density = sym(e).cwiseProduct(apply_isotropic({mp.mu_e, mp.lambda_e}, sym(e))).sum() +
                          skw(e).cwiseProduct(apply_cosserat(mp.mu_c, e)).sum() +
                          sym(f.P).cwiseProduct(apply_isotropic({mp.mu_micro, mp.lambda_micro}, sym(f.P))).sum() +
                          mp.mu_macro * lc * lc * f.CurlP.squaredNorm();
            }
            energy += 0.5 * rule.weights[q] * adet * density;
        }
    }
    return energy;
}

double l2_error(const Layout& layout, const Eigen::VectorXd& x, FieldKind field,
                const std::function<Eigen::Matrix3d(const Point&)>& exact, int quad_degree) {
    const Problem& pb = layout.problem();
    const Mesh& mesh = layout.mesh();
    if (field == FieldKind::p && !layout.has_p()) throw SpaceMismatch("model has no microdistortion");
    const QuadratureRule& rule = rule_for(mesh.dim, std::min(quad_degree, kMaxQuadratureDegree));
    const RefTable ut = tabulate(pb.u_space, rule);
    RefTable pt;
    if (layout.has_p()) pt = tabulate(pb.p_space, rule);
    double err = 0;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const double adet = std::abs(mesh.maps[c].det);
        for (int q = 0; q < rule.size(); ++q) {
            const PointFields f = evaluate(layout, x, c, ut, layout.has_p() ? &pt : nullptr, q, rule.simplex_points[q]);
            const Eigen::Matrix3d ex = exact(f.x);
            double d2 = 0;
            if (field == FieldKind::u) {
                d2 = (ex.col(0) - f.u).squaredNorm();
            } else {
                d2 = (ex - f.P).squaredNorm();
            }
            err += rule.weights[q] * adet * d2;
        }
    }
    return std::sqrt(err);
}

}  // namespace mmfem
