#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <optional>
#include <vector>

#include "mmfem/materials.hpp"
#include "mmfem/space.hpp"

namespace mmfem {

enum class Model {
    antiplane,  // scalar u in H1, vector p in H(curl), 2D
    full3d,     // u in [H1]^3, P with rows in H(curl), 3D
    cauchy,     // u in [H1]^3 with isotropic (lambda, mu), 3D
};

struct Loads {
    std::function<double(const Point&)> f_scalar;          // antiplane force
    std::function<Vec3(const Point&)> m;                   // antiplane micro-moment (two components)
    std::function<Vec3(const Point&)> f;                   // 3D force
    std::function<Eigen::Matrix3d(const Point&)> M;        // 3D micro-moment
};

struct Problem {
    Model model = Model::antiplane;
    const Mesh* mesh = nullptr;
    MaterialParams params;
    LamePair cauchy;  // used by Model::cauchy
    SpaceDescriptor u_space;
    SpaceDescriptor p_space;  // ignored for Model::cauchy
    Loads loads;
    int quad_degree = 0;  // 0 selects 2 * H1 degree
};

int quadrature_degree(const Problem& problem);

// One field: `components` copies of a DofMap; copy c starts at offset + c * map.size().
struct FieldBlock {
    DofMap map;
    int components = 1;
    int offset = 0;
};

// Global and element-local layout: u block first, then P (if any).
class Layout {
public:
    explicit Layout(const Problem& problem);

    const Problem& problem() const { return problem_; }
    const Mesh& mesh() const { return *problem_.mesh; }
    const FieldBlock& u() const { return blocks_[0]; }
    const FieldBlock& p() const { return blocks_.at(1); }
    bool has_p() const { return blocks_.size() > 1; }
    int size() const { return total_; }
    int local_size() const { return local_; }
    void cell_dofs(int cell, std::span<int> out) const;

private:
    Problem problem_;
    std::vector<FieldBlock> blocks_;
    int total_ = 0;
    int local_ = 0;
};

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// K0 holds everything but the curvature term; Kc the unscaled curl-curl term on the same pattern.
struct SparseSystem {
    SpMat K0;
    SpMat Kc;
    Eigen::VectorXd rhs;
    double curl_coefficient = 0.0;  // mu_macro * Lc^2

    SpMat matrix() const { return matrix(curl_coefficient); }
    SpMat matrix(double curl_coefficient) const;
};

// Element matrices and load vector of one cell; Kc is empty for Model::cauchy.
struct ElementSystem {
    Eigen::MatrixXd K0, Kc;
    Eigen::VectorXd f;
};

class ElementKernel {
public:
    explicit ElementKernel(const Layout& layout);
    void compute(int cell, ElementSystem& out) const;
    const RefTable& u_table() const { return u_table_; }
    const RefTable& p_table() const { return p_table_; }
    const QuadratureRule& rule() const { return *rule_; }

private:
    const Layout* layout_;
    const QuadratureRule* rule_;
    RefTable u_table_, p_table_;
};

// Symmetric sparsity pattern with explicit zeros; both triangles stored.
SpMat sparsity_pattern(const Layout& layout);

// Reference assembly: one element after the other, scattered in cell order.
SparseSystem assemble_serial(const Layout& layout);
// OpenMP assembly; element work is split across threads and scattered by column ownership
// in cell order, so the result is bitwise identical to assemble_serial.
SparseSystem assemble(const Layout& layout, int threads = 0);

// Physical fields at one point of a cell.
struct PointFields {
    Point x{};
    Eigen::Vector3d u = Eigen::Vector3d::Zero();
    Eigen::Matrix3d Du = Eigen::Matrix3d::Zero();    // Du(i, j) = d u_i / d x_j
    Eigen::Matrix3d P = Eigen::Matrix3d::Zero();     // rows are the H(curl) fields; antiplane p in row 0
    Eigen::Matrix3d CurlP = Eigen::Matrix3d::Zero(); // row-wise curl; antiplane rot p in (0, 0)
};

// Evaluates the solution at table point q of a cell.
PointFields evaluate(const Layout& layout, const Eigen::VectorXd& x, int cell, const RefTable& ut,
                     const RefTable* pt, int q, const RefPoint& ref);

// Quadratic part 1/2 a(x, x), evaluated from field values at quadrature points.
double compute_energy(const Layout& layout, const Eigen::VectorXd& x, std::optional<double> Lc = std::nullopt);

enum class FieldKind { u, p };
// sqrt of the integral of |exact - discrete|^2 over the mesh.
double l2_error(const Layout& layout, const Eigen::VectorXd& x, FieldKind field,
                const std::function<Eigen::Matrix3d(const Point&)>& exact, int quad_degree);

}  // namespace mmfem
