#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mmfem/assembly.hpp"
#include "mmfem/dual.hpp"

namespace mmfem {

enum class Provenance { vertex, edge, face };

struct Constraint {
    double value = 0.0;
    Provenance from = Provenance::vertex;
};

// Prescribed values keyed by global dof of a Layout.
class ConstraintSet {
public:
    // Throws BadIndex if the dof is already constrained.
    void set(int dof, double value, Provenance from);
    bool contains(int dof) const { return map_.count(dof) != 0; }
    double value(int dof) const;
    int size() const { return static_cast<int>(map_.size()); }
    const std::map<int, Constraint>& entries() const { return map_; }
    // Dense vector of length n with constrained values and zeros elsewhere.
    Eigen::VectorXd lift(int n) const;

private:
    std::map<int, Constraint> map_;
};

// Boundary displacement and its Jacobian, Du(i, j) = d u_i / d x_j. Antiplane uses component 0.
struct BoundaryData {
    std::function<Vec3(const Point&)> value;
    std::function<Eigen::Matrix3d(const Point&)> gradient;
};

// Wraps a field written generically over the scalar type; the Jacobian comes from dual numbers.
template <class F>
BoundaryData boundary_data(F field) {
    BoundaryData d;
    d.value = [field](const Point& x) {
        const auto r = field(std::array<Dual, 3>{Dual(x[0]), Dual(x[1]), Dual(x[2])});
        return Vec3{Dual(r[0]).val, Dual(r[1]).val, Dual(r[2]).val};
    };
    d.gradient = [field](const Point& x) {
        Eigen::Matrix3d g;
        for (int j = 0; j < 3; ++j) {
            std::array<Dual, 3> a{Dual(x[0]), Dual(x[1]), Dual(x[2])};
            a[j].der = 1.0;
            const auto r = field(a);
            for (int i = 0; i < 3; ++i) g(i, j) = Dual(r[i]).der;
        }
        return g;
    };
    return d;
}

// Local projection onto the trace space of one boundary edge or face.
struct EntityProjection {
    std::vector<int> dofs;    // DofMap ids owned by the entity (the unknowns)
    std::vector<int> fixed;   // DofMap ids of sub-entities, already prescribed
    Eigen::MatrixXd K;        // unknowns x unknowns
    Eigen::MatrixXd K_fixed;  // unknowns x fixed
    Eigen::VectorXd load;     // before moving fixed contributions
    Eigen::VectorXd values;   // solution
};

// H1: tangential-gradient projection of a scalar with gradient `grad`.
// H(curl): tangential projection onto grad, plus the surface rot on faces (grad is curl-free).
// `known` returns the value of a fixed DofMap id. Throws SingularEdge or DegenerateFace.
EntityProjection project_entity(const DofMap& map, PolytopeKind kind, int entity,
                                const std::function<Vec3(const Point&)>& grad,
                                const std::function<double(int)>& known);

// Vertex, then edge, then face constraints on the facets carrying one of `tags`
// (all boundary facets when empty). P rows are constrained by the rows of D u~ when constrain_p.
ConstraintSet build_constraints(const Layout& layout, const BoundaryData& data,
                                const std::vector<std::string>& tags, bool constrain_p);
// constrain_p defaults to Lc > 0: without the curl term P carries no boundary condition.
ConstraintSet build_constraints(const Layout& layout, const BoundaryData& data,
                                const std::vector<std::string>& tags = {});

}  // namespace mmfem
