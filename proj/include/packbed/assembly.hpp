#ifndef PACKBED_ASSEMBLY_HPP
#define PACKBED_ASSEMBLY_HPP

/**
 * @file assembly.hpp
 * @brief Variational forms and the sparse saddle-point system.
 *
 *   a(u, v)    = (1/Re) (eps grad u, grad v)
 *   b(u, q)    = (div(eps u), q) = (eps div u + grad eps . u, q)
 *   c(u, v)    = (1/Re) (alpha u, v)
 *   d(w; u, v) = (beta |w| u, v)
 *   n(w, u, v) = ((eps w . grad) u, v)
 *
 * The discrete problem is A(w; u, v) - b(v, p) + b(u, q) = (f, v), i.e. the
 * block operator [[A(w), -B^T], [B, 0]]. Nothing is integrated on the outlet,
 * which yields eps (-(1/Re) du/dn + p n) = 0 there.
 */

#include "packbed/fem.hpp"
#include "packbed/mesh.hpp"
#include "packbed/model.hpp"
#include "packbed/types.hpp"

#include <iosfwd>
#include <vector>

namespace packbed {

// -- form evaluation on arbitrary fields -------------------------------------
//
// Fields are sampled at the quadrature points of every cell, so analytic
// callables and finite element coefficient vectors (via fe_velocity) are
// treated alike.

double eval_form_a(const StructuredQuadMesh& mesh, const VectorFieldFn& u, const VectorFieldFn& v,
                   const ScalarFieldFn& eps, double re, int quad_order);
double eval_form_b(const StructuredQuadMesh& mesh, const VectorFieldFn& u,
                   const std::function<double(double, double)>& q, const ScalarFieldFn& eps,
                   int quad_order);
double eval_form_c(const StructuredQuadMesh& mesh, const VectorFieldFn& u, const VectorFieldFn& v,
                   const ScalarFieldFn& eps, double re, int quad_order);
double eval_form_d(const StructuredQuadMesh& mesh, const VectorFieldFn& w, const VectorFieldFn& u,
                   const VectorFieldFn& v, const ScalarFieldFn& eps, int quad_order);
double eval_form_n(const StructuredQuadMesh& mesh, const VectorFieldFn& w, const VectorFieldFn& u,
                   const VectorFieldFn& v, const ScalarFieldFn& eps, int quad_order);

/// Quadrature of sum_ij |eps w_j d_j u_i v_i|: the natural magnitude of n(w, u, v).
double eval_form_n_magnitude(const StructuredQuadMesh& mesh, const VectorFieldFn& w,
                             const VectorFieldFn& u, const VectorFieldFn& v,
                             const ScalarFieldFn& eps, int quad_order);

// -- finite element fields ---------------------------------------------------

VectorSample eval_velocity(const StructuredQuadMesh& mesh, const DofMaps& maps,
                           const Vector& coeffs, int cell, const Vec2& ref);
double eval_pressure(const StructuredQuadMesh& mesh, const Vector& coeffs, int cell,
                     const Vec2& ref);

/// Point-evaluating wrappers. The returned callables keep copies of their inputs.
VectorFieldFn fe_velocity(const StructuredQuadMesh& mesh, const DofMaps& maps, const Vector& coeffs);
std::function<double(double, double)> fe_pressure(const StructuredQuadMesh& mesh,
                                                  const Vector& coeffs);

/// Nodal Q2 interpolant of g.
Vector interpolate_velocity(const DofMaps& maps, const VectorFn& g);

/// Cellwise L2 projection of p onto (1, xi, eta).
Vector project_pressure(const StructuredQuadMesh& mesh, const std::function<double(double, double)>& p,
                        int quad_order);

class SolutionFields {
 public:
  SolutionFields(StructuredQuadMesh mesh, Vector velocity, Vector pressure);

  const StructuredQuadMesh& mesh() const { return mesh_; }
  const DofMaps& dofs() const { return dofs_; }
  const Vector& velocity() const { return velocity_; }
  const Vector& pressure() const { return pressure_; }
  Vector& velocity() { return velocity_; }
  Vector& pressure() { return pressure_; }

  Vec2 velocity_at(const Vec2& p) const;
  Mat2 velocity_gradient_at(const Vec2& p) const;
  double pressure_at(const Vec2& p) const;
  bool finite() const;

 private:
  StructuredQuadMesh mesh_;
  DofMaps dofs_;
  Vector velocity_;
  Vector pressure_;
};

// -- saddle-point system -----------------------------------------------------

/// Which w-dependent terms enter A(w). Both on for the physical model.
struct NonlinearTerms {
  bool convection = true;
  bool forchheimer = true;
};

/// Unconstrained blocks. Velocity blocks are 2Nv x 2Nv; b is Np x 2Nv.
struct SaddleSystem {
  SparseMatrix a_visc;
  SparseMatrix c_darcy;
  SparseMatrix n_conv;
  SparseMatrix d_forch;
  SparseMatrix b;
  Vector load;  ///< (f, v)

  SparseMatrix velocity_block() const;
  /// Full unconstrained operator [[A, -B^T], [B, 0]].
  SparseMatrix full_operator() const;
};

struct DirichletData {
  VectorFn inlet;
  VectorFn wall;
  VectorFn outlet;  ///< empty => natural outflow
};

DirichletData make_dirichlet_data(const CaseConfig& cfg);

/// Prescribed DOFs, sorted by index. Pressure DOFs may appear (gauge pin).
struct Constraints {
  std::vector<int> dofs;
  std::vector<double> values;
  std::vector<char> fixed;  ///< fixed[dof] != 0 for constrained DOFs (size = total DOFs)

  bool is_fixed(int dof) const { return fixed[static_cast<std::size_t>(dof)] != 0; }
};

/// Velocity constraints at every Dirichlet node; in enclosed mode also pins
/// pressure DOF 0 (constant mode of cell 0) to zero.
Constraints dirichlet_constraints(const StructuredQuadMesh& mesh, const DofMaps& maps,
                                  const DirichletData& data);

struct ConstrainedSystem {
  SparseMatrix matrix;
  Vector rhs;
};

/// Identity rows for fixed DOFs; their columns are moved to the right-hand side.
ConstrainedSystem apply_dirichlet(const SaddleSystem& system, const Constraints& constraints);

/// Cell-loop assembler. The w-independent blocks and the load vector are
/// built once at construction; assemble() adds N(w) and D(w).
class Assembler {
 public:
  Assembler(const StructuredQuadMesh& mesh, const DofMaps& maps, const CaseConfig& cfg);

  SaddleSystem assemble(const Vector& w, NonlinearTerms terms = {}) const;

  const SparseMatrix& a_visc() const { return a_visc_; }
  const SparseMatrix& c_darcy() const { return c_darcy_; }
  const SparseMatrix& b() const { return b_; }
  const Vector& load() const { return load_; }

 private:
  struct PointData {
    double weight;  // quadrature weight times det J
    Vec2 x;
    double eps;
    Vec2 grad_eps;
    double alpha;
    double beta;
  };

  void build_linear_blocks();

  StructuredQuadMesh mesh_;
  DofMaps maps_;
  double re_;
  VectorFn forcing_;
  // Per cell, per quadrature point.
  std::vector<std::vector<PointData>> points_;
  // Per quadrature point; Q2 gradients in physical coordinates (uniform mesh).
  std::vector<Q2Values> q2_;
  std::vector<P1Values> p1_;
  SparseMatrix a_visc_;
  SparseMatrix c_darcy_;
  SparseMatrix b_;
  Vector load_;
};

SaddleSystem assemble_system(const StructuredQuadMesh& mesh, const DofMaps& maps,
                             const CaseConfig& cfg, const Vector& w);

/// Coordinate dump, one nonzero per line: `row col value`.
void write_matrix_coo(std::ostream& os, const SparseMatrix& m);

}  // namespace packbed

#endif  // PACKBED_ASSEMBLY_HPP
