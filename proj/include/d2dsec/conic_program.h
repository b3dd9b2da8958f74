#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "d2dsec/types.h"

namespace d2dsec::conic {

enum class ConeKind { kZero, kNonneg, kSoc };

/// Real affine expression over the program variables.
struct LinExpr {
  double constant = 0.0;
  std::vector<std::pair<int, double>> terms;

  LinExpr() = default;
  explicit LinExpr(double c) : constant(c) {}
  static LinExpr var(int index, double coef = 1.0);

  LinExpr& add(int index, double coef);
  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr& operator*=(double s);
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend LinExpr operator*(double s, LinExpr a) { return a *= s; }

  /// Merges duplicate indices and drops exact zeros.
  void canonicalize();
  double evaluate(const RVec& x) const;
};

/// Complex affine expression in complex unknowns. A complex unknown is stored
/// as two adjacent reals; `terms` is keyed by the index of the real part.
struct CLin {
  cd constant{0.0, 0.0};
  std::vector<std::pair<int, cd>> terms;

  CLin() = default;
  CLin(cd c) : constant(c) {}  // NOLINT(google-explicit-constructor)
  static CLin variable(int re_index);

  bool is_constant() const { return terms.empty(); }
  CLin& operator+=(const CLin& o);
  CLin& operator*=(cd s);
  friend CLin operator+(CLin a, const CLin& b) { return a += b; }
  friend CLin operator*(cd s, CLin a) { return a *= s; }

  LinExpr real() const;
  LinExpr imag() const;
  cd evaluate(const RVec& x) const;
};

/// Product of two expressions; at least one must be constant.
CLin product(const CLin& a, const CLin& b);

/// u = offset + coeffs * x[support] must lie in the cone.
struct ConeConstraint {
  ConeKind kind = ConeKind::kNonneg;
  std::vector<int> support;
  RMat coeffs;
  RVec offset;
  std::string label;

  int dim() const { return static_cast<int>(offset.size()); }
  RVec evaluate(const RVec& x) const;
  /// Distance outside the cone (0 when satisfied).
  double violation(const RVec& x) const;
};

struct VarSlice {
  int start = 0;
  int size = 0;
};

/// Solver-agnostic real conic program: minimize cost^T x subject to every
/// constraint.
struct ConicProgram {
  int n_vars = 0;
  RVec cost;
  std::vector<ConeConstraint> constraints;
  std::map<std::string, VarSlice> var_index;
  // Set when a constraint with no variables is violated.
  bool trivially_infeasible = false;
  std::string infeasible_reason;

  int slice_start(const std::string& name) const;
  double max_violation(const RVec& x) const;
};

class ProgramBuilder {
 public:
  int add_variables(const std::string& name, int count);
  int n_vars() const { return n_vars_; }

  void add_nonneg(LinExpr e, std::string label);
  void add_zero(LinExpr e, std::string label);
  /// ||tail|| <= head.
  void add_soc(LinExpr head, const std::vector<LinExpr>& tail, std::string label);
  /// ||(terms)||_2 <= bound.
  void add_norm_le(const std::vector<CLin>& terms, const LinExpr& bound,
                   std::string label);
  /// sum_i |terms_i|^2 <= bound, via ||(2 u, b - 1)|| <= b + 1.
  void add_squared_norm_le(const std::vector<CLin>& terms, const LinExpr& bound,
                           std::string label);
  void minimize(const LinExpr& objective);

  ConicProgram build() &&;

 private:
  void mark_infeasible(const std::string& why);
  ConeConstraint make_block(ConeKind kind, const std::vector<LinExpr>& rows,
                            std::string label) const;

  int n_vars_ = 0;
  std::vector<ConeConstraint> constraints_;
  std::map<std::string, VarSlice> var_index_;
  LinExpr objective_;
  bool infeasible_ = false;
  std::string reason_;
};

/// Text dump: a header line, then `c`, `G` (coordinate triplets, u = h - G x),
/// `h` and the cone list. See README for the layout.
void write_program(const ConicProgram& cp, std::ostream& os);

}  // namespace d2dsec::conic
