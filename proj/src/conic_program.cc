#include "d2dsec/conic_program.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace d2dsec::conic {

LinExpr LinExpr::var(int index, double coef) {
  LinExpr e;
  e.terms.emplace_back(index, coef);
  return e;
}

LinExpr& LinExpr::add(int index, double coef) {
  terms.emplace_back(index, coef);
  return *this;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
  constant -= o.constant;
  for (const auto& [i, c] : o.terms) terms.emplace_back(i, -c);
  return *this;
}

LinExpr& LinExpr::operator*=(double s) {
  constant *= s;
  for (auto& t : terms) t.second *= s;
  return *this;
}

void LinExpr::canonicalize() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().first == t.first)
      merged.back().second += t.second;
    else
      merged.push_back(t);
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const auto& t) { return t.second == 0.0; }),
               merged.end());
  terms = std::move(merged);
}

double LinExpr::evaluate(const RVec& x) const {
  double acc = constant;
  for (const auto& [i, c] : terms) acc += c * x(i);
  return acc;
}

CLin CLin::variable(int re_index) {
  CLin e;
  e.terms.emplace_back(re_index, cd(1.0, 0.0));
  return e;
}

CLin& CLin::operator+=(const CLin& o) {
  constant += o.constant;
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  return *this;
}

CLin& CLin::operator*=(cd s) {
  constant *= s;
  for (auto& t : terms) t.second *= s;
  return *this;
}

LinExpr CLin::real() const {
  LinExpr e(constant.real());
  for (const auto& [j, a] : terms) {
    e.add(j, a.real());
    e.add(j + 1, -a.imag());
  }
  return e;
}

LinExpr CLin::imag() const {
  LinExpr e(constant.imag());
  for (const auto& [j, a] : terms) {
    e.add(j, a.imag());
    e.add(j + 1, a.real());
  }
  return e;
}

cd CLin::evaluate(const RVec& x) const {
  cd acc = constant;
  for (const auto& [j, a] : terms) acc += a * cd(x(j), x(j + 1));
  return acc;
}

CLin product(const CLin& a, const CLin& b) {
  if (a.is_constant()) return a.constant * b;
  if (b.is_constant()) return b.constant * a;
  throw std::logic_error("product: both operands depend on variables");
}

RVec ConeConstraint::evaluate(const RVec& x) const {
  RVec xs(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) xs(i) = x(support[i]);
  return offset + coeffs * xs;
}

double ConeConstraint::violation(const RVec& x) const {
  const RVec u = evaluate(x);
  switch (kind) {
    case ConeKind::kZero:
      return u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    case ConeKind::kNonneg:
      return u.size() ? std::max(0.0, -u.minCoeff()) : 0.0;
    case ConeKind::kSoc:
      return std::max(0.0, u.tail(u.size() - 1).norm() - u(0));
  }
  return 0.0;
}

int ConicProgram::slice_start(const std::string& name) const {
  const auto it = var_index.find(name);
  if (it == var_index.end())
    throw std::out_of_range("ConicProgram: no variable slice '" + name + "'");
  return it->second.start;
}

double ConicProgram::max_violation(const RVec& x) const {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, c.violation(x));
  return worst;
}

int ProgramBuilder::add_variables(const std::string& name, int count) {
  if (var_index_.count(name))
    throw std::invalid_argument("duplicate variable slice " + name);
  const int start = n_vars_;
  var_index_[name] = VarSlice{start, count};
  n_vars_ += count;
  return start;
}

void ProgramBuilder::mark_infeasible(const std::string& why) {
  if (!infeasible_) reason_ = why;
  infeasible_ = true;
}

ConeConstraint ProgramBuilder::make_block(ConeKind kind,
                                          const std::vector<LinExpr>& rows,
                                          std::string label) const {
  ConeConstraint c;
  c.kind = kind;
  c.label = std::move(label);
  for (const auto& r : rows)
    for (const auto& t : r.terms) c.support.push_back(t.first);
  std::sort(c.support.begin(), c.support.end());
  c.support.erase(std::unique(c.support.begin(), c.support.end()), c.support.end());
  c.coeffs = RMat::Zero(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(c.support.size()));
  c.offset = RVec::Zero(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    c.offset(r) = rows[r].constant;
    for (const auto& [i, v] : rows[r].terms) {
      const auto pos = std::lower_bound(c.support.begin(), c.support.end(), i) -
                       c.support.begin();
      c.coeffs(r, pos) += v;
    }
  }
  return c;
}

namespace {

constexpr double kConstTol = 1e-12;

bool has_terms(const std::vector<LinExpr>& rows) {
  return std::any_of(rows.begin(), rows.end(),
                     [](const LinExpr& r) { return !r.terms.empty(); });
}

std::vector<LinExpr> embed(const std::vector<CLin>& terms) {
  std::vector<LinExpr> rows;
  rows.reserve(2 * terms.size());
  for (const auto& t : terms) {
    rows.push_back(t.real());
    rows.push_back(t.imag());
  }
  for (auto& r : rows) r.canonicalize();
  return rows;
}

// Replaces rows (E x + e) by an R factor with the same Euclidean norm for every
// x when there are more rows than unknowns.
std::vector<LinExpr> compress(const std::vector<LinExpr>& rows) {
  std::vector<int> supp;
  for (const auto& r : rows)
    for (const auto& t : r.terms) supp.push_back(t.first);
  std::sort(supp.begin(), supp.end());
  supp.erase(std::unique(supp.begin(), supp.end()), supp.end());
  const Eigen::Index cols = static_cast<Eigen::Index>(supp.size()) + 1;
  if (static_cast<Eigen::Index>(rows.size()) <= cols) return rows;

  RMat E = RMat::Zero(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    E(r, cols - 1) = rows[r].constant;
    for (const auto& [i, v] : rows[r].terms) {
      const auto pos = std::lower_bound(supp.begin(), supp.end(), i) - supp.begin();
      E(r, pos) += v;
    }
  }
  Eigen::HouseholderQR<RMat> qr(E);
  const RMat R = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  std::vector<LinExpr> out;
  out.reserve(cols);
  for (Eigen::Index r = 0; r < cols; ++r) {
    LinExpr e(R(r, cols - 1));
    for (Eigen::Index c = r; c + 1 < cols; ++c)
      if (R(r, c) != 0.0) e.add(supp[c], R(r, c));
    out.push_back(std::move(e));
  }
  return out;
}

double constant_sq_norm(const std::vector<LinExpr>& rows) {
  double acc = 0.0;
  for (const auto& r : rows) acc += r.constant * r.constant;
  return acc;
}

}  // namespace

void ProgramBuilder::add_nonneg(LinExpr e, std::string label) {
  e.canonicalize();
  if (e.terms.empty()) {
    if (e.constant < -kConstTol * (1.0 + std::abs(e.constant)))
      mark_infeasible(label + ": constant constraint violated");
    return;
  }
  constraints_.push_back(make_block(ConeKind::kNonneg, {e}, std::move(label)));
}

void ProgramBuilder::add_zero(LinExpr e, std::string label) {
  e.canonicalize();
  if (e.terms.empty()) {
    if (std::abs(e.constant) > kConstTol)
      mark_infeasible(label + ": constant equality violated");
    return;
  }
  constraints_.push_back(make_block(ConeKind::kZero, {e}, std::move(label)));
}

void ProgramBuilder::add_soc(LinExpr head, const std::vector<LinExpr>& tail,
                             std::string label) {
  head.canonicalize();
  std::vector<LinExpr> rows;
  rows.reserve(tail.size() + 1);
  rows.push_back(head);
  for (auto r : tail) {
    r.canonicalize();
    rows.push_back(std::move(r));
  }
  if (!has_terms(rows)) {
    double tn = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) tn += rows[i].constant * rows[i].constant;
    if (std::sqrt(tn) - head.constant > kConstTol * (1.0 + std::abs(head.constant)))
      mark_infeasible(label + ": constant cone constraint violated");
    return;
  }
  constraints_.push_back(make_block(ConeKind::kSoc, rows, std::move(label)));
}

void ProgramBuilder::add_norm_le(const std::vector<CLin>& terms,
                                 const LinExpr& bound, std::string label) {
  const std::vector<LinExpr> rows = embed(terms);
  if (!has_terms(rows)) {
    add_nonneg(bound - LinExpr(std::sqrt(constant_sq_norm(rows))), std::move(label));
    return;
  }
  add_soc(bound, compress(rows), std::move(label));
}

void ProgramBuilder::add_squared_norm_le(const std::vector<CLin>& terms,
                                         const LinExpr& bound,
                                         std::string label) {
  const std::vector<LinExpr> rows = embed(terms);
  if (!has_terms(rows)) {
    add_nonneg(bound - LinExpr(constant_sq_norm(rows)), std::move(label));
    return;
  }
  std::vector<LinExpr> tail;
  tail.push_back(bound - LinExpr(1.0));
  for (auto r : compress(rows)) tail.push_back(2.0 * std::move(r));
  add_soc(bound + LinExpr(1.0), tail, std::move(label));
}

void ProgramBuilder::minimize(const LinExpr& objective) {
  objective_ = objective;
}

ConicProgram ProgramBuilder::build() && {
  ConicProgram cp;
  cp.n_vars = n_vars_;
  cp.cost = RVec::Zero(n_vars_);
  for (const auto& [i, c] : objective_.terms) cp.cost(i) += c;
  cp.constraints = std::move(constraints_);
  cp.var_index = std::move(var_index_);
  cp.trivially_infeasible = infeasible_;
  cp.infeasible_reason = std::move(reason_);
  return cp;
}

void write_program(const ConicProgram& cp, std::ostream& os) {
  int m = 0;
  for (const auto& c : cp.constraints) m += c.dim();
  os << std::setprecision(17);
  os << "# d2dsec conic program v1: minimize c'x s.t. h - G x in K\n";
  os << "dims " << cp.n_vars << ' ' << m << ' ' << cp.constraints.size() << '\n';
  for (const auto& [name, slice] : cp.var_index)
    os << "var " << name << ' ' << slice.start << ' ' << slice.size << '\n';
  for (int j = 0; j < cp.n_vars; ++j)
    if (cp.cost(j) != 0.0) os << "c " << j << ' ' << cp.cost(j) << '\n';
  int row = 0;
  for (const auto& c : cp.constraints) {
    const char* kind = c.kind == ConeKind::kZero     ? "zero"
                       : c.kind == ConeKind::kNonneg ? "nonneg"
                                                     : "soc";
    os << "cone " << kind << ' ' << row << ' ' << c.dim() << ' '
       << (c.label.empty() ? "-" : c.label) << '\n';
    for (int r = 0; r < c.dim(); ++r) {
      for (std::size_t s = 0; s < c.support.size(); ++s) {
        const double v = c.coeffs(r, static_cast<Eigen::Index>(s));
        if (v != 0.0) os << "G " << row + r << ' ' << c.support[s] << ' ' << -v << '\n';
      }
      if (c.offset(r) != 0.0) os << "h " << row + r << ' ' << c.offset(r) << '\n';
    }
    row += c.dim();
  }
}

}  // namespace d2dsec::conic
