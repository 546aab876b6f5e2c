#include "tracial/theta2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>

#include "tracial/error.hpp"

namespace tracial {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::member:
      return "member";
    case Verdict::not_member:
      return "not_member";
    case Verdict::unknown:
      return "unknown";
  }
  return "unknown";
}

Vector GramConstraints::evaluate(const Matrix& gram) const {
  Vector out(classes.size(), 0.0);
  const std::size_t eta = dim();
  for (std::size_t i = 0; i < eta; ++i)
    for (std::size_t j = 0; j < eta; ++j) out[class_of[i * eta + j]] += gram(i, j);
  return out;
}

double GramConstraints::residual(const Matrix& gram) const {
  const Vector lhs = evaluate(gram);
  double r = 0.0;
  for (std::size_t c = 0; c < lhs.size(); ++c) r = std::max(r, std::abs(lhs[c] - rhs[c]));
  return r;
}

std::size_t GramConstraints::class_index(const Word& key) const {
  auto it = std::lower_bound(classes.begin(), classes.end(), key);
  if (it == classes.end() || *it != key) return classes.size();
  return static_cast<std::size_t>(it - classes.begin());
}

GramConstraints gram_constraints(const Polynomial& f, std::size_t k) {
  if (f.degree() > 2 * k)
    throw PreconditionError("polynomial degree " + std::to_string(f.degree()) + " exceeds 2k = " +
                            std::to_string(2 * k));
  GramConstraints g;
  g.variables = f.variables();
  g.k = k;
  g.basis = enumerate_words(g.variables, k);
  std::set<Word> keys;
  for (const Word& w : enumerate_words(g.variables, 2 * k)) keys.insert(canon_cyclic(w));
  g.classes.assign(keys.begin(), keys.end());

  const std::size_t eta = g.dim();
  g.class_of.resize(eta * eta);
  for (std::size_t i = 0; i < eta; ++i) {
    const Word ustar = reverse(g.basis[i]);
    for (std::size_t j = 0; j < eta; ++j) g.class_of[i * eta + j] = g.class_index(canon_cyclic(ustar * g.basis[j]));
  }
  g.rhs.assign(g.classes.size(), 0.0);
  for (const auto& [w, s] : cyclic_reduce(f, 0.0)) g.rhs[g.class_index(w)] = s;
  return g;
}

namespace {

// Orthogonal projection onto {G symmetric : class sums = rhs}. On symmetric
// matrices the equations for c and its reverse class c* coincide, so they are
// merged into one equation over the union of their index pairs.
class AffineProjector {
 public:
  explicit AffineProjector(const GramConstraints& g) : g_(g) {
    const std::size_t m = g.classes.size();
    std::vector<std::size_t> partner(m);
    for (std::size_t c = 0; c < m; ++c) partner[c] = g.class_index(canon_cyclic(reverse(g.classes[c])));
    group_of_class_.assign(m, 0);
    std::vector<bool> assigned(m, false);
    for (std::size_t c = 0; c < m; ++c) {
      if (assigned[c]) continue;
      const std::size_t grp = targets_.size();
      assigned[c] = true;
      group_of_class_[c] = grp;
      double target = g.rhs[c];
      if (partner[c] != c) {
        assigned[partner[c]] = true;
        group_of_class_[partner[c]] = grp;
        target += g.rhs[partner[c]];
      }
      targets_.push_back(target);
    }
    counts_.assign(targets_.size(), 0.0);
    for (std::size_t c : g.class_of) counts_[group_of_class_[c]] += 1.0;
  }

  std::size_t groups() const { return targets_.size(); }
  const Vector& targets() const { return targets_; }
  std::size_t group(std::size_t i, std::size_t j) const { return group_of_class_[g_.class_of[i * g_.dim() + j]]; }

  Matrix project(const Matrix& x) const {
    const std::size_t eta = g_.dim();
    Vector sums(targets_.size(), 0.0);
    for (std::size_t i = 0; i < eta; ++i)
      for (std::size_t j = 0; j < eta; ++j) sums[group(i, j)] += x(i, j);
    Vector shift(targets_.size());
    for (std::size_t m = 0; m < targets_.size(); ++m) shift[m] = (targets_[m] - sums[m]) / counts_[m];
    Matrix out = x;
    for (std::size_t i = 0; i < eta; ++i)
      for (std::size_t j = 0; j < eta; ++j) out(i, j) += shift[group(i, j)];
    return out;
  }

 private:
  const GramConstraints& g_;
  std::vector<std::size_t> group_of_class_;
  Vector targets_;
  Vector counts_;
};

// Gauss-Newton on a factor G = L L^T, which keeps G PSD by construction.
std::optional<Matrix> gauss_newton_factor(const AffineProjector& affine, const GramConstraints& g, Matrix l,
                                          double target) {
  const std::size_t eta = l.rows();
  const std::size_t r = l.cols();
  const std::size_t groups = affine.groups();
  auto residuals = [&](const Matrix& gram) {
    Vector res = affine.targets();
    for (std::size_t i = 0; i < eta; ++i)
      for (std::size_t j = 0; j < eta; ++j) res[affine.group(i, j)] -= gram(i, j);
    return res;
  };

  Matrix gram = l * l.transpose();
  Vector res = residuals(gram);
  std::vector<double> history;
  for (int iter = 0; iter < 300; ++iter) {
    if (g.residual(gram) <= target) return gram;
    // At a singular solution the rate is only linear; give up once ten steps
    // fail to halve the residual.
    history.push_back(norm2(res));
    if (history.size() > 10 && history.back() > 0.5 * history[history.size() - 11]) break;
    Matrix jac(groups, eta * r);
    for (std::size_t p = 0; p < eta; ++p)
      for (std::size_t j = 0; j < eta; ++j) {
        const std::size_t m = affine.group(p, j);
        for (std::size_t a = 0; a < r; ++a) jac(m, p * r + a) += 2.0 * l(j, a);
      }
    const Vector step = min_norm_solve(jac, res, 1e-13);
    const double base = norm2(res);
    bool accepted = false;
    for (double t = 1.0; t > 1e-4; t /= 2) {
      Matrix trial = l;
      for (std::size_t p = 0; p < eta; ++p)
        for (std::size_t a = 0; a < r; ++a) trial(p, a) += t * step[p * r + a];
      Matrix trial_gram = trial * trial.transpose();
      Vector trial_res = residuals(trial_gram);
      if (norm2(trial_res) < base) {
        l = std::move(trial);
        gram = std::move(trial_gram);
        res = std::move(trial_res);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  if (g.residual(gram) <= target) return gram;
  return std::nullopt;
}

// Factor of the positive part of x restricted to the top r eigenpairs.
Matrix top_factor(const EigDecomp& eig, std::size_t r) {
  const std::size_t eta = eig.values.size();
  Matrix l(eta, r);
  for (std::size_t a = 0; a < r; ++a) {
    const std::size_t c = eta - 1 - a;
    const double s = std::sqrt(std::max(0.0, eig.values[c]));
    for (std::size_t i = 0; i < eta; ++i) l(i, a) = s * eig.vectors(i, c);
  }
  return l;
}

// Ranks worth trying for a factor: eigenvalue counts above a few relative
// cuts, then every smaller rank.
std::vector<std::size_t> candidate_ranks(const Vector& values, double lmax) {
  std::vector<std::size_t> ranks;
  for (double cut : {1e-1, 1e-3, 1e-8}) {
    const auto r =
        static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [&](double v) { return v > cut * lmax; }));
    if (r >= 1 && std::find(ranks.begin(), ranks.end(), r) == ranks.end()) ranks.push_back(r);
  }
  const std::size_t positive = ranks.empty() ? 0 : ranks.back();
  for (std::size_t r = 1; r < positive; ++r)
    if (std::find(ranks.begin(), ranks.end(), r) == ranks.end()) ranks.push_back(r);
  return ranks;
}

// Polishing of the unclipped Dykstra iterate x. Projection methods approach
// points on the boundary of the cone slowly (sums of few squares often have no
// positive definite Gram matrix), while Gauss-Newton on a factor converges
// quickly when the factor has the rank of the limit, so several ranks are
// tried.
std::optional<Matrix> polish(const AffineProjector& affine, const GramConstraints& g, const Matrix& x,
                             double target) {
  const EigDecomp eig = sym_eig(SymMatrix(x));
  const double lmax = eig.values.back();
  if (!(lmax > 0.0)) return std::nullopt;
  for (std::size_t r : candidate_ranks(eig.values, lmax))
    if (auto gram = gauss_newton_factor(affine, g, top_factor(eig, r), target)) return gram;
  return std::nullopt;
}

}  // namespace

namespace {

// Squares from eigenpairs with lambda > drop; the largest cyclic class
// residual of sum g_i* g_i - target is stored in `worst`.
std::vector<Polynomial> squares_above(const GramCertificate& cert, const EigDecomp& eig, double drop,
                                      double& worst) {
  const std::size_t n = cert.target.variables();
  std::vector<Polynomial> squares;
  Polynomial sum(n);
  for (std::size_t c = eig.values.size(); c-- > 0;) {
    const double l = eig.values[c];
    if (l <= drop) continue;
    Vector coeffs = eig.vectors.column(c);
    for (double& v : coeffs) v *= std::sqrt(l);
    Polynomial g = from_coefficients(n, cert.basis, coeffs);
    sum += involution(g) * g;
    squares.push_back(std::move(g));
  }
  worst = 0.0;
  for (const auto& [w, s] : cyclic_reduce(sum - cert.target, 0.0)) worst = std::max(worst, std::abs(s));
  return squares;
}

}  // namespace

std::vector<Polynomial> extract_sohs(const GramCertificate& cert, double tol) {
  const EigDecomp eig = sym_eig(SymMatrix(cert.gram));
  const double lmax = eig.values.empty() ? 0.0 : std::max(1.0, eig.values.back());
  double worst = 0.0;
  std::vector<Polynomial> squares = squares_above(cert, eig, tol * lmax, worst);
  if (worst <= tol) return squares;
  // Many eigenvalues just below the cut can add up; keep them.
  squares = squares_above(cert, eig, tol * tol * lmax, worst);
  if (worst <= tol) return squares;
  throw NumericalError("extracted squares miss the target by " + std::to_string(worst) + " in some cyclic class");
}

namespace {

// Index structure shared by the witness search: tracial classes of degree
// <= 2k and, for each entry of M_k, the class it reads.
struct MomentLayout {
  std::size_t n = 0;
  std::size_t k = 0;
  std::vector<Word> classes;
  std::vector<std::size_t> class_of;  // eta * eta
  Vector counts;
  std::size_t eta = 0;

  MomentLayout(std::size_t n_, std::size_t k_) : n(n_), k(k_) {
    classes = TracialSequence::canonical_words(n, 2 * k);
    const std::vector<Word> basis = enumerate_words(n, k);
    eta = basis.size();
    class_of.resize(eta * eta);
    counts.assign(classes.size(), 0.0);
    for (std::size_t i = 0; i < eta; ++i) {
      const Word ustar = reverse(basis[i]);
      for (std::size_t j = 0; j < eta; ++j) {
        const std::size_t c = index(canon_tracial(ustar * basis[j]));
        class_of[i * eta + j] = c;
        counts[c] += 1.0;
      }
    }
  }

  std::size_t index(const Word& key) const {
    return static_cast<std::size_t>(std::lower_bound(classes.begin(), classes.end(), key) - classes.begin());
  }

  SymMatrix matrix(const Vector& y) const {
    Matrix m(eta, eta);
    for (std::size_t i = 0; i < eta; ++i)
      for (std::size_t j = 0; j < eta; ++j) m(i, j) = y[class_of[i * eta + j]];
    return SymMatrix(std::move(m));
  }

  // Orthogonal projection (Frobenius) onto moment-structured matrices.
  Vector average(const Matrix& m) const {
    Vector y(classes.size(), 0.0);
    for (std::size_t i = 0; i < eta; ++i)
      for (std::size_t j = 0; j < eta; ++j) y[class_of[i * eta + j]] += m(i, j);
    for (std::size_t c = 0; c < y.size(); ++c) y[c] /= counts[c];
    return y;
  }

  Vector from_sequence(const TracialSequence& s) const {
    Vector y(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) y[c] = s(classes[c]);
    return y;
  }

  TracialSequence to_sequence(const Vector& y) const {
    std::map<Word, double> values;
    for (std::size_t c = 0; c < classes.size(); ++c) values.emplace(classes[c], y[c]);
    values[Word{}] = 1.0;
    return TracialSequence(n, 2 * k, std::move(values));
  }
};

double min_eigenvalue(const SymMatrix& m) { return sym_eig(m).values.front(); }

}  // namespace

bool is_valid_witness(const DualWitness& w, const Polynomial& f, std::size_t k, double tol) {
  if (w.y.order() < 2 * k) return false;
  const PsdReport psd = psd_check(build_moment_matrix(w.y, k).entries, tol);
  return psd.is_psd && riesz_eval(w.y, f) < -tol;
}

namespace {

class WitnessSearch {
 public:
  WitnessSearch(const Polynomial& f, std::size_t k, const SolverOptions& opts)
      : f_(f), k_(k), opts_(opts), layout_(f.variables(), k), radius_(10.0 * std::max(1.0, f.l1_norm())) {
    grad_.assign(layout_.classes.size(), 0.0);
    for (const auto& [w, s] : tracial_reduce(f)) grad_[layout_.index(w)] = s;
    interior_ = layout_.from_sequence(semicircular_sequence(f.variables(), 2 * k));
    interior_min_ = min_eigenvalue(layout_.matrix(interior_));
    best_ = interior_;
    best_value_ = riesz(interior_);
  }

  // L_y(f) for a class vector, including the constant term.
  double riesz(const Vector& y) const { return dot(grad_, y); }

  // Mixes with the semicircular point just enough to make M_k(y) PSD; both
  // ends have y_1 = 1, so the mixture does too.
  Vector restore(const Vector& y) const {
    const double lmin = min_eigenvalue(layout_.matrix(y));
    if (lmin >= 0.0) return y;
    const double theta = std::min(1.0, (-lmin) / (interior_min_ - lmin) * (1.0 + 1e-9) + 1e-15);
    Vector out(y.size());
    for (std::size_t c = 0; c < y.size(); ++c) out[c] = (1.0 - theta) * y[c] + theta * interior_[c];
    return out;
  }

  // Records a feasible candidate; returns true if it improves on the best.
  bool offer(const Vector& y) {
    const Vector r = restore(y);
    const double value = riesz(r);
    if (value < best_value_ - 1e-12 * std::max(1.0, std::abs(best_value_))) {
      best_value_ = value;
      best_ = r;
      return true;
    }
    return false;
  }

  // Any PSD moment-structured matrix, up to scale, gives a candidate after
  // normalising y_1 = 1. When y_1 is tiny the interior point is blended in
  // first to keep the normalisation bounded.
  bool offer_unnormalised(Vector v) {
    const double scale = max_abs(v);
    if (!(scale > 0.0) || !std::isfinite(scale)) return false;
    const double floor = 1e-6 * scale;
    if (v[0] < floor) {
      const double delta = floor - v[0];
      for (std::size_t c = 0; c < v.size(); ++c) v[c] += delta * interior_[c];
    }
    const double y1 = v[0];
    for (double& x : v) x /= y1;
    for (double& x : v) x = std::clamp(x, -radius_, radius_);
    v[0] = 1.0;
    return offer(v);
  }

  // Alternating projections between the Gram affine space A and the PSD cone
  // K. When they are disjoint, the gap a - P_K(a) at a = P_A(x) tends to a
  // negative semidefinite matrix that is constant on tracial classes, and
  // its negation y satisfies L_y(f) = -||a - P_K(a)||^2 < 0.
  std::size_t farkas_stage() {
    const GramConstraints g = gram_constraints(f_, k_);
    const AffineProjector affine(g);
    const double target = 0.1 * opts_.tol;
    const std::size_t eta = g.dim();
    Matrix x(eta, eta);
    std::size_t last_improvement = 0;
    std::size_t it = 0;
    for (; it < opts_.max_iter; ++it) {
      const Matrix a = affine.project(x);
      x = psd_project(SymMatrix(a)).matrix();
      if (g.residual(x) <= target) break;  // feasible: no separating functional
      if (it % 20 == 19) {
        Vector v = layout_.average(x - a);
        if (offer_unnormalised(std::move(v))) last_improvement = it;
        if (it - last_improvement > 2000) break;
      }
    }
    return it;
  }

  // Projection onto {y_1 = 1, |y_c| <= R, M_k(y) PSD} in the Frobenius metric
  // of M_k, by Dykstra's algorithm between the structured box and the cone.
  Vector project_feasible(const Vector& z, std::size_t inner) const {
    Matrix x = layout_.matrix(z).matrix();
    const std::size_t eta = layout_.eta;
    Matrix p(eta, eta);
    Matrix q(eta, eta);
    Vector ys = z;
    for (std::size_t it = 0; it < inner; ++it) {
      const Matrix t = x + p;
      ys = layout_.average(t);
      for (double& v : ys) v = std::clamp(v, -radius_, radius_);
      ys[0] = 1.0;
      const Matrix s = layout_.matrix(ys).matrix();
      p = t - s;
      const Matrix u = s + q;
      x = psd_project(SymMatrix(u)).matrix();
      q = u - x;
      if ((x - s).max_abs() <= 1e-12 * std::max(1.0, s.max_abs())) break;
    }
    return ys;
  }

  // Projected gradient on L_y(f), gradient taken in the metric of M_k.
  std::size_t gradient_stage() {
    const std::size_t m = grad_.size();
    Vector step_dir(m, 0.0);
    double max_dir = 0.0;
    for (std::size_t c = 1; c < m; ++c) {
      step_dir[c] = grad_[c] / layout_.counts[c];
      max_dir = std::max(max_dir, std::abs(step_dir[c]));
    }
    if (max_dir == 0.0) return 0;
    const double alpha = 0.25 / max_dir;

    std::mt19937_64 rng(opts_.seed);
    std::normal_distribution<double> gauss(0.0, 1e-3);
    Vector y = best_;
    for (std::size_t c = 1; c < m; ++c) y[c] += gauss(rng);
    y = project_feasible(y, kInner);

    const std::size_t budget = std::min<std::size_t>(opts_.max_iter, kMaxGradientSteps);
    std::size_t last_improvement = 0;
    std::size_t it = 0;
    for (; it < budget; ++it) {
      for (std::size_t c = 1; c < m; ++c) y[c] -= alpha * step_dir[c];
      y = project_feasible(y, kInner);
      if (offer(y)) last_improvement = it;
      if (it - last_improvement > kStagnation) break;
    }
    return it;
  }

  std::optional<DualWitness> result() const {
    DualWitness w{layout_.to_sequence(best_), 0.0, 0.0};
    w.min_eigenvalue = min_eigenvalue(build_moment_matrix(w.y, k_).entries);
    w.riesz_value = riesz_eval(w.y, f_);
    if (!is_valid_witness(w, f_, k_, opts_.tol)) return std::nullopt;
    return w;
  }

 private:
  static constexpr std::size_t kInner = 60;
  static constexpr std::size_t kMaxGradientSteps = 400;
  static constexpr std::size_t kStagnation = 40;

  const Polynomial& f_;
  std::size_t k_;
  SolverOptions opts_;
  MomentLayout layout_;
  double radius_;
  Vector grad_;
  Vector interior_;
  double interior_min_ = 0.0;
  Vector best_;
  double best_value_ = 0.0;
};

}  // namespace

std::optional<DualWitness> dual_witness_search(const Polynomial& f, std::size_t k, const SolverOptions& opts,
                                               std::size_t* iterations) {
  if (f.degree() > 2 * k)
    throw PreconditionError("polynomial degree " + std::to_string(f.degree()) + " exceeds 2k = " +
                            std::to_string(2 * k));
  WitnessSearch search(f, k, opts);
  std::size_t it = search.farkas_stage();
  it += search.gradient_stage();
  if (iterations) *iterations = it;
  return search.result();
}

namespace {
// Polishing is expensive when it fails, so it runs at iterations 50, 100,
// 200, ... and once more at the end of the budget.
bool polish_due(std::size_t it, std::size_t max_iter) {
  const std::size_t n = it + 1;
  if (n == max_iter) return true;
  if (n % 50 != 0) return false;
  const std::size_t m = n / 50;
  return (m & (m - 1)) == 0;
}
}  // namespace

Theta2Result theta2_feasibility(const Polynomial& f, std::size_t k, const SolverOptions& opts) {
  const GramConstraints g = gram_constraints(f, k);
  const AffineProjector affine(g);
  const std::size_t eta = g.dim();
  // Converge below the reporting tolerance so the extracted squares keep a margin.
  const double target = 0.1 * opts.tol;

  Theta2Result result;
  Matrix x(eta, eta);
  Matrix p(eta, eta);
  Matrix q(eta, eta);
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    const Matrix ya = affine.project(x + p);
    p = x + p - ya;
    const Matrix shifted = ya + q;
    x = psd_project(SymMatrix(shifted)).matrix();
    q = shifted - x;
    result.projection_iterations = it + 1;
    result.affine_residual = g.residual(x);
    if (result.affine_residual > target && polish_due(it, opts.max_iter)) {
      if (auto polished = polish(affine, g, shifted, target)) {
        x = std::move(*polished);
        result.affine_residual = g.residual(x);
      }
    }
    if (result.affine_residual <= target) {
      GramCertificate cert{f, g.basis, x, result.affine_residual, min_eigenvalue(SymMatrix(x))};
      extract_sohs(cert, opts.tol);  // throws if the certificate is unusable
      result.verdict = Verdict::member;
      result.certificate = std::move(cert);
      return result;
    }
  }

  std::size_t witness_iterations = 0;
  auto witness = dual_witness_search(f, k, opts, &witness_iterations);
  result.witness_iterations = witness_iterations;
  if (witness) {
    result.verdict = Verdict::not_member;
    result.witness = std::move(witness);
  }
  return result;
}

}  // namespace tracial
