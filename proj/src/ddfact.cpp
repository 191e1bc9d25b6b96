#include "mesp/ddfact.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "mesp/linalg.hpp"

namespace mesp {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

Factorization factorize(const SymMatrix& c) {
  const EigDecomp eig = eig_sym(c);
  const double lmax = eig.lambda.front();
  if (!(lmax > 0.0)) throw DomainError("factorize: matrix has no positive spectrum");
  int r = 0;
  for (double l : eig.lambda)
    if (l > tol::kRankRel * lmax) ++r;

  Factorization fact;
  fact.k = r;
  fact.r = r;
  fact.f = Matrix(c.order(), r);
  for (int j = 0; j < r; ++j) {
    const double root = std::sqrt(eig.lambda[j]);
    for (int i = 0; i < c.order(); ++i) fact.f(i, j) = eig.Q(i, j) * root;
  }
  return fact;
}

int truncation_index(std::span<const double> lambda, int s) {
  const int k = static_cast<int>(lambda.size());
  if (s <= 0 || s > k) throw InputError("truncation_index: need 0 < s <= k");
  for (int i = 1; i < k; ++i)
    if (lambda[i] > lambda[i - 1] + 1e-12 * std::fabs(lambda[i - 1]))
      throw InputError("truncation_index: spectrum must be nonincreasing");

  std::vector<double> suffix(k + 1, 0.0);
  for (int i = k - 1; i >= 0; --i) suffix[i] = suffix[i + 1] + std::max(lambda[i], 0.0);

  for (int h = 0; h < s; ++h) {
    const double tail = suffix[h];
    if (!(tail > 0.0))
      throw DomainError("truncation_index: spectrum mass exhausted before s", 0.0);
    const double mean = tail / static_cast<double>(s - h);
    const bool upper_ok = h == 0 || lambda[h - 1] > mean;
    const bool lower_ok = mean >= lambda[h];
    if (upper_ok && lower_ok) return h;
  }
  throw NumericalError("truncation_index: no index satisfied the sandwich");
}

SpectrumValue truncated_logdet(std::span<const double> lambda, int s) {
  const int k = static_cast<int>(lambda.size());
  const int head = truncation_index(lambda, s);

  // suffix accumulation, matching the truncation_index scan
  double tail = 0.0;
  for (int i = k - 1; i >= head; --i) tail += std::max(lambda[i], 0.0);
  const double mean = tail / static_cast<double>(s - head);

  SpectrumValue out;
  out.head = head;
  out.value = static_cast<double>(s - head) * std::log(mean);
  for (int i = 0; i < head; ++i) out.value += std::log(lambda[i]);
  out.weights.resize(k);
  const double tail_weight = static_cast<double>(s - head) / tail;
  for (int i = 0; i < k; ++i) out.weights[i] = i < head ? 1.0 / lambda[i] : tail_weight;
  return out;
}

SymMatrix weighted_gram(std::span<const double> x, const ScalingVector& scaling,
                        const Factorization& fact) {
  const int n = fact.f.rows();
  const int k = fact.k;
  Matrix m(k, k);
  for (int i = 0; i < n; ++i) {
    const double w = scaling.value(i) * x[i];
    if (w == 0.0) continue;
    const double* fi = fact.f.row(i).data();
    for (int a = 0; a < k; ++a) {
      const double wa = w * fi[a];
      double* ma = m.row(a).data();
      for (int b = 0; b < k; ++b) ma[b] += wa * fi[b];
    }
  }
  return SymMatrix::from(m);
}

namespace {

// spectrum + gradient-spectrum sandwich shared by the value and gradients
struct GramEval {
  EigDecomp eig;
  SpectrumValue spectrum;
  Matrix p;  // Q Diag(weights) Q^T
};

std::optional<GramEval> evaluate_gram(std::span<const double> x, const ScalingVector& scaling,
                                      const Factorization& fact, int s) {
  GramEval ev;
  ev.eig = eig_sym(weighted_gram(x, scaling, fact));
  const double lmax = ev.eig.lambda.front();
  if (!(lmax > 0.0)) return std::nullopt;
  if (s <= static_cast<int>(ev.eig.lambda.size()) &&
      ev.eig.lambda[s - 1] <= tol::kGammaDomainRel * lmax)
    return std::nullopt;
  if (s > static_cast<int>(ev.eig.lambda.size())) return std::nullopt;
  for (double& l : ev.eig.lambda) l = std::max(l, 0.0);
  ev.spectrum = truncated_logdet(ev.eig.lambda, s);

  const int k = static_cast<int>(ev.eig.lambda.size());
  Matrix scaled = ev.eig.Q;
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) scaled(i, j) *= ev.spectrum.weights[j];
  ev.p = matmul(scaled, transpose(ev.eig.Q));
  return ev;
}

double row_quadratic(const Matrix& p, std::span<const double> row) {
  const int k = p.rows();
  double acc = 0.0;
  for (int a = 0; a < k; ++a) {
    const double* pa = p.row(a).data();
    double inner = 0.0;
    for (int b = 0; b < k; ++b) inner += pa[b] * row[b];
    acc += row[a] * inner;
  }
  return acc;
}

}  // namespace

double ddfact_value(std::span<const double> x, const ScalingVector& scaling,
                    const Factorization& fact, int s) {
  const auto ev = evaluate_gram(x, scaling, fact, s);
  if (!ev) return kNegInf;
  return ev->spectrum.value - dot(x, scaling.logs());
}

std::vector<double> ddfact_grad_x(std::span<const double> x, const ScalingVector& scaling,
                                  const Factorization& fact, int s) {
  const auto ev = evaluate_gram(x, scaling, fact, s);
  if (!ev) throw DomainError("ddfact_grad_x: weighted Gram matrix has rank below s");
  const int n = fact.f.rows();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = scaling.value(i) * row_quadratic(ev->p, fact.f.row(i)) - scaling.log(i);
  return g;
}

std::vector<double> ddfact_grad_log_scaling(std::span<const double> x,
                                            const ScalingVector& scaling,
                                            const Factorization& fact, int s) {
  if (inf_norm(x) == 0.0) return std::vector<double>(x.size(), 0.0);  // formal limit
  const auto ev = evaluate_gram(x, scaling, fact, s);
  if (!ev) throw DomainError("ddfact_grad_log_scaling: weighted Gram matrix has rank below s");
  const int n = fact.f.rows();
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = x[i] * (scaling.value(i) * row_quadratic(ev->p, fact.f.row(i)) - 1.0);
  return g;
}

namespace {

class DdfactModel {
 public:
  DdfactModel(const Factorization& fact, const ScalingVector& scaling, int s)
      : fact_(fact), scaling_(scaling), s_(s) {}

  relax::Objective objective() const {
    relax::Objective obj;
    obj.f = [this](std::span<const double> x) { return ddfact_value(x, scaling_, fact_, s_); };
    obj.grad = [this](std::span<const double> x) {
      return ddfact_grad_x(x, scaling_, fact_, s_);
    };
    obj.line = [this](std::span<const double> x, std::span<const double> d) {
      // M(x + t d) = M(x) + t dM; the penalty term stays linear in t
      SymMatrix m0 = weighted_gram(x, scaling_, fact_);
      SymMatrix dm = weighted_gram(d, scaling_, fact_);
      const double base = -dot(x, scaling_.logs());
      const double slope = -dot(d, scaling_.logs());
      const int s = s_;
      const int k = m0.order();
      return [k, s, m0 = std::move(m0), dm = std::move(dm), base, slope](double t) {
        SymMatrix mt(k);
        for (int i = 0; i < k; ++i)
          for (int j = 0; j <= i; ++j) mt.set(i, j, m0(i, j) + t * dm(i, j));
        EigDecomp eig = eig_sym(mt);
        const double lmax = eig.lambda.front();
        if (!(lmax > 0.0) || s > k || eig.lambda[s - 1] <= tol::kGammaDomainRel * lmax)
          return kNegInf;
        for (double& l : eig.lambda) l = std::max(l, 0.0);
        return truncated_logdet(eig.lambda, s).value + base + t * slope;
      };
    };
    return obj;
  }

 private:
  const Factorization& fact_;
  const ScalingVector& scaling_;
  int s_;
};

}  // namespace

BoundReport solve_ddfact(const Instance& inst, const ScalingVector& scaling,
                         const SolveOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  const Factorization fact = factorize(inst.C());
  const relax::Polytope poly(inst.n(), inst.s(), inst.constraints(), options.lo, options.hi);
  const DdfactModel model(fact, scaling, inst.s());

  relax::MaximizeOptions mopts;
  mopts.tol = options.tol;
  mopts.max_iter = options.max_iter;
  mopts.warm = options.warm;
  relax::SolveReport rep = relax::maximize(poly, model.objective(), mopts);

  BoundReport out;
  out.method = "ddfact";
  out.value = rep.value;
  out.gap = rep.gap;
  out.bound = rep.value + rep.gap;
  out.x = std::move(rep.x);
  out.scaling = scaling;
  out.iterations = rep.iterations;
  out.converged = rep.converged;
  out.active = std::move(rep.active);
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

BoundReport solve_ddfact_complement(const Instance& inst, const ScalingVector& scaling,
                                    const SolveOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  auto [comp, offset] = complement(inst);

  // pins transform through x -> e - x
  SolveOptions inner = options;
  if (!options.lo.empty() || !options.hi.empty()) {
    const int n = inst.n();
    std::vector<double> lo(n, 0.0), hi(n, 1.0);
    if (!options.lo.empty()) lo = options.lo;
    if (!options.hi.empty()) hi = options.hi;
    inner.lo.resize(n);
    inner.hi.resize(n);
    for (int i = 0; i < n; ++i) {
      inner.lo[i] = 1.0 - hi[i];
      inner.hi[i] = 1.0 - lo[i];
    }
  }

  BoundReport out = solve_ddfact(comp, scaling, inner);
  out.method = "ddfact-comp";
  out.offset = offset;
  out.bound = out.value + out.gap + offset;
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace mesp
