#include "mesp/instance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mesp/constants.hpp"
#include "mesp/rng.hpp"

namespace mesp {

ScalingVector ScalingVector::ones(int n) { return uniform(n, 1.0); }

ScalingVector ScalingVector::uniform(int n, double gamma) {
  return from_values(std::vector<double>(n, gamma));
}

ScalingVector ScalingVector::from_values(std::vector<double> values) {
  ScalingVector s;
  s.logs_.resize(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw InputError("scaling vector entries must be strictly positive");
    s.logs_[i] = std::log(values[i]);
  }
  s.values_ = std::move(values);
  return s;
}

ScalingVector ScalingVector::from_logs(std::vector<double> logs) {
  ScalingVector s;
  s.values_.resize(logs.size());
  for (size_t i = 0; i < logs.size(); ++i) {
    if (!std::isfinite(logs[i])) throw InputError("scaling vector logs must be finite");
    s.values_[i] = std::exp(logs[i]);
    if (!(s.values_[i] > 0.0) || !std::isfinite(s.values_[i]))
      throw InputError("scaling vector log coordinate out of range");
  }
  s.logs_ = std::move(logs);
  return s;
}

Instance::Instance(SymMatrix c, int s, std::optional<Constraints> cons)
    : c_(std::move(c)), s_(s), cons_(std::move(cons)) {
  const int n = c_.order();
  if (n < 2) throw InputError("instance needs order at least 2");
  if (s_ <= 0 || s_ >= n) throw InputError("cardinality s must satisfy 0 < s < n");
  if (cons_) {
    if (cons_->a.rows() != static_cast<int>(cons_->b.size()))
      throw InputError("constraint rows and right-hand sides disagree");
    if (cons_->a.cols() != n) throw InputError("constraint width differs from matrix order");
  }

  EigDecomp eig = eig_sym(c_);
  lambda_max_ = std::max(eig.lambda.front(), 0.0);
  lambda_min_ = eig.lambda.back();
  if (lambda_min_ < -tol::kPsdClipRel * lambda_max_)
    throw DomainError("covariance is not positive semidefinite", lambda_min_);

  bool clipped = false;
  for (double& l : eig.lambda) {
    if (l < 0.0) {
      l = 0.0;
      clipped = true;
    }
  }
  if (clipped) {
    warnings_.push_back("negative eigenvalues within the repair window clipped to zero");
    // rebuild C = Q Lambda Q^T on the clipped spectrum
    Matrix scaled = eig.Q;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) scaled(i, j) *= eig.lambda[j];
    c_ = SymMatrix::from(matmul(scaled, transpose(eig.Q)));
    lambda_min_ = 0.0;
  }

  rank_ = 0;
  for (double l : eig.lambda)
    if (l > tol::kRankRel * lambda_max_) ++rank_;
  if (rank_ < s_) throw InputError("rank(C) is below the requested cardinality");
}

bool Instance::feasible_set(std::span<const int> set) const {
  if (!cons_) return true;
  for (int r = 0; r < cons_->count(); ++r) {
    double lhs = 0.0;
    for (int j : set) lhs += cons_->a(r, j);
    if (lhs > cons_->b[r] + tol::kFeas) return false;
  }
  return true;
}

namespace {

struct Token {
  std::string text;
  int line, column;
};

// whitespace tokens with positions; '#' starts a comment through end of line
std::vector<Token> tokenize(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path);
  std::vector<Token> tokens;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t i = 0;
    while (i < line.size()) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      if (line[i] == '#') break;
      const size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) &&
             line[i] != '#')
        ++i;
      tokens.push_back({line.substr(start, i - start), lineno, static_cast<int>(start) + 1});
    }
  }
  return tokens;
}

[[noreturn]] void parse_fail(const std::string& path, const Token& t, const std::string& why) {
  std::ostringstream os;
  os << path << ":" << t.line << ":" << t.column << ": " << why << " (got '" << t.text << "')";
  throw InputError(os.str());
}

double parse_real(const std::string& path, const Token& t) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t.text, &used);
  } catch (const std::exception&) {
    parse_fail(path, t, "expected a number");
  }
  if (used != t.text.size()) parse_fail(path, t, "trailing characters after number");
  if (!std::isfinite(v)) parse_fail(path, t, "non-finite number");
  return v;
}

long parse_count(const std::string& path, const Token& t) {
  size_t used = 0;
  long v = 0;
  try {
    v = std::stol(t.text, &used);
  } catch (const std::exception&) {
    parse_fail(path, t, "expected an integer");
  }
  if (used != t.text.size()) parse_fail(path, t, "trailing characters after integer");
  return v;
}

}  // namespace

SymMatrix load_matrix(const std::string& path) {
  const std::vector<Token> tokens = tokenize(path);
  if (tokens.empty()) throw InputError(path + ": empty matrix file");
  const long n = parse_count(path, tokens[0]);
  if (n < 1) parse_fail(path, tokens[0], "matrix order must be positive");

  const long long full = static_cast<long long>(n) * n;
  const long long tri = static_cast<long long>(n) * (n + 1) / 2;
  const long long have = static_cast<long long>(tokens.size()) - 1;

  Matrix m(static_cast<int>(n), static_cast<int>(n));
  if (have == full) {
    size_t t = 1;
    for (long i = 0; i < n; ++i)
      for (long j = 0; j < n; ++j) m(static_cast<int>(i), static_cast<int>(j)) = parse_real(path, tokens[t++]);
  } else if (have == tri) {
    size_t t = 1;
    for (long i = 0; i < n; ++i)
      for (long j = 0; j <= i; ++j) {
        const double v = parse_real(path, tokens[t++]);
        m(static_cast<int>(i), static_cast<int>(j)) = v;
        m(static_cast<int>(j), static_cast<int>(i)) = v;
      }
  } else {
    std::ostringstream os;
    os << path << ": expected " << full << " (full) or " << tri << " (lower-triangle) values after n="
       << n << ", found " << have;
    throw InputError(os.str());
  }
  return SymMatrix::from(m);
}

Constraints load_constraints(const std::string& path) {
  const std::vector<Token> tokens = tokenize(path);
  if (tokens.size() < 2) throw InputError(path + ": constraints file needs leading m and n");
  const long m = parse_count(path, tokens[0]);
  const long n = parse_count(path, tokens[1]);
  if (m < 0 || n < 1) throw InputError(path + ": bad constraints header");
  const long long need = static_cast<long long>(m) * (n + 1);
  if (static_cast<long long>(tokens.size()) - 2 != need) {
    std::ostringstream os;
    os << path << ": expected " << need << " values after the m n header, found "
       << tokens.size() - 2;
    throw InputError(os.str());
  }
  Constraints cons{Matrix(static_cast<int>(m), static_cast<int>(n)),
                   std::vector<double>(static_cast<size_t>(m))};
  size_t t = 2;
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j < n; ++j)
      cons.a(static_cast<int>(i), static_cast<int>(j)) = parse_real(path, tokens[t++]);
    cons.b[static_cast<size_t>(i)] = parse_real(path, tokens[t++]);
  }
  return cons;
}

Instance load_instance(const std::string& matrix_path, int s, const std::string& constraints_path) {
  SymMatrix c = load_matrix(matrix_path);
  std::optional<Constraints> cons;
  if (!constraints_path.empty()) cons = load_constraints(constraints_path);
  return Instance(std::move(c), s, std::move(cons));
}

void save_matrix(const std::string& path, const SymMatrix& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write file: " + path);
  out << m.order() << "\n";
  char buf[40];
  for (int i = 0; i < m.order(); ++i) {
    for (int j = 0; j < m.order(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf << (j + 1 == m.order() ? "" : " ");
    }
    out << "\n";
  }
  if (!out) throw InputError("write failed: " + path);
}

std::pair<Instance, double> complement(const Instance& inst) {
  if (inst.lambda_min() <= tol::kInvertibleRel * inst.lambda_max())
    throw DomainError("complement: covariance is numerically singular", inst.lambda_min());

  const int n = inst.n();
  const SymMatrix cinv = SymMatrix::from(solve_pd(inst.C(), Matrix::identity(n)));
  const double offset = ldet_pd(inst.C());

  std::optional<Constraints> cons;
  if (inst.constraints()) {
    const Constraints& orig = *inst.constraints();
    Constraints c{orig.a, orig.b};
    for (int i = 0; i < c.a.rows(); ++i) {
      double row_sum = 0.0;
      for (int j = 0; j < n; ++j) {
        row_sum += orig.a(i, j);
        c.a(i, j) = -orig.a(i, j);
      }
      c.b[i] = orig.b[i] - row_sum;
    }
    cons = std::move(c);
  }
  return {Instance(cinv, n - inst.s(), std::move(cons)), offset};
}

Instance generate_side_constraints(const Instance& inst, int m, uint64_t seed,
                                   std::span<const int> best_known) {
  if (m <= 0) throw InputError("number of generated constraints must be positive");
  if (static_cast<int>(best_known.size()) != inst.s())
    throw InputError("best-known solution must have cardinality s");

  const int n = inst.n();
  std::vector<char> in_best(n, 0);
  for (int j : best_known) {
    if (j < 0 || j >= n) throw InputError("best-known index out of range");
    in_best[j] = 1;
  }

  Rng rng(seed);
  Matrix rows(m, n);
  std::vector<double> rhs(m);
  std::vector<int> coeffs(n);
  for (int r = 0; r < m; ++r) {
    bool accepted = false;
    for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
      long best_value = 0;
      for (int j = 0; j < n; ++j) {
        coeffs[j] = rng.uniform_int(-2, 2);
        if (in_best[j]) best_value += coeffs[j];
      }
      const long b = best_value - 1;  // largest integer cut off by the best-known point

      // the row must leave some cardinality-s point feasible: the minimum of
      // a^T x over such points is the sum of the s smallest coefficients
      std::vector<int> sorted(coeffs);
      std::sort(sorted.begin(), sorted.end());
      long min_value = 0;
      for (int j = 0; j < inst.s(); ++j) min_value += sorted[j];
      if (min_value > b) continue;  // vacuous draw, e.g. the all-zero row

      for (int j = 0; j < n; ++j) rows(r, j) = static_cast<double>(coeffs[j]);
      rhs[r] = static_cast<double>(b);
      accepted = true;
    }
    if (!accepted)
      throw InputError("side-constraint generation exhausted retries on a vacuous row");
  }

  Constraints merged{Matrix(0, 0), {}};
  if (inst.constraints()) {
    const Constraints& old = *inst.constraints();
    merged.a = Matrix(old.a.rows() + m, n);
    for (int i = 0; i < old.a.rows(); ++i)
      for (int j = 0; j < n; ++j) merged.a(i, j) = old.a(i, j);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) merged.a(old.a.rows() + i, j) = rows(i, j);
    merged.b = old.b;
    merged.b.insert(merged.b.end(), rhs.begin(), rhs.end());
  } else {
    merged.a = std::move(rows);
    merged.b = std::move(rhs);
  }
  return Instance(inst.C(), inst.s(), std::move(merged));
}

}  // namespace mesp
