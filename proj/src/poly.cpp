#include "terracini/poly.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <cmath>
#include <sstream>

#include "terracini/errors.hpp"
#include "terracini/kernels.hpp"

namespace terracini {

mpq_class exact(double v) {
  require(std::isfinite(v), "non-finite value in exact conversion");
  return mpq_class(v);
}

long double factorial(int n) {
  long double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

SparsePoly::SparsePoly(int num_vars) : num_vars_(num_vars) {
  require(num_vars >= 0, "negative variable count");
}

SparsePoly::SparsePoly(int num_vars, TermMap terms)
    : num_vars_(num_vars), terms_(std::move(terms)) {
  require(num_vars >= 0, "negative variable count");
  finalize();
}

void SparsePoly::finalize() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    require(static_cast<int>(it->first.size()) == num_vars_,
            "exponent length does not match variable count");
    if (it->second == 0) it = terms_.erase(it);
    else ++it;
  }
  degree_ = -1;
  fcoefs_.clear();
  fexps_.clear();
  for (const auto& [e, c] : terms_) {
    int deg = 0;
    for (int a : e) {
      require(a >= 0, "negative exponent");
      deg += a;
    }
    degree_ = std::max(degree_, deg);
    fcoefs_.push_back(c.get_d());
    fexps_.insert(fexps_.end(), e.begin(), e.end());
  }
}

SparsePoly SparsePoly::constant(int num_vars, const mpq_class& c) {
  TermMap t;
  t[Exponent(num_vars, 0)] = c;
  return SparsePoly(num_vars, std::move(t));
}

SparsePoly SparsePoly::variable(int num_vars, int index) {
  require(index >= 0 && index < num_vars, "variable index out of range");
  Exponent e(num_vars, 0);
  e[index] = 1;
  return monomial(num_vars, e, 1);
}

SparsePoly SparsePoly::monomial(int num_vars, const Exponent& e,
                                const mpq_class& c) {
  TermMap t;
  t[e] = c;
  return SparsePoly(num_vars, std::move(t));
}

SparsePoly SparsePoly::linear_form(const Vec& v) {
  const int n = static_cast<int>(v.size());
  TermMap t;
  for (int i = 0; i < n; ++i) {
    if (v(i) == 0) continue;
    Exponent e(n, 0);
    e[i] = 1;
    t[e] = exact(v(i));
  }
  return SparsePoly(n, std::move(t));
}

bool SparsePoly::is_homogeneous() const {
  for (const auto& [e, c] : terms_) {
    int deg = 0;
    for (int a : e) deg += a;
    if (deg != degree_) return false;
  }
  return true;
}

mpq_class SparsePoly::coefficient(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? mpq_class(0) : it->second;
}

double SparsePoly::eval(const Vec& x) const {
  require(x.size() == num_vars_, "evaluation point has wrong dimension");
  if (terms_.empty()) return 0.0;
  double out = 0.0;
  kernels::poly_eval(fcoefs_.data(), fexps_.data(), fcoefs_.size(),
                     static_cast<std::size_t>(num_vars_), x.data(), 1, &out);
  return out;
}

Vec SparsePoly::eval_batch(const Mat& pts) const {
  require(pts.rows() == num_vars_, "evaluation points have wrong dimension");
  const std::size_t npts = static_cast<std::size_t>(pts.cols());
  Vec out = Vec::Zero(static_cast<int>(npts));
  if (terms_.empty() || npts == 0) return out;
  // Column-major pts is point-major; the kernel wants coordinate-major.
  Mat soa = pts.transpose();
  kernels::poly_eval(fcoefs_.data(), fexps_.data(), fcoefs_.size(),
                     static_cast<std::size_t>(num_vars_), soa.data(), npts,
                     out.data());
  return out;
}

mpq_class SparsePoly::eval_exact(const std::vector<mpq_class>& x) const {
  require(static_cast<int>(x.size()) == num_vars_,
          "evaluation point has wrong dimension");
  mpq_class s = 0;
  for (const auto& [e, c] : terms_) {
    mpq_class m = c;
    for (int i = 0; i < num_vars_; ++i)
      for (int k = 0; k < e[i]; ++k) m *= x[i];
    s += m;
  }
  return s;
}

SparsePoly SparsePoly::operator+(const SparsePoly& o) const {
  require(num_vars_ == o.num_vars_, "variable count mismatch in sum");
  TermMap t = terms_;
  for (const auto& [e, c] : o.terms_) t[e] += c;
  return SparsePoly(num_vars_, std::move(t));
}

SparsePoly SparsePoly::operator-(const SparsePoly& o) const {
  return *this + o.scaled(-1);
}

SparsePoly SparsePoly::operator*(const SparsePoly& o) const {
  require(num_vars_ == o.num_vars_, "variable count mismatch in product");
  TermMap t;
  Exponent e(num_vars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : o.terms_) {
      for (int i = 0; i < num_vars_; ++i) e[i] = ea[i] + eb[i];
      t[e] += ca * cb;
    }
  return SparsePoly(num_vars_, std::move(t));
}

SparsePoly SparsePoly::scaled(const mpq_class& c) const {
  TermMap t;
  if (c != 0)
    for (const auto& [e, v] : terms_) t[e] = v * c;
  return SparsePoly(num_vars_, std::move(t));
}

SparsePoly SparsePoly::pow(int k) const {
  require(k >= 0, "negative power");
  SparsePoly r = constant(num_vars_, 1);
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

SparsePoly SparsePoly::derivative(int var) const {
  require(var >= 0 && var < num_vars_, "variable index out of range");
  TermMap t;
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent f = e;
    f[var] -= 1;
    t[f] += c * e[var];
  }
  return SparsePoly(num_vars_, std::move(t));
}

SparsePoly SparsePoly::directional_derivative(const Vec& v) const {
  require(v.size() == num_vars_, "direction has wrong dimension");
  if (degree_ <= 0)
    fail(ErrorKind::domain, "directional derivative of a constant polynomial");
  std::vector<mpq_class> vq(num_vars_);
  for (int i = 0; i < num_vars_; ++i) vq[i] = exact(v(i));
  TermMap t;
  for (const auto& [e, c] : terms_)
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] == 0 || vq[i] == 0) continue;
      Exponent f = e;
      f[i] -= 1;
      t[f] += c * e[i] * vq[i];
    }
  return SparsePoly(num_vars_, std::move(t));
}

SparsePoly SparsePoly::shift(const Vec& x) const {
  require(x.size() == num_vars_, "shift has wrong dimension");
  const int n = num_vars_;
  std::vector<mpq_class> xq(n);
  for (int i = 0; i < n; ++i) xq[i] = exact(x(i));
  // Powers and binomials on demand.
  std::vector<std::vector<mpq_class>> pw(n);
  auto power = [&](int i, int k) -> const mpq_class& {
    auto& v = pw[i];
    if (v.empty()) v.push_back(1);
    while (static_cast<int>(v.size()) <= k) v.push_back(v.back() * xq[i]);
    return v[k];
  };
  TermMap t;
  Exponent cur(n, 0);
  for (const auto& [e, c] : terms_) {
    // Enumerate y-exponents k <= e componentwise.
    std::function<void(int, mpq_class)> rec = [&](int i, mpq_class acc) {
      if (acc == 0) return;
      if (i == n) {
        t[cur] += acc;
        return;
      }
      mpz_class binom = 1;
      for (int k = 0; k <= e[i]; ++k) {
        if (k > 0) binom = binom * (e[i] - k + 1) / k;
        cur[i] = k;
        rec(i + 1, acc * binom * power(i, e[i] - k));
      }
      cur[i] = 0;
    };
    rec(0, c);
  }
  return SparsePoly(n, std::move(t));
}

SparsePoly SparsePoly::homogeneous_part(int k) const {
  TermMap t;
  for (const auto& [e, c] : terms_) {
    int deg = 0;
    for (int a : e) deg += a;
    if (deg == k) t[e] = c;
  }
  return SparsePoly(num_vars_, std::move(t));
}

SparsePoly SparsePoly::substitute_linear(const Mat& m) const {
  require(m.rows() == num_vars_, "substitution matrix has wrong row count");
  const int nn = static_cast<int>(m.cols());
  std::vector<SparsePoly> lin;
  for (int i = 0; i < num_vars_; ++i)
    lin.push_back(linear_form(m.row(i).transpose()));
  SparsePoly out(nn);
  for (const auto& [e, c] : terms_) {
    SparsePoly term = constant(nn, c);
    for (int i = 0; i < num_vars_; ++i)
      if (e[i] > 0) term = term * lin[i].pow(e[i]);
    out = out + term;
  }
  return out;
}

SparsePoly SparsePoly::pruned(double rel) const {
  const double mx = max_abs_coef();
  TermMap t;
  for (const auto& [e, c] : terms_)
    if (std::abs(c.get_d()) > rel * mx) t[e] = c;
  return SparsePoly(num_vars_, std::move(t));
}

double SparsePoly::max_abs_coef() const {
  double m = 0.0;
  for (double c : fcoefs_) m = std::max(m, std::abs(c));
  return m;
}

std::string SparsePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest degree first, then reverse lexicographic.
  std::vector<std::pair<Exponent, mpq_class>> items(terms_.rbegin(),
                                                     terms_.rend());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    int da = 0, db = 0;
    for (int v : a.first) da += v;
    for (int v : b.first) db += v;
    return da > db;
  });
  for (const auto& [e, c] : items) {
    mpq_class a = abs(c);
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool has_var = false;
    for (int v : e) has_var |= v > 0;
    bool unit = (a == 1);
    if (!unit || !has_var) os << a.get_str();
    bool sep = !unit || !has_var;
    for (int i = 0; i < num_vars_; ++i) {
      if (e[i] == 0) continue;
      if (sep) os << " ";
      os << "x" << (i + 1);
      if (e[i] > 1) os << "^" << e[i];
      sep = true;
    }
  }
  return os.str();
}

namespace {

mpq_class parse_number(const std::string& s) {
  if (s.find_first_of(".eE") != std::string::npos) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    require(pos == s.size(), "malformed number '" + s + "'");
    return exact(v);
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) fail(ErrorKind::usage, "malformed number '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace

SparsePoly parse_poly(const std::string& text, int num_vars) {
  struct Term {
    mpq_class coef = 1;
    std::map<int, int> powers;
  };
  std::vector<Term> terms;
  Term cur;
  bool have_content = false;
  int sign = 1;
  int max_var = 0;
  std::size_t i = 0;
  auto flush = [&]() {
    if (!have_content) return;
    cur.coef *= sign;
    terms.push_back(cur);
    cur = Term();
    have_content = false;
    sign = 1;
  };
  while (i < text.size()) {
    char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == '*') {
      ++i;
    } else if (ch == '+' || ch == '-') {
      flush();
      if (ch == '-') sign = -sign;
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t j = i;
      while (j < text.size() &&
             (std::isdigit(static_cast<unsigned char>(text[j])) ||
              text[j] == '.' || text[j] == '/' || text[j] == 'e' ||
              text[j] == 'E' ||
              ((text[j] == '-' || text[j] == '+') && j > i &&
               (text[j - 1] == 'e' || text[j - 1] == 'E'))))
        ++j;
      cur.coef *= parse_number(text.substr(i, j - i));
      have_content = true;
      i = j;
    } else if (ch == 'x') {
      std::size_t j = i + 1;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      require(j > i + 1, "variable without index in polynomial text");
      int idx = std::stoi(text.substr(i + 1, j - i - 1));
      require(idx >= 1, "variable indices start at 1");
      int p = 1;
      if (j < text.size() && text[j] == '^') {
        std::size_t k = j + 1;
        while (k < text.size() && std::isdigit(static_cast<unsigned char>(text[k]))) ++k;
        require(k > j + 1, "missing exponent after '^'");
        p = std::stoi(text.substr(j + 1, k - j - 1));
        j = k;
      }
      cur.powers[idx - 1] += p;
      max_var = std::max(max_var, idx);
      have_content = true;
      i = j;
    } else {
      fail(ErrorKind::usage, std::string("unexpected character '") + ch +
                                 "' in polynomial text");
    }
  }
  flush();
  const int n = num_vars > 0 ? num_vars : max_var;
  require(max_var <= n, "variable index exceeds declared variable count");
  TermMap t;
  for (const auto& term : terms) {
    Exponent e(n, 0);
    for (auto [v, p] : term.powers) e[v] = p;
    t[e] += term.coef;
  }
  return SparsePoly(n, std::move(t));
}

Mat quadratic_form_matrix(const SparsePoly& q) {
  const int n = q.num_vars();
  Mat a = Mat::Zero(n, n);
  for (const auto& [e, c] : q.terms()) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < e[i]; ++k) idx.push_back(i);
    require(idx.size() == 2, "quadratic form expected");
    const double v = c.get_d();
    if (idx[0] == idx[1]) {
      a(idx[0], idx[0]) += v;
    } else {
      a(idx[0], idx[1]) += 0.5 * v;
      a(idx[1], idx[0]) += 0.5 * v;
    }
  }
  return a;
}

Vec linear_form_vector(const SparsePoly& q) {
  const int n = q.num_vars();
  Vec v = Vec::Zero(n);
  for (const auto& [e, c] : q.terms()) {
    int deg = 0, at = -1;
    for (int i = 0; i < n; ++i) {
      deg += e[i];
      if (e[i] == 1) at = i;
    }
    require(deg == 1, "linear form expected");
    v(at) += c.get_d();
  }
  return v;
}

}  // namespace terracini
