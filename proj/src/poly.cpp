#include "tracial/poly.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>

#include "tracial/error.hpp"

namespace tracial {

Polynomial::Polynomial(std::size_t n, std::map<Word, double> terms) : n_(n) {
  for (const auto& [w, c] : terms) add_term(w, c);
}

Polynomial Polynomial::constant(std::size_t n, double c) { return monomial(n, Word{}, c); }

Polynomial Polynomial::monomial(std::size_t n, const Word& w, double c) {
  Polynomial p(n);
  p.add_term(w, c);
  return p;
}

std::size_t Polynomial::degree() const noexcept {
  std::size_t d = 0;
  for (const auto& [w, c] : terms_) d = std::max(d, w.degree());
  return d;
}

double Polynomial::coefficient(const Word& w) const {
  auto it = terms_.find(w);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::l1_norm() const {
  double s = 0.0;
  for (const auto& [w, c] : terms_) s += std::abs(c);
  return s;
}

void Polynomial::add_term(const Word& w, double c) {
  if (w.min_variables() > n_)
    throw InputError("word uses variable x" + std::to_string(w.min_variables()) + " but n = " + std::to_string(n_));
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(w, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  n_ = std::max(n_, other.n_);
  for (const auto& [w, c] : other.terms_) add_term(w, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  n_ = std::max(n_, other.n_);
  for (const auto& [w, c] : other.terms_) add_term(w, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [w, c] : terms_) c *= s;
  return *this;
}

Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
Polynomial operator*(Polynomial a, double s) { return a *= s; }
Polynomial operator*(double s, Polynomial a) { return a *= s; }

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out(std::max(a.variables(), b.variables()));
  for (const auto& [u, cu] : a.terms())
    for (const auto& [v, cv] : b.terms()) out.add_term(u * v, cu * cv);
  return out;
}

bool approx_equal(const Polynomial& a, const Polynomial& b, double tol) {
  const Polynomial diff = a - b;
  for (const auto& [w, c] : diff.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

Polynomial involution(const Polynomial& p) {
  Polynomial out(p.variables());
  for (const auto& [w, c] : p.terms()) out.add_term(reverse(w), c);
  return out;
}

CyclicReduction cyclic_reduce(const Polynomial& p, double drop_tol) {
  CyclicReduction classes;
  for (const auto& [w, c] : p.terms()) classes[canon_cyclic(w)] += c;
  std::erase_if(classes, [&](const auto& kv) { return std::abs(kv.second) <= drop_tol; });
  return classes;
}

std::map<Word, double> tracial_reduce(const Polynomial& p) {
  std::map<Word, double> classes;
  for (const auto& [w, c] : p.terms()) classes[canon_tracial(w)] += c;
  return classes;
}

bool cyclically_equivalent(const Polynomial& p, const Polynomial& q, double tol) {
  for (const auto& [w, s] : cyclic_reduce(p - q, 0.0))
    if (std::abs(s) > tol) return false;
  return true;
}

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::size_t n) : text_(text), n_(n) {}

  Polynomial parse_polynomial() {
    Polynomial p(n_);
    skip_ws();
    if (at_end()) throw ParseError("empty polynomial", pos_);
    double sign = 1.0;
    if (peek() == '+' || peek() == '-') {
      sign = peek() == '-' ? -1.0 : 1.0;
      ++pos_;
    }
    while (true) {
      auto [w, c] = parse_term();
      p.add_term(w, sign * c);
      skip_ws();
      if (at_end()) break;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        continue;
      }
      throw ParseError(std::string("unexpected character '") + peek() + "'", pos_);
    }
    return p;
  }

 private:
  std::pair<Word, double> parse_term() {
    skip_ws();
    double coeff = 1.0;
    bool have_anything = false;
    if (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) {
      coeff = parse_number();
      have_anything = true;
    }
    std::vector<Word::Letter> letters;
    while (true) {
      skip_ws();
      if (at_end()) break;
      const std::size_t save = pos_;
      if (peek() == '*') {
        if (!have_anything) throw ParseError("unexpected '*'", pos_);
        ++pos_;
        skip_ws();
        if (at_end() || !is_var_start(peek())) throw ParseError("expected a variable after '*'", pos_);
      }
      if (!is_var_start(peek())) {
        pos_ = save;
        break;
      }
      const Word::Letter l = parse_var();
      std::size_t power = 1;
      skip_ws();
      if (!at_end() && peek() == '^') {
        ++pos_;
        skip_ws();
        power = parse_uint();
      }
      letters.insert(letters.end(), power, l);
      have_anything = true;
    }
    if (!have_anything) throw ParseError("expected a number or a variable", pos_);
    return {Word(std::move(letters)), coeff};
  }

  static bool is_var_start(char c) {
    switch (c) {
      case 'x': case 'X': case 'y': case 'Y': case 'z': case 'Z':
        return true;
      default:
        return false;
    }
  }

  Word::Letter parse_var() {
    const std::size_t start = pos_;
    const char c = static_cast<char>(std::tolower(static_cast<unsigned char>(peek())));
    ++pos_;
    std::size_t index = 1;
    if (c == 'y') {
      index = 2;
    } else if (c == 'z') {
      index = 3;
    } else if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      index = parse_uint();
      if (index == 0) throw ParseError("variable indices start at 1", start);
    }
    if (index > n_)
      throw ParseError("variable index " + std::to_string(index) + " exceeds n = " + std::to_string(n_), start);
    if (index > 256) throw ParseError("too many variables", start);
    return static_cast<Word::Letter>(index - 1);
  }

  std::size_t parse_uint() {
    const std::size_t start = pos_;
    std::size_t value = 0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (res.ec != std::errc()) throw ParseError("expected an unsigned integer", start);
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return value;
  }

  double parse_number() {
    const std::size_t start = pos_;
    double value = 0.0;
    auto res = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (res.ec != std::errc() || !std::isfinite(value)) throw ParseError("malformed number", start);
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return value;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string_view text_;
  std::size_t n_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

Polynomial parse_poly(std::string_view text, std::size_t n) {
  if (n == 0) throw InputError("polynomials need at least one variable");
  return Parser(text, n).parse_polynomial();
}

Word parse_word(std::string_view text, std::size_t n) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return Word{};
  const Polynomial p = parse_poly(text, n);
  if (p.terms().size() != 1 || p.terms().begin()->second != 1.0)
    throw ParseError("'" + std::string(text) + "' is not a word");
  return p.terms().begin()->first;
}

std::string render_word(const Word& w, std::size_t n) {
  if (w.empty()) return "1";
  static constexpr char kShort[] = {'X', 'Y', 'Z'};
  std::string out;
  std::size_t i = 0;
  while (i < w.degree()) {
    std::size_t j = i;
    while (j < w.degree() && w[j] == w[i]) ++j;
    if (!out.empty()) out += '*';
    if (n <= 3) {
      out += kShort[w[i]];
    } else {
      out += 'x';
      out += std::to_string(w[i] + 1);
    }
    if (j - i > 1) out += "^" + std::to_string(j - i);
    i = j;
  }
  return out;
}

std::string render(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [w, c] : p.terms()) {
    const double mag = std::abs(c);
    if (first) {
      if (c < 0) out += "-";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    first = false;
    if (w.empty()) {
      out += format_number(mag);
    } else {
      if (mag != 1.0) out += format_number(mag) + "*";
      out += render_word(w, p.variables());
    }
  }
  return out;
}

double riesz_eval(const TracialSequence& y, const Polynomial& p) {
  if (p.degree() > y.order())
    throw PreconditionError("riesz_eval: polynomial degree " + std::to_string(p.degree()) +
                            " exceeds sequence order " + std::to_string(y.order()));
  double s = 0.0;
  for (const auto& [w, c] : p.terms()) s += c * y(w);
  return s;
}

Vector coefficients(const Polynomial& p, std::span<const Word> basis) {
  Vector out(basis.size(), 0.0);
  for (const auto& [w, c] : p.terms()) {
    auto it = std::lower_bound(basis.begin(), basis.end(), w);
    if (it == basis.end() || *it != w) {
      // Basis may not be sorted (custom orders); fall back to a scan.
      it = std::find(basis.begin(), basis.end(), w);
      if (it == basis.end()) throw PreconditionError("polynomial has a word outside the basis");
    }
    out[static_cast<std::size_t>(it - basis.begin())] = c;
  }
  return out;
}

Polynomial from_coefficients(std::size_t n, std::span<const Word> basis, std::span<const double> coeffs,
                             double drop_tol) {
  Polynomial p(n);
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (std::abs(coeffs[i]) > drop_tol) p.add_term(basis[i], coeffs[i]);
  return p;
}

std::size_t validate_tuple(std::span<const Matrix> mats, std::size_t n, double sym_tol) {
  if (mats.size() != n)
    throw InputError("expected " + std::to_string(n) + " matrices, got " + std::to_string(mats.size()));
  if (mats.empty()) throw InputError("empty matrix tuple");
  const std::size_t t = mats.front().rows();
  for (const Matrix& a : mats) {
    if (a.rows() != t || a.cols() != t) throw InputError("matrix tuple has inconsistent sizes");
    if (a.asymmetry() > sym_tol * std::max(1.0, a.max_abs())) throw InputError("matrix in tuple is not symmetric");
  }
  return t;
}

Matrix evaluate_word(const Word& w, std::span<const Matrix> mats) {
  const std::size_t t = mats.empty() ? 0 : mats.front().rows();
  Matrix out = Matrix::identity(t);
  for (auto l : w.letters()) {
    if (l >= mats.size()) throw InputError("word uses a variable without a matrix");
    out = out * mats[l];
  }
  return out;
}

double evaluate_trace(const Polynomial& p, std::span<const Matrix> mats, double sym_tol) {
  const std::size_t t = validate_tuple(mats, std::max<std::size_t>(p.variables(), mats.size()), sym_tol);
  if (p.variables() > mats.size()) throw InputError("fewer matrices than variables");
  double s = 0.0;
  for (const auto& [w, c] : p.terms()) s += c * evaluate_word(w, mats).trace();
  return s / static_cast<double>(t);
}

}  // namespace tracial
