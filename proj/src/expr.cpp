#include "semiharm/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "semiharm/errors.hpp"

namespace semiharm {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_complex(cplx c) {
  std::string s = format_double(c.real());
  if (c.imag() >= 0 || std::isnan(c.imag())) s += "+";
  s += format_double(c.imag()) + "i";
  return s;
}

std::string format_point(const BasePoint& z, int m) {
  std::string s = "(";
  for (int j = 0; j < m; ++j) {
    if (j) s += ";";
    s += format_complex(z[j]);
  }
  return s + ")";
}

namespace {

struct Token {
  enum Kind { Number, Ident, Symbol, End } kind = End;
  double value = 0.0;
  bool imaginary = false;
  std::string text;
  std::size_t pos = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  bool accept(char c) {
    if (tok_.kind == Token::Symbol && tok_.text[0] == c) {
      advance();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << msg << " at column " << tok_.pos + 1 << " in \"" << s_ << "\"";
    throw ParseError(os.str());
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= s_.size()) return;
    char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      try {
        tok_.value = std::stod(s_.substr(i_), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      i_ += used;
      tok_.kind = Token::Number;
      if (i_ < s_.size() && s_[i_] == 'i' &&
          (i_ + 1 >= s_.size() || !std::isalnum(static_cast<unsigned char>(s_[i_ + 1])))) {
        tok_.imaginary = true;
        ++i_;
      }
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) ++j;
      tok_.text = s_.substr(i_, j - i_);
      i_ = j;
      if (tok_.text == "i") {
        tok_.kind = Token::Number;
        tok_.value = 1.0;
        tok_.imaginary = true;
      } else {
        tok_.kind = Token::Ident;
      }
      return;
    }
    if (std::string("+-*/^(),").find(c) != std::string::npos) {
      tok_.kind = Token::Symbol;
      tok_.text = std::string(1, c);
      ++i_;
      return;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t i_ = 0;
  Token tok_;
};

int coordinate_index(const std::string& name, int m) {
  if (name == "z1") return 0;
  if (name == "z2" && m >= 2) return 1;
  return -1;
}

// ---------------------------------------------------------------- BasePoly

class PolyParser {
 public:
  PolyParser(const std::string& s, int m, bool allow_w = false) : lex_(s), m_(m), allow_w_(allow_w) {}

  BasePoly parse() {
    BasePoly p = expr();
    if (lex_.peek().kind != Token::End) lex_.fail("trailing input");
    return p;
  }

 private:
  BasePoly expr() {
    BasePoly p = term();
    for (;;) {
      if (lex_.accept('+')) p = p + term();
      else if (lex_.accept('-')) p = p - term();
      else return p;
    }
  }

  BasePoly term() {
    BasePoly p = unary();
    while (lex_.accept('*')) p = p * unary();
    if (lex_.peek().kind == Token::Symbol && lex_.peek().text == "/")
      lex_.fail("division is not allowed in coefficient polynomials");
    return p;
  }

  BasePoly unary() {
    if (lex_.accept('-')) return -unary();
    if (lex_.accept('+')) return unary();
    return power();
  }

  BasePoly power() {
    BasePoly base = primary();
    if (lex_.accept('^')) {
      Token t = lex_.take();
      if (t.kind != Token::Number || t.imaginary || t.value < 0 || t.value != std::floor(t.value))
        lex_.fail("exponent must be a non-negative integer");
      base = base.pow(static_cast<int>(t.value));
    }
    return base;
  }

  BasePoly primary() {
    Token t = lex_.take();
    if (t.kind == Token::Number)
      return BasePoly::constant(t.imaginary ? cplx(0, t.value) : cplx(t.value, 0));
    if (t.kind == Token::Ident) {
      int j = coordinate_index(t.text, m_);
      if (allow_w_ && t.text == "w") j = 2;
      if (j < 0) lex_.fail("unknown symbol '" + t.text + "'");
      return BasePoly::variable(j);
    }
    if (t.kind == Token::Symbol && t.text == "(") {
      BasePoly p = expr();
      lex_.expect(')');
      return p;
    }
    lex_.fail("unexpected token");
  }

  Lexer lex_;
  int m_;
  bool allow_w_;
};

cplx ipow(cplx a, long n) {
  if (n < 0) return 1.0 / ipow(a, -n);
  cplx r = 1.0;
  while (n) {
    if (n & 1) r *= a;
    a *= a;
    n >>= 1;
  }
  return r;
}

bool integral_exponent(cplx e, long& n) {
  if (e.imag() != 0.0 || e.real() != std::floor(e.real()) || std::abs(e.real()) > 1e6) return false;
  n = static_cast<long>(e.real());
  return true;
}

}  // namespace

BasePoly BasePoly::constant(cplx c) {
  BasePoly p;
  if (c != 0.0) p.terms_[{0, 0, 0}] = c;
  return p;
}

BasePoly BasePoly::variable(int j) {
  BasePoly p;
  Exponent e{0, 0, 0};
  e[j] = 1;
  p.terms_[e] = 1.0;
  return p;
}

BasePoly BasePoly::parse(const std::string& text, int m) { return PolyParser(text, m).parse(); }

std::vector<BasePoly> BasePoly::parse_fiber_polynomial(const std::string& text, int m) {
  BasePoly all = PolyParser(text, m, true).parse();
  int k = 0;
  for (const auto& [e, c] : all.terms_) k = std::max(k, e[2]);
  std::vector<BasePoly> out(k + 1);
  for (const auto& [e, c] : all.terms_) out[e[2]].terms_[{e[0], e[1], 0}] = c;
  return out;
}

void BasePoly::prune() {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second == 0.0) it = terms_.erase(it);
    else ++it;
  }
}

BasePoly BasePoly::operator+(const BasePoly& o) const {
  BasePoly r = *this;
  for (const auto& [e, c] : o.terms_) r.terms_[e] += c;
  r.prune();
  return r;
}

BasePoly BasePoly::operator-(const BasePoly& o) const { return *this + (-o); }

BasePoly BasePoly::operator-() const {
  BasePoly r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

BasePoly BasePoly::operator*(const BasePoly& o) const {
  BasePoly r;
  for (const auto& [e1, c1] : terms_)
    for (const auto& [e2, c2] : o.terms_) r.terms_[{e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]}] += c1 * c2;
  r.prune();
  return r;
}

BasePoly BasePoly::pow(int n) const {
  BasePoly r = constant(1.0);
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

cplx BasePoly::operator()(const BasePoint& z) const {
  cplx s = 0.0;
  for (const auto& [e, c] : terms_) s += c * ipow(z[0], e[0]) * ipow(z[1], e[1]);
  return s;
}

cplx BasePoly::derivative(int j, const BasePoint& z) const {
  cplx s = 0.0;
  for (const auto& [e, c] : terms_) {
    if (e[j] == 0) continue;
    Exponent d = e;
    d[j] -= 1;
    s += c * static_cast<double>(e[j]) * ipow(z[0], d[0]) * ipow(z[1], d[1]);
  }
  return s;
}

bool BasePoly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Exponent{0, 0, 0});
}

double BasePoly::magnitude() const {
  double s = 0.0;
  for (const auto& [e, c] : terms_) s += std::abs(c);
  return s;
}

double BasePoly::abs_eval(const BasePoint& z) const {
  double s = 0.0;
  for (const auto& [e, c] : terms_)
    s += std::abs(c) * std::pow(std::abs(z[0]), e[0]) * std::pow(std::abs(z[1]), e[1]);
  return s;
}

std::string BasePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::string s;
  for (const auto& [e, c] : terms_) {
    if (!s.empty()) s += " + ";
    s += "(" + format_complex(c) + ")";
    if (e[0]) s += "*z1^" + std::to_string(e[0]);
    if (e[1]) s += "*z2^" + std::to_string(e[1]);
  }
  return s;
}

// ------------------------------------------------------------ FieldProgram

namespace {

using Code = FieldProgram::OpCode;
using Ops = std::vector<FieldProgram::Op>;

// Scalar kernels for plain complex evaluation.
cplx k_add(cplx a, cplx b) { return a + b; }
cplx k_sub(cplx a, cplx b) { return a - b; }
cplx k_mul(cplx a, cplx b) { return a * b; }
cplx k_div(cplx a, cplx b) { return a / b; }
cplx k_neg(cplx a) { return -a; }
cplx k_conj(cplx a) { return std::conj(a); }
cplx k_re(cplx a) { return a.real(); }
cplx k_im(cplx a) { return a.imag(); }
cplx k_log(cplx a) { return std::log(a); }
cplx k_abs2(cplx a) { return std::norm(a); }
cplx k_pow(cplx a, cplx b) {
  long n;
  if (integral_exponent(b, n)) return ipow(a, n);
  return std::pow(a, b);
}

// Forward-mode kernels.
Dual k_add(const Dual& a, const Dual& b) {
  Dual r{a.v + b.v};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] + b.d[k];
  return r;
}
Dual k_sub(const Dual& a, const Dual& b) {
  Dual r{a.v - b.v};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] - b.d[k];
  return r;
}
Dual k_mul(const Dual& a, const Dual& b) {
  Dual r{a.v * b.v};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] * b.v + a.v * b.d[k];
  return r;
}
Dual k_div(const Dual& a, const Dual& b) {
  Dual r{a.v / b.v};
  for (int k = 0; k < 4; ++k) r.d[k] = (a.d[k] - r.v * b.d[k]) / b.v;
  return r;
}
Dual k_neg(const Dual& a) {
  Dual r{-a.v};
  for (int k = 0; k < 4; ++k) r.d[k] = -a.d[k];
  return r;
}
Dual k_conj(const Dual& a) {
  Dual r{std::conj(a.v)};
  for (int k = 0; k < 4; ++k) r.d[k] = std::conj(a.d[k]);
  return r;
}
Dual k_re(const Dual& a) {
  Dual r{a.v.real()};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k].real();
  return r;
}
Dual k_im(const Dual& a) {
  Dual r{a.v.imag()};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k].imag();
  return r;
}
Dual k_log(const Dual& a) {
  Dual r{std::log(a.v)};
  for (int k = 0; k < 4; ++k) r.d[k] = a.d[k] / a.v;
  return r;
}
Dual k_abs2(const Dual& a) {
  Dual r{std::norm(a.v)};
  for (int k = 0; k < 4; ++k) r.d[k] = 2.0 * (std::conj(a.v) * a.d[k]).real();
  return r;
}
Dual k_pow(const Dual& a, const Dual& b) {
  bool b_const = true;
  for (const auto& x : b.d) b_const = b_const && x == 0.0;
  long n;
  if (b_const && integral_exponent(b.v, n)) {
    if (n == 0) return Dual{1.0};
    Dual r{ipow(a.v, n)};
    cplx f = static_cast<double>(n) * ipow(a.v, n - 1);
    for (int k = 0; k < 4; ++k) r.d[k] = f * a.d[k];
    return r;
  }
  cplx la = std::log(a.v);
  Dual r{std::exp(b.v * la)};
  for (int k = 0; k < 4; ++k) r.d[k] = r.v * (b.d[k] * la + b.v * a.d[k] / a.v);
  return r;
}

}  // namespace

class FieldCompiler {
 public:
  FieldCompiler(const std::string& s, int m, FieldProgram& prog) : lex_(s), m_(m), prog_(prog) {}

  void compile() {
    Ops ops = expr();
    if (lex_.peek().kind != Token::End) lex_.fail("trailing input");
    prog_.ops_ = std::move(ops);
    int depth = 0, max_depth = 0;
    for (const auto& op : prog_.ops_) {
      switch (op.code) {
        case Code::Const:
        case Code::Z:
        case Code::W: ++depth; break;
        case Code::Add:
        case Code::Sub:
        case Code::Mul:
        case Code::Div:
        case Code::Pow: --depth; break;
        default: break;
      }
      max_depth = std::max(max_depth, depth);
    }
    prog_.max_depth_ = max_depth;
  }

 private:
  Ops expr() {
    Ops a = term();
    for (;;) {
      if (lex_.accept('+')) append(a, term(), Code::Add);
      else if (lex_.accept('-')) append(a, term(), Code::Sub);
      else return a;
    }
  }

  Ops term() {
    Ops a = unary();
    for (;;) {
      if (lex_.accept('*')) append(a, unary(), Code::Mul);
      else if (lex_.accept('/')) append(a, unary(), Code::Div);
      else return a;
    }
  }

  Ops unary() {
    if (lex_.accept('-')) {
      Ops a = unary();
      a.push_back({Code::Neg});
      return a;
    }
    if (lex_.accept('+')) return unary();
    return power();
  }

  Ops power() {
    Ops a = primary();
    if (lex_.accept('^')) append(a, unary(), Code::Pow);
    return a;
  }

  Ops primary() {
    Token t = lex_.take();
    if (t.kind == Token::Number) return {constant(t.imaginary ? cplx(0, t.value) : cplx(t.value, 0))};
    if (t.kind == Token::Symbol && t.text == "(") {
      Ops a = expr();
      lex_.expect(')');
      return a;
    }
    if (t.kind != Token::Ident) lex_.fail("unexpected token");
    if (t.text == "w") return {{Code::W}};
    int j = coordinate_index(t.text, m_);
    if (j >= 0) return {{Code::Z, j}};
    static const std::map<std::string, Code> unary_fns = {
        {"conj", Code::Conj}, {"re", Code::Re}, {"im", Code::Im}, {"log", Code::Log}, {"abs2", Code::Abs2}};
    if (auto it = unary_fns.find(t.text); it != unary_fns.end()) {
      lex_.expect('(');
      Ops a = expr();
      lex_.expect(')');
      a.push_back({it->second});
      return a;
    }
    if (t.text == "radial_singular") return radial_singular();
    lex_.fail("unknown symbol '" + t.text + "'");
  }

  // (log ||z - a||^2)^alpha * h / ||z - a||^(2m - 2 + s)
  Ops radial_singular() {
    lex_.expect('(');
    std::vector<Ops> args;
    args.push_back(expr());
    while (lex_.accept(',')) args.push_back(expr());
    lex_.expect(')');
    const std::size_t n = args.size();
    if (n != static_cast<std::size_t>(2 + m_) && n != static_cast<std::size_t>(3 + m_))
      lex_.fail("radial_singular expects (alpha, s, a_1..a_m [, h])");
    const double alpha = constant_value(args[0]).real();
    const double s = constant_value(args[1]).real();
    if (alpha < 0 || s < 0) lex_.fail("radial_singular requires alpha, s >= 0");
    Ops rho2;
    for (int j = 0; j < m_; ++j) {
      const cplx aj = constant_value(args[2 + j]);
      Ops diff{{Code::Z, j}, constant(aj), {Code::Sub}, {Code::Abs2}};
      if (j == 0) rho2 = diff;
      else append(rho2, diff, Code::Add);
    }
    Ops out = rho2;
    out.push_back({Code::Log});
    append(out, {constant(alpha)}, Code::Pow);
    if (n == static_cast<std::size_t>(3 + m_)) append(out, args.back(), Code::Mul);
    Ops denom = rho2;
    append(denom, {constant(0.5 * (2 * m_ - 2 + s))}, Code::Pow);
    append(out, denom, Code::Div);
    return out;
  }

  cplx constant_value(const Ops& ops) {
    for (const auto& op : ops)
      if (op.code == Code::Z || op.code == Code::W) lex_.fail("radial_singular parameters must be constants");
    FieldProgram tmp;
    tmp.m_ = m_;
    tmp.ops_ = ops;
    tmp.constants_ = prog_.constants_;
    tmp.max_depth_ = static_cast<int>(ops.size());
    return tmp.eval({}, 0.0);
  }

  FieldProgram::Op constant(cplx c) {
    prog_.constants_.push_back(c);
    return {Code::Const, static_cast<int>(prog_.constants_.size() - 1)};
  }

  static void append(Ops& a, const Ops& b, Code code) {
    a.insert(a.end(), b.begin(), b.end());
    a.push_back({code});
  }

  Lexer lex_;
  int m_;
  FieldProgram& prog_;
};

FieldProgram FieldProgram::parse(const std::string& text, int m) {
  FieldProgram prog;
  prog.m_ = m;
  prog.source_ = text;
  FieldCompiler(text, m, prog).compile();
  return prog;
}

template <class T, class Leaf>
T FieldProgram::run(Leaf&& leaf) const {
  std::array<T, 32> small;
  std::vector<T> big;
  T* stack = small.data();
  if (max_depth_ > static_cast<int>(small.size())) {
    big.resize(max_depth_);
    stack = big.data();
  }
  int top = 0;
  for (const auto& op : ops_) {
    switch (op.code) {
      case OpCode::Const: stack[top++] = T{constants_[op.arg]}; break;
      case OpCode::Z:
      case OpCode::W: stack[top++] = leaf(op); break;
      case OpCode::Add: --top; stack[top - 1] = k_add(stack[top - 1], stack[top]); break;
      case OpCode::Sub: --top; stack[top - 1] = k_sub(stack[top - 1], stack[top]); break;
      case OpCode::Mul: --top; stack[top - 1] = k_mul(stack[top - 1], stack[top]); break;
      case OpCode::Div: --top; stack[top - 1] = k_div(stack[top - 1], stack[top]); break;
      case OpCode::Pow: --top; stack[top - 1] = k_pow(stack[top - 1], stack[top]); break;
      case OpCode::Neg: stack[top - 1] = k_neg(stack[top - 1]); break;
      case OpCode::Conj: stack[top - 1] = k_conj(stack[top - 1]); break;
      case OpCode::Re: stack[top - 1] = k_re(stack[top - 1]); break;
      case OpCode::Im: stack[top - 1] = k_im(stack[top - 1]); break;
      case OpCode::Log: stack[top - 1] = k_log(stack[top - 1]); break;
      case OpCode::Abs2: stack[top - 1] = k_abs2(stack[top - 1]); break;
    }
  }
  return stack[0];
}

cplx FieldProgram::eval(const BasePoint& z, cplx w) const {
  return run<cplx>([&](const Op& op) { return op.code == OpCode::W ? w : z[op.arg]; });
}

Dual FieldProgram::eval_dual(const BasePoint& z, cplx w, const std::array<cplx, 2>& dw) const {
  const cplx I(0, 1);
  return run<Dual>([&](const Op& op) {
    Dual d;
    if (op.code == OpCode::W) {
      d.v = w;
      for (int j = 0; j < m_; ++j) {
        d.d[2 * j] = dw[j];
        d.d[2 * j + 1] = I * dw[j];
      }
    } else {
      d.v = z[op.arg];
      d.d[2 * op.arg] = 1.0;
      d.d[2 * op.arg + 1] = I;
    }
    return d;
  });
}

}  // namespace semiharm
