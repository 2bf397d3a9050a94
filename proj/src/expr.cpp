#include "czlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <stdexcept>

namespace czlab {

class ExprParser {
 public:
  ExprParser(const std::string& s, Expr& e) : s_(s), e_(e) {}

  void run() {
    skip();
    if (s_.compare(pos_, 2, "u=") == 0) pos_ += 2;
    expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("recipe '" + s_ + "': " + what + " at offset " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void emit(Expr::Op op, double c = 0.0, int var = 0) { e_.prog_.push_back({op, c, var}); }

  void expr() {
    term();
    for (;;) {
      if (eat('+')) {
        term();
        emit(Expr::Op::Add);
      } else if (eat('-')) {
        term();
        emit(Expr::Op::Sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (eat('*')) {
        unary();
        emit(Expr::Op::Mul);
      } else if (eat('/')) {
        unary();
        emit(Expr::Op::Div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (eat('-')) {
      unary();
      emit(Expr::Op::Neg);
    } else if (eat('+')) {
      unary();
    } else {
      power();
    }
  }

  void power() {
    primary();
    if (eat('^')) {
      unary();
      emit(Expr::Op::Pow);
    }
  }

  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (eat('(')) {
      expr();
      if (!eat(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      emit(Expr::Op::Const, v);
      return;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");
    std::string id;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) id += s_[pos_++];

    static const std::map<std::string, Expr::Op> functions{
        {"sin", Expr::Op::Sin},   {"cos", Expr::Op::Cos},   {"tan", Expr::Op::Tan},   {"exp", Expr::Op::Exp},
        {"log", Expr::Op::Log},   {"sqrt", Expr::Op::Sqrt}, {"sinh", Expr::Op::Sinh}, {"cosh", Expr::Op::Cosh},
        {"tanh", Expr::Op::Tanh}, {"pos", Expr::Op::Pos}};
    if (id == "pow") {
      if (!eat('(')) fail("expected '(' after pow");
      expr();
      if (!eat(',')) fail("expected ',' in pow");
      expr();
      if (!eat(')')) fail("expected ')'");
      emit(Expr::Op::Pow);
      return;
    }
    if (auto it = functions.find(id); it != functions.end()) {
      if (!eat('(')) fail("expected '(' after " + id);
      expr();
      if (!eat(')')) fail("expected ')'");
      emit(it->second);
      return;
    }
    if (id == "pi") return emit(Expr::Op::Const, std::numbers::pi);
    if (id == "e") return emit(Expr::Op::Const, std::numbers::e);
    if (id == "t") {
      e_.uses_time_ = true;
      return emit(Expr::Op::Var, 0.0, 3);
    }
    if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '3') {
      const int a = id[1] - '1';
      e_.max_axis_ = std::max(e_.max_axis_, a + 1);
      return emit(Expr::Op::Var, 0.0, a);
    }
    fail("unknown identifier '" + id + "'");
  }

  const std::string& s_;
  Expr& e_;
  std::size_t pos_ = 0;
};

Expr Expr::parse(const std::string& text) {
  Expr e;
  e.text_ = text;
  ExprParser(text, e).run();
  return e;
}

namespace {

// x^b with 0^b handled as the limit for b > 0.
double safe_pow(double x, double b) {
  if (x == 0.0) return b > 0.0 ? 0.0 : (b == 0.0 ? 1.0 : INFINITY);
  return std::pow(x, b);
}

// Chain rule for a scalar function with value f0, derivative f1, second
// derivative f2, applied in place.
void apply(Jet& a, double f0, double f1, double f2) {
  a.dd = f1 * a.dd + f2 * a.d * a.d.transpose();
  a.d = f1 * a.d;
  a.v = f0;
}

void apply(LapJet& a, double f0, double f1, double f2) {
  a.lap = f1 * a.lap + f2 * a.d.head<3>().squaredNorm();
  a.d = f1 * a.d;
  a.v = f0;
}

bool is_constant(const Jet& j) { return j.d.isZero(0.0) && j.dd.isZero(0.0); }
bool is_constant(const LapJet& j) { return j.d.isZero(0.0) && j.lap == 0.0; }

void scale(Jet& a, double c) {
  a.v *= c;
  a.d = c * a.d;
  a.dd = c * a.dd;
}

void scale(LapJet& a, double c) {
  a.v *= c;
  a.d = c * a.d;
  a.lap *= c;
}

void add(Jet& a, const Jet& b, double sign) {
  a.v += sign * b.v;
  a.d += sign * b.d;
  a.dd += sign * b.dd;
}

void add(LapJet& a, const LapJet& b, double sign) {
  a.v += sign * b.v;
  a.d += sign * b.d;
  a.lap += sign * b.lap;
}

// a <- a * b
void mul(Jet& a, const Jet& b) {
  if (is_constant(b)) return scale(a, b.v);
  if (is_constant(a)) {
    const double c = a.v;
    a = b;
    return scale(a, c);
  }
  a.dd = a.v * b.dd + b.v * a.dd + a.d * b.d.transpose() + b.d * a.d.transpose();
  a.d = a.v * b.d + b.v * a.d;
  a.v *= b.v;
}

void mul(LapJet& a, const LapJet& b) {
  if (is_constant(b)) return scale(a, b.v);
  if (is_constant(a)) {
    const double c = a.v;
    a = b;
    return scale(a, c);
  }
  a.lap = a.v * b.lap + b.v * a.lap + 2.0 * a.d.head<3>().dot(b.d.head<3>());
  a.d = a.v * b.d + b.v * a.d;
  a.v *= b.v;
}

template <typename J>
J run(const std::vector<Expr::Instr>& prog, const std::array<double, 3>& x, double t) {
  using Op = Expr::Op;
  // Slots are reused across calls; a program never needs more than its length.
  thread_local std::vector<J> st;
  if (st.size() < prog.size()) st.resize(prog.size());
  std::size_t top = 0;
  for (const auto& in : prog) {
    if (in.op == Op::Const) {
      st[top++] = J::constant(in.c);
      continue;
    }
    if (in.op == Op::Var) {
      st[top++] = J::variable(in.var, in.var == 3 ? t : x[static_cast<std::size_t>(in.var)]);
      continue;
    }
    if (in.op == Op::Add || in.op == Op::Sub || in.op == Op::Mul || in.op == Op::Div || in.op == Op::Pow) {
      J& b = st[--top];
      J& a = st[top - 1];
      switch (in.op) {
        case Op::Add: add(a, b, 1.0); break;
        case Op::Sub: add(a, b, -1.0); break;
        case Op::Mul: mul(a, b); break;
        case Op::Div:
          if (is_constant(b)) {
            apply(a, a.v / b.v, 1.0 / b.v, 0.0);
          } else {
            apply(b, 1.0 / b.v, -1.0 / (b.v * b.v), 2.0 / (b.v * b.v * b.v));
            mul(a, b);
          }
          break;
        default:
          if (is_constant(b)) {
            const double p = b.v;
            apply(a, safe_pow(a.v, p), p * safe_pow(a.v, p - 1.0), p * (p - 1.0) * safe_pow(a.v, p - 2.0));
          } else {
            // a^b = exp(b log a)
            apply(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
            mul(a, b);
            const double ev = std::exp(a.v);
            apply(a, ev, ev, ev);
          }
      }
      continue;
    }
    J& a = st[top - 1];
    const double v = a.v;
    switch (in.op) {
      case Op::Neg: scale(a, -1.0); break;
      case Op::Sin: apply(a, std::sin(v), std::cos(v), -std::sin(v)); break;
      case Op::Cos: apply(a, std::cos(v), -std::sin(v), -std::cos(v)); break;
      case Op::Tan: {
        const double tv = std::tan(v), s2 = 1.0 + tv * tv;
        apply(a, tv, s2, 2.0 * tv * s2);
        break;
      }
      case Op::Exp: {
        const double ev = std::exp(v);
        apply(a, ev, ev, ev);
        break;
      }
      case Op::Log: apply(a, std::log(v), 1.0 / v, -1.0 / (v * v)); break;
      case Op::Sqrt: {
        const double s = std::sqrt(v);
        apply(a, s, 0.5 / s, -0.25 / (s * v));
        break;
      }
      case Op::Sinh: apply(a, std::sinh(v), std::cosh(v), std::sinh(v)); break;
      case Op::Cosh: apply(a, std::cosh(v), std::sinh(v), std::cosh(v)); break;
      case Op::Tanh: {
        const double th = std::tanh(v), s2 = 1.0 - th * th;
        apply(a, th, s2, -2.0 * th * s2);
        break;
      }
      case Op::Pos:
        if (!(v > 0.0)) a = J::constant(0.0);
        break;
      default: break;
    }
  }
  return st[top - 1];
}

}  // namespace

Jet Expr::eval(const std::array<double, 3>& x, double t) const { return run<Jet>(prog_, x, t); }

LapJet Expr::eval_laplacian(const std::array<double, 3>& x, double t) const { return run<LapJet>(prog_, x, t); }

}  // namespace czlab
