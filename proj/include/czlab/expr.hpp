#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace czlab {

/// Value, gradient and Hessian with respect to (x1, x2, x3, t).
struct Jet {
  static constexpr int kVars = 4;
  using Vec = Eigen::Matrix<double, kVars, 1>;
  using Mat = Eigen::Matrix<double, kVars, kVars>;

  double v = 0.0;
  Vec d = Vec::Zero();
  Mat dd = Mat::Zero();

  static Jet constant(double c) { return Jet{c, Vec::Zero(), Mat::Zero()}; }
  static Jet variable(int i, double value) {
    Jet j = constant(value);
    j.d[i] = 1.0;
    return j;
  }

  double laplacian(int n) const { return dd.topLeftCorner(n, n).trace(); }
  double time_derivative() const { return d[3]; }
};

/// Value, gradient and spatial Laplacian only: the chain and product rules
/// close on these, so manufactured pairs skip the full Hessian.
struct LapJet {
  using Vec = Jet::Vec;

  double v = 0.0;
  Vec d = Vec::Zero();
  double lap = 0.0;

  static LapJet constant(double c) { return LapJet{c, Vec::Zero(), 0.0}; }
  static LapJet variable(int i, double value) {
    LapJet j = constant(value);
    j.d[i] = 1.0;
    return j;
  }
  double time_derivative() const { return d[3]; }
};

/// Analytic expression in x1, x2, x3, t, compiled to a stack program and
/// evaluated with second-order forward derivatives.
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses, numbers,
/// constants pi and e, functions sin cos tan exp log sqrt sinh cosh tanh pos
/// (positive part) and pow(a, b). A leading "u=" is accepted and ignored.
class Expr {
 public:
  static Expr parse(const std::string& text);

  Jet eval(const std::array<double, 3>& x, double t) const;
  LapJet eval_laplacian(const std::array<double, 3>& x, double t) const;
  double value(const std::array<double, 3>& x, double t) const { return eval(x, t).v; }

  const std::string& text() const { return text_; }
  bool uses_time() const { return uses_time_; }
  /// Highest spatial index referenced (0 if none).
  int max_axis() const { return max_axis_; }

  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh, Pos };
  struct Instr {
    Op op;
    double c = 0.0;
    int var = 0;
  };

 private:
  std::string text_;
  std::vector<Instr> prog_;
  bool uses_time_ = false;
  int max_axis_ = 0;

  friend class ExprParser;
};

}  // namespace czlab
