#include <cmath>
#include <type_traits>

#include "expr_node.hpp"
#include "rlab/error.hpp"
#include "rlab/expr.hpp"

namespace rlab {

CompiledExpr::CompiledExpr(const Expr& expr) : max_coordinate_(expr.max_coordinate()) {
  if (expr.is_constant()) {
    constant_value_ = expr.eval({});
    constant_ = true;
    return;
  }
  constant_ = false;
  emit(expr);
}

int CompiledExpr::emit(const Expr& e) {
  Instr ins{};
  ins.origin = static_cast<int>(origins_.size());
  origins_.push_back(e);

  if (e.is_constant()) {
    ins.op = Instr::Op::Const;
    ins.c = e.eval({});
  } else {
    switch (e.kind()) {
      case ExprKind::Number:
      case ExprKind::Constant:
        ins.op = Instr::Op::Const;
        ins.c = e.number_value();
        break;
      case ExprKind::Coordinate:
        ins.op = Instr::Op::Coord;
        ins.a = e.coordinate_index();
        break;
      case ExprKind::Negate:
        ins.op = Instr::Op::Neg;
        ins.a = emit(e.lhs());
        break;
      case ExprKind::Call:
        ins.op = Instr::Op::Call;
        ins.func = e.func();
        ins.a = emit(e.lhs());
        break;
      case ExprKind::Binary: {
        const Expr& l = e.lhs();
        const Expr& r = e.rhs();
        switch (e.binary_op()) {
          case BinaryOp::Add:
          case BinaryOp::Mul:
            if (l.is_constant() || r.is_constant()) {
              ins.op = e.binary_op() == BinaryOp::Add ? Instr::Op::AddC : Instr::Op::MulC;
              ins.c = (l.is_constant() ? l : r).eval({});
              ins.a = emit(l.is_constant() ? r : l);
            } else {
              ins.op = e.binary_op() == BinaryOp::Add ? Instr::Op::Add : Instr::Op::Mul;
              ins.a = emit(l);
              ins.b = emit(r);
            }
            break;
          case BinaryOp::Sub:
            if (r.is_constant()) {
              ins.op = Instr::Op::AddC;
              ins.c = -r.eval({});
              ins.a = emit(l);
            } else {
              ins.op = Instr::Op::Sub;
              ins.a = emit(l);
              ins.b = emit(r);
            }
            break;
          case BinaryOp::Div:
            if (r.is_constant()) {
              const double d = r.eval({});
              if (d == 0.0) throw DomainError(to_string(e), "division by zero");
              ins.op = Instr::Op::MulC;
              ins.c = 1.0 / d;
              ins.a = emit(l);
            } else {
              ins.op = Instr::Op::Div;
              ins.a = emit(l);
              ins.b = emit(r);
            }
            break;
          case BinaryOp::Pow:
            if (r.is_constant()) {
              const double p = r.eval({});
              if (const auto n = detail::integral_exponent(p)) {
                ins.op = Instr::Op::PowInt;
                ins.n = *n;
                ins.a = emit(l);
                break;
              }
            }
            ins.op = Instr::Op::PowGeneral;
            ins.a = emit(l);
            ins.b = emit(r);
            break;
        }
        break;
      }
    }
  }
  code_.push_back(ins);
  return static_cast<int>(code_.size()) - 1;
}

template <class T>
T CompiledExpr::run(std::span<const double> point) const {
  if (point.size() > static_cast<std::size_t>(kMaxDim) ||
      static_cast<std::size_t>(max_coordinate_) > point.size()) {
    throw InvalidArgument("compiled expression references x" + std::to_string(max_coordinate_) +
                          " but the point has dimension " + std::to_string(point.size()));
  }
  if (constant_) {
    if constexpr (std::is_same_v<T, double>) {
      return constant_value_;
    } else {
      return Jet2::constant(constant_value_);
    }
  }
  thread_local std::vector<T> regs;
  regs.resize(code_.size());
  for (std::size_t k = 0; k < code_.size(); ++k) {
    const Instr& ins = code_[k];
    const auto where = [this, &ins] { return to_string(origins_[ins.origin]); };
    T& out = regs[k];
    switch (ins.op) {
      case Instr::Op::Const:
        if constexpr (std::is_same_v<T, double>) {
          out = ins.c;
        } else {
          out = Jet2::constant(ins.c);
        }
        continue;
      case Instr::Op::Coord:
        if constexpr (std::is_same_v<T, double>) {
          out = point[ins.a];
        } else {
          out = Jet2::variable(ins.a, point[ins.a]);
        }
        continue;
      case Instr::Op::Neg: out = -regs[ins.a]; break;
      case Instr::Op::Add: out = regs[ins.a] + regs[ins.b]; break;
      case Instr::Op::Sub: out = regs[ins.a] - regs[ins.b]; break;
      case Instr::Op::Mul: out = regs[ins.a] * regs[ins.b]; break;
      case Instr::Op::Div: out = detail::apply_div<T>(regs[ins.a], regs[ins.b], where); break;
      case Instr::Op::AddC:
        out = regs[ins.a];
        if constexpr (std::is_same_v<T, double>) {
          out += ins.c;
        } else {
          out.value += ins.c;
        }
        break;
      case Instr::Op::MulC: out = regs[ins.a] * ins.c; break;
      case Instr::Op::PowInt: out = detail::apply_pow_int<T>(regs[ins.a], ins.n, where); break;
      case Instr::Op::PowGeneral: out = detail::apply_pow_general<T>(regs[ins.a], regs[ins.b], where); break;
      case Instr::Op::Call: out = detail::apply_func<T>(ins.func, regs[ins.a], where); break;
    }
    double v;
    if constexpr (std::is_same_v<T, double>) {
      v = out;
    } else {
      v = out.value;
    }
    if (!std::isfinite(v)) throw DomainError(where(), "non-finite result");
  }
  return regs.back();
}

double CompiledExpr::eval(std::span<const double> point) const { return run<double>(point); }
Jet2 CompiledExpr::eval_jet(std::span<const double> point) const { return run<Jet2>(point); }

}  // namespace rlab
