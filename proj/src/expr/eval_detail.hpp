#pragma once

#include "dualpair/expr.hpp"

namespace dualpair {

// Checked primitive operations shared by the tree walker and Program.
double apply_pow(double base, double exponent, const Expr& where);
double apply_func(Func f, double x, const Expr& where);
double apply_div(double num, double den, const Expr& where);

}  // namespace dualpair
