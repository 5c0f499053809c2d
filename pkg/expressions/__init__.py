from expressions.dual import Dual, Number
from expressions.nodes import Add, Const, Cos, Div, Exp, Expr, Mul, Neg, Pow, Sin, Sqrt, Sub, Tanh, Var, evaluate
from expressions.parser import parse_expr
from expressions.symbols import SymbolTable
from expressions.vector import ExprVec

__all__ = [
    "Add",
    "Const",
    "Cos",
    "Div",
    "Dual",
    "Exp",
    "Expr",
    "ExprVec",
    "Mul",
    "Neg",
    "Number",
    "Pow",
    "Sin",
    "Sqrt",
    "Sub",
    "SymbolTable",
    "Tanh",
    "Var",
    "evaluate",
    "parse_expr",
]
