"""Recursive descent parser for the expression grammar.

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := primary ("^" ["-"] INTEGER)?
    primary := NUMBER | FUNCTION "(" expr ")" | SYMBOL | "(" expr ")"
    FUNCTION := "sin" | "cos" | "exp" | "tanh" | "sqrt"
    NUMBER  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]

Whitespace is insignificant. Exponents are integer literals only.
"""
import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Union

from expressions.nodes import FUNCTIONS, Add, Const, Div, Expr, Mul, Neg, Pow, Sub, Var
from expressions.symbols import SymbolTable
from utils.errors import ExprSyntaxError, UnknownSymbol

NUMBER = "number"
NAME = "name"
OPERATOR = "operator"
END = "end"

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<operator>[-+*/^()])"
    r")"
)
_INTEGER = re.compile(r"\d+\Z")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int  # in bytes


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while True:
        while position < len(text) and text[position].isspace():
            position += 1
        if position == len(text):
            tokens.append(Token(END, "", len(text.encode("utf-8"))))
            return tokens
        match = _TOKEN.match(text, position)
        byte_offset = len(text[:position].encode("utf-8"))
        if match is None:
            raise ExprSyntaxError(f"Unexpected character {text[position]!r}", byte_offset)
        kind = match.lastgroup
        assert kind is not None
        tokens.append(Token(kind, match.group(kind), byte_offset))
        position = match.end()


class _Parser:
    def __init__(self, text: str, symbols: SymbolTable):
        self._tokens = tokenize(text)
        self._position = 0
        self._symbols = symbols

    @property
    def _current(self) -> Token:
        return self._tokens[self._position]

    def _accept(self, operator: str) -> Optional[Token]:
        token = self._current
        if token.kind == OPERATOR and token.text == operator:
            self._position += 1
            return token
        return None

    def _expect(self, operator: str) -> Token:
        token = self._accept(operator)
        if token is None:
            raise ExprSyntaxError(f"Expected {operator!r}, found {self._describe(self._current)}", self._current.offset)
        return token

    @staticmethod
    def _describe(token: Token) -> str:
        return "end of input" if token.kind == END else repr(token.text)

    def parse(self) -> Expr:
        expr = self._expr()
        if self._current.kind != END:
            raise ExprSyntaxError(f"Unexpected {self._describe(self._current)}", self._current.offset)
        return expr

    def _expr(self) -> Expr:
        result = self._term()
        while True:
            if self._accept("+"):
                result = Add(result, self._term())
            elif self._accept("-"):
                result = Sub(result, self._term())
            else:
                return result

    def _term(self) -> Expr:
        result = self._unary()
        while True:
            if self._accept("*"):
                result = Mul(result, self._unary())
            elif self._accept("/"):
                result = Div(result, self._unary())
            else:
                return result

    def _unary(self) -> Expr:
        if self._accept("-"):
            return Neg(self._unary())
        return self._power()

    def _power(self) -> Expr:
        base = self._primary()
        if not self._accept("^"):
            return base
        negative = self._accept("-") is not None
        token = self._current
        if token.kind != NUMBER or not _INTEGER.match(token.text):
            raise ExprSyntaxError(f"Exponent must be an integer literal, found {self._describe(token)}", token.offset)
        self._position += 1
        exponent = int(token.text)
        return Pow(base, -exponent if negative else exponent)

    def _primary(self) -> Expr:
        token = self._current
        if token.kind == NUMBER:
            self._position += 1
            return Const(float(token.text))
        if token.kind == NAME:
            self._position += 1
            if token.text in FUNCTIONS:
                self._expect("(")
                argument = self._expr()
                self._expect(")")
                return FUNCTIONS[token.text](argument)
            if self._current.kind == OPERATOR and self._current.text == "(":
                raise ExprSyntaxError(f"Unknown function {token.text!r}", token.offset)
            if token.text not in self._symbols:
                raise UnknownSymbol(token.text)
            return Var(token.text)
        if self._accept("("):
            inner = self._expr()
            self._expect(")")
            return inner
        raise ExprSyntaxError(f"Unexpected {self._describe(token)}", token.offset)


def parse_expr(text: str, symbols: Union[SymbolTable, Iterable[str]]) -> Expr:
    table = symbols if isinstance(symbols, SymbolTable) else SymbolTable(list(symbols))
    return _Parser(text, table).parse()
