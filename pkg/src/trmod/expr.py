"""Polynomial expression grammar shared by ring files and matrix files.

Expressions are sums of terms ``c*m`` where ``c`` is an integer literal
and ``m`` a product of variables with optional ``^`` powers, e.g.
``x^2``, ``2*x*y - z``, ``x + y + z``.  Parsing yields a mapping from
exponent vectors to integer coefficients; interpretation into a specific
algebra happens elsewhere.
"""

from __future__ import annotations

import re

from .errors import ParseError

_TOKEN = re.compile(r"\s*(\d+|[A-Za-z_][A-Za-z_0-9]*|\^|\*|\+|-)")


def tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos]!r} in {text!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_poly(text: str, variables: list[str]) -> dict[tuple[int, ...], int]:
    """Parse an expression into {exponent vector: coefficient}.

    Coefficients are raw integers (may be negative); reduction mod p is
    the caller's job.  The zero polynomial is the empty dict.
    """
    var_index = {v: i for i, v in enumerate(variables)}
    tokens = tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    result: dict[tuple[int, ...], int] = {}
    pos = 0
    sign = 1
    first = True
    while pos < len(tokens):
        tok = tokens[pos]
        if tok == "+":
            sign = 1
            pos += 1
        elif tok == "-":
            sign = -1
            pos += 1
        elif first:
            sign = 1
        else:
            raise ParseError(f"expected '+' or '-' before {tok!r} in {text!r}")
        coeff, expo, pos = _parse_term(tokens, pos, var_index, text)
        first = False
        key = tuple(expo)
        result[key] = result.get(key, 0) + sign * coeff
    return {k: v for k, v in result.items() if v != 0}


def _parse_term(tokens, pos, var_index, text):
    coeff = 1
    expo = [0] * len(var_index)
    saw_factor = False
    while True:
        if pos >= len(tokens):
            break
        tok = tokens[pos]
        if tok.isdigit():
            coeff *= int(tok)
            pos += 1
        elif tok in var_index:
            v = var_index[tok]
            power = 1
            pos += 1
            if pos < len(tokens) and tokens[pos] == "^":
                pos += 1
                if pos >= len(tokens) or not tokens[pos].isdigit():
                    raise ParseError(f"expected integer power in {text!r}")
                power = int(tokens[pos])
                pos += 1
            expo[v] += power
        elif tok in ("+", "-"):
            break
        else:
            raise ParseError(f"unknown symbol {tok!r} in {text!r}")
        saw_factor = True
        if pos < len(tokens) and tokens[pos] == "*":
            pos += 1
            continue
        break
    if not saw_factor:
        raise ParseError(f"empty term in {text!r}")
    return coeff, expo, pos


def format_poly(terms: list[tuple[int, str]]) -> str:
    """Join (coefficient, monomial label) pairs into an expression string.

    Coefficients are assumed already reduced to [0, p); zero-coefficient
    terms should be filtered by the caller.  Returns "0" for no terms.
    """
    parts = []
    for coeff, label in terms:
        if label == "1":
            parts.append(str(coeff))
        elif coeff == 1:
            parts.append(label)
        else:
            parts.append(f"{coeff}*{label}")
    return " + ".join(parts) if parts else "0"
