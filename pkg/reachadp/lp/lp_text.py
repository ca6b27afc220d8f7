"""
Human-readable text form of a stage LP, for cross-checking with external solvers.

Grammar (one item per line, numbers in shortest round-trip decimal form)::

    \\ reachadp-lp 1
    \\ rows <N> vars <M>
    minimize
     obj: <c_1>*w_1 + ... + <c_M>*w_M
    subject to
     row_1: <Phi_11>*w_1 + ... + <Phi_1M>*w_M >= <b_1>
     ...
    bounds
     w_1 free
     ...
    end

Writing an instance read from such a file reproduces the file byte for byte.
"""

import re

import numpy as np

from reachadp.exceptions import ValidationError
from reachadp.lp.instance import LpInstance

FORMAT_VERSION = 1
_HEADER = f"\\ reachadp-lp {FORMAT_VERSION}"
_TERM = re.compile(r"^(\S+)\*w_(\d+)$")


def _num(value):
    return repr(float(value))


def _linear(coeffs):
    return " + ".join(f"{_num(v)}*w_{i + 1}" for i, v in enumerate(coeffs))


def to_text(lp):
    """Render an :class:`LpInstance` in the text grammar above."""
    lines = [_HEADER, f"\\ rows {lp.n_rows} vars {lp.n_vars}", "minimize"]
    lines.append(f" obj: {_linear(lp.c)}")
    lines.append("subject to")
    for s in range(lp.n_rows):
        lines.append(f" row_{s + 1}: {_linear(lp.phi[s])} >= {_num(lp.b[s])}")
    lines.append("bounds")
    lines.extend(f" w_{i + 1} free" for i in range(lp.n_vars))
    lines.append("end")
    return "\n".join(lines) + "\n"


def _parse_linear(text, n_vars, where):
    coeffs = np.zeros(n_vars)
    terms = text.split(" + ")
    if len(terms) != n_vars:
        raise ValidationError(f"{where}: expected {n_vars} terms, got {len(terms)}")
    for i, term in enumerate(terms):
        match = _TERM.match(term.strip())
        if match is None or int(match.group(2)) != i + 1:
            raise ValidationError(f"{where}: malformed term {term!r}")
        coeffs[i] = float(match.group(1))
    return coeffs


def from_text(text):
    """Parse the text grammar above back into an :class:`LpInstance`."""
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise ValidationError("Not a reachadp LP file (bad header)")
    match = re.match(r"^\\ rows (\d+) vars (\d+)$", lines[1])
    if match is None:
        raise ValidationError("Malformed size line")
    n_rows, n_vars = int(match.group(1)), int(match.group(2))
    expected = 7 + n_rows + n_vars
    if len(lines) != expected or lines[2] != "minimize" or lines[4] != "subject to":
        raise ValidationError("Malformed LP file layout")
    if not lines[3].startswith(" obj: "):
        raise ValidationError("Missing objective line")
    c = _parse_linear(lines[3][len(" obj: "):], n_vars, "objective")
    phi = np.zeros((n_rows, n_vars))
    b = np.zeros(n_rows)
    for s in range(n_rows):
        line = lines[5 + s]
        prefix = f" row_{s + 1}: "
        if not line.startswith(prefix) or " >= " not in line:
            raise ValidationError(f"Malformed constraint line {s + 1}")
        lhs, rhs = line[len(prefix):].rsplit(" >= ", 1)
        phi[s] = _parse_linear(lhs, n_vars, f"row {s + 1}")
        b[s] = float(rhs)
    if lines[5 + n_rows] != "bounds" or lines[-1] != "end":
        raise ValidationError("Malformed LP file trailer")
    return LpInstance(c, phi, b)


def write_lp(lp, path):
    with open(path, "w", newline="\n") as f:
        f.write(to_text(lp))


def read_lp(path):
    with open(path) as f:
        return from_text(f.read())
