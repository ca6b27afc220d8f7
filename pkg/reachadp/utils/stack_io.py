"""
Text persistence of value stacks.

Layout (version 1), one record per line::

    # reachadp value stack
    format_version 1
    problem_hash <sha256 of the problem description>
    horizon <T>
    state_dim <n>
    stage <k> <M>
    meta <JSON object, sorted keys>
    <c_1> ... <c_n> <s_1> ... <s_n> <w>      (M lines: center, variance, weight)
    ...
    end

Stages are written from ``k = T-1`` down to 0. Numbers use the shortest
decimal form that reads back to the same double, so reading a file and
writing it again gives identical bytes. Only deterministic metadata
(no timings) is stored, so that equal runs give equal files.
"""

import json

import numpy as np

from reachadp.adp import ValueStack
from reachadp.basis import GrbfStage
from reachadp.exceptions import ValidationError

FORMAT_VERSION = 1
_MAGIC = "# reachadp value stack"
# Metadata entries kept in the file
STORED_METADATA = ("N", "epsilon", "beta", "status", "iterations", "objective", "seed")


def _num(value):
    return repr(float(value))


def stack_to_text(stack):
    problem = stack.problem
    lines = [
        _MAGIC,
        f"format_version {FORMAT_VERSION}",
        f"problem_hash {problem.hash()}",
        f"horizon {problem.horizon}",
        f"state_dim {problem.state_dim}",
    ]
    for k in range(problem.horizon - 1, -1, -1):
        stage = stack.stages[k]
        meta = {
            key: value
            for key, value in stack.metadata.get(k, {}).items()
            if key in STORED_METADATA
        }
        lines.append(f"stage {k} {stage.size}")
        lines.append("meta " + json.dumps(meta, sort_keys=True))
        for c, s, w in zip(stage.centers, stage.variances, stage.weights):
            lines.append(" ".join(_num(v) for v in (*c, *s, w)))
    lines.append("end")
    return "\n".join(lines) + "\n"


def _parse(text):
    lines = text.splitlines()
    if len(lines) < 6 or lines[0] != _MAGIC:
        raise ValidationError("Not a reachadp value stack file")
    header = {}
    for line in lines[1:5]:
        key, _, value = line.partition(" ")
        header[key] = value
    if header.get("format_version") != str(FORMAT_VERSION):
        raise ValidationError(f"Unsupported value stack format version {header.get('format_version')}")
    horizon = int(header["horizon"])
    n = int(header["state_dim"])
    stages = {}
    metadata = {}
    pos = 5
    for _ in range(horizon):
        parts = lines[pos].split()
        if len(parts) != 3 or parts[0] != "stage":
            raise ValidationError(f"Expected a stage record at line {pos + 1}")
        k, size = int(parts[1]), int(parts[2])
        if not lines[pos + 1].startswith("meta "):
            raise ValidationError(f"Expected a meta record at line {pos + 2}")
        metadata[k] = json.loads(lines[pos + 1][len("meta "):])
        rows = np.array(
            [[float(v) for v in line.split()] for line in lines[pos + 2:pos + 2 + size]]
        ).reshape(size, 2 * n + 1)
        stages[k] = GrbfStage.from_arrays(rows[:, :n], rows[:, n:2 * n], k, rows[:, 2 * n])
        pos += 2 + size
    if lines[pos:] != ["end"]:
        raise ValidationError("Malformed value stack trailer")
    return header, stages, metadata


def write_stack(stack, path):
    """Write a :class:`~reachadp.adp.ValueStack` to ``path``."""
    with open(path, "w", newline="\n") as f:
        f.write(stack_to_text(stack))


def read_stack_header(path):
    """Header fields and per-stage metadata of a stack file, without a problem."""
    with open(path) as f:
        header, stages, metadata = _parse(f.read())
    summary = [
        dict({"k": k, "M": stages[k].size}, **metadata[k])
        for k in sorted(stages, reverse=True)
    ]
    return header, summary


def read_stack(path, problem):
    """
    Read a stack file written for ``problem``.

    Raises
    ------
    ValidationError
        When the file was written for a different problem.
    """
    with open(path) as f:
        header, stages, metadata = _parse(f.read())
    if header["problem_hash"] != problem.hash():
        raise ValidationError(
            "The value stack was synthesized for a different problem (hash mismatch)"
        )
    return ValueStack(problem, stages, metadata)
