import csv

import numpy as np

from reachadp.exceptions import ValidationError


def format_value(value):
    """17 significant digits for floats; integers and strings as they are."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % value
    return str(value)


def write_csv(path, header, rows):
    """
    Write a CSV file with a fixed header.

    Parameters
    ----------
    path : string

    header : list of strings
        Column names, written as the first line.

    rows : iterable of sequences
        Each row must have one entry per column.
    """
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            row = list(row)
            if len(row) != len(header):
                raise ValidationError(f"Row of length {len(row)} for {len(header)} columns")
            writer.writerow([format_value(v) for v in row])


def read_csv(path):
    """Header and rows (as strings) of a CSV written by :func:`write_csv`."""
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        return header, [row for row in reader]
