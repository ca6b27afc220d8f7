import numpy as np

from reachadp.exceptions import ValidationError


class CellGrid:
    """
    Regular grid of cells covering a box, with values stored at cell centers.

    Parameters
    ----------
    box : Box
        Domain covered by the grid.

    npoints : int or tuple of int
        Number of cells in each direction.
    """

    def __init__(self, box, npoints):
        npoints = np.broadcast_to(np.asarray(npoints, dtype=int), (box.dim,))
        if np.any(npoints < 1):
            raise ValidationError(f"Grid needs at least one cell per direction, got {npoints}")
        self.box = box
        self.npoints = tuple(int(n) for n in npoints)
        self.edges = [
            np.linspace(lo, hi, n + 1) for lo, hi, n in zip(box.lo, box.hi, self.npoints)
        ]
        self.centers = [0.5 * (e[1:] + e[:-1]) for e in self.edges]

    @property
    def dim(self):
        return self.box.dim

    @property
    def shape(self):
        return self.npoints

    @property
    def size(self):
        return int(np.prod(self.npoints))

    def points(self):
        """Cell centers as an array of shape ``(size, n)``, C order."""
        mesh = np.meshgrid(*self.centers, indexing="ij")
        return np.stack([m.reshape(-1) for m in mesh], axis=-1)

    def locate(self, x):
        """
        Flat index of the cell containing each point, ``-1`` outside the box.

        Points on an interior face go to the upper cell; the upper face of
        the box belongs to the last cell.
        """
        x = np.atleast_2d(np.asarray(x, dtype="float64"))
        inside = np.all((x >= self.box.lo) & (x <= self.box.hi), axis=-1)
        idx = [
            np.clip(np.searchsorted(e, x[:, l], side="right") - 1, 0, n - 1)
            for l, (e, n) in enumerate(zip(self.edges, self.npoints))
        ]
        flat = np.ravel_multi_index(idx, self.npoints)
        return np.where(inside, flat, -1)

    def lookup(self, values, x):
        """Piecewise-constant interpolation of ``values`` (shape ``npoints``); 0 outside."""
        single = np.ndim(x) == 1
        flat = self.locate(x)
        out = np.where(flat >= 0, np.ravel(values)[np.maximum(flat, 0)], 0.0)
        return float(out[0]) if single else out
