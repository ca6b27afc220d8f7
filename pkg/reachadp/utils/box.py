import numpy as np

from reachadp.exceptions import DomainError, ValidationError


class Box:
    """
    Closed axis-aligned hyper-rectangle ``[lo_1, hi_1] x ... x [lo_n, hi_n]``.

    Parameters
    ----------
    lo, hi : list of scalars
        Lower and higher end of the box, one element per dimension.
        ``lo[l] <= hi[l]`` must hold for every dimension ``l``. Zero-width
        (degenerate) boxes are allowed; they have zero volume.
    """

    def __init__(self, lo, hi):
        lo = np.array(lo, dtype="float64").reshape(-1)
        hi = np.array(hi, dtype="float64").reshape(-1)
        if lo.size == 0 or lo.shape != hi.shape:
            raise ValidationError(
                f"Box bounds must be non-empty and of equal length, got {lo.size} and {hi.size}"
            )
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValidationError("Box bounds must be finite")
        if np.any(lo > hi):
            raise ValidationError(f"Box requires lo <= hi, got lo={lo}, hi={hi}")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi

    @property
    def dim(self):
        return self.lo.size

    @property
    def widths(self):
        return self.hi - self.lo

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    @property
    def half_widths(self):
        return 0.5 * (self.hi - self.lo)

    def volume(self):
        return float(np.prod(self.hi - self.lo))

    def contains(self, x):
        """
        Closed-box membership.

        Parameters
        ----------
        x : ndarray of floats
            A single point of shape ``(n,)`` or a batch of shape ``(N, n)``.

        Returns
        -------
        inside : bool or ndarray of bools
        """
        x = _as_points(x, self.dim)
        inside = np.all((x >= self.lo) & (x <= self.hi), axis=-1)
        return inside

    def interior_contains(self, x):
        x = _as_points(x, self.dim)
        return np.all((x > self.lo) & (x < self.hi), axis=-1)

    def intersection(self, other):
        """Return the intersecting box, or ``None`` when the boxes are disjoint."""
        _check_dims(self.dim, other.dim)
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(lo > hi):
            return None
        return Box(lo, hi)

    def overlaps(self, other):
        """True when the interiors of the two boxes intersect."""
        _check_dims(self.dim, other.dim)
        return bool(
            np.all(np.maximum(self.lo, other.lo) < np.minimum(self.hi, other.hi))
        )

    def is_subset_of(self, other):
        _check_dims(self.dim, other.dim)
        return bool(np.all(self.lo >= other.lo) and np.all(self.hi <= other.hi))

    def to_dict(self):
        return {"lo": self.lo.tolist(), "hi": self.hi.tolist()}

    @classmethod
    def from_dict(cls, data):
        return cls(data["lo"], data["hi"])

    def __eq__(self, other):
        if not isinstance(other, Box):
            return NotImplemented
        return np.array_equal(self.lo, other.lo) and np.array_equal(self.hi, other.hi)

    def __hash__(self):
        return hash((self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self):
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


class BoxUnion:
    """
    Finite union of closed boxes with pairwise disjoint interiors.

    Used for the target set, the safe set, their difference and obstacle sets.

    Parameters
    ----------
    boxes : list of Box
        Member boxes, all of the same dimension. An empty list is allowed
        when ``dim`` is given.

    dim : int (optional)
        Dimension of the union. Required only when ``boxes`` is empty.
    """

    def __init__(self, boxes, dim=None):
        boxes = list(boxes)
        if not boxes and dim is None:
            raise ValidationError("An empty BoxUnion needs an explicit dimension")
        self.dim = boxes[0].dim if boxes else int(dim)
        for box in boxes:
            _check_dims(self.dim, box.dim)
        for i in range(len(boxes)):
            for j in range(i + 1, len(boxes)):
                if boxes[i].overlaps(boxes[j]):
                    raise ValidationError(
                        f"Boxes {i} and {j} of the union have overlapping interiors"
                    )
        self.boxes = tuple(boxes)
        # Stacked bounds, shape (P, n), for vectorized evaluation
        if boxes:
            self.lo = np.array([b.lo for b in boxes])
            self.hi = np.array([b.hi for b in boxes])
        else:
            self.lo = np.zeros((0, self.dim))
            self.hi = np.zeros((0, self.dim))

    @classmethod
    def from_box(cls, box):
        return cls([box])

    @classmethod
    def empty(cls, dim):
        return cls([], dim=dim)

    def __len__(self):
        return len(self.boxes)

    def __iter__(self):
        return iter(self.boxes)

    def __repr__(self):
        return f"BoxUnion({list(self.boxes)})"

    def is_empty(self):
        return len(self.boxes) == 0

    def volume(self):
        return volume(self)

    def contains(self, x):
        return contains(self, x)

    def interior_contains(self, x):
        x = _as_points(x, self.dim)
        inside = np.zeros(x.shape[:-1], dtype=bool)
        for box in self.boxes:
            inside |= box.interior_contains(x)
        return inside

    def bounding_box(self):
        if self.is_empty():
            raise DomainError("The empty union has no bounding box")
        return Box(self.lo.min(axis=0), self.hi.max(axis=0))

    def is_subset_of(self, other):
        """
        Whether every member box is covered by ``other``.

        Each member is subtracted by ``other``; the union is a subset when
        nothing of positive volume remains.
        """
        return subtract(self, other).volume() == 0.0

    def to_dict(self):
        return [b.to_dict() for b in self.boxes]

    @classmethod
    def from_dict(cls, data, dim=None):
        return cls([Box.from_dict(d) for d in data], dim=dim)


def contains(bu, x):
    """
    Membership of points in a union of closed boxes.

    Parameters
    ----------
    bu : BoxUnion

    x : ndarray of floats
        A single point ``(n,)`` or a batch ``(N, n)``.

    Returns
    -------
    inside : bool or ndarray of bools
        True where the point lies in some member box (boundary included).
    """
    x = _as_points(x, bu.dim)
    if bu.is_empty():
        return np.zeros(x.shape[:-1], dtype=bool)[()]
    pts = x[..., np.newaxis, :]
    inside = np.all((pts >= bu.lo) & (pts <= bu.hi), axis=-1).any(axis=-1)
    return inside[()]


def volume(bu):
    """Sum of the member volumes."""
    if bu.is_empty():
        return 0.0
    return float(np.sum(np.prod(bu.hi - bu.lo, axis=1)))


def subtract(outer, inner):
    """
    Set difference ``outer \\ inner`` as a union of disjoint boxes.

    Every member of ``inner`` is removed from every piece by slab splitting
    along each dimension in turn, which produces at most ``2n`` new boxes
    per piece and per inner box. Zero-volume pieces are dropped.

    Parameters
    ----------
    outer, inner : BoxUnion or Box

    Returns
    -------
    difference : BoxUnion
    """
    outer = _as_union(outer)
    inner = _as_union(inner)
    _check_dims(outer.dim, inner.dim)

    pieces = [b for b in outer.boxes if b.volume() > 0.0]
    for cut in inner.boxes:
        if cut.volume() == 0.0:
            continue
        remaining = []
        for piece in pieces:
            remaining.extend(_box_minus(piece, cut))
        pieces = remaining
    return BoxUnion(pieces, dim=outer.dim)


def _box_minus(piece, cut):
    if not piece.overlaps(cut):
        return [piece]
    result = []
    lo = piece.lo.copy()
    hi = piece.hi.copy()
    for l in range(piece.dim):
        if cut.lo[l] > lo[l]:
            slab_hi = hi.copy()
            slab_hi[l] = cut.lo[l]
            result.append(Box(lo.copy(), slab_hi))
        if cut.hi[l] < hi[l]:
            slab_lo = lo.copy()
            slab_lo[l] = cut.hi[l]
            result.append(Box(slab_lo, hi.copy()))
        lo[l] = max(lo[l], cut.lo[l])
        hi[l] = min(hi[l], cut.hi[l])
    return [b for b in result if b.volume() > 0.0]


def sample_uniform(bu, rng, size=None):
    """
    Draw points uniformly from a union of boxes.

    A member box is picked with probability proportional to its volume
    (inverse CDF on the cumulative volumes), then the coordinates are drawn
    uniformly inside it.

    Parameters
    ----------
    bu : BoxUnion or Box

    rng : numpy.random.Generator
        Caller-owned generator; it is advanced by this call.

    size : int (optional)
        Number of points. When omitted a single point of shape ``(n,)`` is
        returned, otherwise an array of shape ``(size, n)``.

    Returns
    -------
    points : ndarray of floats
    """
    bu = _as_union(bu)
    total = volume(bu)
    if total <= 0.0:
        raise DomainError("Cannot sample uniformly from a set of zero volume")
    n_points = 1 if size is None else int(size)

    box_volumes = np.prod(bu.hi - bu.lo, axis=1)
    cdf = np.cumsum(box_volumes) / total
    idx = np.searchsorted(cdf, rng.random(n_points), side="right")
    idx = np.minimum(idx, len(bu) - 1)
    lo = bu.lo[idx]
    width = bu.hi[idx] - lo
    points = lo + width * rng.random((n_points, bu.dim))

    if size is None:
        return points[0]
    return points


def _as_union(bu):
    if isinstance(bu, Box):
        return BoxUnion.from_box(bu)
    return bu


def _as_points(x, dim):
    x = np.asarray(x, dtype="float64")
    if x.ndim == 0 or x.shape[-1] != dim:
        raise ValidationError(
            f"Point dimension {x.shape[-1] if x.ndim else 0} does not match set dimension {dim}"
        )
    return x


def _check_dims(d1, d2):
    if d1 != d2:
        raise ValidationError(f"Dimension mismatch: {d1} vs {d2}")
