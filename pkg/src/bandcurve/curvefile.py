"""Point-set and curve-file I/O plus the width/height normalization.

Point files are plain text: optional `#` comments, a header line that is
either `closed` or `open sxl syl sxr syr` (a bare `open` defers the slopes
to the caller), then one `x y` pair per line.

Curve files are key-value headers followed by a coefficient table, written
with 17 significant digits so 64-bit floats round-trip exactly; writing,
reading and re-writing a file reproduces it byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import spectral
from .bezier import PointSet
from .driver import FitResult
from .errors import DegenerateInputError, ParseError

FORMAT_TAG = "bandcurve-curve v1"


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _parse_float(tok, path, line_no):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", path, line_no) from None
    if not math.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", path, line_no)
    return v


def normalize_points(pts: PointSet):
    """Scale uniformly so the bbox dimension closest to 1 becomes exactly 1.

    "Closest to 1" minimizes |ln d|; ties pick the width.  Returns the
    scaled point set and the applied factor (multiply coordinates by it);
    end slopes pass through untouched, they are read in normalized units.
    """
    p = pts.points
    w = float(p[:, 0].max() - p[:, 0].min())
    h = float(p[:, 1].max() - p[:, 1].min())
    if w == 0.0 and h == 0.0:
        raise DegenerateInputError("point set has a degenerate bounding box")

    def badness(d):
        return abs(math.log(d)) if d > 0 else math.inf

    chosen = w if badness(w) <= badness(h) else h
    factor = 1.0 / chosen
    scaled = PointSet(
        p * factor,
        closed=pts.closed,
        slope_left=pts.slope_left,
        slope_right=pts.slope_right,
    )
    return scaled, factor


def read_points(path, *, closed=None, slope_left=None, slope_right=None) -> PointSet:
    """Parse a point file; keyword arguments fill in or override the header."""
    rows = []
    header = None
    header_line = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            if header is None and not rows and toks[0] in ("open", "closed"):
                header = toks
                header_line = line_no
                continue
            if len(toks) != 2:
                raise ParseError(f"expected 2 coordinates, got {len(toks)}", path, line_no)
            rows.append((_parse_float(toks[0], path, line_no), _parse_float(toks[1], path, line_no)))
    if not rows:
        raise ParseError("no points found", path)

    if header is not None:
        if header[0] == "closed":
            if len(header) != 1:
                raise ParseError("closed header takes no arguments", path, header_line)
            if closed is None:
                closed = True
        else:
            if closed is None:
                closed = False
            if len(header) == 5:
                vals = [_parse_float(t, path, header_line) for t in header[1:]]
                if slope_left is None:
                    slope_left = (vals[0], vals[1])
                if slope_right is None:
                    slope_right = (vals[2], vals[3])
            elif len(header) != 1:
                raise ParseError("open header takes 0 or 4 slope components", path, header_line)
    if closed is None:
        raise ParseError("file has no open/closed header and none was given", path)
    if not closed and (slope_left is None or slope_right is None):
        raise ParseError("open input needs both end slopes", path)
    if closed:
        slope_left = slope_right = None
    try:
        return PointSet(np.array(rows), closed=closed, slope_left=slope_left, slope_right=slope_right)
    except (DegenerateInputError, Exception) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), path) from exc


def write_points(path, pts: PointSet):
    with open(path, "w", encoding="utf-8") as fh:
        if pts.closed:
            fh.write("closed\n")
        else:
            sl, sr = pts.slope_left, pts.slope_right
            fh.write(f"open {_fmt(sl[0])} {_fmt(sl[1])} {_fmt(sr[0])} {_fmt(sr[1])}\n")
        for x, y in pts.points:
            fh.write(f"{_fmt(x)} {_fmt(y)}\n")


@dataclass
class CurveFile:
    """Serializable truncated-coefficient curve plus provenance."""

    basis: str
    closed: bool
    L: float
    n_coefs: int
    x_coefs: np.ndarray
    y_coefs: np.ndarray
    n_stop: int = 0
    e_samp: float = 0.0
    converged: bool = True
    decay_theta: int = 0
    decay_sprime: int = 0
    delta_theta: float = 0.0
    delta_sprime: float = 0.0
    scale_factor: float = 1.0
    config: str = ""

    @classmethod
    def from_fit_result(cls, result: FitResult, scale_factor: float = 1.0) -> "CurveFile":
        return cls(
            basis=result.basis,
            closed=result.closed,
            L=result.L,
            n_coefs=result.n_coefs,
            x_coefs=result.x_coefs,
            y_coefs=result.y_coefs,
            n_stop=result.n_stop,
            e_samp=result.e_samp,
            converged=result.converged,
            decay_theta=result.decay_theta,
            decay_sprime=result.decay_sprime,
            delta_theta=result.delta_theta,
            delta_sprime=result.delta_sprime,
            scale_factor=scale_factor,
            config=result.config.echo() if result.config is not None else "",
        )

    def eval(self, t) -> np.ndarray:
        """Points of the stored curve at parameters t."""
        x = spectral.eval_series(self.basis, self.x_coefs, self.L, t)
        y = spectral.eval_series(self.basis, self.y_coefs, self.L, t)
        return np.column_stack([x, y])

    def spectrum(self):
        """(index, |x_k|, |y_k|); Fourier shows the non-negative half."""
        if self.basis == spectral.CHEBYSHEV:
            k = np.arange(self.n_coefs)
            return k, np.abs(self.x_coefs), np.abs(self.y_coefs)
        half = self.n_coefs // 2
        k = np.arange(half)
        return k, np.abs(self.x_coefs[half:]), np.abs(self.y_coefs[half:])

    def dumps(self) -> str:
        lines = [
            FORMAT_TAG,
            f"basis {self.basis}",
            f"closed {int(self.closed)}",
            f"L {_fmt(self.L)}",
            f"n_coefs {self.n_coefs}",
            f"n_stop {self.n_stop}",
            f"e_samp {_fmt(self.e_samp)}",
            f"converged {int(self.converged)}",
            f"decay_theta {self.decay_theta}",
            f"decay_sprime {self.decay_sprime}",
            f"delta_theta {_fmt(self.delta_theta)}",
            f"delta_sprime {_fmt(self.delta_sprime)}",
            f"scale_factor {_fmt(self.scale_factor)}",
            f"config {self.config}",
            "coefs",
        ]
        if self.basis == spectral.CHEBYSHEV:
            for k in range(self.n_coefs):
                lines.append(f"{k} {_fmt(self.x_coefs[k])} {_fmt(self.y_coefs[k])}")
        else:
            half = self.n_coefs // 2
            for i in range(self.n_coefs):
                k = i - half
                xc, yc = self.x_coefs[i], self.y_coefs[i]
                lines.append(
                    f"{k} {_fmt(xc.real)} {_fmt(xc.imag)} {_fmt(yc.real)} {_fmt(yc.imag)}"
                )
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str, path=None) -> "CurveFile":
        lines = text.splitlines()
        if not lines or lines[0].strip() != FORMAT_TAG:
            raise ParseError(f"missing {FORMAT_TAG!r} header", path, 1)
        fields = {}
        i = 1
        while i < len(lines):
            line = lines[i].strip()
            i += 1
            if line == "coefs":
                break
            if not line:
                continue
            key, _, value = line.partition(" ")
            if key in fields:
                raise ParseError(f"duplicate key {key!r}", path, i)
            fields[key] = (value, i)
        else:
            raise ParseError("missing coefs section", path)

        required = [
            "basis", "closed", "L", "n_coefs", "n_stop", "e_samp", "converged",
            "decay_theta", "decay_sprime", "delta_theta", "delta_sprime",
            "scale_factor", "config",
        ]
        for key in required:
            if key not in fields:
                raise ParseError(f"missing header key {key!r}", path)
        extra = set(fields) - set(required)
        if extra:
            key = sorted(extra)[0]
            raise ParseError(f"unknown header key {key!r}", path, fields[key][1])

        def fval(key):
            return _parse_float(fields[key][0], path, fields[key][1])

        def ival(key):
            v, ln = fields[key]
            try:
                return int(v)
            except ValueError:
                raise ParseError(f"expected an integer for {key}, got {v!r}", path, ln) from None

        basis = fields["basis"][0]
        if basis not in (spectral.CHEBYSHEV, spectral.FOURIER):
            raise ParseError(f"unknown basis {basis!r}", path, fields["basis"][1])
        n_coefs = ival("n_coefs")
        fourier = basis == spectral.FOURIER

        xs = np.zeros(n_coefs, complex if fourier else float)
        ys = np.zeros_like(xs)
        count = 0
        expected_width = 5 if fourier else 3
        for line_no in range(i, len(lines)):
            line = lines[line_no].strip()
            if not line:
                continue
            toks = line.split()
            if len(toks) != expected_width:
                raise ParseError(
                    f"expected {expected_width} columns, got {len(toks)}", path, line_no + 1
                )
            if count >= n_coefs:
                raise ParseError("more coefficient rows than n_coefs", path, line_no + 1)
            vals = [_parse_float(t, path, line_no + 1) for t in toks[1:]]
            if fourier:
                xs[count] = complex(vals[0], vals[1])
                ys[count] = complex(vals[2], vals[3])
            else:
                xs[count] = vals[0]
                ys[count] = vals[1]
            count += 1
        if count != n_coefs:
            raise ParseError(f"expected {n_coefs} coefficient rows, found {count}", path)

        return cls(
            basis=basis,
            closed=bool(ival("closed")),
            L=fval("L"),
            n_coefs=n_coefs,
            x_coefs=xs,
            y_coefs=ys,
            n_stop=ival("n_stop"),
            e_samp=fval("e_samp"),
            converged=bool(ival("converged")),
            decay_theta=ival("decay_theta"),
            decay_sprime=ival("decay_sprime"),
            delta_theta=fval("delta_theta"),
            delta_sprime=fval("delta_sprime"),
            scale_factor=fval("scale_factor"),
            config=fields["config"][0],
        )


def write_curve(path, curve: CurveFile):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(curve.dumps())


def read_curve(path) -> CurveFile:
    with open(path, "r", encoding="utf-8") as fh:
        return CurveFile.loads(fh.read(), path=path)


def eval_result(result, t) -> np.ndarray:
    """Evaluate a FitResult or CurveFile at parameters t."""
    x = spectral.eval_series(result.basis, result.x_coefs, result.L, t)
    y = spectral.eval_series(result.basis, result.y_coefs, result.L, t)
    return np.column_stack([x, y])
