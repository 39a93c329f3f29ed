"""Uniform sample grids on a symmetric time window, with serialization.

Everything downstream works on functions sampled uniformly on
``[t_min, t_max]``.  The container is immutable, checks the lattice
invariant ``(t_max - t_min)/step + 1 == len(samples)``, and knows how to
verify the window-decay hypothesis that convolution and spectral
routines rely on.  Serialization is CSV (columns ``t,re,im``, 17
significant digits, bit-exact for binary64 values) and JSON with a
metadata block.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError, ValidationError, WindowError

__all__ = ["GridFunction", "DEFAULT_T_MAX", "DEFAULT_STEP"]

DEFAULT_T_MAX = 30.0
DEFAULT_STEP = 2.0**-7

_FMT = "%.17g"


@dataclass(frozen=True)
class GridFunction:
    t_min: float
    t_max: float
    step: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not (np.isfinite(self.t_min) and np.isfinite(self.t_max) and self.step > 0.0):
            raise ValidationError("grid bounds must be finite and step positive")
        if self.t_max <= self.t_min:
            raise ValidationError(f"empty window [{self.t_min}, {self.t_max}]")
        arr = np.ascontiguousarray(self.samples, dtype=np.complex128)
        count = (self.t_max - self.t_min) / self.step + 1.0
        n = round(count)
        if abs(count - n) > 1e-9 or n != arr.size:
            raise ValidationError(
                f"lattice mismatch: window/step imply {count} points, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValidationError("samples must be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    @classmethod
    def from_callable(cls, fun, t_min=-DEFAULT_T_MAX, t_max=DEFAULT_T_MAX, step=DEFAULT_STEP):
        n = round((t_max - t_min) / step) + 1
        t = t_min + step * np.arange(n)
        return cls(t_min=t_min, t_max=t_max, step=step, samples=np.asarray(fun(t)))

    @property
    def t(self):
        return self.t_min + self.step * np.arange(self.samples.size)

    @property
    def n_points(self):
        return self.samples.size

    @property
    def real_samples(self):
        return self.samples.real

    def with_samples(self, samples):
        """Same lattice, new values."""
        return GridFunction(self.t_min, self.t_max, self.step, samples)

    def same_grid(self, other):
        return (
            self.t_min == other.t_min
            and self.t_max == other.t_max
            and self.step == other.step
        )

    def require_same_grid(self, other):
        if not self.same_grid(other):
            raise GridMismatchError(
                f"grids differ: [{self.t_min},{self.t_max}]/{self.step} vs "
                f"[{other.t_min},{other.t_max}]/{other.step}"
            )

    def decay_margin(self):
        """Largest endpoint magnitude relative to the peak (0 for h == 0)."""
        peak = float(np.max(np.abs(self.samples)))
        if peak == 0.0:
            return 0.0
        ends = max(abs(complex(self.samples[0])), abs(complex(self.samples[-1])))
        return ends / peak

    def require_decay(self, threshold=1e-10):
        margin = self.decay_margin()
        if margin > threshold:
            raise WindowError(
                f"endpoint magnitude is {margin:.3e} of the peak, above {threshold:.1e}; "
                "widen the window"
            )

    def trapz(self):
        """Trapezoid integral over the window."""
        w = np.ones(self.samples.size)
        w[0] = w[-1] = 0.5
        return complex(np.sum(w * self.samples) * self.step)

    # -- arithmetic on a shared lattice ------------------------------------

    def __add__(self, other):
        self.require_same_grid(other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        self.require_same_grid(other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scalar):
        return self.with_samples(self.samples * scalar)

    __rmul__ = __mul__

    # -- serialization ------------------------------------------------------

    def to_csv(self, path, metadata=None):
        t = self.t
        with open(path, "w", newline="") as fh:
            if metadata is not None:
                fh.write("# " + json.dumps(metadata, sort_keys=True) + "\n")
            writer = csv.writer(fh)
            writer.writerow(["t", "re", "im"])
            for k in range(self.samples.size):
                writer.writerow(
                    [_FMT % t[k], _FMT % self.samples[k].real, _FMT % self.samples[k].imag]
                )

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="") as fh:
            # Leading '#' lines hold a JSON metadata echo; values live below.
            header = None
            reader = csv.reader(fh)
            for row in reader:
                if row and row[0].startswith("#"):
                    continue
                header = row
                break
            if header != ["t", "re", "im"]:
                raise ValidationError(f"expected header t,re,im, got {header}")
            t = []
            vals = []
            for row in reader:
                t.append(float(row[0]))
                vals.append(complex(float(row[1]), float(row[2])))
        if len(t) < 2:
            raise ValidationError("need at least two samples")
        step = (t[-1] - t[0]) / (len(t) - 1)
        return cls(t_min=t[0], t_max=t[-1], step=step, samples=np.array(vals))

    def to_json(self, path, metadata=None):
        payload = {
            "grid": {"t_min": self.t_min, "t_max": self.t_max, "step": self.step},
            "metadata": metadata or {},
            "re": [float(v) for v in self.samples.real],
            "im": [float(v) for v in self.samples.imag],
        }
        with open(path, "w") as fh:
            json.dump(payload, fh)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            payload = json.load(fh)
        g = payload["grid"]
        samples = np.array(payload["re"]) + 1j * np.array(payload["im"])
        out = cls(t_min=g["t_min"], t_max=g["t_max"], step=g["step"], samples=samples)
        return out, payload.get("metadata", {})
